#include "reflex/puzzle.hpp"

#include <algorithm>
#include <map>

#include "reflex/error.hpp"

namespace reflex {

PuzzleState PuzzleState::initial(int max_value) {
  if (max_value < 1) throw ParameterError("puzzle max value must be >= 1");
  PuzzleState s{max_value, {}, 0};
  for (int a = 1; a <= max_value; ++a) {
    for (int b = a; b <= max_value; ++b) s.candidates.emplace_back(a, b);
  }
  return s;
}

namespace {

std::vector<bool> singleton_classes(const std::vector<Pair>& set, const std::vector<Pair>& probe, bool by_sum) {
  std::map<long long, int> sizes;
  auto key = [by_sum](const Pair& p) {
    return by_sum ? static_cast<long long>(p.first) + p.second : static_cast<long long>(p.first) * p.second;
  };
  for (const auto& p : set) ++sizes[key(p)];
  std::vector<bool> out;
  for (const auto& p : probe) {
    auto it = sizes.find(key(p));
    out.push_back(it != sizes.end() && it->second == 1);
  }
  return out;
}

}  // namespace

RoundResult knowledge_round(const PuzzleState& state, Announcement mode) {
  if (state.candidates.empty()) throw DomainError("puzzle already terminated: no candidates left");
  RoundResult out;
  auto& rec = out.record;
  rec.round = state.round + 1;
  rec.candidates = state.candidates;
  rec.sum_knows = singleton_classes(state.candidates, state.candidates, true);
  if (mode == Announcement::kSimultaneous) {
    rec.product_knows = singleton_classes(state.candidates, state.candidates, false);
  } else {
    // The product-knower reasons over the pairs consistent with "sum does not know".
    std::vector<Pair> heard;
    for (std::size_t i = 0; i < state.candidates.size(); ++i) {
      if (!rec.sum_knows[i]) heard.push_back(state.candidates[i]);
    }
    const auto flags = singleton_classes(heard, state.candidates, false);
    rec.product_knows.resize(state.candidates.size());
    for (std::size_t i = 0; i < flags.size(); ++i) rec.product_knows[i] = !rec.sum_knows[i] && flags[i];
  }
  for (std::size_t i = 0; i < state.candidates.size(); ++i) {
    if (!rec.sum_knows[i] && !rec.product_knows[i]) rec.survivors.push_back(state.candidates[i]);
  }
  out.next = {state.max_value, rec.survivors, rec.round};
  return out;
}

Transcript run_sum_product(int max_value, Announcement mode) {
  PuzzleState state = PuzzleState::initial(max_value);
  Transcript t{max_value, mode, {}, {}, false};
  std::map<Pair, PairOutcome> outcome;
  for (const auto& p : state.candidates) outcome[p] = {p, 0, std::nullopt, Resolver::kNever};

  // Each round either shrinks the set or reaches a fixed point, so this
  // runs at most |initial candidates| times.
  while (!state.candidates.empty()) {
    auto [next, rec] = knowledge_round(state, mode);
    for (std::size_t i = 0; i < rec.candidates.size(); ++i) {
      auto& o = outcome[rec.candidates[i]];
      const bool s = rec.sum_knows[i];
      const bool p = rec.product_knows[i];
      if (!s && !p) {
        ++o.dont_know_rounds;
      } else {
        o.resolved_round = rec.round;
        o.resolver = s && p ? Resolver::kBoth : (s ? Resolver::kSum : Resolver::kProduct);
      }
    }
    const bool stuck = next.candidates.size() == state.candidates.size();
    t.rounds.push_back(std::move(rec));
    state = std::move(next);
    if (stuck) {
      t.fixed_point = true;
      break;
    }
  }
  for (auto& [p, o] : outcome) t.outcomes.push_back(o);
  return t;
}

std::vector<PairOutcome> Transcript::sum_named_after(int dont_know) const {
  std::vector<PairOutcome> out;
  for (const auto& o : outcomes) {
    if (o.dont_know_rounds == dont_know && o.resolved_round == dont_know + 1 &&
        (o.resolver == Resolver::kSum || o.resolver == Resolver::kBoth)) {
      out.push_back(o);
    }
  }
  return out;
}

const char* to_string(Resolver r) {
  switch (r) {
    case Resolver::kSum: return "sum";
    case Resolver::kProduct: return "product";
    case Resolver::kBoth: return "both";
    case Resolver::kNever: return "never";
  }
  return "never";
}

}  // namespace reflex
