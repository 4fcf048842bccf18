#include "reflex/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#ifdef REFLEX_HAVE_OPENMP
#include <omp.h>
#endif

namespace reflex {

namespace {

constexpr double kSimplexTol = 1e-9;

std::string player_str(int i) { return "player " + std::to_string(i + 1); }

}  // namespace

// ---------------------------------------------------------------------------
// MixedStrategy

MixedStrategy::MixedStrategy(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidProfile("mixed strategy has no actions");
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw InvalidProfile("mixed strategy has a negative or non-finite probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kSimplexTol) {
    throw InvalidProfile("mixed strategy sums to " + std::to_string(total) + ", expected 1");
  }
}

MixedStrategy MixedStrategy::uniform(std::size_t num_actions) {
  return MixedStrategy(std::vector<double>(num_actions, 1.0 / static_cast<double>(num_actions)));
}

MixedStrategy MixedStrategy::pure(std::size_t num_actions, int action) {
  if (action < 0 || static_cast<std::size_t>(action) >= num_actions) {
    throw InvalidProfile("pure action " + std::to_string(action) + " out of range");
  }
  std::vector<double> p(num_actions, 0.0);
  p[action] = 1.0;
  return MixedStrategy(std::move(p));
}

MixedStrategy MixedStrategy::uniform_over(std::size_t num_actions, const ActionSet& support) {
  if (support.empty()) throw InvalidProfile("uniform over an empty action set");
  std::vector<double> p(num_actions, 0.0);
  const double w = 1.0 / static_cast<double>(support.size());
  for (int a : support) {
    if (a < 0 || static_cast<std::size_t>(a) >= num_actions) throw InvalidProfile("support action out of range");
    p[a] = w;
  }
  return MixedStrategy(std::move(p));
}

bool MixedStrategy::is_pure() const {
  return std::count(probs_.begin(), probs_.end(), 1.0) == 1;
}

int MixedStrategy::mode() const {
  return static_cast<int>(std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
}

MixedStrategy mix(std::span<const MixedStrategy> strategies, std::span<const double> weights) {
  if (strategies.size() != weights.size() || strategies.empty()) {
    throw InvalidProfile("mix: strategy and weight counts differ");
  }
  std::vector<double> out;
  double total = 0.0;
  for (std::size_t k = 0; k < strategies.size(); ++k) {
    if (weights[k] == 0.0) continue;
    if (out.empty()) out.assign(strategies[k].size(), 0.0);
    if (strategies[k].size() != out.size()) throw InvalidProfile("mix: dimension mismatch");
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += weights[k] * strategies[k][a];
    total += weights[k];
  }
  if (out.empty()) throw InvalidProfile("mix: all weights are zero");
  for (double& p : out) p /= total;
  return MixedStrategy(std::move(out));
}

// ---------------------------------------------------------------------------
// Game

Game::Game(std::vector<std::vector<std::string>> actions, Tensor payoffs,
           std::map<std::string, Tensor> theta_variants)
    : actions_(std::move(actions)), payoffs_(std::move(payoffs)), theta_variants_(std::move(theta_variants)) {
  if (actions_.empty()) throw DomainError("game needs at least one player");
  const int n = num_players();
  strides_.assign(n, 1);
  num_profiles_ = 1;
  for (int i = n - 1; i >= 0; --i) {
    if (actions_[i].empty()) throw DomainError(player_str(i) + " has no actions");
    strides_[i] = num_profiles_;
    const auto k = static_cast<std::uint64_t>(actions_[i].size());
    if (num_profiles_ > std::numeric_limits<std::uint64_t>::max() / k / static_cast<std::uint64_t>(n)) {
      throw SizeError("profile space overflows 64-bit indexing");
    }
    num_profiles_ *= k;
  }
  validate_tensor(payoffs_, "payoffs");
  for (const auto& [label, t] : theta_variants_) validate_tensor(t, "theta variant '" + label + "'");
}

void Game::validate_tensor(const Tensor& t, const std::string& what) const {
  if (t.size() != num_profiles_ * actions_.size()) {
    throw DomainError(what + " has " + std::to_string(t.size()) + " entries, expected " +
                      std::to_string(num_profiles_ * actions_.size()));
  }
  for (double v : t) {
    if (!std::isfinite(v)) throw DomainError(what + " contains a non-finite payoff");
  }
}

bool Game::has_theta(const std::string& theta) const {
  return theta_variants_.empty() || theta_variants_.count(theta) > 0;
}

Game Game::at_theta(const std::string& theta) const {
  if (theta_variants_.empty()) return Game(actions_, payoffs_);
  auto it = theta_variants_.find(theta);
  if (it == theta_variants_.end()) throw DomainError("game has no payoff variant for theta '" + theta + "'");
  return Game(actions_, it->second);
}

std::uint64_t Game::flat_index(std::span<const int> profile) const {
  if (profile.size() != actions_.size()) throw InvalidProfile("profile length does not match player count");
  std::uint64_t flat = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i] < 0 || profile[i] >= num_actions(static_cast<int>(i))) {
      throw InvalidProfile(player_str(static_cast<int>(i)) + " action index out of range");
    }
    flat += static_cast<std::uint64_t>(profile[i]) * strides_[i];
  }
  return flat;
}

std::vector<int> Game::decode(std::uint64_t flat) const {
  std::vector<int> profile(actions_.size());
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    profile[i] = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
  }
  return profile;
}

Game Game::transformed(int player, double scale, double shift) const {
  const std::size_t n = actions_.size();
  auto apply = [&](Tensor t) {
    for (std::size_t k = player; k < t.size(); k += n) t[k] = scale * t[k] + shift;
    return t;
  };
  std::map<std::string, Tensor> variants;
  for (const auto& [label, t] : theta_variants_) variants.emplace(label, apply(t));
  return Game(actions_, apply(payoffs_), std::move(variants));
}

// ---------------------------------------------------------------------------
// Responses

void check_profile(const Game& game, const Profile& profile, int skip) {
  if (static_cast<int>(profile.size()) != game.num_players()) {
    throw InvalidProfile("profile has " + std::to_string(profile.size()) + " entries for a " +
                         std::to_string(game.num_players()) + "-player game");
  }
  for (int i = 0; i < game.num_players(); ++i) {
    if (i == skip) continue;
    if (static_cast<int>(profile[i].size()) != game.num_actions(i)) {
      throw InvalidProfile(player_str(i) + " strategy has " + std::to_string(profile[i].size()) +
                           " entries, expected " + std::to_string(game.num_actions(i)));
    }
  }
}

std::vector<double> action_values(const Game& game, const Profile& opp, int player) {
  const int n = game.num_players();
  if (player < 0 || player >= n) throw InvalidProfile("player index out of range");
  check_profile(game, opp, player);

  // Supports of every opponent, so zero-probability branches are never visited.
  std::vector<std::vector<std::pair<int, double>>> support(n);
  for (int j = 0; j < n; ++j) {
    if (j == player) continue;
    for (int a = 0; a < game.num_actions(j); ++a) {
      if (opp[j][a] > 0.0) support[j].emplace_back(a, opp[j][a]);
    }
  }

  std::vector<double> values(game.num_actions(player), 0.0);
  std::vector<std::size_t> cursor(n, 0);
  const std::uint64_t own_stride = game.stride(player);
  while (true) {
    double weight = 1.0;
    std::uint64_t base = 0;
    for (int j = 0; j < n; ++j) {
      if (j == player) continue;
      const auto& [a, p] = support[j][cursor[j]];
      weight *= p;
      base += static_cast<std::uint64_t>(a) * game.stride(j);
    }
    for (int a = 0; a < game.num_actions(player); ++a) {
      values[a] += weight * game.payoff(base + static_cast<std::uint64_t>(a) * own_stride, player);
    }
    int j = n - 1;
    for (; j >= 0; --j) {
      if (j == player) continue;
      if (++cursor[j] < support[j].size()) break;
      cursor[j] = 0;
    }
    if (j < 0) break;
  }
  return values;
}

double expected_utility(const Game& game, const Profile& profile, int player) {
  check_profile(game, profile, -1);
  const auto values = action_values(game, profile, player);
  double total = 0.0;
  for (std::size_t a = 0; a < values.size(); ++a) {
    if (profile[player][a] > 0.0) total += profile[player][a] * values[a];
  }
  return total;
}

ActionSet argmax_set(std::span<const double> values, double tol) {
  ActionSet out;
  if (values.empty()) return out;
  const double best = *std::max_element(values.begin(), values.end());
  for (std::size_t a = 0; a < values.size(); ++a) {
    if (values[a] >= best - tol) out.push_back(static_cast<int>(a));
  }
  return out;
}

ActionSet best_response_set(const Game& game, const Profile& opp, int player) {
  const auto values = action_values(game, opp, player);
  return argmax_set(values);
}

MixedStrategy softmax(std::span<const double> values, double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ParameterError("lambda must be finite and nonnegative, got " + std::to_string(lambda));
  }
  const double top = *std::max_element(values.begin(), values.end());
  std::vector<double> p(values.size());
  double total = 0.0;
  for (std::size_t a = 0; a < values.size(); ++a) {
    p[a] = std::exp(lambda * (values[a] - top));
    total += p[a];
  }
  for (double& x : p) x /= total;
  return MixedStrategy(std::move(p));
}

MixedStrategy qbr(const Game& game, const Profile& opp, int player, double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ParameterError("lambda must be finite and nonnegative, got " + std::to_string(lambda));
  }
  const auto values = action_values(game, opp, player);
  return softmax(values, lambda);
}

MixedStrategy response(const Game& game, const Profile& opp, int player, const ResponseModel& model) {
  if (model.kind == ResponseModel::Kind::kQbr) return qbr(game, opp, player, model.lambda);
  const auto values = action_values(game, opp, player);
  return MixedStrategy::uniform_over(values.size(), argmax_set(values));
}

// ---------------------------------------------------------------------------
// Pure Nash enumeration

namespace {

bool is_pure_nash(const Game& game, std::uint64_t flat) {
  const int n = game.num_players();
  for (int i = 0; i < n; ++i) {
    const std::uint64_t stride = game.stride(i);
    const int own = static_cast<int>((flat / stride) % static_cast<std::uint64_t>(game.num_actions(i)));
    const std::uint64_t base = flat - static_cast<std::uint64_t>(own) * stride;
    const double current = game.payoff(flat, i);
    for (int a = 0; a < game.num_actions(i); ++a) {
      if (game.payoff(base + static_cast<std::uint64_t>(a) * stride, i) > current + kArgmaxTol) return false;
    }
  }
  return true;
}

void check_cap(const Game& game, std::uint64_t cap) {
  if (game.num_profiles() > cap) {
    throw SizeError("pure Nash enumeration needs " + std::to_string(game.num_profiles()) +
                    " profiles, cap is " + std::to_string(cap));
  }
}

}  // namespace

std::vector<std::vector<int>> pure_nash_serial(const Game& game, std::uint64_t cap) {
  check_cap(game, cap);
  std::vector<std::vector<int>> out;
  for (std::uint64_t flat = 0; flat < game.num_profiles(); ++flat) {
    if (is_pure_nash(game, flat)) out.push_back(game.decode(flat));
  }
  return out;
}

std::vector<std::vector<int>> pure_nash(const Game& game, std::uint64_t cap) {
  check_cap(game, cap);
  const auto total = static_cast<std::int64_t>(game.num_profiles());
  std::vector<std::uint64_t> hits;
#ifdef REFLEX_HAVE_OPENMP
#pragma omp parallel
  {
    std::vector<std::uint64_t> local;
#pragma omp for schedule(static) nowait
    for (std::int64_t flat = 0; flat < total; ++flat) {
      if (is_pure_nash(game, static_cast<std::uint64_t>(flat))) local.push_back(static_cast<std::uint64_t>(flat));
    }
#pragma omp critical(reflex_pure_nash_merge)
    hits.insert(hits.end(), local.begin(), local.end());
  }
#else
  for (std::int64_t flat = 0; flat < total; ++flat) {
    if (is_pure_nash(game, static_cast<std::uint64_t>(flat))) hits.push_back(static_cast<std::uint64_t>(flat));
  }
#endif
  // Flat order is lexicographic order over action indices.
  std::sort(hits.begin(), hits.end());
  std::vector<std::vector<int>> out;
  out.reserve(hits.size());
  for (auto flat : hits) out.push_back(game.decode(flat));
  return out;
}

// ---------------------------------------------------------------------------
// Continuous games

ContinuousGame::ContinuousGame(std::vector<std::pair<double, double>> bounds, Family family)
    : bounds_(std::move(bounds)), family_(std::move(family)) {
  if (bounds_.empty()) throw DomainError("continuous game needs at least one player");
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    const auto [lo, hi] = bounds_[i];
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw DomainError(player_str(static_cast<int>(i)) + " bounds must satisfy lo < hi");
    }
  }
  if (const auto* c = std::get_if<CournotLinear>(&family_)) {
    if (!(c->theta > c->cost && c->cost >= 0.0)) throw DomainError("cournot_linear requires theta > c >= 0");
  } else if (!std::get<CustomFamily>(family_).utility) {
    throw DomainError("custom family has no utility function");
  }
}

double ContinuousGame::utility(int player, std::span<const double> profile) const {
  if (static_cast<int>(profile.size()) != num_players()) throw InvalidProfile("profile length mismatch");
  if (const auto* c = std::get_if<CournotLinear>(&family_)) {
    const double total = std::accumulate(profile.begin(), profile.end(), 0.0);
    return profile[player] * (c->theta - total) - c->cost * profile[player];
  }
  return std::get<CustomFamily>(family_).utility(player, profile[player], profile);
}

bool ContinuousGame::in_bounds(std::span<const double> profile, double tol) const {
  if (static_cast<int>(profile.size()) != num_players()) return false;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i] < bounds_[i].first - tol || profile[i] > bounds_[i].second + tol) return false;
  }
  return true;
}

ContinuousGame cournot_linear(int n, double theta, double cost) {
  if (n < 1) throw ParameterError("cournot_linear needs n >= 1");
  return ContinuousGame(std::vector<std::pair<double, double>>(n, {0.0, theta}), CournotLinear{theta, cost});
}

// ---------------------------------------------------------------------------
// Builtins

Game prisoners_dilemma() {
  // T=5, R=3, P=1, S=0; action 0 = Cooperate, 1 = Defect.
  return Game({{"C", "D"}, {"C", "D"}}, {3, 3, 0, 5, 5, 0, 1, 1});
}

Game matching_pennies() {
  return Game({{"H", "T"}, {"H", "T"}}, {1, -1, -1, 1, -1, 1, 1, -1});
}

Game p_beauty(int n, int lo, int hi, double p) {
  if (n < 1 || lo > hi || !std::isfinite(p)) throw ParameterError("p_beauty needs n >= 1, lo <= hi, finite p");
  std::vector<std::string> labels;
  for (int g = lo; g <= hi; ++g) labels.push_back(std::to_string(g));
  std::vector<std::vector<std::string>> actions(n, labels);
  const auto k = static_cast<std::uint64_t>(labels.size());
  std::uint64_t profiles = 1;
  for (int i = 0; i < n; ++i) {
    if (profiles > kDefaultEnumCap / k) throw SizeError("p_beauty profile space exceeds the enumeration cap");
    profiles *= k;
  }
  Game::Tensor payoffs(profiles * static_cast<std::uint64_t>(n), 0.0);
  std::vector<int> guess(n, lo);
  std::vector<double> dist(n);
  for (std::uint64_t flat = 0; flat < profiles; ++flat) {
    double sum = 0.0;
    for (int g : guess) sum += g;
    const double target = p * sum / n;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      dist[i] = std::abs(guess[i] - target);
      best = std::min(best, dist[i]);
    }
    int winners = 0;
    for (int i = 0; i < n; ++i) winners += dist[i] <= best + kArgmaxTol;
    for (int i = 0; i < n; ++i) {
      if (dist[i] <= best + kArgmaxTol) payoffs[flat * n + i] = 1.0 / winners;
    }
    for (int i = n - 1; i >= 0; --i) {
      if (++guess[i] <= hi) break;
      guess[i] = lo;
    }
  }
  return Game(std::move(actions), std::move(payoffs));
}

AnyGame make_builtin(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  auto get_int = [&](const std::string& key, int fallback) {
    const double v = get(key, fallback);
    if (v != std::floor(v)) throw ParameterError("parameter '" + key + "' must be an integer");
    return static_cast<int>(v);
  };
  if (name == "prisoners_dilemma") return prisoners_dilemma();
  if (name == "matching_pennies") return matching_pennies();
  if (name == "p_beauty") return p_beauty(get_int("n", 3), get_int("lo", 0), get_int("hi", 100), get("p", 2.0 / 3.0));
  if (name == "cournot_linear") return cournot_linear(get_int("n", 2), get("theta", 10.0), get("c", 1.0));
  throw ParameterError("unknown builtin game '" + name + "'");
}

}  // namespace reflex
