#include "reflex/strategic.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

namespace reflex {

Rank0Model parse_rank0(const std::string& name) {
  if (name == "uniform") return Rank0Model::kUniform;
  if (name == "maximin") return Rank0Model::kMaximin;
  if (name == "maximax") return Rank0Model::kMaximax;
  if (name == "minimax-regret" || name == "minimax_regret") return Rank0Model::kMinimaxRegret;
  throw ParameterError("unknown rank-0 model '" + name + "'");
}

std::string to_string(Rank0Model model) {
  switch (model) {
    case Rank0Model::kUniform: return "uniform";
    case Rank0Model::kMaximin: return "maximin";
    case Rank0Model::kMaximax: return "maximax";
    case Rank0Model::kMinimaxRegret: return "minimax-regret";
  }
  return "uniform";
}

namespace {

// Flat indices of every profile where `player` plays action 0.
std::vector<std::uint64_t> opponent_bases(const Game& game, int player) {
  std::vector<std::uint64_t> bases;
  const std::uint64_t stride = game.stride(player);
  const auto k = static_cast<std::uint64_t>(game.num_actions(player));
  for (std::uint64_t flat = 0; flat < game.num_profiles(); ++flat) {
    if ((flat / stride) % k == 0) bases.push_back(flat);
  }
  return bases;
}

}  // namespace

std::vector<std::vector<double>> regret_table(const Game& game, int player) {
  const auto bases = opponent_bases(game, player);
  const int k = game.num_actions(player);
  const std::uint64_t stride = game.stride(player);
  std::vector<std::vector<double>> regret(k, std::vector<double>(bases.size()));
  for (std::size_t o = 0; o < bases.size(); ++o) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < k; ++a) best = std::max(best, game.payoff(bases[o] + a * stride, player));
    for (int a = 0; a < k; ++a) regret[a][o] = best - game.payoff(bases[o] + a * stride, player);
  }
  return regret;
}

MixedStrategy rank0_strategy(const Game& game, int player, Rank0Model model) {
  if (player < 0 || player >= game.num_players()) throw InvalidProfile("player index out of range");
  const int k = game.num_actions(player);
  if (model == Rank0Model::kUniform) return MixedStrategy::uniform(k);

  std::vector<double> score(k);
  if (model == Rank0Model::kMinimaxRegret) {
    const auto regret = regret_table(game, player);
    // argmin of worst regret == argmax of its negation
    for (int a = 0; a < k; ++a) score[a] = -*std::max_element(regret[a].begin(), regret[a].end());
  } else {
    const bool pessimistic = model == Rank0Model::kMaximin;
    const auto bases = opponent_bases(game, player);
    for (int a = 0; a < k; ++a) {
      double v = pessimistic ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      for (auto base : bases) {
        const double u = game.payoff(base + a * game.stride(player), player);
        v = pessimistic ? std::min(v, u) : std::max(v, u);
      }
      score[a] = v;
    }
  }
  return MixedStrategy::uniform_over(k, argmax_set(score));
}

// ---------------------------------------------------------------------------
// Rank distributions

RankDistribution level_distribution(const RankSpec& spec, int max_rank) {
  if (max_rank < 0) throw ParameterError("max rank must be >= 0");
  RankDistribution dist{{}, spec};
  if (spec.kind == RankSpec::Kind::kExplicit) {
    if (static_cast<int>(spec.weights.size()) != max_rank + 1) {
      throw ParameterError("explicit rank weights must have max_rank + 1 entries");
    }
    double total = 0.0;
    for (double w : spec.weights) {
      if (!std::isfinite(w) || w < 0.0) throw ParameterError("rank weights must be nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ParameterError("rank weights must sum to 1");
    dist.weights = spec.weights;
    return dist;
  }
  if (!std::isfinite(spec.tau) || spec.tau <= 0.0) throw ParameterError("tau must be finite and > 0");
  if (spec.kind == RankSpec::Kind::kSpikePoisson && !(spec.epsilon >= 0.0 && spec.epsilon <= 1.0)) {
    throw ParameterError("epsilon must lie in [0, 1]");
  }
  // Poisson pmf in log space, truncated to 0..m and renormalized.
  std::vector<double> logw(max_rank + 1);
  for (int k = 0; k <= max_rank; ++k) logw[k] = k * std::log(spec.tau) - std::lgamma(k + 1.0);
  const double top = *std::max_element(logw.begin(), logw.end());
  dist.weights.resize(max_rank + 1);
  double total = 0.0;
  for (int k = 0; k <= max_rank; ++k) total += dist.weights[k] = std::exp(logw[k] - top);
  for (double& w : dist.weights) w /= total;
  if (spec.kind == RankSpec::Kind::kSpikePoisson && spec.epsilon > 0.0) {
    for (double& w : dist.weights) w *= 1.0 - spec.epsilon;
    dist.weights[0] += spec.epsilon;
  }
  return dist;
}

std::vector<double> subjective_belief(const RankDistribution& dist, int k, double alpha) {
  if (k < 1) throw DomainError("rank-0 agents hold no beliefs about opponent ranks");
  if (!std::isfinite(alpha) || alpha < 1.0) throw ParameterError("alpha must be finite and >= 1");
  std::vector<double> out(k, 0.0);
  double total = 0.0;
  for (int p = 0; p < k && p <= dist.max_rank(); ++p) {
    const double f = dist.weights[p];
    out[p] = alpha == 1.0 ? f : std::pow(f, alpha);
    total += out[p];
  }
  if (!(total > 0.0)) throw DomainError("rank distribution has no mass below rank " + std::to_string(k));
  for (double& w : out) w /= total;
  return out;
}

// ---------------------------------------------------------------------------
// Hierarchies

Profile rank_k_beliefs(const Game& game, const std::vector<std::vector<MixedStrategy>>& ranks, int k, int player,
                       const BeliefModel& belief) {
  const int n = game.num_players();
  Profile opp(n);
  std::vector<double> weights;
  if (belief.kind == BeliefModel::Kind::kCognitiveHierarchy) weights = subjective_belief(belief.dist, k, belief.alpha);
  for (int j = 0; j < n; ++j) {
    if (j == player) {
      opp[j] = ranks[j][0];
    } else if (belief.kind == BeliefModel::Kind::kLevelK) {
      opp[j] = ranks[j][k - 1];
    } else {
      opp[j] = mix(std::span(ranks[j].data(), k), weights);
    }
  }
  return opp;
}

HierarchySolution hierarchy_strategies(const Game& game, int max_rank, const BeliefModel& belief, Rank0Model rank0,
                                       const ResponseModel& response, int max_rank_cap) {
  if (max_rank < 0) throw ParameterError("max rank must be >= 0");
  if (max_rank > max_rank_cap) {
    throw ParameterError("max rank " + std::to_string(max_rank) + " exceeds the cap " + std::to_string(max_rank_cap));
  }
  const int n = game.num_players();
  HierarchySolution sol{std::vector<std::vector<MixedStrategy>>(n), belief, rank0, response};
  for (int j = 0; j < n; ++j) sol.strategies[j].push_back(rank0_strategy(game, j, rank0));
  for (int k = 1; k <= max_rank; ++k) {
    std::vector<MixedStrategy> level(n);
    for (int j = 0; j < n; ++j) {
      level[j] = reflex::response(game, rank_k_beliefs(game, sol.strategies, k, j, belief), j, response);
    }
    for (int j = 0; j < n; ++j) sol.strategies[j].push_back(std::move(level[j]));
  }
  return sol;
}

std::vector<MixedStrategy> population_mixture(const HierarchySolution& solution, const RankDistribution& dist) {
  if (dist.max_rank() > solution.max_rank()) {
    throw ParameterError("rank distribution extends beyond the solved ranks");
  }
  std::vector<MixedStrategy> out;
  for (const auto& per_rank : solution.strategies) {
    out.push_back(mix(std::span(per_rank.data(), dist.weights.size()), dist.weights));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reflexive partitions

ReflexivePartition::ReflexivePartition(std::vector<std::vector<int>> classes, int num_agents)
    : classes_(std::move(classes)), rank_of_(num_agents, -1) {
  if (classes_.empty()) throw DomainError("reflexive partition needs at least one rank class");
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    for (int agent : classes_[k]) {
      if (agent < 0 || agent >= num_agents) {
        throw DomainError("partition names agent " + std::to_string(agent + 1) + " outside 1.." +
                          std::to_string(num_agents));
      }
      if (rank_of_[agent] != -1) throw DomainError("agent " + std::to_string(agent + 1) + " appears in two rank classes");
      rank_of_[agent] = static_cast<int>(k);
    }
  }
  for (int agent = 0; agent < num_agents; ++agent) {
    if (rank_of_[agent] == -1) throw DomainError("agent " + std::to_string(agent + 1) + " is missing from the partition");
  }
}

ReflexivePartition ReflexivePartition::all_rank0(int num_agents) {
  std::vector<int> all(num_agents);
  std::iota(all.begin(), all.end(), 0);
  return ReflexivePartition({all}, num_agents);
}

ReflexivePartition ReflexivePartition::from_ranks(std::vector<int> ranks) {
  int m = 0;
  for (int r : ranks) {
    if (r < 0) throw DomainError("negative rank");
    m = std::max(m, r);
  }
  std::vector<std::vector<int>> classes(m + 1);
  for (std::size_t j = 0; j < ranks.size(); ++j) classes[ranks[j]].push_back(static_cast<int>(j));
  return ReflexivePartition(std::move(classes), static_cast<int>(ranks.size()));
}

std::vector<int> subjective_partition(const std::vector<int>& base, int agent, AwarenessStyle style) {
  const int k = base[agent];
  std::vector<int> out = base;
  if (k == 0) return out;
  for (std::size_t l = 0; l < base.size(); ++l) {
    if (static_cast<int>(l) == agent) continue;
    if (style == AwarenessStyle::kLevelK || base[l] >= k - 1) out[l] = k - 1;
  }
  return out;
}

std::vector<MixedStrategy> reflexive_partition_equilibrium(const Game& game, const ReflexivePartition& partition,
                                                          AwarenessStyle style, Rank0Model rank0,
                                                          const ResponseModel& model) {
  const int n = game.num_players();
  if (partition.num_agents() != n) throw DomainError("partition does not cover the game's players");

  std::map<std::pair<int, std::vector<int>>, MixedStrategy> memo;
  std::function<MixedStrategy(int, const std::vector<int>&)> play = [&](int agent, const std::vector<int>& ranks) {
    if (ranks[agent] == 0) return rank0_strategy(game, agent, rank0);
    auto key = std::make_pair(agent, ranks);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const auto believed = subjective_partition(ranks, agent, style);
    Profile opp(n);
    for (int l = 0; l < n; ++l) {
      opp[l] = l == agent ? MixedStrategy::uniform(game.num_actions(l)) : play(l, believed);
    }
    auto s = response(game, opp, agent, model);
    memo.emplace(std::move(key), s);
    return s;
  };

  std::vector<MixedStrategy> out;
  for (int j = 0; j < n; ++j) out.push_back(play(j, partition.ranks()));
  return out;
}

Game rank_game(const Game& game, int max_rank, const BeliefModel& belief, Rank0Model rank0,
               const ResponseModel& model) {
  if (game.num_players() != 2) throw DomainError("the game of ranks needs a 2-player base game");
  const auto sol = hierarchy_strategies(game, max_rank, belief, rank0, model);
  std::vector<std::string> labels;
  for (int r = 0; r <= max_rank; ++r) labels.push_back("rank" + std::to_string(r));
  Game::Tensor payoffs;
  for (int r1 = 0; r1 <= max_rank; ++r1) {
    for (int r2 = 0; r2 <= max_rank; ++r2) {
      const Profile profile{sol.strategies[0][r1], sol.strategies[1][r2]};
      payoffs.push_back(expected_utility(game, profile, 0));
      payoffs.push_back(expected_utility(game, profile, 1));
    }
  }
  return Game({labels, labels}, std::move(payoffs));
}

// ---------------------------------------------------------------------------
// Likelihood fitting

double log_likelihood(const std::vector<MixedStrategy>& model, const std::vector<std::vector<std::int64_t>>& counts) {
  if (model.size() != counts.size()) throw InvalidProfile("model covers a different number of players than the data");
  double total = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (model[i].size() != counts[i].size()) {
      throw InvalidProfile("player " + std::to_string(i + 1) + " has " + std::to_string(counts[i].size()) +
                           " count entries, model has " + std::to_string(model[i].size()) + " actions");
    }
    for (std::size_t a = 0; a < counts[i].size(); ++a) {
      if (counts[i][a] < 0) throw ParameterError("action counts must be nonnegative");
      if (counts[i][a] == 0) continue;
      total += static_cast<double>(counts[i][a]) * std::log(std::max(model[i][a], kProbabilityFloor));
    }
  }
  return total;
}

std::vector<MixedStrategy> predict(const Game& game, const FitFamily& family, const FitParams& params) {
  const RankSpec spec = family.spike ? RankSpec::spike_poisson(params.tau, params.epsilon) : RankSpec::poisson(params.tau);
  auto dist = level_distribution(spec, family.max_rank);
  const BeliefModel belief = family.belief == BeliefModel::Kind::kLevelK ? BeliefModel::level_k()
                                                                         : BeliefModel::ch(dist, params.alpha);
  const ResponseModel model = family.response == ResponseModel::Kind::kBest ? ResponseModel::best()
                                                                           : ResponseModel::quantal(params.lambda);
  const auto sol = hierarchy_strategies(game, family.max_rank, belief, family.rank0, model);
  return population_mixture(sol, dist);
}

namespace {

void check_fit_inputs(const std::vector<std::vector<std::int64_t>>& counts, const FitGrids& grids) {
  std::int64_t total = 0;
  for (const auto& row : counts) {
    for (auto c : row) {
      if (c < 0) throw ParameterError("action counts must be nonnegative");
      total += c;
    }
  }
  if (total == 0) throw ParameterError("fit data contains no observations");
  if (grids.tau.empty() || grids.lambda.empty() || grids.alpha.empty() || grids.epsilon.empty()) {
    throw ParameterError("every parameter grid needs at least one point");
  }
  for (double t : grids.tau) {
    if (!std::isfinite(t) || t <= 0.0) throw ParameterError("tau grid values must be > 0");
  }
  for (double l : grids.lambda) {
    if (!std::isfinite(l) || l < 0.0) throw ParameterError("lambda grid values must be >= 0");
  }
  for (double a : grids.alpha) {
    if (!std::isfinite(a) || a < 1.0) throw ParameterError("alpha grid values must be >= 1");
  }
  for (double e : grids.epsilon) {
    if (!(e >= 0.0 && e <= 1.0)) throw ParameterError("epsilon grid values must lie in [0, 1]");
  }
}

FitParams grid_point(const FitGrids& grids, std::uint64_t idx) {
  FitParams p;
  p.epsilon = grids.epsilon[idx % grids.epsilon.size()];
  idx /= grids.epsilon.size();
  p.alpha = grids.alpha[idx % grids.alpha.size()];
  idx /= grids.alpha.size();
  p.lambda = grids.lambda[idx % grids.lambda.size()];
  idx /= grids.lambda.size();
  p.tau = grids.tau[idx];
  return p;
}

std::uint64_t grid_size(const FitGrids& grids) {
  return static_cast<std::uint64_t>(grids.tau.size()) * grids.lambda.size() * grids.alpha.size() *
         grids.epsilon.size();
}

// Deterministic reduction shared by the serial and parallel paths.
FitResult reduce(const FitGrids& grids, const std::vector<double>& ll) {
  FitResult best{grid_point(grids, 0), ll[0], ll.size()};
  for (std::uint64_t idx = 1; idx < ll.size(); ++idx) {
    const FitParams p = grid_point(grids, idx);
    if (ll[idx] > best.log_likelihood || (ll[idx] == best.log_likelihood && p < best.params)) {
      best.params = p;
      best.log_likelihood = ll[idx];
    }
  }
  return best;
}

}  // namespace

FitResult fit_grid_serial(const Game& game, const std::vector<std::vector<std::int64_t>>& counts,
                          const FitFamily& family, const FitGrids& grids) {
  check_fit_inputs(counts, grids);
  std::vector<double> ll(grid_size(grids));
  for (std::uint64_t idx = 0; idx < ll.size(); ++idx) {
    ll[idx] = log_likelihood(predict(game, family, grid_point(grids, idx)), counts);
  }
  return reduce(grids, ll);
}

FitResult fit_grid(const Game& game, const std::vector<std::vector<std::int64_t>>& counts, const FitFamily& family,
                   const FitGrids& grids) {
  check_fit_inputs(counts, grids);
  const auto total = static_cast<std::int64_t>(grid_size(grids));
  std::vector<double> ll(total);
  std::exception_ptr failure;
#ifdef REFLEX_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t idx = 0; idx < total; ++idx) {
    try {
      ll[idx] = log_likelihood(predict(game, family, grid_point(grids, idx)), counts);
    } catch (...) {
#ifdef REFLEX_HAVE_OPENMP
#pragma omp critical(reflex_fit_failure)
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return reduce(grids, ll);
}

}  // namespace reflex
