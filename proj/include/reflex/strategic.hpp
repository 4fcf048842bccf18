#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reflex/game.hpp"

namespace reflex {

inline constexpr int kDefaultMaxRankCap = 20;

enum class Rank0Model { kUniform, kMaximin, kMaximax, kMinimaxRegret };

Rank0Model parse_rank0(const std::string& name);
std::string to_string(Rank0Model model);

// Behavior of a rank-0 agent. The three non-uniform models play uniformly
// over the set selected by their criterion.
MixedStrategy rank0_strategy(const Game& game, int player, Rank0Model model);

// The regret table regret[a][opp] = max_a' u(a', opp) - u(a, opp), indexed by
// the flat index of the opponent pure profile (player's own action fixed at 0).
std::vector<std::vector<double>> regret_table(const Game& game, int player);

struct RankSpec {
  enum class Kind { kExplicit, kPoisson, kSpikePoisson };
  Kind kind = Kind::kPoisson;
  double tau = 1.0;
  double epsilon = 0.0;
  std::vector<double> weights;  // kExplicit only

  static RankSpec poisson(double tau) { return {Kind::kPoisson, tau, 0.0, {}}; }
  static RankSpec spike_poisson(double tau, double epsilon) { return {Kind::kSpikePoisson, tau, epsilon, {}}; }
  static RankSpec explicit_weights(std::vector<double> w) { return {Kind::kExplicit, 0.0, 0.0, std::move(w)}; }
};

// Weights f^0..f^m over reflexion ranks.
struct RankDistribution {
  std::vector<double> weights;
  RankSpec spec;

  int max_rank() const { return static_cast<int>(weights.size()) - 1; }
};

RankDistribution level_distribution(const RankSpec& spec, int max_rank);

// Beliefs of a rank-k agent about ranks 0..k-1: the (f^p)^alpha tilted,
// truncated distribution. alpha = 1 is the plain cognitive-hierarchy truncation.
std::vector<double> subjective_belief(const RankDistribution& dist, int k, double alpha = 1.0);

struct BeliefModel {
  enum class Kind { kLevelK, kCognitiveHierarchy };
  Kind kind = Kind::kLevelK;
  RankDistribution dist;  // kCognitiveHierarchy only
  double alpha = 1.0;

  static BeliefModel level_k() { return {}; }
  static BeliefModel ch(RankDistribution dist, double alpha = 1.0) {
    return {Kind::kCognitiveHierarchy, std::move(dist), alpha};
  }
};

struct HierarchySolution {
  // strategies[player][k] for k = 0..m.
  std::vector<std::vector<MixedStrategy>> strategies;
  BeliefModel belief;
  Rank0Model rank0 = Rank0Model::kUniform;
  ResponseModel response;

  int max_rank() const { return strategies.empty() ? -1 : static_cast<int>(strategies[0].size()) - 1; }
};

HierarchySolution hierarchy_strategies(const Game& game, int max_rank, const BeliefModel& belief,
                                       Rank0Model rank0, const ResponseModel& response,
                                       int max_rank_cap = kDefaultMaxRankCap);

// The opponent profile a rank-k agent responds to, given the lower-rank
// strategies ranks[j][0..k-1]. Exposed so the rank-independence property can be tested.
Profile rank_k_beliefs(const Game& game, const std::vector<std::vector<MixedStrategy>>& ranks,
                       int k, int player, const BeliefModel& belief);

// Population mixture sum_k f^k s_j^k for every player.
std::vector<MixedStrategy> population_mixture(const HierarchySolution& solution, const RankDistribution& dist);

// Partition of agents (0-based) into ranks 0..m.
class ReflexivePartition {
 public:
  ReflexivePartition() = default;
  ReflexivePartition(std::vector<std::vector<int>> classes, int num_agents);

  // All agents at rank 0.
  static ReflexivePartition all_rank0(int num_agents);
  static ReflexivePartition from_ranks(std::vector<int> ranks);

  int max_rank() const { return static_cast<int>(classes_.size()) - 1; }
  int num_agents() const { return static_cast<int>(rank_of_.size()); }
  int rank_of(int agent) const { return rank_of_[agent]; }
  const std::vector<int>& ranks() const { return rank_of_; }
  const std::vector<std::vector<int>>& classes() const { return classes_; }

  friend bool operator==(const ReflexivePartition& a, const ReflexivePartition& b) { return a.rank_of_ == b.rank_of_; }

 private:
  std::vector<std::vector<int>> classes_;
  std::vector<int> rank_of_;
};

enum class AwarenessStyle {
  kLevelK,  // everyone else sits at rank k-1
  kRpm,     // lower ranks known exactly, peers and above demoted to k-1
};

// Partition believed by `agent` given the believed partition `base`.
// Returns per-agent ranks; the agent keeps its own rank.
std::vector<int> subjective_partition(const std::vector<int>& base, int agent, AwarenessStyle style);

// Every agent plays its rank's response under its subjective partition.
std::vector<MixedStrategy> reflexive_partition_equilibrium(const Game& game, const ReflexivePartition& partition,
                                                          AwarenessStyle style, Rank0Model rank0,
                                                          const ResponseModel& response);

// (m+1)x(m+1) game whose strategies are the ranks of a 2-player base game.
Game rank_game(const Game& game, int max_rank, const BeliefModel& belief, Rank0Model rank0,
               const ResponseModel& response);

inline constexpr double kProbabilityFloor = 1e-10;

// sum over players and actions of counts * log(max(prob, floor)).
double log_likelihood(const std::vector<MixedStrategy>& model, const std::vector<std::vector<std::int64_t>>& counts);

struct FitFamily {
  BeliefModel::Kind belief = BeliefModel::Kind::kCognitiveHierarchy;
  ResponseModel::Kind response = ResponseModel::Kind::kQbr;
  bool spike = false;
  int max_rank = 3;
  Rank0Model rank0 = Rank0Model::kUniform;
};

// A single unused dimension should be left as a one-point grid.
struct FitGrids {
  std::vector<double> tau{1.0};
  std::vector<double> lambda{1.0};
  std::vector<double> alpha{1.0};
  std::vector<double> epsilon{0.0};
};

struct FitParams {
  double tau = 1.0;
  double lambda = 1.0;
  double alpha = 1.0;
  double epsilon = 0.0;

  friend auto operator<=>(const FitParams&, const FitParams&) = default;
};

struct FitResult {
  FitParams params;
  double log_likelihood = 0.0;
  std::uint64_t evaluated = 0;
};

// Population mixture predicted by the family at one parameter point.
std::vector<MixedStrategy> predict(const Game& game, const FitFamily& family, const FitParams& params);

// Exhaustive grid search. Ties go to the lexicographically smallest (tau, lambda, alpha, epsilon).
FitResult fit_grid(const Game& game, const std::vector<std::vector<std::int64_t>>& counts, const FitFamily& family,
                   const FitGrids& grids);
FitResult fit_grid_serial(const Game& game, const std::vector<std::vector<std::int64_t>>& counts,
                          const FitFamily& family, const FitGrids& grids);

}  // namespace reflex
