#pragma once

#include <cstdint>
#include <vector>

#include "reflex/game.hpp"
#include "reflex/strategic.hpp"

namespace reflex {

// Step sizes gamma_i^t in [0, 1].
class StepSchedule {
 public:
  static StepSchedule constant(double gamma);
  // gamma_t = min(1, c / t)
  static StepSchedule harmonic(double c);

  double operator()(int agent, int t) const;

 private:
  enum class Kind { kConstant, kHarmonic };
  StepSchedule(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

// Real-valued trajectory of a continuous game, stages 0..T.
struct Trajectory {
  std::vector<std::vector<double>> actions;  // [t][agent]
  std::vector<std::vector<double>> payoffs;  // [t][agent]
  // forecasts[t][agent][other]: what `agent` predicted `other` would play at
  // stage t. Empty unless produced by reflexive_trajectory.
  std::vector<std::vector<std::vector<double>>> forecasts;
  std::vector<int> ranks;  // reflexion rank per agent, when reflexive

  int stages() const { return static_cast<int>(actions.size()); }
};

// Pure-action trajectory of a finite game.
struct FiniteTrajectory {
  std::vector<std::vector<int>> actions;     // [t][agent]
  std::vector<std::vector<double>> payoffs;  // [t][agent]
};

// Mixed-strategy trajectory of a finite game.
struct MixedTrajectory {
  std::vector<Profile> strategies;           // [t][agent]
  std::vector<std::vector<double>> payoffs;  // expected payoffs [t][agent]
};

// argmax over player i's interval of u_i(y, x_{-i}); entry i of `profile` is ignored.
double current_goal(const ContinuousGame& game, int player, std::span<const double> profile);

std::vector<double> indicator_step(const ContinuousGame& game, std::span<const double> prev,
                                   const StepSchedule& schedule, int t);

Trajectory indicator_trajectory(const ContinuousGame& game, std::vector<double> x0, const StepSchedule& schedule,
                                int steps);

// Realized dynamics where each rank-k agent forecasts everyone's stage-t move
// under its subjective partition and steps toward the best reply to the forecast.
Trajectory reflexive_trajectory(const ContinuousGame& game, const ReflexivePartition& partition,
                                std::vector<double> x0, const StepSchedule& schedule, int steps);

enum class TieBreak { kLowestIndex, kUniformRandom };

struct FictitiousPlayResult {
  FiniteTrajectory trajectory;
  std::vector<std::vector<std::int64_t>> counts;  // [agent][action] over stages 0..T
  std::vector<std::vector<double>> frequencies() const;
};

FictitiousPlayResult fictitious_play(const Game& game, std::vector<int> x0, int steps,
                                     TieBreak tie_break = TieBreak::kLowestIndex, std::uint64_t seed = 0);

// Cournot adjustment: indicator dynamics with gamma = 1.
Trajectory cournot_play(const ContinuousGame& game, std::vector<double> x0, int steps);
// Finite version: best reply (lowest index on ties) to the previous pure profile.
FiniteTrajectory cournot_play(const Game& game, std::vector<int> x0, int steps);

struct ReinforcementParams {
  double initial_propensity = 1.0;
  std::uint64_t seed = 0;
};

struct ReinforcementResult {
  FiniteTrajectory trajectory;
  // Added to each player's payoffs so the smallest payoff becomes 0.
  std::vector<double> shifts;
  std::vector<std::vector<double>> propensities;  // final, [agent][action]
};

// Cumulative-propensity reinforcement learning.
ReinforcementResult reinforcement_play(const Game& game, int steps, const ReinforcementParams& params);

// Indicator dynamics in the simplex: step toward the uniform best-reply vertex.
MixedTrajectory finite_indicator_play(const Game& game, Profile s0, const StepSchedule& schedule, int steps);

}  // namespace reflex
