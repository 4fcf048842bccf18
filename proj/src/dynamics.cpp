#include "reflex/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace reflex {

StepSchedule StepSchedule::constant(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in [0, 1]");
  return {Kind::kConstant, gamma};
}

StepSchedule StepSchedule::harmonic(double c) {
  if (!std::isfinite(c) || c < 0.0) throw ParameterError("harmonic schedule needs c >= 0");
  return {Kind::kHarmonic, c};
}

double StepSchedule::operator()(int /*agent*/, int t) const {
  if (kind_ == Kind::kConstant) return value_;
  return t <= 0 ? 1.0 : std::min(1.0, value_ / t);
}

// ---------------------------------------------------------------------------
// Continuous indicator dynamics

namespace {

constexpr double kGoldenTol = 1e-10;

double golden_section(const std::function<double(double)>& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > kGoldenTol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // Maxima on the boundary are found by comparing against the endpoints.
  double best = (a + b) / 2.0;
  double fbest = f(best);
  for (double x : {lo, hi}) {
    if (const double fx = f(x); fx > fbest) {
      best = x;
      fbest = fx;
    }
  }
  return best;
}

void require_in_bounds(const ContinuousGame& game, std::span<const double> x) {
  if (!game.in_bounds(x)) throw InvalidProfile("action profile lies outside the players' action bounds");
}

std::vector<double> stage_payoffs(const ContinuousGame& game, std::span<const double> x) {
  std::vector<double> out(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) out[i] = game.utility(i, x);
  return out;
}

}  // namespace

double current_goal(const ContinuousGame& game, int player, std::span<const double> profile) {
  if (player < 0 || player >= game.num_players()) throw InvalidProfile("player index out of range");
  if (static_cast<int>(profile.size()) != game.num_players()) throw InvalidProfile("profile length mismatch");
  const auto [lo, hi] = game.bounds()[player];
  if (const auto* c = std::get_if<CournotLinear>(&game.family())) {
    double others = 0.0;
    for (int j = 0; j < game.num_players(); ++j) {
      if (j != player) others += profile[j];
    }
    return std::clamp((c->theta - c->cost - others) / 2.0, lo, hi);
  }
  const auto& custom = std::get<CustomFamily>(game.family());
  if (!custom.unimodal) throw ParameterError("unsupported family: current goal needs a unimodal utility");
  std::vector<double> x(profile.begin(), profile.end());
  return golden_section(
      [&](double y) {
        x[player] = y;
        return custom.utility(player, y, x);
      },
      lo, hi);
}

std::vector<double> indicator_step(const ContinuousGame& game, std::span<const double> prev,
                                   const StepSchedule& schedule, int t) {
  require_in_bounds(game, prev);
  std::vector<double> next(prev.begin(), prev.end());
  for (int i = 0; i < game.num_players(); ++i) {
    const double goal = current_goal(game, i, prev);
    next[i] = prev[i] + schedule(i, t) * (goal - prev[i]);
  }
  return next;
}

Trajectory indicator_trajectory(const ContinuousGame& game, std::vector<double> x0, const StepSchedule& schedule,
                                int steps) {
  if (steps < 0) throw ParameterError("number of steps must be >= 0");
  require_in_bounds(game, x0);
  Trajectory traj;
  traj.payoffs.push_back(stage_payoffs(game, x0));
  traj.actions.push_back(std::move(x0));
  for (int t = 1; t <= steps; ++t) {
    auto next = indicator_step(game, traj.actions.back(), schedule, t);
    traj.payoffs.push_back(stage_payoffs(game, next));
    traj.actions.push_back(std::move(next));
  }
  return traj;
}

Trajectory reflexive_trajectory(const ContinuousGame& game, const ReflexivePartition& partition,
                                std::vector<double> x0, const StepSchedule& schedule, int steps) {
  const int n = game.num_players();
  if (partition.num_agents() != n) throw DomainError("partition does not cover the game's agents");
  if (steps < 0) throw ParameterError("number of steps must be >= 0");
  require_in_bounds(game, x0);

  Trajectory traj;
  traj.ranks = partition.ranks();
  traj.payoffs.push_back(stage_payoffs(game, x0));
  traj.forecasts.push_back(std::vector<std::vector<double>>(n, x0));
  traj.actions.push_back(std::move(x0));

  for (int t = 1; t <= steps; ++t) {
    const std::vector<double> prev = traj.actions.back();
    // Stage-t move of `agent` when the believed partition is `ranks`.
    std::map<std::pair<int, std::vector<int>>, double> memo;
    std::function<double(int, const std::vector<int>&)> move = [&](int agent, const std::vector<int>& ranks) {
      auto key = std::make_pair(agent, ranks);
      if (auto it = memo.find(key); it != memo.end()) return it->second;
      std::vector<double> view = prev;
      if (ranks[agent] > 0) {
        const auto believed = subjective_partition(ranks, agent, AwarenessStyle::kRpm);
        for (int l = 0; l < n; ++l) {
          if (l != agent) view[l] = move(l, believed);
        }
      }
      const double x = prev[agent] + schedule(agent, t) * (current_goal(game, agent, view) - prev[agent]);
      memo.emplace(std::move(key), x);
      return x;
    };

    std::vector<double> next(n);
    for (int j = 0; j < n; ++j) next[j] = move(j, partition.ranks());
    std::vector<std::vector<double>> forecast(n, prev);
    for (int j = 0; j < n; ++j) {
      if (partition.rank_of(j) > 0) {
        const auto believed = subjective_partition(partition.ranks(), j, AwarenessStyle::kRpm);
        for (int l = 0; l < n; ++l) {
          if (l != j) forecast[j][l] = move(l, believed);
        }
      }
      forecast[j][j] = next[j];
    }
    traj.payoffs.push_back(stage_payoffs(game, next));
    traj.forecasts.push_back(std::move(forecast));
    traj.actions.push_back(std::move(next));
  }
  return traj;
}

Trajectory cournot_play(const ContinuousGame& game, std::vector<double> x0, int steps) {
  return indicator_trajectory(game, std::move(x0), StepSchedule::constant(1.0), steps);
}

// ---------------------------------------------------------------------------
// Finite-game dynamics

namespace {

std::vector<double> pure_payoffs(const Game& game, const std::vector<int>& profile) {
  const auto flat = game.flat_index(profile);
  std::vector<double> out(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) out[i] = game.payoff(flat, i);
  return out;
}

Profile point_masses(const Game& game, const std::vector<int>& profile) {
  Profile out;
  for (int i = 0; i < game.num_players(); ++i) out.push_back(MixedStrategy::pure(game.num_actions(i), profile[i]));
  return out;
}

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<std::vector<double>> FictitiousPlayResult::frequencies() const {
  std::vector<std::vector<double>> out;
  for (const auto& row : counts) {
    const double total = static_cast<double>(std::accumulate(row.begin(), row.end(), std::int64_t{0}));
    std::vector<double> f;
    for (auto c : row) f.push_back(static_cast<double>(c) / total);
    out.push_back(std::move(f));
  }
  return out;
}

FictitiousPlayResult fictitious_play(const Game& game, std::vector<int> x0, int steps, TieBreak tie_break,
                                     std::uint64_t seed) {
  if (steps < 0) throw ParameterError("number of steps must be >= 0");
  const int n = game.num_players();
  game.flat_index(x0);  // validates x0
  std::mt19937_64 rng(seed);
  FictitiousPlayResult res;
  res.counts.resize(n);
  for (int i = 0; i < n; ++i) {
    res.counts[i].assign(game.num_actions(i), 0);
    ++res.counts[i][x0[i]];
  }
  res.trajectory.payoffs.push_back(pure_payoffs(game, x0));
  res.trajectory.actions.push_back(std::move(x0));

  for (int t = 1; t <= steps; ++t) {
    // Independent empirical marginal for every opponent.
    Profile empirical(n);
    for (int j = 0; j < n; ++j) {
      std::vector<double> f(game.num_actions(j));
      for (int a = 0; a < game.num_actions(j); ++a) f[a] = static_cast<double>(res.counts[j][a]) / t;
      empirical[j] = MixedStrategy(std::move(f));
    }
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) {
      const auto set = best_response_set(game, empirical, i);
      if (tie_break == TieBreak::kLowestIndex || set.size() == 1) {
        next[i] = set.front();
      } else {
        next[i] = set[static_cast<std::size_t>(unit(rng) * set.size())];
      }
    }
    for (int i = 0; i < n; ++i) ++res.counts[i][next[i]];
    res.trajectory.payoffs.push_back(pure_payoffs(game, next));
    res.trajectory.actions.push_back(std::move(next));
  }
  return res;
}

FiniteTrajectory cournot_play(const Game& game, std::vector<int> x0, int steps) {
  if (steps < 0) throw ParameterError("number of steps must be >= 0");
  game.flat_index(x0);
  FiniteTrajectory traj;
  traj.payoffs.push_back(pure_payoffs(game, x0));
  traj.actions.push_back(std::move(x0));
  for (int t = 1; t <= steps; ++t) {
    const Profile prev = point_masses(game, traj.actions.back());
    std::vector<int> next(game.num_players());
    for (int i = 0; i < game.num_players(); ++i) next[i] = best_response_set(game, prev, i).front();
    traj.payoffs.push_back(pure_payoffs(game, next));
    traj.actions.push_back(std::move(next));
  }
  return traj;
}

ReinforcementResult reinforcement_play(const Game& game, int steps, const ReinforcementParams& params) {
  if (!std::isfinite(params.initial_propensity) || params.initial_propensity <= 0.0) {
    throw ParameterError("initial propensity must be finite and > 0");
  }
  if (steps < 0) throw ParameterError("number of steps must be >= 0");
  const int n = game.num_players();
  ReinforcementResult res;
  res.shifts.assign(n, std::numeric_limits<double>::infinity());
  for (std::uint64_t flat = 0; flat < game.num_profiles(); ++flat) {
    for (int i = 0; i < n; ++i) res.shifts[i] = std::min(res.shifts[i], game.payoff(flat, i));
  }
  for (double& s : res.shifts) s = -s;
  res.propensities.resize(n);
  for (int i = 0; i < n; ++i) res.propensities[i].assign(game.num_actions(i), params.initial_propensity);

  std::mt19937_64 rng(params.seed);
  for (int t = 0; t <= steps; ++t) {
    std::vector<int> profile(n);
    for (int i = 0; i < n; ++i) {
      const auto& q = res.propensities[i];
      const double total = std::accumulate(q.begin(), q.end(), 0.0);
      const double r = unit(rng) * total;
      double acc = 0.0;
      int pick = static_cast<int>(q.size()) - 1;
      for (int a = 0; a < static_cast<int>(q.size()); ++a) {
        acc += q[a];
        if (r < acc) {
          pick = a;
          break;
        }
      }
      profile[i] = pick;
    }
    auto payoffs = pure_payoffs(game, profile);
    for (int i = 0; i < n; ++i) res.propensities[i][profile[i]] += payoffs[i] + res.shifts[i];
    res.trajectory.payoffs.push_back(std::move(payoffs));
    res.trajectory.actions.push_back(std::move(profile));
  }
  return res;
}

MixedTrajectory finite_indicator_play(const Game& game, Profile s0, const StepSchedule& schedule, int steps) {
  if (steps < 0) throw ParameterError("number of steps must be >= 0");
  check_profile(game, s0);
  const int n = game.num_players();
  auto expected = [&](const Profile& s) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = expected_utility(game, s, i);
    return out;
  };
  MixedTrajectory traj;
  traj.payoffs.push_back(expected(s0));
  traj.strategies.push_back(std::move(s0));
  for (int t = 1; t <= steps; ++t) {
    const Profile& prev = traj.strategies.back();
    Profile next(n);
    for (int i = 0; i < n; ++i) {
      const auto target = response(game, prev, i, ResponseModel::best());
      const double g = schedule(i, t);
      std::vector<double> p(prev[i].size());
      // Convex form of x + g (w - x); stays inside the simplex.
      for (std::size_t a = 0; a < p.size(); ++a) p[a] = (1.0 - g) * prev[i][a] + g * target[a];
      next[i] = MixedStrategy(std::move(p));
    }
    traj.payoffs.push_back(expected(next));
    traj.strategies.push_back(std::move(next));
  }
  return traj;
}

}  // namespace reflex
