#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "reflex/error.hpp"

namespace reflex {

// Absolute tolerance used by every argmax in the library.
inline constexpr double kArgmaxTol = 1e-9;
inline constexpr std::uint64_t kDefaultEnumCap = 10'000'000;

using ActionSet = std::vector<int>;

// A probability vector over one player's actions.
class MixedStrategy {
 public:
  MixedStrategy() = default;
  // Validates nonnegativity and that the mass sums to 1 within 1e-9.
  explicit MixedStrategy(std::vector<double> probs);

  static MixedStrategy uniform(std::size_t num_actions);
  static MixedStrategy pure(std::size_t num_actions, int action);
  // Uniform over `support`, the U(A) rule.
  static MixedStrategy uniform_over(std::size_t num_actions, const ActionSet& support);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t a) const { return probs_[a]; }
  const std::vector<double>& probs() const { return probs_; }

  bool is_pure() const;
  // Index of the action with the largest mass (lowest index on ties).
  int mode() const;

  friend bool operator==(const MixedStrategy&, const MixedStrategy&) = default;

 private:
  std::vector<double> probs_;
};

// Convex combination sum_k weights[k] * strategies[k]. Zero-weight entries are skipped.
MixedStrategy mix(std::span<const MixedStrategy> strategies, std::span<const double> weights);

// One strategy per player. Pure actions are stored as point masses.
using Profile = std::vector<MixedStrategy>;

// Finite n-player normal-form game with an optional finite family of
// theta-indexed payoff tensors. Payoffs are stored profile-major: the
// n-vector for profile (a_0, ..., a_{n-1}) starts at n * flat_index(a).
class Game {
 public:
  using Tensor = std::vector<double>;

  Game() = default;
  Game(std::vector<std::vector<std::string>> actions, Tensor payoffs,
       std::map<std::string, Tensor> theta_variants = {});

  int num_players() const { return static_cast<int>(actions_.size()); }
  int num_actions(int player) const { return static_cast<int>(actions_[player].size()); }
  const std::vector<std::vector<std::string>>& actions() const { return actions_; }
  const std::string& label(int player, int action) const { return actions_[player][action]; }
  std::uint64_t num_profiles() const { return num_profiles_; }

  const Tensor& payoffs() const { return payoffs_; }
  const std::map<std::string, Tensor>& theta_variants() const { return theta_variants_; }
  bool has_theta(const std::string& theta) const;
  // The game played when the state of nature is `theta`. A game without
  // variants answers every theta with its base payoffs.
  Game at_theta(const std::string& theta) const;

  std::uint64_t flat_index(std::span<const int> profile) const;
  std::vector<int> decode(std::uint64_t flat) const;
  std::uint64_t stride(int player) const { return strides_[player]; }

  double payoff(std::uint64_t flat, int player) const { return payoffs_[flat * actions_.size() + player]; }
  double payoff(std::span<const int> profile, int player) const {
    return payoff(flat_index(profile), player);
  }

  // Apply u_i -> scale * u_i + shift to one player's payoffs (all variants).
  Game transformed(int player, double scale, double shift) const;

 private:
  void validate_tensor(const Tensor& t, const std::string& what) const;

  std::vector<std::vector<std::string>> actions_;
  Tensor payoffs_;
  std::map<std::string, Tensor> theta_variants_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t num_profiles_ = 0;
};

// Checks that `profile` has one valid strategy per player. `skip` excludes
// one player from the check (used for opponent-only profiles).
void check_profile(const Game& game, const Profile& profile, int skip = -1);

// Expected utility of player i under the mixed profile.
double expected_utility(const Game& game, const Profile& profile, int player);

// u_i(a, s_{-i}) for every action a of player i. Entry `player` of `opp` is ignored.
std::vector<double> action_values(const Game& game, const Profile& opp, int player);

// Indices within kArgmaxTol of the maximum.
ActionSet argmax_set(std::span<const double> values, double tol = kArgmaxTol);

ActionSet best_response_set(const Game& game, const Profile& opp, int player);

// Logit (softmax) response with precision lambda >= 0.
MixedStrategy qbr(const Game& game, const Profile& opp, int player, double lambda);
MixedStrategy softmax(std::span<const double> values, double lambda);

struct ResponseModel {
  enum class Kind { kBest, kQbr };
  Kind kind = Kind::kBest;
  double lambda = 0.0;

  static ResponseModel best() { return {}; }
  static ResponseModel quantal(double lambda) { return {Kind::kQbr, lambda}; }
};

// The r_j map: uniform over the argmax set, or the quantal response.
MixedStrategy response(const Game& game, const Profile& opp, int player, const ResponseModel& model);

// All pure profiles where no player has a strictly improving unilateral
// deviation. Sorted lexicographically. Parallel over profiles when OpenMP is on.
std::vector<std::vector<int>> pure_nash(const Game& game, std::uint64_t cap = kDefaultEnumCap);
// Single-threaded reference implementation.
std::vector<std::vector<int>> pure_nash_serial(const Game& game, std::uint64_t cap = kDefaultEnumCap);

// Parametric game with interval action sets.
struct CournotLinear {
  double theta = 0.0;
  double cost = 0.0;
};

// User-supplied utility u(i, y, x) where y is player i's own action and x the full profile.
struct CustomFamily {
  std::function<double(int, double, std::span<const double>)> utility;
  // Golden-section search needs a unimodal utility in the own action.
  bool unimodal = true;
};

class ContinuousGame {
 public:
  using Family = std::variant<CournotLinear, CustomFamily>;

  ContinuousGame(std::vector<std::pair<double, double>> bounds, Family family);

  int num_players() const { return static_cast<int>(bounds_.size()); }
  const std::vector<std::pair<double, double>>& bounds() const { return bounds_; }
  const Family& family() const { return family_; }

  double utility(int player, std::span<const double> profile) const;
  bool in_bounds(std::span<const double> profile, double tol = 1e-12) const;

 private:
  std::vector<std::pair<double, double>> bounds_;
  Family family_;
};

ContinuousGame cournot_linear(int n, double theta, double cost);

Game prisoners_dilemma();
Game matching_pennies();
// n players guess integers in [lo, hi]; the unit prize is split among those
// closest to p times the mean guess (own guess included).
Game p_beauty(int n, int lo, int hi, double p);

using AnyGame = std::variant<Game, ContinuousGame>;

// Named constructor used by the CLI. Recognized names: prisoners_dilemma,
// matching_pennies, p_beauty (n, lo, hi, p), cournot_linear (n, theta, c).
AnyGame make_builtin(const std::string& name, const std::map<std::string, double>& params = {});

}  // namespace reflex
