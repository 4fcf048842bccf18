#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "reflex/error.hpp"

namespace reflex {

// Sum-product puzzle: one knower is told a + b, the other a * b, and both
// answer "I do not know" until one of them can name the pair.

using Pair = std::pair<int, int>;

enum class Announcement {
  kSimultaneous,  // both answers are computed from the same candidate set
  kSequential,    // the product-knower hears the sum-knower's answer first
};

struct PuzzleState {
  int max_value = 1;
  std::vector<Pair> candidates;  // sorted, 1 <= a <= b <= max_value
  int round = 0;

  static PuzzleState initial(int max_value);
};

struct RoundRecord {
  int round = 0;  // 1-based
  std::vector<Pair> candidates;
  // Parallel to `candidates`.
  std::vector<bool> sum_knows;
  std::vector<bool> product_knows;
  std::vector<Pair> survivors;
};

struct RoundResult {
  PuzzleState next;
  RoundRecord record;
};

RoundResult knowledge_round(const PuzzleState& state, Announcement mode = Announcement::kSimultaneous);

enum class Resolver { kSum, kProduct, kBoth, kNever };

struct PairOutcome {
  Pair pair;
  int dont_know_rounds = 0;              // mutual "I do not know" rounds
  std::optional<int> resolved_round;     // first round where somebody knows
  Resolver resolver = Resolver::kNever;
};

struct Transcript {
  int max_value = 1;
  Announcement mode = Announcement::kSimultaneous;
  std::vector<RoundRecord> rounds;
  std::vector<PairOutcome> outcomes;  // one per initial candidate
  bool fixed_point = false;           // stopped with survivors that never resolve

  // Pairs after exactly `dont_know` mutual rounds that the sum-knower names next round.
  std::vector<PairOutcome> sum_named_after(int dont_know) const;
};

Transcript run_sum_product(int max_value, Announcement mode = Announcement::kSimultaneous);

const char* to_string(Resolver r);

}  // namespace reflex
