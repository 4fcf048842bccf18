#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reflex/game.hpp"
#include "reflex/strategic.hpp"

namespace reflex {

// A real or phantom agent. Node ids are positions in BeliefGraph::nodes.
struct BeliefNode {
  int owner = 0;
  std::string theta;
  // beliefs[j] is the node that represents player j in this agent's mind;
  // beliefs[owner] is the node itself. -1 marks a missing belief.
  std::vector<int> beliefs;
  // Hanging rank-0 agent. Its beliefs point at other rank-0 anchors and it
  // plays from the support of the configured rank-0 strategy.
  bool rank0 = false;

  friend bool operator==(const BeliefNode&, const BeliefNode&) = default;
};

struct BeliefGraph {
  int players = 0;
  std::vector<std::string> theta_space;
  std::vector<BeliefNode> nodes;
  std::vector<int> roots;  // roots[i]: node of real agent i

  friend bool operator==(const BeliefGraph&, const BeliefGraph&) = default;
};

struct Violation {
  enum class Kind {
    kShape,
    kBadOwner,
    kUnknownTheta,
    kMissingBelief,
    kDanglingBelief,
    kSelfAwareness,
    kBeliefOwner,
    kBadRoot,
    kUnreachable,
  };
  Kind kind;
  int node;  // -1 when the violation is not tied to a node
  std::string message;
};

std::string to_string(Violation::Kind kind);

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const BeliefGraph& graph);
// Throws DomainError naming the first violation.
void require_valid(const BeliefGraph& graph);

struct MinimizedGraph {
  BeliefGraph graph;
  std::vector<int> mapping;  // input node -> canonical node
};

// Merges nodes with equal owner, theta, anchor flag and recursively
// equivalent beliefs. Canonical node order is breadth-first from the roots
// in player order, so the result is idempotent node-for-node.
MinimizedGraph minimize(const BeliefGraph& graph);

std::size_t complexity(const BeliefGraph& graph);

// Longest belief path down to rank-0 agents; nullopt when a non-self belief
// cycle is reachable (common-knowledge component).
std::optional<int> reflexion_rank(const BeliefGraph& graph, int node);
std::vector<std::optional<int>> reflexion_ranks(const BeliefGraph& graph);

BeliefGraph common_knowledge_graph(int n, const std::string& theta);

// Nested belief description. A node without beliefs is a hanging rank-0
// agent; beliefs it omits about other players are hanging as well.
struct BeliefTree {
  int player = 0;
  std::optional<std::string> theta;  // defaults to the first entry of theta_space
  std::map<int, BeliefTree> beliefs;
};

struct TreeSpec {
  int players = 0;
  std::vector<std::string> theta_space;
  std::map<int, BeliefTree> roots;
};

BeliefGraph graph_from_tree(const TreeSpec& spec);

struct InfoEqOptions {
  Rank0Model rank0 = Rank0Model::kUniform;
  std::uint64_t cap = kDefaultEnumCap;
};

struct InfoEquilibria {
  MinimizedGraph minimized;
  // One action per canonical node, sorted lexicographically.
  std::vector<std::vector<int>> assignments;

  std::vector<int> root_profile(const std::vector<int>& assignment) const;
  // Distinct root-action profiles, sorted.
  std::vector<std::vector<int>> root_profiles() const;
};

InfoEquilibria informational_equilibrium(const BeliefGraph& graph, const Game& game, const InfoEqOptions& options = {});
InfoEquilibria informational_equilibrium_serial(const BeliefGraph& graph, const Game& game,
                                                const InfoEqOptions& options = {});

}  // namespace reflex
