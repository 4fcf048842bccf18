#include "reflex/awareness.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <tuple>

namespace reflex {

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kShape: return "shape";
    case Violation::Kind::kBadOwner: return "bad-owner";
    case Violation::Kind::kUnknownTheta: return "unknown-theta";
    case Violation::Kind::kMissingBelief: return "missing-belief";
    case Violation::Kind::kDanglingBelief: return "dangling-belief";
    case Violation::Kind::kSelfAwareness: return "self-awareness";
    case Violation::Kind::kBeliefOwner: return "belief-owner";
    case Violation::Kind::kBadRoot: return "bad-root";
    case Violation::Kind::kUnreachable: return "unreachable";
  }
  return "unknown";
}

ValidationReport validate(const BeliefGraph& g) {
  ValidationReport report;
  auto add = [&](Violation::Kind kind, int node, std::string msg) {
    report.violations.push_back({kind, node, std::move(msg)});
  };
  const int num_nodes = static_cast<int>(g.nodes.size());
  if (g.players < 1) {
    add(Violation::Kind::kShape, -1, "graph needs at least one player");
    return report;
  }
  const std::set<std::string> thetas(g.theta_space.begin(), g.theta_space.end());

  // Edges that are structurally usable, for the reachability pass.
  std::vector<std::vector<int>> edges(num_nodes);
  for (int v = 0; v < num_nodes; ++v) {
    const auto& node = g.nodes[v];
    const std::string where = "node " + std::to_string(v);
    if (node.owner < 0 || node.owner >= g.players) {
      add(Violation::Kind::kBadOwner, v, where + " has owner outside 1.." + std::to_string(g.players));
      continue;
    }
    if (!thetas.empty() && !thetas.count(node.theta)) {
      add(Violation::Kind::kUnknownTheta, v, where + " has theta '" + node.theta + "' outside theta_space");
    }
    if (static_cast<int>(node.beliefs.size()) != g.players) {
      add(Violation::Kind::kShape, v, where + " has " + std::to_string(node.beliefs.size()) + " beliefs, expected " +
                                          std::to_string(g.players));
      continue;
    }
    for (int j = 0; j < g.players; ++j) {
      const int b = node.beliefs[j];
      const std::string about = where + " belief about player " + std::to_string(j + 1);
      if (b < 0) {
        add(Violation::Kind::kMissingBelief, v, about + " is missing");
        continue;
      }
      if (b >= num_nodes) {
        add(Violation::Kind::kDanglingBelief, v, about + " targets nonexistent node " + std::to_string(b));
        continue;
      }
      edges[v].push_back(b);
      if (j == node.owner) {
        if (b != v) add(Violation::Kind::kSelfAwareness, v, where + " violates self-awareness: own belief targets node " + std::to_string(b));
      } else if (g.nodes[b].owner != j) {
        add(Violation::Kind::kBeliefOwner, v, about + " targets node " + std::to_string(b) + " owned by another player");
      }
    }
  }

  std::vector<bool> seen(num_nodes, false);
  std::deque<int> queue;
  if (static_cast<int>(g.roots.size()) != g.players) {
    add(Violation::Kind::kBadRoot, -1, "graph has " + std::to_string(g.roots.size()) + " roots for " +
                                           std::to_string(g.players) + " players");
  }
  for (std::size_t i = 0; i < g.roots.size(); ++i) {
    const int r = g.roots[i];
    if (r < 0 || r >= num_nodes) {
      add(Violation::Kind::kBadRoot, -1, "root of player " + std::to_string(i + 1) + " is not a node");
      continue;
    }
    if (g.nodes[r].owner != static_cast<int>(i)) {
      add(Violation::Kind::kBadRoot, r, "root of player " + std::to_string(i + 1) + " is owned by another player");
    }
    if (!seen[r]) {
      seen[r] = true;
      queue.push_back(r);
    }
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int b : edges[v]) {
      if (!seen[b]) {
        seen[b] = true;
        queue.push_back(b);
      }
    }
  }
  for (int v = 0; v < num_nodes; ++v) {
    if (!seen[v]) add(Violation::Kind::kUnreachable, v, "node " + std::to_string(v) + " is unreachable from every root");
  }
  return report;
}

void require_valid(const BeliefGraph& graph) {
  const auto report = validate(graph);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw DomainError("invalid belief graph (" + to_string(v.kind) + "): " + v.message);
  }
}

MinimizedGraph minimize(const BeliefGraph& g) {
  require_valid(g);
  const int num_nodes = static_cast<int>(g.nodes.size());

  // Moore-style refinement: start from (owner, theta, anchor) blocks and split
  // by the blocks of each belief target until the block count is stable.
  std::vector<int> block(num_nodes);
  {
    std::map<std::tuple<int, std::string, bool>, int> ids;
    for (int v = 0; v < num_nodes; ++v) {
      const auto& n = g.nodes[v];
      block[v] = ids.try_emplace({n.owner, n.theta, n.rank0}, static_cast<int>(ids.size())).first->second;
    }
  }
  std::size_t count = 0;
  while (true) {
    std::map<std::vector<int>, int> ids;
    std::vector<int> next(num_nodes);
    for (int v = 0; v < num_nodes; ++v) {
      std::vector<int> signature{block[v]};
      for (int b : g.nodes[v].beliefs) signature.push_back(block[b]);
      next[v] = ids.try_emplace(std::move(signature), static_cast<int>(ids.size())).first->second;
    }
    block = std::move(next);
    if (ids.size() == count) break;
    count = ids.size();
  }

  // Canonical numbering: breadth-first from the roots, beliefs in player order.
  std::vector<int> canon(count, -1);
  std::vector<int> representative;
  std::deque<int> queue;
  auto visit = [&](int v) {
    if (canon[block[v]] != -1) return;
    canon[block[v]] = static_cast<int>(representative.size());
    representative.push_back(v);
    queue.push_back(v);
  };
  for (int r : g.roots) visit(r);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int b : g.nodes[v].beliefs) visit(b);
  }

  MinimizedGraph out;
  out.graph.players = g.players;
  out.graph.theta_space = g.theta_space;
  for (int rep : representative) {
    BeliefNode node = g.nodes[rep];
    for (int& b : node.beliefs) b = canon[block[b]];
    out.graph.nodes.push_back(std::move(node));
  }
  for (int r : g.roots) out.graph.roots.push_back(canon[block[r]]);
  out.mapping.resize(num_nodes);
  for (int v = 0; v < num_nodes; ++v) out.mapping[v] = canon[block[v]];
  return out;
}

std::size_t complexity(const BeliefGraph& graph) { return minimize(graph).graph.nodes.size(); }

std::vector<std::optional<int>> reflexion_ranks(const BeliefGraph& g) {
  require_valid(g);
  const int num_nodes = static_cast<int>(g.nodes.size());
  enum class State { kNew, kActive, kDone };
  std::vector<State> state(num_nodes, State::kNew);
  std::vector<std::optional<int>> rank(num_nodes);

  std::function<std::optional<int>(int)> visit = [&](int v) -> std::optional<int> {
    if (state[v] == State::kDone) return rank[v];
    if (state[v] == State::kActive) return std::nullopt;
    state[v] = State::kActive;
    std::optional<int> r = 0;
    if (!g.nodes[v].rank0) {
      for (int j = 0; j < g.players; ++j) {
        if (j == g.nodes[v].owner) continue;
        const auto sub = visit(g.nodes[v].beliefs[j]);
        if (!sub) {
          r.reset();
          break;
        }
        r = std::max(*r, *sub + 1);
      }
    }
    state[v] = State::kDone;
    return rank[v] = r;
  };
  for (int v = 0; v < num_nodes; ++v) visit(v);
  return rank;
}

std::optional<int> reflexion_rank(const BeliefGraph& graph, int node) {
  if (node < 0 || node >= static_cast<int>(graph.nodes.size())) throw DomainError("node id out of range");
  return reflexion_ranks(graph)[node];
}

BeliefGraph common_knowledge_graph(int n, const std::string& theta) {
  if (n < 1) throw ParameterError("common-knowledge graph needs n >= 1");
  BeliefGraph g{n, {theta}, {}, {}};
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  for (int i = 0; i < n; ++i) g.nodes.push_back({i, theta, all, false});
  g.roots = all;
  return g;
}

BeliefGraph graph_from_tree(const TreeSpec& spec) {
  if (spec.players < 1) throw ParameterError("belief tree needs at least one player");
  BeliefGraph g;
  g.players = spec.players;
  g.theta_space = spec.theta_space.empty() ? std::vector<std::string>{"default"} : spec.theta_space;
  const std::string fallback = g.theta_space.front();

  auto check_player = [&](int j, const std::string& where) {
    if (j < 0 || j >= spec.players) {
      throw DomainError(where + " refers to nonexistent player " + std::to_string(j + 1));
    }
  };

  std::map<std::pair<int, std::string>, int> anchors;
  std::function<int(int, const std::string&)> anchor = [&](int player, const std::string& theta) {
    if (auto it = anchors.find({player, theta}); it != anchors.end()) return it->second;
    const int id = static_cast<int>(g.nodes.size());
    anchors.emplace(std::make_pair(player, theta), id);
    g.nodes.push_back({player, theta, std::vector<int>(spec.players, -1), true});
    for (int j = 0; j < spec.players; ++j) {
      const int target = j == player ? id : anchor(j, theta);
      g.nodes[id].beliefs[j] = target;
    }
    return id;
  };

  std::function<int(const BeliefTree&, int, const std::string&)> build = [&](const BeliefTree& t, int expected,
                                                                          const std::string& path) {
    check_player(t.player, path);
    if (t.player != expected) {
      throw DomainError(path + " is owned by player " + std::to_string(t.player + 1) + " but describes player " +
                        std::to_string(expected + 1));
    }
    const std::string theta = t.theta.value_or(fallback);
    if (t.beliefs.empty()) return anchor(t.player, theta);
    const int id = static_cast<int>(g.nodes.size());
    g.nodes.push_back({t.player, theta, std::vector<int>(spec.players, -1), false});
    for (const auto& [j, sub] : t.beliefs) {
      check_player(j, path);
      if (j == t.player) throw DomainError(path + " describes its own player; self-beliefs are implicit");
    }
    for (int j = 0; j < spec.players; ++j) {
      int target = id;
      if (j != t.player) {
        auto it = t.beliefs.find(j);
        target = it == t.beliefs.end() ? anchor(j, theta) : build(it->second, j, path + std::to_string(j + 1));
      }
      g.nodes[id].beliefs[j] = target;
    }
    return id;
  };

  for (const auto& [i, t] : spec.roots) check_player(i, "roots");
  g.roots.resize(spec.players);
  for (int i = 0; i < spec.players; ++i) {
    auto it = spec.roots.find(i);
    g.roots[i] = it == spec.roots.end() ? anchor(i, fallback) : build(it->second, i, std::to_string(i + 1));
  }
  require_valid(g);
  return g;
}

// ---------------------------------------------------------------------------
// Informational equilibrium

std::vector<int> InfoEquilibria::root_profile(const std::vector<int>& assignment) const {
  std::vector<int> out;
  for (int r : minimized.graph.roots) out.push_back(assignment[r]);
  return out;
}

std::vector<std::vector<int>> InfoEquilibria::root_profiles() const {
  std::set<std::vector<int>> distinct;
  for (const auto& a : assignments) distinct.insert(root_profile(a));
  return {distinct.begin(), distinct.end()};
}

namespace {

struct InfoEqProblem {
  MinimizedGraph minimized;
  std::vector<Game> games;             // per canonical node, game at its theta
  std::vector<std::vector<int>> admissible;  // per canonical node
  std::uint64_t total = 1;
};

InfoEqProblem prepare(const BeliefGraph& graph, const Game& game, const InfoEqOptions& options) {
  InfoEqProblem p{minimize(graph), {}, {}, 1};
  const auto& g = p.minimized.graph;
  if (g.players != game.num_players()) {
    throw DomainError("belief graph has " + std::to_string(g.players) + " players, game has " +
                      std::to_string(game.num_players()));
  }
  std::map<std::string, Game> by_theta;
  for (const auto& node : g.nodes) {
    if (!game.has_theta(node.theta)) throw DomainError("game has no payoff variant for theta '" + node.theta + "'");
    auto it = by_theta.find(node.theta);
    if (it == by_theta.end()) it = by_theta.emplace(node.theta, game.at_theta(node.theta)).first;
    p.games.push_back(it->second);
    std::vector<int> actions;
    if (node.rank0) {
      const auto s = rank0_strategy(it->second, node.owner, options.rank0);
      for (int a = 0; a < static_cast<int>(s.size()); ++a) {
        if (s[a] > 0.0) actions.push_back(a);
      }
    } else {
      actions.resize(game.num_actions(node.owner));
      for (int a = 0; a < static_cast<int>(actions.size()); ++a) actions[a] = a;
    }
    if (p.total > options.cap / actions.size()) {
      throw SizeError("informational equilibrium enumeration over " + std::to_string(g.nodes.size()) +
                      " canonical nodes exceeds the cap of " + std::to_string(options.cap) + " assignments");
    }
    p.total *= actions.size();
    p.admissible.push_back(std::move(actions));
  }
  return p;
}

// Mixed-radix decode with the first node most significant, so index order is
// lexicographic order over assignments.
void decode(const InfoEqProblem& p, std::uint64_t idx, std::vector<int>& x) {
  for (int v = static_cast<int>(x.size()) - 1; v >= 0; --v) {
    const auto radix = static_cast<std::uint64_t>(p.admissible[v].size());
    x[v] = p.admissible[v][idx % radix];
    idx /= radix;
  }
}

bool satisfies_rationality(const InfoEqProblem& p, const std::vector<int>& x, std::vector<int>& profile) {
  const auto& g = p.minimized.graph;
  for (int v = 0; v < static_cast<int>(g.nodes.size()); ++v) {
    const auto& node = g.nodes[v];
    if (node.rank0) continue;
    for (int j = 0; j < g.players; ++j) profile[j] = x[node.beliefs[j]];
    const Game& game = p.games[v];
    const std::uint64_t flat = game.flat_index(profile);
    const std::uint64_t stride = game.stride(node.owner);
    const std::uint64_t base = flat - static_cast<std::uint64_t>(x[v]) * stride;
    const double current = game.payoff(flat, node.owner);
    for (int a = 0; a < game.num_actions(node.owner); ++a) {
      if (game.payoff(base + a * stride, node.owner) > current + kArgmaxTol) return false;
    }
  }
  return true;
}

}  // namespace

InfoEquilibria informational_equilibrium_serial(const BeliefGraph& graph, const Game& game,
                                                const InfoEqOptions& options) {
  const auto p = prepare(graph, game, options);
  InfoEquilibria out{p.minimized, {}};
  std::vector<int> x(p.admissible.size());
  std::vector<int> profile(game.num_players());
  for (std::uint64_t idx = 0; idx < p.total; ++idx) {
    decode(p, idx, x);
    if (satisfies_rationality(p, x, profile)) out.assignments.push_back(x);
  }
  return out;
}

InfoEquilibria informational_equilibrium(const BeliefGraph& graph, const Game& game, const InfoEqOptions& options) {
  const auto p = prepare(graph, game, options);
  const auto total = static_cast<std::int64_t>(p.total);
  std::vector<std::uint64_t> hits;
#ifdef REFLEX_HAVE_OPENMP
#pragma omp parallel
#endif
  {
    std::vector<std::uint64_t> local;
    std::vector<int> x(p.admissible.size());
    std::vector<int> profile(game.num_players());
#ifdef REFLEX_HAVE_OPENMP
#pragma omp for schedule(static) nowait
#endif
    for (std::int64_t idx = 0; idx < total; ++idx) {
      decode(p, static_cast<std::uint64_t>(idx), x);
      if (satisfies_rationality(p, x, profile)) local.push_back(static_cast<std::uint64_t>(idx));
    }
#ifdef REFLEX_HAVE_OPENMP
#pragma omp critical(reflex_info_eq_merge)
#endif
    hits.insert(hits.end(), local.begin(), local.end());
  }
  std::sort(hits.begin(), hits.end());
  InfoEquilibria out{p.minimized, {}};
  std::vector<int> x(p.admissible.size());
  for (auto idx : hits) {
    decode(p, idx, x);
    out.assignments.push_back(x);
  }
  return out;
}

}  // namespace reflex
