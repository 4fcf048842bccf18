#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "oracles.hpp"
#include "reflex/awareness.hpp"

using namespace reflex;

namespace {

bool has_violation(const ValidationReport& r, Violation::Kind kind, int node) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const Violation& v) { return v.kind == kind && v.node == node; });
}

// Drops nodes unreachable from the roots and renumbers the rest.
BeliefGraph prune(const BeliefGraph& g) {
  std::vector<int> order;
  std::vector<int> id(g.nodes.size(), -1);
  std::function<void(int)> dfs = [&](int v) {
    if (id[v] != -1) return;
    id[v] = static_cast<int>(order.size());
    order.push_back(v);
    for (int b : g.nodes[v].beliefs) dfs(b);
  };
  for (int r : g.roots) dfs(r);
  BeliefGraph out{g.players, g.theta_space, {}, {}};
  for (int v : order) {
    auto node = g.nodes[v];
    for (auto& b : node.beliefs) b = id[b];
    out.nodes.push_back(node);
  }
  for (int r : g.roots) out.roots.push_back(id[r]);
  return out;
}

BeliefGraph random_graph(int players, int extra, std::uint64_t seed, bool anchors = false) {
  std::mt19937_64 rng(seed);
  BeliefGraph g{players, {"a", "b"}, {}, {}};
  const int total = players + extra;
  std::vector<int> owner(total);
  for (int v = 0; v < total; ++v) owner[v] = v < players ? v : static_cast<int>(rng() % players);
  for (int v = 0; v < total; ++v) {
    BeliefNode node;
    node.owner = owner[v];
    // mostly "a" so that merges happen
    node.theta = rng() % 4 == 0 ? "b" : "a";
    node.rank0 = anchors && v >= players && rng() % 3 == 0;
    for (int j = 0; j < players; ++j) {
      if (j == owner[v]) {
        node.beliefs.push_back(v);
        continue;
      }
      std::vector<int> pool;
      for (int u = 0; u < total; ++u) {
        if (owner[u] == j) pool.push_back(u);
      }
      node.beliefs.push_back(pool[rng() % pool.size()]);
    }
    g.nodes.push_back(node);
  }
  for (int i = 0; i < players; ++i) g.roots.push_back(i);
  return prune(g);
}

// Unfolded-tree signature to the given depth: equal signatures at depth
// |nodes| characterize equal infinite unfoldings.
std::vector<std::string> signatures(const BeliefGraph& g) {
  const int n = static_cast<int>(g.nodes.size());
  std::vector<std::string> sig(n);
  for (int v = 0; v < n; ++v) {
    sig[v] = std::to_string(g.nodes[v].owner) + g.nodes[v].theta + (g.nodes[v].rank0 ? "*" : "");
  }
  const auto base = sig;
  for (int d = 0; d < n + 1; ++d) {
    std::vector<std::string> next(n);
    for (int v = 0; v < n; ++v) {
      next[v] = base[v] + "(";
      if (!g.nodes[v].rank0) {
        for (int j = 0; j < g.players; ++j) {
          if (j != g.nodes[v].owner) next[v] += sig[g.nodes[v].beliefs[j]] + ",";
        }
      }
      next[v] += ")";
    }
    // Compress to keep strings short without losing distinctions.
    std::map<std::string, int> ids;
    for (auto& s : next) s = "#" + std::to_string(ids.try_emplace(s, static_cast<int>(ids.size())).first->second);
    for (int v = 0; v < n; ++v) next[v] = base[v] + next[v];
    sig = std::move(next);
  }
  return sig;
}

struct ThetaGame {
  std::map<std::string, oracle::RandomGame> by_theta;
  Game game;
};

ThetaGame random_theta_game(const std::vector<int>& sizes, std::uint64_t seed, bool grid = true) {
  ThetaGame tg;
  tg.by_theta.emplace("a", oracle::random_game(sizes, seed, -2, 2, grid));
  tg.by_theta.emplace("b", oracle::random_game(sizes, seed + 7919, -2, 2, grid));
  const auto& a = tg.by_theta.at("a").game;
  tg.game = Game(a.actions(), a.payoffs(),
                 {{"a", a.payoffs()}, {"b", tg.by_theta.at("b").game.payoffs()}});
  return tg;
}

bool node_rational(const ThetaGame& tg, const BeliefGraph& g, const std::vector<int>& x, int v) {
  const auto& node = g.nodes[v];
  const auto& table = tg.by_theta.at(node.theta).u;
  std::vector<int> p(g.players);
  for (int j = 0; j < g.players; ++j) p[j] = x[node.beliefs[j]];
  const double here = table.at(p)[node.owner];
  for (int d = 0; d < tg.by_theta.at(node.theta).sizes[node.owner]; ++d) {
    auto q = p;
    q[node.owner] = d;
    if (table.at(q)[node.owner] > here + 1e-9) return false;
  }
  return true;
}

// Root profiles of all raw-node assignments meeting conditions 2 and 3; anchors play anything (uniform rank 0).
std::set<std::vector<int>> oracle_root_profiles(const ThetaGame& tg, const BeliefGraph& g) {
  const int n = static_cast<int>(g.nodes.size());
  const auto sig = signatures(g);
  std::set<std::vector<int>> out;
  std::vector<int> x(n, 0);
  std::function<void(int)> rec = [&](int v) {
    if (v == n) {
      for (int u = 0; u < n; ++u) {
        if (!g.nodes[u].rank0 && !node_rational(tg, g, x, u)) return;
      }
      std::vector<int> roots;
      for (int r : g.roots) roots.push_back(x[r]);
      out.insert(roots);
      return;
    }
    for (int a = 0; a < tg.game.num_actions(g.nodes[v].owner); ++a) {
      bool consistent = true;
      for (int u = 0; u < v; ++u) {
        if (sig[u] == sig[v] && x[u] != a) consistent = false;
      }
      if (!consistent) continue;
      x[v] = a;
      rec(v + 1);
    }
  };
  rec(0);
  return out;
}

BeliefTree leaf(int player) { return BeliefTree{player, std::nullopt, {}}; }

}  // namespace

TEST_CASE("validation") {
  for (int n = 1; n <= 6; ++n) CHECK(validate(common_knowledge_graph(n, "t")).ok());
  const auto ck3 = common_knowledge_graph(3, "t");
  CHECK(ck3.nodes.size() == 3);
  int edges = 0;
  for (const auto& node : ck3.nodes) edges += static_cast<int>(node.beliefs.size());
  CHECK(edges == 9);

  auto bad = common_knowledge_graph(2, "t");
  bad.nodes.push_back({0, "t", {1, 1}, false});  // owner 0 but beliefs[0] != self
  bad.nodes[1].beliefs[0] = 2;
  const auto report = validate(bad);
  CHECK(has_violation(report, Violation::Kind::kSelfAwareness, 2));
  CHECK_THROWS_AS(require_valid(bad), DomainError);

  auto orphan = common_knowledge_graph(2, "t");
  orphan.nodes.push_back({1, "t", {0, 2}, false});
  CHECK(has_violation(validate(orphan), Violation::Kind::kUnreachable, 2));

  auto dangling = common_knowledge_graph(2, "t");
  dangling.nodes[0].beliefs[1] = 9;
  CHECK(has_violation(validate(dangling), Violation::Kind::kDanglingBelief, 0));

  auto wrong_owner = common_knowledge_graph(2, "t");
  wrong_owner.nodes[0].beliefs[1] = 0;
  CHECK(has_violation(validate(wrong_owner), Violation::Kind::kBeliefOwner, 0));

  auto unknown = common_knowledge_graph(2, "t");
  unknown.nodes[1].theta = "zzz";
  CHECK(has_violation(validate(unknown), Violation::Kind::kUnknownTheta, 1));

  for (int s = 0; s < 50; ++s) CHECK(validate(random_graph(2 + s % 2, s % 7, s, s % 2)).ok());
}

TEST_CASE("minimization") {
  SUBCASE("common knowledge is already minimal") {
    for (int n = 1; n <= 5; ++n) CHECK(complexity(common_knowledge_graph(n, "t")) == static_cast<std::size_t>(n));
  }
  SUBCASE("identical subtrees under different parents merge") {
    TreeSpec spec{2, {"a"}, {}};
    BeliefTree inner{0, std::nullopt, {{1, leaf(1)}}};
    spec.roots[0] = BeliefTree{0, std::nullopt, {{1, BeliefTree{1, std::nullopt, {{0, inner}}}}}};
    spec.roots[1] = BeliefTree{1, std::nullopt, {{0, inner}}};
    const auto g = graph_from_tree(spec);
    const int n21 = g.nodes[g.roots[1]].beliefs[0];
    const int n12 = g.nodes[g.roots[0]].beliefs[1];
    const int n121 = g.nodes[n12].beliefs[0];
    CHECK(n21 != n121);
    const auto m = minimize(g);
    CHECK(m.mapping[n21] == m.mapping[n121]);
    CHECK(m.graph.nodes.size() < g.nodes.size());
    // root of 2 and phantom 12 also coincide: both believe in the same phantom 1
    CHECK(m.mapping[n12] == m.mapping[g.roots[1]]);
  }
  SUBCASE("nodes with different theta stay apart") {
    // Agent 2's view of 3 holds theta a; agent 1's view of 2's view of 3 holds theta b.
    for (const char* t : {"a", "b"}) {
      TreeSpec spec{3, {"a", "b"}, {}};
      spec.roots[0] = BeliefTree{0, std::nullopt, {{1, BeliefTree{1, std::nullopt, {{2, BeliefTree{2, t, {}}}}}}}};
      spec.roots[1] = BeliefTree{1, std::nullopt, {{2, BeliefTree{2, "a", {}}}}};
      const auto g = graph_from_tree(spec);
      const int n23 = g.nodes[g.roots[1]].beliefs[2];
      const int n123 = g.nodes[g.nodes[g.roots[0]].beliefs[1]].beliefs[2];
      const auto m = minimize(g);
      const auto sig = signatures(g);
      const bool same = std::string(t) == "a";
      CHECK((m.mapping[n23] == m.mapping[n123]) == same);
      CHECK((sig[n23] == sig[n123]) == same);
    }
  }
  SUBCASE("seeded graphs: idempotence, signature agreement, owner and theta preserved") {
    for (int s = 0; s < 50; ++s) {
      const auto g = random_graph(2 + s % 2, 3 + s % 6, 1000 + s, s % 3 == 0);
      const auto m = minimize(g);
      CHECK(validate(m.graph).ok());
      const auto mm = minimize(m.graph);
      CHECK(mm.graph == m.graph);
      for (std::size_t v = 0; v < mm.mapping.size(); ++v) CHECK(mm.mapping[v] == static_cast<int>(v));
      const auto sig = signatures(g);
      for (std::size_t u = 0; u < g.nodes.size(); ++u) {
        const auto& cu = m.graph.nodes[m.mapping[u]];
        CHECK(cu.owner == g.nodes[u].owner);
        CHECK(cu.theta == g.nodes[u].theta);
        for (std::size_t v = 0; v < g.nodes.size(); ++v) CHECK((m.mapping[u] == m.mapping[v]) == (sig[u] == sig[v]));
      }
    }
  }
  SUBCASE("duplicating a node changes nothing after minimization") {
    for (int s = 0; s < 30; ++s) {
      const auto g = random_graph(3, 4, 2000 + s);
      auto dup = g;
      const int target = g.nodes[g.roots[0]].beliefs[1];
      BeliefNode copy = g.nodes[target];
      const int id = static_cast<int>(dup.nodes.size());
      copy.beliefs[copy.owner] = id;
      dup.nodes.push_back(copy);
      dup.nodes[dup.roots[0]].beliefs[1] = id;
      dup = prune(dup);  // the original may have lost its only referrer
      CHECK(validate(dup).ok());
      CHECK(minimize(dup).graph == minimize(g).graph);
      CHECK(complexity(dup) == complexity(g));
    }
  }
}

TEST_CASE("trees and reflexion ranks") {
  SUBCASE("agent 1 with two hanging phantoms") {
    TreeSpec spec{3, {}, {}};
    spec.roots[0] = BeliefTree{0, std::nullopt, {{1, leaf(1)}, {2, leaf(2)}}};
    const auto g = graph_from_tree(spec);
    CHECK(validate(g).ok());
    // root of 1 plus one rank-0 anchor per player, shared by the missing roots
    CHECK(g.nodes.size() == 4);
    CHECK(complexity(g) == 4);
    CHECK(reflexion_rank(g, g.roots[0]) == 1);
    CHECK(reflexion_rank(g, g.roots[1]) == 0);
    CHECK(g.nodes[g.roots[1]].rank0);
  }
  SUBCASE("agent believes its opponents are rank 1") {
    TreeSpec spec{3, {"t"}, {}};
    spec.roots[0] = BeliefTree{0, std::nullopt,
                               {{1, BeliefTree{1, std::nullopt, {{0, leaf(0)}, {2, leaf(2)}}}},
                                {2, BeliefTree{2, std::nullopt, {{0, leaf(0)}, {1, leaf(1)}}}}}};
    const auto g = graph_from_tree(spec);
    CHECK(reflexion_rank(g, g.roots[0]) == 2);
    CHECK(reflexion_rank(g, g.nodes[g.roots[0]].beliefs[1]) == 1);
  }
  SUBCASE("single root without beliefs") {
    TreeSpec spec{1, {"t"}, {}};
    spec.roots[0] = leaf(0);
    const auto g = graph_from_tree(spec);
    CHECK(reflexion_rank(g, g.roots[0]) == 0);
  }
  SUBCASE("common knowledge is unbounded") {
    const auto ck = common_knowledge_graph(3, "t");
    for (int v = 0; v < 3; ++v) CHECK_FALSE(reflexion_rank(ck, v).has_value());
    CHECK(reflexion_rank(common_knowledge_graph(1, "t"), 0) == 0);
  }
  SUBCASE("a tree feeding into a common-knowledge pair") {
    BeliefGraph g{2, {"t"}, {}, {}};
    g.nodes.push_back({0, "t", {0, 1}, false});  // root 1 -> 1
    g.nodes.push_back({1, "t", {2, 1}, false});  // 1 -> 2 -> cycle
    g.nodes.push_back({0, "t", {2, 3}, false});
    g.nodes.push_back({1, "t", {2, 3}, false});
    g.roots = {0, 3};
    CHECK_FALSE(reflexion_rank(g, 0).has_value());
  }
  SUBCASE("malformed trees") {
    TreeSpec spec{2, {"t"}, {}};
    spec.roots[0] = BeliefTree{0, std::nullopt, {{5, leaf(5)}}};
    CHECK_THROWS_AS(graph_from_tree(spec), DomainError);
    spec.roots[0] = BeliefTree{0, std::nullopt, {{1, leaf(0)}}};
    CHECK_THROWS_AS(graph_from_tree(spec), DomainError);
    spec.roots[0] = BeliefTree{0, std::nullopt, {{0, leaf(0)}}};
    CHECK_THROWS_AS(graph_from_tree(spec), DomainError);
    spec.roots[0] = BeliefTree{0, "nope", {}};
    CHECK_THROWS_AS(graph_from_tree(spec), DomainError);
  }
}

TEST_CASE("informational equilibrium") {
  SUBCASE("common knowledge reduces to pure Nash") {
    for (int s = 0; s < 100; ++s) {
      const auto rg = oracle::random_game(s % 2 ? std::vector<int>{2, 3} : std::vector<int>{2, 2}, 3000 + s, -2, 2, true);
      const Game g(rg.game.actions(), rg.game.payoffs(), {{"t", rg.game.payoffs()}});
      const auto eq = informational_equilibrium(common_knowledge_graph(2, "t"), g);
      CHECK(eq.root_profiles() == oracle::pure_nash(rg));
      CHECK(eq.assignments == informational_equilibrium_serial(common_knowledge_graph(2, "t"), g).assignments);
    }
  }
  SUBCASE("single player picks the argmax") {
    const Game g({{"x", "y", "z"}}, {1, 3, 3}, {{"t", {1, 3, 3}}});
    const auto eq = informational_equilibrium(common_knowledge_graph(1, "t"), g);
    CHECK(eq.assignments == std::vector<std::vector<int>>{{1}, {2}});
  }
  SUBCASE("player 1 believes a, and believes player 2 believes b") {
    for (int s = 0; s < 30; ++s) {
      const auto tg = random_theta_game({2, 2}, 4000 + s);
      BeliefGraph g{2, {"a", "b"}, {}, {}};
      g.nodes.push_back({0, "a", {0, 1}, false});
      g.nodes.push_back({1, "b", {2, 1}, false});
      g.nodes.push_back({0, "b", {2, 1}, false});
      g.roots = {0, 1};
      const auto eq = informational_equilibrium(g, tg.game);
      std::vector<std::vector<int>> expected;
      for (const auto& x : oracle::all_profiles({2, 2, 2})) {
        bool ok = true;
        for (int v = 0; v < 3; ++v) ok = ok && node_rational(tg, g, x, v);
        if (ok) expected.push_back(x);
      }
      CHECK(eq.minimized.graph.nodes.size() == 3);
      // canonical order equals input order for this graph
      CHECK(eq.minimized.mapping == std::vector<int>{0, 1, 2});
      CHECK(eq.assignments == expected);
    }
  }
  SUBCASE("minimization preserves root-action sets; assignments pass a per-node re-check") {
    for (int s = 0; s < 20; ++s) {
      const auto g = random_graph(2, 2 + s % 4, 5000 + s, s % 2);
      const auto tg = random_theta_game({2, 2}, 6000 + s);
      const auto eq = informational_equilibrium(g, tg.game);
      const auto roots = eq.root_profiles();
      CHECK(std::set<std::vector<int>>(roots.begin(), roots.end()) == oracle_root_profiles(tg, g));
      CHECK(eq.root_profiles() == informational_equilibrium(minimize(g).graph, tg.game).root_profiles());
      CHECK(eq.assignments == informational_equilibrium_serial(g, tg.game).assignments);
      for (const auto& x : eq.assignments) {
        for (std::size_t v = 0; v < x.size(); ++v) {
          if (!eq.minimized.graph.nodes[v].rank0) CHECK(node_rational(tg, eq.minimized.graph, x, static_cast<int>(v)));
        }
      }
    }
  }
  SUBCASE("rank-0 anchors play from the rank-0 support") {
    TreeSpec spec{2, {"t"}, {}};
    spec.roots[0] = BeliefTree{0, std::nullopt, {{1, leaf(1)}}};
    spec.roots[1] = BeliefTree{1, std::nullopt, {{0, leaf(0)}}};
    const Game pd = prisoners_dilemma();
    const Game g(pd.actions(), pd.payoffs(), {{"t", pd.payoffs()}});
    const auto uniform = informational_equilibrium(graph_from_tree(spec), g);
    const auto maximax = informational_equilibrium(graph_from_tree(spec), g, {Rank0Model::kMaximax, kDefaultEnumCap});
    CHECK(uniform.root_profiles() == std::vector<std::vector<int>>{{1, 1}});
    CHECK(uniform.assignments.size() == 4);  // two anchors free over {C, D}
    CHECK(maximax.assignments.size() == 1);  // maximax picks D (max 5)
  }
  SUBCASE("errors") {
    const Game pd = prisoners_dilemma();
    CHECK_THROWS_AS(informational_equilibrium(common_knowledge_graph(3, "t"), pd), DomainError);
    const Game g(pd.actions(), pd.payoffs(), {{"t", pd.payoffs()}});
    CHECK_THROWS_AS(informational_equilibrium(common_knowledge_graph(2, "u"), g), DomainError);
    const auto big = random_graph(2, 30, 1);
    REQUIRE(complexity(big) > 4);
    CHECK_THROWS_AS(informational_equilibrium(big, random_theta_game({2, 2}, 1).game, {Rank0Model::kUniform, 16}),
                    SizeError);
    auto invalid = common_knowledge_graph(2, "t");
    invalid.nodes[0].beliefs[0] = 1;
    CHECK_THROWS_AS(informational_equilibrium(invalid, g), DomainError);
  }
}
