#include "reflex/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <map>
#include <ostream>
#include <sstream>

namespace reflex::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ParseError((path.empty() ? std::string("<root>") : path) + ": " + msg);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing field '" + key + "'");
  return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "number must be finite");
  return v;
}

long long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

// Wire player key "1".."n" -> 0-based index.
int player_key(const std::string& key, int players, const std::string& path) {
  std::size_t used = 0;
  int p = 0;
  try {
    p = std::stoi(key, &used);
  } catch (const std::exception&) {
    fail(path, "player key '" + key + "' is not an integer");
  }
  if (used != key.size() || p < 1 || p > players) {
    fail(path, "player key '" + key + "' outside 1.." + std::to_string(players));
  }
  return p - 1;
}

void read_tensor(const json& node, const std::vector<std::vector<std::string>>& actions, std::size_t level,
                 const std::string& path, Game::Tensor& out) {
  const std::size_t n = actions.size();
  as_array(node, path);
  if (level == n) {
    if (node.size() != n) {
      fail(path, "payoff leaf has " + std::to_string(node.size()) + " entries, expected " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) out.push_back(as_number(node[i], index(path, i)));
    return;
  }
  if (node.size() != actions[level].size()) {
    fail(path, "expected " + std::to_string(actions[level].size()) + " entries for player " +
                   std::to_string(level + 1) + ", found " + std::to_string(node.size()));
  }
  for (std::size_t a = 0; a < node.size(); ++a) read_tensor(node[a], actions, level + 1, index(path, a), out);
}

json write_tensor(const Game& game, const Game::Tensor& t, std::size_t level, std::uint64_t base) {
  const auto n = static_cast<std::size_t>(game.num_players());
  json arr = json::array();
  if (level == n) {
    for (std::size_t i = 0; i < n; ++i) arr.push_back(t[base * n + i]);
    return arr;
  }
  for (int a = 0; a < game.num_actions(static_cast<int>(level)); ++a) {
    arr.push_back(write_tensor(game, t, level + 1, base + a * game.stride(static_cast<int>(level))));
  }
  return arr;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

// Rewrites "node <index>" in validator messages to the file's node ids.
std::string wire_ids(const std::string& message, const std::vector<long long>& ids) {
  static const std::regex node_ref(R"(node (\d+))");
  std::string out;
  auto it = message.cbegin();
  for (std::sregex_iterator m(message.begin(), message.end(), node_ref), end; m != end; ++m) {
    out.append(it, (*m)[0].first);
    const auto index = std::stoull((*m)[1].str());
    out += "node " + (index < ids.size() ? std::to_string(ids[index]) : (*m)[1].str());
    it = (*m)[0].second;
  }
  out.append(it, message.cend());
  return out;
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(origin + ":" + line_col(text, byte) + ": malformed JSON: " + e.what());
  } catch (const json::exception& e) {
    // e.g. number overflow, which would otherwise smuggle an infinity in
    throw ParseError(origin + ": invalid JSON: " + e.what());
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Games

Game parse_game(const json& j) {
  const auto players = as_integer(field(j, "players", ""), "players");
  if (players < 1) fail("players", "must be >= 1");
  const auto& acts = as_array(field(j, "actions", ""), "actions");
  if (static_cast<long long>(acts.size()) != players) {
    fail("actions", "expected " + std::to_string(players) + " action lists, found " + std::to_string(acts.size()));
  }
  std::vector<std::vector<std::string>> actions;
  for (std::size_t i = 0; i < acts.size(); ++i) {
    const std::string p = index("actions", i);
    as_array(acts[i], p);
    if (acts[i].empty()) fail(p, "player needs at least one action");
    std::vector<std::string> labels;
    for (std::size_t a = 0; a < acts[i].size(); ++a) labels.push_back(as_string(acts[i][a], index(p, a)));
    actions.push_back(std::move(labels));
  }
  Game::Tensor payoffs;
  read_tensor(field(j, "payoffs", ""), actions, 0, "payoffs", payoffs);
  std::map<std::string, Game::Tensor> variants;
  if (auto it = j.find("theta_variants"); it != j.end()) {
    if (!it->is_object()) fail("theta_variants", "expected an object");
    for (const auto& [label, tensor] : it->items()) {
      Game::Tensor t;
      read_tensor(tensor, actions, 0, "theta_variants." + label, t);
      variants.emplace(label, std::move(t));
    }
  }
  try {
    return Game(std::move(actions), std::move(payoffs), std::move(variants));
  } catch (const Error& e) {
    throw ParseError(std::string("game: ") + e.what());
  }
}

ContinuousGame parse_continuous_game(const json& j) {
  const auto family = as_string(field(j, "family", ""), "family");
  if (family != "cournot_linear") fail("family", "unsupported continuous family '" + family + "'");
  const auto players = as_integer(field(j, "players", ""), "players");
  if (players < 1) fail("players", "must be >= 1");
  const double theta = as_number(field(j, "theta", ""), "theta");
  const double cost = as_number(field(j, "c", ""), "c");
  std::vector<std::pair<double, double>> bounds(players, {0.0, theta});
  if (auto it = j.find("bounds"); it != j.end()) {
    as_array(*it, "bounds");
    if (static_cast<long long>(it->size()) != players) fail("bounds", "expected one interval per player");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto p = index("bounds", i);
      if (!(*it)[i].is_array() || (*it)[i].size() != 2) fail(p, "expected [lo, hi]");
      bounds[i] = {as_number((*it)[i][0], index(p, 0)), as_number((*it)[i][1], index(p, 1))};
    }
  }
  try {
    return ContinuousGame(std::move(bounds), CournotLinear{theta, cost});
  } catch (const Error& e) {
    throw ParseError(std::string("continuous game: ") + e.what());
  }
}

AnyGame parse_any_game(const json& j) {
  if (j.is_object() && j.contains("family")) return parse_continuous_game(j);
  return parse_game(j);
}

json to_json(const Game& game) {
  json j;
  j["players"] = game.num_players();
  j["actions"] = game.actions();
  j["payoffs"] = write_tensor(game, game.payoffs(), 0, 0);
  if (!game.theta_variants().empty()) {
    json v = json::object();
    for (const auto& [label, t] : game.theta_variants()) v[label] = write_tensor(game, t, 0, 0);
    j["theta_variants"] = std::move(v);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Belief graphs

ParsedGraph parse_graph(const json& j) {
  ParsedGraph out;
  auto& g = out.graph;
  const auto players = as_integer(field(j, "players", ""), "players");
  if (players < 1) fail("players", "must be >= 1");
  g.players = static_cast<int>(players);
  if (auto it = j.find("theta_space"); it != j.end()) {
    as_array(*it, "theta_space");
    for (std::size_t i = 0; i < it->size(); ++i) g.theta_space.push_back(as_string((*it)[i], index("theta_space", i)));
  }
  const auto& nodes = as_array(field(j, "nodes", ""), "nodes");
  std::map<long long, int> position;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const auto id = as_integer(field(nodes[v], "id", index("nodes", v)), join(index("nodes", v), "id"));
    if (!position.emplace(id, static_cast<int>(v)).second) fail(index("nodes", v), "duplicate node id " + std::to_string(id));
    out.ids.push_back(id);
  }
  // Unknown ids map past the end so validation reports them as dangling.
  const int dangling = static_cast<int>(nodes.size());
  auto resolve = [&](long long id) {
    auto it = position.find(id);
    return it == position.end() ? dangling : it->second;
  };
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const std::string p = index("nodes", v);
    BeliefNode node;
    const auto owner = as_integer(field(nodes[v], "owner", p), join(p, "owner"));
    if (owner < 1 || owner > players) fail(join(p, "owner"), "owner outside 1.." + std::to_string(players));
    node.owner = static_cast<int>(owner - 1);
    if (auto it = nodes[v].find("theta"); it != nodes[v].end()) {
      node.theta = as_string(*it, join(p, "theta"));
    } else if (!g.theta_space.empty()) {
      node.theta = g.theta_space.front();
    }
    if (auto it = nodes[v].find("rank0"); it != nodes[v].end()) {
      if (!it->is_boolean()) fail(join(p, "rank0"), "expected a boolean");
      node.rank0 = it->get<bool>();
    }
    node.beliefs.assign(g.players, -1);
    const auto& beliefs = field(nodes[v], "beliefs", p);
    if (!beliefs.is_object()) fail(join(p, "beliefs"), "expected an object keyed by player");
    for (const auto& [key, target] : beliefs.items()) {
      const int who = player_key(key, g.players, join(p, "beliefs"));
      node.beliefs[who] = resolve(as_integer(target, join(join(p, "beliefs"), key)));
    }
    g.nodes.push_back(std::move(node));
  }
  const auto& roots = field(j, "roots", "");
  if (!roots.is_object()) fail("roots", "expected an object keyed by player");
  g.roots.assign(g.players, -1);
  for (const auto& [key, target] : roots.items()) {
    g.roots[player_key(key, g.players, "roots")] = resolve(as_integer(target, join("roots", key)));
  }
  for (int i = 0; i < g.players; ++i) {
    if (g.roots[i] == -1) fail("roots", "missing root for player " + std::to_string(i + 1));
  }

  const auto report = validate(g);
  if (!report.ok()) {
    std::string msg = "belief graph violates its invariants:";
    for (const auto& v : report.violations) {
      msg += "\n  [" + to_string(v.kind) + "]";
      msg += ": " + wire_ids(v.message, out.ids);
    }
    throw ParseError(msg);
  }
  return out;
}

json to_json(const BeliefGraph& g) {
  json j;
  j["players"] = g.players;
  j["theta_space"] = g.theta_space;
  json nodes = json::array();
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const auto& node = g.nodes[v];
    json beliefs = json::object();
    for (int p = 0; p < g.players; ++p) beliefs[std::to_string(p + 1)] = node.beliefs[p];
    json n{{"id", v}, {"owner", node.owner + 1}, {"theta", node.theta}, {"beliefs", std::move(beliefs)}};
    if (node.rank0) n["rank0"] = true;
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  json roots = json::object();
  for (int p = 0; p < g.players; ++p) roots[std::to_string(p + 1)] = g.roots[p];
  j["roots"] = std::move(roots);
  return j;
}

namespace {

BeliefTree parse_subtree(const json& j, int expected, int players, const std::string& path) {
  BeliefTree t;
  if (!j.is_object()) fail(path, "expected an object");
  t.player = expected;
  if (auto it = j.find("player"); it != j.end()) {
    const auto p = as_integer(*it, join(path, "player"));
    if (p < 1 || p > players) fail(join(path, "player"), "player outside 1.." + std::to_string(players));
    t.player = static_cast<int>(p - 1);
  }
  if (auto it = j.find("theta"); it != j.end()) t.theta = as_string(*it, join(path, "theta"));
  if (auto it = j.find("beliefs"); it != j.end()) {
    if (!it->is_object()) fail(join(path, "beliefs"), "expected an object keyed by player");
    for (const auto& [key, sub] : it->items()) {
      const int who = player_key(key, players, join(path, "beliefs"));
      t.beliefs.emplace(who, parse_subtree(sub, who, players, join(join(path, "beliefs"), key)));
    }
  }
  return t;
}

}  // namespace

TreeSpec parse_tree(const json& j) {
  TreeSpec spec;
  const auto players = as_integer(field(j, "players", ""), "players");
  if (players < 1) fail("players", "must be >= 1");
  spec.players = static_cast<int>(players);
  if (auto it = j.find("theta_space"); it != j.end()) {
    as_array(*it, "theta_space");
    for (std::size_t i = 0; i < it->size(); ++i) spec.theta_space.push_back(as_string((*it)[i], index("theta_space", i)));
  }
  const auto& roots = field(j, "roots", "");
  if (!roots.is_object()) fail("roots", "expected an object keyed by player");
  for (const auto& [key, sub] : roots.items()) {
    const int who = player_key(key, spec.players, "roots");
    spec.roots.emplace(who, parse_subtree(sub, who, spec.players, join("roots", key)));
  }
  return spec;
}

ReflexivePartition parse_partition(const json& j, int num_agents) {
  if (!j.is_object()) fail("", "expected an object");
  try {
    if (auto it = j.find("ranks"); it != j.end()) {
      as_array(*it, "ranks");
      if (static_cast<int>(it->size()) != num_agents) {
        fail("ranks", "expected " + std::to_string(num_agents) + " ranks, found " + std::to_string(it->size()));
      }
      std::vector<int> ranks;
      for (std::size_t i = 0; i < it->size(); ++i) ranks.push_back(static_cast<int>(as_integer((*it)[i], index("ranks", i))));
      return ReflexivePartition::from_ranks(std::move(ranks));
    }
    const auto& classes = as_array(field(j, "classes", ""), "classes");
    std::vector<std::vector<int>> out;
    for (std::size_t k = 0; k < classes.size(); ++k) {
      const auto p = index("classes", k);
      as_array(classes[k], p);
      std::vector<int> members;
      for (std::size_t m = 0; m < classes[k].size(); ++m) {
        members.push_back(static_cast<int>(as_integer(classes[k][m], index(p, m)) - 1));
      }
      out.push_back(std::move(members));
    }
    return ReflexivePartition(std::move(out), num_agents);
  } catch (const DomainError& e) {
    throw ParseError(std::string("partition: ") + e.what());
  }
}

std::vector<std::vector<std::int64_t>> parse_counts(const json& j) {
  const auto& rows = as_array(field(j, "counts", ""), "counts");
  std::vector<std::vector<std::int64_t>> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto p = index("counts", i);
    as_array(rows[i], p);
    std::vector<std::int64_t> row;
    for (std::size_t a = 0; a < rows[i].size(); ++a) {
      const auto c = as_integer(rows[i][a], index(p, a));
      if (c < 0) fail(index(p, a), "counts must be nonnegative");
      row.push_back(c);
    }
    out.push_back(std::move(row));
  }
  return out;
}

Profile parse_profile(const json& j, const Game& game) {
  as_array(j, "profile");
  if (static_cast<int>(j.size()) != game.num_players()) {
    fail("profile", "expected " + std::to_string(game.num_players()) + " entries, found " + std::to_string(j.size()));
  }
  Profile out;
  for (int i = 0; i < game.num_players(); ++i) {
    const auto p = index("profile", i);
    const auto& e = j[i];
    const auto k = static_cast<std::size_t>(game.num_actions(i));
    try {
      if (e.is_null()) {
        out.push_back(MixedStrategy::uniform(k));
      } else if (e.is_string()) {
        const auto& labels = game.actions()[i];
        auto it = std::find(labels.begin(), labels.end(), e.get<std::string>());
        if (it == labels.end()) fail(p, "unknown action label '" + e.get<std::string>() + "'");
        out.push_back(MixedStrategy::pure(k, static_cast<int>(it - labels.begin())));
      } else if (e.is_number_integer()) {
        out.push_back(MixedStrategy::pure(k, static_cast<int>(e.get<long long>())));
      } else {
        as_array(e, p);
        if (e.size() != k) fail(p, "expected " + std::to_string(k) + " probabilities");
        std::vector<double> probs;
        for (std::size_t a = 0; a < e.size(); ++a) probs.push_back(as_number(e[a], index(p, a)));
        out.push_back(MixedStrategy(std::move(probs)));
      }
    } catch (const InvalidProfile& err) {
      fail(p, err.what());
    }
  }
  return out;
}

json strategy_json(const MixedStrategy& s) { return s.probs(); }

// ---------------------------------------------------------------------------
// Puzzle transcripts

namespace {

json pairs_json(const std::vector<Pair>& pairs) {
  json arr = json::array();
  for (const auto& [a, b] : pairs) arr.push_back({a, b});
  return arr;
}

std::vector<Pair> select(const std::vector<Pair>& pairs, const std::vector<bool>& flags) {
  std::vector<Pair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (flags[i]) out.push_back(pairs[i]);
  }
  return out;
}

}  // namespace

json transcript_json(const Transcript& t) {
  json j;
  j["max_value"] = t.max_value;
  j["mode"] = t.mode == Announcement::kSimultaneous ? "simultaneous" : "sequential";
  json rounds = json::array();
  for (const auto& r : t.rounds) {
    rounds.push_back({{"round", r.round},
                      {"candidates", pairs_json(r.candidates)},
                      {"sum_knows", pairs_json(select(r.candidates, r.sum_knows))},
                      {"product_knows", pairs_json(select(r.candidates, r.product_knows))},
                      {"survivors", pairs_json(r.survivors)}});
  }
  j["rounds"] = std::move(rounds);
  j["termination_round"] = t.rounds.empty() ? 0 : t.rounds.back().round;
  j["fixed_point"] = t.fixed_point;
  json outcomes = json::array();
  for (const auto& o : t.outcomes) {
    json e{{"pair", {o.pair.first, o.pair.second}}, {"dont_know_rounds", o.dont_know_rounds}};
    e["resolved_round"] = o.resolved_round ? json(*o.resolved_round) : json(nullptr);
    e["resolved_by"] = to_string(o.resolver);
    outcomes.push_back(std::move(e));
  }
  j["pairs"] = std::move(outcomes);
  json witnesses = json::array();
  for (const auto& o : t.sum_named_after(7)) {
    witnesses.push_back({{"pair", {o.pair.first, o.pair.second}},
                         {"dont_know_rounds", o.dont_know_rounds},
                         {"identified_round", *o.resolved_round},
                         {"resolved_by", to_string(o.resolver)}});
  }
  j["witnesses"] = std::move(witnesses);
  return j;
}

std::string transcript_table(const Transcript& t) {
  std::ostringstream out;
  out << "round  candidates  sum-knows  product-knows  survivors\n";
  for (const auto& r : t.rounds) {
    const auto s = std::count(r.sum_knows.begin(), r.sum_knows.end(), true);
    const auto p = std::count(r.product_knows.begin(), r.product_knows.end(), true);
    char line[96];
    std::snprintf(line, sizeof line, "%5d  %10zu  %9td  %13td  %9zu\n", r.round, r.candidates.size(), s, p,
                  r.survivors.size());
    out << line;
  }
  out << (t.fixed_point ? "stopped at a fixed point\n" : "candidates exhausted\n");
  for (const auto& o : t.sum_named_after(7)) {
    out << "(" << o.pair.first << "," << o.pair.second << "): " << o.dont_know_rounds
        << " mutual \"don't know\" rounds, named by the sum-knower in round " << *o.resolved_round << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const Trajectory& traj) {
  const bool reflexive = !traj.forecasts.empty();
  const std::size_t n = traj.actions.empty() ? 0 : traj.actions.front().size();
  out << "t,agent,action,payoff";
  if (reflexive) {
    out << ",rank";
    for (std::size_t k = 0; k < n; ++k) out << ",forecast_" << k + 1;
  }
  out << "\n";
  for (std::size_t t = 0; t < traj.actions.size(); ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      out << t << "," << i + 1 << "," << num(traj.actions[t][i]) << "," << num(traj.payoffs[t][i]);
      if (reflexive) {
        out << "," << traj.ranks[i];
        for (std::size_t k = 0; k < n; ++k) out << "," << num(traj.forecasts[t][i][k]);
      }
      out << "\n";
    }
  }
}

void write_csv(std::ostream& out, const FiniteTrajectory& traj, const Game& game) {
  out << "t,agent,action,payoff\n";
  for (std::size_t t = 0; t < traj.actions.size(); ++t) {
    for (std::size_t i = 0; i < traj.actions[t].size(); ++i) {
      out << t << "," << i + 1 << "," << game.label(static_cast<int>(i), traj.actions[t][i]) << ","
          << num(traj.payoffs[t][i]) << "\n";
    }
  }
}

void write_csv(std::ostream& out, const MixedTrajectory& traj) {
  out << "t,agent,action,payoff\n";
  for (std::size_t t = 0; t < traj.strategies.size(); ++t) {
    for (std::size_t i = 0; i < traj.strategies[t].size(); ++i) {
      out << t << "," << i + 1 << ",";
      const auto& p = traj.strategies[t][i].probs();
      for (std::size_t a = 0; a < p.size(); ++a) out << (a ? ";" : "") << num(p[a]);
      out << "," << num(traj.payoffs[t][i]) << "\n";
    }
  }
}

}  // namespace reflex::io
