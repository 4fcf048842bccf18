#include "reflex/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "reflex/awareness.hpp"
#include "reflex/dynamics.hpp"
#include "reflex/game.hpp"
#include "reflex/io.hpp"
#include "reflex/puzzle.hpp"
#include "reflex/strategic.hpp"

namespace reflex::cli {

namespace {

using io::json;

std::uint64_t enum_cap() {
  if (const char* env = std::getenv("REFLEX_MAX_ENUM")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) throw ParameterError("REFLEX_MAX_ENUM must be a positive integer");
    return v;
  }
  return kDefaultEnumCap;
}

// Inline JSON, or "@path" to read it from a file.
json inline_or_file(const std::string& text, const std::string& what) {
  if (!text.empty() && text.front() == '@') return io::load_json(text.substr(1));
  return io::parse_json_text(text, what);
}

struct GameSource {
  std::string file;
  std::string builtin;
  std::vector<std::string> params;

  void attach(CLI::App* sub) {
    auto* g = sub->add_option("--game", file, "game JSON file");
    auto* b = sub->add_option("--builtin", builtin,
                              "builtin game: prisoners_dilemma, matching_pennies, p_beauty, cournot_linear");
    g->excludes(b);
    sub->add_option("--param", params, "builtin parameter key=value (repeatable)");
  }

  AnyGame load() const {
    if (!file.empty()) return io::parse_any_game(io::load_json(file));
    if (builtin.empty()) throw ParameterError("one of --game or --builtin is required");
    std::map<std::string, double> kv;
    for (const auto& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) throw ParameterError("--param expects key=value, got '" + p + "'");
      try {
        kv[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
      } catch (const std::exception&) {
        throw ParameterError("--param value is not a number: '" + p + "'");
      }
    }
    return make_builtin(builtin, kv);
  }

  Game finite() const {
    auto g = load();
    if (auto* f = std::get_if<Game>(&g)) return std::move(*f);
    throw ParameterError("this command needs a finite game");
  }
};

struct GraphSource {
  std::string graph_file;
  std::string tree_file;

  void attach(CLI::App* sub) {
    auto* g = sub->add_option("--graph", graph_file, "belief graph JSON file");
    auto* t = sub->add_option("--tree", tree_file, "nested belief tree JSON file");
    g->excludes(t);
  }

  io::ParsedGraph load() const {
    if (!graph_file.empty()) return io::parse_graph(io::load_json(graph_file));
    if (tree_file.empty()) throw ParameterError("one of --graph or --tree is required");
    io::ParsedGraph out;
    try {
      out.graph = graph_from_tree(io::parse_tree(io::load_json(tree_file)));
    } catch (const DomainError& e) {
      throw ParseError(tree_file + ": " + e.what());
    }
    for (std::size_t v = 0; v < out.graph.nodes.size(); ++v) out.ids.push_back(static_cast<long long>(v));
    return out;
  }
};

struct ModelFlags {
  int max_rank = 2;
  std::string rank0 = "uniform";
  std::string response = "best";
  double lambda = 1.0;
  double tau = 1.5;
  double alpha = 1.0;
  double epsilon = 0.0;

  void attach(CLI::App* sub, bool hierarchy) {
    sub->add_option("--max-rank", max_rank, "maximum reflexion rank m")->check(CLI::NonNegativeNumber);
    sub->add_option("--rank0", rank0, "rank-0 behavior")
        ->check(CLI::IsMember({"uniform", "maximin", "maximax", "minimax-regret"}));
    sub->add_option("--response", response, "response model")->check(CLI::IsMember({"best", "qbr"}));
    sub->add_option("--lambda", lambda, "QBR precision");
    if (hierarchy) {
      sub->add_option("--tau", tau, "Poisson rank parameter");
      sub->add_option("--alpha", alpha, "generalized-CH exponent (>= 1)");
      sub->add_option("--epsilon", epsilon, "spike mass on rank 0");
    }
  }

  ResponseModel response_model() const {
    return response == "qbr" ? ResponseModel::quantal(lambda) : ResponseModel::best();
  }
  RankDistribution dist() const {
    return level_distribution(epsilon > 0.0 ? RankSpec::spike_poisson(tau, epsilon) : RankSpec::poisson(tau), max_rank);
  }
};

json response_json(const ResponseModel& r) {
  if (r.kind == ResponseModel::Kind::kBest) return {{"kind", "best"}};
  return {{"kind", "qbr"}, {"lambda", r.lambda}};
}

json profile_labels(const Game& game, const std::vector<int>& profile) {
  json arr = json::array();
  for (std::size_t i = 0; i < profile.size(); ++i) arr.push_back(game.label(static_cast<int>(i), profile[i]));
  return arr;
}

json profiles_json(const Game& game, const std::vector<std::vector<int>>& profiles) {
  json arr = json::array();
  for (const auto& p : profiles) arr.push_back({{"profile", profile_labels(game, p)}});
  return arr;
}

std::vector<double> parse_grid(const std::string& text, const std::string& name) {
  std::vector<double> out;
  try {
    const auto c1 = text.find(':');
    if (c1 != std::string::npos) {
      // lo:step:hi
      const auto c2 = text.find(':', c1 + 1);
      if (c2 == std::string::npos) throw ParameterError("");
      const double lo = std::stod(text.substr(0, c1));
      const double step = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
      const double hi = std::stod(text.substr(c2 + 1));
      if (!(step > 0.0) || hi < lo) throw ParameterError("");
      const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
      for (long long k = 0; k <= count; ++k) out.push_back(lo + static_cast<double>(k) * step);
      return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  } catch (const std::exception&) {
    throw ParameterError(name + " must be a comma list or lo:step:hi, got '" + text + "'");
  }
  if (out.empty()) throw ParameterError(name + " is empty");
  return out;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

// Writes CSV to `path`, or to `fallback` when path is empty.
template <typename Writer>
void write_csv_to(const std::string& path, std::ostream& fallback, Writer&& writer) {
  if (path.empty()) {
    writer(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw ParameterError("cannot open output file '" + path + "'");
  writer(file);
}

std::vector<int> pure_profile(const Game& game, const std::string& text) {
  std::vector<int> x(game.num_players(), 0);
  if (text.empty()) return x;
  const auto profile = io::parse_profile(inline_or_file(text, "--x0"), game);
  for (int i = 0; i < game.num_players(); ++i) {
    if (!profile[i].is_pure()) throw ParameterError("--x0 must give a pure action for every player");
    x[i] = profile[i].mode();
  }
  return x;
}

std::vector<double> real_profile(const ContinuousGame& game, const std::string& text) {
  std::vector<double> x;
  for (const auto& [lo, hi] : game.bounds()) x.push_back(lo);
  if (text.empty()) return x;
  const json j = inline_or_file(text, "--x0");
  if (!j.is_array() || static_cast<int>(j.size()) != game.num_players()) {
    throw ParseError("--x0: expected an array of " + std::to_string(game.num_players()) + " numbers");
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError("--x0[" + std::to_string(i) + "]: expected a number");
    x[i] = j[i].get<double>();
  }
  return x;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solvers for reflexive games: hierarchies of strategic thinking, awareness structures, and dynamics"};
  app.name("reflex");
  bool show_version = false;
  bool show_schemas = false;
  app.add_flag("--version", show_version, "print the version");
  app.add_flag("--schemas", show_schemas, "print the JSON schemas of every input and output");
  app.require_subcommand(0, 1);

  GameSource game_src;
  GraphSource graph_src;
  ModelFlags model;

  // nash
  std::string theta;
  auto* nash = app.add_subcommand("nash", "enumerate pure Nash equilibria");
  game_src.attach(nash);
  nash->add_option("--theta", theta, "payoff variant to solve");

  // qbr
  int player = 1;
  double lambda = 1.0;
  std::string profile_text;
  auto* qbr_cmd = app.add_subcommand("qbr", "quantal best response against an opponent profile");
  game_src.attach(qbr_cmd);
  qbr_cmd->add_option("--player", player, "responding player (1-based)");
  qbr_cmd->add_option("--lambda", lambda, "precision")->required();
  qbr_cmd->add_option("--profile", profile_text, "opponent profile JSON (inline or @file); default uniform");

  // hierarchies
  auto* level_k = app.add_subcommand("level-k", "level-k hierarchy strategies");
  auto* ch = app.add_subcommand("ch", "cognitive hierarchy strategies");
  auto* qch = app.add_subcommand("qch", "quantal cognitive hierarchy strategies");
  for (auto* sub : {level_k, ch, qch}) {
    game_src.attach(sub);
    model.attach(sub, true);
  }

  // partition-eq
  std::string partition_file;
  std::string awareness = "rpm";
  auto* part = app.add_subcommand("partition-eq", "reflexive equilibrium for a given reflexive partition");
  game_src.attach(part);
  model.attach(part, false);
  part->add_option("--partition", partition_file, "partition JSON file")->required();
  part->add_option("--awareness", awareness, "subjective partition rule")->check(CLI::IsMember({"level-k", "rpm"}));

  // rank-game
  std::string belief = "level-k";
  auto* rank_game_cmd = app.add_subcommand("rank-game", "matrix game whose strategies are reflexion ranks");
  game_src.attach(rank_game_cmd);
  model.attach(rank_game_cmd, true);
  rank_game_cmd->add_option("--belief", belief, "belief model")->check(CLI::IsMember({"level-k", "ch"}));

  // info-eq / minimize / rank
  auto* info = app.add_subcommand("info-eq", "informational equilibria of a belief graph");
  graph_src.attach(info);
  game_src.attach(info);
  info->add_option("--rank0", model.rank0, "rank-0 behavior of hanging agents")
      ->check(CLI::IsMember({"uniform", "maximin", "maximax", "minimax-regret"}));
  auto* minimize_cmd = app.add_subcommand("minimize", "canonical graph of a reflexive game");
  graph_src.attach(minimize_cmd);
  long long node_id = -1;
  auto* rank_cmd = app.add_subcommand("rank", "reflexion ranks of belief-graph nodes");
  graph_src.attach(rank_cmd);
  rank_cmd->add_option("--node", node_id, "only this node id");

  // dynamics
  std::string dyn_model = "indicator";
  double gamma = 0.5;
  std::optional<double> harmonic;
  int steps = 200;
  std::uint64_t seed = 0;
  std::string x0_text;
  std::string out_path;
  std::string tie_break = "lowest";
  double q0 = 1.0;
  auto* dyn = app.add_subcommand("dynamics", "simulate a repeated game and write the trajectory as CSV");
  game_src.attach(dyn);
  dyn->add_option("--model", dyn_model, "dynamics model")
      ->check(CLI::IsMember({"indicator", "reflexive", "cournot", "fp", "reinforce"}));
  dyn->add_option("--partition", partition_file, "partition JSON file (reflexive model)");
  dyn->add_option("--gamma", gamma, "constant step size in [0, 1]");
  dyn->add_option("--harmonic", harmonic, "use gamma_t = min(1, c / t) with this c");
  dyn->add_option("--steps", steps, "number of stages T")->check(CLI::NonNegativeNumber);
  dyn->add_option("--seed", seed, "random seed");
  dyn->add_option("--x0", x0_text, "initial profile JSON (inline or @file)");
  dyn->add_option("--out", out_path, "CSV output path (default stdout)");
  dyn->add_option("--tie-break", tie_break, "fictitious-play ties")->check(CLI::IsMember({"lowest", "random"}));
  dyn->add_option("--q0", q0, "initial propensity (reinforce)");

  auto* fp = app.add_subcommand("fp", "fictitious play");
  game_src.attach(fp);
  fp->add_option("--steps", steps, "number of stages T")->check(CLI::NonNegativeNumber);
  fp->add_option("--tie-break", tie_break, "tie-breaking rule")->check(CLI::IsMember({"lowest", "random"}));
  fp->add_option("--seed", seed, "random seed");
  fp->add_option("--x0", x0_text, "initial pure profile JSON (inline or @file)");
  fp->add_option("--out", out_path, "also write the trajectory CSV here");

  auto* reinforce = app.add_subcommand("reinforce", "cumulative-propensity reinforcement learning");
  game_src.attach(reinforce);
  reinforce->add_option("--steps", steps, "number of stages T")->check(CLI::NonNegativeNumber);
  reinforce->add_option("--q0", q0, "initial propensity");
  reinforce->add_option("--seed", seed, "random seed");
  reinforce->add_option("--out", out_path, "also write the trajectory CSV here");

  int max_value = 9;
  bool sequential = false;
  std::string format = "json";
  auto* puzzle = app.add_subcommand("puzzle", "sum-product awareness puzzle");
  puzzle->add_option("--max", max_value, "largest integer that can be picked")->check(CLI::PositiveNumber);
  puzzle->add_flag("--sequential", sequential, "product-knower hears the sum-knower's answer first");
  puzzle->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "table"}));

  std::string data_file;
  std::string fit_model = "qch";
  std::string tau_grid = "0.5:0.5:3";
  std::string lambda_grid = "0.5:0.5:5";
  std::string alpha_grid = "1";
  std::string epsilon_grid = "0";
  auto* fit = app.add_subcommand("fit", "maximum-likelihood grid search over hierarchy parameters");
  game_src.attach(fit);
  fit->add_option("--data", data_file, "observed action counts JSON")->required();
  fit->add_option("--model", fit_model, "model family")
      ->check(CLI::IsMember({"level-k", "ch", "qch", "gch", "spike-qch"}));
  fit->add_option("--tau-grid", tau_grid, "tau grid: comma list or lo:step:hi");
  fit->add_option("--lambda-grid", lambda_grid, "lambda grid");
  fit->add_option("--alpha-grid", alpha_grid, "alpha grid (gch)");
  fit->add_option("--epsilon-grid", epsilon_grid, "epsilon grid (spike-qch)");
  fit->add_option("--max-rank", model.max_rank, "maximum reflexion rank m")->check(CLI::NonNegativeNumber);
  fit->add_option("--rank0", model.rank0, "rank-0 behavior")
      ->check(CLI::IsMember({"uniform", "maximin", "maximax", "minimax-regret"}));

  std::vector<const char*> argv{"reflex"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInput;
  }

  try {
    if (show_version) {
      out << "reflex " << kVersion << "\n";
      return kExitOk;
    }
    if (show_schemas) {
      emit(out, io::schemas());
      return kExitOk;
    }
    if (app.get_subcommands().empty()) {
      err << "error: a subcommand is required\n" << app.help();
      return kExitInput;
    }
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    if (name == "nash") {
      Game game = game_src.finite();
      if (!theta.empty()) game = game.at_theta(theta);
      emit(out, profiles_json(game, pure_nash(game, enum_cap())));
    } else if (name == "qbr") {
      const Game game = game_src.finite();
      if (player < 1 || player > game.num_players()) throw ParameterError("--player out of range");
      Profile opp;
      if (profile_text.empty()) {
        for (int i = 0; i < game.num_players(); ++i) opp.push_back(MixedStrategy::uniform(game.num_actions(i)));
      } else {
        opp = io::parse_profile(inline_or_file(profile_text, "--profile"), game);
      }
      const auto s = reflex::qbr(game, opp, player - 1, lambda);
      emit(out, {{"player", player}, {"lambda", lambda}, {"actions", game.actions()[player - 1]}, {"probs", s.probs()}});
    } else if (name == "level-k" || name == "ch" || name == "qch") {
      const Game game = game_src.finite();
      if (name == "qch") model.response = "qbr";
      const auto response = model.response_model();
      const auto rank0 = parse_rank0(model.rank0);
      json j{{"model", name}, {"max_rank", model.max_rank}, {"rank0", to_string(rank0)}, {"response", response_json(response)}};
      std::optional<RankDistribution> dist;
      BeliefModel belief = BeliefModel::level_k();
      if (name != "level-k") {
        dist = model.dist();
        belief = BeliefModel::ch(*dist, model.alpha);
        j["tau"] = model.tau;
        j["alpha"] = model.alpha;
        j["epsilon"] = model.epsilon;
        j["rank_weights"] = dist->weights;
      }
      const auto sol = hierarchy_strategies(game, model.max_rank, belief, rank0, response);
      std::vector<MixedStrategy> population;
      if (dist) population = population_mixture(sol, *dist);
      json players = json::array();
      for (int i = 0; i < game.num_players(); ++i) {
        json ranks = json::array();
        for (const auto& s : sol.strategies[i]) ranks.push_back(s.probs());
        json p{{"player", i + 1}, {"actions", game.actions()[i]}, {"ranks", std::move(ranks)}};
        if (dist) p["population"] = population[i].probs();
        players.push_back(std::move(p));
      }
      j["players"] = std::move(players);
      emit(out, j);
    } else if (name == "partition-eq") {
      const Game game = game_src.finite();
      const auto partition = io::parse_partition(io::load_json(partition_file), game.num_players());
      const auto style = awareness == "rpm" ? AwarenessStyle::kRpm : AwarenessStyle::kLevelK;
      const auto eq = reflexive_partition_equilibrium(game, partition, style, parse_rank0(model.rank0),
                                                      model.response_model());
      json agents = json::array();
      for (int j = 0; j < game.num_players(); ++j) {
        agents.push_back({{"agent", j + 1}, {"rank", partition.rank_of(j)}, {"probs", eq[j].probs()}});
      }
      emit(out, {{"awareness", awareness}, {"agents", std::move(agents)}});
    } else if (name == "rank-game") {
      const Game game = game_src.finite();
      const BeliefModel b = belief == "ch" ? BeliefModel::ch(model.dist(), model.alpha) : BeliefModel::level_k();
      emit(out, io::to_json(rank_game(game, model.max_rank, b, parse_rank0(model.rank0), model.response_model())));
    } else if (name == "info-eq") {
      const auto parsed = graph_src.load();
      const Game game = game_src.finite();
      InfoEqOptions options{parse_rank0(model.rank0), enum_cap()};
      const auto eq = informational_equilibrium(parsed.graph, game, options);
      const auto& g = eq.minimized.graph;
      json equilibria = json::array();
      for (const auto& a : eq.assignments) {
        json labels = json::array();
        for (std::size_t v = 0; v < a.size(); ++v) labels.push_back(game.label(g.nodes[v].owner, a[v]));
        equilibria.push_back({{"actions", std::move(labels)}, {"roots", profile_labels(game, eq.root_profile(a))}});
      }
      emit(out, {{"complexity", g.nodes.size()},
                 {"graph", io::to_json(g)},
                 {"equilibria", std::move(equilibria)},
                 {"profiles", profiles_json(game, eq.root_profiles())}});
    } else if (name == "minimize") {
      const auto parsed = graph_src.load();
      const auto m = minimize(parsed.graph);
      json mapping = json::object();
      for (std::size_t v = 0; v < m.mapping.size(); ++v) mapping[std::to_string(parsed.ids[v])] = m.mapping[v];
      emit(out, {{"complexity", m.graph.nodes.size()}, {"graph", io::to_json(m.graph)}, {"mapping", std::move(mapping)}});
    } else if (name == "rank") {
      const auto parsed = graph_src.load();
      const auto ranks = reflexion_ranks(parsed.graph);
      json arr = json::array();
      bool found = node_id < 0;
      for (std::size_t v = 0; v < ranks.size(); ++v) {
        if (node_id >= 0 && parsed.ids[v] != node_id) continue;
        found = true;
        arr.push_back({{"node", parsed.ids[v]},
                       {"owner", parsed.graph.nodes[v].owner + 1},
                       {"rank", ranks[v] ? json(*ranks[v]) : json("unbounded")}});
      }
      if (!found) throw ParameterError("--node " + std::to_string(node_id) + " is not in the graph");
      emit(out, {{"ranks", std::move(arr)}});
    } else if (name == "dynamics") {
      const AnyGame any = game_src.load();
      const StepSchedule schedule = harmonic ? StepSchedule::harmonic(*harmonic) : StepSchedule::constant(gamma);
      if (const auto* cg = std::get_if<ContinuousGame>(&any)) {
        const auto x0 = real_profile(*cg, x0_text);
        Trajectory traj;
        if (dyn_model == "indicator") {
          traj = indicator_trajectory(*cg, x0, schedule, steps);
        } else if (dyn_model == "reflexive") {
          const auto partition = partition_file.empty()
                                     ? ReflexivePartition::all_rank0(cg->num_players())
                                     : io::parse_partition(io::load_json(partition_file), cg->num_players());
          traj = reflexive_trajectory(*cg, partition, x0, schedule, steps);
        } else if (dyn_model == "cournot") {
          traj = cournot_play(*cg, x0, steps);
        } else {
          throw ParameterError("model '" + dyn_model + "' needs a finite game");
        }
        write_csv_to(out_path, out, [&](std::ostream& o) { io::write_csv(o, traj); });
      } else {
        const Game& game = std::get<Game>(any);
        if (dyn_model == "indicator") {
          Profile s0;
          if (x0_text.empty()) {
            for (int i = 0; i < game.num_players(); ++i) s0.push_back(MixedStrategy::uniform(game.num_actions(i)));
          } else {
            s0 = io::parse_profile(inline_or_file(x0_text, "--x0"), game);
          }
          const auto traj = finite_indicator_play(game, s0, schedule, steps);
          write_csv_to(out_path, out, [&](std::ostream& o) { io::write_csv(o, traj); });
        } else if (dyn_model == "cournot") {
          const auto traj = cournot_play(game, pure_profile(game, x0_text), steps);
          write_csv_to(out_path, out, [&](std::ostream& o) { io::write_csv(o, traj, game); });
        } else if (dyn_model == "fp") {
          const auto res = fictitious_play(game, pure_profile(game, x0_text), steps,
                                           tie_break == "random" ? TieBreak::kUniformRandom : TieBreak::kLowestIndex,
                                           seed);
          write_csv_to(out_path, out, [&](std::ostream& o) { io::write_csv(o, res.trajectory, game); });
        } else if (dyn_model == "reinforce") {
          const auto res = reinforcement_play(game, steps, {q0, seed});
          write_csv_to(out_path, out, [&](std::ostream& o) { io::write_csv(o, res.trajectory, game); });
        } else {
          throw ParameterError("model '" + dyn_model + "' needs a continuous game");
        }
      }
    } else if (name == "fp") {
      const Game game = game_src.finite();
      const auto mode = tie_break == "random" ? TieBreak::kUniformRandom : TieBreak::kLowestIndex;
      const auto res = fictitious_play(game, pure_profile(game, x0_text), steps, mode, seed);
      if (!out_path.empty()) write_csv_to(out_path, out, [&](std::ostream& o) { io::write_csv(o, res.trajectory, game); });
      emit(out, {{"steps", steps},
                 {"tie_break", tie_break},
                 {"seed", seed},
                 {"counts", res.counts},
                 {"frequencies", res.frequencies()},
                 {"final", profile_labels(game, res.trajectory.actions.back())}});
    } else if (name == "reinforce") {
      const Game game = game_src.finite();
      const auto res = reinforcement_play(game, steps, {q0, seed});
      if (!out_path.empty()) write_csv_to(out_path, out, [&](std::ostream& o) { io::write_csv(o, res.trajectory, game); });
      std::vector<std::vector<double>> freq(game.num_players());
      for (int i = 0; i < game.num_players(); ++i) {
        freq[i].assign(game.num_actions(i), 0.0);
        for (const auto& stage : res.trajectory.actions) freq[i][stage[i]] += 1.0;
        for (double& f : freq[i]) f /= static_cast<double>(res.trajectory.actions.size());
      }
      emit(out, {{"steps", steps},
                 {"seed", seed},
                 {"q0", q0},
                 {"shifts", res.shifts},
                 {"frequencies", freq},
                 {"propensities", res.propensities}});
    } else if (name == "puzzle") {
      const auto t = run_sum_product(max_value, sequential ? Announcement::kSequential : Announcement::kSimultaneous);
      if (format == "table") {
        out << io::transcript_table(t);
      } else {
        emit(out, io::transcript_json(t));
      }
    } else if (name == "fit") {
      const Game game = game_src.finite();
      const auto counts = io::parse_counts(io::load_json(data_file));
      FitFamily family;
      family.max_rank = model.max_rank;
      family.rank0 = parse_rank0(model.rank0);
      FitGrids grids;
      grids.tau = parse_grid(tau_grid, "--tau-grid");
      if (fit_model == "level-k") {
        family.belief = BeliefModel::Kind::kLevelK;
      }
      if (fit_model == "ch") {
        family.response = ResponseModel::Kind::kBest;
      } else {
        grids.lambda = parse_grid(lambda_grid, "--lambda-grid");
      }
      if (fit_model == "gch") grids.alpha = parse_grid(alpha_grid, "--alpha-grid");
      if (fit_model == "spike-qch") {
        family.spike = true;
        grids.epsilon = parse_grid(epsilon_grid, "--epsilon-grid");
      }
      const auto res = fit_grid(game, counts, family, grids);
      json population = json::array();
      for (const auto& s : predict(game, family, res.params)) population.push_back(s.probs());
      emit(out, {{"model", fit_model},
                 {"params",
                  {{"tau", res.params.tau},
                   {"lambda", res.params.lambda},
                   {"alpha", res.params.alpha},
                   {"epsilon", res.params.epsilon}}},
                 {"log_likelihood", res.log_likelihood},
                 {"evaluated", res.evaluated},
                 {"population", std::move(population)}});
    }
    return kExitOk;
  } catch (const SizeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace reflex::cli
