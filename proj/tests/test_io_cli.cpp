#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>

#include "reflex/cli.hpp"
#include "reflex/io.hpp"

using namespace reflex;
using reflex::io::json;

namespace {

const std::string kData = REFLEX_EXAMPLES_DIR;

std::string data(const std::string& name) { return kData + "/" + name; }

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
  const auto r = run(std::move(args));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  return json::parse(r.out);
}

std::string parse_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("game files") {
  const auto j = io::load_json(data("g.json"));
  const Game g = io::parse_game(j);
  CHECK(g.num_players() == 2);
  CHECK(g.payoff(std::vector<int>{1, 0}, 0) == 3);
  CHECK(g.at_theta("t").payoff(std::vector<int>{1, 1}, 1) == 2);
  CHECK(nlohmann::json::parse(io::to_json(g).dump()) == nlohmann::json::parse(j.dump()));

  const auto arity = parse_error([] { io::parse_game(io::load_json(data("bad_arity.json"))); });
  CHECK(arity.find("payoffs[1][0]") != std::string::npos);

  const auto malformed = parse_error([] { io::load_json(data("malformed.json")); });
  CHECK(malformed.find("malformed.json:3:") != std::string::npos);

  auto inf = j;
  inf["payoffs"][0][0][0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(io::parse_game(inf), ParseError);
  CHECK_THROWS_AS(io::parse_game(io::parse_json_text(R"({"players": 1, "actions": [["a"]], "payoffs": [[1e999]]})", "x")),
                  ParseError);
  CHECK_THROWS_AS(io::parse_game(io::parse_json_text(R"({"players": 1, "actions": [["a"]], "payoffs": [["1"]]})", "x")),
                  ParseError);
  CHECK_THROWS_AS(io::load_json(data("does_not_exist.json")), ParseError);

  const auto any = io::parse_any_game(io::load_json(data("cournot.json")));
  CHECK(std::holds_alternative<ContinuousGame>(any));
}

TEST_CASE("graph, tree, partition, counts and profile files") {
  const auto parsed = io::parse_graph(io::load_json(data("ck2.json")));
  CHECK(parsed.graph == common_knowledge_graph(2, "t"));
  CHECK(parsed.ids == std::vector<long long>{10, 20});

  const auto bad = parse_error([] { io::parse_graph(io::load_json(data("bad_self.json"))); });
  CHECK(bad.find("self-awareness") != std::string::npos);
  CHECK(bad.find("node 1 violates self-awareness: own belief targets node 3") != std::string::npos);

  const auto tree = io::parse_tree(io::load_json(data("tree.json")));
  CHECK(reflexion_rank(graph_from_tree(tree), graph_from_tree(tree).roots[0]) == 2);

  CHECK(io::parse_partition(io::load_json(data("partition.json")), 2).ranks() == std::vector<int>{1, 0});
  CHECK(io::parse_partition(io::load_json(data("partition3.json")), 3).ranks() == std::vector<int>{2, 1, 0});
  CHECK_THROWS_AS(io::parse_partition(io::load_json(data("partition3.json")), 2), ParseError);

  CHECK(io::parse_counts(io::load_json(data("counts.json"))) == std::vector<std::vector<std::int64_t>>{{30, 70}, {25, 75}});
  CHECK_THROWS_AS(io::parse_counts(json::parse(R"({"counts": [[1, -2]]})")), ParseError);

  const Game pd = io::parse_game(io::load_json(data("pd.json")));
  const auto p = io::parse_profile(json::parse(R"([[0.25, 0.75], "D"])"), pd);
  CHECK(p[0].probs() == std::vector<double>{0.25, 0.75});
  CHECK(p[1] == MixedStrategy::pure(2, 1));
  CHECK(io::parse_profile(json::parse("[null, 0]"), pd)[0] == MixedStrategy::uniform(2));
  CHECK_THROWS_AS(io::parse_profile(json::parse(R"(["X", 0])"), pd), ParseError);
  CHECK_THROWS_AS(io::parse_profile(json::parse("[[0.5, 0.6], 0]"), pd), ParseError);
}

TEST_CASE("CSV output") {
  const auto t = cournot_play(cournot_linear(2, 10, 1), {0.0, 0.0}, 2);
  std::ostringstream out;
  io::write_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,agent,action,payoff");
  std::getline(in, line);
  CHECK(line == "0,1,0,0");
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "1,1,4.5,0");
}

TEST_CASE("subcommands") {
  SUBCASE("nash") {
    const auto r = run({"nash", "--game", data("pd.json")});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out) == json::parse(R"([{"profile": ["D", "D"]}])"));
    CHECK(run_json({"nash", "--builtin", "matching_pennies"}).empty());
    CHECK(run_json({"nash", "--game", data("g.json"), "--theta", "t"}).size() == 2);
  }
  SUBCASE("info-eq on common knowledge matches nash") {
    const auto info = run_json({"info-eq", "--graph", data("ck2.json"), "--game", data("g.json")});
    const auto nash = run_json({"nash", "--game", data("g_theta.json")});
    CHECK(info["profiles"] == nash);
    CHECK(info["complexity"] == 2);
    const auto mixed = run_json({"info-eq", "--graph", data("mixed_beliefs.json"), "--game", data("g.json")});
    CHECK(mixed["complexity"] == 3);  // nodes 2 and 4 carry the same beliefs
  }
  SUBCASE("puzzle witness") {
    const auto t = run_json({"puzzle", "--max", "9"});
    REQUIRE(t["witnesses"].size() >= 1);
    CHECK(t["witnesses"][0]["dont_know_rounds"] == 7);
    CHECK(t["witnesses"][0]["identified_round"] == 8);
    CHECK(t["witnesses"][0]["pair"] == json::parse("[4, 4]"));
    const auto table = run({"puzzle", "--max", "9", "--format", "table"});
    CHECK(table.code == 0);
    CHECK(table.out.find("(4,4)") != std::string::npos);
  }
  SUBCASE("strategic solvers") {
    const auto lk = run_json({"level-k", "--game", data("pd.json"), "--max-rank", "3"});
    CHECK(lk["players"][0]["ranks"][3] == json::parse("[0.0, 1.0]"));
    const auto q = run_json({"qch", "--game", data("pd.json"), "--lambda", "5", "--tau", "1.5"});
    CHECK(q["players"][1]["population"].size() == 2);
    const auto qb = run_json({"qbr", "--builtin", "matching_pennies", "--lambda", "3", "--profile", R"(["H", null])"});
    CHECK(qb["probs"] == json::parse("[0.5, 0.5]"));
    const auto pe = run_json({"partition-eq", "--game", data("pd.json"), "--partition", data("partition.json")});
    CHECK(pe["agents"][0]["rank"] == 1);
    CHECK(pe["agents"][0]["probs"] == json::parse("[0.0, 1.0]"));
    const auto rg = run_json({"rank-game", "--game", data("pd.json"), "--max-rank", "2"});
    CHECK(rg["actions"][0] == json::parse(R"(["rank0", "rank1", "rank2"])"));
    const auto fit = run_json({"fit", "--game", data("pd.json"), "--data", data("counts.json"), "--tau-grid", "0.5,1,2",
                               "--lambda-grid", "0.5:0.5:2"});
    CHECK(fit["evaluated"] == 12);
  }
  SUBCASE("graphs") {
    const auto m = run_json({"minimize", "--tree", data("tree.json")});
    CHECK(m["complexity"] == 6);
    const auto ranks = run_json({"rank", "--graph", data("ck2.json")});
    CHECK(ranks["ranks"][0]["rank"] == "unbounded");
    const auto one = run_json({"rank", "--tree", data("tree.json"), "--node", "0"});
    CHECK(one["ranks"].size() == 1);
    CHECK(one["ranks"][0]["rank"] == 2);
  }
  SUBCASE("dynamics") {
    const auto r = run({"dynamics", "--model", "cournot", "--game", data("cournot.json"), "--steps", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("2,1,2.25,") != std::string::npos);
    const auto refl = run({"dynamics", "--model", "reflexive", "--game", data("cournot3.json"), "--partition",
                           data("partition3.json"), "--steps", "3", "--x0", "[0.5, 2, 4]"});
    CHECK(refl.code == 0);
    CHECK(refl.out.rfind("t,agent,action,payoff,rank,forecast_1,forecast_2,forecast_3", 0) == 0);
    const auto fp = run({"dynamics", "--model", "fp", "--builtin", "matching_pennies", "--steps", "5"});
    CHECK(fp.code == 0);
    const auto bad = run({"dynamics", "--model", "fp", "--game", data("cournot.json")});
    CHECK(bad.code == 2);
  }
  SUBCASE("seeded runs are byte-identical and echo the seed") {
    const std::vector<std::string> fp{"fp", "--builtin", "matching_pennies", "--steps", "500", "--tie-break", "random",
                                      "--seed", "7"};
    CHECK(run(fp).out == run(fp).out);
    CHECK(run_json(fp)["seed"] == 7);
    const std::vector<std::string> re{"reinforce", "--game", data("pd.json"), "--steps", "300", "--seed", "3"};
    CHECK(run(re).out == run(re).out);
    CHECK(run_json(re)["seed"] == 3);
    const std::vector<std::string> ch{"ch", "--builtin", "p_beauty", "--param", "n=2", "--param", "hi=20"};
    CHECK(run(ch).out == run(ch).out);
  }
  SUBCASE("errors and exit codes") {
    const auto unknown = run({"frobnicate"});
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("Usage") != std::string::npos);
    CHECK(run({"nash", "--game", data("malformed.json")}).code == 2);
    CHECK(run({"nash", "--game", data("bad_arity.json")}).err.find("payoffs[1][0]") != std::string::npos);
    CHECK(run({"nash"}).code == 2);
    CHECK(run({"info-eq", "--graph", data("bad_self.json"), "--game", data("g.json")}).code == 2);
    CHECK(run({"qch", "--game", data("pd.json"), "--tau", "-1"}).code == 2);
    CHECK(run({"level-k", "--game", data("pd.json"), "--rank0", "fairness"}).code == 2);
    CHECK(run({"--version"}).out == "reflex 1.0.0\n");
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == 2);

    ::setenv("REFLEX_MAX_ENUM", "3", 1);
    const auto capped = run({"nash", "--game", data("pd.json")});
    CHECK(capped.code == 3);
    CHECK(run({"info-eq", "--tree", data("tree.json"), "--builtin", "p_beauty", "--param", "n=3", "--param", "hi=3"}).code == 3);
    ::setenv("REFLEX_MAX_ENUM", "abc", 1);
    CHECK(run({"nash", "--game", data("pd.json")}).code == 2);
    ::unsetenv("REFLEX_MAX_ENUM");
    CHECK(run({"nash", "--game", data("pd.json")}).code == 0);
  }
  SUBCASE("schemas") {
    const auto s = run_json({"--schemas"});
    for (const char* key : {"game", "belief_graph", "nash_output", "puzzle_output", "fit_output", "trajectory_csv"}) {
      CHECK(s.contains(key));
    }
  }
}
