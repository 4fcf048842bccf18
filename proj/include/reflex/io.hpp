#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "reflex/awareness.hpp"
#include "reflex/dynamics.hpp"
#include "reflex/game.hpp"
#include "reflex/puzzle.hpp"
#include "reflex/strategic.hpp"

// JSON and CSV formats. Player and agent indices are 1-based on the wire and
// 0-based in memory. Parse failures throw ParseError with the offending path.
namespace reflex::io {

using json = nlohmann::ordered_json;

// Reads a file and parses it; syntax errors report line and column.
json load_json(const std::string& path);
json parse_json_text(const std::string& text, const std::string& origin);

Game parse_game(const json& j);
ContinuousGame parse_continuous_game(const json& j);
// Objects with a "family" key are continuous games.
AnyGame parse_any_game(const json& j);
json to_json(const Game& game);

struct ParsedGraph {
  BeliefGraph graph;
  std::vector<long long> ids;  // wire id of each node
};
// Rejects graphs that fail validation, naming the violating wire ids.
ParsedGraph parse_graph(const json& j);
json to_json(const BeliefGraph& graph);

TreeSpec parse_tree(const json& j);

// {"classes": [[agents...], ...]} or {"ranks": [r_1, ..., r_n]}.
ReflexivePartition parse_partition(const json& j, int num_agents);

// {"counts": [[...], ...]}: observed action counts per player.
std::vector<std::vector<std::int64_t>> parse_counts(const json& j);

// One entry per player: probability array, action label, action index, or
// null (uniform).
Profile parse_profile(const json& j, const Game& game);

json strategy_json(const MixedStrategy& s);
json transcript_json(const Transcript& t);
std::string transcript_table(const Transcript& t);

void write_csv(std::ostream& out, const Trajectory& traj);
void write_csv(std::ostream& out, const FiniteTrajectory& traj, const Game& game);
void write_csv(std::ostream& out, const MixedTrajectory& traj);

// Every input and output schema, keyed by name.
const json& schemas();

}  // namespace reflex::io
