#include "reflex/io.hpp"

namespace reflex::io {

namespace {

// JSON Schema (draft-07) for every file the tool reads and every document it writes.
constexpr const char* kSchemas = R"json(
{
  "game": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "Finite normal-form game",
    "type": "object",
    "required": ["players", "actions", "payoffs"],
    "properties": {
      "players": {"type": "integer", "minimum": 1},
      "actions": {"type": "array", "items": {"type": "array", "minItems": 1, "items": {"type": "string"}}},
      "payoffs": {"$ref": "#/definitions/nested"},
      "theta_variants": {"type": "object", "additionalProperties": {"$ref": "#/definitions/nested"}}
    },
    "definitions": {
      "nested": {"type": "array", "items": {"anyOf": [{"type": "number"}, {"$ref": "#/definitions/nested"}]}}
    }
  },
  "continuous_game": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "Linear Cournot oligopoly",
    "type": "object",
    "required": ["family", "players", "theta", "c"],
    "properties": {
      "family": {"const": "cournot_linear"},
      "players": {"type": "integer", "minimum": 1},
      "theta": {"type": "number"},
      "c": {"type": "number", "minimum": 0},
      "bounds": {"type": "array", "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}}
    }
  },
  "belief_graph": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "Belief graph (awareness structure)",
    "type": "object",
    "required": ["players", "nodes", "roots"],
    "properties": {
      "players": {"type": "integer", "minimum": 1},
      "theta_space": {"type": "array", "items": {"type": "string"}},
      "nodes": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["id", "owner", "beliefs"],
          "properties": {
            "id": {"type": "integer", "minimum": 0},
            "owner": {"type": "integer", "minimum": 1},
            "theta": {"type": "string"},
            "rank0": {"type": "boolean"},
            "beliefs": {"type": "object", "patternProperties": {"^[1-9][0-9]*$": {"type": "integer"}}, "additionalProperties": false}
          }
        }
      },
      "roots": {"type": "object", "patternProperties": {"^[1-9][0-9]*$": {"type": "integer"}}, "additionalProperties": false}
    }
  },
  "belief_tree": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "Nested belief description",
    "type": "object",
    "required": ["players", "roots"],
    "properties": {
      "players": {"type": "integer", "minimum": 1},
      "theta_space": {"type": "array", "items": {"type": "string"}},
      "roots": {"type": "object", "additionalProperties": {"$ref": "#/definitions/tree"}}
    },
    "definitions": {
      "tree": {
        "type": "object",
        "properties": {
          "player": {"type": "integer", "minimum": 1},
          "theta": {"type": "string"},
          "beliefs": {"type": "object", "additionalProperties": {"$ref": "#/definitions/tree"}}
        }
      }
    }
  },
  "partition": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "Reflexive partition",
    "type": "object",
    "oneOf": [
      {"required": ["classes"], "properties": {"classes": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 1}}}}},
      {"required": ["ranks"], "properties": {"ranks": {"type": "array", "items": {"type": "integer", "minimum": 0}}}}
    ]
  },
  "data": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "Observed action counts",
    "type": "object",
    "required": ["counts"],
    "properties": {"counts": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}}}
  },
  "nash_output": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "array",
    "items": {"type": "object", "required": ["profile"], "properties": {"profile": {"type": "array", "items": {"type": "string"}}}}
  },
  "qbr_output": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["player", "lambda", "actions", "probs"],
    "properties": {
      "player": {"type": "integer", "minimum": 1},
      "lambda": {"type": "number", "minimum": 0},
      "actions": {"type": "array", "items": {"type": "string"}},
      "probs": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}}
    }
  },
  "hierarchy_output": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["model", "max_rank", "rank0", "response", "players"],
    "properties": {
      "model": {"enum": ["level-k", "ch", "qch"]},
      "max_rank": {"type": "integer", "minimum": 0},
      "rank0": {"enum": ["uniform", "maximin", "maximax", "minimax-regret"]},
      "response": {"type": "object", "required": ["kind"], "properties": {"kind": {"enum": ["best", "qbr"]}, "lambda": {"type": "number"}}},
      "tau": {"type": "number"},
      "alpha": {"type": "number"},
      "epsilon": {"type": "number"},
      "rank_weights": {"type": "array", "items": {"type": "number"}},
      "players": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["player", "actions", "ranks"],
          "properties": {
            "player": {"type": "integer"},
            "actions": {"type": "array", "items": {"type": "string"}},
            "ranks": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
            "population": {"type": "array", "items": {"type": "number"}}
          }
        }
      }
    }
  },
  "partition_eq_output": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["awareness", "agents"],
    "properties": {
      "awareness": {"enum": ["level-k", "rpm"]},
      "agents": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["agent", "rank", "probs"],
          "properties": {"agent": {"type": "integer"}, "rank": {"type": "integer"}, "probs": {"type": "array", "items": {"type": "number"}}}
        }
      }
    }
  },
  "info_eq_output": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["complexity", "graph", "equilibria", "profiles"],
    "properties": {
      "complexity": {"type": "integer", "minimum": 1},
      "graph": {"type": "object"},
      "equilibria": {"type": "array", "items": {"type": "object", "required": ["actions"], "properties": {"actions": {"type": "array", "items": {"type": "string"}}}}},
      "profiles": {"type": "array", "items": {"type": "object", "required": ["profile"], "properties": {"profile": {"type": "array", "items": {"type": "string"}}}}}
    }
  },
  "minimize_output": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["complexity", "graph", "mapping"],
    "properties": {
      "complexity": {"type": "integer", "minimum": 1},
      "graph": {"type": "object"},
      "mapping": {"type": "object", "additionalProperties": {"type": "integer"}}
    }
  },
  "rank_output": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["ranks"],
    "properties": {
      "ranks": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["node", "owner", "rank"],
          "properties": {
            "node": {"type": "integer"},
            "owner": {"type": "integer"},
            "rank": {"anyOf": [{"type": "integer", "minimum": 0}, {"const": "unbounded"}]}
          }
        }
      }
    }
  },
  "fp_output": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["steps", "tie_break", "seed", "counts", "frequencies", "final"],
    "properties": {
      "steps": {"type": "integer"},
      "tie_break": {"enum": ["lowest", "random"]},
      "seed": {"type": "integer"},
      "counts": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
      "frequencies": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
      "final": {"type": "array", "items": {"type": "string"}}
    }
  },
  "reinforce_output": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["steps", "seed", "q0", "shifts", "frequencies", "propensities"],
    "properties": {
      "steps": {"type": "integer"},
      "seed": {"type": "integer"},
      "q0": {"type": "number"},
      "shifts": {"type": "array", "items": {"type": "number"}},
      "frequencies": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
      "propensities": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
    }
  },
  "puzzle_output": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["max_value", "mode", "rounds", "termination_round", "fixed_point", "pairs", "witnesses"],
    "properties": {
      "max_value": {"type": "integer", "minimum": 1},
      "mode": {"enum": ["simultaneous", "sequential"]},
      "rounds": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["round", "candidates", "sum_knows", "product_knows", "survivors"],
          "properties": {
            "round": {"type": "integer"},
            "candidates": {"$ref": "#/definitions/pairs"},
            "sum_knows": {"$ref": "#/definitions/pairs"},
            "product_knows": {"$ref": "#/definitions/pairs"},
            "survivors": {"$ref": "#/definitions/pairs"}
          }
        }
      },
      "termination_round": {"type": "integer"},
      "fixed_point": {"type": "boolean"},
      "pairs": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["pair", "dont_know_rounds", "resolved_round", "resolved_by"],
          "properties": {
            "pair": {"$ref": "#/definitions/pair"},
            "dont_know_rounds": {"type": "integer"},
            "resolved_round": {"type": ["integer", "null"]},
            "resolved_by": {"enum": ["sum", "product", "both", "never"]}
          }
        }
      },
      "witnesses": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["pair", "dont_know_rounds", "identified_round"],
          "properties": {"pair": {"$ref": "#/definitions/pair"}, "dont_know_rounds": {"type": "integer"}, "identified_round": {"type": "integer"}}
        }
      }
    },
    "definitions": {
      "pair": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
      "pairs": {"type": "array", "items": {"$ref": "#/definitions/pair"}}
    }
  },
  "fit_output": {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["model", "params", "log_likelihood", "evaluated", "population"],
    "properties": {
      "model": {"enum": ["level-k", "ch", "qch", "gch", "spike-qch"]},
      "params": {
        "type": "object",
        "required": ["tau", "lambda", "alpha", "epsilon"],
        "properties": {"tau": {"type": "number"}, "lambda": {"type": "number"}, "alpha": {"type": "number"}, "epsilon": {"type": "number"}}
      },
      "log_likelihood": {"type": "number"},
      "evaluated": {"type": "integer", "minimum": 1},
      "population": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
    }
  },
  "trajectory_csv": {
    "description": "CSV with header t,agent,action,payoff; reflexive runs append rank and forecast_1..forecast_n. Mixed-strategy actions are ';'-joined probabilities."
  }
}
)json";

}  // namespace

const json& schemas() {
  static const json parsed = json::parse(kSchemas);
  return parsed;
}

}  // namespace reflex::io
