#pragma once

#include <map>
#include <string>

namespace nctest::fixtures {

/// Qubit X/Z-plane fragment, quantum form: the four eigenstate projectors of
/// X and Z as both states and effects, plus the identity and zero effects.
inline const char* kQubitXZQuantum = R"json({
  "format": "quantum",
  "quantum": {
    "dimension": 2,
    "states": [
      [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
      [[[0, 0], [0, 0]], [[0, 0], [1, 0]]],
      [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]],
      [[[0.5, 0], [-0.5, 0]], [[-0.5, 0], [0.5, 0]]]
    ],
    "effects": [
      [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
      [[[0, 0], [0, 0]], [[0, 0], [1, 0]]],
      [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]],
      [[[0.5, 0], [-0.5, 0]], [[-0.5, 0], [0.5, 0]]],
      [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
      [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]
    ]
  }
})json";

/// The same fragment in rational GPT coordinates over the operator set
/// {identity, sigma_x, sigma_z}, scaled so that the dot product of a state
/// row with an effect row equals the born-rule value.
inline const char* kQubitXZGpt = R"json({
  "format": "gpt",
  "gpt": {
    "states": [
      ["1", "0", "1"],
      ["1", "0", "-1"],
      ["1", "1", "0"],
      ["1", "-1", "0"]
    ],
    "effects": [
      ["1/2", "0", "1/2"],
      ["1/2", "0", "-1/2"],
      ["1/2", "1/2", "0"],
      ["1/2", "-1/2", "0"],
      ["1", "0", "0"],
      ["0", "0", "0"]
    ],
    "unit_effect": ["1", "0", "0"],
    "max_mixed_state": ["1", "0", "0"]
  }
})json";

/// Four computational-basis states of a four-level system with the four
/// neighbouring two-outcome coarse-grainings, in rational GPT coordinates
/// over a diagonal operator basis. States span a 4-dimensional space, effects
/// only a 3-dimensional one.
inline const char* kDiagonalQuditGpt = R"json({
  "format": "gpt",
  "gpt": {
    "states": [
      ["1", "1", "-1", "1"],
      ["1", "1", "1", "-1"],
      ["1", "-1", "1", "1"],
      ["1", "-1", "-1", "-1"]
    ],
    "effects": [
      ["1/2", "1/2", "0", "0"],
      ["1/2", "0", "1/2", "0"],
      ["1/2", "-1/2", "0", "0"],
      ["1/2", "0", "-1/2", "0"],
      ["1", "0", "0", "0"],
      ["0", "0", "0", "0"]
    ],
    "unit_effect": ["1", "0", "0", "0"],
    "max_mixed_state": ["1", "0", "0", "0"]
  }
})json";

/// A square-state-space (boxworld) system: four extremal states and the four
/// extremal nontrivial effects plus unit and zero. Not classically
/// explainable; depolarizing robustness 1/2.
inline const char* kBoxworldGpt = R"json({
  "format": "gpt",
  "gpt": {
    "states": [
      ["1", "1", "0"],
      ["1", "0", "1"],
      ["1", "-1", "0"],
      ["1", "0", "-1"]
    ],
    "effects": [
      ["1/2", "-1/2", "-1/2"],
      ["1/2", "1/2", "-1/2"],
      ["1/2", "1/2", "1/2"],
      ["1/2", "-1/2", "1/2"],
      ["1", "0", "0"],
      ["0", "0", "0"]
    ],
    "unit_effect": ["1", "0", "0"],
    "max_mixed_state": ["1", "0", "0"]
  }
})json";

inline const std::map<std::string, const char*>& all()
{
    static const std::map<std::string, const char*> m = {
        {"qubit-xz-quantum", kQubitXZQuantum},
        {"qubit-xz-gpt", kQubitXZGpt},
        {"diagonal-qudit-gpt", kDiagonalQuditGpt},
        {"boxworld-gpt", kBoxworldGpt},
    };
    return m;
}

}  // namespace nctest::fixtures
