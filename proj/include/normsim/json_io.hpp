#pragma once

#include "normsim/circuit.hpp"

#include <json.hpp>

namespace normsim {

using json = nlohmann::ordered_json;

// Integers become JSON numbers when they fit in 64 bits, anything else a
// decimal string; fractions are "p/q" strings. Readers accept all three.
json to_json(const Rational& q);
json to_json(const Integer& n);
json to_json(const RatMatrix& m);  // array of rows
json to_json(const RatVector& v);
json to_json(const IntMatrix& m);
json to_json(const IntVector& v);
Rational rational_from_json(const json& j);
RatMatrix matrix_from_json(const json& j);
RatVector vector_from_json(const json& j);

// {"type":"zn_star","N":15} and {"type":"ec","p":5,"a":1,"b":1}
json to_json(const BlackBoxGroup& B);
BlackBoxPtr blackbox_from_json(const json& j);

json to_json(const DecompositionTable& T);

class CircuitParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File layout:
//   {"group": "Z6 x Z6", "initial_basis": "Z6 x Z6",
//    "blackbox": {...}, "input": "(0, 0)", "bb_input": "1",
//    "gates": [{"qft": [0, 1]},
//              {"qft": {"registers": [0], "over": ["Z"]}},
//              {"automorphism": {"matrix": [[1, 0], [0, 1]]}},
//              {"quadratic": {"M": [["1/2", 0], [0, 0]], "v": [0, 0]}},
//              {"bb_automorphism": {"name": "modexp", "bases": ["3", "6"],
//                                   "controls": [0, 1], "n_out": 0}}]}
// "initial_basis" defaults to "group" and may differ from it only by Z <-> T
// flips. Normal-form gates are validated against the basis in force.
// Throws CircuitParseError for syntax and schema problems and CircuitError
// for gates that do not type-check.
CircuitRun parse_circuit(const std::string& text);
CircuitRun circuit_from_json(const json& j);
json to_json(const CircuitRun& run);  // throws for oracle-only black-box gates
json to_json(const Gate& g);

}  // namespace normsim
