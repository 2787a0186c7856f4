#pragma once

#include "normsim/blackbox.hpp"
#include "normsim/normal_form.hpp"

#include <functional>
#include <optional>
#include <variant>

namespace normsim {

// Labels of the current basis for the explicit registers, plus an optional
// black-box slot appended after them. Only Z <-> T flips ever happen.
struct DesignatedBasis {
  ElementaryGroup labels;
  BlackBoxPtr blackbox;

  bool has_slot() const { return blackbox != nullptr; }
  bool operator==(const DesignatedBasis& o) const { return labels == o.labels && blackbox == o.blackbox; }
};

// `over` is optional; when given it names the label kind each register must
// currently carry (Z for the standard basis, T for the Fourier basis).
struct QFTGate {
  std::vector<std::size_t> registers;
  std::vector<Factor::Kind> over;
};

struct AutomorphismGate {
  MatrixRep rep;
};

struct QuadraticGate {
  QuadraticForm form;
};

// Classical map on the explicit registers, promised to be a continuous
// automorphism. n_out bounds the bit size of its outputs.
struct BlackBoxAutomorphismGate {
  std::string name;
  std::function<RatVector(const RatVector&)> f;
  std::optional<int> n_out;
};

// Phase exponent q with xi = exp(2 pi i q), promised quadratic.
struct BlackBoxQuadraticGate {
  std::string name;
  std::function<Rational(const RatVector&)> q;
  std::optional<int> n_out;
};

// (m, x) -> (m, prod_k bases[k]^m[controls[k]] * x) with x in the slot.
struct ModExpGate {
  std::vector<std::string> bases;
  std::vector<std::size_t> controls;
  std::optional<int> n_out;
};

using Gate = std::variant<QFTGate, AutomorphismGate, QuadraticGate, BlackBoxAutomorphismGate, BlackBoxQuadraticGate,
                          ModExpGate>;

std::string gate_kind(const Gate& g);
bool is_blackbox_gate(const Gate& g);

class CircuitError : public std::invalid_argument {
 public:
  CircuitError(std::size_t gate, const std::string& what)
      : std::invalid_argument("gate " + std::to_string(gate) + ": " + what), gate_(gate) {}
  std::size_t gate() const { return gate_; }

 private:
  std::size_t gate_;
};

// Throws std::invalid_argument on an illegal direction or register.
DesignatedBasis apply_qft_basis_update(const DesignatedBasis& basis, const QFTGate& qft);

struct NormalizerCircuit {
  DesignatedBasis initial;
  std::vector<Gate> gates;

  // trace()[t] is the basis in force before gate t; the last entry is the
  // final measurement basis.
  std::vector<DesignatedBasis> trace() const;
  DesignatedBasis final_basis() const { return trace().back(); }
  std::size_t qft_count() const;
  bool has_blackbox_gates() const;
};

// Well-typedness of every gate against the basis in force at its position.
void validate_circuit(const NormalizerCircuit& c);

// Circuit plus the basis-state input it is run on.
struct CircuitRun {
  NormalizerCircuit circuit;
  RatVector input;       // explicit registers
  std::string bb_input;  // slot element, empty without a slot
};

struct ModExpCheck {
  bool normalizable = false;
  Integer order;
  ElementaryGroup group;         // Z_M x (decomposed B)
  DecompositionTable table;      // coordinates used for B
  std::optional<MatrixRep> rep;  // set when normalizable
};

// (m, x) -> (m, a^m x) on Z_M x B is an automorphism iff |a| divides M. In
// that case the map is written over Z_M x Z_c1 x ... through a brute-force
// decomposition of B and validated.
ModExpCheck check_modexp_normalizable(const Integer& M, const BlackBoxGroup& B, const std::string& a,
                                      std::uint64_t cap = 1u << 20);

}  // namespace normsim
