#pragma once

#include "normsim/json_io.hpp"
#include "normsim/simulators.hpp"

#include <functional>

namespace normsim {

class ExtractionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// phi(g) = prod_j beta_j^g(j) between Z_c1 x ... x Z_cd and B. Generators of
// order 1 are dropped, so the decomposed group has no trivial factors.
class EncodingBridge {
 public:
  EncodingBridge(BlackBoxPtr B, DecompositionTable T);

  const BlackBoxGroup& group() const { return *B_; }
  const BlackBoxPtr& group_ptr() const { return B_; }
  const DecompositionTable& table() const { return T_; }
  const ElementaryGroup& decomposed() const { return Z_; }

  std::string encode(const RatVector& g) const;
  // Throws std::invalid_argument when b is not an element of B.
  RatVector decode(const std::string& b) const;

 private:
  BlackBoxPtr B_;
  DecompositionTable T_;
  std::vector<std::string> beta_;  // order > 1 only
  ElementaryGroup Z_;
  std::shared_ptr<std::unordered_map<std::string, RatVector>> logs_;
};

using DecompositionOracle = std::function<DecompositionTable(const BlackBoxGroup&)>;
// Greedy generators plus the exhaustive relation search.
DecompositionTable bruteforce_decomposition(const BlackBoxGroup& B);

using ClassicalMap = std::function<RatVector(const RatVector&)>;
using PhaseExponent = std::function<Rational(const RatVector&)>;

// Entry bound D: 2^n_out when given, and never below the largest finite
// characteristic of G.
Integer precision_bound(const std::optional<int>& n_out, const ElementaryGroup& G);
// Smallest prime above 2D.
Integer scaling_prime(const Integer& D);

// Raw matrix read off f on unit vectors, with T columns read from
// f(e_j / alpha). No validation.
RatMatrix extract_matrix_entries(const ClassicalMap& f, const ElementaryGroup& G, const Integer& D);
// Validated, then compared with f on all of G (small finite groups) or on
// random points. Throws InvalidNormalForm or ExtractionError.
MatrixRep extract_matrix_rep(const ClassicalMap& f, const ElementaryGroup& G, const Integer& D,
                             std::uint64_t seed = 1);

// M from q(x+y) - q(x) - q(y) on pairs of unit vectors (scaled by 1/alpha on
// T), v from the residual on unit vectors after subtracting q(0).
QuadraticForm extract_quadratic(const PhaseExponent& q, const ElementaryGroup& G, const Integer& D,
                                std::uint64_t seed = 1);

struct DeblackboxResult {
  NormalizerCircuit circuit;  // explicit registers, then the decomposed slot
  RatVector input;
  std::optional<EncodingBridge> bridge;
  json provenance;
};

// Rewrites every black-box gate into normal form over G x Z_B. Failures are
// rethrown as CircuitError carrying the gate index.
DeblackboxResult deblackbox_circuit(const CircuitRun& run, const DecompositionOracle& oracle = bruteforce_decomposition);

// Exact outcome distribution of the original run, keyed like dense_run's
// indices (explicit index * |B| + position in B.elements()), computed by
// deblackbox_circuit and coset_run.
std::map<std::uint64_t, Rational> structured_distribution(const CircuitRun& run,
                                                           const DecompositionOracle& oracle = bruteforce_decomposition,
                                                           std::uint64_t cap = default_dense_cap());

// Total variation between an exact distribution and dense probabilities.
double total_variation(const std::map<std::uint64_t, Rational>& p, const std::vector<double>& q);

}  // namespace normsim
