#pragma once

#include "normsim/circuit.hpp"

#include <complex>
#include <map>
#include <random>

namespace normsim {

// ---- dense state vectors -------------------------------------------------

// Default dimension cap, overridden by the NORMSIM_CAP environment variable.
std::uint64_t default_dense_cap();

// Amplitudes indexed by element_index(group, x) * slot_size + slot position,
// the slot ordered as blackbox->elements().
struct DenseState {
  ElementaryGroup group;
  BlackBoxPtr blackbox;
  std::vector<std::string> slot;
  std::unordered_map<std::string, std::size_t> slot_index;
  Eigen::VectorXcd amp;

  std::size_t slot_size() const { return slot.empty() ? 1 : slot.size(); }
  std::uint64_t dimension() const { return static_cast<std::uint64_t>(amp.size()); }
};

struct Outcome {
  RatVector x;
  std::string b;  // empty without a slot
};

DenseState dense_basis_state(const DesignatedBasis& basis, const RatVector& input, const std::string& bb_input = {},
                             std::uint64_t cap = default_dense_cap());
// QFT over Z_N: |x> -> N^{-1/2} sum_y exp(2 pi i x y / N) |y>.
void dense_apply(DenseState& s, const Gate& g);
DenseState dense_run(const NormalizerCircuit& c, const RatVector& input, const std::string& bb_input = {},
                     std::uint64_t cap = default_dense_cap());

std::vector<double> dense_probabilities(const DenseState& s);
Outcome dense_outcome(const DenseState& s, std::uint64_t index);
std::string outcome_label(const Outcome& o);  // "(1, 3)" or "(1, 3) | 7"
// index -> count, from a seeded generator
std::map<std::uint64_t, std::uint64_t> dense_sample(const DenseState& s, std::uint64_t shots, std::mt19937_64& rng);
// CSV with header "outcome,count,probability"
std::string histogram_csv(const DenseState& s, const std::map<std::uint64_t, std::uint64_t>& hist);

// max |a - e^{i phi} b| minimised over a global phase fixed at the largest
// entry of a; infinity on dimension mismatch.
double distance_up_to_phase(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

// ---- coset states with quadratic phase -------------------------------------

// psi(x0 + S u) = exp(2 pi i f(u)) on Z^k, f(u) = u^T P u + L.u + c, zero off
// the coset x0 + <S>; finite groups only. Normalisation and global phase are
// not tracked. Kept compressed so that k never exceeds the group's rank.
struct CosetPhaseState {
  ElementaryGroup group;
  IntVector x0;
  IntMatrix S;
  RatMatrix P;
  RatVector L;
  Rational c;

  Rational phase(const IntVector& u) const;  // f(u) mod 1
  Integer subgroup_order() const;            // |<S>|
};

CosetPhaseState coset_basis_state(const ElementaryGroup& G, const RatVector& input);
// Throws std::invalid_argument for gates not in normal form.
void coset_apply(CosetPhaseState& s, const Gate& g);
CosetPhaseState coset_run(const NormalizerCircuit& c, const RatVector& input);

// Amplitudes in element_index order; throws std::logic_error if two
// parametrisations of one point disagree on the phase.
Eigen::VectorXcd coset_expand(const CosetPhaseState& s, std::uint64_t cap = default_dense_cap());
// Exact measurement distribution: uniform over the coset.
std::map<std::uint64_t, Rational> coset_distribution(const CosetPhaseState& s, std::uint64_t cap = default_dense_cap());
// One uniform point of the coset, canonical coordinates; no enumeration.
IntVector coset_sample(const CosetPhaseState& s, std::mt19937_64& rng);

// ---- hybrid order finding: the Dirichlet distribution ----------------------

// Number of x in [-M, M] with x = s mod r.
std::uint64_t comb_length(std::uint64_t r, std::uint64_t M, std::uint64_t s);

// |D_{L,r}(p)|^2 / L with D_{L,r}(p) = sum_{j<L} exp(2 pi i p r j).
double dirichlet_density(double p, std::uint64_t L, std::uint64_t r);

struct DirichletOptions {
  enum class Method { Exact, Grid } method = Method::Exact;
  std::size_t grid_points = 1u << 16;  // Grid only
};

// Measures the Fourier-transformed comb of [-M, M] with period r: the coset
// offset x mod r is drawn from the uniform x in [-M, M], then p from that
// comb's density. Exact uses rejection sampling against the envelope
// min(L, 1/(4 L u^2)); Grid inverts a tabulated CDF.
double dirichlet_sample(std::uint64_t r, std::uint64_t M, std::mt19937_64& rng, const DirichletOptions& opt = {});

// L* = 2 floor(M / r) and the resolution 1/(L* r).
std::uint64_t dirichlet_min_length(std::uint64_t r, std::uint64_t M);
double dirichlet_resolution(std::uint64_t r, std::uint64_t M);

// Probability, averaged over the offset, that p lands within delta/2 of some
// k/r (summed over all r peaks).
double dirichlet_peak_mass(std::uint64_t r, std::uint64_t M, double delta);
// Integral of the density over [0, 1), averaged over offsets.
double dirichlet_total_mass(std::uint64_t r, std::uint64_t M);

// Dense QFT over Z_D (D = 2M + 1, labels in [-M, M]) of each normalised comb
// against the continuous transform at k/D scaled by D^{-1/2}; returns the
// largest deviation over all offsets and k.
double discretization_check(std::uint64_t r, std::uint64_t M);

}  // namespace normsim
