#pragma once

#include "normsim/circuit.hpp"

#include <random>

namespace normsim {

// Seeded generators for finite registers, used by the property tests and the
// acceptance corpus.

// Up to max_factors cyclic factors with moduli in [1, max_modulus] and order
// at most max_order.
ElementaryGroup random_finite_group(std::mt19937_64& rng, std::uint64_t max_order, int max_factors = 3,
                                    int max_modulus = 12);

// Product of random unit scalings, shears x_i += c x_j and swaps of equal
// registers; valid by construction.
MatrixRep random_matrix_rep(const ElementaryGroup& G, std::mt19937_64& rng);

QuadraticForm random_quadratic_form(const ElementaryGroup& G, std::mt19937_64& rng);

// QFTs on random register subsets, automorphisms and quadratic phases in
// equal proportion.
NormalizerCircuit random_circuit(const ElementaryGroup& G, std::size_t gates, std::mt19937_64& rng);

}  // namespace normsim
