#pragma once

#include "normsim/scalar.hpp"

#include <optional>
#include <vector>

namespace normsim {

// A = U * D * V with U, V unimodular and D diagonal, d_1 | d_2 | ... .
// The inverses of U and V are tracked alongside so callers never invert.
template <class Scalar>
struct SmithDecomposition {
  Mat<Scalar> U, D, V;
  Mat<Scalar> U_inv, V_inv;
  Eigen::Index rank = 0;

  Vec<Scalar> invariants() const;  // the first min(m, n) diagonal entries
};

template <class Scalar>
SmithDecomposition<Scalar> smith_normal_form(const Mat<Scalar>& A);

// Row-style Hermite normal form of the lattice spanned by the rows of A:
// upper echelon, positive pivots, entries above each pivot in [0, pivot).
// Zero rows are dropped.
template <class Scalar>
Mat<Scalar> hermite_normal_form(const Mat<Scalar>& A);

// A x = b row-wise modulo `moduli` (0 means an equation over Z), x in Z^n.
struct GroupLinearSystem {
  IntMatrix A;
  IntVector b;
  IntVector moduli;
};

struct GroupSolution {
  IntVector x0;
  IntMatrix kernel;  // generators as columns, Hermite reduced
};

// std::nullopt means infeasible.
std::optional<GroupSolution> solve_group_system(const GroupLinearSystem& S);
bool satisfies(const GroupLinearSystem& S, const IntVector& x);

template <class Scalar>
Mat<Rational> integral_pseudo_inverse(const Mat<Scalar>& A);

struct Fraction {
  Integer k, r;
  bool operator==(const Fraction&) const = default;
};

// Returns k/r in lowest terms with 0 <= k < r <= r_max and
// |p - k/r| <= 1/(2 r_max^2), or std::nullopt when no such fraction exists.
std::optional<Fraction> continued_fraction_reconstruct(const Rational& p, const Integer& r_max);

// Unimodular iff square with all invariants equal to one.
bool is_unimodular(const IntMatrix& A);
IntMatrix unimodular_inverse(const IntMatrix& A);  // throws if not unimodular

extern template struct SmithDecomposition<Integer>;
extern template SmithDecomposition<Integer> smith_normal_form<Integer>(const IntMatrix&);
extern template IntMatrix hermite_normal_form<Integer>(const IntMatrix&);
extern template RatMatrix integral_pseudo_inverse<Integer>(const IntMatrix&);

}  // namespace normsim
