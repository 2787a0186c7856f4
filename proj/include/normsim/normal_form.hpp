#pragma once

#include "normsim/abelian.hpp"

#include <stdexcept>
#include <string>

namespace normsim {

class InvalidNormalForm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Rational matrix of a continuous automorphism of G; row i is the target
// coordinate, column j the source. Stored reduced: Z_N rows mod N on their
// Z and Z_N columns, T rows mod 1 on their Z and Z_N columns. A_TT is kept
// exact since it is only defined as an integer block.
struct MatrixRep {
  ElementaryGroup group;
  RatMatrix A;
  RatMatrix A_inv;

  RatVector apply(const RatVector& x) const;  // canonical coordinates
  GroupElement apply(const GroupElement& g) const;
  MatrixRep inverse() const;
  static MatrixRep identity(const ElementaryGroup& G);
};

// Accepts exactly the matrices that meet the block and divisibility
// conditions and have an inverse representation; otherwise throws
// InvalidNormalForm naming the first violated condition.
MatrixRep validate_matrix_rep(const RatMatrix& A, const ElementaryGroup& G);

// b after a
MatrixRep compose(const MatrixRep& b, const MatrixRep& a);

// Entrywise reduction used for the stored form; no validity checks.
RatMatrix reduce_matrix_rep(const RatMatrix& A, const ElementaryGroup& G);

// xi(g) = exp(2 pi i q(g)) with q(g) = (g^T M g + C^T g)/2 + v^T g.
struct QuadraticForm {
  ElementaryGroup group;
  RatMatrix M;  // symmetric, G -> G^dual
  RatVector v;  // element of G^dual
  IntVector C;  // C(i) = M(i,i) * char(i)

  Rational phase(const RatVector& g) const;  // in [0, 1)
  Rational bilinear(const RatVector& g, const RatVector& h) const;  // g^T M h mod 1
  static QuadraticForm zero(const ElementaryGroup& G);
};

// Reduces off-integer-block entries into [0, 1) and moves the resulting
// diagonal shift into v, so equal functions get equal data more often.
QuadraticForm validate_quadratic(const RatMatrix& M, const RatVector& v, const ElementaryGroup& G);

// Checks xi(g+h) = xi(g) xi(h) exp(2 pi i g^T M h) on all pairs of a finite
// group when |G|^2 <= pair_cap, else on pair_cap pseudo-random pairs (small
// integers on Z, small denominators on T). Returns "" or a witness.
std::string check_quadratic_law(const QuadraticForm& Q, std::uint64_t pair_cap = 1u << 16);

}  // namespace normsim
