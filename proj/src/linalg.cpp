#include "normsim/linalg.hpp"

#include <stdexcept>
#include <utility>

namespace normsim {

namespace {

template <class Scalar>
Scalar abs_of(const Scalar& x) {
  return x < 0 ? Scalar(-x) : x;
}

// Keeps A = U D V while D is driven to Smith form by elementary operations.
template <class Scalar>
struct SmithWorker {
  SmithDecomposition<Scalar>& s;
  Eigen::Index m, n;

  void swap_rows(Eigen::Index i, Eigen::Index j) {
    if (i == j) return;
    s.D.row(i).swap(s.D.row(j));
    s.U.col(i).swap(s.U.col(j));
    s.U_inv.row(i).swap(s.U_inv.row(j));
  }
  void swap_cols(Eigen::Index i, Eigen::Index j) {
    if (i == j) return;
    s.D.col(i).swap(s.D.col(j));
    s.V.row(i).swap(s.V.row(j));
    s.V_inv.col(i).swap(s.V_inv.col(j));
  }
  // row_i += c * row_j
  void add_row(Eigen::Index i, Eigen::Index j, const Scalar& c) {
    if (c == 0) return;
    s.D.row(i) += c * s.D.row(j);
    s.U.col(j) -= c * s.U.col(i);
    s.U_inv.row(i) += c * s.U_inv.row(j);
  }
  // col_i += c * col_j
  void add_col(Eigen::Index i, Eigen::Index j, const Scalar& c) {
    if (c == 0) return;
    s.D.col(i) += c * s.D.col(j);
    s.V.row(j) -= c * s.V.row(i);
    s.V_inv.col(i) += c * s.V_inv.col(j);
  }
  void negate_row(Eigen::Index i) {
    s.D.row(i) = -s.D.row(i);
    s.U.col(i) = -s.U.col(i);
    s.U_inv.row(i) = -s.U_inv.row(i);
  }

  bool find_pivot(Eigen::Index t, Eigen::Index& pi, Eigen::Index& pj) const {
    bool found = false;
    Scalar best = 0;
    for (Eigen::Index i = t; i < m; ++i)
      for (Eigen::Index j = t; j < n; ++j) {
        const Scalar& v = s.D(i, j);
        if (v != 0 && (!found || abs_of(v) < best)) {
          best = abs_of(v);
          pi = i;
          pj = j;
          found = true;
        }
      }
    return found;
  }

  void run() {
    for (Eigen::Index t = 0; t < std::min(m, n); ++t) {
      Eigen::Index pi = t, pj = t;
      if (!find_pivot(t, pi, pj)) break;
      swap_rows(t, pi);
      swap_cols(t, pj);
      for (;;) {
        bool clean = true;
        for (Eigen::Index i = t + 1; i < m; ++i) {
          if (s.D(i, t) == 0) continue;
          add_row(i, t, Scalar(-(s.D(i, t) / s.D(t, t))));
          if (s.D(i, t) != 0) clean = false;
        }
        for (Eigen::Index j = t + 1; j < n; ++j) {
          if (s.D(t, j) == 0) continue;
          add_col(j, t, Scalar(-(s.D(t, j) / s.D(t, t))));
          if (s.D(t, j) != 0) clean = false;
        }
        if (!clean) {
          find_pivot(t, pi, pj);
          swap_rows(t, pi);
          swap_cols(t, pj);
          continue;
        }
        // divisibility: fold an offending row into the pivot row and retry
        bool divides = true;
        for (Eigen::Index i = t + 1; i < m && divides; ++i)
          for (Eigen::Index j = t + 1; j < n; ++j)
            if (s.D(i, j) % s.D(t, t) != 0) {
              add_row(t, i, Scalar(1));
              divides = false;
              break;
            }
        if (divides) break;
      }
      if (s.D(t, t) < 0) negate_row(t);
      s.rank = t + 1;
    }
  }
};

}  // namespace

template <class Scalar>
Vec<Scalar> SmithDecomposition<Scalar>::invariants() const {
  Eigen::Index k = std::min(D.rows(), D.cols());
  Vec<Scalar> d(k);
  for (Eigen::Index i = 0; i < k; ++i) d(i) = D(i, i);
  return d;
}

template <class Scalar>
SmithDecomposition<Scalar> smith_normal_form(const Mat<Scalar>& A) {
  SmithDecomposition<Scalar> s;
  Eigen::Index m = A.rows(), n = A.cols();
  s.D = A;
  s.U = Mat<Scalar>::Identity(m, m);
  s.U_inv = Mat<Scalar>::Identity(m, m);
  s.V = Mat<Scalar>::Identity(n, n);
  s.V_inv = Mat<Scalar>::Identity(n, n);
  SmithWorker<Scalar>{s, m, n}.run();
  return s;
}

template <class Scalar>
Mat<Scalar> hermite_normal_form(const Mat<Scalar>& A) {
  Mat<Scalar> H = A;
  Eigen::Index m = H.rows(), n = H.cols();
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < n && r < m; ++c) {
    // Euclid down column c among rows r..m-1
    for (;;) {
      Eigen::Index best = -1;
      for (Eigen::Index i = r; i < m; ++i)
        if (H(i, c) != 0 && (best < 0 || abs_of(H(i, c)) < abs_of(H(best, c)))) best = i;
      if (best < 0) break;
      H.row(r).swap(H.row(best));
      bool done = true;
      for (Eigen::Index i = r + 1; i < m; ++i) {
        if (H(i, c) == 0) continue;
        Scalar q = H(i, c) / H(r, c);
        H.row(i) -= q * H.row(r);
        if (H(i, c) != 0) done = false;
      }
      if (done) break;
    }
    if (H(r, c) == 0) continue;
    if (H(r, c) < 0) H.row(r) = -H.row(r);
    for (Eigen::Index i = 0; i < r; ++i) {
      Scalar q = H(i, c) / H(r, c);
      if ((H(i, c) % H(r, c)) < 0) q -= 1;
      H.row(i) -= q * H.row(r);
    }
    ++r;
  }
  return H.topRows(r);
}

template <class Scalar>
Mat<Rational> integral_pseudo_inverse(const Mat<Scalar>& A) {
  auto s = smith_normal_form(A);
  Mat<Rational> Dplus = Mat<Rational>::Zero(A.cols(), A.rows());
  for (Eigen::Index i = 0; i < s.rank; ++i) Dplus(i, i) = Rational(1) / Rational(s.D(i, i));
  return to_rational(s.V_inv) * Dplus * to_rational(s.U_inv);
}

template struct SmithDecomposition<Integer>;
template SmithDecomposition<Integer> smith_normal_form<Integer>(const IntMatrix&);
template IntMatrix hermite_normal_form<Integer>(const IntMatrix&);
template RatMatrix integral_pseudo_inverse<Integer>(const IntMatrix&);

std::optional<GroupSolution> solve_group_system(const GroupLinearSystem& S) {
  const Eigen::Index m = S.A.rows(), n = S.A.cols();
  if (S.b.size() != m || S.moduli.size() != m) throw std::invalid_argument("solve_group_system: dimension mismatch");
  std::vector<Eigen::Index> finite_rows;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (S.moduli(i) < 0) throw std::invalid_argument("solve_group_system: negative modulus");
    if (S.moduli(i) != 0) finite_rows.push_back(i);
  }
  const Eigen::Index extra = static_cast<Eigen::Index>(finite_rows.size());
  IntMatrix H = IntMatrix::Zero(m, n + extra);
  H.leftCols(n) = S.A;
  for (Eigen::Index k = 0; k < extra; ++k) H(finite_rows[k], n + k) = S.moduli(finite_rows[k]);

  auto s = smith_normal_form(H);
  IntVector c = s.U_inv * S.b;
  IntVector w = IntVector::Zero(n + extra);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (i < s.rank) {
      if (c(i) % s.D(i, i) != 0) return std::nullopt;
      w(i) = c(i) / s.D(i, i);
    } else if (c(i) != 0) {
      return std::nullopt;
    }
  }
  IntVector z = s.V_inv * w;
  GroupSolution out;
  out.x0 = z.head(n);
  IntMatrix gens = s.V_inv.block(0, s.rank, n, n + extra - s.rank);
  IntMatrix hnf = hermite_normal_form<Integer>(gens.transpose());
  out.kernel = hnf.transpose();
  // canonical particular solution: reduce against the Hermite basis
  for (Eigen::Index k = 0; k < hnf.rows(); ++k) {
    Eigen::Index p = 0;
    while (hnf(k, p) == 0) ++p;
    Integer q = floor_div(out.x0(p), hnf(k, p));
    out.x0 -= q * hnf.row(k).transpose();
  }
  return out;
}

bool satisfies(const GroupLinearSystem& S, const IntVector& x) {
  IntVector r = S.A * x - S.b;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (S.moduli(i) == 0 ? r(i) != 0 : mod(r(i), S.moduli(i)) != 0) return false;
  }
  return true;
}

std::optional<Fraction> continued_fraction_reconstruct(const Rational& p, const Integer& r_max) {
  if (r_max < 1) throw std::invalid_argument("continued_fraction_reconstruct: r_max must be >= 1");
  if (p < 0 || p >= 1) throw std::invalid_argument("continued_fraction_reconstruct: p must lie in [0,1)");
  // Best approximation with denominator <= r_max via convergents and the final
  // semiconvergent.
  Integer h_prev2 = 0, h_prev = 1, k_prev2 = 1, k_prev = 0;
  Rational x = p;
  Integer best_h = 0, best_k = 1;
  for (;;) {
    Integer a = floor(x);
    Integer h = a * h_prev + h_prev2, k = a * k_prev + k_prev2;
    if (k > r_max) {
      Integer t = (r_max - k_prev2) / k_prev;
      Integer sh = h_prev2 + t * h_prev, sk = k_prev2 + t * k_prev;
      Rational d_semi = abs(p - Rational(sh) / Rational(sk));
      Rational d_conv = abs(p - Rational(h_prev) / Rational(k_prev));
      if (t > 0 && d_semi < d_conv) {
        best_h = sh;
        best_k = sk;
      } else {
        best_h = h_prev;
        best_k = k_prev;
      }
      break;
    }
    best_h = h;
    best_k = k;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    Rational f = x - Rational(a);
    if (f == 0) break;
    x = Rational(1) / f;
  }
  if (best_h >= best_k) {  // 1/1 lies outside [0,1); the nearest admissible fraction is (r_max-1)/r_max
    best_h = r_max - 1;
    best_k = r_max;
  }
  Rational bound = Rational(1) / Rational(2 * r_max * r_max);
  if (abs(p - Rational(best_h) / Rational(best_k)) > bound) return std::nullopt;
  Integer g = gcd(best_h, best_k);
  if (g == 0) g = 1;
  return Fraction{best_h / g, best_k / g};
}

bool is_unimodular(const IntMatrix& A) {
  if (A.rows() != A.cols()) return false;
  auto s = smith_normal_form(A);
  if (s.rank != A.rows()) return false;
  for (Eigen::Index i = 0; i < s.rank; ++i)
    if (s.D(i, i) != 1) return false;
  return true;
}

IntMatrix unimodular_inverse(const IntMatrix& A) {
  if (A.rows() != A.cols()) throw std::domain_error("unimodular_inverse: matrix is not square");
  auto s = smith_normal_form(A);
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    if (i >= s.rank || s.D(i, i) != 1) throw std::domain_error("unimodular_inverse: matrix is not unimodular");
  return s.V_inv * s.U_inv;
}

}  // namespace normsim
