#pragma once

// Independent brute-force references used only by the tests. None of these
// call into the library routines they are used to check.

#include "normsim/linalg.hpp"

#include <set>
#include <vector>

namespace oracle {

using normsim::Integer;
using normsim::IntMatrix;
using normsim::IntVector;
using normsim::Rational;

// Fraction-free Gaussian elimination (Bareiss).
inline Integer determinant(IntMatrix M) {
  const Eigen::Index n = M.rows();
  if (n == 0) return 1;
  Integer sign = 1, prev = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (M(k, k) == 0) {
      Eigen::Index p = k + 1;
      while (p < n && M(p, k) == 0) ++p;
      if (p == n) return 0;
      M.row(k).swap(M.row(p));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j) M(i, j) = (M(i, j) * M(k, k) - M(i, k) * M(k, j)) / prev;
    prev = M(k, k);
  }
  return sign * M(n - 1, n - 1);
}

inline void subsets(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

// Invariant factors from determinantal divisors: d_k = gcd of all k x k minors.
inline IntVector smith_invariants(const IntMatrix& A) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  const int r = std::min(m, n);
  IntVector out(r);
  Integer prev = 1;
  for (int k = 1; k <= r; ++k) {
    std::vector<std::vector<int>> rs, cs;
    std::vector<int> cur;
    subsets(m, k, 0, cur, rs);
    subsets(n, k, 0, cur, cs);
    Integer g = 0;
    for (const auto& ri : rs)
      for (const auto& ci : cs) {
        IntMatrix sub(k, k);
        for (int a = 0; a < k; ++a)
          for (int b = 0; b < k; ++b) sub(a, b) = A(ri[a], ci[b]);
        g = normsim::gcd(g, determinant(sub));
      }
    if (g == 0 || prev == 0) {
      out(k - 1) = 0;
      prev = 0;
    } else {
      out(k - 1) = g / prev;
      prev = g;
    }
  }
  return out;
}

using Point = std::vector<int>;

inline std::set<Point> brute_solutions(const normsim::GroupLinearSystem& S, int L) {
  const int n = static_cast<int>(S.A.cols());
  std::set<Point> out;
  Point x(n, 0);
  for (;;) {
    bool ok = true;
    for (Eigen::Index i = 0; i < S.A.rows() && ok; ++i) {
      Integer r = -S.b(i);
      for (int j = 0; j < n; ++j) r += S.A(i, j) * x[j];
      if (S.moduli(i) == 0 ? r != 0 : r % S.moduli(i) != 0) ok = false;
    }
    if (ok) out.insert(x);
    int j = n - 1;
    while (j >= 0 && ++x[j] == L) x[j--] = 0;
    if (j < 0) break;
  }
  return out;
}

inline std::set<Point> span_mod(const IntVector& x0, const IntMatrix& K, int L) {
  auto norm = [L](const IntVector& v) {
    Point p(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) p[i] = normsim::mod(v(i), L).convert_to<int>();
    return p;
  };
  std::set<Point> seen{norm(x0)};
  std::vector<Point> frontier{norm(x0)};
  while (!frontier.empty()) {
    Point p = frontier.back();
    frontier.pop_back();
    for (Eigen::Index k = 0; k < K.cols(); ++k) {
      IntVector v(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) v(i) = p[i] + K(i, k);
      Point q = norm(v);
      if (seen.insert(q).second) frontier.push_back(q);
    }
  }
  return seen;
}

inline Rational nearest_fraction(const Rational& p, int r_max) {
  Rational best = 0, best_d = 2;
  for (int q = 1; q <= r_max; ++q)
    for (int k = 0; k < q; ++k) {
      Rational d = abs(p - Rational(k, q));
      if (d < best_d) {
        best_d = d;
        best = Rational(k, q);
      }
    }
  return best;
}

}  // namespace oracle
