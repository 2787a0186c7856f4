#include "normsim/normal_form.hpp"
#include "normsim/linalg.hpp"

#include <random>
#include <sstream>

namespace normsim {

namespace {

using Kind = Factor::Kind;

std::string factor_name(const Factor& f) { return ElementaryGroup({f}).str(); }

std::string entry(const char* what, std::size_t i, std::size_t j) {
  std::ostringstream os;
  os << what << "(" << i << "," << j << ")";
  return os.str();
}

bool is_multiple(const Rational& q, const Integer& step) { return is_integer(q / Rational(step)); }

std::vector<Eigen::Index> registers_of(const ElementaryGroup& G, Kind k) {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < G.size(); ++i)
    if (G[i].kind == k) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

RatMatrix block(const RatMatrix& A, const std::vector<Eigen::Index>& rows, const std::vector<Eigen::Index>& cols) {
  RatMatrix B(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      B(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = A(rows[a], cols[b]);
  return B;
}

void place(RatMatrix& A, const std::vector<Eigen::Index>& rows, const std::vector<Eigen::Index>& cols,
           const RatMatrix& B) {
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      A(rows[a], cols[b]) = B(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
}

void check_entry(const Rational& a, const ElementaryGroup& G, std::size_t i, std::size_t j) {
  const Factor &to = G[i], &from = G[j];
  auto fail = [&](const std::string& rule) {
    throw InvalidNormalForm(entry("entry ", i, j) + " from " + factor_name(from) + " into " + factor_name(to) + " " +
                            rule);
  };
  if (from.kind == Kind::Cyclic && from.N == 1) return;  // acts on the zero coordinate only
  switch (to.kind) {
    case Kind::Z:
      if (from.kind == Kind::Z && !is_integer(a)) fail("must be an integer");
      if (from.kind != Kind::Z && a != 0) fail("must be 0");
      break;
    case Kind::Cyclic:
      if (from.kind == Kind::Z && !is_integer(a)) fail("must be an integer");
      if (from.kind == Kind::T && a != 0) fail("must be 0");
      if (from.kind == Kind::Cyclic) {
        Integer step = to.N / gcd(to.N, from.N);
        if (!is_multiple(a, step)) fail("must be a multiple of " + to_string(step));
      }
      break;
    case Kind::T:
      if (from.kind == Kind::Cyclic && !is_integer(a * Rational(from.N)))
        fail("must be a multiple of 1/" + to_string(from.N));
      if (from.kind == Kind::T && !is_integer(a)) fail("must be an integer");
      break;
  }
}

}  // namespace

RatMatrix reduce_matrix_rep(const RatMatrix& A, const ElementaryGroup& G) {
  RatMatrix R = A;
  for (std::size_t j = 0; j < G.size(); ++j)
    if (G[j].kind == Kind::Cyclic && G[j].N == 1) R.col(static_cast<Eigen::Index>(j)).setZero();
  for (std::size_t i = 0; i < G.size(); ++i) {
    if (G[i].kind == Kind::Z) continue;
    const Integer c = G.characteristic(i);
    for (std::size_t j = 0; j < G.size(); ++j) {
      if (G[j].kind == Kind::T) continue;
      auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      R(ii, jj) = mod(R(ii, jj), c);
    }
  }
  return R;
}

MatrixRep validate_matrix_rep(const RatMatrix& A0, const ElementaryGroup& G) {
  const auto m = static_cast<Eigen::Index>(G.size());
  if (A0.rows() != m || A0.cols() != m)
    throw InvalidNormalForm("matrix is " + std::to_string(A0.rows()) + "x" + std::to_string(A0.cols()) +
                            " but the group has " + std::to_string(m) + " factors");
  for (std::size_t i = 0; i < G.size(); ++i)
    for (std::size_t j = 0; j < G.size(); ++j)
      check_entry(A0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), G, i, j);
  const RatMatrix A = reduce_matrix_rep(A0, G);

  const auto zs = registers_of(G, Kind::Z), fs = registers_of(G, Kind::Cyclic), ts = registers_of(G, Kind::T);
  const auto nf = static_cast<Eigen::Index>(fs.size());

  IntMatrix A_ZZ = to_integer(block(A, zs, zs)), A_TT = to_integer(block(A, ts, ts));
  if (!is_unimodular(A_ZZ)) throw InvalidNormalForm("Z block is not unimodular, so the map is not bijective");
  if (!is_unimodular(A_TT)) throw InvalidNormalForm("T block is not unimodular, so the map is not bijective");
  IntMatrix X_ZZ = unimodular_inverse(A_ZZ), X_TT = unimodular_inverse(A_TT);

  IntVector N(nf);
  for (Eigen::Index a = 0; a < nf; ++a) N(a) = G[static_cast<std::size_t>(fs[a])].N;
  IntMatrix A_FF = to_integer(block(A, fs, fs));
  IntMatrix X_FF(nf, nf);
  for (Eigen::Index i = 0; i < nf; ++i) {
    GroupLinearSystem S{A_FF, IntVector::Unit(nf, i), N};
    auto sol = solve_group_system(S);
    if (!sol) throw InvalidNormalForm("finite block is not surjective, so the map is not bijective");
    for (Eigen::Index j = 0; j < nf; ++j) X_FF(j, i) = mod(sol->x0(j), N(j));
  }

  RatMatrix X = RatMatrix::Zero(m, m);
  RatMatrix xzz = to_rational(X_ZZ), xtt = to_rational(X_TT), xff = to_rational(X_FF);
  RatMatrix xfz = -xff * block(A, fs, zs) * xzz;
  RatMatrix xtf = -xtt * block(A, ts, fs) * xff;
  RatMatrix xtz = -xtt * (block(A, ts, zs) * xzz + block(A, ts, fs) * xfz);
  place(X, zs, zs, xzz);
  place(X, fs, fs, xff);
  place(X, ts, ts, xtt);
  place(X, fs, zs, xfz);
  place(X, ts, fs, xtf);
  place(X, ts, zs, xtz);
  X = reduce_matrix_rep(X, G);

  if (reduce_matrix_rep(A * X, G) != reduce_matrix_rep(RatMatrix::Identity(m, m), G))
    throw InvalidNormalForm("candidate inverse does not invert the matrix");
  return MatrixRep{G, A, X};
}

RatVector MatrixRep::apply(const RatVector& x) const { return reduce(A * x, group).coords; }

GroupElement MatrixRep::apply(const GroupElement& g) const {
  if (!(g.group == group)) throw std::invalid_argument("MatrixRep::apply: group mismatch");
  return reduce(A * g.coords, group);
}

MatrixRep MatrixRep::inverse() const { return MatrixRep{group, A_inv, A}; }

MatrixRep MatrixRep::identity(const ElementaryGroup& G) {
  auto m = static_cast<Eigen::Index>(G.size());
  RatMatrix I = reduce_matrix_rep(RatMatrix::Identity(m, m), G);
  return MatrixRep{G, I, I};
}

MatrixRep compose(const MatrixRep& b, const MatrixRep& a) {
  if (!(a.group == b.group)) throw std::invalid_argument("compose: group mismatch");
  return MatrixRep{a.group, reduce_matrix_rep(b.A * a.A, a.group), reduce_matrix_rep(a.A_inv * b.A_inv, a.group)};
}

Rational QuadraticForm::phase(const RatVector& g) const {
  Rational q = Rational(g.dot(M * g) + C.cast<Rational>().dot(g)) / 2 + v.dot(g);
  return frac(q);
}

Rational QuadraticForm::bilinear(const RatVector& g, const RatVector& h) const { return frac(g.dot(M * h)); }

QuadraticForm QuadraticForm::zero(const ElementaryGroup& G) {
  auto m = static_cast<Eigen::Index>(G.size());
  return QuadraticForm{G, RatMatrix::Zero(m, m), RatVector::Zero(m), IntVector::Zero(m)};
}

QuadraticForm validate_quadratic(const RatMatrix& M0, const RatVector& v0, const ElementaryGroup& G) {
  const auto m = static_cast<Eigen::Index>(G.size());
  if (M0.rows() != m || M0.cols() != m || v0.size() != m)
    throw InvalidNormalForm("quadratic form dimensions do not match a group with " + std::to_string(m) + " factors");
  if (M0 != M0.transpose()) throw InvalidNormalForm("M is not symmetric");
  for (std::size_t i = 0; i < G.size(); ++i)
    for (std::size_t j = i; j < G.size(); ++j) {
      const Rational& a = M0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const Factor &fi = G[i], &fj = G[j];
      if ((fi.kind == Kind::Cyclic && fi.N == 1) || (fj.kind == Kind::Cyclic && fj.N == 1)) continue;
      auto fail = [&](const std::string& rule) {
        throw InvalidNormalForm(entry("M", i, j) + " on " + factor_name(fi) + " x " + factor_name(fj) + " " + rule);
      };
      if (fi.kind == Kind::T || fj.kind == Kind::T) {
        bool with_z = fi.kind == Kind::Z || fj.kind == Kind::Z;
        if (with_z && !is_integer(a)) fail("must be an integer");
        if (!with_z && a != 0) fail("must be 0");
      } else if (fi.kind == Kind::Cyclic && fj.kind == Kind::Cyclic) {
        Integer g = gcd(fi.N, fj.N);
        if (!is_integer(a * Rational(g))) fail("must have denominator dividing " + to_string(g));
      } else if (fi.kind == Kind::Cyclic || fj.kind == Kind::Cyclic) {
        const Integer& n = fi.kind == Kind::Cyclic ? fi.N : fj.N;
        if (!is_integer(a * Rational(n))) fail("must have denominator dividing " + to_string(n));
      }
    }
  for (std::size_t i = 0; i < G.size(); ++i) {
    const Rational& a = v0(static_cast<Eigen::Index>(i));
    if (G[i].kind == Kind::Cyclic && G[i].N != 1 && !is_integer(a * Rational(G[i].N)))
      throw InvalidNormalForm("v(" + std::to_string(i) + ") must be a multiple of 1/" + to_string(G[i].N));
    if (G[i].kind == Kind::T && !is_integer(a))
      throw InvalidNormalForm("v(" + std::to_string(i) + ") on T must be an integer");
  }

  QuadraticForm Q{G, M0, v0, IntVector::Zero(m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    const Factor& fi = G[static_cast<std::size_t>(i)];
    if (fi.kind != Kind::Cyclic || fi.N != 1) continue;
    Q.M.row(i).setZero();
    Q.M.col(i).setZero();
    Q.v(i) = 0;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const Factor& fi = G[static_cast<std::size_t>(i)];
    if (fi.kind == Kind::T) continue;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (G[static_cast<std::size_t>(j)].kind == Kind::T) continue;
      Q.M(i, j) = frac(Q.M(i, j));
      Q.M(j, i) = Q.M(i, j);
    }
    // shifting M_ii by k changes q by k g (g + char)/2, which is g/2 mod 1
    // when k is odd and char is even
    Integer k = floor(Q.M(i, i));
    Q.M(i, i) -= Rational(k);
    if (mod(k, 2) == 1 && mod(fi.characteristic(), 2) == 0) Q.v(i) += Rational(1, 2);
    Q.v(i) = frac(Q.v(i));
  }
  for (Eigen::Index i = 0; i < m; ++i)
    Q.C(i) = numerator(Q.M(i, i) * Rational(G.characteristic(static_cast<std::size_t>(i))));
  return Q;
}

std::string check_quadratic_law(const QuadraticForm& Q, std::uint64_t pair_cap) {
  const ElementaryGroup& G = Q.group;
  auto check = [&](const RatVector& g, const RatVector& h) -> std::string {
    RatVector s = reduce(g + h, G).coords;
    if (frac(Q.phase(s) - Q.phase(g) - Q.phase(h) - Q.bilinear(g, h)) != 0)
      return "quadratic law fails at g = " + format_tuple(g) + ", h = " + format_tuple(h);
    return "";
  };
  if (G.is_finite() && G.order() * G.order() <= pair_cap) {
    auto els = enumerate(G);
    for (const auto& g : els)
      for (const auto& h : els)
        if (auto w = check(g.coords, h.coords); !w.empty()) return w;
    return "";
  }
  std::mt19937_64 rng(0x5eed);
  auto draw = [&]() {
    RatVector g(static_cast<Eigen::Index>(G.size()));
    for (std::size_t i = 0; i < G.size(); ++i) {
      auto ii = static_cast<Eigen::Index>(i);
      switch (G[i].kind) {
        case Kind::Z: g(ii) = static_cast<long>(rng() % 13) - 6; break;
        case Kind::T: {
          long q = static_cast<long>(rng() % 12) + 1;
          g(ii) = Rational(static_cast<long>(rng() % static_cast<unsigned long>(q)), q);
          break;
        }
        case Kind::Cyclic: g(ii) = mod(Integer(static_cast<long long>(rng() >> 1)), G[i].N); break;
      }
    }
    return g;
  };
  for (std::uint64_t t = 0; t < pair_cap; ++t)
    if (auto w = check(draw(), draw()); !w.empty()) return w;
  return "";
}

}  // namespace normsim
