#include "normsim/linalg.hpp"
#include "normsim/simulators.hpp"

#include <boost/random/uniform_int_distribution.hpp>

#include <cmath>
#include <numbers>

namespace normsim {

namespace {

// a.s + c
struct Affine {
  RatVector a;
  Rational c;
};

// s^T P s + L.s + c
struct Quad {
  RatMatrix P;
  RatVector L;
  Rational c;

  Quad& operator+=(const Quad& o) {
    P += o.P;
    L += o.L;
    c += o.c;
    return *this;
  }
};

Quad product(const Affine& x, const Affine& y) {
  Quad q;
  q.P = (x.a * y.a.transpose() + y.a * x.a.transpose()) / Rational(2);
  q.L = x.a * y.c + y.a * x.c;
  q.c = x.c * y.c;
  return q;
}

Quad scaled(Quad q, const Rational& k) {
  q.P *= k;
  q.L *= k;
  q.c *= k;
  return q;
}

// s = p0 + T w
Affine substitute(const Affine& f, const IntVector& p0, const IntMatrix& T) {
  return {to_rational(T).transpose() * f.a, f.a.dot(p0.cast<Rational>()) + f.c};
}

Quad substitute(const Quad& f, const IntVector& p0, const IntMatrix& T) {
  RatMatrix Tq = to_rational(T);
  RatVector p = p0.cast<Rational>();
  return {Tq.transpose() * f.P * Tq, Tq.transpose() * (Rational(2) * f.P * p + f.L), p.dot(f.P * p) + f.L.dot(p) + f.c};
}

IntVector moduli(const ElementaryGroup& G) { return G.characteristics(); }

void reduce_state(CosetPhaseState& s) {
  const IntVector N = moduli(s.group);
  for (Eigen::Index i = 0; i < N.size(); ++i) {
    s.x0(i) = mod(s.x0(i), N(i));
    for (Eigen::Index k = 0; k < s.S.cols(); ++k) s.S(i, k) = mod(s.S(i, k), N(i));
  }
  const Eigen::Index k = s.S.cols();
  for (Eigen::Index i = 0; i < k; ++i) {
    s.P(i, i) = frac(s.P(i, i));
    for (Eigen::Index j = i + 1; j < k; ++j) {
      // 2 P_ij u_i u_j is an integer whenever P_ij is a multiple of 1/2
      Rational h = frac(s.P(i, j) * Rational(2)) / Rational(2);
      s.P(i, j) = h;
      s.P(j, i) = h;
    }
    s.L(i) = frac(s.L(i));
  }
  s.c = frac(s.c);
}

// {u : S u = 0 mod N} as lattice basis columns
IntMatrix relation_lattice(const IntMatrix& S, const IntVector& N) {
  GroupLinearSystem sys{S, IntVector::Zero(S.rows()), N};
  auto sol = solve_group_system(sys);
  return sol->kernel;
}

// Drops parameter directions along which S u stays in the relation lattice.
void compress(CosetPhaseState& s) {
  const Eigen::Index k = s.S.cols();
  if (k == 0) return;
  IntMatrix Kb = relation_lattice(s.S, moduli(s.group));
  if (Kb.cols() != k) throw std::logic_error("coset: relation lattice is not full rank");
  auto snf = smith_normal_form(Kb);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < k; ++i)
    if (snf.D(i, i) != 1) keep.push_back(i);
  IntMatrix Uk(k, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t a = 0; a < keep.size(); ++a) Uk.col(static_cast<Eigen::Index>(a)) = snf.U.col(keep[a]);
  Quad f = substitute(Quad{s.P, s.L, s.c}, IntVector::Zero(k), Uk);
  s.S = s.S * Uk;
  s.P = f.P;
  s.L = f.L;
  s.c = f.c;
  reduce_state(s);
}

void apply_qft(CosetPhaseState& s, std::size_t j) {
  const ElementaryGroup& G = s.group;
  if (j >= G.size()) throw std::invalid_argument("qft register out of range");
  const IntVector N = moduli(G);
  const Integer Nj = N(static_cast<Eigen::Index>(j));
  const Eigen::Index n_reg = static_cast<Eigen::Index>(G.size()), k = s.S.cols();
  const auto jj = static_cast<Eigen::Index>(j);

  // K: parameter shifts that fix every other register
  IntMatrix S_o(n_reg - 1, k);
  IntVector N_o(n_reg - 1);
  for (Eigen::Index i = 0, r = 0; i < n_reg; ++i) {
    if (i == jj) continue;
    S_o.row(r) = s.S.row(i);
    N_o(r++) = N(i);
  }
  IntMatrix K = k == 0 ? IntMatrix(0, 0) : relation_lattice(S_o, N_o);

  // kappa with S_j kappa = d = gcd(S_j K, N_j) mod N_j
  Integer d = Nj;
  IntVector kappa = IntVector::Zero(k);
  for (Eigen::Index i = 0; i < K.cols(); ++i) {
    Integer v = mod(s.S.row(jj).dot(K.col(i)), Nj), x, y;
    Integer g = ext_gcd(d, v, x, y);
    kappa = x * kappa + y * K.col(i);
    d = g;
  }
  const Integer n = Nj / d;
  RatVector kq = kappa.cast<Rational>();
  const Rational a = kq.dot(s.P * kq);
  const RatVector beta = Rational(2) * s.P * kq;

  // variables w = (u, y)
  Affine b{RatVector::Zero(k + 1), s.L.dot(kq)};
  b.a.head(k) = beta;
  b.a(k) = Rational(d) / Rational(Nj);

  const Rational A_r = Rational(2) * a * Rational(n);
  if (!is_integer(A_r)) throw std::logic_error("coset: 2an is not an integer");
  const Integer A = numerator(A_r);
  const Integer g = A == 0 ? n : gcd(A, n);
  const Integer m = n / g;
  const Integer inv = m == 1 ? Integer(0) : mod_inverse(mod(A / g, m), m);

  // support: l = m b + a m^2 must be an integer
  Affine ell{b.a * Rational(m), b.c * Rational(m) + a * Rational(m * m)};
  Integer D = denominator(ell.c);
  for (Eigen::Index i = 0; i <= k; ++i) D = lcm(D, denominator(ell.a(i)));
  IntVector p0;
  IntMatrix T;
  if (D == 1) {
    p0 = IntVector::Zero(k + 1);
    T = IntMatrix::Identity(k + 1, k + 1);
  } else {
    GroupLinearSystem sys;
    sys.A = IntMatrix(1, k + 1);
    for (Eigen::Index i = 0; i <= k; ++i) sys.A(0, i) = numerator(ell.a(i) * Rational(D));
    sys.b = IntVector::Constant(1, numerator(-ell.c * Rational(D)));
    sys.moduli = IntVector::Constant(1, D);
    auto sol = solve_group_system(sys);
    if (!sol) throw std::logic_error("coset: QFT output has empty support");
    p0 = sol->x0;
    T = sol->kernel;
  }

  Affine ell_s = substitute(ell, p0, T);
  if (!is_integer(ell_s.c) || !is_integral(RatMatrix(ell_s.a))) throw std::logic_error("coset: support constraint");
  Affine tau{ell_s.a * Rational(-inv), ell_s.c * Rational(-inv)};

  Quad F{RatMatrix::Zero(k + 1, k + 1), RatVector::Zero(k + 1), s.c};
  F.P.topLeftCorner(k, k) = s.P;
  F.L.head(k) = s.L;
  Affine xj{RatVector::Zero(k + 1), Rational(s.x0(jj))};
  xj.a.head(k) = s.S.row(jj).transpose().cast<Rational>();
  Affine yN{RatVector::Zero(k + 1), 0};
  yN.a(k) = Rational(1) / Rational(Nj);
  F += product(xj, yN);

  Quad out = substitute(F, p0, T);
  out += scaled(product(tau, tau), a);
  out += product(substitute(b, p0, T), tau);

  const IntMatrix T_u = T.topRows(k);
  IntVector x0 = s.x0 + s.S * p0.head(k);
  x0(jj) = p0(k);
  IntMatrix S = s.S * T_u;
  S.row(jj) = T.row(k);
  s.x0 = x0;
  s.S = S;
  s.P = out.P;
  s.L = out.L;
  s.c = out.c;
  reduce_state(s);
  compress(s);
}

}  // namespace

Rational CosetPhaseState::phase(const IntVector& u) const {
  RatVector q = u.cast<Rational>();
  return frac(q.dot(P * q) + L.dot(q) + c);
}

Integer CosetPhaseState::subgroup_order() const {
  if (S.cols() == 0) return 1;
  auto snf = smith_normal_form(relation_lattice(S, moduli(group)));
  Integer n = 1;
  for (Eigen::Index i = 0; i < S.cols(); ++i) n *= snf.D(i, i);
  return n < 0 ? Integer(-n) : n;
}

CosetPhaseState coset_basis_state(const ElementaryGroup& G, const RatVector& input) {
  if (!G.is_finite()) throw std::invalid_argument("coset simulation needs finite registers only");
  CosetPhaseState s;
  s.group = G;
  RatVector x = reduce(input, G).coords;
  s.x0 = IntVector(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) s.x0(i) = numerator(x(i));
  s.S = IntMatrix(x.size(), 0);
  s.P = RatMatrix(0, 0);
  s.L = RatVector(0);
  s.c = 0;
  return s;
}

void coset_apply(CosetPhaseState& s, const Gate& g) {
  if (const auto* q = std::get_if<QFTGate>(&g)) {
    for (auto r : q->registers) apply_qft(s, r);
  } else if (const auto* a = std::get_if<AutomorphismGate>(&g)) {
    if (!(a->rep.group == s.group)) throw std::invalid_argument("automorphism group mismatch");
    IntMatrix A = to_integer(a->rep.A);
    s.x0 = A * s.x0;
    s.S = A * s.S;
    reduce_state(s);
  } else if (const auto* q = std::get_if<QuadraticGate>(&g)) {
    const QuadraticForm& Q = q->form;
    if (!(Q.group == s.group)) throw std::invalid_argument("quadratic form group mismatch");
    RatMatrix Sq = to_rational(s.S);
    RatVector x = s.x0.cast<Rational>();
    RatVector w = Q.C.cast<Rational>() / Rational(2) + Q.v;
    s.P += Sq.transpose() * Q.M * Sq / Rational(2);
    s.L += Sq.transpose() * (Q.M * x + w);
    s.c += Q.phase(x);
    reduce_state(s);
  } else {
    throw std::invalid_argument("coset simulation needs normal-form gates, got '" + gate_kind(g) + "'");
  }
}

CosetPhaseState coset_run(const NormalizerCircuit& c, const RatVector& input) {
  if (c.initial.has_slot()) throw std::invalid_argument("coset simulation needs a circuit without a black-box slot");
  validate_circuit(c);
  CosetPhaseState s = coset_basis_state(c.initial.labels, input);
  for (const auto& g : c.gates) coset_apply(s, g);
  return s;
}

namespace {

// Visits every point of the coset once with one parameter vector reaching it.
template <class Visit>
void walk_coset(const CosetPhaseState& s, std::uint64_t cap, Visit&& visit) {
  const ElementaryGroup& G = s.group;
  const std::uint64_t size = finite_order(G, cap);
  const IntVector N = moduli(G);
  const Eigen::Index k = s.S.cols();
  std::vector<IntVector> param(size);
  std::vector<bool> seen(size, false);
  auto index_of = [&](const IntVector& x) {
    RatVector r(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) r(i) = Rational(mod(x(i), N(i)));
    return element_index(G, r);
  };
  std::vector<std::pair<IntVector, IntVector>> stack{{s.x0, IntVector::Zero(k)}};
  seen[index_of(s.x0)] = true;
  param[index_of(s.x0)] = IntVector::Zero(k);
  while (!stack.empty()) {
    auto [x, u] = stack.back();
    stack.pop_back();
    visit(index_of(x), u);
    for (Eigen::Index i = 0; i < k; ++i) {
      IntVector x2 = x + s.S.col(i), u2 = u;
      u2(i) += 1;
      for (Eigen::Index r = 0; r < x2.size(); ++r) x2(r) = mod(x2(r), N(r));
      auto idx = index_of(x2);
      if (seen[idx]) {
        if (s.phase(param[idx]) != s.phase(u2)) throw std::logic_error("coset: inconsistent phase on one point");
        continue;
      }
      seen[idx] = true;
      param[idx] = u2;
      stack.emplace_back(x2, u2);
    }
  }
}

}  // namespace

Eigen::VectorXcd coset_expand(const CosetPhaseState& s, std::uint64_t cap) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(finite_order(s.group, cap)));
  const double norm = 1 / std::sqrt(to_double(Rational(s.subgroup_order())));
  walk_coset(s, cap, [&](std::uint64_t idx, const IntVector& u) {
    double t = 2 * std::numbers::pi * to_double(s.phase(u));
    out(static_cast<Eigen::Index>(idx)) = norm * std::complex<double>(std::cos(t), std::sin(t));
  });
  return out;
}

std::map<std::uint64_t, Rational> coset_distribution(const CosetPhaseState& s, std::uint64_t cap) {
  std::map<std::uint64_t, Rational> out;
  const Rational p = Rational(1) / Rational(s.subgroup_order());
  walk_coset(s, cap, [&](std::uint64_t idx, const IntVector&) { out[idx] = p; });
  return out;
}

IntVector coset_sample(const CosetPhaseState& s, std::mt19937_64& rng) {
  const IntVector N = moduli(s.group);
  IntVector x = s.x0;
  const Eigen::Index k = s.S.cols();
  if (k > 0) {
    // Z^k / Kb = Z^k / U D Z^k, so u = U w with w uniform in the box D
    auto snf = smith_normal_form(relation_lattice(s.S, N));
    IntVector w(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      Integer d = snf.D(i, i) < 0 ? Integer(-snf.D(i, i)) : snf.D(i, i);
      boost::random::uniform_int_distribution<Integer> pick(0, d - 1);
      w(i) = pick(rng);
    }
    x += s.S * (snf.U * w);
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = mod(x(i), N(i));
  return x;
}

}  // namespace normsim
