#include "normsim/random_circuits.hpp"

namespace normsim {

namespace {

long pick(std::mt19937_64& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

}  // namespace

ElementaryGroup random_finite_group(std::mt19937_64& rng, std::uint64_t max_order, int max_factors, int max_modulus) {
  for (;;) {
    const long k = pick(rng, 1, max_factors);
    std::vector<Integer> n;
    std::uint64_t order = 1;
    for (long i = 0; i < k; ++i) {
      const long N = pick(rng, 1, max_modulus);
      n.push_back(N);
      order *= static_cast<std::uint64_t>(N);
    }
    if (order <= max_order) return ElementaryGroup::cyclic(n);
  }
}

MatrixRep random_matrix_rep(const ElementaryGroup& G, std::mt19937_64& rng) {
  if (!G.is_finite()) throw std::invalid_argument("random_matrix_rep: finite registers only");
  const auto m = static_cast<Eigen::Index>(G.size());
  const IntVector N = G.characteristics();
  IntMatrix A = IntMatrix::Identity(m, m);
  if (m == 0) return validate_matrix_rep(to_rational(A), G);
  for (long step = 0, steps = 3 * m; step < steps; ++step) {
    IntMatrix E = IntMatrix::Identity(m, m);
    const Eigen::Index i = pick(rng, 0, m - 1), j = pick(rng, 0, m - 1);
    switch (pick(rng, 0, 2)) {
      case 0: {
        Integer u = 1;
        if (N(i) > 2)
          do u = pick(rng, 1, to_i64(N(i)) - 1);
          while (gcd(u, N(i)) != 1);
        E(i, i) = u;
        break;
      }
      case 1:
        if (i != j) E(i, j) = N(i) / gcd(N(i), N(j)) * pick(rng, 1, 5);
        break;
      default:
        if (i != j && N(i) == N(j)) {
          E(i, i) = E(j, j) = 0;
          E(i, j) = E(j, i) = 1;
        }
    }
    A = E * A;
  }
  return validate_matrix_rep(reduce_matrix_rep(to_rational(A), G), G);
}

QuadraticForm random_quadratic_form(const ElementaryGroup& G, std::mt19937_64& rng) {
  if (!G.is_finite()) throw std::invalid_argument("random_quadratic_form: finite registers only");
  const auto m = static_cast<Eigen::Index>(G.size());
  const IntVector N = G.characteristics();
  RatMatrix M(m, m);
  RatVector v(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    v(i) = Rational(pick(rng, 0, 2 * to_i64(N(i)) - 1), N(i));
    for (Eigen::Index j = i; j < m; ++j) {
      Integer g = gcd(N(i), N(j));
      M(i, j) = M(j, i) = Rational(pick(rng, 0, 2 * to_i64(g) - 1), g);
    }
  }
  return validate_quadratic(M, v, G);
}

NormalizerCircuit random_circuit(const ElementaryGroup& G, std::size_t gates, std::mt19937_64& rng) {
  NormalizerCircuit c;
  c.initial = {G, nullptr};
  for (std::size_t t = 0; t < gates; ++t) {
    switch (pick(rng, 0, 2)) {
      case 0: {
        QFTGate q;
        for (std::size_t r = 0; r < G.size(); ++r)
          if (rng() % 2) q.registers.push_back(r);
        if (q.registers.empty() && G.size() > 0) q.registers.push_back(static_cast<std::size_t>(pick(rng, 0, static_cast<long>(G.size()) - 1)));
        c.gates.push_back(q);
        break;
      }
      case 1:
        c.gates.push_back(AutomorphismGate{random_matrix_rep(G, rng)});
        break;
      default:
        c.gates.push_back(QuadraticGate{random_quadratic_form(G, rng)});
    }
  }
  return c;
}

}  // namespace normsim
