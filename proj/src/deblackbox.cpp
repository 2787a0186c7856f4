#include "normsim/deblackbox.hpp"

#include <cmath>

namespace normsim {

namespace {

RatVector unit_vector(Eigen::Index m, Eigen::Index i, const Rational& s = 1) {
  RatVector e = RatVector::Zero(m);
  e(i) = s;
  return e;
}

// k with q = k / alpha mod 1, as the representative in (-alpha/2, alpha/2]
Integer scaled_integer(const Rational& q, const Integer& alpha, const std::string& what) {
  Rational k = frac(q) * Rational(alpha);
  if (!is_integer(k)) throw ExtractionError(what + " is not a multiple of 1/" + to_string(alpha));
  return centred_mod(numerator(k), alpha);
}

std::vector<RatVector> test_points(const ElementaryGroup& G, std::uint64_t seed) {
  std::vector<RatVector> out;
  if (G.is_finite() && G.order() <= 1024) {
    for (const auto& g : enumerate(G)) out.push_back(g.coords);
    return out;
  }
  std::mt19937_64 rng(seed);
  const auto m = static_cast<Eigen::Index>(G.size());
  for (int t = 0; t < 256; ++t) {
    RatVector x(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Factor& F = G[static_cast<std::size_t>(i)];
      switch (F.kind) {
        case Factor::Kind::Z:
          x(i) = static_cast<long>(rng() % 101) - 50;
          break;
        case Factor::Kind::T: {
          long den = 1 + static_cast<long>(rng() % 60);
          x(i) = Rational(static_cast<long>(rng() % static_cast<std::uint64_t>(den)), den);
          break;
        }
        default:
          x(i) = Rational(mod(Integer(rng() % (1u << 30)), F.N));
      }
    }
    out.push_back(x);
  }
  return out;
}

MatrixRep lift(const MatrixRep& rep, const ElementaryGroup& Gx) {
  const Eigen::Index n = rep.A.rows(), m = static_cast<Eigen::Index>(Gx.size());
  RatMatrix A = RatMatrix::Identity(m, m);
  A.topLeftCorner(n, n) = rep.A;
  return validate_matrix_rep(A, Gx);
}

QuadraticForm lift(const QuadraticForm& Q, const ElementaryGroup& Gx) {
  const Eigen::Index n = Q.M.rows(), m = static_cast<Eigen::Index>(Gx.size());
  RatMatrix M = RatMatrix::Zero(m, m);
  RatVector v = RatVector::Zero(m);
  M.topLeftCorner(n, n) = Q.M;
  v.head(n) = Q.v;
  return validate_quadratic(M, v, Gx);
}

}  // namespace

EncodingBridge::EncodingBridge(BlackBoxPtr B, DecompositionTable T) : B_(std::move(B)), T_(std::move(T)) {
  if (!B_) throw std::invalid_argument("EncodingBridge: no black-box group");
  if (auto bad = verify_decomposition(*B_, T_); !bad.empty())
    throw std::invalid_argument("EncodingBridge: invalid decomposition table: " + bad);
  std::vector<Integer> orders;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < T_.c.size(); ++j)
    if (T_.c(j) > 1) {
      beta_.push_back(T_.beta[static_cast<std::size_t>(j)]);
      orders.push_back(T_.c(j));
      kept.push_back(j);
    }
  Z_ = ElementaryGroup::cyclic(orders);
  logs_ = std::make_shared<std::unordered_map<std::string, RatVector>>();
  for (const auto& [b, y] : bb_log_table(*B_, T_)) {
    RatVector z(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) z(static_cast<Eigen::Index>(k)) = Rational(y(kept[k]));
    logs_->emplace(b, z);
  }
}

std::string EncodingBridge::encode(const RatVector& g) const {
  RatVector r = reduce(g, Z_).coords;
  IntVector e(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) e(i) = numerator(r(i));
  return bb_word(*B_, beta_, e);
}

RatVector EncodingBridge::decode(const std::string& b) const {
  if (!B_->is_element(b)) throw std::invalid_argument("'" + b + "' is not an element of " + B_->name());
  auto it = logs_->find(b);
  if (it == logs_->end()) throw std::logic_error("decode: element missing from the log table");
  return it->second;
}

DecompositionTable bruteforce_decomposition(const BlackBoxGroup& B) {
  return bb_decompose_bruteforce(B, bb_greedy_generators(B));
}

Integer precision_bound(const std::optional<int>& n_out, const ElementaryGroup& G) {
  Integer D = 1;
  for (const auto& F : G.factors())
    if (F.is_finite() && F.N > D) D = F.N;
  if (n_out) {
    if (*n_out < 0 || *n_out > 62) throw std::invalid_argument("n_out must lie in [0, 62]");
    Integer p = Integer(1) << *n_out;
    if (p > D) D = p;
  }
  return D;
}

Integer scaling_prime(const Integer& D) {
  if (D < 0 || D > (Integer(1) << 62)) throw std::invalid_argument("scaling_prime: bound out of range");
  return Integer(next_prime_above((2 * D).convert_to<std::uint64_t>()));
}

RatMatrix extract_matrix_entries(const ClassicalMap& f, const ElementaryGroup& G, const Integer& D) {
  const auto m = static_cast<Eigen::Index>(G.size());
  const Integer alpha = scaling_prime(D);
  RatMatrix A(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    if (G[static_cast<std::size_t>(j)].kind != Factor::Kind::T) {
      RatVector y = f(unit_vector(m, j));
      if (y.size() != m) throw ExtractionError("f returned the wrong number of coordinates");
      A.col(j) = y;
      continue;
    }
    RatVector y = f(unit_vector(m, j, Rational(1) / Rational(alpha)));
    if (y.size() != m) throw ExtractionError("f returned the wrong number of coordinates");
    for (Eigen::Index i = 0; i < m; ++i)
      A(i, j) = G[static_cast<std::size_t>(i)].kind == Factor::Kind::T
                    ? Rational(scaled_integer(y(i), alpha, "f(e_" + std::to_string(j) + "/alpha)"))
                    : y(i) * Rational(alpha);
  }
  return A;
}

MatrixRep extract_matrix_rep(const ClassicalMap& f, const ElementaryGroup& G, const Integer& D, std::uint64_t seed) {
  MatrixRep rep = validate_matrix_rep(extract_matrix_entries(f, G, D), G);
  for (const auto& x : test_points(G, seed)) {
    RatVector want = reduce(f(x), G).coords;
    if (rep.apply(x) != want)
      throw ExtractionError("extracted matrix disagrees with the oracle at " + format_tuple(x));
  }
  return rep;
}

QuadraticForm extract_quadratic(const PhaseExponent& q, const ElementaryGroup& G, const Integer& D, std::uint64_t seed) {
  const auto m = static_cast<Eigen::Index>(G.size());
  const Integer alpha = scaling_prime(D);
  const Rational q0 = q(RatVector::Zero(m));
  auto Q = [&](const RatVector& x) { return q(x) - q0; };
  auto kind = [&](Eigen::Index i) { return G[static_cast<std::size_t>(i)].kind; };
  using K = Factor::Kind;

  RatMatrix M = RatMatrix::Zero(m, m);
  RatVector v = RatVector::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (kind(i) == K::T) continue;
    RatVector e = unit_vector(m, i);
    M(i, i) = frac(Q(Rational(2) * e) - Rational(2) * Q(e));
  }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const bool ti = kind(i) == K::T, tj = kind(j) == K::T;
      if (ti && tj) continue;
      if (ti || tj) {
        const Eigen::Index z = ti ? j : i, t = ti ? i : j;
        if (kind(z) != K::Z) continue;
        RatVector x = unit_vector(m, z), y = unit_vector(m, t, Rational(1) / Rational(alpha));
        M(i, j) = Rational(scaled_integer(Q(x + y) - Q(x) - Q(y), alpha, "cross term"));
      } else {
        RatVector x = unit_vector(m, i), y = unit_vector(m, j);
        M(i, j) = frac(Q(x + y) - Q(x) - Q(y));
      }
      M(j, i) = M(i, j);
    }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (kind(i) == K::T) {
      v(i) = Rational(scaled_integer(Q(unit_vector(m, i, Rational(1) / Rational(alpha))), alpha, "linear term"));
      continue;
    }
    const Rational c(G.characteristic(static_cast<std::size_t>(i)));
    v(i) = frac(Q(unit_vector(m, i)) - (M(i, i) + M(i, i) * c) / Rational(2));
  }
  QuadraticForm form = validate_quadratic(M, v, G);
  for (const auto& x : test_points(G, seed))
    if (form.phase(x) != frac(Q(x)))
      throw ExtractionError("extracted quadratic form disagrees with the oracle at " + format_tuple(x));
  return form;
}

DeblackboxResult deblackbox_circuit(const CircuitRun& run, const DecompositionOracle& oracle) {
  const NormalizerCircuit& c = run.circuit;
  validate_circuit(c);
  const auto trace = c.trace();
  DeblackboxResult out;
  ElementaryGroup Zb;
  json header = json::object();
  if (c.initial.has_slot()) {
    const BlackBoxGroup& B = *c.initial.blackbox;
    const auto before = B.oracle_calls();
    out.bridge.emplace(c.initial.blackbox, oracle(B));
    Zb = out.bridge->decomposed();
    header["blackbox"] = to_json(B);
    header["table"] = to_json(out.bridge->table());
    header["decomposed"] = Zb.str();
    header["oracle_calls"] = B.oracle_calls() - before;
  }
  const auto n = static_cast<Eigen::Index>(c.initial.labels.size()), d = static_cast<Eigen::Index>(Zb.size());
  out.circuit.initial = {c.initial.labels.product(Zb), nullptr};
  out.input = RatVector(n + d);
  out.input.head(n) = run.input;
  if (out.bridge) out.input.tail(d) = out.bridge->decode(run.bb_input);

  json gates = json::array();
  for (std::size_t t = 0; t < c.gates.size(); ++t) {
    const Gate& g = c.gates[t];
    const ElementaryGroup& Gt = trace[t].labels;
    const ElementaryGroup Gx = Gt.product(Zb);
    json entry = {{"gate", t}, {"kind", gate_kind(g)}};
    std::uint64_t calls = 0;
    Gate rewritten;
    try {
      if (const auto* q = std::get_if<QFTGate>(&g)) {
        rewritten = *q;
      } else if (const auto* a = std::get_if<AutomorphismGate>(&g)) {
        rewritten = AutomorphismGate{lift(a->rep, Gx)};
      } else if (const auto* q = std::get_if<QuadraticGate>(&g)) {
        rewritten = QuadraticGate{lift(q->form, Gx)};
      } else if (const auto* b = std::get_if<BlackBoxAutomorphismGate>(&g)) {
        ClassicalMap f = [&](const RatVector& x) {
          ++calls;
          return b->f(x);
        };
        rewritten = AutomorphismGate{lift(extract_matrix_rep(f, Gt, precision_bound(b->n_out, Gt), t + 1), Gx)};
      } else if (const auto* b = std::get_if<BlackBoxQuadraticGate>(&g)) {
        PhaseExponent f = [&](const RatVector& x) {
          ++calls;
          return b->q(x);
        };
        rewritten = QuadraticGate{lift(extract_quadratic(f, Gt, precision_bound(b->n_out, Gt), t + 1), Gx)};
      } else if (const auto* me = std::get_if<ModExpGate>(&g)) {
        const auto before = out.bridge->group().oracle_calls();
        RatMatrix A = RatMatrix::Identity(n + d, n + d);
        for (std::size_t k = 0; k < me->bases.size(); ++k)
          A.block(n, static_cast<Eigen::Index>(me->controls[k]), d, 1) += out.bridge->decode(me->bases[k]);
        rewritten = AutomorphismGate{validate_matrix_rep(A, Gx)};
        calls = out.bridge->group().oracle_calls() - before;
      }
    } catch (const CircuitError&) {
      throw;
    } catch (const std::exception& e) {
      throw CircuitError(t, e.what());
    }
    entry["action"] = is_blackbox_gate(g) ? "extracted" : (d > 0 && !std::holds_alternative<QFTGate>(g) ? "lifted" : "kept");
    entry["oracle_calls"] = calls;
    entry["normal_form"] = to_json(rewritten);
    gates.push_back(std::move(entry));
    out.circuit.gates.push_back(std::move(rewritten));
  }
  validate_circuit(out.circuit);
  out.provenance = {{"decomposition", header}, {"gates", gates}};
  return out;
}

std::map<std::uint64_t, Rational> structured_distribution(const CircuitRun& run, const DecompositionOracle& oracle,
                                                           std::uint64_t cap) {
  DeblackboxResult res = deblackbox_circuit(run, oracle);
  auto dist = coset_distribution(coset_run(res.circuit, res.input), cap);
  if (!res.bridge) return dist;
  const ElementaryGroup& G = run.circuit.initial.labels;
  const ElementaryGroup& full = res.circuit.initial.labels;
  const auto n = static_cast<Eigen::Index>(G.size()), d = static_cast<Eigen::Index>(res.bridge->decomposed().size());
  const auto slot = res.bridge->group().elements();
  std::unordered_map<std::string, std::uint64_t> pos;
  for (std::size_t i = 0; i < slot.size(); ++i) pos.emplace(slot[i], i);
  std::map<std::uint64_t, Rational> out;
  for (const auto& [idx, p] : dist) {
    RatVector x = element_at(full, idx);
    std::uint64_t k = element_index(G, x.head(n)) * slot.size() + pos.at(res.bridge->encode(x.tail(d)));
    out[k] += p;
  }
  return out;
}

double total_variation(const std::map<std::uint64_t, Rational>& p, const std::vector<double>& q) {
  double tv = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    auto it = p.find(i);
    tv += std::abs((it == p.end() ? 0.0 : to_double(it->second)) - q[i]);
  }
  for (const auto& [i, pr] : p)
    if (i >= q.size()) tv += to_double(pr);
  return tv / 2;
}

}  // namespace normsim
