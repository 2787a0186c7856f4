#include "normsim/algorithms.hpp"

#include "normsim/linalg.hpp"

#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace normsim {

namespace {

json base_log(const char* algorithm, std::uint64_t seed, json inputs) {
  json log;
  log["algorithm"] = algorithm;
  log["seed"] = seed;
  log["inputs"] = std::move(inputs);
  return log;
}

IntVector zeros(std::size_t n) { return IntVector::Zero(static_cast<Eigen::Index>(n)); }

RatVector as_rational(const IntVector& v) { return v.cast<Rational>(); }

IntVector as_integer(const RatVector& v) {
  IntVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = numerator(v(i));
  return out;
}

std::vector<std::string> int_list(const std::vector<Integer>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(to_string(x));
  return out;
}

// QFT on every explicit register, modexp into the slot, QFT again.
CircuitRun kernel_circuit(const ElementaryGroup& G, const BlackBoxPtr& B, const std::vector<std::string>& bases) {
  CircuitRun run;
  run.circuit.initial = {G, B};
  std::vector<std::size_t> regs(G.size());
  for (std::size_t i = 0; i < regs.size(); ++i) regs[i] = i;
  run.circuit.gates.push_back(QFTGate{regs, {}});
  run.circuit.gates.push_back(ModExpGate{bases, regs, std::nullopt});
  run.circuit.gates.push_back(QFTGate{regs, {}});
  run.input = RatVector::Zero(static_cast<Eigen::Index>(G.size()));
  run.bb_input = B->identity();
  validate_circuit(run.circuit);
  return run;
}

// Candidate subgroup {g : sum_i y_i g_i / d_i in Z for every sample y}; its
// generators as reduced, distinct, nonzero columns.
IntMatrix annihilator(const ElementaryGroup& G, const std::vector<IntVector>& ys) {
  const IntVector d = G.characteristics();
  const auto m = d.size();
  Integer L = 1;
  for (Eigen::Index i = 0; i < m; ++i) L = lcm(L, d(i));
  GroupLinearSystem sys;
  const auto rows = static_cast<Eigen::Index>(ys.size());
  sys.A = IntMatrix(rows, m);
  sys.b = IntVector::Zero(rows);
  sys.moduli = IntVector::Constant(rows, L);
  for (Eigen::Index s = 0; s < rows; ++s)
    for (Eigen::Index i = 0; i < m; ++i) sys.A(s, i) = ys[static_cast<std::size_t>(s)](i) * (L / d(i));
  auto sol = solve_group_system(sys);
  std::set<std::vector<Integer>> seen;
  std::vector<IntVector> cols;
  for (Eigen::Index j = 0; j < sol->kernel.cols(); ++j) {
    IntVector h(m);
    bool zero = true;
    for (Eigen::Index i = 0; i < m; ++i) {
      h(i) = mod(sol->kernel(i, j), d(i));
      zero = zero && h(i) == 0;
    }
    if (zero || !seen.insert(std::vector<Integer>(h.data(), h.data() + m)).second) continue;
    cols.push_back(h);
  }
  IntMatrix out(m, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = cols[j];
  return out;
}

// Samples the kernel circuit until every candidate generator passes
// `in_kernel`. Fills samples, postprocessing and engine in `log`.
IntMatrix hidden_kernel(const ElementaryGroup& G, const BlackBoxPtr& B, const std::vector<std::string>& images,
                        const std::function<bool(const IntVector&)>& in_kernel, const KernelOptions& opt,
                        CallMeter& meter, json& log) {
  if (!G.is_finite()) throw PreconditionError("hidden kernel: G must be finite");
  const std::size_t m = G.size();
  if (m == 0) {
    log["engine"] = "none";
    log["samples"] = json::array();
    log["postprocessing"] = json::array();
    return IntMatrix(0, 0);
  }
  CircuitRun run = kernel_circuit(G, B, images);
  log["circuit"] = to_json(run);
  std::mt19937_64 rng(opt.seed);
  auto sampler = meter.simulate([&] { return OutcomeSampler(run, opt.cap); });
  log["engine"] = sampler.engine();
  std::vector<IntVector> ys;
  json samples = json::array(), steps = json::array();
  for (int t = 0; t < opt.max_samples; ++t) {
    Outcome o = meter.simulate([&] { return sampler.sample(rng); });
    ys.push_back(as_integer(o.x));
    samples.push_back(format_tuple(o.x));
    IntMatrix H = annihilator(G, ys);
    bool done = true;
    for (Eigen::Index j = 0; j < H.cols() && done; ++j) done = in_kernel(H.col(j));
    json step;
    step["samples"] = ys.size();
    step["candidate"] = to_json(H);
    step["verified"] = done;
    steps.push_back(step);
    if (done) {
      log["samples"] = samples;
      log["postprocessing"] = steps;
      return H;
    }
  }
  log["samples"] = samples;
  log["postprocessing"] = steps;
  throw AttemptsExhausted("kernel not determined after " + std::to_string(opt.max_samples) + " samples");
}

ElementaryGroup cyclic_group(const std::vector<Integer>& d) {
  std::vector<Factor> f;
  for (const auto& x : d) f.push_back(Factor::cyclic(x));
  return ElementaryGroup(std::move(f));
}

// Pairs (k, l) with l = k s mod n: the solution set as x0 + <kernel>.
enum class PairSolve { Unique, Ambiguous, Infeasible };

PairSolve solve_pairs(const std::vector<std::pair<Integer, Integer>>& pairs, const Integer& n, Integer& s) {
  GroupLinearSystem sys;
  const auto k = static_cast<Eigen::Index>(pairs.size());
  sys.A = IntMatrix(k, 1);
  sys.b = IntVector(k);
  sys.moduli = IntVector::Constant(k, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    sys.A(i, 0) = pairs[static_cast<std::size_t>(i)].first;
    sys.b(i) = pairs[static_cast<std::size_t>(i)].second;
  }
  auto sol = solve_group_system(sys);
  if (!sol) return PairSolve::Infeasible;
  for (Eigen::Index j = 0; j < sol->kernel.cols(); ++j)
    if (mod(sol->kernel(0, j), n) != 0) return PairSolve::Ambiguous;
  s = mod(sol->x0(0), n);
  return PairSolve::Unique;
}

CircuitRun dlog_circuit(const Integer& n, const BlackBoxPtr& B, const std::string& a, const std::string& b) {
  return kernel_circuit(ElementaryGroup::cyclic({n, n}), B, {a, b});
}

}  // namespace

// ---- OutcomeSampler -----------------------------------------------------------

OutcomeSampler::OutcomeSampler(const CircuitRun& run, std::uint64_t cap, const DecompositionOracle& oracle) {
  const DesignatedBasis& basis = run.circuit.initial;
  explicit_ = basis.labels.size();
  bool fits = false;
  if (basis.labels.is_finite()) {
    Integer dim = basis.labels.order();
    if (basis.blackbox) dim *= basis.blackbox->elements().size();
    fits = dim <= cap;
  }
  if (fits) {
    engine_ = "dense";
    dense_ = dense_run(run.circuit, run.input, run.bb_input, cap);
    auto p = dense_probabilities(*dense_);
    pick_ = std::discrete_distribution<std::uint64_t>(p.begin(), p.end());
    return;
  }
  engine_ = "structured";
  DeblackboxResult res = deblackbox_circuit(run, oracle);
  coset_ = coset_run(res.circuit, res.input);
  uniform_ = 1.0 / coset_->subgroup_order().convert_to<double>();
  bridge_ = std::move(res.bridge);
}

double OutcomeSampler::probability(const Outcome& o) const {
  if (!dense_) return uniform_;
  std::uint64_t i = element_index(dense_->group, o.x) * dense_->slot_size();
  if (!o.b.empty()) i += dense_->slot_index.at(o.b);
  return std::norm(dense_->amp(static_cast<Eigen::Index>(i)));
}

Outcome OutcomeSampler::sample(std::mt19937_64& rng) {
  if (dense_) return dense_outcome(*dense_, pick_(rng));
  IntVector x = coset_sample(*coset_, rng);
  const auto n = static_cast<Eigen::Index>(explicit_);
  Outcome o{as_rational(x.head(n)), {}};
  if (bridge_) o.b = bridge_->encode(as_rational(x.tail(x.size() - n)));
  return o;
}

json CallMeter::to_json() const {
  json j;
  j["algorithm"] = B->oracle_calls() - start - simulator;
  j["simulator"] = simulator;
  return j;
}

// ---- order finding ------------------------------------------------------------

OrderFindingRun find_order(const BlackBoxGroup& B, const std::string& a, const OrderOptions& opt) {
  if (!B.is_element(a)) throw PreconditionError("'" + a + "' is not an element of " + B.name());
  CallMeter meter(B);
  const Integer R = opt.order_bound ? *opt.order_bound : Integer(1) << B.encoding_bits();
  if (R < 1) throw PreconditionError("order bound must be positive");
  const std::uint64_t M = opt.comb_M ? *opt.comb_M : (R * R).convert_to<std::uint64_t>();
  const bool dense = opt.engine == OrderOptions::Engine::Dense;

  OrderFindingRun out;
  out.a = a;
  out.M = M;
  json inputs{{"blackbox", to_json(B)}, {"a", a}, {"order_bound", to_json(R)}, {"M", M}};
  out.log = base_log("order", opt.seed, inputs);

  std::mt19937_64 rng(opt.seed);
  std::function<Rational()> draw;
  std::optional<OutcomeSampler> sampler;
  std::uint64_t r_true = 0;
  const Integer D = 2 * Integer(M) + 1;
  if (dense) {
    CircuitRun run;
    run.circuit.initial = {ElementaryGroup::cyclic({D}), nullptr};
    run.circuit.initial.blackbox = std::shared_ptr<const BlackBoxGroup>(&B, [](const BlackBoxGroup*) {});
    run.circuit.gates = {QFTGate{{0}, {}}, ModExpGate{{a}, {0}, std::nullopt}, QFTGate{{0}, {}}};
    run.input = RatVector::Zero(1);
    run.bb_input = B.identity();
    validate_circuit(run.circuit);
    out.log["circuit"] = to_json(run);
    Integer dim = D * B.elements().size();
    if (dim > opt.cap) throw std::length_error("dense order finding needs dimension " + to_string(dim));
    sampler.emplace(meter.simulate([&] { return OutcomeSampler(run, opt.cap); }));
    out.log["engine"] = "dense";
    draw = [&] { return Rational(meter.simulate([&] { return sampler->sample(rng); }).x(0)) / Rational(D); };
  } else {
    // hybrid circuit over Z x B, started in the Fourier basis of T
    CircuitRun run;
    run.circuit.initial = {ElementaryGroup::parse("T"), std::shared_ptr<const BlackBoxGroup>(&B, [](const BlackBoxGroup*) {})};
    const int n_out = static_cast<int>(B.encoding_bits());
    run.circuit.gates = {QFTGate{{0}, {}}, ModExpGate{{a}, {0}, n_out}, QFTGate{{0}, {}}};
    run.input = RatVector::Zero(1);
    run.bb_input = B.identity();
    validate_circuit(run.circuit);
    json c = to_json(run);
    c["group"] = "Z";
    out.log["circuit"] = c;
    r_true = meter.simulate([&] { return bb_order(B, a); }).convert_to<std::uint64_t>();
    if (M < r_true) throw PreconditionError("comb half-length M is below the order");
    out.log["engine"] = "dirichlet";
    draw = [&] { return Rational(dirichlet_sample(r_true, M, rng, opt.dirichlet)); };
  }

  json steps = json::array(), samples = json::array();
  const std::string id = B.identity();
  for (int pair = 0; pair < opt.max_pairs; ++pair) {
    Integer cand = 1;
    json step;
    json fr = json::array();
    bool ok = true;
    for (int k = 0; k < 2; ++k) {
      Rational p = draw();
      out.samples.push_back(to_double(p));
      samples.push_back(to_double(p));
      auto f = continued_fraction_reconstruct(p, R);
      if (!f) {
        ok = false;
        fr.push_back(nullptr);
        continue;
      }
      fr.push_back(to_string(f->k) + "/" + to_string(f->r));
      cand = lcm(cand, f->r);
    }
    step["fractions"] = fr;
    if (!ok) {
      step["result"] = "no fraction within 1/(2R^2)";
      steps.push_back(step);
      continue;
    }
    step["candidate"] = to_json(cand);
    if (bb_pow(B, a, cand) != id) {
      step["result"] = "a^candidate != 1";
      steps.push_back(step);
      continue;
    }
    for (std::uint64_t q : prime_factors(cand.convert_to<std::uint64_t>()))
      while (cand % q == 0 && bb_pow(B, a, cand / q) == id) cand /= q;
    step["result"] = "order";
    step["order"] = to_json(cand);
    steps.push_back(step);
    out.r = cand;
    out.log["samples"] = samples;
    out.log["postprocessing"] = steps;
    out.log["oracle_calls"] = meter.to_json();
    out.log["result"] = {{"order", to_json(cand)}};
    return out;
  }
  throw AttemptsExhausted("order finding: no verified order after " + std::to_string(opt.max_pairs) + " pairs");
}

FactorRun factor(std::uint64_t N, const FactorOptions& opt) {
  if (N < 4) throw PreconditionError("N must be at least 4");
  if (is_prime(N)) throw PreconditionError(std::to_string(N) + " is prime");
  if (prime_factors(N).size() == 1) throw PreconditionError(std::to_string(N) + " is a prime power");
  FactorRun out;
  out.N = N;
  out.log = base_log("factor", opt.seed, {{"N", N}, {"attempts", opt.attempts}});
  json tries = json::array();
  if (N % 2 == 0) {
    out.d = 2;
    tries.push_back({{"even", true}});
    out.log["engine"] = "none";
    out.log["postprocessing"] = tries;
    out.log["oracle_calls"] = {{"algorithm", 0}, {"simulator", 0}};
    out.log["result"] = {{"factor", 2}};
    return out;
  }
  auto B = std::make_shared<ZNStarGroup>(N);
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::uint64_t> pick(2, N - 1);
  std::uint64_t algo = 0, sim = 0;
  for (int t = 0; t < opt.attempts; ++t) {
    const std::uint64_t a = pick(rng);
    json at{{"a", a}};
    const std::uint64_t g = std::gcd(a, N);
    if (g > 1) {
      at["gcd"] = g;
      tries.push_back(at);
      out.d = g;
      break;
    }
    OrderOptions oo = opt.order;
    oo.seed = rng();
    OrderFindingRun run = find_order(*B, std::to_string(a), oo);
    algo += run.log["oracle_calls"]["algorithm"].get<std::uint64_t>();
    sim += run.log["oracle_calls"]["simulator"].get<std::uint64_t>();
    at["order"] = run.log;
    const Integer r = run.r;
    if (r % 2 != 0) {
      at["result"] = "odd order";
      tries.push_back(at);
      continue;
    }
    const Integer x = pow_mod(a, r / 2, N);
    if (x == N - 1) {
      at["result"] = "a^(r/2) = -1";
      tries.push_back(at);
      continue;
    }
    const Integer d = gcd(x - 1, Integer(N));
    at["x"] = to_json(x);
    at["gcd"] = to_json(d);
    tries.push_back(at);
    if (d > 1 && d < N) {
      out.d = d.convert_to<std::uint64_t>();
      break;
    }
  }
  out.log["engine"] = opt.order.engine == OrderOptions::Engine::Dense ? "dense" : "dirichlet";
  out.log["postprocessing"] = tries;
  out.log["oracle_calls"] = {{"algorithm", algo}, {"simulator", sim}};
  if (out.d == 0) throw AttemptsExhausted("factor: no divisor of " + std::to_string(N) + " after " +
                                          std::to_string(opt.attempts) + " attempts");
  out.log["result"] = {{"factor", out.d}};
  return out;
}

// ---- discrete logarithms --------------------------------------------------------

DlogRun discrete_log(std::uint64_t p, std::uint64_t a, std::uint64_t b, const DlogOptions& opt) {
  if (!is_prime(p)) throw PreconditionError(std::to_string(p) + " is not prime");
  auto B = std::make_shared<ZNStarGroup>(p);
  const std::string as = std::to_string(a), bs = std::to_string(b);
  if (!B->is_element(as) || !B->is_element(bs)) throw PreconditionError("a and b must lie in Z_p^*");
  CallMeter meter(*B);
  if (bb_order(*B, as) != p - 1) throw PreconditionError(as + " does not generate Z_" + std::to_string(p) + "^*");

  DlogRun out;
  out.log = base_log("dlog", opt.seed, {{"p", p}, {"a", a}, {"b", b}, {"repetitions", opt.repetitions}});
  const Integer n = p - 1;
  CircuitRun run = dlog_circuit(n, B, as, bs);
  out.log["circuit"] = to_json(run);
  auto sampler = meter.simulate([&] { return OutcomeSampler(run, opt.cap); });
  out.log["engine"] = sampler.engine();
  std::mt19937_64 rng(opt.seed);
  json samples = json::array();
  for (int i = 0; i < opt.repetitions; ++i) {
    Outcome o = meter.simulate([&] { return sampler.sample(rng); });
    out.pairs.emplace_back(numerator(o.x(0)), numerator(o.x(1)));
    samples.push_back(format_tuple(o.x));
  }
  out.log["samples"] = samples;
  Integer s;
  PairSolve st = solve_pairs(out.pairs, n, s);
  json post{{"system", "k_i s = l_i mod " + to_string(n)}};
  post["status"] = st == PairSolve::Unique ? "unique" : st == PairSolve::Ambiguous ? "ambiguous" : "infeasible";
  out.log["postprocessing"] = json::array({post});
  out.log["oracle_calls"] = meter.to_json();
  if (st == PairSolve::Infeasible) throw std::logic_error("dlog: sampled pairs are inconsistent");
  if (st == PairSolve::Ambiguous)
    throw AttemptsExhausted("dlog: " + std::to_string(opt.repetitions) + " pairs do not determine s");
  if (bb_pow(*B, as, s) != bs) throw std::logic_error("dlog: recovered exponent fails verification");
  out.s = s;
  out.log["oracle_calls"] = meter.to_json();
  out.log["result"] = {{"s", to_json(s)}};
  return out;
}

DlogRun ec_discrete_log(const EllipticCurveGroup& E, const std::string& a, const std::string& b,
                        const EcdlogOptions& opt) {
  if (!E.is_element(a) || !E.is_element(b)) throw PreconditionError("points must lie on " + E.name());
  auto B = std::shared_ptr<const BlackBoxGroup>(&E, [](const BlackBoxGroup*) {});
  DlogRun out;
  out.log = base_log("ecdlog", opt.seed, {{"blackbox", to_json(E)}, {"a", a}, {"b", b}});
  OrderOptions oo = opt.order;
  oo.seed = opt.seed;
  OrderFindingRun ord = find_order(E, a, oo);
  const Integer N = ord.r;
  CallMeter meter(E);
  json post = json::array();
  post.push_back({{"order_of_a", to_json(N)}, {"order_log", ord.log}});
  if (bb_pow(E, b, N) != E.identity()) throw PreconditionError("b is not in <a>: N.b != O");

  CircuitRun run = dlog_circuit(N, B, a, b);
  out.log["circuit"] = to_json(run);
  auto sampler = meter.simulate([&] { return OutcomeSampler(run, opt.cap); });
  out.log["engine"] = sampler.engine();
  std::mt19937_64 rng(opt.seed);
  json samples = json::array();
  auto finish = [&] {
    out.log["samples"] = samples;
    out.log["postprocessing"] = post;
    out.log["oracle_calls"] = meter.to_json();
  };
  for (int i = 0; i < opt.max_samples; ++i) {
    Outcome o = meter.simulate([&] { return sampler.sample(rng); });
    out.pairs.emplace_back(numerator(o.x(0)), numerator(o.x(1)));
    samples.push_back(format_tuple(o.x));
    Integer s;
    PairSolve st = solve_pairs(out.pairs, N, s);
    if (st == PairSolve::Ambiguous) continue;
    post.push_back({{"samples", out.pairs.size()}, {"status", st == PairSolve::Unique ? "unique" : "infeasible"}});
    finish();
    if (st == PairSolve::Infeasible || bb_pow(E, a, s) != b) throw PreconditionError("b is not in <a>");
    out.s = s;
    out.log["oracle_calls"] = meter.to_json();
    out.log["result"] = {{"s", to_json(s)}};
    return out;
  }
  finish();
  throw AttemptsExhausted("ecdlog: s not determined after " + std::to_string(opt.max_samples) + " samples");
}

// ---- OracularGroup --------------------------------------------------------------

OracularGroup::OracularGroup(ElementaryGroup G, Oracle f) : G_(std::move(G)), f_(std::move(f)) {
  if (!G_.is_finite()) throw std::invalid_argument("oracular group needs a finite domain");
  for (const auto& g : enumerate(G_)) {
    std::string x = evaluate(g.coords);
    if (pre_.emplace(x, g.coords).second) values_.push_back(x);
  }
  zero_ = evaluate(normsim::identity(G_).coords);
}

std::string OracularGroup::evaluate(const RatVector& g) const {
  ++evals_;
  return f_(reduce(g, G_).coords);
}

const RatVector& OracularGroup::preimage(const std::string& x) const {
  auto it = pre_.find(x);
  if (it == pre_.end()) throw std::invalid_argument("'" + x + "' is not an oracle value");
  return it->second;
}

std::size_t OracularGroup::encoding_bits() const {
  std::size_t bits = 1;
  while ((std::size_t{1} << bits) < values_.size()) ++bits;
  return bits;
}

std::string OracularGroup::do_mul(const std::string& x, const std::string& y) const {
  return evaluate(preimage(x) + preimage(y));
}

std::string OracularGroup::do_inv(const std::string& x) const { return evaluate(-preimage(x)); }

std::string OracularGroup::do_sample(std::mt19937_64& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, values_.size() - 1);
  return values_[pick(rng)];
}

// ---- hidden subgroups and kernels -----------------------------------------------

KernelRun solve_hsp(const HSPInstance& inst, const KernelOptions& opt) {
  const ElementaryGroup& G = inst.G;
  for (const auto& f : G.factors())
    if (!f.is_finite()) throw PreconditionError("hsp: G must be a product of finite cyclic groups");
  auto O = std::make_shared<OracularGroup>(G, inst.f);
  KernelRun out;
  out.log = base_log("hsp", opt.seed, {{"group", G.str()}, {"values", O->elements().size()}});
  CallMeter meter(*O);

  std::vector<std::string> images;
  for (std::size_t i = 0; i < G.size(); ++i) {
    RatVector e = RatVector::Zero(static_cast<Eigen::Index>(G.size()));
    e(static_cast<Eigen::Index>(i)) = 1;
    images.push_back(O->evaluate(e));
  }

  // the modexp step is an automorphism of G x O only if f is a homomorphism
  json cert;
  const auto elems = enumerate(G);
  std::uint64_t pairs = 0;
  for (const auto& g : elems) {
    if (O->evaluate(g.coords) != bb_word(*O, images, as_integer(g.coords)))
      throw PreconditionError("hsp: f(g) differs from the word in f(e_i) at " + g.str());
    for (const auto& h : elems) {
      ++pairs;
      if (O->evaluate((g + h).coords) != O->mul(O->evaluate(g.coords), O->evaluate(h.coords)))
        throw PreconditionError("hsp: f is not a homomorphism onto its oracular group at " + g.str() + ", " + h.str());
    }
  }
  cert["homomorphism_pairs"] = pairs;
  CircuitRun run = kernel_circuit(G, O, images);
  DeblackboxResult res = deblackbox_circuit(run);
  cert["group"] = res.circuit.initial.labels.str();
  cert["modexp"] = res.provenance["gates"][1];
  cert["passed"] = true;
  out.log["certificate"] = cert;

  const std::string zero = O->identity();
  out.generators = hidden_kernel(
      G, O, images, [&](const IntVector& h) { return O->evaluate(as_rational(h)) == zero; }, opt, meter, out.log);
  json calls = meter.to_json();
  calls["oracle_evaluations"] = O->evaluations();
  out.log["oracle_calls"] = calls;
  out.log["result"] = {{"generators", to_json(out.generators)}};
  return out;
}

KernelRun solve_hkp(const ElementaryGroup& G, const BlackBoxPtr& B, const std::vector<std::string>& images,
                    const KernelOptions& opt) {
  if (images.size() != G.size()) throw PreconditionError("hkp: one image per register");
  KernelRun out;
  out.log = base_log("hkp", opt.seed, {{"group", G.str()}, {"blackbox", to_json(*B)}, {"images", images}});
  CallMeter meter(*B);
  const std::string id = B->identity();
  out.generators = hidden_kernel(
      G, B, images, [&](const IntVector& h) { return bb_word(*B, images, h) == id; }, opt, meter, out.log);
  out.log["oracle_calls"] = meter.to_json();
  out.log["result"] = {{"generators", to_json(out.generators)}};
  return out;
}

LinearSystemRun solve_linear_system_bb(const ElementaryGroup& G, const BlackBoxPtr& B,
                                       const std::vector<std::string>& images, const std::string& b,
                                       const KernelOptions& opt) {
  if (images.size() != G.size()) throw PreconditionError("linear system: one image per register");
  if (!B->is_element(b)) throw PreconditionError("'" + b + "' is not an element of " + B->name());
  LinearSystemRun out;
  out.log = base_log("linear_system", opt.seed,
                     {{"group", G.str()}, {"blackbox", to_json(*B)}, {"images", images}, {"b", b}});
  CallMeter meter(*B);
  OrderOptions oo;
  oo.seed = opt.seed;
  OrderFindingRun ord = find_order(*B, b, oo);
  const Integer n = ord.r;

  // (x, t) -> alpha(x) b^-t on G x Z_n; x0 is the x of a kernel element with t = 1
  std::vector<Factor> f = G.factors();
  f.push_back(Factor::cyclic(n));
  const ElementaryGroup Gx(f);
  std::vector<std::string> imgs = images;
  imgs.push_back(B->inv(b));
  const std::string id = B->identity();
  json ext;
  IntMatrix Kx = hidden_kernel(
      Gx, B, imgs, [&](const IntVector& h) { return bb_word(*B, imgs, h) == id; }, opt, meter, ext);
  const auto m = static_cast<Eigen::Index>(G.size());
  std::optional<IntVector> c;
  if (Kx.cols() == 0) {
    if (n == 1) c = IntVector(0);
  } else {
    auto sol = solve_group_system({Kx.bottomRows(1), IntVector::Constant(1, 1), IntVector::Constant(1, n)});
    if (sol) c = sol->x0;
  }
  json post = json::array();
  post.push_back({{"order_of_b", to_json(n)}, {"extended_kernel", to_json(Kx)}});
  if (c) {
    IntVector x = c->size() ? IntVector(Kx * *c).head(m) : zeros(G.size());
    const IntVector d = G.characteristics();
    for (Eigen::Index i = 0; i < m; ++i) x(i) = mod(x(i), d(i));
    if (bb_word(*B, images, x) != b) throw std::logic_error("linear system: x0 fails verification");
    out.x0 = x;
  }
  post.push_back({{"feasible", out.x0.has_value()}});

  KernelOptions ko = opt;
  ko.seed = opt.seed + 1;
  KernelRun k = solve_hkp(G, B, images, ko);
  out.K = k.generators;
  out.log["circuit"] = ext["circuit"];
  out.log["engine"] = ext["engine"];
  out.log["samples"] = ext["samples"];
  post.push_back({{"extended_steps", ext["postprocessing"]}, {"kernel_log", k.log}});
  out.log["postprocessing"] = post;
  out.log["oracle_calls"] = meter.to_json();
  json result{{"feasible", out.x0.has_value()}, {"K", to_json(out.K)}};
  if (out.x0) result["x0"] = to_json(*out.x0);
  out.log["result"] = result;
  return out;
}

// ---- group decomposition --------------------------------------------------------

DecomposeRun decompose_group(const BlackBoxPtr& B, const std::vector<std::string>& alpha,
                             const DecomposeOptions& opt) {
  for (const auto& x : alpha)
    if (!B->is_element(x)) throw PreconditionError("'" + x + "' is not an element of " + B->name());
  DecomposeRun out;
  out.log = base_log("decompose", opt.seed, {{"blackbox", to_json(*B)}, {"alpha", alpha}});
  CallMeter meter(*B);
  json post = json::array();
  const auto k = static_cast<Eigen::Index>(alpha.size());

  // step 1: orders
  std::vector<Integer> d;
  std::uint64_t sub_sim = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    OrderOptions oo = opt.order;
    oo.seed = opt.seed + i;
    OrderFindingRun r = find_order(*B, alpha[i], oo);
    sub_sim += r.log["oracle_calls"]["simulator"].get<std::uint64_t>();
    d.push_back(r.r);
  }
  meter.simulator += sub_sim;
  post.push_back({{"step", 1}, {"orders", int_list(d)}});

  // step 2: relations = kernel of Z_d1 x ... x Z_dk -> B, plus d_i e_i
  const ElementaryGroup Zd = cyclic_group(d);
  const std::string id = B->identity();
  KernelOptions ko{opt.max_samples, opt.seed, opt.cap};
  IntMatrix K = k == 0 ? IntMatrix(0, 0)
                       : hidden_kernel(
                             Zd, B, alpha, [&](const IntVector& h) { return bb_word(*B, alpha, h) == id; }, ko, meter,
                             out.log);
  if (k == 0) out.log["engine"] = "none";
  out.classical_fallback = out.log.value("engine", "") == "structured";
  IntMatrix R(k, K.cols() + k);
  R.setZero();
  if (K.cols()) R.leftCols(K.cols()) = K;
  for (Eigen::Index i = 0; i < k; ++i) R(i, K.cols() + i) = d[static_cast<std::size_t>(i)];
  post.push_back({{"step", 2}, {"kernel", to_json(K)}, {"classical_fallback", out.classical_fallback}});

  // step 3: Z^k / R = (+) Z / D_jj in the basis U
  DecompositionTable& T = out.table;
  T.alpha = alpha;
  std::vector<Eigen::Index> keep;
  if (k > 0) {
    auto snf = smith_normal_form(R);
    for (Eigen::Index j = 0; j < k; ++j)
      if (abs(snf.D(j, j)) != 1) keep.push_back(j);
    const auto l = static_cast<Eigen::Index>(keep.size());
    T.A = IntMatrix(k, l);
    T.c = IntVector(l);
    for (Eigen::Index j = 0; j < l; ++j) {
      const Eigen::Index src = keep[static_cast<std::size_t>(j)];
      T.c(j) = abs(snf.D(src, src));
      for (Eigen::Index i = 0; i < k; ++i) T.A(i, j) = mod(snf.U(i, src), d[static_cast<std::size_t>(i)]);
      T.beta.push_back(bb_word(*B, alpha, T.A.col(j)));
    }
    post.push_back({{"step", 3}, {"A", to_json(T.A)}, {"c", to_json(T.c)}});

    // step 4: [A | R] X = e_i over Z; the first l entries of X give column i of B
    IntMatrix AR(k, l + R.cols());
    AR << T.A, R;
    RatMatrix pinv = integral_pseudo_inverse(AR);
    T.B = IntMatrix(l, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      RatVector X = pinv.col(i);
      if (!is_integral(RatMatrix(X)) || to_rational(AR) * X != RatVector(RatVector::Unit(k, i)))
        throw std::logic_error("decompose: [A | R] X = e_" + std::to_string(i) + " has no integral solution");
      for (Eigen::Index j = 0; j < l; ++j) T.B(j, i) = mod(numerator(X(j)), T.c(j));
    }
    post.push_back({{"step", 4}, {"B", to_json(T.B)}});
  } else {
    T.A = IntMatrix(0, 0);
    T.B = IntMatrix(0, 0);
    T.c = IntVector(0);
  }
  Integer size = 1;
  for (Eigen::Index j = 0; j < T.c.size(); ++j) size *= T.c(j);
  const bool onto = size == Integer(B->elements().size());
  post.push_back({{"generates_B", onto}});
  std::string bad = verify_decomposition(*B, T, 1u << 20, onto);
  if (!bad.empty()) throw std::logic_error("decompose: " + bad);
  out.log["postprocessing"] = post;
  out.log["oracle_calls"] = meter.to_json();
  out.log["result"] = {{"type", T.type_string()}, {"table", to_json(T)}};
  return out;
}

MultiDlogRun multivariate_dlog(const BlackBoxPtr& B, const std::vector<std::string>& beta, const std::string& b,
                               const DecomposeOptions& opt) {
  if (!B->is_element(b)) throw PreconditionError("'" + b + "' is not an element of " + B->name());
  std::vector<std::string> alpha = beta;
  alpha.push_back(b);
  DecomposeRun dec = decompose_group(B, alpha, opt);
  const DecompositionTable& T = dec.table;
  const auto k = static_cast<Eigen::Index>(beta.size());
  MultiDlogRun out;
  out.log = base_log("multivariate_dlog", opt.seed, {{"blackbox", to_json(*B)}, {"beta", beta}, {"b", b}});
  // sum_i x_i B(:, i) = B(:, k) mod c
  std::optional<GroupSolution> sol;
  if (T.c.size() == 0) {
    sol = GroupSolution{zeros(beta.size()), IntMatrix::Identity(k, k)};
  } else {
    sol = solve_group_system({T.B.leftCols(k), T.B.col(k), T.c});
  }
  if (!sol) throw PreconditionError("b is not in <beta>");
  std::vector<Integer> orders;
  for (const auto& s : dec.log["postprocessing"][0]["orders"]) orders.push_back(Integer(s.get<std::string>()));
  out.x = sol->x0;
  for (Eigen::Index i = 0; i < k; ++i) out.x(i) = mod(out.x(i), orders[static_cast<std::size_t>(i)]);
  if (bb_word(*B, beta, out.x) != b) throw std::logic_error("multivariate dlog: solution fails verification");
  out.log["engine"] = dec.log["engine"];
  out.log["postprocessing"] = json::array({{{"decomposition", dec.log}}});
  out.log["oracle_calls"] = dec.log["oracle_calls"];
  out.log["result"] = {{"x", to_json(out.x)}};
  return out;
}

}  // namespace normsim
