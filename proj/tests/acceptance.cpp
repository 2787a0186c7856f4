// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and runtime budgets are the stated ones.

#include "normsim/algorithms.hpp"
#include "normsim/random_circuits.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

using namespace normsim;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::uint64_t naive_order(std::uint64_t a, std::uint64_t N) {
  std::uint64_t x = a % N, r = 1;
  while (x != 1) {
    x = x * a % N;
    ++r;
  }
  return r;
}

std::vector<std::uint64_t> units(std::uint64_t N) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t a = 1; a < N; ++a)
    if (std::gcd(a, N) == 1) out.push_back(a);
  return out;
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

// ---- 1 -----------------------------------------------------------------------

Verdict factoring() {
  Verdict v;
  int runs = 0;
  for (std::uint64_t N : {15, 21, 33, 35, 91})
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      ++runs;
      FactorOptions opt;
      opt.seed = seed;
      try {
        std::uint64_t d = factor(N, opt).d;
        // trial division
        std::uint64_t q = 0;
        for (std::uint64_t t = 1; t * d <= N; ++t)
          if (t * d == N) q = t;
        if (d <= 1 || d >= N || q == 0) {
          v.pass = false;
          v.detail += " bad divisor " + std::to_string(d) + " of " + std::to_string(N) + ";";
        }
      } catch (const AttemptsExhausted&) {
        v.pass = false;
        v.detail += " N=" + std::to_string(N) + " seed " + std::to_string(seed) + " exhausted;";
      }
    }
  if (v.pass) v.detail = std::to_string(runs) + " seeded runs over N in {15,21,33,35,91}, every divisor verified";
  return v;
}

// ---- 2 -----------------------------------------------------------------------

Verdict order_floor() {
  Verdict v;
  const double floor_bound = 4 / (std::numbers::pi * std::numbers::pi) - 0.03;
  const int shots = 10000;
  struct Case {
    std::string label;
    BlackBoxPtr B;
    std::string a;
  };
  std::vector<Case> cases{{"(Z15*, 2)", std::make_shared<ZNStarGroup>(15), "2"},
                          {"(Z21*, 2)", std::make_shared<ZNStarGroup>(21), "2"},
                          {"(E(F5), (0,1))", std::make_shared<EllipticCurveGroup>(5, 1, 1), "(0,1)"}};
  std::mt19937_64 rng(2024);
  for (const auto& c : cases) {
    // same parameters find_order uses by default
    const Integer R = Integer(1) << c.B->encoding_bits();
    const auto M = (R * R).convert_to<std::uint64_t>();
    const auto r = bb_order(*c.B, c.a).convert_to<std::uint64_t>();
    const double delta = dirichlet_resolution(r, M);
    int hit = 0;
    for (int i = 0; i < shots; ++i) {
      double p = dirichlet_sample(r, M, rng);
      if (std::abs(p * r - std::round(p * r)) / r <= delta / 2) ++hit;
    }
    const double freq = hit / double(shots);
    const double sigma = std::sqrt(floor_bound * (1 - floor_bound) / shots);
    const double mass = dirichlet_peak_mass(r, M, delta);
    const bool ok = freq >= floor_bound - 3 * sigma && mass >= 2.0 / 3.0;
    v.pass = v.pass && ok;
    v.detail += " " + c.label + " r=" + std::to_string(r) + " M=" + std::to_string(M) + " hit " + fmt(freq) +
                " peak-mass " + fmt(mass) + (ok ? ";" : " BELOW;");
  }
  v.detail += " floor " + fmt(floor_bound) + " - 3 sigma";
  return v;
}

// ---- 3 -----------------------------------------------------------------------

Verdict discretization() {
  Verdict v;
  double worst = 0;
  for (std::uint64_t r = 1; r <= 8; ++r)
    for (std::uint64_t M : {4 * r, 8 * r, 16 * r}) worst = std::max(worst, discretization_check(r, M));
  v.pass = worst <= 1e-10;
  v.detail = "24 (r, M) pairs, worst deviation " + fmt(worst, 3);
  return v;
}

// ---- 4 -----------------------------------------------------------------------

Verdict dlog_suite() {
  Verdict v;
  const int seeds = 400;
  std::uint64_t runs = 0, failures = 0, wrong = 0, unsolved = 0;
  for (std::uint64_t p : {5, 7, 11, 13})
    for (std::uint64_t a : units(p)) {
      if (naive_order(a, p) != p - 1) continue;
      std::uint64_t b = 1;
      for (std::uint64_t s = 0; s + 1 < p; ++s, b = b * a % p) {
        bool solved = false;
        for (int k = 0; k < seeds; ++k) {
          ++runs;
          DlogOptions opt;
          opt.seed = runs;  // distinct per run
          try {
            if (discrete_log(p, a, b, opt).s != s) ++wrong;
            solved = true;
          } catch (const AttemptsExhausted&) {
            ++failures;
          }
        }
        if (!solved) ++unsolved;
      }
    }
  const double q = std::ldexp(1.0, -10);
  const double rate = failures / double(runs);
  const double bound = q + 3 * std::sqrt(q * (1 - q) / runs);
  v.pass = wrong == 0 && unsolved == 0 && rate <= bound;
  v.detail = std::to_string(runs) + " runs (all generator/target pairs, " + std::to_string(seeds) + " seeds each), " +
             std::to_string(wrong) + " wrong, failure rate " + fmt(rate) + " <= " + fmt(bound) + " required";
  return v;
}

// ---- 5 -----------------------------------------------------------------------

Verdict ecdlp() {
  Verdict v;
  std::uint64_t checked = 0, wrong = 0;
  for (auto [p, A, B] : std::vector<std::array<std::uint64_t, 3>>{{5, 1, 1}, {7, 3, 4}, {11, 1, 6}}) {
    EllipticCurveGroup E(p, A, B);
    for (const auto& a : E.elements()) {
      std::string b = E.identity();
      const auto n = bb_order(E, a).convert_to<std::uint64_t>();
      for (std::uint64_t s = 0; s < n; ++s, b = E.mul(b, a)) {
        EcdlogOptions opt;
        opt.seed = checked + 1;
        ++checked;
        try {
          Integer got = ec_discrete_log(E, a, b, opt).s;
          // s-fold repeated addition
          std::string x = E.identity();
          for (Integer t = 0; t < got; ++t) x = E.mul(x, a);
          if (x != b || got >= n) ++wrong;
        } catch (const std::exception&) {
          ++wrong;
        }
      }
    }
  }
  v.pass = wrong == 0;
  v.detail = std::to_string(checked) + " (a, b) pairs on curves over F5, F7, F11, " + std::to_string(wrong) + " wrong";
  return v;
}

// ---- 6 -----------------------------------------------------------------------

Verdict decomposition() {
  Verdict v;
  int groups = 0, fallback = 0;
  std::mt19937_64 rng(6);
  for (std::uint64_t N = 2; N <= 200; ++N) {
    auto B = std::make_shared<ZNStarGroup>(N);
    auto alpha = bb_sample_generators(*B, rng);
    DecomposeOptions opt;
    opt.seed = N;
    opt.cap = 1u << 16;
    ++groups;
    try {
      auto run = decompose_group(B, alpha, opt);
      auto ref = bb_decompose_bruteforce(*B, alpha);
      fallback += run.classical_fallback;
      const std::string bad = verify_decomposition(*B, run.table);
      if (run.table.type_string() != ref.type_string() || !bad.empty() || !verify_decomposition(*B, ref).empty()) {
        v.pass = false;
        v.detail += " N=" + std::to_string(N) + " " + run.table.type_string() + " vs " + ref.type_string() + ";";
      }
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail += " N=" + std::to_string(N) + ": " + e.what() + ";";
    }
  }
  if (v.pass)
    v.detail = std::to_string(groups) + " groups Z_N^*, N <= 200, types and A/B round trips match; " +
               std::to_string(fallback) + " used the flagged structured kernel fallback";
  return v;
}

// ---- 7 -----------------------------------------------------------------------

double tv(const CircuitRun& run) {
  auto dense = dense_run(run.circuit, run.input, run.bb_input, 1u << 16);
  return total_variation(structured_distribution(run, bruteforce_decomposition, 1u << 16), dense_probabilities(dense));
}

// Random normalizer circuit with some gates hidden behind black boxes and, when
// a slot is given, modexp gates whose bases respect the control moduli.
CircuitRun corpus_circuit(std::mt19937_64& rng, const BlackBoxPtr& slot) {
  const std::uint64_t budget = slot ? 512 / slot->elements().size() : 512;
  auto G = random_finite_group(rng, budget);
  NormalizerCircuit c = random_circuit(G, 8, rng);
  std::vector<Gate> gates;
  for (auto& g : c.gates) {
    if (rng() % 2 == 0) {
      if (auto* a = std::get_if<AutomorphismGate>(&g)) {
        MatrixRep rep = a->rep;
        gates.push_back(BlackBoxAutomorphismGate{"f", [rep](const RatVector& x) { return rep.apply(x); }, std::nullopt});
        continue;
      }
      if (auto* q = std::get_if<QuadraticGate>(&g)) {
        QuadraticForm Q = q->form;
        gates.push_back(BlackBoxQuadraticGate{"q", [Q](const RatVector& x) { return Q.phase(x); }, std::nullopt});
        continue;
      }
    }
    gates.push_back(g);
  }
  CircuitRun run;
  run.input = element_at(G, rng() % finite_order(G));
  if (slot) {
    const auto els = slot->elements();
    for (int k = 0; k < 2; ++k) {
      std::vector<std::string> bases;
      std::vector<std::size_t> controls;
      for (std::size_t r = 0; r < G.size(); ++r) {
        if (rng() % 2) continue;
        std::vector<std::string> ok;
        for (const auto& x : els)
          if (bb_pow(*slot, x, G.characteristic(r)) == slot->identity()) ok.push_back(x);
        bases.push_back(ok[rng() % ok.size()]);
        controls.push_back(r);
      }
      gates.insert(gates.begin() + static_cast<std::ptrdiff_t>(rng() % (gates.size() + 1)),
                   ModExpGate{bases, controls, std::nullopt});
    }
    run.bb_input = els[rng() % els.size()];
  }
  run.circuit.initial = {G, slot};
  run.circuit.gates = std::move(gates);
  return run;
}

Verdict simulation_theorem() {
  Verdict v;
  std::mt19937_64 rng(7);
  std::vector<BlackBoxPtr> slots{std::make_shared<ZNStarGroup>(7), std::make_shared<ZNStarGroup>(9),
                                 std::make_shared<ZNStarGroup>(15), std::make_shared<EllipticCurveGroup>(5, 1, 1)};
  double worst = 0;
  int circuits = 0, bad = 0;
  auto judge = [&](const CircuitRun& run) {
    ++circuits;
    double d = tv(run);
    worst = std::max(worst, d);
    if (d > 1e-9) ++bad;
  };
  for (int i = 0; i < 200; ++i) judge(corpus_circuit(rng, i % 2 ? slots[(i / 2) % slots.size()] : nullptr));
  int random_count = circuits;

  auto hidden = [](const ElementaryGroup& G, const BlackBoxPtr& B, const std::vector<std::string>& bases) {
    CircuitRun run;
    run.circuit.initial = {G, B};
    std::vector<std::size_t> regs(G.size());
    for (std::size_t i = 0; i < regs.size(); ++i) regs[i] = i;
    run.circuit.gates = {QFTGate{regs, {}}, ModExpGate{bases, regs, std::nullopt}, QFTGate{regs, {}}};
    run.input = RatVector::Zero(static_cast<Eigen::Index>(G.size()));
    run.bb_input = B->identity();
    return run;
  };
  // discrete log over Z_(p-1)^2 x Z_p^*
  for (std::uint64_t p : {5, 7, 11, 13}) {
    auto B = std::make_shared<ZNStarGroup>(p);
    for (std::uint64_t a : units(p))
      if (naive_order(a, p) == p - 1)
        for (std::uint64_t b : {std::uint64_t{1}, a, p - 1})
          judge(hidden(ElementaryGroup::cyclic({p - 1, p - 1}), B, {std::to_string(a), std::to_string(b)}));
  }
  // elliptic-curve discrete log over Z_N^2 x E
  {
    auto E = std::make_shared<EllipticCurveGroup>(5, 1, 1);
    for (const auto& b : E->elements()) judge(hidden(ElementaryGroup::cyclic({9, 9}), E, {"(0,1)", b}));
  }
  // decomposition kernel circuits over Z_d1 x ... x Z_dk x B
  for (std::uint64_t N : {8, 15, 21, 24, 35}) {
    auto B = std::make_shared<ZNStarGroup>(N);
    auto gens = bb_greedy_generators(*B);
    std::vector<Integer> d;
    for (const auto& g : gens) d.push_back(bb_order(*B, g));
    judge(hidden(ElementaryGroup::cyclic(d), B, gens));
  }
  v.pass = bad == 0;
  v.detail = std::to_string(random_count) + " random circuits + " + std::to_string(circuits - random_count) +
             " algorithm circuits, " + std::to_string(bad) + " mismatches, worst TV " + fmt(worst, 3) +
             " (exact side rational, dense side double; 1e-9 counts as 0)";
  return v;
}

// ---- 8 -----------------------------------------------------------------------

Verdict extraction() {
  Verdict v;
  std::mt19937_64 rng(8);
  int matrices = 0, forms = 0, bad = 0;
  std::uint64_t points = 0;
  for (int i = 0; i < 500; ++i) {
    auto G = random_finite_group(rng, 4096);
    const Integer D = precision_bound(std::nullopt, G);
    const auto all = enumerate(G);
    try {
      if (i % 2 == 0) {
        ++matrices;
        MatrixRep rep = random_matrix_rep(G, rng);
        MatrixRep got = extract_matrix_rep([rep](const RatVector& x) { return rep.apply(x); }, G, D, rng());
        bool same = got.A == rep.A;
        for (const auto& g : all) same = same && got.apply(g.coords) == rep.apply(g.coords);
        points += all.size();
        if (!same) ++bad;
      } else {
        ++forms;
        QuadraticForm Q = random_quadratic_form(G, rng);
        QuadraticForm got = extract_quadratic([Q](const RatVector& x) { return Q.phase(x); }, G, D, rng());
        bool same = true;
        for (const auto& g : all) same = same && got.phase(g.coords) == Q.phase(g.coords);
        points += all.size();
        if (!same) ++bad;
      }
    } catch (const std::exception& e) {
      ++bad;
      v.detail += std::string(" ") + e.what() + ";";
    }
  }
  v.pass = bad == 0;
  v.detail = std::to_string(matrices) + " MatrixReps + " + std::to_string(forms) + " QuadraticForms, " +
             std::to_string(points) + " points compared, " + std::to_string(bad) + " mismatches" + v.detail;
  return v;
}

// ---- 9 -----------------------------------------------------------------------

Verdict modexp_nogo() {
  Verdict v;
  int checked = 0, bad = 0, normal = 0;
  for (std::uint64_t N : {15, 21}) {
    ZNStarGroup B(N);
    for (std::uint64_t a : units(N))
      for (std::uint64_t M = 1; M <= 24; ++M) {
        ++checked;
        const bool expect = M % naive_order(a, N) == 0;
        auto chk = check_modexp_normalizable(M, B, std::to_string(a));
        bool ok = chk.normalizable == expect && chk.rep.has_value() == expect;
        if (ok && chk.rep) {
          ++normal;
          try {
            MatrixRep again = validate_matrix_rep(chk.rep->A, chk.group);
            // (m, y) -> (m, y + m log a) on every element
            auto la = bb_discrete_log_bruteforce(B, chk.table, std::to_string(a));
            for (const auto& g : enumerate(chk.group)) {
              RatVector want = g.coords;
              const auto l = static_cast<Eigen::Index>(chk.table.c.size());
              for (Eigen::Index j = 0; j < l; ++j) want(j + 1) += g.coords(0) * Rational((*la)(j));
              if (again.apply(g.coords) != reduce(want, chk.group).coords) ok = false;
            }
          } catch (const InvalidNormalForm&) {
            ok = false;
          }
        }
        if (!ok) ++bad;
      }
  }
  v.pass = bad == 0;
  v.detail = std::to_string(checked) + " (M, a) pairs, " + std::to_string(normal) +
             " normalizable with validated MatrixRep, " + std::to_string(bad) + " wrong";
  return v;
}

// ---- 10 ----------------------------------------------------------------------

using Point = std::vector<long>;

Verdict hsp_suite() {
  Verdict v;
  std::mt19937_64 rng(10);
  int instances = 0, bad = 0;
  for (const char* name : {"Z2 x Z2 x Z2", "Z4 x Z2"}) {
    const auto G = ElementaryGroup::parse(name);
    const auto elems = enumerate(G);
    auto key = [](const RatVector& x) { return format_tuple(x); };
    auto closure = [&](const std::vector<RatVector>& gens) {
      std::set<std::string> seen{key(identity(G).coords)};
      std::vector<RatVector> out{identity(G).coords};
      for (std::size_t i = 0; i < out.size(); ++i)
        for (const auto& g : gens) {
          RatVector x = reduce(out[i] + g, G).coords;
          if (seen.insert(key(x)).second) out.push_back(x);
        }
      return seen;
    };
    // every subgroup is generated by at most two elements here
    std::set<std::set<std::string>> subgroups;
    std::map<std::set<std::string>, std::vector<RatVector>> members;
    for (const auto& a : elems)
      for (const auto& b : elems)
        for (const auto& c : elems) {
          auto H = closure({a.coords, b.coords, c.coords});
          if (subgroups.insert(H).second) {
            std::vector<RatVector> m;
            for (const auto& g : elems)
              if (H.count(key(g.coords))) m.push_back(g.coords);
            members[H] = m;
          }
        }
    for (const auto& H : subgroups) {
      ++instances;
      auto labels = std::make_shared<std::map<std::string, std::string>>();
      std::vector<int> ids(elems.size());
      for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
      std::shuffle(ids.begin(), ids.end(), rng);
      std::size_t next = 0;
      for (const auto& g : elems) {
        if (labels->count(key(g.coords))) continue;
        const std::string lab = "x" + std::to_string(ids[next++]);
        for (const auto& h : members[H]) (*labels)[key(reduce(g.coords + h, G).coords)] = lab;
      }
      KernelOptions opt;
      opt.seed = rng();
      auto run = solve_hsp({G, [labels, key](const RatVector& g) { return labels->at(key(g)); }}, opt);
      std::vector<RatVector> gens;
      for (Eigen::Index j = 0; j < run.generators.cols(); ++j) gens.push_back(run.generators.col(j).cast<Rational>());
      const bool certified = run.log["certificate"]["passed"] == true &&
                             run.log["certificate"]["modexp"]["normal_form"].contains("automorphism");
      if (closure(gens) != H || !certified) ++bad;
    }
  }
  v.pass = bad == 0;
  v.detail = std::to_string(instances) + " planted subgroups of Z2^3 and Z4 x Z2, " + std::to_string(bad) +
             " wrong or uncertified";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;
    std::function<Verdict()> run;
  };
  std::vector<Criterion> all{{1, "factoring", 60, factoring},
                             {2, "order-finding success floor", 30, order_floor},
                             {3, "discretization correspondence", 10, discretization},
                             {4, "discrete log", 120, dlog_suite},
                             {5, "elliptic-curve discrete log", 60, ecdlp},
                             {6, "group decomposition", 120, decomposition},
                             {7, "simulation theorem", 300, simulation_theorem},
                             {8, "normal-form extraction round trips", 120, extraction},
                             {9, "modexp no-go check", 10, modexp_nogo},
                             {10, "hidden subgroup suite", 60, hsp_suite}};
  int failed = 0;
  for (const auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::printf("%s %2d %s: %s [%.1f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                secs, c.budget, in_time ? "" : ", OVER");
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
