#pragma once

#include "normsim/deblackbox.hpp"

namespace normsim {

// Inputs outside an algorithm's preconditions (prime N, non-generator, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Post-processing did not succeed within the configured repetitions.
class AttemptsExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Draws single measurement outcomes of a run. Uses dense_run when
// |G| * |B| fits under the cap, otherwise deblackbox_circuit + coset_sample.
class OutcomeSampler {
 public:
  OutcomeSampler(const CircuitRun& run, std::uint64_t cap = default_dense_cap(),
                 const DecompositionOracle& oracle = bruteforce_decomposition);

  Outcome sample(std::mt19937_64& rng);
  // Exact probability of a sampled outcome.
  double probability(const Outcome& o) const;
  // "dense" or "structured"
  const std::string& engine() const { return engine_; }

 private:
  std::string engine_;
  double uniform_ = 0;
  std::optional<DenseState> dense_;
  std::discrete_distribution<std::uint64_t> pick_;
  std::optional<CosetPhaseState> coset_;
  std::optional<EncodingBridge> bridge_;
  std::size_t explicit_ = 0;
};

// Oracle calls split between classical post-processing and the simulator.
struct CallMeter {
  const BlackBoxGroup* B = nullptr;
  std::uint64_t simulator = 0, start = 0;

  explicit CallMeter(const BlackBoxGroup& g) : B(&g), start(g.oracle_calls()) {}
  // Runs f and books its calls as simulator calls.
  template <class F>
  decltype(auto) simulate(F&& f) {
    struct Book {
      CallMeter& m;
      std::uint64_t before;
      ~Book() { m.simulator += m.B->oracle_calls() - before; }
    } book{*this, B->oracle_calls()};
    return f();
  }
  json to_json() const;
};

// ---- order finding and factoring --------------------------------------------

struct OrderOptions {
  std::optional<Integer> order_bound;  // defaults to 2^encoding_bits
  std::optional<std::uint64_t> comb_M;  // defaults to order_bound^2
  // Dirichlet samples the infinite-register distribution in closed form;
  // Dense runs QFT, modexp, QFT over Z_(2M+1) x B.
  enum class Engine { Dirichlet, Dense } engine = Engine::Dirichlet;
  DirichletOptions dirichlet;
  int max_pairs = 30;
  std::uint64_t seed = 1;
  std::uint64_t cap = default_dense_cap();
};

struct OrderFindingRun {
  std::string a;
  std::uint64_t M = 0;
  std::vector<double> samples;
  Integer r;
  json log;
};

OrderFindingRun find_order(const BlackBoxGroup& B, const std::string& a, const OrderOptions& opt = {});

struct FactorOptions {
  int attempts = 10;
  std::uint64_t seed = 1;
  OrderOptions order;  // its seed is derived per attempt
};

struct FactorRun {
  std::uint64_t N = 0, d = 0;
  json log;
};

// Nontrivial divisor of N. Even N returns 2 without any quantum step.
FactorRun factor(std::uint64_t N, const FactorOptions& opt = {});

// ---- discrete logarithms ----------------------------------------------------

struct DlogOptions {
  int repetitions = 10;
  std::uint64_t seed = 1;
  std::uint64_t cap = default_dense_cap();
};

struct DlogRun {
  Integer s;
  std::vector<std::pair<Integer, Integer>> pairs;
  json log;
};

// s with a^s = b mod p over Z_(p-1)^2 x Z_p^*; AttemptsExhausted when the n
// sampled pairs do not fix s.
DlogRun discrete_log(std::uint64_t p, std::uint64_t a, std::uint64_t b, const DlogOptions& opt = {});

struct EcdlogOptions {
  int max_samples = 64;
  std::uint64_t seed = 1;
  std::uint64_t cap = default_dense_cap();
  OrderOptions order;
};

// s with s.a = b, 0 <= s < |a|; PreconditionError when b is not in <a>.
DlogRun ec_discrete_log(const EllipticCurveGroup& E, const std::string& a, const std::string& b,
                        const EcdlogOptions& opt = {});

// ---- hidden subgroups and kernels --------------------------------------------

// Value set of f: G -> X with x.y = f(g_x + g_y) for stored preimages g_x.
// Isomorphic to G/H when f hides H. Every evaluation of f is counted.
class OracularGroup final : public BlackBoxGroup {
 public:
  using Oracle = std::function<std::string(const RatVector&)>;
  OracularGroup(ElementaryGroup G, Oracle f);

  const ElementaryGroup& domain() const { return G_; }
  std::string evaluate(const RatVector& g) const;
  std::uint64_t evaluations() const { return evals_; }
  const RatVector& preimage(const std::string& x) const;

  std::string name() const override { return "oracular(" + G_.str() + ")"; }
  std::size_t encoding_bits() const override;
  std::vector<std::string> elements() const override { return values_; }

 protected:
  std::string do_mul(const std::string& x, const std::string& y) const override;
  std::string do_inv(const std::string& x) const override;
  std::string do_identity() const override { return zero_; }
  bool do_is_element(const std::string& x) const override { return pre_.count(x) > 0; }
  std::string do_sample(std::mt19937_64& rng) const override;

 private:
  ElementaryGroup G_;
  Oracle f_;
  mutable std::uint64_t evals_ = 0;
  std::vector<std::string> values_;
  std::unordered_map<std::string, RatVector> pre_;
  std::string zero_;
};

struct HSPInstance {
  ElementaryGroup G;  // finite cyclic factors only
  OracularGroup::Oracle f;
};

struct KernelOptions {
  int max_samples = 64;
  std::uint64_t seed = 1;
  std::uint64_t cap = default_dense_cap();
};

struct KernelRun {
  IntMatrix generators;  // columns, reduced, zero columns dropped
  json log;
};

// Generating set of the hidden subgroup; the modexp gate over G x O is
// certified as a validated MatrixRep in the log.
KernelRun solve_hsp(const HSPInstance& inst, const KernelOptions& opt = {});

// Kernel of g -> prod images[i]^g_i from G to B.
KernelRun solve_hkp(const ElementaryGroup& G, const BlackBoxPtr& B, const std::vector<std::string>& images,
                    const KernelOptions& opt = {});

struct LinearSystemRun {
  std::optional<IntVector> x0;  // nullopt: b is not in the image
  IntMatrix K;
  json log;
};

// All x with prod images[i]^x_i = b, as x0 + <K>.
LinearSystemRun solve_linear_system_bb(const ElementaryGroup& G, const BlackBoxPtr& B,
                                       const std::vector<std::string>& images, const std::string& b,
                                       const KernelOptions& opt = {});

// ---- group decomposition ----------------------------------------------------

struct DecomposeOptions {
  std::uint64_t seed = 1;
  std::uint64_t cap = default_dense_cap();
  int max_samples = 64;
  OrderOptions order;
};

struct DecomposeRun {
  DecompositionTable table;
  bool classical_fallback = false;
  json log;
};

// Orders by find_order, relations by the kernel circuit over
// Z_d1 x ... x Z_dk x B, then SNF for beta and A and the integral
// pseudo-inverse for B. The result passes verify_decomposition.
DecomposeRun decompose_group(const BlackBoxPtr& B, const std::vector<std::string>& alpha,
                             const DecomposeOptions& opt = {});

struct MultiDlogRun {
  IntVector x;
  json log;
};

// x with prod beta_j^x_j = b, 0 <= x_j < |beta_j|.
MultiDlogRun multivariate_dlog(const BlackBoxPtr& B, const std::vector<std::string>& beta, const std::string& b,
                               const DecomposeOptions& opt = {});

}  // namespace normsim
