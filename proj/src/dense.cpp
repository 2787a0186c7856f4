#include "normsim/simulators.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace normsim {

namespace {

using cd = std::complex<double>;

std::complex<double> unit(const Rational& q) {
  double t = 2 * std::numbers::pi * to_double(frac(q));
  return {std::cos(t), std::sin(t)};
}

std::uint64_t explicit_size(const DenseState& s) { return static_cast<std::uint64_t>(s.amp.size()) / s.slot_size(); }

// new[perm[i]] = old[i] on the explicit index, slot untouched
void permute_explicit(DenseState& s, const std::vector<std::uint64_t>& perm) {
  const std::size_t B = s.slot_size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(s.amp.size());
  for (std::uint64_t i = 0; i < perm.size(); ++i)
    for (std::size_t b = 0; b < B; ++b)
      out(static_cast<Eigen::Index>(perm[i] * B + b)) = s.amp(static_cast<Eigen::Index>(i * B + b));
  s.amp = std::move(out);
}

std::vector<std::uint64_t> check_permutation(std::vector<std::uint64_t> perm, const std::string& what) {
  std::vector<bool> hit(perm.size(), false);
  for (auto p : perm) {
    if (p >= perm.size() || hit[p]) throw std::invalid_argument(what + " is not a bijection");
    hit[p] = true;
  }
  return perm;
}

void apply_qft(DenseState& s, std::size_t r) {
  const ElementaryGroup& G = s.group;
  if (r >= G.size()) throw std::invalid_argument("qft register out of range");
  const auto N = G[r].N.convert_to<std::int64_t>();
  std::uint64_t inner = s.slot_size();
  for (std::size_t i = r + 1; i < G.size(); ++i) inner *= G[i].N.convert_to<std::uint64_t>();
  const std::uint64_t outer = static_cast<std::uint64_t>(s.amp.size()) / (inner * static_cast<std::uint64_t>(N));
  Eigen::MatrixXcd F(N, N);
  const double norm = 1 / std::sqrt(static_cast<double>(N));
  for (std::int64_t y = 0; y < N; ++y)
    for (std::int64_t x = 0; x < N; ++x) {
      double t = 2 * std::numbers::pi * static_cast<double>((x * y) % N) / static_cast<double>(N);
      F(y, x) = norm * cd(std::cos(t), std::sin(t));
    }
  Eigen::VectorXcd fiber(N);
  for (std::uint64_t o = 0; o < outer; ++o)
    for (std::uint64_t in = 0; in < inner; ++in) {
      const std::uint64_t base = o * static_cast<std::uint64_t>(N) * inner + in;
      for (std::int64_t x = 0; x < N; ++x) fiber(x) = s.amp(static_cast<Eigen::Index>(base + x * inner));
      Eigen::VectorXcd out = F * fiber;
      for (std::int64_t y = 0; y < N; ++y) s.amp(static_cast<Eigen::Index>(base + y * inner)) = out(y);
    }
}

}  // namespace

std::uint64_t default_dense_cap() {
  if (const char* env = std::getenv("NORMSIM_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 4096;
}

DenseState dense_basis_state(const DesignatedBasis& basis, const RatVector& input, const std::string& bb_input,
                             std::uint64_t cap) {
  if (!basis.labels.is_finite()) throw std::invalid_argument("dense simulation needs finite registers only");
  DenseState s;
  s.group = basis.labels;
  s.blackbox = basis.blackbox;
  std::uint64_t dim = finite_order(basis.labels, cap);
  if (s.blackbox) {
    s.slot = s.blackbox->elements();
    for (std::size_t i = 0; i < s.slot.size(); ++i) s.slot_index.emplace(s.slot[i], i);
    dim *= s.slot.size();
  }
  if (dim > cap) throw std::length_error("dense dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(cap));
  s.amp = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  std::uint64_t idx = element_index(s.group, reduce(input, s.group).coords) * s.slot_size();
  if (s.blackbox) {
    auto it = s.slot_index.find(bb_input);
    if (it == s.slot_index.end()) throw std::invalid_argument("slot input '" + bb_input + "' is not in the group");
    idx += it->second;
  }
  s.amp(static_cast<Eigen::Index>(idx)) = 1;
  return s;
}

void dense_apply(DenseState& s, const Gate& g) {
  const ElementaryGroup& G = s.group;
  const std::uint64_t E = explicit_size(s);
  const std::size_t B = s.slot_size();
  if (const auto* q = std::get_if<QFTGate>(&g)) {
    for (auto r : q->registers) apply_qft(s, r);
  } else if (const auto* a = std::get_if<AutomorphismGate>(&g)) {
    std::vector<std::uint64_t> perm(E);
    for (std::uint64_t i = 0; i < E; ++i) perm[i] = element_index(G, a->rep.apply(element_at(G, i)));
    permute_explicit(s, perm);
  } else if (const auto* b = std::get_if<BlackBoxAutomorphismGate>(&g)) {
    std::vector<std::uint64_t> perm(E);
    for (std::uint64_t i = 0; i < E; ++i) perm[i] = element_index(G, reduce(b->f(element_at(G, i)), G).coords);
    permute_explicit(s, check_permutation(std::move(perm), "black-box automorphism '" + b->name + "'"));
  } else if (const auto* q = std::get_if<QuadraticGate>(&g)) {
    for (std::uint64_t i = 0; i < E; ++i) {
      cd ph = unit(q->form.phase(element_at(G, i)));
      for (std::size_t k = 0; k < B; ++k) s.amp(static_cast<Eigen::Index>(i * B + k)) *= ph;
    }
  } else if (const auto* q = std::get_if<BlackBoxQuadraticGate>(&g)) {
    for (std::uint64_t i = 0; i < E; ++i) {
      cd ph = unit(q->q(element_at(G, i)));
      for (std::size_t k = 0; k < B; ++k) s.amp(static_cast<Eigen::Index>(i * B + k)) *= ph;
    }
  } else if (const auto* m = std::get_if<ModExpGate>(&g)) {
    if (!s.blackbox) throw std::invalid_argument("modexp without a black-box slot");
    const BlackBoxGroup& bb = *s.blackbox;
    std::unordered_map<std::string, std::vector<std::size_t>> perms;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(s.amp.size());
    for (std::uint64_t i = 0; i < E; ++i) {
      RatVector x = element_at(G, i);
      std::string h = bb.identity();
      for (std::size_t k = 0; k < m->bases.size(); ++k)
        h = bb.mul(h, bb_pow(bb, m->bases[k], numerator(x(static_cast<Eigen::Index>(m->controls[k])))));
      auto it = perms.find(h);
      if (it == perms.end()) {
        std::vector<std::size_t> p(B);
        for (std::size_t k = 0; k < B; ++k) p[k] = s.slot_index.at(bb.mul(h, s.slot[k]));
        it = perms.emplace(h, std::move(p)).first;
      }
      for (std::size_t k = 0; k < B; ++k)
        out(static_cast<Eigen::Index>(i * B + it->second[k])) = s.amp(static_cast<Eigen::Index>(i * B + k));
    }
    s.amp = std::move(out);
  }
}

DenseState dense_run(const NormalizerCircuit& c, const RatVector& input, const std::string& bb_input,
                     std::uint64_t cap) {
  validate_circuit(c);
  DenseState s = dense_basis_state(c.initial, input, bb_input, cap);
  for (const auto& g : c.gates) dense_apply(s, g);
  return s;
}

std::vector<double> dense_probabilities(const DenseState& s) {
  std::vector<double> p(static_cast<std::size_t>(s.amp.size()));
  for (Eigen::Index i = 0; i < s.amp.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(s.amp(i));
  return p;
}

Outcome dense_outcome(const DenseState& s, std::uint64_t index) {
  const std::size_t B = s.slot_size();
  Outcome o;
  o.x = element_at(s.group, index / B);
  if (!s.slot.empty()) o.b = s.slot[index % B];
  return o;
}

std::string outcome_label(const Outcome& o) {
  std::string out = format_tuple(o.x);
  if (!o.b.empty()) out += " | " + o.b;
  return out;
}

std::map<std::uint64_t, std::uint64_t> dense_sample(const DenseState& s, std::uint64_t shots, std::mt19937_64& rng) {
  auto p = dense_probabilities(s);
  std::discrete_distribution<std::uint64_t> dist(p.begin(), p.end());
  std::map<std::uint64_t, std::uint64_t> hist;
  for (std::uint64_t t = 0; t < shots; ++t) ++hist[dist(rng)];
  return hist;
}

std::string histogram_csv(const DenseState& s, const std::map<std::uint64_t, std::uint64_t>& hist) {
  std::uint64_t total = 0;
  for (const auto& [k, n] : hist) total += n;
  std::ostringstream os;
  os << "outcome,count,probability\n";
  for (const auto& [k, n] : hist)
    os << '"' << outcome_label(dense_outcome(s, k)) << "\"," << n << ','
       << static_cast<double>(n) / static_cast<double>(total) << '\n';
  return os.str();
}

double distance_up_to_phase(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0;
  Eigen::Index k;
  a.cwiseAbs().maxCoeff(&k);
  cd phase = 1;
  if (std::abs(b(k)) > 1e-12) phase = a(k) / b(k) * std::abs(b(k)) / std::abs(a(k));
  return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace normsim
