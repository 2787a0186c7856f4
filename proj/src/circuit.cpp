#include "normsim/circuit.hpp"

#include <set>

namespace normsim {

namespace {

using Kind = Factor::Kind;

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Z: return "Z";
    case Kind::T: return "T";
    case Kind::Cyclic: return "Z_N";
  }
  return "?";
}

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

bool has_infinite(const ElementaryGroup& G) { return !G.is_finite(); }

}  // namespace

std::string gate_kind(const Gate& g) {
  return std::visit(overloaded{[](const QFTGate&) { return std::string("qft"); },
                               [](const AutomorphismGate&) { return std::string("automorphism"); },
                               [](const QuadraticGate&) { return std::string("quadratic"); },
                               [](const BlackBoxAutomorphismGate&) { return std::string("bb_automorphism"); },
                               [](const BlackBoxQuadraticGate&) { return std::string("bb_quadratic"); },
                               [](const ModExpGate&) { return std::string("modexp"); }},
                    g);
}

bool is_blackbox_gate(const Gate& g) {
  return std::holds_alternative<BlackBoxAutomorphismGate>(g) || std::holds_alternative<BlackBoxQuadraticGate>(g) ||
         std::holds_alternative<ModExpGate>(g);
}

DesignatedBasis apply_qft_basis_update(const DesignatedBasis& basis, const QFTGate& qft) {
  const std::size_t n = basis.labels.size();
  if (!qft.over.empty() && qft.over.size() != qft.registers.size())
    throw std::invalid_argument("qft: 'over' must name one kind per register");
  std::vector<Factor> f = basis.labels.factors();
  std::set<std::size_t> seen;
  for (std::size_t k = 0; k < qft.registers.size(); ++k) {
    std::size_t r = qft.registers[k];
    if (r == n && basis.has_slot()) throw std::invalid_argument("qft targets the black-box slot");
    if (r >= n) throw std::invalid_argument("qft register " + std::to_string(r) + " out of range");
    if (!seen.insert(r).second) throw std::invalid_argument("qft register " + std::to_string(r) + " repeated");
    if (!qft.over.empty() && qft.over[k] != f[r].kind)
      throw std::invalid_argument("qft over " + std::string(kind_name(qft.over[k])) + " on register " +
                                  std::to_string(r) + " whose current label is " + kind_name(f[r].kind));
    if (f[r].kind == Kind::Z)
      f[r] = Factor::torus();
    else if (f[r].kind == Kind::T)
      f[r] = Factor::integers();
  }
  return DesignatedBasis{ElementaryGroup(std::move(f)), basis.blackbox};
}

std::vector<DesignatedBasis> NormalizerCircuit::trace() const {
  std::vector<DesignatedBasis> out{initial};
  for (const auto& g : gates) {
    if (const auto* q = std::get_if<QFTGate>(&g))
      out.push_back(apply_qft_basis_update(out.back(), *q));
    else
      out.push_back(out.back());
  }
  return out;
}

std::size_t NormalizerCircuit::qft_count() const {
  std::size_t n = 0;
  for (const auto& g : gates) n += std::holds_alternative<QFTGate>(g);
  return n;
}

bool NormalizerCircuit::has_blackbox_gates() const {
  for (const auto& g : gates)
    if (is_blackbox_gate(g)) return true;
  return false;
}

void validate_circuit(const NormalizerCircuit& c) {
  DesignatedBasis basis = c.initial;
  for (std::size_t t = 0; t < c.gates.size(); ++t) {
    const ElementaryGroup& L = basis.labels;
    auto fail = [t](const std::string& what) { throw CircuitError(t, what); };
    std::visit(overloaded{
                   [&](const QFTGate& q) {
                     try {
                       basis = apply_qft_basis_update(basis, q);
                     } catch (const std::invalid_argument& e) {
                       fail(e.what());
                     }
                   },
                   [&](const AutomorphismGate& a) {
                     if (!(a.rep.group == L))
                       fail("automorphism is over " + a.rep.group.str() + " but the basis labels are " + L.str());
                   },
                   [&](const QuadraticGate& q) {
                     if (!(q.form.group == L))
                       fail("quadratic phase is over " + q.form.group.str() + " but the basis labels are " + L.str());
                   },
                   [&](const BlackBoxAutomorphismGate& b) {
                     if (!b.f) fail("black-box automorphism '" + b.name + "' has no oracle");
                     if (has_infinite(L) && !b.n_out) fail("black-box gate on infinite registers needs n_out");
                   },
                   [&](const BlackBoxQuadraticGate& b) {
                     if (!b.q) fail("black-box phase '" + b.name + "' has no oracle");
                     if (has_infinite(L) && !b.n_out) fail("black-box gate on infinite registers needs n_out");
                   },
                   [&](const ModExpGate& m) {
                     if (!basis.has_slot()) fail("modexp needs a black-box slot");
                     if (m.bases.size() != m.controls.size()) fail("modexp needs one control per base");
                     std::set<std::size_t> seen;
                     bool infinite = false;
                     for (std::size_t k = 0; k < m.controls.size(); ++k) {
                       std::size_t r = m.controls[k];
                       if (r >= L.size()) fail("modexp control " + std::to_string(r) + " out of range");
                       if (!seen.insert(r).second) fail("modexp control " + std::to_string(r) + " repeated");
                       if (L[r].kind == Kind::T) fail("modexp control " + std::to_string(r) + " is in the Fourier basis");
                       infinite = infinite || L[r].kind == Kind::Z;
                       if (!basis.blackbox->is_element(m.bases[k]))
                         fail("modexp base '" + m.bases[k] + "' is not in " + basis.blackbox->name());
                     }
                     if (infinite && !m.n_out) fail("black-box gate on infinite registers needs n_out");
                   },
               },
               c.gates[t]);
  }
}

ModExpCheck check_modexp_normalizable(const Integer& M, const BlackBoxGroup& B, const std::string& a,
                                      std::uint64_t cap) {
  if (M < 0) throw std::invalid_argument("check_modexp_normalizable: M must be >= 0");
  ModExpCheck out;
  out.order = bb_order(B, a, cap);
  out.normalizable = M == 0 || M % out.order == 0;
  if (!out.normalizable) return out;

  out.table = bb_decompose_bruteforce(B, bb_greedy_generators(B), cap);
  const auto& table = out.table;
  auto y = bb_discrete_log_bruteforce(B, table, a, cap);
  if (!y) throw std::logic_error("check_modexp_normalizable: base outside its own group");
  std::vector<Factor> f{M == 0 ? Factor::integers() : Factor::cyclic(M)};
  for (Eigen::Index i = 0; i < table.c.size(); ++i) f.push_back(Factor::cyclic(table.c(i)));
  out.group = ElementaryGroup(std::move(f));
  const auto n = static_cast<Eigen::Index>(out.group.size());
  RatMatrix A = RatMatrix::Identity(n, n);
  for (Eigen::Index i = 0; i < table.c.size(); ++i) A(i + 1, 0) = Rational((*y)(i));
  out.rep = validate_matrix_rep(A, out.group);
  return out;
}

}  // namespace normsim
