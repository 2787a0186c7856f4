#include "normsim/blackbox.hpp"

#include "normsim/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace normsim {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

u64 invmod(u64 a, u64 m) {
  Integer x, y;
  if (ext_gcd(Integer(a), Integer(m), x, y) != 1) throw std::domain_error("element is not invertible");
  return mod(x, Integer(m)).convert_to<u64>();
}

std::size_t bit_length(u64 v) {
  std::size_t n = 0;
  while (v) {
    ++n;
    v >>= 1;
  }
  return n;
}

bool parse_u64(const std::string& s, u64& out) {
  if (s.empty() || s.size() > 19) return false;
  u64 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<u64>(c - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::string BlackBoxGroup::mul(const std::string& x, const std::string& y) const {
  ++calls_;
  require_element(x);
  require_element(y);
  return do_mul(x, y);
}

std::string BlackBoxGroup::inv(const std::string& x) const {
  ++calls_;
  require_element(x);
  return do_inv(x);
}

std::string BlackBoxGroup::identity() const {
  ++calls_;
  return do_identity();
}

bool BlackBoxGroup::is_element(const std::string& x) const {
  ++calls_;
  return do_is_element(x);
}

std::string BlackBoxGroup::sample(std::mt19937_64& rng) const {
  ++calls_;
  return do_sample(rng);
}

void BlackBoxGroup::require_element(const std::string& x) const {
  if (!do_is_element(x)) throw std::invalid_argument("'" + x + "' is not an element of " + name());
}

// ---------------------------------------------------------------- Z_N^x

ZNStarGroup::ZNStarGroup(u64 N) : N_(N) {
  if (N < 2) throw std::invalid_argument("Z_N^x needs N >= 2");
}

std::string ZNStarGroup::name() const { return "Z" + std::to_string(N_) + "^x"; }

std::size_t ZNStarGroup::encoding_bits() const { return bit_length(N_); }

u64 ZNStarGroup::parse(const std::string& x) const {
  u64 v;
  if (!parse_u64(x, v)) throw std::invalid_argument("bad Z_N^x encoding '" + x + "'");
  return v;
}

bool ZNStarGroup::do_is_element(const std::string& x) const {
  u64 v;
  if (!parse_u64(x, v) || v == 0 || v >= N_) return false;
  if (x.size() > 1 && x[0] == '0') return false;
  return std::gcd(v, N_) == 1;
}

std::string ZNStarGroup::do_mul(const std::string& x, const std::string& y) const {
  return std::to_string(mulmod(parse(x), parse(y), N_));
}

std::string ZNStarGroup::do_inv(const std::string& x) const { return std::to_string(invmod(parse(x), N_)); }

std::string ZNStarGroup::do_sample(std::mt19937_64& rng) const {
  // rejection sampling of {0, ..., N-1} by gcd
  std::uniform_int_distribution<u64> d(0, N_ - 1);
  for (;;) {
    u64 v = d(rng);
    if (N_ == 2 && v == 1) return "1";
    if (v != 0 && std::gcd(v, N_) == 1) return std::to_string(v);
  }
}

std::vector<std::string> ZNStarGroup::elements() const {
  std::vector<std::string> out;
  for (u64 v = 1; v < N_; ++v)
    if (std::gcd(v, N_) == 1) out.push_back(std::to_string(v));
  return out;
}

// ---------------------------------------------------------------- E(F_p)

EllipticCurveGroup::EllipticCurveGroup(u64 p, u64 a, u64 b) : p_(p), a_(a % p), b_(b % p) {
  if (p <= 3 || !is_prime(p)) throw std::invalid_argument("elliptic curve needs a prime p > 3");
  // -16 (4 a^3 + 27 b^2) != 0 mod p
  u64 disc = (mulmod(4, powmod(a_, 3, p), p) + mulmod(27, mulmod(b_, b_, p), p)) % p;
  if (disc == 0) throw std::invalid_argument("singular curve: discriminant is zero");
}

std::string EllipticCurveGroup::point(u64 x, u64 y) { return "(" + std::to_string(x) + "," + std::to_string(y) + ")"; }

std::string EllipticCurveGroup::name() const {
  return "E(F" + std::to_string(p_) + "): y^2 = x^3 + " + std::to_string(a_) + "x + " + std::to_string(b_);
}

std::size_t EllipticCurveGroup::encoding_bits() const { return 2 * bit_length(p_) + 1; }

bool EllipticCurveGroup::on_curve(u64 x, u64 y) const {
  u64 lhs = mulmod(y, y, p_);
  u64 rhs = (powmod(x, 3, p_) + mulmod(a_, x, p_) + b_) % p_;
  return lhs == rhs;
}

EllipticCurveGroup::Affine EllipticCurveGroup::parse(const std::string& P) const {
  if (P == infinity) return {true, 0, 0};
  if (P.size() < 5 || P.front() != '(' || P.back() != ')')
    throw std::invalid_argument("bad curve point encoding '" + P + "'");
  auto comma = P.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("bad curve point encoding '" + P + "'");
  u64 x, y;
  if (!parse_u64(P.substr(1, comma - 1), x) || !parse_u64(P.substr(comma + 1, P.size() - comma - 2), y))
    throw std::invalid_argument("bad curve point encoding '" + P + "'");
  return {false, x, y};
}

bool EllipticCurveGroup::do_is_element(const std::string& P) const {
  if (P == infinity) return true;
  try {
    Affine a = parse(P);
    return a.x < p_ && a.y < p_ && point(a.x, a.y) == P && on_curve(a.x, a.y);
  } catch (const std::invalid_argument&) {
    return false;
  }
}

std::string EllipticCurveGroup::do_mul(const std::string& Ps, const std::string& Qs) const {
  Affine P = parse(Ps), Q = parse(Qs);
  if (P.inf) return Qs;
  if (Q.inf) return Ps;
  u64 p = p_;
  u64 lambda;
  if (P.x != Q.x) {
    // chord through P and Q
    lambda = mulmod((Q.y + p - P.y) % p, invmod((Q.x + p - P.x) % p, p), p);
  } else if (P.y == Q.y && P.y != 0) {
    // tangent at P
    lambda = mulmod((mulmod(3, mulmod(P.x, P.x, p), p) + a_) % p, invmod(mulmod(2, P.y, p), p), p);
  } else {
    return infinity;  // vertical line: Q = -P
  }
  // R is the third intersection of the line with the curve; the sum is -R.
  u64 xr = (mulmod(lambda, lambda, p) + 2 * p - P.x - Q.x) % p;
  u64 yr = (P.y + mulmod(lambda, (xr + p - P.x) % p, p)) % p;
  return point(xr, (p - yr) % p);
}

std::string EllipticCurveGroup::do_inv(const std::string& Ps) const {
  Affine P = parse(Ps);
  if (P.inf) return infinity;
  return point(P.x, (p_ - P.y) % p_);
}

std::string EllipticCurveGroup::do_sample(std::mt19937_64& rng) const {
  auto els = elements();
  std::uniform_int_distribution<std::size_t> d(0, els.size() - 1);
  return els[d(rng)];
}

std::vector<std::string> EllipticCurveGroup::elements() const {
  std::vector<std::string> out{infinity};
  for (u64 x = 0; x < p_; ++x)
    for (u64 y = 0; y < p_; ++y)
      if (on_curve(x, y)) out.push_back(point(x, y));
  return out;
}

// ---------------------------------------------------------------- helpers

std::string bb_pow(const BlackBoxGroup& B, const std::string& x, Integer e) {
  std::string base = x;
  if (e < 0) {
    base = B.inv(x);
    e = -e;
  }
  std::string result = B.identity();
  while (e > 0) {
    if ((e & 1) != 0) result = B.mul(result, base);
    e >>= 1;
    if (e > 0) base = B.mul(base, base);
  }
  return result;
}

std::string bb_word(const BlackBoxGroup& B, const std::vector<std::string>& gens, const IntVector& exps) {
  if (static_cast<std::size_t>(exps.size()) != gens.size()) throw std::invalid_argument("bb_word: length mismatch");
  std::string out = B.identity();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (exps(static_cast<Eigen::Index>(i)) == 0) continue;
    out = B.mul(out, bb_pow(B, gens[i], exps(static_cast<Eigen::Index>(i))));
  }
  return out;
}

Integer bb_order(const BlackBoxGroup& B, const std::string& a, std::uint64_t cap) {
  const std::string id = B.identity();
  std::string cur = a;
  for (std::uint64_t r = 1; r <= cap; ++r) {
    if (cur == id) return Integer(r);
    cur = B.mul(cur, a);
  }
  throw std::length_error("bb_order: order exceeds cap");
}

std::uint64_t bb_subgroup_size(const BlackBoxGroup& B, const std::vector<std::string>& gens, std::uint64_t cap) {
  std::unordered_set<std::string> seen{B.identity()};
  std::vector<std::string> frontier(seen.begin(), seen.end());
  while (!frontier.empty()) {
    std::string x = frontier.back();
    frontier.pop_back();
    for (const auto& g : gens) {
      std::string y = B.mul(x, g);
      if (seen.insert(y).second) {
        if (seen.size() > cap) throw std::length_error("bb_subgroup_size: exceeds cap");
        frontier.push_back(y);
      }
    }
  }
  return seen.size();
}

std::vector<std::string> bb_greedy_generators(const BlackBoxGroup& B) {
  auto els = B.elements();
  std::vector<std::string> gens;
  std::unordered_set<std::string> span{B.identity()};
  for (const auto& x : els) {
    if (span.count(x)) continue;
    gens.push_back(x);
    // extend the span by the new generator
    std::vector<std::string> frontier(span.begin(), span.end());
    while (!frontier.empty()) {
      std::string y = B.mul(frontier.back(), x);
      frontier.pop_back();
      if (span.insert(y).second) frontier.push_back(y);
    }
    if (span.size() == els.size()) break;
  }
  return gens;
}

std::vector<std::string> bb_sample_generators(const BlackBoxGroup& B, std::mt19937_64& rng) {
  const std::uint64_t n = B.elements().size();
  std::vector<std::string> gens;
  while (bb_subgroup_size(B, gens) < n) {
    std::string x = B.sample(rng);
    if (x != B.identity()) gens.push_back(x);
  }
  return gens;
}

std::vector<Integer> invariant_factors(const std::vector<Integer>& orders) {
  IntMatrix D = IntMatrix::Zero(static_cast<Eigen::Index>(orders.size()), static_cast<Eigen::Index>(orders.size()));
  for (std::size_t i = 0; i < orders.size(); ++i) D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = orders[i];
  auto s = smith_normal_form(D);
  std::vector<Integer> out;
  for (Eigen::Index i = 0; i < s.rank; ++i)
    if (s.D(i, i) != 1) out.push_back(s.D(i, i));
  return out;
}

std::vector<Integer> DecompositionTable::invariant_factors() const {
  std::vector<Integer> orders(c.data(), c.data() + c.size());
  return normsim::invariant_factors(orders);
}

std::string DecompositionTable::type_string() const {
  auto f = invariant_factors();
  if (f.empty()) return "1";
  std::string out;
  for (auto it = f.rbegin(); it != f.rend(); ++it) {
    if (!out.empty()) out += " x ";
    out += "Z" + it->str();
  }
  return out;
}

DecompositionTable decomposition_from_relations(const BlackBoxGroup& B, const std::vector<std::string>& alpha,
                                                const IntMatrix& relations) {
  const Eigen::Index k = static_cast<Eigen::Index>(alpha.size());
  if (relations.rows() != k) throw std::invalid_argument("relation lattice has the wrong dimension");
  auto s = smith_normal_form(relations);
  if (s.rank != k) throw std::domain_error("relation lattice is not full rank");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < k; ++i)
    if (s.D(i, i) != 1) keep.push_back(i);
  // largest invariants first
  std::sort(keep.begin(), keep.end(), [&](Eigen::Index x, Eigen::Index y) { return s.D(x, x) > s.D(y, y); });
  const Eigen::Index l = static_cast<Eigen::Index>(keep.size());
  DecompositionTable T;
  T.alpha = alpha;
  T.A = IntMatrix(k, l);
  T.B = IntMatrix(l, k);
  T.c = IntVector(l);
  for (Eigen::Index j = 0; j < l; ++j) {
    T.c(j) = s.D(keep[j], keep[j]);
    T.A.col(j) = s.U.col(keep[j]);
    for (Eigen::Index i = 0; i < k; ++i) T.B(j, i) = mod(s.U_inv(keep[j], i), T.c(j));
    T.beta.push_back(bb_word(B, alpha, T.A.col(j)));
  }
  return T;
}

DecompositionTable bb_decompose_bruteforce(const BlackBoxGroup& B, const std::vector<std::string>& alpha,
                                           std::uint64_t cap) {
  const std::uint64_t n = B.elements().size();
  if (n > cap) throw std::length_error("bb_decompose_bruteforce: group order exceeds cap");
  const Eigen::Index k = static_cast<Eigen::Index>(alpha.size());
  std::unordered_map<std::string, IntVector> table{{B.identity(), IntVector::Zero(k)}};
  IntMatrix rel = IntMatrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    // smallest e >= 1 with alpha_i^e already in <alpha_0..alpha_{i-1}>
    std::string cur = alpha[i];
    Integer e = 1;
    while (!table.count(cur)) {
      cur = B.mul(cur, alpha[i]);
      ++e;
    }
    rel.col(i) = -table.at(cur);
    rel(i, i) += e;
    std::vector<std::pair<std::string, IntVector>> old(table.begin(), table.end());
    std::string step = B.identity();
    for (Integer t = 1; t < e; ++t) {
      step = B.mul(step, alpha[i]);
      for (const auto& [h, x] : old) {
        IntVector y = x;
        y(i) += t;
        table.emplace(B.mul(h, step), y);
      }
    }
  }
  if (table.size() != n) throw std::invalid_argument("bb_decompose_bruteforce: alpha does not generate the group");
  return decomposition_from_relations(B, alpha, rel);
}

std::string verify_decomposition(const BlackBoxGroup& B, const DecompositionTable& T, std::uint64_t cap, bool onto) {
  const Eigen::Index k = static_cast<Eigen::Index>(T.alpha.size());
  const Eigen::Index l = static_cast<Eigen::Index>(T.beta.size());
  if (T.A.rows() != k || T.A.cols() != l || T.B.rows() != l || T.B.cols() != k || T.c.size() != l)
    return "matrix dimensions inconsistent";
  for (Eigen::Index j = 0; j < l; ++j) {
    if (bb_word(B, T.alpha, T.A.col(j)) != T.beta[j]) return "beta_" + std::to_string(j) + " != alpha^A";
    if (bb_order(B, T.beta[j], cap) != T.c(j)) return "order of beta_" + std::to_string(j) + " != c";
  }
  for (Eigen::Index i = 0; i < k; ++i)
    if (bb_word(B, T.beta, T.B.col(i)) != T.alpha[i]) return "alpha_" + std::to_string(i) + " != beta^B";
  // the map (+)Z_c -> B must be injective, and onto when asked
  Integer total = 1;
  for (Eigen::Index j = 0; j < l; ++j) total *= T.c(j);
  if (onto && total != Integer(B.elements().size())) return "prod c != |B|";
  if (total > cap) throw std::length_error("verify_decomposition: group larger than cap");
  std::unordered_set<std::string> seen;
  IntVector y = IntVector::Zero(l);
  for (;;) {
    if (!seen.insert(bb_word(B, T.beta, y)).second) return "beta words are not distinct";
    Eigen::Index j = l - 1;
    while (j >= 0 && ++y(j) == T.c(j)) y(j--) = 0;
    if (j < 0) break;
  }
  return {};
}

std::unordered_map<std::string, IntVector> bb_log_table(const BlackBoxGroup& B, const DecompositionTable& T,
                                                        std::uint64_t cap) {
  const Eigen::Index l = T.c.size();
  Integer total = 1;
  for (Eigen::Index j = 0; j < l; ++j) total *= T.c(j);
  if (total > cap) throw std::length_error("bb_log_table: group larger than cap");
  std::unordered_map<std::string, IntVector> out;
  IntVector y = IntVector::Zero(l);
  std::string x = B.identity();
  // odometer; rolling digit j over multiplies by beta_j^c_j = 1 as well
  for (;;) {
    out.emplace(x, y);
    Eigen::Index j = l - 1;
    for (; j >= 0; --j) {
      x = B.mul(x, T.beta[static_cast<std::size_t>(j)]);
      if (++y(j) < T.c(j)) break;
      y(j) = 0;
    }
    if (j < 0) break;
  }
  return out;
}

std::optional<IntVector> bb_discrete_log_bruteforce(const BlackBoxGroup& B, const DecompositionTable& T,
                                                    const std::string& x, std::uint64_t cap) {
  auto table = bb_log_table(B, T, cap);
  auto it = table.find(x);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

}  // namespace normsim
