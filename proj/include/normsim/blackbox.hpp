#pragma once

#include "normsim/scalar.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace normsim {

// Finite Abelian group whose elements are unique strings. Each call to mul,
// inv, identity or is_element is one oracle query and is counted.
class BlackBoxGroup {
 public:
  virtual ~BlackBoxGroup() = default;

  virtual std::string name() const = 0;
  virtual std::size_t encoding_bits() const = 0;

  std::string mul(const std::string& x, const std::string& y) const;
  std::string inv(const std::string& x) const;
  std::string identity() const;
  bool is_element(const std::string& x) const;
  // Uniformly random element (one oracle query).
  std::string sample(std::mt19937_64& rng) const;

  // Exhaustive element list in a fixed order; desk-scale helper, not counted.
  virtual std::vector<std::string> elements() const = 0;

  std::uint64_t oracle_calls() const { return calls_.load(); }
  void reset_oracle_calls() const { calls_.store(0); }

 protected:
  virtual std::string do_mul(const std::string& x, const std::string& y) const = 0;
  virtual std::string do_inv(const std::string& x) const = 0;
  virtual std::string do_identity() const = 0;
  virtual bool do_is_element(const std::string& x) const = 0;
  virtual std::string do_sample(std::mt19937_64& rng) const = 0;
  void require_element(const std::string& x) const;

 private:
  mutable std::atomic<std::uint64_t> calls_{0};
};

using BlackBoxPtr = std::shared_ptr<const BlackBoxGroup>;

class ZNStarGroup final : public BlackBoxGroup {
 public:
  explicit ZNStarGroup(std::uint64_t N);
  std::uint64_t modulus() const { return N_; }

  std::string name() const override;
  std::size_t encoding_bits() const override;
  std::vector<std::string> elements() const override;

 protected:
  std::string do_mul(const std::string& x, const std::string& y) const override;
  std::string do_inv(const std::string& x) const override;
  std::string do_identity() const override { return "1"; }
  bool do_is_element(const std::string& x) const override;
  std::string do_sample(std::mt19937_64& rng) const override;

 private:
  std::uint64_t N_;
  std::uint64_t parse(const std::string& x) const;
};

// y^2 = x^3 + a x + b over F_p, p > 3 prime. "O" encodes the point at
// infinity, affine points are "(x,y)" with coordinates in [0, p).
class EllipticCurveGroup final : public BlackBoxGroup {
 public:
  EllipticCurveGroup(std::uint64_t p, std::uint64_t a, std::uint64_t b);
  std::uint64_t prime() const { return p_; }
  std::uint64_t a() const { return a_; }
  std::uint64_t b() const { return b_; }

  static std::string point(std::uint64_t x, std::uint64_t y);
  static constexpr const char* infinity = "O";

  std::string name() const override;
  std::size_t encoding_bits() const override;
  std::vector<std::string> elements() const override;

 protected:
  std::string do_mul(const std::string& P, const std::string& Q) const override;
  std::string do_inv(const std::string& P) const override;
  std::string do_identity() const override { return infinity; }
  bool do_is_element(const std::string& P) const override;
  std::string do_sample(std::mt19937_64& rng) const override;

 private:
  std::uint64_t p_, a_, b_;
  struct Affine {
    bool inf;
    std::uint64_t x, y;
  };
  Affine parse(const std::string& P) const;
  bool on_curve(std::uint64_t x, std::uint64_t y) const;
};

// x^e by square-and-multiply; negative exponents go through inv.
std::string bb_pow(const BlackBoxGroup& B, const std::string& x, Integer e);
// prod_i gens[i]^exps[i]
std::string bb_word(const BlackBoxGroup& B, const std::vector<std::string>& gens, const IntVector& exps);
// Brute-force order; throws std::length_error past the cap.
Integer bb_order(const BlackBoxGroup& B, const std::string& a, std::uint64_t cap = 1u << 20);
// Size of <gens> by closure; desk scale only.
std::uint64_t bb_subgroup_size(const BlackBoxGroup& B, const std::vector<std::string>& gens,
                               std::uint64_t cap = 1u << 20);
// Deterministic generating set: scan elements() in order and keep those not in
// the span of the ones kept so far.
std::vector<std::string> bb_greedy_generators(const BlackBoxGroup& B);
// Random generating set, sampling until the closure is the whole group.
std::vector<std::string> bb_sample_generators(const BlackBoxGroup& B, std::mt19937_64& rng);

// beta_j = prod_i alpha_i^A(i,j) and alpha_i = prod_j beta_j^B(j,i), with
// B = <beta_1> (+) ... (+) <beta_l> and |beta_j| = c_j.
struct DecompositionTable {
  std::vector<std::string> alpha, beta;
  IntMatrix A, B;
  IntVector c;

  // c rewritten as invariant factors d_1 | d_2 | ..., ones dropped
  std::vector<Integer> invariant_factors() const;
  std::string type_string() const;
};

// Builds beta, A, B, c from a full-rank lattice of relations among alpha
// (columns of `relations`). B is read off the unimodular SNF transform.
DecompositionTable decomposition_from_relations(const BlackBoxGroup& B, const std::vector<std::string>& alpha,
                                                const IntMatrix& relations);

// Classical reference: relation lattice by exhaustive coset growth.
DecompositionTable bb_decompose_bruteforce(const BlackBoxGroup& B, const std::vector<std::string>& alpha,
                                           std::uint64_t cap = 1u << 20);

// Exhaustive audit of every table invariant; returns an empty string when all
// hold, otherwise a description of the first failure. With onto = false the
// table only has to decompose <alpha>, not all of B.
std::string verify_decomposition(const BlackBoxGroup& B, const DecompositionTable& T, std::uint64_t cap = 1u << 20,
                                 bool onto = true);

std::vector<Integer> invariant_factors(const std::vector<Integer>& orders);

// Every element of B keyed to its exponent vector over T.beta; the table must
// be a valid decomposition.
std::unordered_map<std::string, IntVector> bb_log_table(const BlackBoxGroup& B, const DecompositionTable& T,
                                                        std::uint64_t cap = 1u << 20);
// Exhaustive search for y with prod beta_j^y_j = x, 0 <= y_j < c_j.
std::optional<IntVector> bb_discrete_log_bruteforce(const BlackBoxGroup& B, const DecompositionTable& T,
                                                    const std::string& x, std::uint64_t cap = 1u << 20);

}  // namespace normsim
