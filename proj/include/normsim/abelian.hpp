#pragma once

#include "normsim/scalar.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace normsim {

struct Factor {
  enum class Kind { Z, T, Cyclic };
  Kind kind = Kind::Z;
  Integer N = 0;  // only meaningful for Cyclic

  static Factor integers() { return {Kind::Z, 0}; }
  static Factor torus() { return {Kind::T, 0}; }
  static Factor cyclic(const Integer& n);

  // 0 for Z, 1 for T, N for Z_N.
  Integer characteristic() const;
  bool is_finite() const { return kind == Kind::Cyclic; }
  bool operator==(const Factor&) const = default;
};

class ElementaryGroup {
 public:
  ElementaryGroup() = default;
  explicit ElementaryGroup(std::vector<Factor> factors) : factors_(std::move(factors)) {}

  // Grammar: factor { "x" factor }, factor := ("Z" | "T" | "Z" N | "Z_" N) ["^" k].
  // "1" denotes the trivial group with no factors.
  static ElementaryGroup parse(const std::string& text);
  static ElementaryGroup cyclic(const std::vector<Integer>& moduli);

  std::size_t size() const { return factors_.size(); }
  const Factor& operator[](std::size_t i) const { return factors_[i]; }
  const std::vector<Factor>& factors() const { return factors_; }
  Integer characteristic(std::size_t i) const { return factors_[i].characteristic(); }
  IntVector characteristics() const;

  bool is_finite() const;
  Integer order() const;  // throws for infinite groups

  ElementaryGroup dual() const;
  ElementaryGroup product(const ElementaryGroup& other) const;
  std::string str() const;

  bool operator==(const ElementaryGroup&) const = default;

 private:
  std::vector<Factor> factors_;
};

struct GroupElement {
  ElementaryGroup group;
  RatVector coords;

  bool operator==(const GroupElement& other) const;
  std::string str() const;
};

// Canonical ranges: [0,N) on Z_N, [0,1) on T, untouched on Z.
GroupElement reduce(const RatVector& raw, const ElementaryGroup& G);
GroupElement identity(const ElementaryGroup& G);
GroupElement add(const GroupElement& g, const GroupElement& h);
GroupElement neg(const GroupElement& g);
GroupElement operator+(const GroupElement& g, const GroupElement& h);
GroupElement operator-(const GroupElement& g);

// Finite groups only. Elements are ordered lexicographically with the last
// coordinate varying fastest; index() is the inverse of element_at().
std::vector<GroupElement> enumerate(const ElementaryGroup& G, std::uint64_t cap = 1u << 20);
std::uint64_t finite_order(const ElementaryGroup& G, std::uint64_t cap = 1u << 20);
std::uint64_t element_index(const ElementaryGroup& G, const RatVector& coords);
RatVector element_at(const ElementaryGroup& G, std::uint64_t index);

// "(5, 1/4, 3)"
RatVector parse_tuple(const std::string& text);
GroupElement parse_element(const std::string& text, const ElementaryGroup& G);
std::string format_tuple(const RatVector& v);

}  // namespace normsim
