#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

// Boost 1.74 probes Eigen expressions for a const_iterator when Eigen asks
// whether a matrix converts to a scalar; that probe is a hard error in C++20.
namespace boost::multiprecision::detail {
template <class C>
  requires requires { C::RowsAtCompileTime; C::ColsAtCompileTime; }
struct is_byte_container_imp<C, true> : std::false_type {};
}  // namespace boost::multiprecision::detail

#include <boost/multiprecision/eigen.hpp>

namespace normsim {

namespace mp = boost::multiprecision;

using Integer = mp::number<mp::cpp_int_backend<>, mp::et_off>;
using Rational = mp::number<mp::rational_adaptor<mp::cpp_int_backend<>>, mp::et_off>;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Mat<Integer>;
using IntVector = Vec<Integer>;
using RatMatrix = Mat<Rational>;
using RatVector = Vec<Rational>;

// Integer helpers. mod() always lands in [0, n) for n > 0.
Integer mod(const Integer& a, const Integer& n);
Integer floor_div(const Integer& a, const Integer& b);
Integer gcd(const Integer& a, const Integer& b);
Integer lcm(const Integer& a, const Integer& b);
// g = gcd(a, b) = a*x + b*y
Integer ext_gcd(const Integer& a, const Integer& b, Integer& x, Integer& y);
Integer mod_inverse(const Integer& a, const Integer& n);
Integer pow_mod(Integer base, Integer e, const Integer& n);
std::int64_t to_i64(const Integer& a);

Integer numerator(const Rational& q);
Integer denominator(const Rational& q);
bool is_integer(const Rational& q);
Integer floor(const Rational& q);
Rational frac(const Rational& q);  // q - floor(q), in [0, 1)
Rational mod(const Rational& q, const Integer& n);
// Residue of a modulo n in (-n/2, n/2].
Integer centred_mod(const Integer& a, const Integer& n);
double to_double(const Rational& q);

// "p/q", "-p/q" or a plain integer.
Rational parse_rational(std::string_view s);
std::string to_string(const Integer& a);
std::string to_string(const Rational& q);

template <class Scalar>
Mat<Rational> to_rational(const Mat<Scalar>& m) {
  return m.template cast<Rational>();
}

bool is_integral(const RatMatrix& m);
IntMatrix to_integer(const RatMatrix& m);  // throws if some entry is fractional

bool is_prime(std::uint64_t n);
std::uint64_t next_prime_above(std::uint64_t n);
std::vector<std::uint64_t> prime_factors(std::uint64_t n);  // distinct, ascending

}  // namespace normsim
