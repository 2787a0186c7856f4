#include "normsim/scalar.hpp"

#include <limits>
#include <stdexcept>

namespace normsim {

Integer mod(const Integer& a, const Integer& n) {
  if (n <= 0) throw std::invalid_argument("mod: modulus must be positive");
  Integer r = a % n;
  if (r < 0) r += n;
  return r;
}

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

Integer gcd(const Integer& a, const Integer& b) {
  Integer x = abs(a), y = abs(b);
  while (y != 0) {
    Integer t = x % y;
    x = y;
    y = t;
  }
  return x;
}

Integer lcm(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  return abs(a / gcd(a, b) * b);
}

Integer ext_gcd(const Integer& a, const Integer& b, Integer& x, Integer& y) {
  Integer old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Integer q = old_r / r;
    Integer tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  x = old_s;
  y = old_t;
  return old_r;
}

Integer mod_inverse(const Integer& a, const Integer& n) {
  Integer x, y;
  if (ext_gcd(mod(a, n), n, x, y) != 1) throw std::domain_error("mod_inverse: not invertible");
  return mod(x, n);
}

Integer pow_mod(Integer base, Integer e, const Integer& n) {
  if (e < 0) {
    base = mod_inverse(base, n);
    e = -e;
  }
  Integer result = mod(Integer(1), n);
  base = mod(base, n);
  while (e > 0) {
    if ((e & 1) != 0) result = result * base % n;
    base = base * base % n;
    e >>= 1;
  }
  return result;
}

std::int64_t to_i64(const Integer& a) {
  if (a > std::numeric_limits<std::int64_t>::max() || a < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("integer does not fit in 64 bits");
  return a.convert_to<std::int64_t>();
}

Integer numerator(const Rational& q) { return Integer(mp::numerator(q)); }
Integer denominator(const Rational& q) { return Integer(mp::denominator(q)); }
bool is_integer(const Rational& q) { return mp::denominator(q) == 1; }

Integer floor(const Rational& q) { return floor_div(numerator(q), denominator(q)); }

Rational frac(const Rational& q) { return q - Rational(floor(q)); }

Rational mod(const Rational& q, const Integer& n) {
  if (n <= 0) throw std::invalid_argument("mod: modulus must be positive");
  Rational t = q / Rational(n);
  return (t - Rational(floor(t))) * Rational(n);
}

Integer centred_mod(const Integer& a, const Integer& n) {
  Integer r = mod(a, n);
  if (2 * r > n) r -= n;
  return r;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational parse_rational(std::string_view s) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    return v;
  };
  s = trim(s);
  auto parse_int = [](std::string_view v) {
    if (v.empty()) throw std::invalid_argument("empty integer literal");
    std::size_t i = (v[0] == '-' || v[0] == '+') ? 1 : 0;
    if (i == v.size()) throw std::invalid_argument("bad integer literal");
    for (std::size_t k = i; k < v.size(); ++k)
      if (v[k] < '0' || v[k] > '9') throw std::invalid_argument("bad integer literal '" + std::string(v) + "'");
    return Integer(std::string(v[0] == '+' ? v.substr(1) : v));
  };
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(s));
  Integer num = parse_int(trim(s.substr(0, slash)));
  Integer den = parse_int(trim(s.substr(slash + 1)));
  if (den == 0) throw std::invalid_argument("zero denominator");
  return Rational(num) / Rational(den);
}

std::string to_string(const Integer& a) { return a.str(); }

std::string to_string(const Rational& q) {
  if (is_integer(q)) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

bool is_integral(const RatMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (!is_integer(m(i, j))) return false;
  return true;
}

IntMatrix to_integer(const RatMatrix& m) {
  IntMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!is_integer(m(i, j))) throw std::domain_error("matrix entry is not an integer");
      out(i, j) = numerator(m(i, j));
    }
  return out;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::uint64_t next_prime_above(std::uint64_t n) {
  std::uint64_t p = n + 1;
  while (!is_prime(p)) ++p;
  return p;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace normsim
