#include "normsim/abelian.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace normsim {

Factor Factor::cyclic(const Integer& n) {
  if (n < 1) throw std::invalid_argument("cyclic factor needs N >= 1");
  return {Kind::Cyclic, n};
}

Integer Factor::characteristic() const {
  switch (kind) {
    case Kind::Z: return 0;
    case Kind::T: return 1;
    case Kind::Cyclic: return N;
  }
  return 0;
}

namespace {

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_factors(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+00D7 multiplication sign, UTF-8 encoded
    bool times = text[i] == 'x' || text[i] == '*';
    if (!times && static_cast<unsigned char>(text[i]) == 0xC3 && i + 1 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0x97) {
      times = true;
      ++i;
    }
    if (times) {
      parts.push_back(strip(cur));
      cur.clear();
    } else {
      cur += text[i];
    }
  }
  parts.push_back(strip(cur));
  return parts;
}

Integer parse_positive(const std::string& s, const std::string& context) {
  if (s.empty()) throw std::invalid_argument("missing number in group factor '" + context + "'");
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("bad number in group factor '" + context + "'");
  return Integer(s);
}

}  // namespace

ElementaryGroup ElementaryGroup::parse(const std::string& text) {
  std::string t = strip(text);
  if (t == "1" || t.empty()) return ElementaryGroup{};
  std::vector<Factor> factors;
  for (const std::string& part : split_factors(t)) {
    if (part.empty()) throw std::invalid_argument("empty factor in group '" + text + "'");
    std::string base = part;
    std::size_t power = 1;
    if (auto caret = part.find('^'); caret != std::string::npos) {
      base = strip(part.substr(0, caret));
      power = parse_positive(strip(part.substr(caret + 1)), part).convert_to<std::size_t>();
    }
    Factor f;
    if (base == "Z") {
      f = Factor::integers();
    } else if (base == "T") {
      f = Factor::torus();
    } else if (base.size() > 1 && base[0] == 'Z') {
      std::string digits = base.substr(base[1] == '_' ? 2 : 1);
      f = Factor::cyclic(parse_positive(digits, part));
    } else {
      throw std::invalid_argument("unknown group factor '" + part + "'");
    }
    for (std::size_t k = 0; k < power; ++k) factors.push_back(f);
  }
  return ElementaryGroup(std::move(factors));
}

ElementaryGroup ElementaryGroup::cyclic(const std::vector<Integer>& moduli) {
  std::vector<Factor> f;
  for (const auto& n : moduli) f.push_back(Factor::cyclic(n));
  return ElementaryGroup(std::move(f));
}

IntVector ElementaryGroup::characteristics() const {
  IntVector c(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) c(static_cast<Eigen::Index>(i)) = characteristic(i);
  return c;
}

bool ElementaryGroup::is_finite() const {
  for (const auto& f : factors_)
    if (!f.is_finite()) return false;
  return true;
}

Integer ElementaryGroup::order() const {
  if (!is_finite()) throw std::domain_error("order of an infinite group");
  Integer n = 1;
  for (const auto& f : factors_) n *= f.N;
  return n;
}

ElementaryGroup ElementaryGroup::dual() const {
  std::vector<Factor> f = factors_;
  for (auto& x : f) {
    if (x.kind == Factor::Kind::Z)
      x = Factor::torus();
    else if (x.kind == Factor::Kind::T)
      x = Factor::integers();
  }
  return ElementaryGroup(std::move(f));
}

ElementaryGroup ElementaryGroup::product(const ElementaryGroup& other) const {
  std::vector<Factor> f = factors_;
  f.insert(f.end(), other.factors_.begin(), other.factors_.end());
  return ElementaryGroup(std::move(f));
}

std::string ElementaryGroup::str() const {
  if (factors_.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < factors_.size();) {
    std::size_t j = i;
    while (j < factors_.size() && factors_[j] == factors_[i]) ++j;
    if (!out.empty()) out += " x ";
    switch (factors_[i].kind) {
      case Factor::Kind::Z: out += "Z"; break;
      case Factor::Kind::T: out += "T"; break;
      case Factor::Kind::Cyclic: out += "Z" + factors_[i].N.str(); break;
    }
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

bool GroupElement::operator==(const GroupElement& other) const {
  return group == other.group && coords == other.coords;
}

std::string GroupElement::str() const { return format_tuple(coords); }

GroupElement reduce(const RatVector& raw, const ElementaryGroup& G) {
  if (static_cast<std::size_t>(raw.size()) != G.size())
    throw std::invalid_argument("reduce: length " + std::to_string(raw.size()) + " does not match " +
                                std::to_string(G.size()) + " factors");
  RatVector c = raw;
  for (std::size_t i = 0; i < G.size(); ++i) {
    auto k = static_cast<Eigen::Index>(i);
    switch (G[i].kind) {
      case Factor::Kind::Z:
        if (!is_integer(c(k))) throw std::invalid_argument("reduce: non-integer coordinate on a Z factor");
        break;
      case Factor::Kind::T: c(k) = frac(c(k)); break;
      case Factor::Kind::Cyclic:
        if (!is_integer(c(k))) throw std::invalid_argument("reduce: non-integer coordinate on a cyclic factor");
        c(k) = Rational(mod(numerator(c(k)), G[i].N));
        break;
    }
  }
  return {G, c};
}

GroupElement identity(const ElementaryGroup& G) {
  return {G, RatVector::Zero(static_cast<Eigen::Index>(G.size()))};
}

GroupElement add(const GroupElement& g, const GroupElement& h) {
  if (!(g.group == h.group)) throw std::invalid_argument("add: group mismatch");
  return reduce(g.coords + h.coords, g.group);
}

GroupElement neg(const GroupElement& g) { return reduce(-g.coords, g.group); }
GroupElement operator+(const GroupElement& g, const GroupElement& h) { return add(g, h); }
GroupElement operator-(const GroupElement& g) { return neg(g); }

std::uint64_t finite_order(const ElementaryGroup& G, std::uint64_t cap) {
  if (!G.is_finite()) throw std::domain_error("enumerate: group has Z or T factors");
  std::uint64_t n = 1;
  for (const auto& f : G.factors()) {
    if (f.N > Integer(cap) || Integer(n) * f.N > Integer(cap))
      throw std::length_error("enumerate: group order exceeds cap " + std::to_string(cap));
    n *= f.N.convert_to<std::uint64_t>();
  }
  return n;
}

std::vector<GroupElement> enumerate(const ElementaryGroup& G, std::uint64_t cap) {
  std::uint64_t n = finite_order(G, cap);
  std::vector<GroupElement> out;
  out.reserve(n);
  for (std::uint64_t idx = 0; idx < n; ++idx) out.push_back({G, element_at(G, idx)});
  return out;
}

std::uint64_t element_index(const ElementaryGroup& G, const RatVector& coords) {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < G.size(); ++i) {
    std::uint64_t n = G[i].N.convert_to<std::uint64_t>();
    Integer x = mod(numerator(coords(static_cast<Eigen::Index>(i))), G[i].N);
    idx = idx * n + x.convert_to<std::uint64_t>();
  }
  return idx;
}

RatVector element_at(const ElementaryGroup& G, std::uint64_t index) {
  RatVector c(static_cast<Eigen::Index>(G.size()));
  for (std::size_t i = G.size(); i-- > 0;) {
    std::uint64_t n = G[i].N.convert_to<std::uint64_t>();
    c(static_cast<Eigen::Index>(i)) = Rational(Integer(index % n));
    index /= n;
  }
  return c;
}

RatVector parse_tuple(const std::string& text) {
  std::string t = strip(text);
  if (t.size() < 2 || t.front() != '(' || t.back() != ')')
    throw std::invalid_argument("element must be a parenthesised tuple: '" + text + "'");
  std::string body = strip(t.substr(1, t.size() - 2));
  std::vector<Rational> vals;
  if (!body.empty()) {
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(parse_rational(item));
  }
  RatVector v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

GroupElement parse_element(const std::string& text, const ElementaryGroup& G) {
  return reduce(parse_tuple(text), G);
}

std::string format_tuple(const RatVector& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += to_string(v(i));
  }
  return out + ")";
}

}  // namespace normsim
