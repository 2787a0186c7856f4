#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "normsim/abelian.hpp"

#include <random>
#include <set>

using namespace normsim;

namespace {

RatVector tuple(std::initializer_list<const char*> xs) {
  RatVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const char* x : xs) v(i++) = parse_rational(x);
  return v;
}

GroupElement random_element(const ElementaryGroup& G, std::mt19937_64& rng) {
  RatVector v(static_cast<Eigen::Index>(G.size()));
  std::uniform_int_distribution<int> wide(-50, 50), den(1, 12);
  for (std::size_t i = 0; i < G.size(); ++i) {
    auto k = static_cast<Eigen::Index>(i);
    if (G[i].kind == Factor::Kind::T)
      v(k) = Rational(wide(rng)) / Rational(den(rng));
    else
      v(k) = Rational(wide(rng));
  }
  return reduce(v, G);
}

}  // namespace

TEST_CASE("group text round trip") {
  auto G = ElementaryGroup::parse("Z^2 x T x Z4 x Z9");
  REQUIRE(G.size() == 5);
  CHECK(G[0].kind == Factor::Kind::Z);
  CHECK(G[2].kind == Factor::Kind::T);
  CHECK(G.characteristic(2) == 1);
  CHECK(G.characteristic(4) == 9);
  CHECK(G.str() == "Z^2 x T x Z4 x Z9");
  CHECK(ElementaryGroup::parse(G.str()) == G);
  CHECK(ElementaryGroup::parse("Z_4 x Z_2") == ElementaryGroup::cyclic({4, 2}));
  CHECK(ElementaryGroup::parse("1").size() == 0);
  CHECK_THROWS(ElementaryGroup::parse("Q x Z"));
  CHECK_THROWS(ElementaryGroup::parse("Z0"));
}

TEST_CASE("reduce examples") {
  auto G = ElementaryGroup::parse("Z x T x Z4");
  CHECK(reduce(tuple({"5", "5/4", "7"}), G).coords == tuple({"5", "1/4", "3"}));
  CHECK(reduce(tuple({"0", "0", "0"}), G).coords == tuple({"0", "0", "0"}));
  CHECK(reduce(tuple({"-1", "-1/3", "-1"}), G).coords == tuple({"-1", "2/3", "3"}));
  CHECK_THROWS(reduce(tuple({"1", "0"}), G));
  CHECK_THROWS(reduce(tuple({"1/2", "0", "0"}), G));
  CHECK_THROWS(reduce(tuple({"1", "0", "1/2"}), G));
}

TEST_CASE("add examples") {
  auto Z6 = ElementaryGroup::parse("Z6");
  auto T = ElementaryGroup::parse("T");
  auto Z = ElementaryGroup::parse("Z");
  CHECK((parse_element("(4)", Z6) + parse_element("(5)", Z6)).coords == tuple({"3"}));
  CHECK((parse_element("(3/4)", T) + parse_element("(1/2)", T)).coords == tuple({"1/4"}));
  CHECK((parse_element("(7)", Z) + parse_element("(-9)", Z)).coords == tuple({"-2"}));
  CHECK_THROWS(parse_element("(1)", Z6) + parse_element("(1)", Z));
}

TEST_CASE("enumerate examples") {
  CHECK(enumerate(ElementaryGroup::parse("Z2 x Z2")).size() == 4);
  auto one = enumerate(ElementaryGroup::parse("Z1"));
  REQUIRE(one.size() == 1);
  CHECK(one[0].coords == tuple({"0"}));
  auto els = enumerate(ElementaryGroup::parse("Z4 x Z2"));
  std::set<std::string> seen;
  for (const auto& e : els) seen.insert(e.str());
  CHECK(els.size() == 8);
  CHECK(seen.size() == 8);
  CHECK_THROWS(enumerate(ElementaryGroup::parse("Z x Z2")));
  CHECK_THROWS(enumerate(ElementaryGroup::parse("Z64 x Z64"), 1000));
  auto G = ElementaryGroup::parse("Z3 x Z5 x Z2");
  for (std::uint64_t i = 0; i < 30; ++i) CHECK(element_index(G, element_at(G, i)) == i);
}

TEST_CASE("group law properties on random elements") {
  std::mt19937_64 rng(11);
  auto G = ElementaryGroup::parse("Z^2 x T x Z4 x Z9 x Z1");
  for (int trial = 0; trial < 300; ++trial) {
    auto g = random_element(G, rng), h = random_element(G, rng), k = random_element(G, rng);
    CHECK((g + h) + k == g + (h + k));
    CHECK(g + h == h + g);
    CHECK(g + (-g) == identity(G));
    CHECK(reduce(g.coords, G) == g);
    for (std::size_t i = 0; i < G.size(); ++i) {
      if (G[i].kind == Factor::Kind::Z) continue;
      RatVector shifted = g.coords;
      shifted(static_cast<Eigen::Index>(i)) += Rational(G.characteristic(i));
      CHECK(reduce(shifted, G) == g);
    }
  }
}

TEST_CASE("dual swaps Z and T") {
  auto G = ElementaryGroup::parse("Z^2 x T x Z4");
  CHECK(G.dual() == ElementaryGroup::parse("T^2 x Z x Z4"));
  CHECK(G.dual().dual() == G);
}

TEST_CASE("element text") {
  auto G = ElementaryGroup::parse("Z x T x Z4");
  auto g = parse_element("(5, 5/4, 7)", G);
  CHECK(g.str() == "(5, 1/4, 3)");
  CHECK_THROWS(parse_element("5, 1, 2", G));
  CHECK_THROWS(parse_element("(5, x, 2)", G));
}
