#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "normsim/deblackbox.hpp"
#include "normsim/random_circuits.hpp"

using namespace normsim;

namespace {

RatMatrix mat(std::initializer_list<std::initializer_list<Rational>> rows) {
  RatMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (const auto& x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

RatVector vec(std::initializer_list<Rational> xs) {
  RatVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const auto& x : xs) v(i++) = x;
  return v;
}

DecompositionTable z15_table() {
  DecompositionTable T;
  T.alpha = T.beta = {"2", "14"};
  T.A = T.B = IntMatrix::Identity(2, 2);
  T.c = (IntVector(2) << 4, 2).finished();
  return T;
}

CircuitRun dlog_run(long p, const std::string& a, const std::string& b) {
  CircuitRun run;
  run.circuit.initial = {ElementaryGroup::cyclic({p - 1, p - 1}), std::make_shared<ZNStarGroup>(p)};
  run.circuit.gates.push_back(QFTGate{{0, 1}, {}});
  run.circuit.gates.push_back(ModExpGate{{a, b}, {0, 1}, std::nullopt});
  run.circuit.gates.push_back(QFTGate{{0, 1}, {}});
  run.input = vec({0, 0});
  run.bb_input = "1";
  return run;
}

double tv_against_dense(const CircuitRun& run) {
  auto dense = dense_run(run.circuit, run.input, run.bb_input);
  return total_variation(structured_distribution(run), dense_probabilities(dense));
}

}  // namespace

TEST_CASE("encoding bridge") {
  EncodingBridge br(std::make_shared<ZNStarGroup>(15), z15_table());
  CHECK(br.decomposed() == ElementaryGroup::parse("Z4 x Z2"));
  CHECK(br.encode(vec({3, 1})) == "7");
  CHECK(br.decode("7") == vec({3, 1}));
  CHECK(br.encode(vec({0, 0})) == "1");
  CHECK_THROWS_AS(br.decode("5"), std::invalid_argument);
  for (const auto& g : enumerate(br.decomposed())) CHECK(br.decode(br.encode(g.coords)) == g.coords);
  for (const auto& g : enumerate(br.decomposed()))
    for (const auto& h : enumerate(br.decomposed()))
      CHECK(br.encode((g + h).coords) == br.group().mul(br.encode(g.coords), br.encode(h.coords)));

  auto bad = z15_table();
  bad.c(0) = 2;
  CHECK_THROWS(EncodingBridge(std::make_shared<ZNStarGroup>(15), bad));

  auto ec = std::make_shared<EllipticCurveGroup>(13, 2, 1);
  EncodingBridge eb(ec, bruteforce_decomposition(*ec));
  for (const auto& P : ec->elements()) CHECK(eb.encode(eb.decode(P)) == P);
}

TEST_CASE("scaling prime") {
  CHECK(scaling_prime(4) == 11);
  CHECK(scaling_prime(1) == 3);
  CHECK(precision_bound(std::nullopt, ElementaryGroup::parse("Z x T x Z9")) == 9);
  CHECK(precision_bound(5, ElementaryGroup::parse("T")) == 32);
}

TEST_CASE("extract_matrix_rep examples") {
  auto Z8 = ElementaryGroup::parse("Z8");
  auto rep = extract_matrix_rep([](const RatVector& x) { return RatVector(x * Rational(3)); }, Z8, 8);
  CHECK(rep.A == mat({{3}}));

  // x -> 2x on T: the scaling trick reads 2, which is not an automorphism
  auto T = ElementaryGroup::parse("T");
  auto twice = [](const RatVector& x) { return RatVector(x * Rational(2)); };
  CHECK(extract_matrix_entries(twice, T, 4) == mat({{2}}));
  CHECK_THROWS_AS(extract_matrix_rep(twice, T, 4), InvalidNormalForm);

  auto G = ElementaryGroup::parse("Z2 x Z4 x T");
  auto id = extract_matrix_rep([](const RatVector& x) { return x; }, G, 4);
  CHECK(id.A == RatMatrix::Identity(3, 3));

  // x -> x^2 on Z5 is not linear: the spot check catches it
  auto sq = [](const RatVector& x) { return RatVector(x.cwiseProduct(x)); };
  CHECK_THROWS_AS(extract_matrix_rep(sq, ElementaryGroup::parse("Z5"), 5), ExtractionError);
}

TEST_CASE("matrix extraction round-trips") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 60; ++trial) {
    auto G = random_finite_group(rng, 10000, 4, 16);
    auto rep = random_matrix_rep(G, rng);
    auto got = extract_matrix_rep([&](const RatVector& x) { return rep.apply(x); }, G, precision_bound(std::nullopt, G));
    CHECK(got.A == rep.A);
    for (const auto& g : enumerate(G)) CHECK(got.apply(g.coords) == rep.apply(g.coords));
  }

  auto mixed = ElementaryGroup::parse("Z x Z6 x T");
  auto rep = validate_matrix_rep(mat({{1, 0, 0}, {2, 5, 0}, {Rational(1, 3), Rational(1, 6), -1}}), mixed);
  auto got = extract_matrix_rep([&](const RatVector& x) { return rep.apply(x); }, mixed, 8);
  CHECK(got.A == rep.A);
}

TEST_CASE("extract_quadratic examples") {
  auto Z8 = ElementaryGroup::parse("Z8");
  auto Q = extract_quadratic([](const RatVector& g) { return g(0) * g(0) / Rational(8); }, Z8, 8);
  CHECK(Q.M == mat({{Rational(1, 4)}}));
  CHECK(Q.C(0) == 2);
  for (const auto& g : enumerate(Z8)) CHECK(Q.phase(g.coords) == frac(g.coords(0) * g.coords(0) / Rational(8)));

  auto zero = extract_quadratic([](const RatVector&) { return Rational(0); }, ElementaryGroup::parse("Z3 x Z"), 3);
  CHECK(zero.M == RatMatrix::Zero(2, 2));
  CHECK(zero.v == RatVector::Zero(2));
  CHECK(zero.C == IntVector::Zero(2));

  auto Z2 = ElementaryGroup::parse("Z2");
  auto ch = extract_quadratic([](const RatVector& g) { return g(0) / Rational(2); }, Z2, 2);
  CHECK(ch.M == mat({{0}}));
  CHECK(ch.v == vec({Rational(1, 2)}));

  // a constant offset is a global phase and is dropped
  auto shifted = extract_quadratic([](const RatVector& g) { return g(0) / Rational(2) + Rational(1, 3); }, Z2, 2);
  CHECK(shifted.v == vec({Rational(1, 2)}));

  // not quadratic: g^3 / 9 on Z9 is periodic but cubic
  CHECK_THROWS(extract_quadratic([](const RatVector& g) { return g(0) * g(0) * g(0) / Rational(9); },
                                 ElementaryGroup::parse("Z9"), 9));
}

TEST_CASE("quadratic extraction round-trips") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 80; ++trial) {
    auto G = random_finite_group(rng, 4096, 4, 16);
    auto Q = random_quadratic_form(G, rng);
    auto got = extract_quadratic([&](const RatVector& x) { return Q.phase(x); }, G, precision_bound(std::nullopt, G));
    for (const auto& g : enumerate(G)) CHECK(got.phase(g.coords) == Q.phase(g.coords));
  }

  auto G = ElementaryGroup::parse("Z x Z4 x T");
  auto Q = validate_quadratic(mat({{Rational(1, 3), Rational(1, 4), 2}, {Rational(1, 4), Rational(3, 4), 0}, {2, 0, 0}}),
                              vec({Rational(1, 5), Rational(1, 2), 3}), G);
  auto got = extract_quadratic([&](const RatVector& x) { return Q.phase(x); }, G, 8);
  CHECK(got.M(0, 2) == 2);
  CHECK(got.v(2) == 3);
  std::mt19937_64 pts(3);
  for (int i = 0; i < 200; ++i) {
    RatVector x = vec({static_cast<long>(pts() % 41) - 20, static_cast<long>(pts() % 4),
                       Rational(static_cast<long>(pts() % 17), 17)});
    CHECK(got.phase(x) == Q.phase(x));
  }
}

TEST_CASE("deblackbox_circuit on the discrete-log circuit") {
  auto run = dlog_run(7, "3", "6");
  auto res = deblackbox_circuit(run);
  CHECK(res.circuit.initial.labels == ElementaryGroup::parse("Z6 x Z6 x Z6"));
  CHECK_FALSE(res.circuit.initial.has_slot());
  CHECK(res.circuit.gates.size() == 3);
  CHECK(std::holds_alternative<AutomorphismGate>(res.circuit.gates[1]));
  CHECK(res.provenance["gates"][1]["action"] == "extracted");
  CHECK(res.provenance["gates"][1]["oracle_calls"].get<int>() > 0);
  CHECK(res.provenance["decomposition"]["decomposed"] == "Z6");
  CHECK(tv_against_dense(run) < 1e-9);

  for (long p : {5L, 11L}) {
    auto r = dlog_run(p, "2", "3");
    CHECK(tv_against_dense(r) < 1e-9);
  }
}

TEST_CASE("deblackbox_circuit: order finding and failures") {
  CircuitRun run;
  run.circuit.initial = {ElementaryGroup::parse("Z4"), std::make_shared<ZNStarGroup>(15)};
  run.circuit.gates = {QFTGate{{0}, {}}, ModExpGate{{"2"}, {0}, std::nullopt}, QFTGate{{0}, {}}};
  run.input = vec({0});
  run.bb_input = "1";
  auto res = deblackbox_circuit(run);
  CHECK(std::get<AutomorphismGate>(res.circuit.gates[1]).rep.group == ElementaryGroup::parse("Z4 x Z4 x Z2"));
  CHECK(tv_against_dense(run) < 1e-9);

  run.circuit.initial.labels = ElementaryGroup::parse("Z3");
  run.input = vec({0});
  try {
    deblackbox_circuit(run);
    FAIL("expected a CircuitError");
  } catch (const CircuitError& e) {
    CHECK(e.gate() == 1);
  }

  CircuitRun plain;
  plain.circuit.initial = {ElementaryGroup::parse("Z4 x Z3"), nullptr};
  plain.circuit.gates = {QFTGate{{0}, {}}, QuadraticGate{QuadraticForm::zero(ElementaryGroup::parse("Z4 x Z3"))}};
  plain.input = vec({1, 2});
  auto same = deblackbox_circuit(plain);
  REQUIRE(same.circuit.gates.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(to_json(same.circuit.gates[i]) == to_json(plain.circuit.gates[i]));
  CHECK(same.input == plain.input);
}

TEST_CASE("deblackbox_circuit with classical black-box gates") {
  std::mt19937_64 rng(53);
  auto G = ElementaryGroup::parse("Z4 x Z6");
  for (int trial = 0; trial < 20; ++trial) {
    auto rep = random_matrix_rep(G, rng);
    auto Q = random_quadratic_form(G, rng);
    CircuitRun run;
    run.circuit.initial = {G, std::make_shared<ZNStarGroup>(7)};
    run.circuit.gates = {QFTGate{{0, 1}, {}},
                         BlackBoxAutomorphismGate{"f", [rep](const RatVector& x) { return rep.apply(x); }, std::nullopt},
                         ModExpGate{{"2"}, {1}, std::nullopt},
                         BlackBoxQuadraticGate{"q", [Q](const RatVector& x) { return Q.phase(x); }, std::nullopt},
                         QFTGate{{1}, {}}};
    run.input = element_at(G, rng() % 24);
    run.bb_input = "3";
    CHECK(tv_against_dense(run) < 1e-9);
  }

  CircuitRun bad;
  bad.circuit.initial = {ElementaryGroup::parse("Z5"), nullptr};
  bad.circuit.gates = {QFTGate{{0}, {}},
                       BlackBoxAutomorphismGate{"sq", [](const RatVector& x) { return RatVector(x.cwiseProduct(x)); },
                                                std::nullopt}};
  bad.input = vec({0});
  CHECK_THROWS_WITH_AS(deblackbox_circuit(bad), doctest::Contains("gate 1"), CircuitError);
}
