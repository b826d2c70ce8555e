#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "qcsdp/errors.hpp"
#include "qcsdp/game_io.hpp"
#include "qcsdp/games.hpp"
#include "qcsdp/rng.hpp"
#include "qcsdp/suites.hpp"

using namespace qcsdp;

namespace {

Game constant_game(bool accept) {
  Game g;
  g.qx = g.qy = g.ax = g.ay = 2;
  g.mu.assign(4, 0.25);
  g.predicate.assign(g.predicate_size(), accept ? 1 : 0);
  return g;
}

CspInstance toy_csp() {
  // nvars = 4, two clauses; the second lists its variables out of order.
  CspInstance c;
  c.nvars = 4;
  Clause a;
  a.vars = {0, 1, 2};
  a.accept = 0b10010110;  // odd parity
  a.weight = 0.25;
  Clause b;
  b.vars = {3, 1, 2};
  b.accept = 0b00000001;  // all zero
  b.weight = 0.75;
  c.clauses = {a, b};
  return c;
}

}  // namespace

TEST_CASE("validate_game") {
  CHECK(validate_game(chsh()).empty());

  Game g = chsh();
  for (auto& m : g.mu) m *= 2.0;
  auto v = validate_game(g);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("mu sums to 2") != std::string::npos);

  g = chsh();
  g.predicate.pop_back();
  v = validate_game(g);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("predicate size") != std::string::npos);
}

TEST_CASE("chsh predicate") {
  const Game g = chsh();
  CHECK(g.accepts(0, 0, 0, 0));
  CHECK_FALSE(g.accepts(1, 1, 0, 0));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) CHECK(g.accepts(x, y, a, b) == ((a ^ b) == (x & y)));
}

TEST_CASE("classical value against enumeration") {
  CHECK(classical_value(chsh()) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(oracle::classical_value(chsh()) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(classical_value(constant_game(true)) == 1.0);
  CHECK(classical_value(constant_game(false)) == 0.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Game g = random_binary_game(seed);
    CHECK(validate_game(g).empty());
    const double ref = oracle::classical_value(g);
    CHECK(classical_value(g) == doctest::Approx(ref).epsilon(1e-14));
    CHECK(classical_value_serial(g) == doctest::Approx(ref).epsilon(1e-14));
  }
  CspInstance one;
  one.nvars = 3;
  Clause cl;
  cl.vars = {2, 0, 1};
  cl.accept = 0b00010110;  // exactly one true
  cl.weight = 1.0;
  one.clauses = {cl};
  const Game og = oracularize(one).game;
  CHECK(classical_value(og) == doctest::Approx(oracle::classical_value(og)).epsilon(1e-14));
}

TEST_CASE("strategy value") {
  const Game g = chsh();
  const Strategy det = deterministic_strategy(g, {0, 0}, {0, 0});
  CHECK(strategy_value(g, det) == doctest::Approx(0.75).epsilon(1e-15));

  const double tsirelson = (2.0 + std::sqrt(2.0)) / 4.0;
  CHECK(oracle::tsirelson_value() == doctest::Approx(tsirelson).epsilon(1e-14));
  const Strategy ts = tsirelson_strategy();
  CHECK(std::abs(strategy_value(g, ts) - tsirelson) <= 1e-12);

  // commuting POVMs: both orderings agree
  CounterRng rng(7);
  Strategy s;
  s.dim = 3;
  for (int x = 0; x < 2; ++x) {
    s.povmA.push_back({});
    s.povmB.push_back({});
    for (int k = 0; k < 2; ++k) {
      s.povmA.back().push_back(DenseMatrix::Zero(3, 3));
      s.povmB.back().push_back(DenseMatrix::Zero(3, 3));
    }
    for (int i = 0; i < 3; ++i) {
      const double p = rng.uniform(), q = rng.uniform();
      s.povmA[x][0](i, i) = p;
      s.povmA[x][1](i, i) = 1 - p;
      s.povmB[x][0](i, i) = q;
      s.povmB[x][1](i, i) = 1 - q;
    }
  }
  s.rho = random_density(rng, 3);
  const auto [ab, ba] = strategy_value_orderings(g, s);
  CHECK(std::abs(ab - ba) <= 1e-14);
  CHECK(commutator_report(s).deltaMax == 0.0);
}

TEST_CASE("check_strategy rejects mismatches") {
  Strategy s = tsirelson_strategy();
  CHECK_NOTHROW(check_strategy(chsh(), s));
  s.povmA[0][0] *= 1.1;
  CHECK_THROWS_AS(check_strategy(chsh(), s), InputError);
  s = tsirelson_strategy();
  s.povmB.pop_back();
  CHECK_THROWS_AS(check_strategy(chsh(), s), InputError);
}

namespace {

// Tsirelson observables acting on one shared qubit instead of C^2 (x) C^2.
Strategy single_qubit_chsh() {
  const double pi = std::acos(-1.0);
  DenseMatrix z(2, 2), x(2, 2);
  z << 1, 0, 0, -1;
  x << 0, 1, 1, 0;
  const DenseMatrix id = DenseMatrix::Identity(2, 2);
  auto obs = [&](double t) -> DenseMatrix { return std::cos(2 * t) * z + std::sin(2 * t) * x; };
  Strategy s;
  s.dim = 2;
  s.rho = id / 2.0;
  for (double t : {0.0, pi / 4}) s.povmA.push_back({(id + obs(t)) / 2.0, (id - obs(t)) / 2.0});
  for (double t : {pi / 8, -pi / 8}) s.povmB.push_back({(id + obs(t)) / 2.0, (id - obs(t)) / 2.0});
  return s;
}

}  // namespace

TEST_CASE("commutator report") {
  // tensor-product strategy: the provers' operators commute exactly
  CHECK(commutator_report(tsirelson_strategy()).deltaMax <= 1e-15);

  // one shared qubit: rank-one projectors whose Bloch vectors meet at pi/4
  // have ||[P, Q]|| = sin(pi/4) / 2
  const Strategy q = single_qubit_chsh();
  CHECK(strategy_value(chsh(), q) == doctest::Approx((2 + std::sqrt(2.0)) / 4).epsilon(1e-14));
  const CommutatorReport r = commutator_report(q);
  CHECK(r.deltaMax == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-14));
  for (int i = 0; i < r.table.rows(); ++i)
    for (int j = 0; j < r.table.cols(); ++j) CHECK(r.table(i, j) <= 0.5);

  // Voiculescu quadratures as a two-outcome-free family: each quadrature is
  // used as a single POVM element to read off the table.
  const auto [u1, u2] = voiculescu_pair(64);
  const auto [m10, m11] = hermitian_quadratures(u1);
  const auto [m20, m21] = hermitian_quadratures(u2);
  Strategy s;
  s.dim = 64;
  s.povmA = {{m10}, {m11}};
  s.povmB = {{m20}, {m21}};
  s.rho = DenseMatrix::Identity(64, 64) / 64.0;
  const CommutatorReport vq = commutator_report(s);
  const double bound = 2 * std::sin(std::acos(-1.0) / 64);
  CHECK(vq.deltaMax <= bound + 1e-10);
  double ref = 0.0;
  for (const auto* a : {&m10, &m11})
    for (const auto* b : {&m20, &m21}) ref = std::max(ref, oracle::opnorm(*a * *b - *b * *a));
  CHECK(std::abs(vq.deltaMax - ref) <= 1e-10);
}

// ||[A, B]|| <= 1/2 whenever 0 <= A, B <= Id, so no POVM strategy reaches
// this threshold. Kept as the literal expectation; it is expected to fail.
TEST_CASE("commutator report: qubit strategy above 0.5" * doctest::should_fail()) {
  CHECK(commutator_report(single_qubit_chsh()).deltaMax > 0.5);
}

TEST_CASE("dilation") {
  const Game g = chsh();
  SUBCASE("projective input") {
    const Strategy s = tsirelson_strategy();
    const Strategy d = dilate_to_projective(s);
    CHECK(std::abs(strategy_value(g, d) - strategy_value(g, s)) <= 1e-12);
    for (const auto& povm : d.povmA)
      for (const auto& e : povm) CHECK(oracle::opnorm(e * e - e) <= 1e-10);
  }
  SUBCASE("classical Naimark on d = 1") {
    Game one;
    one.qx = one.qy = 1;
    one.ax = 2;
    one.ay = 1;
    one.mu = {1.0};
    one.predicate = {1, 0};
    Strategy s;
    s.dim = 1;
    s.povmA = {{DenseMatrix::Constant(1, 1, 0.3), DenseMatrix::Constant(1, 1, 0.7)}};
    s.povmB = {{DenseMatrix::Identity(1, 1)}};
    s.rho = DenseMatrix::Identity(1, 1);
    const Strategy d = dilate_to_projective(s);
    CHECK(d.dim == 2);
    const double p0 = (d.povmA[0][0] * d.rho).trace().real();
    const double p1 = (d.povmA[0][1] * d.rho).trace().real();
    CHECK(p0 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(p1 == doctest::Approx(0.7).epsilon(1e-12));
    for (const auto& e : d.povmA[0]) CHECK(oracle::opnorm(e * e - e) <= 1e-12);
  }
  SUBCASE("noisy CHSH") {
    // Depolarize the Tsirelson POVMs: E -> 0.9 E + 0.05 Id.
    Strategy s = tsirelson_strategy();
    for (auto* side : {&s.povmA, &s.povmB})
      for (auto& povm : *side)
        for (auto& e : povm) e = 0.9 * e + 0.05 * DenseMatrix::Identity(s.dim, s.dim);
    const double delta = commutator_report(s).deltaMax;
    const Strategy d = dilate_to_projective(s);
    CHECK(std::abs(strategy_value(g, d) - strategy_value(g, s)) <= 1e-9);
    for (const auto* side : {&d.povmA, &d.povmB})
      for (const auto& povm : *side)
        for (const auto& e : povm) CHECK(oracle::opnorm(e * e - e) <= 1e-9);
    CHECK(commutator_report(d).deltaMax <= g.ax * g.ay * delta + 1e-9);
  }
}

TEST_CASE("oracularize: always-accepting clause") {
  CspInstance c;
  c.nvars = 3;
  Clause cl;
  cl.vars = {0, 1, 2};
  cl.accept = 0xff;
  cl.weight = 1.0;
  c.clauses = {cl};
  const OracleGame og = oracularize(c);
  CHECK(og.game.qx == 1);
  CHECK(og.game.qy == 6);  // unordered pairs {i, j} with i <= j
  CHECK(validate_game(og.game).empty());
  // V is exactly the consistency check of the shared variables
  for (int y = 0; y < og.game.qy; ++y) {
    const auto [i, j] = og.pairs[static_cast<std::size_t>(y)];
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 4; ++b) {
        const int ai = (a >> (2 - i)) & 1, aj = (a >> (2 - j)) & 1;
        const bool consistent = ai == ((b >> 1) & 1) && aj == (b & 1);
        CHECK(og.game.accepts(0, y, a, b) == consistent);
      }
  }
  // marginal of j is uniform: for each fixed i the mass over pairs
  // containing i, counted with the protocol's multiplicity, is 1/3 per j.
  const auto mu = oracle::oracularized_mu(c);
  double total = 0.0;
  for (const auto& [k, v] : mu) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("oracularize: question distribution matches the verifier") {
  const CspInstance c = toy_csp();
  const OracleGame og = oracularize(c);
  const auto mu = oracle::oracularized_mu(c);
  CHECK(og.game.qx == 2);
  CHECK(og.game.qy == 10);
  double total = 0.0;
  for (int x = 0; x < og.game.qx; ++x)
    for (int y = 0; y < og.game.qy; ++y) {
      const auto key = oracle::TriplePair{og.triples[static_cast<std::size_t>(x)], og.pairs[static_cast<std::size_t>(y)]};
      const auto it = mu.find(key);
      const double want = it == mu.end() ? 0.0 : it->second;
      CHECK(og.game.prob(x, y) == doctest::Approx(want).epsilon(1e-15));
      total += og.game.prob(x, y);
    }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

  // honest strategy of a satisfying assignment wins with probability 1
  // z = (1, 0, 0, 0): clause 1 has odd parity, clause 2 all zero
  const Strategy h = honest_strategy(og, {1, 0, 0, 0});
  CHECK(strategy_value(og.game, h) == doctest::Approx(1.0).epsilon(1e-14));
  const Strategy bad = honest_strategy(og, {0, 0, 0, 0});
  CHECK(strategy_value(og.game, bad) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("oracularize: conflicting clauses on one triple") {
  CspInstance c = toy_csp();
  Clause dup = c.clauses[0];
  dup.vars = {2, 1, 0};
  dup.accept = 0x01;
  c.clauses[0].weight = 0.125;
  dup.weight = 0.125;
  c.clauses.push_back(dup);
  CHECK_THROWS_AS(oracularize(c), InputError);
}

TEST_CASE("game file round trip and errors") {
  const Game g = random_binary_game(3);
  const Game back = parse_game(game_to_json(g));
  CHECK(back.mu == g.mu);
  CHECK(back.predicate == g.predicate);
  CHECK(game_hash(back) == game_hash(g));

  const Game frac = parse_game(R"({"qx":1,"qy":2,"ax":1,"ay":1,"mu":[["1/3","2/3"]],"accept":[[0,1,0,0]]})");
  CHECK(frac.prob(0, 0) == doctest::Approx(1.0 / 3));
  CHECK_FALSE(frac.accepts(0, 0, 0, 0));
  CHECK(frac.accepts(0, 1, 0, 0));

  auto message = [](const std::string& text) {
    try {
      parse_game(text);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"qy":1,"ax":1,"ay":1,"mu":[[1]],"accept":[]})").find("\"qx\"") != std::string::npos);
  CHECK(message(R"({"qx":1,"qy":1,"ax":1,"ay":1,"mu":[["x"]],"accept":[]})").find("mu") != std::string::npos);
  CHECK(message(R"({"qx":1,"qy":1,"ax":1,"ay":1,"mu":[[1]],"accept":[[0,0,3,0]]})").find("accept") != std::string::npos);
  CHECK(message(R"({"qx":1,"qy":1,"ax":1,"ay":1,"mu":[[0.5]],"accept":[]})").find("mu sums") != std::string::npos);

  const CspInstance c = parse_csp(csp_to_json(toy_csp()));
  REQUIRE(c.clauses.size() == 2);
  CHECK(c.clauses[1].accept == 0x01);
  CHECK(c.clauses[1].vars == std::array<int, 3>{3, 1, 2});
}
