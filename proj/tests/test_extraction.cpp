#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qcsdp/errors.hpp"
#include "qcsdp/extraction.hpp"
#include "qcsdp/games.hpp"
#include "qcsdp/rng.hpp"
#include "qcsdp/suites.hpp"

using namespace qcsdp;

namespace {

Clause clause(std::array<int, 3> vars, std::uint8_t accept, double w) {
  Clause c;
  c.vars = vars;
  c.accept = accept;
  c.weight = w;
  return c;
}

// bits b1 b2 b3 of the listed variables; mask of assignments with b1 == v
std::uint8_t first_is(int v) {
  std::uint8_t m = 0;
  for (int bits = 0; bits < 8; ++bits)
    if (((bits >> 2) & 1) == v) m = static_cast<std::uint8_t>(m | 1u << bits);
  return m;
}

CspInstance satisfiable() {
  CspInstance c;
  c.nvars = 4;
  c.clauses = {clause({0, 1, 2}, 0b10010110, 0.5), clause({3, 1, 2}, 0x01, 0.5)};
  return c;
}

// x0 = 1 and x0 = 0 in two clauses; the third always holds.
CspInstance contradiction() {
  CspInstance c;
  c.nvars = 4;
  c.clauses = {clause({0, 1, 2}, first_is(1), 1.0 / 3), clause({0, 1, 3}, first_is(0), 1.0 / 3),
               clause({1, 2, 3}, 0xff, 1.0 / 3)};
  return c;
}

// Uniform marginal POVMs on a d = 1 strategy: every answer with probability 1/4.
Strategy uniform_answers(const OracleGame& og) {
  Strategy s;
  s.dim = 1;
  s.rho = DenseMatrix::Identity(1, 1);
  s.povmA.assign(static_cast<std::size_t>(og.game.qx), std::vector<DenseMatrix>(8, DenseMatrix::Constant(1, 1, 1.0 / 8)));
  s.povmB.assign(static_cast<std::size_t>(og.game.qy), std::vector<DenseMatrix>(4, DenseMatrix::Constant(1, 1, 0.25)));
  return s;
}

// Best deterministic strategy by enumeration of the first prover's answers
// and best responses of the second.
Strategy best_classical(const Game& g, double& value) {
  std::vector<int> fa(static_cast<std::size_t>(g.qx), 0), bestA, bestB;
  value = -1.0;
  std::size_t total = 1;
  for (int x = 0; x < g.qx; ++x) total *= static_cast<std::size_t>(g.ax);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (int x = 0; x < g.qx; ++x) {
      fa[static_cast<std::size_t>(x)] = static_cast<int>(c % static_cast<std::size_t>(g.ax));
      c /= static_cast<std::size_t>(g.ax);
    }
    std::vector<int> fb(static_cast<std::size_t>(g.qy), 0);
    double v = 0.0;
    for (int y = 0; y < g.qy; ++y) {
      double best = -1.0;
      for (int b = 0; b < g.ay; ++b) {
        double s = 0.0;
        for (int x = 0; x < g.qx; ++x)
          if (g.accepts(x, y, fa[static_cast<std::size_t>(x)], b)) s += g.prob(x, y);
        if (s > best) {
          best = s;
          fb[static_cast<std::size_t>(y)] = b;
        }
      }
      v += best;
    }
    if (v > value) {
      value = v;
      bestA = fa;
      bestB = fb;
    }
  }
  return deterministic_strategy(g, bestA, bestB);
}

}  // namespace

TEST_CASE("marginals") {
  const CspInstance csp = satisfiable();
  const OracleGame og = oracularize(csp);
  const std::vector<int> z{1, 0, 0, 0};
  const MarginalPovm honest = marginals(og, honest_strategy(og, z));
  REQUIRE(honest.c.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(honest.c[i][z[i]](0, 0) - 1.0) <= 1e-15);
    CHECK(std::abs(honest.c[i][1 - z[i]](0, 0)) <= 1e-15);
  }
  const MarginalPovm half = marginals(og, uniform_answers(og));
  for (const auto& c : half.c)
    for (const auto& e : c) CHECK(std::abs(e(0, 0) - 0.5) <= 1e-15);

  CHECK_THROWS_AS(marginals(og, tsirelson_strategy()), InputError);
}

TEST_CASE("marginals of a perturbed honest strategy") {
  const CspInstance csp = satisfiable();
  const OracleGame og = oracularize(csp);
  const std::vector<int> z{1, 0, 0, 0};
  const Strategy h = honest_strategy(og, z);
  const double eta = 1e-3;
  CounterRng rng(21);
  const int d = 3;
  Strategy s;
  s.dim = d;
  s.rho = random_density(rng, d);
  // E -> (1 - eta) (E (x) Id) + eta R with R a random POVM
  auto perturb = [&](const std::vector<std::vector<DenseMatrix>>& povms) {
    std::vector<std::vector<DenseMatrix>> out;
    for (const auto& q : povms) {
      const auto r = random_povm(rng, d, static_cast<int>(q.size()));
      std::vector<DenseMatrix> e;
      for (std::size_t k = 0; k < q.size(); ++k)
        e.push_back((1 - eta) * q[k](0, 0) * DenseMatrix::Identity(d, d) + eta * r[k]);
      out.push_back(e);
    }
    return out;
  };
  s.povmA = perturb(h.povmA);
  s.povmB = perturb(h.povmB);
  const double delta = commutator_report(s).deltaMax;
  CHECK(delta <= 4 * eta * eta);
  const MarginalPovm m = marginals(og, s);
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) worst = std::max(worst, oracle::opnorm(m.c[i][z[i]] - DenseMatrix::Identity(d, d)));
  MESSAGE("perturbed honest marginals: max ||C_i^{z_i} - Id|| = " << worst << ", delta = " << delta);
  CHECK(worst <= 2 * eta);
  CHECK(worst > 0.0);
}

TEST_CASE("sampler: point distribution and uniform distribution") {
  const CspInstance csp = satisfiable();
  const OracleGame og = oracularize(csp);
  const std::vector<int> z{1, 0, 0, 0};
  const Strategy h = honest_strategy(og, z);
  const AssignmentSampler point(marginals(og, h), h.rho, 1);
  for (std::uint64_t k = 0; k < 200; ++k) CHECK(point.sample(k) == z);

  const Strategy u = uniform_answers(og);
  const AssignmentSampler uni(marginals(og, u), u.rho, 2);
  const auto probs = uni.branch_probabilities();
  for (double p : probs) CHECK(p == doctest::Approx(1.0 / 16).epsilon(1e-12));
  std::vector<int> counts(16, 0);
  const int samples = 10000;
  for (int k = 0; k < samples; ++k) {
    const auto a = uni.sample(static_cast<std::uint64_t>(k));
    int idx = 0;
    for (int i = 0; i < 4; ++i) idx |= a[i] << i;
    ++counts[idx];
  }
  double chi2 = 0.0;
  const double e = samples / 16.0;
  for (int c : counts) chi2 += (c - e) * (c - e) / e;
  // 15 degrees of freedom, 0.999 quantile 37.7
  CHECK(chi2 < 37.7);
}

TEST_CASE("sampler: branch probabilities against direct products and frequencies") {
  CounterRng rng(31);
  const int d = 3, n = 3;
  MarginalPovm m;
  std::vector<std::array<DenseMatrix, 2>> ref;
  for (int i = 0; i < n; ++i) {
    const auto povm = random_povm(rng, d, 2);
    m.c.push_back({povm[0], povm[1]});
    ref.push_back({povm[0], povm[1]});
  }
  const DenseMatrix rho = random_density(rng, d);
  const AssignmentSampler as(m, rho, 5);
  const auto exact = as.branch_probabilities();
  const auto want = oracle::branch_probabilities(ref, rho);
  REQUIRE(exact.size() == 8);
  double total = 0.0;
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(exact[k] == doctest::Approx(want[k]).epsilon(1e-10));
    total += exact[k];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(as.max_branch_drift() <= 1e-10);

  const int samples = 10000;
  std::vector<int> counts(8, 0);
  for (int k = 0; k < samples; ++k) {
    const auto a = sample_assignment(as, static_cast<std::uint64_t>(k));
    ++counts[a[0] | a[1] << 1 | a[2] << 2];
  }
  for (std::size_t k = 0; k < 8; ++k) {
    const double p = want[k];
    const double sigma = std::sqrt(p * (1 - p) / samples);
    CAPTURE(k);
    CHECK(std::abs(counts[k] / double(samples) - p) <= 3 * sigma);
  }
}

TEST_CASE("sampled satisfaction: parallel equals serial") {
  const CspInstance csp = contradiction();
  const OracleGame og = oracularize(csp);
  const Strategy u = uniform_answers(og);
  const AssignmentSampler as(marginals(og, u), u.rho, 9);
  CHECK(sampled_satisfaction(as, csp, 3000) == sampled_satisfaction_serial(as, csp, 3000));
}

TEST_CASE("satisfied weight and best assignment") {
  const CspInstance csp = contradiction();
  double best = 0.0;
  for (std::uint64_t bits = 0; bits < 16; ++bits) {
    std::vector<int> z(4);
    for (int i = 0; i < 4; ++i) z[i] = static_cast<int>(bits >> i & 1);
    CHECK(satisfied_weight(csp, z) == satisfied_weight(csp, bits));
    best = std::max(best, satisfied_weight(csp, bits));
  }
  CHECK(best == doctest::Approx(2.0 / 3));
  CHECK(satisfied_weight(csp, best_assignment(csp)) == doctest::Approx(2.0 / 3));
  CHECK(best_assignment(satisfiable()) == 1);
}

TEST_CASE("soundness check") {
  SUBCASE("honest strategy on a satisfiable csp") {
    const CspInstance csp = satisfiable();
    const OracleGame og = oracularize(csp);
    const SoundnessReport r = soundness_check(csp, honest_strategy(og, {1, 0, 0, 0}));
    CHECK(r.gameValue == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.satProb == 1.0);
    CHECK(r.satProbExact.value() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.deltaMax == 0.0);
    CHECK(r.withinBudget);
  }
  SUBCASE("best classical strategy on an unsatisfiable csp") {
    const CspInstance csp = contradiction();
    const OracleGame og = oracularize(csp);
    double value = 0.0;
    const Strategy s = best_classical(og.game, value);
    CHECK(value == doctest::Approx(oracle::classical_value(og.game)).epsilon(1e-14));
    const SoundnessReport r = soundness_check(csp, s);
    MESSAGE("unsatisfiable csp: gameValue " << r.gameValue << " satProb " << r.satProb);
    CHECK(r.gameValue == doctest::Approx(value).epsilon(1e-14));
    CHECK(r.gameValue < 1.0);
    CHECK(r.satProb < 1.0);
    CHECK(r.satProbExact.value() <= 2.0 / 3 + 1e-12);
  }
  SUBCASE("errors") {
    const CspInstance csp = satisfiable();
    const Strategy h = honest_strategy(oracularize(csp), {1, 0, 0, 0});
    SoundnessOptions o;
    o.samples = 0;
    CHECK_THROWS_AS(soundness_check(csp, h, o), InputError);
    o.samples = kMaxSamples + 1;
    CHECK_THROWS_AS(soundness_check(csp, h, o), SizeError);
    CHECK_THROWS_AS(soundness_check(contradiction(), h), InputError);
  }
  SUBCASE("csv") {
    const CspInstance csp = satisfiable();
    SoundnessOptions o;
    o.samples = 100;
    const SoundnessReport r = soundness_check(csp, honest_strategy(oracularize(csp), {1, 0, 0, 0}), o);
    const std::string csv = soundness_csv({r});
    CHECK(csv.rfind("nvars,gameValue,eps,deltaMax,samples,satProb,satProbExact\n", 0) == 0);
    CHECK(csv.find("\n4,1,") != std::string::npos);
  }
}

TEST_CASE("uniform marginal reweighting") {
  CspInstance cyc;
  cyc.nvars = 3;
  cyc.clauses = {clause({0, 1, 2}, 0xff, 0.5), clause({1, 2, 0}, 0xff, 0.25), clause({2, 0, 1}, 0xff, 0.25)};
  const ReweightResult r = reweight_uniform_marginals(cyc);
  CHECK(r.deviationBefore == doctest::Approx(1.0 / 6));
  CHECK(r.deviationAfter <= 1e-9);
  CHECK(marginal_deviation(r.csp) == doctest::Approx(r.deviationAfter));
  for (const auto& c : r.csp.clauses) CHECK(c.weight == doctest::Approx(1.0 / 3).epsilon(1e-8));

  // position 1 always holds variable 1: uniformity is impossible
  const ReweightResult s = reweight_uniform_marginals(satisfiable());
  CHECK(s.deviationAfter <= s.deviationBefore + 1e-15);
  CHECK(s.deviationAfter == doctest::Approx(0.75));
}
