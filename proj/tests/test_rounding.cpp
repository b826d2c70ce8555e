#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qcsdp/errors.hpp"
#include "qcsdp/games.hpp"
#include "qcsdp/rounding.hpp"
#include "qcsdp/solver.hpp"

using namespace qcsdp;

namespace {

struct Pipeline {
  SdpSolution sol;
  GramSolution gs;
  ProjectorFamily pf;
  RoundedStrategy rs;
};

Pipeline run(const Game& g, int n) {
  Pipeline p;
  p.sol = solve_level(g, n);
  p.gs = extract_gram(p.sol, kRoundingGramClamp);
  p.pf = build_projectors(g, p.gs);
  p.rs = round(p.pf, p.gs);
  return p;
}

double expect(const DenseMatrix& rho, const DenseMatrix& e, const DenseMatrix& f) {
  return std::abs((e * f * rho).trace());
}

// Largest garbage-involving probability, both orderings.
double garbage_probability(const RoundedStrategy& rs) {
  double worst = 0.0;
  for (std::size_t x = 0; x < rs.pTilde.size(); ++x)
    for (std::size_t y = 0; y < rs.qTilde.size(); ++y) {
      std::vector<DenseMatrix> qs = rs.qTilde[y];
      qs.push_back(rs.qGarbage[y]);
      for (const auto& q : qs) {
        worst = std::max({worst, expect(rs.rho, rs.pGarbage[x], q), expect(rs.rho, q, rs.pGarbage[x])});
      }
      for (const auto& p : rs.pTilde[x]) {
        worst = std::max({worst, expect(rs.rho, p, rs.qGarbage[y]), expect(rs.rho, rs.qGarbage[y], p)});
      }
    }
  return worst;
}

}  // namespace

TEST_CASE("weights") {
  const RoundingWeights u = uniform_weights(4);
  CHECK(u.p == std::vector<double>{0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0});
  CHECK_NOTHROW(validate_weights(u, 4));
  CHECK_THROWS_AS(validate_weights(u, 3), InputError);
  RoundingWeights bad = u;
  bad.p[0] = 0.1;
  bad.p[1] -= 0.1;
  CHECK_THROWS_AS(validate_weights(bad, 4), InputError);
  bad = u;
  bad.q[2] += 0.5;
  CHECK_THROWS_AS(validate_weights(bad, 4), InputError);

  const RoundingWeights nonuniform = parse_weights(R"({"p":[0,0.25,0.5,0.25,0],"q":[0,0.5,0.25,0.25,0]})");
  CHECK_NOTHROW(validate_weights(nonuniform, 4));
  const WeightProfileCheck c = check_weight_profile(nonuniform, 4);
  CHECK(c.sumP2 == doctest::Approx(0.375));
  CHECK(c.sumQ2 == doctest::Approx(0.375));
  CHECK(c.sumPQ == doctest::Approx(0.3125));
  CHECK(c.bound == doctest::Approx(0.75));
  CHECK(c.holds);
  const RoundingWeights peaked = parse_weights(R"({"p":[0,0,0,0,0,0,0,0,0,0,0,1,0],"q":[0,0,0,0,0,0,0,0,0,0,0,1,0]})");
  CHECK_FALSE(check_weight_profile(peaked, 12).holds);
  CHECK_THROWS_AS(parse_weights(R"({"p":[0,1,0]})"), InputError);
  CHECK_THROWS_AS(parse_weights("{"), InputError);
}

TEST_CASE("trivial game rounds to the projector onto v_phi") {
  const Pipeline p = run(trivial_game(true), 2);
  REQUIRE(p.rs.dim == p.gs.rank);
  const Vector phi = p.gs.vectors.col(0) / p.gs.vectors.col(0).norm();
  const DenseMatrix proj = phi * phi.adjoint();
  const DenseMatrix id = DenseMatrix::Identity(p.rs.dim, p.rs.dim);
  CHECK(oracle::opnorm(p.rs.pTilde[0][0] - proj) <= 1e-8);
  CHECK(oracle::opnorm(p.rs.qTilde[0][0] - proj) <= 1e-8);
  CHECK(oracle::opnorm(p.rs.pGarbage[0] - (id - proj)) <= 1e-8);
  for (const auto& l : p.pf.level) CHECK(oracle::opnorm(l - proj) <= 1e-8);
  const ValueReport v = verify_value(trivial_game(true), p.rs, p.sol);
  CHECK(v.value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(v.maxGarbageProbability <= 1e-12);
  const CommutatorBoundReport c = verify_commutators(p.rs);
  CHECK(c.maxCommutator <= 1e-8);
  CHECK(c.max_garbage() <= 1e-8);
}

TEST_CASE("chsh level 2") {
  const Game g = chsh();
  const Pipeline p = run(g, 2);
  const WordIndex& w = p.pf.words;

  SUBCASE("projectors") {
    // Pi_{<=1} against an independent pivoted Gram-Schmidt span
    const DenseMatrix cols = p.gs.vectors.leftCols(static_cast<Eigen::Index>(w.count_upto(1)));
    const double rank1 = p.pf.level[1].trace().real();
    CHECK(rank1 <= 9.0 + 1e-9);
    CHECK(oracle::opnorm(p.pf.level[1] - oracle::projector(cols)) <= 1e-6);
    for (std::size_t i = 0; i < p.pf.level.size(); ++i)
      for (std::size_t j = 0; j < p.pf.level.size(); ++j) {
        const DenseMatrix& lo = p.pf.level[std::min(i, j)];
        CHECK(oracle::opnorm(p.pf.level[i] * p.pf.level[j] - lo) <= 1e-7);
      }
    // projector action
    double action = 0.0;
    for (int s = 0; s < static_cast<int>(w.count_upto(1)); ++s)
      for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a) {
          const Vector lhs = p.pf.labelP[x][a] * p.gs.vectors.col(s);
          action = std::max(action, (lhs - p.gs.vectors.col(w.prepend(w.letter_p(x, a), s))).norm());
        }
    CHECK(action <= 1e-5);
    const IdentityReport ir = verify_identities(p.pf, p.gs);
    CHECK(ir.ok());
    CHECK(ir.projectorAction == doctest::Approx(action).epsilon(1e-3));
    CHECK(ir.levelNesting <= 1e-7);
    CHECK(ir.cancellation <= 1e-5);
    CHECK(ir.oneShift <= 1e-5);
  }

  SUBCASE("rounded operators follow the graded formula") {
    const int n = 2;
    const RoundingWeights wts = uniform_weights(n);
    for (int x = 0; x < 2; ++x) {
      DenseMatrix sum = DenseMatrix::Zero(p.rs.dim, p.rs.dim);
      for (int a = 0; a < 2; ++a) {
        DenseMatrix want = DenseMatrix::Zero(p.rs.dim, p.rs.dim);
        for (int i = 0; i <= n; ++i) want += wts.p[i] * p.pf.level[i] * p.pf.labelP[x][a] * p.pf.level[i];
        CHECK(oracle::opnorm(p.rs.pTilde[x][a] - want) <= 1e-12);
        sum += p.rs.pTilde[x][a];
      }
      CHECK(oracle::opnorm(sum + p.rs.pGarbage[x] - DenseMatrix::Identity(p.rs.dim, p.rs.dim)) <= 1e-8);
      CHECK(oracle::hermitian_eigenvalues(p.rs.pGarbage[x]).front() >= -1e-8);
    }
    CHECK(std::abs(p.rs.rho.trace().real() - 1.0) <= 1e-12);
  }

  SUBCASE("value and entries") {
    const ValueReport v = verify_value(g, p.rs, p.sol);
    CHECK(std::abs(v.value - p.sol.optimum) <= 1e-6);
    CHECK(std::abs(v.value - (2 + std::sqrt(2.0)) / 4) <= 1e-6);
    CHECK(v.maxGarbageProbability <= 1e-8);
    CHECK(garbage_probability(p.rs) <= 1e-8);
    double entry = 0.0;
    for (int x = 0; x < 2; ++x)
      for (int a = 0; a < 2; ++a)
        for (int y = 0; y < 2; ++y)
          for (int b = 0; b < 2; ++b) {
            const double model = (p.rs.pTilde[x][a] * p.rs.qTilde[y][b] * p.rs.rho).trace().real();
            const int u = w.find({w.letter_p(x, a)}), t = w.find({w.letter_q(y, b)});
            entry = std::max(entry, std::abs(model - p.sol.gamma(u, t)));
          }
    CHECK(entry <= 1e-6);
  }

  SUBCASE("strategies and files") {
    const Strategy extra = to_strategy(p.rs, GarbagePolicy::ExtraOutcome);
    const Game gg = with_garbage_answers(g);
    CHECK_NOTHROW(check_strategy(gg, extra, 1e-8));
    CHECK(strategy_value(gg, extra) == doctest::Approx(verify_value(g, p.rs, p.sol).value).epsilon(1e-10));
    const Strategy merged = to_strategy(p.rs, GarbagePolicy::MergeIntoFirst);
    CHECK_NOTHROW(check_strategy(g, merged, 1e-8));
    CHECK(std::abs(strategy_value(g, merged) - p.sol.optimum) <= 1e-6);

    const RoundedStrategy back = parse_rounded(serialize_rounded(p.rs));
    CHECK(back.level == p.rs.level);
    CHECK((back.pTilde[1][0] - p.rs.pTilde[1][0]).norm() == 0.0);
    CHECK((back.rho - p.rs.rho).norm() == 0.0);
    CHECK(back.weights.q == p.rs.weights.q);
  }

  SUBCASE("gram mismatch") {
    CHECK_THROWS_AS(build_projectors(trivial_game(), extract_gram(solve_level(chsh(), 2), 0.0)), InputError);
  }
}

TEST_CASE("commutator bounds at levels 2 and 3") {
  for (int n : {2, 3}) {
    CAPTURE(n);
    const Pipeline p = run(chsh(), n);
    const CommutatorBoundReport c = verify_commutators(p.rs);
    CHECK(c.bound == doctest::Approx(kCommutatorConstant / std::sqrt(n - 1.0)));
    // independent recomputation of the max non-garbage commutator
    double ref = 0.0;
    for (const auto& px : p.rs.pTilde)
      for (const auto& e : px)
        for (const auto& qy : p.rs.qTilde)
          for (const auto& f : qy) ref = std::max(ref, oracle::opnorm(e * f - f * e));
    CHECK(c.maxCommutator == doctest::Approx(ref).epsilon(1e-8));
    CHECK(c.holds());
    CHECK(c.maxCommutator * std::sqrt(n - 1.0) <= kCommutatorConstant);
    CHECK(c.maxGarbageP <= 2 * c.bound);
    CHECK(c.maxGarbageQ <= 2 * c.bound);
    CHECK(c.maxGarbageBoth <= 4 * c.bound);
    CHECK(c.garbage_holds());
    const ValueReport v = verify_value(chsh(), p.rs, p.sol);
    CHECK(v.maxEntryDeviation <= 1e-6);
    CHECK(v.ok());
    CHECK(verify_identities(p.pf, p.gs).ok());
  }
}

TEST_CASE("study") {
  const auto one = study_convergence(chsh(), {1});
  REQUIRE(one.size() == 1);
  CHECK(one[0].status == "ok");
  CHECK(one[0].sdpValue.has_value());
  CHECK_FALSE(one[0].roundedValue.has_value());

  const auto rows = study_convergence(chsh(), {2, 3});
  REQUIRE(rows.size() == 2);
  CHECK(*rows[1].sdpValue <= *rows[0].sdpValue + 1e-7);
  CHECK(std::abs(*rows[1].sdpValue - *rows[0].sdpValue) <= 1e-6);

  StudyOptions small;
  small.wordCap = 100;
  const auto capped = study_convergence(chsh(), {2, 3}, small);
  CHECK(capped[0].status == "ok");
  CHECK(capped[1].status == "size-cap");
  CHECK_FALSE(capped[1].sdpValue.has_value());

  const std::string csv = study_csv(capped);
  CHECK(csv.rfind("N,sdpValue,roundedValue,maxCommutator,maxGarbageCommutator,identityResidualMax,status\n", 0) == 0);
  CHECK(csv.find("\n3,,,,,,size-cap\n") != std::string::npos);
}
