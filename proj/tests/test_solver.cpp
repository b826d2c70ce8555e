#include <doctest.h>

#include <chrono>
#include <cmath>

#include "oracles.hpp"
#include "qcsdp/errors.hpp"
#include "qcsdp/games.hpp"
#include "qcsdp/ipm.hpp"
#include "qcsdp/rng.hpp"
#include "qcsdp/rounding.hpp"
#include "qcsdp/solver.hpp"

using namespace qcsdp;

namespace {
const double kTsirelson = (2.0 + std::sqrt(2.0)) / 4.0;
}

TEST_CASE("ipm: small LMIs with closed-form optima") {
  SUBCASE("max y, [[1, y], [y, 1]] >= 0") {
    LmiProblem p;
    p.F0 = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd f(2, 2);
    f << 0, 1, 1, 0;
    p.F = {f};
    p.c = Eigen::VectorXd::Constant(1, 1.0);
    const IpmResult r = solve_lmi(p);
    CHECK(r.status == IpmStatus::Solved);
    CHECK(r.dualObjective == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.y(0) == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("max y1 + y2 over a disc") {
    // [[1 + y1, y2], [y2, 1 - y1]] >= 0 is the unit disc; optimum sqrt(2).
    LmiProblem p;
    p.F0 = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd f1(2, 2), f2(2, 2);
    f1 << 1, 0, 0, -1;
    f2 << 0, 1, 1, 0;
    p.F = {f1, f2};
    p.c = Eigen::VectorXd::Ones(2);
    const IpmResult r = solve_lmi(p);
    CHECK(r.status == IpmStatus::Solved);
    CHECK(r.dualObjective == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
    CHECK(r.relGap <= 1e-8);
  }
}

TEST_CASE("schur complement: parallel equals serial") {
  CounterRng rng(3);
  const int n = 7, m = 9;
  auto sym = [&] {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    return Eigen::MatrixXd((a + a.transpose()) / 2);
  };
  std::vector<Eigen::MatrixXd> as;
  for (int k = 0; k < m; ++k) as.push_back(sym());
  Eigen::MatrixXd x = sym(), z = sym();
  x = x * x.transpose() + Eigen::MatrixXd::Identity(n, n);
  z = z * z.transpose() + Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd zinv = z.inverse();
  const Eigen::MatrixXd par = schur_complement(as, x, zinv);
  const Eigen::MatrixXd ser = schur_complement_serial(as, x, zinv);
  CHECK((par - ser).norm() <= 1e-13 * ser.norm());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) CHECK(par(i, j) == doctest::Approx((as[i] * x * as[j] * zinv).trace()).epsilon(1e-10));
}

TEST_CASE("trivial game") {
  const SdpSolution s = solve_level(trivial_game(true), 1);
  CHECK(std::abs(s.optimum - 1.0) <= 1e-8);
  CHECK((s.gamma - Eigen::MatrixXd::Ones(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
  const SdpSolution z = solve_level(trivial_game(false), 1);
  CHECK(std::abs(z.optimum) <= 1e-8);
}

TEST_CASE("chsh level 1 and 2") {
  CHECK(oracle::tsirelson_value() == doctest::Approx(kTsirelson).epsilon(1e-14));
  const auto t0 = std::chrono::steady_clock::now();
  const SdpSolution s1 = solve_level(chsh(), 1);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 5.0);
  CHECK(s1.status == SolveStatus::Solved);
  CHECK(std::abs(s1.optimum - kTsirelson) <= 1e-6);
  CHECK(std::abs(s1.optimum - strategy_value(chsh(), tsirelson_strategy())) <= 1e-6);
  CHECK(s1.maxResidual <= 1e-8);
  CHECK(s1.minEigenvalue >= -1e-8);

  const SdpSolution s2 = solve_level(chsh(), 2);
  CHECK(std::abs(s2.optimum - s1.optimum) <= 1e-6);
  CHECK(s2.optimum <= s1.optimum + 1e-7);

  const GramSolution g1 = extract_gram(s1);
  CHECK(g1.reconstructionError <= 1e-8);
  const GramSolution g2 = extract_gram(s2);
  CHECK(g2.reconstructionError <= 1e-6);

  // vector-sum residual checked directly on the Gram vectors:
  // v_s = sum_a v_{P_x^a s} for |s| <= N - 1
  const WordIndex w = build_word_index(chsh(), 2);
  double worst = 0.0;
  for (int s = 0; s < static_cast<int>(w.count_upto(1)); ++s)
    for (int x = 0; x < 2; ++x) {
      Vector sum = Vector::Zero(g2.vectors.rows());
      for (int a = 0; a < 2; ++a) sum += g2.vectors.col(w.prepend(w.letter_p(x, a), s));
      worst = std::max(worst, (sum - g2.vectors.col(s)).norm());
    }
  CHECK(worst <= 1e-5);
}

TEST_CASE("gram extraction on fixed matrices") {
  SdpSolution s;
  s.status = SolveStatus::Solved;
  s.gamma = Eigen::MatrixXd::Ones(4, 4);
  GramSolution g = extract_gram(s);
  CHECK(g.rank == 1);
  for (int j = 1; j < 4; ++j) CHECK((g.vectors.col(j) - g.vectors.col(0)).norm() <= 1e-12);
  s.gamma = Eigen::MatrixXd::Identity(4, 4);
  g = extract_gram(s);
  CHECK(g.rank == 4);
  CHECK((g.vectors.adjoint() * g.vectors - DenseMatrix::Identity(4, 4)).norm() <= 1e-12);
}

TEST_CASE("hierarchy monotonicity on random games") {
  for (std::uint64_t seed : {1, 2}) {
    const Game g = random_binary_game(seed);
    double prev = 2.0;
    for (int n : {1, 2, 3}) {
      const SdpSolution s = solve_level(g, n);
      CHECK(s.optimum <= prev + 1e-7);
      CHECK(s.optimum >= oracle::classical_value(g) - 1e-7);
      prev = s.optimum;
    }
  }
}

TEST_CASE("solution file round trip") {
  const SdpSolution s = solve_level(chsh(), 2);
  const SdpSolution t = parse_solution(serialize_solution(s));
  CHECK(t.level == s.level);
  CHECK(t.gameHash == s.gameHash);
  CHECK(t.optimum == s.optimum);
  CHECK(t.recenterLoss == s.recenterLoss);
  CHECK((t.gamma - s.gamma).cwiseAbs().maxCoeff() == 0.0);
  CHECK(t.factor.has_value() == s.factor.has_value());
  CHECK_THROWS_AS(parse_solution("nonsense"), InputError);
}
