// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "oracles.hpp"
#include "qcsdp/errors.hpp"
#include "qcsdp/extraction.hpp"
#include "qcsdp/games.hpp"
#include "qcsdp/rounding.hpp"
#include "qcsdp/solver.hpp"
#include "qcsdp/suites.hpp"

using namespace qcsdp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Instance {
  std::string name;
  Game game;
  int level = 0;
  double solveSeconds = 0.0;
  SdpSolution sol;
  bool rounded = false;
  IdentityReport identities;
  ValueReport value;
  CommutatorBoundReport comm;
  std::string error;
};

Instance run_instance(const std::string& name, const Game& g, int n) {
  Instance in;
  in.name = name;
  in.game = g;
  in.level = n;
  try {
    const auto t0 = Clock::now();
    in.sol = solve_level(g, n);
    in.solveSeconds = seconds_since(t0);
    if (n >= 2) {
      const GramSolution gs = extract_gram(in.sol, kRoundingGramClamp);
      const ProjectorFamily pf = build_projectors(g, gs);
      in.identities = verify_identities(pf, gs);
      const RoundedStrategy rs = round(pf, gs);
      in.value = verify_value(g, rs, in.sol);
      in.comm = verify_commutators(rs);
      in.rounded = true;
    }
    fmt::print("  [{} N={}] optimum {:.10f} ({:.1f} s total)\n", name, n, in.sol.optimum, seconds_since(t0));
  } catch (const std::exception& e) {
    in.error = e.what();
    fmt::print("  [{} N={}] error: {}\n", name, n, in.error);
  }
  std::fflush(stdout);
  return in;
}

int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
  if (!ok) ++failures;
  fmt::print("{} {:>2} {}\n", ok ? "PASS" : "FAIL", id, what);
  std::fflush(stdout);
}

}  // namespace

int main() {
  const double tsirelson = (2.0 + std::sqrt(2.0)) / 4.0;
  std::map<std::string, std::vector<Instance>> runs;

  fmt::print("solving instances\n");
  for (int n = 1; n <= 4; ++n) runs["chsh"].push_back(run_instance("chsh", chsh(), n));
  for (std::uint64_t seed : {1, 2}) {
    const std::string name = fmt::format("random:{}", seed);
    for (int n = 1; n <= 3; ++n) runs[name].push_back(run_instance(name, random_binary_game(seed), n));
  }

  // 1
  {
    const Instance& c1 = runs["chsh"][0];
    const double strat = strategy_value(chsh(), tsirelson_strategy());
    const double ref = oracle::tsirelson_value();
    fmt::print("  optimum {:.10f}, |opt - (2+sqrt2)/4| = {:.2e}, qubit strategy {:.10f} (test oracle {:.10f}), {:.3f} s\n",
               c1.sol.optimum, std::abs(c1.sol.optimum - tsirelson), strat, ref, c1.solveSeconds);
    const bool ok = c1.error.empty() && std::abs(c1.sol.optimum - tsirelson) <= 1e-6 &&
                    std::abs(strat - tsirelson) <= 1e-6 && std::abs(ref - c1.sol.optimum) <= 1e-6 && c1.solveSeconds < 5.0;
    verdict(1, ok, "CHSH level-1 optimum = (2+sqrt2)/4 within 1e-6 in < 5 s; qubit strategy reaches it");
  }

  // 2
  {
    bool ok = true;
    for (const char* name : {"chsh", "random:1", "random:2"})
      for (int n : {2, 3}) {
        const Instance& in = runs[name][static_cast<std::size_t>(n - 1)];
        const bool good = in.rounded && std::abs(in.value.value - in.sol.optimum) <= 1e-6 &&
                          in.value.maxGarbageProbability <= 1e-8;
        ok = ok && good;
        fmt::print("  {} N={}: sdp {:.10f} rounded {:.10f} |diff| {:.2e} garbage prob {:.2e}{}\n", name, n,
                   in.sol.optimum, in.value.value, std::abs(in.value.value - in.sol.optimum),
                   in.value.maxGarbageProbability, in.error.empty() ? "" : " error: " + in.error);
      }
    verdict(2, ok, "rounded value = SDP value within 1e-6, garbage probability <= 1e-8 (CHSH, 2 random games, N = 2, 3)");
  }

  // 3
  {
    bool ok = true;
    for (int n : {2, 3, 4}) {
      const Instance& in = runs["chsh"][static_cast<std::size_t>(n - 1)];
      const double bound = kCommutatorConstant / std::sqrt(n - 1.0);
      const double scaled = in.comm.maxCommutator * std::sqrt(n - 1.0);
      const bool good = in.rounded && in.comm.maxCommutator <= bound && scaled <= kCommutatorConstant;
      ok = ok && good;
      fmt::print("  N={}: max ||[P~,Q~]|| {:.6f} bound C0/sqrt(N-1) {:.4f} scaled {:.4f} (per-instance bound {:.4f})\n", n,
                 in.comm.maxCommutator, bound, scaled, in.comm.instanceBound);
    }
    const double t4 = runs["chsh"][3].solveSeconds;
    fmt::print("  C0 = {}, N=4 solve {:.0f} s\n", kCommutatorConstant, t4);
    ok = ok && t4 < 1800.0;
    verdict(3, ok, "CHSH N = 2, 3, 4: max commutator <= C0/sqrt(N-1), C0 = 6; N = 4 under 30 min");
  }

  // 4
  {
    bool ok = true;
    for (auto& [name, list] : runs)
      for (const Instance& in : list) {
        if (in.level < 2) continue;
        const double b = in.comm.bound;
        const bool good = in.rounded && in.comm.maxGarbageP <= in.comm.ax * b && in.comm.maxGarbageQ <= in.comm.ay * b &&
                          in.comm.maxGarbageBoth <= in.comm.ax * in.comm.ay * b;
        ok = ok && good;
        fmt::print("  {} N={}: garbage P {:.4f} <= {:.2f}, Q {:.4f} <= {:.2f}, both {:.4f} <= {:.2f}\n", name, in.level,
                   in.comm.maxGarbageP, in.comm.ax * b, in.comm.maxGarbageQ, in.comm.ay * b, in.comm.maxGarbageBoth,
                   in.comm.ax * in.comm.ay * b);
      }
    verdict(4, ok, "garbage commutators <= |A|, |B|, |A||B| times the non-garbage bound");
  }

  // 5
  {
    bool ok = true;
    for (auto& [name, list] : runs)
      for (const Instance& in : list) {
        if (in.level < 2) continue;
        const IdentityReport& r = in.identities;
        ok = ok && in.rounded && r.ok(1e-5);
        fmt::print("  {} N={}: vector-sum {:.1e} action {:.1e} nesting {:.1e} shape {:.1e} cancellation {:.1e} one-shift {:.1e}\n",
                   name, in.level, r.vectorSum, r.projectorAction, r.levelNesting, r.projectorShape, r.cancellation,
                   r.oneShift);
      }
    verdict(5, ok, "projector identity residuals <= 1e-5 on every solved instance");
  }

  // 6
  {
    const SuiteResult r = dilation_suite(0, 100, 8);
    fmt::print("  {} trials, {} failures, worst lhs/rhs {:.3g}; max ||[A~,B~]|| / (ax ay sqrt(delta)) {:.3f}\n", r.trials,
               r.failures, r.worstRatio, r.worstAux);
    if (!r.firstFailure.empty()) fmt::print("  first failure: {}\n", r.firstFailure);
    verdict(6, r.passed(), "projective dilation: projective, value-preserving (1e-9), ||[A~,B~]|| <= ax ay delta + 1e-9");
  }

  // 7
  {
    const SuiteResult cp = com_power_suite(0, 1000, 16);
    const SuiteResult sq = sq_bound_suite(0, 100);
    fmt::print("  com-power: {} trials, {} failures, worst lhs/rhs {:.3g}\n", cp.trials, cp.failures, cp.worstRatio);
    fmt::print("  sq-bound: {} families, {} failures, worst lhs/rhs {:.3g} (constants {} and {:.4f})\n", sq.trials,
               sq.failures, sq.worstRatio, kSqBoundConstant, kSqTraceConstant);
    verdict(7, cp.passed() && sq.passed(), "commutator power bound (1000 pairs) and square-root closeness bounds (100 families)");
  }

  // 8
  {
    std::vector<int> dims;
    for (int d = 2; d <= 256; ++d) dims.push_back(d);
    const auto t0 = Clock::now();
    const auto rows = voiculescu_table(dims);
    const SuiteResult r = voiculescu_suite(rows);
    double worst = 0.0;
    for (const auto& row : rows) worst = std::max(worst, std::abs(row.norm - 2 * std::sin(std::numbers::pi / row.d)));
    for (int d : {2, 4, 64, 256}) {
      const auto& row = rows[static_cast<std::size_t>(d - 2)];
      fmt::print("  d={}: ||[U1,U2]|| {:.12f}, 2 sin(pi/d) {:.12f}, d * norm {:.6f}\n", d, row.norm, row.expected, d * row.norm);
    }
    fmt::print("  d = 2..256: max deviation {:.2e} ({:.0f} s)\n", worst, seconds_since(t0));
    verdict(8, r.passed() && worst <= 1e-10, "Voiculescu pair: ||[U1,U2]|| = 2 sin(pi/d) within 1e-10, d = 2..256");
  }

  // 9
  {
    CspInstance csp;
    csp.nvars = 4;
    Clause a, b;
    a.vars = {0, 1, 2};
    a.accept = 0b10010110;
    a.weight = 0.5;
    b.vars = {3, 1, 2};
    b.accept = 0x01;
    b.weight = 0.5;
    csp.clauses = {a, b};
    const OracleGame og = oracularize(csp);
    SoundnessOptions opts;
    opts.samples = 10000;
    const SoundnessReport honest = soundness_check(csp, honest_strategy(og, {1, 0, 0, 0}), opts);
    fmt::print("  honest: gameValue {:.17g} satProb {} (exact {})\n", honest.gameValue, honest.satProb, *honest.satProbExact);
    bool ok = honest.satProb == 1.0 && std::abs(honest.gameValue - 1.0) <= 1e-12;

    // mixed-outcome sampler: perturbed honest strategy on C^3
    CounterRng rng(42);
    const int d = 3;
    const double eta = 0.3;
    Strategy s;
    s.dim = d;
    s.rho = random_density(rng, d);
    const Strategy h = honest_strategy(og, {1, 0, 0, 0});
    for (auto [src, dst] : {std::pair{&h.povmA, &s.povmA}, std::pair{&h.povmB, &s.povmB}})
      for (const auto& q : *src) {
        const auto r = random_povm(rng, d, static_cast<int>(q.size()));
        std::vector<DenseMatrix> e;
        for (std::size_t k = 0; k < q.size(); ++k)
          e.push_back((1 - eta) * q[k](0, 0) * DenseMatrix::Identity(d, d) + eta * r[k]);
        dst->push_back(e);
      }
    const AssignmentSampler as(marginals(og, s), s.rho, 7);
    const auto exact = as.branch_probabilities();
    std::vector<int> counts(exact.size(), 0);
    for (int k = 0; k < opts.samples; ++k) {
      const auto z = as.sample(static_cast<std::uint64_t>(k));
      std::size_t idx = 0;
      for (int i = 0; i < as.nvars(); ++i) idx |= static_cast<std::size_t>(z[static_cast<std::size_t>(i)]) << i;
      ++counts[idx];
    }
    double worstSigma = 0.0, total = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k) {
      total += exact[k];
      const double sigma = std::sqrt(exact[k] * (1 - exact[k]) / opts.samples);
      const double dev = std::abs(counts[k] / double(opts.samples) - exact[k]);
      worstSigma = std::max(worstSigma, sigma > 0 ? dev / sigma : (dev > 0 ? INFINITY : 0.0));
    }
    fmt::print("  perturbed strategy: {} branches, sum {:.15f}, worst |freq - p| / sigma = {:.2f} over {} samples\n",
               exact.size(), total, worstSigma, opts.samples);
    ok = ok && worstSigma <= 3.0 && std::abs(total - 1.0) <= 1e-10;
    verdict(9, ok, "extraction: honest strategy gives satProb = 1; exact branch probabilities match frequencies within 3 sigma");
  }

  // 10
  {
    bool ok = true;
    for (auto& [name, list] : runs) {
      std::string seq;
      for (std::size_t k = 0; k < list.size(); ++k) {
        seq += fmt::format(" {:.10f}", list[k].sol.optimum);
        ok = ok && list[k].error.empty();
        if (k > 0) ok = ok && list[k].sol.optimum <= list[k - 1].sol.optimum + 1e-7;
      }
      fmt::print("  {}:{}\n", name, seq);
    }
    verdict(10, ok, "hierarchy monotonicity: optimum non-increasing in N within 1e-7");
  }

  fmt::print("{} of 10 criteria failed\n", failures);
  return failures;
}
