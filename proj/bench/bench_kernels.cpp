// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "qcsdp/extraction.hpp"
#include "qcsdp/games.hpp"
#include "qcsdp/hierarchy.hpp"
#include "qcsdp/ipm.hpp"
#include "qcsdp/linalg.hpp"
#include "qcsdp/rng.hpp"
#include "qcsdp/suites.hpp"

using namespace qcsdp;

namespace {

CspInstance bench_csp(int nvars, int clauses) {
  CounterRng rng(99);
  CspInstance c;
  c.nvars = nvars;
  for (int k = 0; k < clauses; ++k) {
    Clause cl;
    const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(nvars)));
    int b = a, d = a;
    while (b == a) b = static_cast<int>(rng.below(static_cast<std::uint64_t>(nvars)));
    while (d == a || d == b) d = static_cast<int>(rng.below(static_cast<std::uint64_t>(nvars)));
    cl.vars = {a, b, d};
    cl.accept = 0b10010110;
    cl.weight = 1.0 / clauses;
    c.clauses.push_back(cl);
  }
  return c;
}

// 4^7 * 3^4 deterministic strategies.
const Game& oracle_game() {
  static const Game g = [] {
    CounterRng rng(8);
    Game out;
    out.qx = 7;
    out.qy = 4;
    out.ax = 4;
    out.ay = 3;
    out.mu.assign(static_cast<std::size_t>(out.qx * out.qy), 1.0 / (out.qx * out.qy));
    out.predicate.resize(out.predicate_size());
    for (auto& v : out.predicate) v = rng.uniform() < 0.5;
    return out;
  }();
  return g;
}

void BM_ClassicalValue(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(classical_value(oracle_game()));
}
void BM_ClassicalValueSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(classical_value_serial(oracle_game()));
}

struct Families {
  std::vector<DenseMatrix> as, bs;
};
const Families& families() {
  static const Families f = [] {
    CounterRng rng(3);
    Families out;
    for (int k = 0; k < 16; ++k) out.as.push_back(random_psd(rng, 32, 32));
    for (int k = 0; k < 16; ++k) out.bs.push_back(random_psd(rng, 32, 32));
    return out;
  }();
  return f;
}

void BM_CommutatorTable(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(commutator_norm_table(families().as, families().bs));
}
void BM_CommutatorTableSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(commutator_norm_table_serial(families().as, families().bs));
}

std::vector<std::vector<Term>> raw_rows() {
  CounterRng rng(4);
  std::vector<std::vector<Term>> rows(20000);
  for (auto& r : rows)
    for (int k = 0; k < 6; ++k)
      r.push_back({static_cast<std::int32_t>(rng.below(500)), static_cast<std::int32_t>(rng.below(500)), rng.normal()});
  return rows;
}

void BM_Canonicalize(benchmark::State& st) {
  const auto rows = raw_rows();
  for (auto _ : st) {
    auto r = rows;
    std::vector<double> rhs(r.size(), 1.0);
    std::vector<char> keep;
    canonicalize_batch(r, rhs, keep);
    benchmark::DoNotOptimize(keep.data());
  }
}
void BM_CanonicalizeSerial(benchmark::State& st) {
  const auto rows = raw_rows();
  for (auto _ : st) {
    auto r = rows;
    std::vector<double> rhs(r.size(), 1.0);
    std::vector<char> keep;
    canonicalize_batch_serial(r, rhs, keep);
    benchmark::DoNotOptimize(keep.data());
  }
}

struct SchurInput {
  std::vector<Eigen::MatrixXd> a;
  Eigen::MatrixXd x, zinv;
};
const SchurInput& schur_input() {
  static const SchurInput s = [] {
    CounterRng rng(5);
    const int n = 40, m = 120;
    auto sym = [&] {
      Eigen::MatrixXd a(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
      return Eigen::MatrixXd(a + a.transpose());
    };
    SchurInput in;
    for (int k = 0; k < m; ++k) in.a.push_back(sym());
    const Eigen::MatrixXd b = sym(), c = sym();
    in.x = b * b.transpose() + Eigen::MatrixXd::Identity(n, n);
    in.zinv = (c * c.transpose() + Eigen::MatrixXd::Identity(n, n)).inverse();
    return in;
  }();
  return s;
}

void BM_Schur(benchmark::State& st) {
  const auto& s = schur_input();
  for (auto _ : st) benchmark::DoNotOptimize(schur_complement(s.a, s.x, s.zinv));
}
void BM_SchurSerial(benchmark::State& st) {
  const auto& s = schur_input();
  for (auto _ : st) benchmark::DoNotOptimize(schur_complement_serial(s.a, s.x, s.zinv));
}

void BM_ComPowerSuite(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(com_power_suite(0, 100));
}
void BM_ComPowerSuiteSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(com_power_suite_serial(0, 100));
}
void BM_SqBoundSuite(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sq_bound_suite(0, 10));
}
void BM_SqBoundSuiteSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sq_bound_suite_serial(0, 10));
}
void BM_DilationSuite(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(dilation_suite(0, 10));
}
void BM_DilationSuiteSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(dilation_suite_serial(0, 10));
}

struct SamplerInput {
  CspInstance csp;
  MarginalPovm m;
  DenseMatrix rho;
};
const SamplerInput& sampler_input() {
  static const SamplerInput s = [] {
    SamplerInput in;
    in.csp = bench_csp(8, 10);
    CounterRng rng(6);
    for (int i = 0; i < in.csp.nvars; ++i) {
      const auto p = random_povm(rng, 8, 2);
      in.m.c.push_back({p[0], p[1]});
    }
    in.rho = random_density(rng, 8);
    return in;
  }();
  return s;
}

void BM_SampledSatisfaction(benchmark::State& st) {
  const auto& in = sampler_input();
  const AssignmentSampler as(in.m, in.rho, 1);
  for (auto _ : st) benchmark::DoNotOptimize(sampled_satisfaction(as, in.csp, 2000));
}
void BM_SampledSatisfactionSerial(benchmark::State& st) {
  const auto& in = sampler_input();
  const AssignmentSampler as(in.m, in.rho, 1);
  for (auto _ : st) benchmark::DoNotOptimize(sampled_satisfaction_serial(as, in.csp, 2000));
}

const std::vector<int> kDims{16, 32, 64, 128};
void BM_Voiculescu(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(voiculescu_table(kDims));
}
void BM_VoiculescuSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(voiculescu_table_serial(kDims));
}

}  // namespace

BENCHMARK(BM_ClassicalValue)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClassicalValueSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CommutatorTable)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CommutatorTableSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Canonicalize)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CanonicalizeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Schur)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SchurSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ComPowerSuite)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ComPowerSuiteSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SqBoundSuite)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SqBoundSuiteSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DilationSuite)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DilationSuiteSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampledSatisfaction)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampledSatisfactionSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Voiculescu)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VoiculescuSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
