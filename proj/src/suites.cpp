#include "qcsdp/suites.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qcsdp/errors.hpp"

namespace qcsdp {

namespace {

struct TrialOutcome {
  bool ok = true;
  double ratio = 0.0;
  std::string message;
  double aux = 0.0;
};

template <class Trial>
SuiteResult run_suite(const std::string& name, int trials, const Trial& trial, bool parallel) {
  std::vector<TrialOutcome> out(static_cast<std::size_t>(std::max(trials, 0)));
  auto one = [&](int k) {
    try {
      out[static_cast<std::size_t>(k)] = trial(k);
    } catch (const Error& e) {
      out[static_cast<std::size_t>(k)] = {false, std::numeric_limits<double>::infinity(), e.what()};
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < trials; ++k) one(k);
  } else {
    for (int k = 0; k < trials; ++k) one(k);
  }
  SuiteResult r;
  r.name = name;
  r.trials = trials;
  for (int k = 0; k < trials; ++k) {
    const auto& o = out[static_cast<std::size_t>(k)];
    r.worstRatio = std::max(r.worstRatio, o.ratio);
    r.worstAux = std::max(r.worstAux, o.aux);
    if (!o.ok) {
      if (r.failures == 0) r.firstFailure = fmt::format("trial {}: {}", k, o.message);
      ++r.failures;
    }
  }
  return r;
}

DenseMatrix gaussian(CounterRng& rng, int rows, int cols) {
  DenseMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = Complex(rng.normal(), rng.normal());
  return g;
}

DenseMatrix random_unitary(CounterRng& rng, int d) {
  Eigen::HouseholderQR<DenseMatrix> qr(gaussian(rng, d, d));
  return qr.householderQ() * DenseMatrix::Identity(d, d);
}

DenseMatrix random_hermitian(CounterRng& rng, int d) {
  const DenseMatrix g = gaussian(rng, d, d);
  DenseMatrix h = 0.5 * (g + g.adjoint());
  const double n = operator_norm(h);
  return n > 0.0 ? DenseMatrix(h / n) : h;
}

// exp(i t H) for Hermitian H.
DenseMatrix exp_i(const DenseMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
  Vector ph(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) ph(i) = std::polar(1.0, t * es.eigenvalues()(i));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

DenseMatrix inv_sqrt(const DenseMatrix& s) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (s + s.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = 1.0 / std::sqrt(std::max(ev(i), 1e-300));
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

// E_a -> S^{-1/2} E_a S^{-1/2} with S = sum_a E_a.
std::vector<DenseMatrix> normalize_povm(std::vector<DenseMatrix> elems) {
  DenseMatrix s = DenseMatrix::Zero(elems.front().rows(), elems.front().cols());
  for (const auto& e : elems) s += e;
  const DenseMatrix w = inv_sqrt(s);
  for (auto& e : elems) {
    e = w * e * w;
    e = (0.5 * (e + e.adjoint())).eval();
  }
  return elems;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Game random_game(CounterRng& rng, int qx, int qy, int ax, int ay) {
  Game g;
  g.qx = qx;
  g.qy = qy;
  g.ax = ax;
  g.ay = ay;
  g.mu.assign(static_cast<std::size_t>(qx * qy), 1.0 / (qx * qy));
  g.predicate.resize(g.predicate_size());
  for (auto& v : g.predicate) v = rng.uniform() < 0.5;
  return g;
}

constexpr std::uint64_t kComPowerStream = 0x636f6d70ULL << 32;
constexpr std::uint64_t kSqBoundStream = 0x73716264ULL << 32;
constexpr std::uint64_t kDilationStream = 0x64696c61ULL << 32;

TrialOutcome com_power_trial(std::uint64_t seed, int k, int maxDim) {
  CounterRng rng(seed, kComPowerStream + static_cast<std::uint64_t>(k));
  static constexpr double kRs[3] = {0.125, 0.25, 0.5};
  const double r = kRs[k % 3];
  const int d = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(maxDim)));
  DenseMatrix a, b;
  switch (k % 4) {
    case 0:
      a = random_psd(rng, d, d);
      b = random_psd(rng, d, d);
      break;
    case 1:
      a = random_psd(rng, d, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d))));
      b = random_psd(rng, d, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d))));
      break;
    case 2: {
      // B nearly diagonal in A's eigenbasis.
      const DenseMatrix u = random_unitary(rng, d);
      Eigen::VectorXd la(d), lb(d);
      for (int i = 0; i < d; ++i) {
        la(i) = rng.uniform();
        lb(i) = rng.uniform();
      }
      a = u * la.cast<Complex>().asDiagonal() * u.adjoint();
      const DenseMatrix v = exp_i(random_hermitian(rng, d), std::pow(10.0, -1.0 - 5.0 * rng.uniform())) * u;
      b = v * lb.cast<Complex>().asDiagonal() * v.adjoint();
      break;
    }
    default:
      a = random_psd(rng, d, 1);
      b = random_psd(rng, d, d);
      break;
  }
  const ComPowerCheck c = check_com_power_bound(a, b, r);
  TrialOutcome o;
  o.ok = c.holds;
  o.ratio = c.rhs > 0.0 ? c.lhs / c.rhs : (c.lhs > 1e-9 ? std::numeric_limits<double>::infinity() : 0.0);
  if (!o.ok) o.message = fmt::format("d={} r={} lhs={:.6g} rhs={:.6g}", d, r, c.lhs, c.rhs);
  return o;
}

TrialOutcome sq_bound_trial(std::uint64_t seed, int k) {
  CounterRng rng(seed, kSqBoundStream + static_cast<std::uint64_t>(k));
  const int d = 2 + static_cast<int>(rng.below(15));
  const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(4, d))));
  // Spectral groups 0..m-1 carry the family; group m is the remainder.
  std::vector<int> group(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) group[static_cast<std::size_t>(i)] = i < m ? i : static_cast<int>(rng.below(static_cast<std::uint64_t>(m + 1)));
  const int kind = k % 3;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(d);
  if (kind == 1) {
    for (int i = 0; i < d; ++i) w(i) = 0.2 + 0.8 * rng.uniform();
  }
  const DenseMatrix u = random_unitary(rng, d);
  const double eta = kind == 2 ? 0.0 : std::pow(10.0, -7.0 + 2.5 * rng.uniform());
  const DenseMatrix v = exp_i(random_hermitian(rng, d), eta) * u;
  std::vector<DenseMatrix> as, bs;
  for (int g = 0; g < m; ++g) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i)
      if (group[static_cast<std::size_t>(i)] == g) diag(i) = w(i);
    const auto dc = diag.cast<Complex>();
    as.push_back(u * dc.asDiagonal() * u.adjoint());
    bs.push_back(v * dc.asDiagonal() * v.adjoint());
  }
  const SqBoundReport rep = check_sq_bound(as, bs, random_density(rng, d));
  TrialOutcome o;
  o.ok = rep.sqHolds && rep.traceHolds && rep.delta <= 1e-4;
  o.ratio = std::max(rep.rhsSq > 0.0 ? rep.lhsSq / rep.rhsSq : 0.0, rep.rhsTrace > 0.0 ? rep.lhsTrace / rep.rhsTrace : 0.0);
  if (!o.ok) {
    o.message = fmt::format("d={} M={} delta={:.3g} eps={:.3g} sq {:.6g}/{:.6g} trace {:.6g}/{:.6g}", d, m, rep.delta, rep.eps,
                            rep.lhsSq, rep.rhsSq, rep.lhsTrace, rep.rhsTrace);
  }
  return o;
}

TrialOutcome dilation_trial(std::uint64_t seed, int k, int maxDim) {
  CounterRng rng(seed, kDilationStream + static_cast<std::uint64_t>(k));
  const int qx = 1 + static_cast<int>(rng.below(2));
  const int qy = 1 + static_cast<int>(rng.below(2));
  const int ax = 2 + static_cast<int>(rng.below(2));
  const int ay = 2 + static_cast<int>(rng.below(2));
  Strategy s;
  if (k % 2 == 0) {
    // Tensor-product strategy, then a perturbation that breaks commutation.
    const int da = 1 + static_cast<int>(rng.below(2));
    const int db = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, maxDim / da))));
    s.dim = da * db;
    const double eta = std::pow(10.0, -1.0 - 3.0 * rng.uniform());
    const DenseMatrix ia = DenseMatrix::Identity(da, da), ib = DenseMatrix::Identity(db, db);
    for (int x = 0; x < qx; ++x) {
      auto povm = random_povm(rng, da, ax);
      for (auto& e : povm) e = kron(e, ib) + eta * random_psd(rng, s.dim, s.dim);
      s.povmA.push_back(normalize_povm(std::move(povm)));
    }
    for (int y = 0; y < qy; ++y) {
      auto povm = random_povm(rng, db, ay);
      for (auto& e : povm) e = kron(ia, e) + eta * random_psd(rng, s.dim, s.dim);
      s.povmB.push_back(normalize_povm(std::move(povm)));
    }
  } else {
    s.dim = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(maxDim)));
    for (int x = 0; x < qx; ++x) s.povmA.push_back(random_povm(rng, s.dim, ax));
    for (int y = 0; y < qy; ++y) s.povmB.push_back(random_povm(rng, s.dim, ay));
  }
  s.rho = random_density(rng, s.dim);
  const Game g = random_game(rng, qx, qy, ax, ay);

  const double delta = commutator_report(s).deltaMax;
  const Strategy t = dilate_to_projective(s);
  double proj = 0.0;
  for (const auto* fam : {&t.povmA, &t.povmB})
    for (const auto& povm : *fam)
      for (const auto& e : povm) {
        proj = std::max(proj, (e * e - e).cwiseAbs().maxCoeff());
        proj = std::max(proj, (e - e.adjoint()).cwiseAbs().maxCoeff());
      }
  const auto [v1, v2] = strategy_value_orderings(g, s);
  const auto [w1, w2] = strategy_value_orderings(g, t);
  const double valueDiff = std::max(std::abs(v1 - w1), std::abs(v2 - w2));
  const double dilated = commutator_report(t).deltaMax;
  const double bound = ax * ay * delta + 1e-9;

  TrialOutcome o;
  o.ok = proj <= 1e-9 && valueDiff <= 1e-9 && dilated <= bound;
  o.ratio = std::max({proj / 1e-9, valueDiff / 1e-9, dilated / bound});
  o.aux = delta > 0.0 ? dilated / (ax * ay * std::sqrt(delta)) : 0.0;
  if (!o.ok) {
    o.message = fmt::format("d={} ax={} ay={} projective {:.3g} value {:.3g} commutator {:.6g} bound {:.6g}", s.dim, ax, ay, proj,
                            valueDiff, dilated, bound);
  }
  return o;
}

VoiculescuRow voiculescu_row(int d) {
  const auto [u1, u2] = voiculescu_pair(d);
  VoiculescuRow row;
  row.d = d;
  row.norm = commutator_norm(u1, u2);
  row.expected = 2.0 * std::sin(std::numbers::pi / d);
  const auto [m10, m11] = hermitian_quadratures(u1);
  const auto [m20, m21] = hermitian_quadratures(u2);
  for (const DenseMatrix* p : {&m10, &m11})
    for (const DenseMatrix* q : {&m20, &m21}) row.quadratureMax = std::max(row.quadratureMax, commutator_norm(*p, *q));
  return row;
}

}  // namespace

DenseMatrix random_psd(CounterRng& rng, int d, int r) {
  const DenseMatrix g = gaussian(rng, d, std::max(1, r));
  DenseMatrix a = g * g.adjoint();
  a = (0.5 * (a + a.adjoint())).eval();
  return a / operator_norm(a);
}

DenseMatrix random_density(CounterRng& rng, int d) {
  DenseMatrix a = random_psd(rng, d, d);
  a += 1e-3 * DenseMatrix::Identity(d, d);
  return a / a.trace().real();
}

std::vector<DenseMatrix> random_povm(CounterRng& rng, int d, int k) {
  std::vector<DenseMatrix> elems;
  // The last element has full rank so the sum is invertible.
  for (int a = 0; a + 1 < k; ++a) elems.push_back(random_psd(rng, d, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d)))));
  elems.push_back(random_psd(rng, d, d) + 0.05 * DenseMatrix::Identity(d, d));
  return normalize_povm(std::move(elems));
}

SuiteResult com_power_suite(std::uint64_t seed, int trials, int maxDim) {
  return run_suite("com-power", trials, [&](int k) { return com_power_trial(seed, k, maxDim); }, true);
}
SuiteResult com_power_suite_serial(std::uint64_t seed, int trials, int maxDim) {
  return run_suite("com-power", trials, [&](int k) { return com_power_trial(seed, k, maxDim); }, false);
}

SuiteResult sq_bound_suite(std::uint64_t seed, int families) {
  return run_suite("sq-bound", families, [&](int k) { return sq_bound_trial(seed, k); }, true);
}
SuiteResult sq_bound_suite_serial(std::uint64_t seed, int families) {
  return run_suite("sq-bound", families, [&](int k) { return sq_bound_trial(seed, k); }, false);
}

SuiteResult dilation_suite(std::uint64_t seed, int trials, int maxDim) {
  return run_suite("dilation", trials, [&](int k) { return dilation_trial(seed, k, maxDim); }, true);
}
SuiteResult dilation_suite_serial(std::uint64_t seed, int trials, int maxDim) {
  return run_suite("dilation", trials, [&](int k) { return dilation_trial(seed, k, maxDim); }, false);
}

std::vector<VoiculescuRow> voiculescu_table(const std::vector<int>& dims) {
  std::vector<VoiculescuRow> rows(dims.size());
  const auto n = static_cast<int>(dims.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = n - 1; i >= 0; --i) rows[static_cast<std::size_t>(i)] = voiculescu_row(dims[static_cast<std::size_t>(i)]);
  return rows;
}

std::vector<VoiculescuRow> voiculescu_table_serial(const std::vector<int>& dims) {
  std::vector<VoiculescuRow> rows;
  for (int d : dims) rows.push_back(voiculescu_row(d));
  return rows;
}

SuiteResult voiculescu_suite(const std::vector<VoiculescuRow>& rows) {
  SuiteResult r;
  r.name = "voiculescu";
  r.trials = static_cast<int>(rows.size());
  for (const auto& row : rows) {
    const double err = std::abs(row.norm - row.expected);
    const double excess = std::max(0.0, row.quadratureMax - row.norm);
    r.worstRatio = std::max({r.worstRatio, err / kVoiculescuTol, excess / kVoiculescuTol});
    if (err > kVoiculescuTol || excess > kVoiculescuTol) {
      if (r.failures == 0) {
        r.firstFailure = fmt::format("d={} norm {:.15g} expected {:.15g} quadrature {:.15g}", row.d, row.norm, row.expected, row.quadratureMax);
      }
      ++r.failures;
    }
  }
  return r;
}

}  // namespace qcsdp
