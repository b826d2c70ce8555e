#include "qcsdp/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qcsdp/errors.hpp"

namespace qcsdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* ipm_status_name(IpmStatus s) {
  switch (s) {
    case IpmStatus::Solved: return "solved";
    case IpmStatus::MaxIter: return "max-iter";
    case IpmStatus::Infeasible: return "infeasible-detected";
    default: return "numerical-failure";
  }
}

MatrixXd schur_complement(const std::vector<MatrixXd>& a, const MatrixXd& x, const MatrixXd& zinv) {
  const auto m = static_cast<Eigen::Index>(a.size());
  MatrixXd o(m, m);
  std::vector<MatrixXd> g(a.size());
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < m; ++j) g[static_cast<std::size_t>(j)] = x * a[static_cast<std::size_t>(j)] * zinv;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) {
      const double v = (a[static_cast<std::size_t>(i)].array() * g[static_cast<std::size_t>(j)].transpose().array()).sum();
      o(i, j) = v;
      o(j, i) = v;
    }
  return o;
}

MatrixXd schur_complement_serial(const std::vector<MatrixXd>& a, const MatrixXd& x, const MatrixXd& zinv) {
  const auto m = static_cast<Eigen::Index>(a.size());
  MatrixXd o(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const MatrixXd g = x * a[static_cast<std::size_t>(j)] * zinv;
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = (a[static_cast<std::size_t>(i)] * g).trace();
      o(i, j) = v;
      o(j, i) = v;
    }
  }
  return o;
}

namespace {

// Largest alpha in (0, 1] with m + alpha * dm >= 0, given the Cholesky factor of m.
double max_step(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& dm) {
  const MatrixXd l_inv_dm = chol.matrixL().solve(dm);
  const MatrixXd w = chol.matrixL().solve(l_inv_dm.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (w + w.transpose()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double inner(const MatrixXd& a, const MatrixXd& b) { return (a.array() * b.array()).sum(); }

// Cholesky of the Schur complement; near the optimum it can lose definiteness
// to rounding, then a pseudo-inverse over the well-determined eigenspace is used.
class SchurSolver {
 public:
  explicit SchurSolver(const MatrixXd& o) : llt_(o) {
    if (llt_.info() == Eigen::Success) return;
    useEigen_ = true;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(o);
    if (es.info() != Eigen::Success) {
      ok_ = false;
      return;
    }
    const VectorXd& lam = es.eigenvalues();
    const double cut = 1e-14 * std::max(lam.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    inv_ = lam.unaryExpr([cut](double l) { return l > cut ? 1.0 / l : 0.0; });
    v_ = es.eigenvectors();
    ok_ = inv_.allFinite();
  }
  bool ok() const { return ok_; }
  VectorXd solve(const VectorXd& r) const {
    if (!useEigen_) return llt_.solve(r);
    return v_ * inv_.cwiseProduct(v_.transpose() * r);
  }

 private:
  Eigen::LLT<MatrixXd> llt_;
  bool useEigen_ = false;
  bool ok_ = true;
  MatrixXd v_;
  VectorXd inv_;
};

}  // namespace

IpmResult solve_lmi(const LmiProblem& p, const IpmOptions& opts) {
  const Eigen::Index k = p.F0.rows();
  const auto m = static_cast<Eigen::Index>(p.F.size());
  if (p.c.size() != m) throw InputError("solve_lmi: objective length does not match the number of blocks");
  IpmResult res;
  if (k == 0) throw InputError("solve_lmi: empty LMI");

  // Primal data: C = F0, A_j = -F_j, b = c.
  std::vector<MatrixXd> a(p.F.size());
  for (std::size_t j = 0; j < p.F.size(); ++j) a[j] = -p.F[j];
  const MatrixXd& cmat = p.F0;
  const VectorXd& b = p.c;
  auto apply_a = [&](const MatrixXd& x) {
    VectorXd v(m);
    for (Eigen::Index j = 0; j < m; ++j) v(j) = inner(a[static_cast<std::size_t>(j)], x);
    return v;
  };
  auto apply_at = [&](const VectorXd& y) {
    MatrixXd s = MatrixXd::Zero(k, k);
    for (Eigen::Index j = 0; j < m; ++j) s += y(j) * a[static_cast<std::size_t>(j)];
    return s;
  };

  double scale = 1.0;
  for (const auto& aj : a) scale = std::max(scale, aj.cwiseAbs().maxCoeff());
  scale = std::max({scale, cmat.cwiseAbs().maxCoeff(), b.size() ? b.cwiseAbs().maxCoeff() : 0.0});
  const double start = 10.0 * std::sqrt(static_cast<double>(k)) * scale;
  MatrixXd x = start * MatrixXd::Identity(k, k);
  MatrixXd s = start * MatrixXd::Identity(k, k);
  VectorXd y = VectorXd::Zero(m);
  const double bnorm = 1.0 + b.norm();
  const double cnorm = 1.0 + cmat.norm();
  const MatrixXd id = MatrixXd::Identity(k, k);

  // Best dual-feasible iterate by max(gap, primal residual); returned when the
  // method stalls or a factorization breaks down near the optimum.
  struct Snapshot {
    double merit = std::numeric_limits<double>::infinity();
    IpmResult r;
    int at = 0;
  } best;
  std::vector<VectorXd> dualIterates;
  auto finish_from_best = [&](IpmStatus fallback) {
    if (std::isfinite(best.merit) && best.r.relGap <= opts.stallGap && best.r.primalResidual <= opts.stallResidual &&
        best.r.dualResidual <= opts.feasTol) {
      IpmResult out = best.r;
      out.status = IpmStatus::Solved;
      out.stalled = true;
      out.iterations = res.iterations;
      out.dualIterates = dualIterates;
      return out;
    }
    IpmResult out = res;
    out.status = fallback;
    out.y = y;
    out.X = x;
    out.S = s;
    out.dualIterates = dualIterates;
    return out;
  };

  for (int it = 0; it < opts.maxIter; ++it) {
    res.iterations = it;
    const VectorXd rp = b - apply_a(x);
    const MatrixXd rd = cmat - apply_at(y) - s;
    const double mu = inner(x, s) / static_cast<double>(k);
    res.primalObjective = inner(cmat, x);
    res.dualObjective = b.dot(y);
    res.relGap = std::abs(res.primalObjective - res.dualObjective) / (1.0 + std::abs(res.primalObjective) + std::abs(res.dualObjective));
    res.primalResidual = rp.norm() / bnorm;
    res.dualResidual = rd.norm() / cnorm;
    if (res.relGap <= opts.tol && res.primalResidual <= opts.feasTol && res.dualResidual <= opts.feasTol) {
      res.status = IpmStatus::Solved;
      break;
    }
    if (!std::isfinite(mu) || mu > 1e12 * start * start) {
      res.status = IpmStatus::Infeasible;
      break;
    }
    dualIterates.push_back(y);
    if (res.dualResidual <= opts.feasTol) {
      const double merit = std::max(res.relGap, res.primalResidual);
      if (merit < 0.5 * best.merit) {
        best.merit = merit;
        best.r = res;
        best.r.y = y;
        best.r.X = x;
        best.r.S = s;
        best.at = it;
      } else if (merit < best.merit) {
        best.merit = merit;
        best.r = res;
        best.r.y = y;
        best.r.X = x;
        best.r.S = s;
      }
      if (it - best.at >= opts.stallIterations) return finish_from_best(IpmStatus::MaxIter);
    }

    Eigen::LLT<MatrixXd> sch(s), xch(x);
    if (sch.info() != Eigen::Success || xch.info() != Eigen::Success) return finish_from_best(IpmStatus::NumericalFailure);
    const MatrixXd sinv = sch.solve(id);
    const MatrixXd o = opts.parallelSchur ? schur_complement(a, x, sinv) : schur_complement_serial(a, x, sinv);
    const SchurSolver och(o);
    if (!och.ok()) return finish_from_best(IpmStatus::NumericalFailure);
    const MatrixXd x_rd_sinv = x * rd * sinv;

    // dX = R S^{-1} - X dS S^{-1} with dS = Rd - A^T dy, symmetrized; R is
    // the complementarity target minus XS.
    auto direction = [&](const MatrixXd& rc_sinv, VectorXd& dy, MatrixXd& dx, MatrixXd& ds) {
      const VectorXd rhs = rp - apply_a(rc_sinv - x_rd_sinv);
      dy = och.solve(rhs);
      ds = rd - apply_at(dy);
      dx = rc_sinv - x * ds * sinv;
      dx = 0.5 * (dx + dx.transpose()).eval();
    };
    VectorXd dy;
    MatrixXd dx, ds;
    // Predictor: R = -XS, so R S^{-1} = -X.
    direction(-x, dy, dx, ds);
    double ap = std::min(1.0, max_step(xch, dx));
    double ad = std::min(1.0, max_step(sch, ds));
    const double mu_aff = inner(x + ap * dx, s + ad * ds) / static_cast<double>(k);
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
    // Corrector: R = sigma mu I - XS - dXa dSa.
    const MatrixXd rc_sinv = sigma * mu * sinv - x - dx * ds * sinv;
    direction(rc_sinv, dy, dx, ds);
    ap = std::min(1.0, 0.95 * max_step(xch, dx));
    ad = std::min(1.0, 0.95 * max_step(sch, ds));
    // Rounding can still leave the new point just outside the cone; halve
    // the step until it factors.
    auto advance = [](MatrixXd& m, const MatrixXd& dm, double alpha) {
      for (int tries = 0; tries < 40; ++tries, alpha *= 0.5) {
        MatrixXd next = m + alpha * dm;
        next = 0.5 * (next + next.transpose()).eval();
        if (Eigen::LLT<MatrixXd>(next).info() == Eigen::Success) {
          m = std::move(next);
          return alpha;
        }
      }
      return 0.0;
    };
    ap = advance(x, dx, ap);
    ad = advance(s, ds, ad);
    if (ap == 0.0 && ad == 0.0) return finish_from_best(IpmStatus::NumericalFailure);
    y += ad * dy;
    res.status = IpmStatus::MaxIter;
  }
  if (res.status == IpmStatus::MaxIter) return finish_from_best(IpmStatus::MaxIter);
  res.y = y;
  res.X = x;
  res.S = s;
  res.dualIterates = std::move(dualIterates);
  return res;
}

}  // namespace qcsdp
