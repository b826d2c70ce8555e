#include "qcsdp/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "qcsdp/errors.hpp"

namespace qcsdp {

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::MaxIter: return "max-iter";
    default: return "infeasible-detected";
  }
}

namespace {

double relative_min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  return lmax > 0.0 ? es.eigenvalues().minCoeff() / lmax : 0.0;
}

// Moves z toward one of the interior points just far enough that the reduced
// matrix reaches the conditioning target, choosing the point with the
// smallest objective cost. lambda_min is concave along each segment, so the
// weights meeting the target form an interval ending at 1.
void recenter(const ReducedProblem& red, const std::vector<Eigen::VectorXd>& centers, double target, Eigen::VectorXd& z,
              SdpSolution& sol) {
  if (relative_min_eigenvalue(assemble_lmi(red, z)) >= target) return;
  double bestLoss = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best;
  for (const Eigen::VectorXd& zc : centers) {
    if (zc.size() != z.size()) continue;
    auto ratio_at = [&](double t) { return relative_min_eigenvalue(assemble_lmi(red, (1.0 - t) * z + t * zc)); };
    if (ratio_at(1.0) < target) continue;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60 && hi - lo > 1e-3 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ratio_at(mid) >= target ? hi : lo) = mid;
    }
    const Eigen::VectorXd mixed = (1.0 - hi) * z + hi * zc;
    const double loss = red.c.dot(z) - red.c.dot(mixed);
    if (loss < bestLoss) {
      bestLoss = loss;
      best = mixed;
      sol.recenterWeight = hi;
    }
  }
  if (best.size() == 0) return;
  sol.recenterLoss = bestLoss;
  z = best;
}

}  // namespace

SdpSolution solve(const MomentProblem& p, const SolveOptions& opts) {
  if (!(opts.tol >= 1e-10 && opts.tol <= 1e-4)) throw InputError(fmt::format("solver tolerance {:g} outside [1e-10, 1e-4]", opts.tol));
  ReductionOptions ropts;
  ropts.useHints = opts.useHints;
  ropts.referencePoint = opts.referencePoint;
  ReducedProblem red = reduce_problem(p, ropts);

  SdpSolution sol;
  sol.level = p.level;
  sol.gameHash = p.gameHash;
  sol.tol = opts.tol;
  sol.stats = red.stats;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(red.F.size()));
  if (red.F.empty()) {
    // Every entry is determined by the linear constraints.
    if (red.F0.rows() > 0 && min_eigenvalue(red.F0.cast<Complex>()) < -1e-9) {
      sol.status = SolveStatus::Infeasible;
      throw SolverError("the unique point of the affine constraint set is not PSD");
    }
    sol.status = SolveStatus::Solved;
  } else {
    LmiProblem lmi{red.F0, red.F, red.c};
    IpmOptions io;
    io.tol = opts.tol;
    io.feasTol = std::min(1e-9, opts.tol);
    io.parallelSchur = opts.parallelSchur;
    IpmResult r = solve_lmi(lmi, io);
    sol.iterations = r.iterations;
    sol.gapEstimate = r.relGap;
    if (r.status == IpmStatus::Infeasible) throw SolverError("interior-point method detected infeasibility");
    if (r.status == IpmStatus::NumericalFailure) {
      throw SolverError(fmt::format("interior-point method failed at iteration {} (gap {:.3g}, primal residual {:.3g}, dual residual {:.3g})",
                                    r.iterations, r.relGap, r.primalResidual, r.dualResidual));
    }
    sol.status = r.status == IpmStatus::Solved ? SolveStatus::Solved : SolveStatus::MaxIter;
    z = r.y;
    if (opts.minRelEigenvalue > 0.0) recenter(red, r.dualIterates, opts.minRelEigenvalue, z, sol);
  }

  CompactFactor fac;
  fac.Mf = assemble_lmi(red, z);
  fac.T = std::move(red.T);
  sol.gamma = fac.T * fac.Mf * fac.T.transpose();
  sol.gamma = 0.5 * (sol.gamma + sol.gamma.transpose()).eval();
  sol.minEigenvalue = fac.Mf.rows() ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(fac.Mf, Eigen::EigenvaluesOnly).eigenvalues().minCoeff() : 0.0;
  sol.factor = std::move(fac);
  sol.gammaObjective = 0.0;
  for (const Term& t : p.objective) sol.gammaObjective += t.coef * sol.gamma(t.row, t.col);
  sol.optimum = sol.gammaObjective + sol.recenterLoss;
  sol.maxResidual = max_constraint_residual(p.constraints, sol.gamma);
  if (sol.status == SolveStatus::Solved) {
    if (sol.maxResidual > 1e-7) throw SolverError(fmt::format("rebuilt moment matrix violates a constraint by {:.3g}", sol.maxResidual));
    if (std::abs(sol.gamma(0, 0) - 1.0) > 1e-8) throw SolverError("rebuilt moment matrix has Gamma(phi, phi) != 1");
    if (sol.minEigenvalue < -1e-7) throw SolverError(fmt::format("rebuilt moment matrix has eigenvalue {:.3g}", sol.minEigenvalue));
  }
  return sol;
}

SdpSolution solve_level(const Game& g, int level, double tol, double minRelEigenvalue) {
  const WordIndex wi(g, level);
  const MomentProblem p = build_level(g, wi);
  const std::vector<int> fa(static_cast<std::size_t>(g.qx), 0), fb(static_cast<std::size_t>(g.qy), 0);
  SolveOptions opts;
  opts.tol = tol;
  opts.minRelEigenvalue = minRelEigenvalue;
  opts.referencePoint = [&wi, fa, fb](int u, int t) { return deterministic_moment(wi, fa, fb, u, t); };
  return solve(p, opts);
}

GramSolution extract_gram(const SdpSolution& sol, double clamp) {
  if (sol.status != SolveStatus::Solved) throw InputError("extract_gram needs a solved solution");
  GramSolution gs;
  gs.level = sol.level;
  if (sol.factor) {
    const Factorization f = gram_vectors(sol.factor->Mf.cast<Complex>(), clamp);
    gs.vectors = f.vectors * sol.factor->T.transpose().cast<Complex>();
    gs.rank = f.rank;
    gs.clampThreshold = f.clampThreshold;
  } else {
    const Factorization f = gram_vectors(sol.gamma.cast<Complex>(), clamp);
    gs.vectors = f.vectors;
    gs.rank = f.rank;
    gs.clampThreshold = f.clampThreshold;
  }
  const Eigen::MatrixXd rebuilt = (gs.vectors.adjoint() * gs.vectors).real();
  gs.reconstructionError = (rebuilt - sol.gamma).cwiseAbs().maxCoeff();
  return gs;
}

std::string serialize_solution(const SdpSolution& sol) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  const auto n = sol.gamma.rows();
  fmt::format_to(out, "qcsdp-solution 1\n");
  fmt::format_to(out, "level {}\ngame {:016x}\nstatus {}\n", sol.level, sol.gameHash, solve_status_name(sol.status));
  fmt::format_to(out, "optimum {:.17g}\ngap {:.17g}\nresidual {:.17g}\nmineig {:.17g}\ntol {:.17g}\niterations {}\n", sol.optimum,
                 sol.gapEstimate, sol.maxResidual, sol.minEigenvalue, sol.tol, sol.iterations);
  fmt::format_to(out, "recenter {:.17g} {:.17g}\nobjective {:.17g}\n", sol.recenterWeight, sol.recenterLoss, sol.gammaObjective);
  fmt::format_to(out, "dim {}\ngamma\n", n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) fmt::format_to(out, "{}{:.17g}", j ? " " : "", sol.gamma(i, j));
    fmt::format_to(out, "\n");
  }
  if (sol.factor) {
    const auto k = sol.factor->Mf.rows();
    fmt::format_to(out, "factor {}\n", k);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) fmt::format_to(out, "{}{:.17g}", j ? " " : "", sol.factor->T(i, j));
      fmt::format_to(out, "\n");
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) fmt::format_to(out, "{}{:.17g}", j ? " " : "", sol.factor->Mf(i, j));
      fmt::format_to(out, "\n");
    }
  } else {
    fmt::format_to(out, "factor 0\n");
  }
  fmt::format_to(out, "end\n");
  return fmt::to_string(buf);
}

SdpSolution parse_solution(const std::string& text) {
  std::istringstream in(text);
  auto expect = [&](const char* key) {
    std::string s;
    if (!(in >> s) || s != key) throw InputError(fmt::format("solution file: expected \"{}\"", key));
  };
  auto num = [&](const char* what) {
    double v;
    if (!(in >> v)) throw InputError(fmt::format("solution file: bad {}", what));
    return v;
  };
  expect("qcsdp-solution");
  if (num("version") != 1.0) throw InputError("solution file: unsupported version");
  SdpSolution sol;
  expect("level");
  sol.level = static_cast<int>(num("level"));
  expect("game");
  std::string hash;
  in >> hash;
  sol.gameHash = std::stoull(hash, nullptr, 16);
  expect("status");
  std::string status;
  in >> status;
  if (status == "solved") {
    sol.status = SolveStatus::Solved;
  } else if (status == "max-iter") {
    sol.status = SolveStatus::MaxIter;
  } else {
    sol.status = SolveStatus::Infeasible;
  }
  expect("optimum");
  sol.optimum = num("optimum");
  expect("gap");
  sol.gapEstimate = num("gap");
  expect("residual");
  sol.maxResidual = num("residual");
  expect("mineig");
  sol.minEigenvalue = num("mineig");
  expect("tol");
  sol.tol = num("tol");
  expect("iterations");
  sol.iterations = static_cast<int>(num("iterations"));
  expect("recenter");
  sol.recenterWeight = num("recenter weight");
  sol.recenterLoss = num("recenter loss");
  expect("objective");
  sol.gammaObjective = num("objective");
  expect("dim");
  const auto n = static_cast<Eigen::Index>(num("dim"));
  if (n < 1) throw InputError("solution file: bad dim");
  expect("gamma");
  sol.gamma.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = num("gamma entry");
      sol.gamma(i, j) = v;
      sol.gamma(j, i) = v;
    }
  expect("factor");
  const auto k = static_cast<Eigen::Index>(num("factor size"));
  if (k > 0) {
    CompactFactor f;
    f.T.resize(n, k);
    f.Mf.resize(k, k);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < k; ++j) f.T(i, j) = num("factor entry");
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) f.Mf(i, j) = num("factor entry");
    sol.factor = std::move(f);
  }
  expect("end");
  return sol;
}

}  // namespace qcsdp
