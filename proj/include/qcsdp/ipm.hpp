#pragma once

#include <vector>

#include <Eigen/Dense>

namespace qcsdp {

/// maximize c^T y  subject to  S = F0 + sum_j y_j F_j >= 0 (real symmetric).
/// Solved as the dual of  min <F0, X>  s.t.  <-F_j, X> = c_j, X >= 0.
struct LmiProblem {
  Eigen::MatrixXd F0;
  std::vector<Eigen::MatrixXd> F;
  Eigen::VectorXd c;
};

enum class IpmStatus { Solved, MaxIter, Infeasible, NumericalFailure };
const char* ipm_status_name(IpmStatus s);

struct IpmOptions {
  double tol = 1e-8;        // relative duality gap
  double feasTol = 1e-9;    // relative primal/dual residuals
  int maxIter = 200;
  // Stall handling: if max(gap, primal residual) has not halved for
  // stallIterations steps, or a factorization fails, the best dual-feasible
  // iterate is accepted when its gap and primal residual are below these.
  int stallIterations = 12;
  double stallGap = 1e-6;
  double stallResidual = 1e-5;
  bool parallelSchur = true;
};

struct IpmResult {
  IpmStatus status = IpmStatus::NumericalFailure;
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  Eigen::MatrixXd S;
  double primalObjective = 0.0;  // <F0, X>
  double dualObjective = 0.0;    // c^T y
  double relGap = 0.0;
  double primalResidual = 0.0;
  double dualResidual = 0.0;
  int iterations = 0;
  bool stalled = false;  // accepted under the stall thresholds
  // Every iterate y, in order. Callers check feasibility of the ones they use.
  std::vector<Eigen::VectorXd> dualIterates;
};

/// Infeasible-start primal-dual method, HKM direction, Mehrotra
/// predictor-corrector.
IpmResult solve_lmi(const LmiProblem& p, const IpmOptions& opts = {});

/// Schur complement O_ij = tr(A_i X A_j Z^{-1}); parallel over j.
Eigen::MatrixXd schur_complement(const std::vector<Eigen::MatrixXd>& a, const Eigen::MatrixXd& x,
                                 const Eigen::MatrixXd& zinv);
Eigen::MatrixXd schur_complement_serial(const std::vector<Eigen::MatrixXd>& a, const Eigen::MatrixXd& x,
                                        const Eigen::MatrixXd& zinv);

}  // namespace qcsdp
