#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "qcsdp/hierarchy.hpp"
#include "qcsdp/ipm.hpp"
#include "qcsdp/linalg.hpp"
#include "qcsdp/reduction.hpp"

namespace qcsdp {

enum class SolveStatus { Solved, MaxIter, Infeasible };
const char* solve_status_name(SolveStatus s);

/// Gamma = T Mf T^T with Mf small; kept so Gram vectors can be formed without
/// factoring the full matrix.
struct CompactFactor {
  Eigen::MatrixXd T;
  Eigen::MatrixXd Mf;
};

struct SdpSolution {
  int level = 0;
  std::uint64_t gameHash = 0;
  Eigen::MatrixXd gamma;  // real symmetric, indexed by word
  double optimum = 0.0;         // interior-point optimum before recentering
  double gammaObjective = 0.0;  // objective at gamma (optimum - recenterLoss)
  double gapEstimate = 0.0;
  double maxResidual = 0.0;   // over the verbatim constraints
  double minEigenvalue = 0.0;
  double tol = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::Infeasible;
  // Weight t of the interior point mixed in by recentering, and the
  // objective it cost.
  double recenterWeight = 0.0;
  double recenterLoss = 0.0;
  std::optional<CompactFactor> factor;
  ReductionStats stats;
};

struct SolveOptions {
  double tol = 1e-8;
  bool useHints = true;
  bool parallelSchur = true;
  std::function<double(int, int)> referencePoint;
  // Recentering target for lambda_min / lambda_max of the reduced moment
  // matrix (0 disables). Interior-point endpoints have eigenvalues near the
  // barrier parameter whose eigenvectors are only determined to
  // eps / lambda; Gram vectors built on them lose the exact identities the
  // rounding relies on.
  double minRelEigenvalue = 1e-10;
};

/// Reduces the problem exactly to its face, runs the interior-point method on
/// the reduced LMI, and rebuilds Gamma. If the reduced matrix is worse
/// conditioned than minRelEigenvalue, it is replaced by the convex
/// combination with an earlier interior-point iterate that meets the target at
/// the least objective cost; the mix stays exactly feasible. Throws SolverError on failure; a
/// returned solution has status Solved or MaxIter (best iterate).
SdpSolution solve(const MomentProblem& p, const SolveOptions& opts = {});

/// Convenience: build_level + solve with the deterministic all-zero-answers
/// moment matrix as the reference point.
SdpSolution solve_level(const Game& g, int level, double tol = 1e-8, double minRelEigenvalue = 1e-10);

struct GramSolution {
  int level = 0;
  DenseMatrix vectors;  // rank x dim; column w is |v_w>
  int rank = 0;
  double clampThreshold = 0.0;
  double reconstructionError = 0.0;  // max |<v_s|v_t> - Gamma(s,t)|
};

/// Gram vectors of Gamma through linalg::gram_vectors (on the compact factor
/// when available).
GramSolution extract_gram(const SdpSolution& sol, double clamp = 1e-9);

/// Solution file: metadata lines, dense lower triangle of Gamma, optional
/// compact factor section.
std::string serialize_solution(const SdpSolution& sol);
SdpSolution parse_solution(const std::string& text);

}  // namespace qcsdp
