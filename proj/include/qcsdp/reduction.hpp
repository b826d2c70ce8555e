#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qcsdp/hierarchy.hpp"

namespace qcsdp {

/// Sparse row over integer keys, sorted by key ascending.
using SparseVec = std::vector<std::pair<std::int32_t, double>>;

/// Incremental Gaussian elimination over keys 0..n-1 where the largest key of
/// a row is its pivot. Key 0 is reserved for the constant term when used for
/// affine systems (it is never made a pivot; a row reducing to c * key0 with
/// c != 0 is inconsistent).
class SparseEliminator {
 public:
  explicit SparseEliminator(std::int32_t keys, bool affine, double tol = 1e-10);

  /// Reduces the row until its leading key has no pivot, then stores it.
  /// Returns false if the row was already implied. Throws SolverError for an
  /// inconsistent affine row.
  bool add(SparseVec row);
  /// Full normal form: every remaining key is free (or the constant).
  SparseVec normal_form(const SparseVec& row);

  bool is_pivot(std::int32_t k) const { return pivot_[static_cast<std::size_t>(k)] >= 0; }
  std::size_t pivots() const { return starts_.size(); }
  std::int32_t keys() const { return static_cast<std::int32_t>(pivot_.size()); }

  /// Pivot row of key k scaled to leading coefficient 1 (k must be a pivot).
  SparseVec pivot_row(std::int32_t k) const;

 private:
  void reduce_leading(SparseVec& row, SparseVec& scratch);

  bool affine_;
  double tol_;
  std::vector<std::int32_t> pivot_;
  std::vector<std::int64_t> starts_;
  std::vector<std::int32_t> lens_;
  std::vector<std::pair<std::int32_t, double>> pool_;
  // normal_form scratch
  std::vector<double> acc_;
  std::vector<char> queued_;
};

struct ReductionStats {
  std::size_t entries = 0;
  std::size_t classes = 0;        // nonzero, non-constant classes after merging
  std::size_t zeroEntries = 0;
  std::size_t mergePasses = 0;
  std::size_t eliminationRows = 0;
  std::size_t freeBeforeFace = 0;
  std::size_t hintsOffered = 0;
  std::size_t hintsAccepted = 0;
  std::size_t freeAfterFace = 0;
  std::size_t faceDim = 0;
};

/// The moment problem restricted to its verified face:
///   M = T Mf T^T,  Mf = F0 + sum_j z_j F_j >= 0,
/// objective c^T z + c0.
struct ReducedProblem {
  std::size_t dim = 0;
  std::vector<std::int32_t> basis;     // word indices spanning the face
  Eigen::MatrixXd T;                   // dim x k
  Eigen::MatrixXd F0;
  std::vector<Eigen::MatrixXd> F;
  Eigen::VectorXd c;
  double c0 = 0.0;
  std::vector<std::vector<std::pair<std::int32_t, double>>> acceptedHints;
  ReductionStats stats;
};

inline constexpr double kReducedMemoryBudget = 2.5e9;

struct ReductionOptions {
  bool useHints = true;
  // Optional known feasible point M(u, t); every constraint and every accepted
  // hint is checked against it.
  std::function<double(int, int)> referencePoint;
  // Dense LMI blocks (free * face^2) plus the Schur matrix (free^2), in bytes.
  // Larger reduced problems raise SizeError before allocating.
  double memoryBudget = kReducedMemoryBudget;
};

ReducedProblem reduce_problem(const MomentProblem& p, const ReductionOptions& opts = {});

/// Mf(z) = F0 + sum z_j F_j.
Eigen::MatrixXd assemble_lmi(const ReducedProblem& r, const Eigen::VectorXd& z);

/// max_i |sum coef M(row, col) - rhs| over the verbatim constraints.
double max_constraint_residual(const SparseRows& rows, const Eigen::MatrixXd& gamma);
double max_constraint_residual(const SparseRows& rows, const std::function<double(int, int)>& entry);

}  // namespace qcsdp
