#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qcsdp {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Gram factorization of a PSD matrix: column s of `vectors` is |v_s>, so
/// vectors^dagger * vectors reproduces the input up to the clamp.
struct Factorization {
  DenseMatrix vectors;  // rank x n
  int rank = 0;
  double clampThreshold = 0.0;  // absolute eigenvalue cutoff that was applied
};

// Sizes at or below this use a full SVD for the operator norm.
inline constexpr Eigen::Index kSvdNormLimit = 512;

/// Largest singular value. Full SVD up to kSvdNormLimit rows/cols, power
/// iteration on M^dagger M above.
double operator_norm(const DenseMatrix& m);

/// Power iteration on M^dagger M; exposed for the iterative path's tests.
double operator_norm_power(const DenseMatrix& m, double tol = 1e-12, int max_iter = 100000);

DenseMatrix commutator(const DenseMatrix& a, const DenseMatrix& b);

inline double commutator_norm(const DenseMatrix& a, const DenseMatrix& b) {
  return operator_norm(commutator(a, b));
}

bool is_hermitian(const DenseMatrix& m, double tol);

/// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const DenseMatrix& m);

/// Sum of singular values.
double trace_norm(const DenseMatrix& m);

/// Hermitian PSD square root. Eigenvalues in [-1e-9, 0) are clamped to zero.
DenseMatrix psd_sqrt(const DenseMatrix& m);

/// m^r for Hermitian PSD m and r >= 0, same tolerances as psd_sqrt.
DenseMatrix psd_power(const DenseMatrix& m, double r);

/// Eigen-decomposition based factorization; eigenvalues below
/// clamp * lambda_max are dropped.
Factorization gram_vectors(const DenseMatrix& gamma, double clamp = 1e-9);

/// Orthogonal projector onto the column span of `columns` (rows = ambient
/// dimension). Singular values at or below max(rel_cutoff * sigma_max,
/// abs_cutoff) are dropped. An empty column set gives the zero projector.
DenseMatrix subspace_projector(const DenseMatrix& columns, double rel_cutoff = 1e-8, double abs_cutoff = 0.0);

struct ComPowerCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||[A, B^r]|| <= 2 ||B||^{1-r} ||[A, B]||^r for A, B >= 0 and r in [0, 1].
ComPowerCheck check_com_power_bound(const DenseMatrix& a, const DenseMatrix& b, double r);

// Constant in front of delta^{1/8} M, as used for pass/fail.
inline constexpr double kSqBoundConstant = 12.0;
// Constant obtained when the factors hidden in each application of the
// commutator power bound are carried through (2 * (2^{5/4} + 2 + 2^{3/2})).
inline constexpr double kSqBoundConstantStrict = 14.413682710;
// Trace-norm version: 2 * sqrt(kSqBoundConstant).
inline constexpr double kSqTraceConstant = 6.928203230275509;

struct SqBoundReport {
  double eps = 0.0;
  double delta = 0.0;
  int m = 0;
  double lhsSq = 0.0;
  double rhsSq = 0.0;
  double rhsSqStrict = 0.0;
  bool sqHolds = false;
  double lhsTrace = 0.0;
  double rhsTrace = 0.0;
  bool traceHolds = false;
};

/// Numerical check of the square-root closeness bounds for two families of
/// sub-normalized PSD operators that pairwise delta-commute.
SqBoundReport check_sq_bound(std::span<const DenseMatrix> as, std::span<const DenseMatrix> bs,
                             const DenseMatrix& rho);

/// Cyclic shift U1 (U1 e_k = e_{k+1 mod d}) and clock U2 = diag(omega^k).
std::pair<DenseMatrix, DenseMatrix> voiculescu_pair(int d);

/// (U + U^dagger)/2 and -i (U - U^dagger)/2.
std::pair<DenseMatrix, DenseMatrix> hermitian_quadratures(const DenseMatrix& u);

/// Table of ||[as[i], bs[j]]||, OpenMP over (i, j).
Eigen::MatrixXd commutator_norm_table(std::span<const DenseMatrix> as, std::span<const DenseMatrix> bs);
Eigen::MatrixXd commutator_norm_table_serial(std::span<const DenseMatrix> as,
                                             std::span<const DenseMatrix> bs);

}  // namespace qcsdp
