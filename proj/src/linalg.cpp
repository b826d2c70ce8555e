#include "qcsdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qcsdp/errors.hpp"

namespace qcsdp {

namespace {

double scale_of(const DenseMatrix& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

void require_hermitian(const DenseMatrix& m, double tol, const char* what) {
  if (m.rows() != m.cols()) {
    throw InputError(fmt::format("{}: matrix is {}x{}, expected square", what, m.rows(), m.cols()));
  }
  if (!is_hermitian(m, tol)) {
    throw InputError(fmt::format("{}: matrix is not Hermitian within {:g}", what, tol));
  }
}

// Eigen-decomposition of the Hermitian part with clamping of slightly
// negative eigenvalues.
Eigen::SelfAdjointEigenSolver<DenseMatrix> psd_eigen(const DenseMatrix& m, const char* what) {
  require_hermitian(m, 1e-10 * scale_of(m), what);
  DenseMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
  if (es.info() != Eigen::Success) throw InputError(fmt::format("{}: eigensolver failed", what));
  if (h.rows() > 0 && es.eigenvalues().minCoeff() < -1e-9) {
    throw InputError(fmt::format("{}: eigenvalue {:.3e} below -1e-9", what, es.eigenvalues().minCoeff()));
  }
  return es;
}

}  // namespace

double operator_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() <= kSvdNormLimit && m.cols() <= kSvdNormLimit) {
    Eigen::BDCSVD<DenseMatrix> svd(m);
    return svd.singularValues()(0);
  }
  return operator_norm_power(m);
}

double operator_norm_power(const DenseMatrix& m, double tol, int max_iter) {
  if (m.size() == 0) return 0.0;
  // Deterministic, non-degenerate start vector.
  Vector x(m.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = Complex(1.0 + 0.01 * static_cast<double>(i % 7), 0.003 * static_cast<double>(i % 5));
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector y = m.adjoint() * (m * x);
    const double next = y.norm();
    if (next == 0.0) return 0.0;
    x = y / next;
    if (std::abs(next - lambda) <= tol * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

DenseMatrix commutator(const DenseMatrix& a, const DenseMatrix& b) { return a * b - b * a; }

bool is_hermitian(const DenseMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol || m.size() == 0;
}

double min_eigenvalue(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  DenseMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double trace_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<DenseMatrix> svd(m);
  return svd.singularValues().sum();
}

DenseMatrix psd_sqrt(const DenseMatrix& m) { return psd_power(m, 0.5); }

DenseMatrix psd_power(const DenseMatrix& m, double r) {
  if (r < 0.0) throw InputError("psd_power: negative exponent");
  auto es = psd_eigen(m, "psd_power");
  Eigen::VectorXd lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = std::pow(std::max(lam(i), 0.0), r);
  const DenseMatrix& u = es.eigenvectors();
  return u * lam.cast<Complex>().asDiagonal() * u.adjoint();
}

Factorization gram_vectors(const DenseMatrix& gamma, double clamp) {
  const double scale = scale_of(gamma);
  require_hermitian(gamma, 1e-8 * scale, "gram_vectors");
  DenseMatrix h = 0.5 * (gamma + gamma.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
  if (es.info() != Eigen::Success) throw InputError("gram_vectors: eigensolver failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  Factorization out;
  if (lam.size() == 0) return out;
  const double lmax = lam.maxCoeff();
  if (lam.minCoeff() < -1e-8 * std::max(1.0, lmax)) {
    throw InputError(fmt::format("gram_vectors: matrix not PSD (eigenvalue {:.3e})", lam.minCoeff()));
  }
  out.clampThreshold = clamp * std::max(lmax, 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = lam.size() - 1; k >= 0; --k) {
    if (lam(k) > out.clampThreshold && lam(k) > 0.0) keep.push_back(k);
  }
  out.rank = static_cast<int>(keep.size());
  out.vectors.resize(out.rank, gamma.cols());
  const DenseMatrix& u = es.eigenvectors();
  for (int r = 0; r < out.rank; ++r) {
    const Eigen::Index k = keep[static_cast<std::size_t>(r)];
    out.vectors.row(r) = std::sqrt(lam(k)) * u.col(k).adjoint();
  }
  return out;
}

DenseMatrix subspace_projector(const DenseMatrix& columns, double rel_cutoff, double abs_cutoff) {
  const Eigen::Index n = columns.rows();
  DenseMatrix p = DenseMatrix::Zero(n, n);
  if (columns.cols() == 0 || n == 0) return p;
  Eigen::BDCSVD<DenseMatrix> svd(columns, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return p;
  const double cut = std::max(rel_cutoff * s(0), abs_cutoff);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  const auto ur = svd.matrixU().leftCols(rank);
  p = ur * ur.adjoint();
  return p;
}

ComPowerCheck check_com_power_bound(const DenseMatrix& a, const DenseMatrix& b, double r) {
  if (r < 0.0 || r > 1.0) throw InputError("check_com_power_bound: r outside [0, 1]");
  if (a.rows() != b.rows()) throw InputError("check_com_power_bound: dimension mismatch");
  if (min_eigenvalue(a) < -1e-9 || min_eigenvalue(b) < -1e-9) {
    throw InputError("check_com_power_bound: A and B must be PSD");
  }
  ComPowerCheck out;
  out.lhs = commutator_norm(a, psd_power(b, r));
  out.rhs = 2.0 * std::pow(operator_norm(b), 1.0 - r) * std::pow(commutator_norm(a, b), r);
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

SqBoundReport check_sq_bound(std::span<const DenseMatrix> as, std::span<const DenseMatrix> bs,
                             const DenseMatrix& rho) {
  if (as.size() != bs.size() || as.empty()) throw InputError("check_sq_bound: families must have equal nonzero length");
  const Eigen::Index d = rho.rows();
  require_hermitian(rho, 1e-9, "check_sq_bound rho");
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-9 || min_eigenvalue(rho) < -1e-9) {
    throw InputError("check_sq_bound: rho is not a density matrix");
  }
  DenseMatrix sum_a = DenseMatrix::Zero(d, d);
  DenseMatrix sum_b = DenseMatrix::Zero(d, d);
  for (std::size_t i = 0; i < as.size(); ++i) {
    if (as[i].rows() != d || bs[i].rows() != d) throw InputError("check_sq_bound: dimension mismatch");
    if (min_eigenvalue(as[i]) < -1e-9 || min_eigenvalue(bs[i]) < -1e-9) {
      throw InputError("check_sq_bound: family elements must be PSD");
    }
    sum_a += as[i];
    sum_b += bs[i];
  }
  const DenseMatrix id = DenseMatrix::Identity(d, d);
  if (min_eigenvalue(id - sum_a) < -1e-9 || min_eigenvalue(id - sum_b) < -1e-9) {
    throw InputError("check_sq_bound: family sums exceed the identity");
  }

  SqBoundReport rep;
  rep.m = static_cast<int>(as.size());
  std::vector<DenseMatrix> sa, sb;
  for (std::size_t i = 0; i < as.size(); ++i) {
    sa.push_back(psd_sqrt(as[i]));
    sb.push_back(psd_sqrt(bs[i]));
  }
  double overlap = 0.0;
  DenseMatrix pa = DenseMatrix::Zero(d, d), pb = DenseMatrix::Zero(d, d);
  for (std::size_t i = 0; i < as.size(); ++i) {
    overlap += (as[i] * sb[i] * rho * sb[i]).trace().real();
    const DenseMatrix diff = sa[i] - sb[i];
    rep.lhsSq += (diff * diff * rho).trace().real();
    pa += sa[i] * rho * sa[i];
    pb += sb[i] * rho * sb[i];
  }
  rep.eps = 1.0 - overlap;
  rep.delta = commutator_norm_table(as, bs).maxCoeff();
  const double eps = std::max(rep.eps, 0.0);
  const double d8 = std::pow(rep.delta, 1.0 / 8.0);
  rep.rhsSq = 2.0 * eps + kSqBoundConstant * d8 * rep.m;
  rep.rhsSqStrict = 2.0 * eps + kSqBoundConstantStrict * d8 * rep.m;
  rep.sqHolds = rep.lhsSq <= rep.rhsSq + 1e-9;
  rep.lhsTrace = trace_norm(pa - pb);
  rep.rhsTrace = 2.0 * std::sqrt(2.0 * eps) + kSqTraceConstant * std::pow(rep.delta, 1.0 / 16.0) * std::sqrt(static_cast<double>(rep.m));
  rep.traceHolds = rep.lhsTrace <= rep.rhsTrace + 1e-9;
  return rep;
}

std::pair<DenseMatrix, DenseMatrix> voiculescu_pair(int d) {
  if (d < 2) throw InputError("voiculescu_pair: d must be at least 2");
  DenseMatrix u1 = DenseMatrix::Zero(d, d);
  DenseMatrix u2 = DenseMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    u1((k + 1) % d, k) = 1.0;
    u2(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * k / d);
  }
  return {u1, u2};
}

std::pair<DenseMatrix, DenseMatrix> hermitian_quadratures(const DenseMatrix& u) {
  if (u.rows() != u.cols()) throw InputError("hermitian_quadratures: matrix not square");
  const DenseMatrix id = DenseMatrix::Identity(u.rows(), u.cols());
  if ((u.adjoint() * u - id).cwiseAbs().maxCoeff() > 1e-10) {
    throw InputError("hermitian_quadratures: matrix is not unitary within 1e-10");
  }
  const DenseMatrix m0 = 0.5 * (u + u.adjoint());
  const DenseMatrix m1 = Complex(0.0, -0.5) * (u - u.adjoint());
  return {m0, m1};
}

Eigen::MatrixXd commutator_norm_table(std::span<const DenseMatrix> as, std::span<const DenseMatrix> bs) {
  const long na = static_cast<long>(as.size());
  const long nb = static_cast<long>(bs.size());
  Eigen::MatrixXd out(na, nb);
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (long i = 0; i < na; ++i) {
    for (long j = 0; j < nb; ++j) {
      out(i, j) = commutator_norm(as[static_cast<std::size_t>(i)], bs[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

Eigen::MatrixXd commutator_norm_table_serial(std::span<const DenseMatrix> as,
                                             std::span<const DenseMatrix> bs) {
  Eigen::MatrixXd out(static_cast<long>(as.size()), static_cast<long>(bs.size()));
  for (std::size_t i = 0; i < as.size(); ++i) {
    for (std::size_t j = 0; j < bs.size(); ++j) {
      out(static_cast<long>(i), static_cast<long>(j)) = commutator_norm(as[i], bs[j]);
    }
  }
  return out;
}

}  // namespace qcsdp
