#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcsdp/games.hpp"

namespace qcsdp {

/// Binary POVM per variable on the second prover's space: c[i][0], c[i][1].
struct MarginalPovm {
  std::vector<std::array<DenseMatrix, 2>> c;
};

/// C_i^c = average over j of the c-marginal of the second prover's POVM on
/// the pair {i, j} (the bit belonging to i; the first bit when j = i).
/// Throws InputError when s does not fit the oracularized question set.
MarginalPovm marginals(const OracleGame& og, const Strategy& s);

/// Sequential square-root measurement of the variables in ascending order.
/// Mixed states are split into their eigencomponents, each evolved as a pure
/// state.
class AssignmentSampler {
 public:
  AssignmentSampler(const MarginalPovm& m, const DenseMatrix& rho, std::uint64_t seed);

  int nvars() const { return static_cast<int>(roots_.size()); }

  /// Draw k of the sampler's stream (independent of the order of calls).
  /// Throws VerificationError when a step's outcome probabilities drift from
  /// the state's weight by more than 1e-6.
  std::vector<int> sample(std::uint64_t k) const;

  /// Probability of every assignment; index sum_i c_i << i. nvars <= 24.
  std::vector<double> branch_probabilities() const;

  /// Largest |p0 + p1 - 1| (relative to the branch weight) seen by
  /// branch_probabilities.
  double max_branch_drift() const { return drift_; }

 private:
  std::vector<std::array<DenseMatrix, 2>> roots_;
  std::vector<Vector> components_;  // sqrt(lambda_k) |k>
  std::vector<double> weights_;      // lambda_k, normalized
  std::uint64_t seed_;
  mutable double drift_ = 0.0;
};

std::vector<int> sample_assignment(const AssignmentSampler& as, std::uint64_t k);

/// Weighted fraction of clauses the assignment satisfies.
double satisfied_weight(const CspInstance& csp, const std::vector<int>& z);
double satisfied_weight(const CspInstance& csp, std::uint64_t bits);

/// Best assignment by exhaustive search (nvars <= 24). Index form as in
/// branch_probabilities.
std::uint64_t best_assignment(const CspInstance& csp);

inline constexpr int kExactEnumerationLimit = 12;
inline constexpr int kMaxSamples = 10'000'000;

/// Satisfied weight of draws 0..samples-1, OpenMP over draws. Entry k depends
/// only on (seed, k).
std::vector<double> sampled_satisfaction(const AssignmentSampler& as, const CspInstance& csp, int samples);
std::vector<double> sampled_satisfaction_serial(const AssignmentSampler& as, const CspInstance& csp, int samples);

struct SoundnessReport {
  int nvars = 0;
  double gameValue = 0.0;
  double eps = 0.0;
  double deltaMax = 0.0;
  int samples = 0;
  double satProb = 0.0;                 // Monte-Carlo mean
  double satProbStdError = 0.0;
  std::optional<double> satProbExact;   // nvars <= kExactEnumerationLimit
  double branchSum = 0.0;               // sum of exact branch probabilities
  double epsBudget = 0.0;
  bool withinBudget = false;            // satProb >= 1 - epsBudget
};

struct SoundnessOptions {
  int samples = 10000;
  std::uint64_t seed = 0;
  double epsBudget = 0.1;
  bool parallel = true;
};

/// s must play the oracularized game of csp.
SoundnessReport soundness_check(const CspInstance& csp, const Strategy& s, const SoundnessOptions& opts = {});

/// Columns nvars,gameValue,eps,deltaMax,samples,satProb,satProbExact.
std::string soundness_csv(const std::vector<SoundnessReport>& rows);

struct ReweightResult {
  CspInstance csp;
  double deviationBefore = 0.0;  // max over positions k and values v of |P(vars[k] = v) - 1/nvars|
  double deviationAfter = 0.0;
  int iterations = 0;
};

/// Iterative proportional fitting of clause weights toward uniform marginals
/// on each of the three clause positions.
ReweightResult reweight_uniform_marginals(const CspInstance& csp, int maxIterations = 500, double tol = 1e-12);

double marginal_deviation(const CspInstance& csp);

}  // namespace qcsdp
