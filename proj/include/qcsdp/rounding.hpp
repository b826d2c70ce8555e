#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcsdp/games.hpp"
#include "qcsdp/hierarchy.hpp"
#include "qcsdp/linalg.hpp"
#include "qcsdp/solver.hpp"

namespace qcsdp {

/// Projectors on the span of the Gram vectors (ambient dimension = rank).
/// level[j] projects onto V_j = span{v_s : |s| <= j}, j = 0..N.
struct ProjectorFamily {
  WordIndex words;
  int dim = 0;
  std::vector<DenseMatrix> level;
  std::vector<std::vector<DenseMatrix>> labelP;  // [x][a], onto span{v_{P_x^a s} : s in W_{N-1}}
  std::vector<std::vector<DenseMatrix>> labelQ;  // [y][b]
  // Largest ||Pi_{P_x^a} Pi_{P_x^a'}|| before answers of one question were
  // made orthogonal.
  double labelOverlap = 0.0;
};

// Gram clamp for rounding: every positive eigenvalue is kept so the vectors
// reproduce the feasible point exactly.
inline constexpr double kRoundingGramClamp = 0.0;
// Singular-value cutoff of every projector, relative to the largest singular
// value of the whole vector set. One absolute cutoff keeps the level
// projectors exactly nested.
inline constexpr double kProjectorCutoff = 1e-8;

/// Throws InputError when the Gram solution does not match the game's word
/// index. With strict, verify_identities runs and a failing family raises
/// VerificationError naming it.
ProjectorFamily build_projectors(const Game& g, const GramSolution& gs, bool strict = false,
                                 double cutoff = kProjectorCutoff);

// Pass/fail threshold for every identity residual.
inline constexpr double kIdentityTol = 1e-5;

struct IdentityReport {
  double vectorSum = 0.0;         // max ||v_s - sum_a v_{P_x^a s}||, s in W_{N-1} (P and Q)
  double projectorAction = 0.0;   // max ||Pi_{P_x^a} v_s - v_{P_x^a s}||, s in W_{N-1}
  double levelNesting = 0.0;      // max ||Pi_i Pi_j - Pi_min(i,j)||
  double projectorShape = 0.0;    // max of ||Pi^2 - Pi||, ||Pi - Pi^dagger|| over all projectors
  double cancellation = 0.0;      // max ||Pi_i [Pi_P, Pi_Q] Pi_j||, i, j < N
  double oneShift = 0.0;          // max ||(Id - Pi_{j+1}) Pi_P Pi_j||, j < N
  double max() const;
  bool ok(double tol = kIdentityTol) const { return max() <= tol; }
};

IdentityReport verify_identities(const ProjectorFamily& pf, const GramSolution& gs);

struct RoundingWeights {
  std::vector<double> p;  // p[0..N]
  std::vector<double> q;
};

/// p_i = q_i = 1/(N-1) for 0 < i < N.
RoundingWeights uniform_weights(int level);

/// Throws InputError unless both profiles have length N+1, are nonnegative,
/// vanish at 0 and N and sum to 1.
void validate_weights(const RoundingWeights& w, int level);

// max(sum p^2, sum q^2, sum p q) must not exceed this over N.
inline constexpr double kWeightProfileConstant = 3.0;

struct WeightProfileCheck {
  double sumP2 = 0.0;
  double sumQ2 = 0.0;
  double sumPQ = 0.0;
  double bound = 0.0;  // kWeightProfileConstant / N
  bool holds = false;
};
WeightProfileCheck check_weight_profile(const RoundingWeights& w, int level);

/// Weights file: JSON {"p": [...], "q": [...]}.
RoundingWeights parse_weights(const std::string& text);

struct RoundedStrategy {
  int level = 0;
  int dim = 0;
  std::vector<std::vector<DenseMatrix>> pTilde;  // [x][a]
  std::vector<std::vector<DenseMatrix>> qTilde;  // [y][b]
  std::vector<DenseMatrix> pGarbage;             // [x]
  std::vector<DenseMatrix> qGarbage;             // [y]
  DenseMatrix rho;
  RoundingWeights weights;
  double minEigenvalue = 0.0;  // over all elements including garbage
};

/// P~_x^a = sum_i p_i Pi_i Pi_{P_x^a} Pi_i, garbage = Id - sum_a P~_x^a,
/// rho = |v_phi><v_phi|.
RoundedStrategy round(const ProjectorFamily& pf, const GramSolution& gs,
                      const std::optional<RoundingWeights>& weights = std::nullopt);

enum class GarbagePolicy {
  ExtraOutcome,    // garbage is answer index ax (resp. ay)
  MergeIntoFirst,  // garbage added to answer 0 so the answer sets match the game
};

Strategy to_strategy(const RoundedStrategy& rs, GarbagePolicy policy);

/// Same game with one extra answer per prover that is always rejected.
Game with_garbage_answers(const Game& g);

inline constexpr double kValueTol = 1e-6;
inline constexpr double kGarbageProbTol = 1e-8;

struct ValueReport {
  double value = 0.0;  // max over orderings
  double valueAB = 0.0;
  double valueBA = 0.0;
  double optimum = 0.0;
  double deviation = 0.0;
  double maxGarbageProbability = 0.0;  // |<v_phi| E F |v_phi>| with E or F garbage, both orderings
  double maxEntryDeviation = 0.0;      // max |<v_phi|P~ Q~|v_phi> - M(P, Q)|
  bool ok() const { return deviation <= kValueTol && maxGarbageProbability <= kGarbageProbTol; }
};

ValueReport verify_value(const Game& g, const RoundedStrategy& rs, const SdpSolution& sol);

// Frozen constant in ||[P~, Q~]|| <= C0 / sqrt(N - 1) for uniform weights.
inline constexpr double kCommutatorConstant = 6.0;

struct CommutatorBoundReport {
  double maxCommutator = 0.0;
  double maxGarbageP = 0.0;     // [P~_x^garb, Q~_y^b]
  double maxGarbageQ = 0.0;     // [P~_x^a, Q~_y^garb]
  double maxGarbageBoth = 0.0;  // [P~_x^garb, Q~_y^garb]
  double bound = 0.0;           // C0 / sqrt(N - 1)
  double instanceBound = 0.0;   // 2 sum p q + 2 sqrt(sum p^2) + 2 sqrt(sum q^2)
  double scaled = 0.0;          // maxCommutator * sqrt(N - 1)
  int ax = 0;
  int ay = 0;
  double max_garbage() const;
  bool holds() const;
  bool garbage_holds() const;
};

CommutatorBoundReport verify_commutators(const RoundedStrategy& rs);

struct StudyRow {
  int level = 0;
  std::string status;  // "ok", "size-cap", "solver-error", ...
  std::optional<double> sdpValue;
  std::optional<double> roundedValue;
  std::optional<double> maxCommutator;
  std::optional<double> maxGarbageCommutator;
  std::optional<double> identityResidualMax;
};

struct StudyOptions {
  double tol = 1e-8;
  std::size_t wordCap = kDefaultWordCap;
};

/// One row per level; failures are recorded in the row.
std::vector<StudyRow> study_convergence(const Game& g, const std::vector<int>& levels, const StudyOptions& opts = {});

/// Columns N,sdpValue,roundedValue,maxCommutator,maxGarbageCommutator,
/// identityResidualMax,status with 9 significant digits.
std::string study_csv(const std::vector<StudyRow>& rows);

/// Manifest line (JSON) followed by dense blocks, one per element.
std::string serialize_rounded(const RoundedStrategy& rs);
RoundedStrategy parse_rounded(const std::string& text);

}  // namespace qcsdp
