#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcsdp/games.hpp"
#include "qcsdp/linalg.hpp"
#include "qcsdp/rng.hpp"

namespace qcsdp {

/// Outcome of a randomized verification suite. Trial k draws from stream k of
/// the seed, so parallel and serial runs see identical instances.
struct SuiteResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  double worstRatio = 0.0;  // max lhs / rhs (or residual / tolerance) over trials
  std::string firstFailure;
  // Suite-specific extra statistic; dilation: max ||[A~, B~]|| / (ax ay sqrt(delta)).
  double worstAux = 0.0;
  bool passed() const { return trials > 0 && failures == 0; }
};

/// Random PSD of dimension d and rank r, spectrum scaled to norm <= 1.
DenseMatrix random_psd(CounterRng& rng, int d, int r);
/// Random density matrix of full rank.
DenseMatrix random_density(CounterRng& rng, int d);
/// Random k-outcome POVM on C^d.
std::vector<DenseMatrix> random_povm(CounterRng& rng, int d, int k);

/// ||[A, B^r]|| <= 2 ||B||^{1-r} ||[A, B]||^r on random PSD pairs, d in [1, maxDim],
/// r cycling through 1/8, 1/4, 1/2.
SuiteResult com_power_suite(std::uint64_t seed, int trials = 1000, int maxDim = 16);
SuiteResult com_power_suite_serial(std::uint64_t seed, int trials = 1000, int maxDim = 16);

/// Square-root closeness bounds on families made by rotating commuting
/// spectral projectors by a small unitary (delta <= 1e-4, d <= 16, M <= 4).
SuiteResult sq_bound_suite(std::uint64_t seed, int families = 100);
SuiteResult sq_bound_suite_serial(std::uint64_t seed, int families = 100);

/// Random delta-AC strategies (d <= maxDim): half are tensor-product strategies
/// with a perturbation, half generic. Checks projectivity (1e-9), value on a
/// random game (1e-9) and the ax * ay * delta commutator bound (+1e-9).
SuiteResult dilation_suite(std::uint64_t seed, int trials = 100, int maxDim = 8);
SuiteResult dilation_suite_serial(std::uint64_t seed, int trials = 100, int maxDim = 8);

struct VoiculescuRow {
  int d = 0;
  double norm = 0.0;         // ||[U1, U2]||
  double expected = 0.0;     // 2 sin(pi / d)
  double quadratureMax = 0.0;  // max_{j, j'} ||[M_1^j, M_2^j']||
};

inline constexpr double kVoiculescuTol = 1e-10;

std::vector<VoiculescuRow> voiculescu_table(const std::vector<int>& dims);
std::vector<VoiculescuRow> voiculescu_table_serial(const std::vector<int>& dims);

/// Pass iff every row matches 2 sin(pi/d) within kVoiculescuTol and every
/// quadrature commutator is at most the unitary one (+kVoiculescuTol).
SuiteResult voiculescu_suite(const std::vector<VoiculescuRow>& rows);

}  // namespace qcsdp
