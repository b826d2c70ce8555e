#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qcsdp/games.hpp"

namespace qcsdp {

struct Letter {
  int party = 0;  // 0 = first prover (P), 1 = second prover (Q)
  int question = 0;
  int answer = 0;
};

inline constexpr std::size_t kDefaultWordCap = 20000;

/// All words of length <= level over the alphabet P_x^a (x-major), then
/// Q_y^b. Index order: empty word, then by length, then lexicographic.
class WordIndex {
 public:
  WordIndex() = default;
  WordIndex(const Game& g, int level, std::size_t cap = kDefaultWordCap);

  int level() const { return level_; }
  int letters() const { return static_cast<int>(alphabet_.size()); }
  const std::vector<Letter>& alphabet() const { return alphabet_; }
  std::size_t size() const { return lengths_.size(); }
  /// Number of words of length <= m.
  std::size_t count_upto(int m) const { return static_cast<std::size_t>(offsets_[static_cast<std::size_t>(m) + 1]); }

  int length(int w) const { return lengths_[static_cast<std::size_t>(w)]; }
  int reverse(int w) const { return reversed_[static_cast<std::size_t>(w)]; }
  std::vector<int> word(int w) const;
  /// -1 if longer than the level.
  int find(const std::vector<int>& letters) const;
  /// Index of c·w / w·c, or -1 when the result is too long.
  int prepend(int c, int w) const;
  int append(int w, int c) const;
  std::string name(int w) const;

  int letter_p(int x, int a) const { return x * ax_ + a; }
  int letter_q(int y, int b) const { return qx_ * ax_ + y * ay_ + b; }

 private:
  int level_ = 0;
  int qx_ = 0, ax_ = 0, ay_ = 0;
  std::vector<Letter> alphabet_;
  std::vector<std::int64_t> offsets_;  // offsets_[m] = number of words shorter than m
  std::vector<std::int64_t> powers_;
  std::vector<int> lengths_;
  std::vector<int> reversed_;
};

enum class Family : std::uint8_t {
  Normalization = 0,
  Shifting,
  Commutation,
  SumP,
  SumQ,
  OrthogonalityP,
  OrthogonalityQ,
  Count
};
const char* family_name(Family f);

/// Linear equality sum coef_k * M(row_k, col_k) = rhs over the symmetric
/// moment matrix M, where M(u, t) stands for Gamma_{u^dagger, t}. Entries are
/// stored with row <= col.
struct Term {
  std::int32_t row = 0;
  std::int32_t col = 0;
  double coef = 0.0;
};

struct SparseRows {
  std::vector<std::int64_t> start{0};
  std::vector<Term> terms;
  std::vector<double> rhs;
  std::vector<Family> family;

  std::size_t size() const { return rhs.size(); }
  std::size_t row_begin(std::size_t i) const { return static_cast<std::size_t>(start[i]); }
  std::size_t row_end(std::size_t i) const { return static_cast<std::size_t>(start[i + 1]); }
};

/// Candidate null vector of M given as word-index coefficients. The solver
/// accepts one only after proving it is forced at every feasible point.
struct FaceHint {
  std::vector<std::pair<std::int32_t, double>> terms;
};

struct MomentProblem {
  std::size_t dim = 0;
  int level = 0;
  std::uint64_t gameHash = 0;
  std::vector<Term> objective;  // maximize sum coef * M(row, col)
  SparseRows constraints;
  std::vector<FaceHint> hints;
};

/// Puts a row into canonical form: entries with row <= col, merged and sorted,
/// zero coefficients dropped, scaled so the first coefficient is 1. Returns
/// false when the row is the tautology 0 = 0.
bool canonicalize_row(std::vector<Term>& terms, double& rhs);

/// Canonicalizes rows [begin, end) of a batch in place (OpenMP over rows).
/// keep[i] is cleared for tautologies.
void canonicalize_batch(std::vector<std::vector<Term>>& rows, std::vector<double>& rhs, std::vector<char>& keep);
void canonicalize_batch_serial(std::vector<std::vector<Term>>& rows, std::vector<double>& rhs, std::vector<char>& keep);

WordIndex build_word_index(const Game& g, int n, std::size_t cap = kDefaultWordCap);

struct BuildOptions {
  std::size_t wordCap = kDefaultWordCap;
  bool faceHints = true;
};

MomentProblem build_level(const Game& g, int n, const BuildOptions& opts = {});
/// Same as build_level with an already built index.
MomentProblem build_level(const Game& g, const WordIndex& words, const BuildOptions& opts = {});

struct AuditReport {
  std::array<std::size_t, static_cast<std::size_t>(Family::Count)> counts{};
  std::size_t total = 0;
  std::size_t duplicates = 0;
  std::size_t outOfRange = 0;
  bool objectiveLengthOne = true;
  bool ok() const;
};
/// Word lengths are needed to check the objective; pass the index the problem
/// was built from.
AuditReport constraint_audit(const MomentProblem& p, const WordIndex& words);

/// Text format, header "qcsdp-moment-problem 1".
std::string serialize_problem(const MomentProblem& p);
MomentProblem parse_problem(const std::string& text);

/// Moment-matrix entry M(u, t) of a deterministic strategy (answers fa/fb):
/// 1 if every letter of u^dagger t matches the strategy's answer, else 0.
double deterministic_moment(const WordIndex& words, const std::vector<int>& fa, const std::vector<int>& fb, int u, int t);

}  // namespace qcsdp
