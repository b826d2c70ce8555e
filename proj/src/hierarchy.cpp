#include "qcsdp/hierarchy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include <fmt/format.h>

#include "qcsdp/errors.hpp"
#include "qcsdp/game_io.hpp"

namespace qcsdp {

WordIndex::WordIndex(const Game& g, int level, std::size_t cap) : level_(level), qx_(g.qx), ax_(g.ax), ay_(g.ay) {
  if (level < 1) throw InputError(fmt::format("level must be >= 1 (got {})", level));
  if (auto v = validate_game(g); !v.empty()) throw InputError("invalid game: " + v.front());
  for (int x = 0; x < g.qx; ++x)
    for (int a = 0; a < g.ax; ++a) alphabet_.push_back({0, x, a});
  for (int y = 0; y < g.qy; ++y)
    for (int b = 0; b < g.ay; ++b) alphabet_.push_back({1, y, b});
  const auto l = static_cast<std::int64_t>(alphabet_.size());
  offsets_.assign(static_cast<std::size_t>(level) + 2, 0);
  powers_.assign(static_cast<std::size_t>(level) + 1, 1);
  for (int m = 1; m <= level; ++m) {
    powers_[static_cast<std::size_t>(m)] = powers_[static_cast<std::size_t>(m) - 1] * l;
    if (powers_[static_cast<std::size_t>(m)] > static_cast<std::int64_t>(cap)) {
      throw SizeError(fmt::format("word set W_{} exceeds the cap of {} words", level, cap));
    }
  }
  for (int m = 0; m <= level; ++m) offsets_[static_cast<std::size_t>(m) + 1] = offsets_[static_cast<std::size_t>(m)] + powers_[static_cast<std::size_t>(m)];
  const auto total = offsets_.back();
  if (total > static_cast<std::int64_t>(cap)) {
    throw SizeError(fmt::format("word set W_{} has {} words, above the cap of {}", level, total, cap));
  }
  lengths_.resize(static_cast<std::size_t>(total));
  reversed_.resize(static_cast<std::size_t>(total));
  std::vector<int> buf;
  for (int m = 0; m <= level; ++m) {
    for (std::int64_t k = 0; k < powers_[static_cast<std::size_t>(m)]; ++k) {
      const auto w = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(m)] + k);
      lengths_[w] = m;
      // Reversal: read the base-L digits backwards.
      std::int64_t r = 0, rem = k;
      for (int i = 0; i < m; ++i) {
        r = r * l + rem % l;
        rem /= l;
      }
      reversed_[w] = static_cast<int>(offsets_[static_cast<std::size_t>(m)] + r);
    }
  }
}

std::vector<int> WordIndex::word(int w) const {
  const int m = length(w);
  std::vector<int> out(static_cast<std::size_t>(m));
  std::int64_t k = w - offsets_[static_cast<std::size_t>(m)];
  const auto l = static_cast<std::int64_t>(alphabet_.size());
  for (int i = m - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<int>(k % l);
    k /= l;
  }
  return out;
}

int WordIndex::find(const std::vector<int>& letters) const {
  const auto m = static_cast<int>(letters.size());
  if (m > level_) return -1;
  const auto l = static_cast<std::int64_t>(alphabet_.size());
  std::int64_t k = 0;
  for (int c : letters) {
    if (c < 0 || c >= l) return -1;
    k = k * l + c;
  }
  return static_cast<int>(offsets_[static_cast<std::size_t>(m)] + k);
}

int WordIndex::prepend(int c, int w) const {
  const int m = length(w);
  if (m >= level_) return -1;
  const std::int64_t k = w - offsets_[static_cast<std::size_t>(m)];
  return static_cast<int>(offsets_[static_cast<std::size_t>(m) + 1] + c * powers_[static_cast<std::size_t>(m)] + k);
}

int WordIndex::append(int w, int c) const {
  const int m = length(w);
  if (m >= level_) return -1;
  const std::int64_t k = w - offsets_[static_cast<std::size_t>(m)];
  return static_cast<int>(offsets_[static_cast<std::size_t>(m) + 1] + k * static_cast<std::int64_t>(alphabet_.size()) + c);
}

std::string WordIndex::name(int w) const {
  if (length(w) == 0) return "phi";
  std::string out;
  for (int c : word(w)) {
    const Letter& let = alphabet_[static_cast<std::size_t>(c)];
    out += fmt::format("{}{}{}", let.party == 0 ? 'P' : 'Q', let.question, let.answer);
  }
  return out;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::Normalization: return "normalization";
    case Family::Shifting: return "shifting";
    case Family::Commutation: return "commutation";
    case Family::SumP: return "sum-P";
    case Family::SumQ: return "sum-Q";
    case Family::OrthogonalityP: return "orthogonality-P";
    case Family::OrthogonalityQ: return "orthogonality-Q";
    default: return "unknown";
  }
}

bool canonicalize_row(std::vector<Term>& terms, double& rhs) {
  for (auto& t : terms)
    if (t.row > t.col) std::swap(t.row, t.col);
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms.size();) {
    Term acc = terms[i];
    std::size_t j = i + 1;
    for (; j < terms.size() && terms[j].row == acc.row && terms[j].col == acc.col; ++j) acc.coef += terms[j].coef;
    if (std::abs(acc.coef) > 1e-14) terms[out++] = acc;
    i = j;
  }
  terms.resize(out);
  if (terms.empty()) return rhs != 0.0;
  const double s = terms.front().coef;
  if (s != 1.0) {
    for (auto& t : terms) t.coef /= s;
    rhs /= s;
  }
  if (rhs == 0.0) rhs = 0.0;  // drop a negative zero
  return true;
}

void canonicalize_batch(std::vector<std::vector<Term>>& rows, std::vector<double>& rhs, std::vector<char>& keep) {
  const auto n = static_cast<std::int64_t>(rows.size());
  keep.assign(rows.size(), 1);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    keep[static_cast<std::size_t>(i)] = canonicalize_row(rows[static_cast<std::size_t>(i)], rhs[static_cast<std::size_t>(i)]);
  }
}

void canonicalize_batch_serial(std::vector<std::vector<Term>>& rows, std::vector<double>& rhs, std::vector<char>& keep) {
  keep.assign(rows.size(), 1);
  for (std::size_t i = 0; i < rows.size(); ++i) keep[i] = canonicalize_row(rows[i], rhs[i]);
}

WordIndex build_word_index(const Game& g, int n, std::size_t cap) { return WordIndex(g, n, cap); }

namespace {

std::uint64_t hash_row(const Term* t, std::size_t n, double rhs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0x100000001b3ULL;
  };
  for (std::size_t i = 0; i < n; ++i) {
    mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(t[i].row)) << 32 | static_cast<std::uint32_t>(t[i].col));
    mix(std::bit_cast<std::uint64_t>(t[i].coef));
  }
  mix(std::bit_cast<std::uint64_t>(rhs));
  return h;
}

// Appends canonical rows to a SparseRows, dropping exact duplicates.
class RowSink {
 public:
  explicit RowSink(SparseRows& out) : out_(out) { slots_.assign(1 << 16, kEmpty); }

  void push(std::vector<Term> terms, double rhs, Family fam) {
    batch_.push_back(std::move(terms));
    batchRhs_.push_back(rhs);
    batchFam_.push_back(fam);
    if (batch_.size() >= kBatch) flush();
  }

  void flush() {
    canonicalize_batch(batch_, batchRhs_, keep_);
    for (std::size_t i = 0; i < batch_.size(); ++i) {
      if (!keep_[i]) continue;
      insert(batch_[i], batchRhs_[i], batchFam_[i]);
    }
    batch_.clear();
    batchRhs_.clear();
    batchFam_.clear();
  }

  std::size_t duplicates() const { return duplicates_; }

 private:
  static constexpr std::uint32_t kEmpty = 0xffffffffu;
  static constexpr std::size_t kBatch = 1 << 15;

  void insert(const std::vector<Term>& terms, double rhs, Family fam) {
    const std::uint64_t h = hash_row(terms.data(), terms.size(), rhs);
    std::size_t mask = slots_.size() - 1;
    for (std::size_t s = h & mask;; s = (s + 1) & mask) {
      const std::uint32_t id = slots_[s];
      if (id == kEmpty) {
        slots_[s] = static_cast<std::uint32_t>(out_.size());
        break;
      }
      if (hashes_[id] == h && same(id, terms, rhs)) {
        ++duplicates_;
        return;
      }
    }
    hashes_.push_back(h);
    out_.terms.insert(out_.terms.end(), terms.begin(), terms.end());
    out_.start.push_back(static_cast<std::int64_t>(out_.terms.size()));
    out_.rhs.push_back(rhs);
    out_.family.push_back(fam);
    if (out_.size() * 2 > slots_.size()) grow();
  }

  bool same(std::uint32_t id, const std::vector<Term>& terms, double rhs) const {
    const std::size_t b = out_.row_begin(id), e = out_.row_end(id);
    if (e - b != terms.size() || out_.rhs[id] != rhs) return false;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const Term& t = out_.terms[b + k];
      if (t.row != terms[k].row || t.col != terms[k].col || t.coef != terms[k].coef) return false;
    }
    return true;
  }

  void grow() {
    std::vector<std::uint32_t> next(slots_.size() * 2, kEmpty);
    const std::size_t mask = next.size() - 1;
    for (std::uint32_t id = 0; id < out_.size(); ++id) {
      std::size_t s = hashes_[id] & mask;
      while (next[s] != kEmpty) s = (s + 1) & mask;
      next[s] = id;
    }
    slots_.swap(next);
  }

  SparseRows& out_;
  std::vector<std::uint32_t> slots_;
  std::vector<std::uint64_t> hashes_;
  std::vector<std::vector<Term>> batch_;
  std::vector<double> batchRhs_;
  std::vector<Family> batchFam_;
  std::vector<char> keep_;
  std::size_t duplicates_ = 0;
};

Term entry(int u, int t, double c) { return Term{u, t, c}; }

void add_hints(const Game& g, const WordIndex& wi, std::vector<FaceHint>& hints) {
  const auto& alpha = wi.alphabet();
  auto last_answer = [&](const Letter& l) { return l.answer == (l.party == 0 ? g.ax : g.ay) - 1; };
  auto with_letter = [&](const Letter& l, int answer) {
    return l.party == 0 ? wi.letter_p(l.question, answer) : wi.letter_q(l.question, answer);
  };
  const int dim = static_cast<int>(wi.size());
  // Answer sums at the front: v_u = sum_a v_{P_x^a u}. These restate the
  // verbatim sum constraints as null vectors.
  for (int u = 0; u < static_cast<int>(wi.count_upto(wi.level() - 1)); ++u) {
    for (int x = 0; x < g.qx; ++x) {
      FaceHint h;
      for (int a = 0; a < g.ax; ++a) h.terms.emplace_back(wi.prepend(wi.letter_p(x, a), u), 1.0);
      h.terms.emplace_back(u, -1.0);
      hints.push_back(std::move(h));
    }
    for (int y = 0; y < g.qy; ++y) {
      FaceHint h;
      for (int b = 0; b < g.ay; ++b) h.terms.emplace_back(wi.prepend(wi.letter_q(y, b), u), 1.0);
      h.terms.emplace_back(u, -1.0);
      hints.push_back(std::move(h));
    }
  }
  for (int w = 1; w < dim; ++w) {
    const std::vector<int> letters = wi.word(w);
    if (last_answer(alpha[static_cast<std::size_t>(letters[0])])) continue;  // eliminated by the front sums
    const auto m = letters.size();
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const Letter& c = alpha[static_cast<std::size_t>(letters[k])];
      const Letter& d = alpha[static_cast<std::size_t>(letters[k + 1])];
      if (letters[k] == letters[k + 1]) {
        std::vector<int> shorter = letters;
        shorter.erase(shorter.begin() + static_cast<std::ptrdiff_t>(k) + 1);
        hints.push_back(FaceHint{{{w, 1.0}, {wi.find(shorter), -1.0}}});
      } else if (c.party == d.party && c.question == d.question) {
        hints.push_back(FaceHint{{{w, 1.0}}});
      } else if (c.party != d.party) {
        std::vector<int> swapped = letters;
        std::swap(swapped[k], swapped[k + 1]);
        const int s = wi.find(swapped);
        if (s < w) hints.push_back(FaceHint{{{w, 1.0}, {s, -1.0}}});
      }
    }
    for (std::size_t k = 1; k < m; ++k) {
      const Letter& c = alpha[static_cast<std::size_t>(letters[k])];
      if (!last_answer(c)) continue;
      FaceHint h;
      const int answers = c.party == 0 ? g.ax : g.ay;
      std::vector<int> variant = letters;
      for (int a = 0; a < answers; ++a) {
        variant[k] = with_letter(c, a);
        h.terms.emplace_back(wi.find(variant), 1.0);
      }
      variant.erase(variant.begin() + static_cast<std::ptrdiff_t>(k));
      h.terms.emplace_back(wi.find(variant), -1.0);
      hints.push_back(std::move(h));
    }
  }
}

}  // namespace

MomentProblem build_level(const Game& g, int n, const BuildOptions& opts) {
  const WordIndex wi(g, n, opts.wordCap);
  return build_level(g, wi, opts);
}

MomentProblem build_level(const Game& g, const WordIndex& wi, const BuildOptions& opts) {
  if (auto v = validate_game(g); !v.empty()) throw InputError("invalid game: " + v.front());
  const int n = wi.level();
  MomentProblem p;
  p.dim = wi.size();
  p.level = n;
  p.gameHash = game_hash(g);
  const int inner = static_cast<int>(wi.count_upto(n - 1));
  const int all = static_cast<int>(wi.size());

  // Objective: Gamma_{P_x^a, Q_y^b} = M(P_x^a, Q_y^b) since length-1 words are self-reversed.
  for (int x = 0; x < g.qx; ++x)
    for (int y = 0; y < g.qy; ++y)
      for (int a = 0; a < g.ax; ++a)
        for (int b = 0; b < g.ay; ++b) {
          const double w = g.prob(x, y) * (g.accepts(x, y, a, b) ? 1.0 : 0.0);
          if (w == 0.0) continue;
          const int u = wi.find({wi.letter_p(x, a)});
          const int t = wi.find({wi.letter_q(y, b)});
          p.objective.push_back(Term{std::min(u, t), std::max(u, t), w});
        }

  RowSink sink(p.constraints);
  sink.push({entry(0, 0, 1.0)}, 1.0, Family::Normalization);
  const int nl = wi.letters();
  // Gamma_{sC, t} = Gamma_{s, Ct}
  for (int c = 0; c < nl; ++c)
    for (int s = 0; s < inner; ++s) {
      const int row_sc = wi.reverse(wi.append(s, c));
      const int row_s = wi.reverse(s);
      for (int t = 0; t < inner; ++t) sink.push({entry(row_sc, t, 1.0), entry(row_s, wi.prepend(c, t), -1.0)}, 0.0, Family::Shifting);
    }
  // Gamma_{sP, Qt} = Gamma_{sQ, Pt}
  for (int x = 0; x < g.qx; ++x)
    for (int a = 0; a < g.ax; ++a)
      for (int y = 0; y < g.qy; ++y)
        for (int b = 0; b < g.ay; ++b) {
          const int pl = wi.letter_p(x, a), ql = wi.letter_q(y, b);
          for (int s = 0; s < inner; ++s) {
            const int row_sp = wi.reverse(wi.append(s, pl));
            const int row_sq = wi.reverse(wi.append(s, ql));
            for (int t = 0; t < inner; ++t) {
              sink.push({entry(row_sp, wi.prepend(ql, t), 1.0), entry(row_sq, wi.prepend(pl, t), -1.0)}, 0.0, Family::Commutation);
            }
          }
        }
  // sum_a Gamma_{sP_x^a, t} = Gamma_{s, t}
  auto sums = [&](int questions, int answers, bool first, Family fam) {
    for (int q = 0; q < questions; ++q)
      for (int s = 0; s < inner; ++s) {
        std::vector<int> rows;
        for (int a = 0; a < answers; ++a) {
          rows.push_back(wi.reverse(wi.append(s, first ? wi.letter_p(q, a) : wi.letter_q(q, a))));
        }
        const int row_s = wi.reverse(s);
        for (int t = 0; t < all; ++t) {
          std::vector<Term> terms;
          terms.reserve(rows.size() + 1);
          for (int r : rows) terms.push_back(entry(r, t, 1.0));
          terms.push_back(entry(row_s, t, -1.0));
          sink.push(std::move(terms), 0.0, fam);
        }
      }
  };
  sums(g.qx, g.ax, true, Family::SumP);
  sums(g.qy, g.ay, false, Family::SumQ);
  // Gamma_{sP_x^a, P_x^a' t} = 0, a != a'
  auto orth = [&](int questions, int answers, bool first, Family fam) {
    for (int q = 0; q < questions; ++q)
      for (int a = 0; a < answers; ++a)
        for (int a2 = 0; a2 < answers; ++a2) {
          if (a == a2) continue;
          const int l1 = first ? wi.letter_p(q, a) : wi.letter_q(q, a);
          const int l2 = first ? wi.letter_p(q, a2) : wi.letter_q(q, a2);
          for (int s = 0; s < inner; ++s) {
            const int row = wi.reverse(wi.append(s, l1));
            for (int t = 0; t < inner; ++t) sink.push({entry(row, wi.prepend(l2, t), 1.0)}, 0.0, fam);
          }
        }
  };
  orth(g.qx, g.ax, true, Family::OrthogonalityP);
  orth(g.qy, g.ay, false, Family::OrthogonalityQ);
  sink.flush();

  if (opts.faceHints) add_hints(g, wi, p.hints);
  return p;
}

bool AuditReport::ok() const {
  return duplicates == 0 && outOfRange == 0 && objectiveLengthOne && counts[static_cast<std::size_t>(Family::Normalization)] == 1;
}

AuditReport constraint_audit(const MomentProblem& p, const WordIndex& words) {
  AuditReport rep;
  const auto& c = p.constraints;
  rep.total = c.size();
  const auto dim = static_cast<std::int32_t>(p.dim);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keys;
  keys.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    ++rep.counts[static_cast<std::size_t>(c.family[i])];
    for (std::size_t k = c.row_begin(i); k < c.row_end(i); ++k) {
      const Term& t = c.terms[k];
      if (t.row < 0 || t.col < 0 || t.row >= dim || t.col >= dim) ++rep.outOfRange;
    }
    keys.emplace_back(hash_row(c.terms.data() + c.row_begin(i), c.row_end(i) - c.row_begin(i), c.rhs[i]), static_cast<std::uint32_t>(i));
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (keys[i].first != keys[i - 1].first) continue;
    const auto a = keys[i - 1].second, b = keys[i].second;
    const std::size_t la = c.row_end(a) - c.row_begin(a), lb = c.row_end(b) - c.row_begin(b);
    if (la != lb || c.rhs[a] != c.rhs[b]) continue;
    bool same = true;
    for (std::size_t k = 0; k < la && same; ++k) {
      const Term& x = c.terms[c.row_begin(a) + k];
      const Term& y = c.terms[c.row_begin(b) + k];
      same = x.row == y.row && x.col == y.col && x.coef == y.coef;
    }
    if (same) ++rep.duplicates;
  }
  for (const Term& t : p.objective) {
    if (t.row >= dim || t.col >= dim || words.length(t.row) != 1 || words.length(t.col) != 1) rep.objectiveLengthOne = false;
  }
  return rep;
}

std::string serialize_problem(const MomentProblem& p) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "qcsdp-moment-problem 1\n");
  fmt::format_to(out, "dim {} level {} game {:016x}\n", p.dim, p.level, p.gameHash);
  fmt::format_to(out, "objective {}\n", p.objective.size());
  for (const Term& t : p.objective) fmt::format_to(out, "{} {} {:.17g}\n", t.row, t.col, t.coef);
  const auto& c = p.constraints;
  fmt::format_to(out, "constraints {}\n", c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    fmt::format_to(out, "{} {:.17g} {}", static_cast<int>(c.family[i]), c.rhs[i], c.row_end(i) - c.row_begin(i));
    for (std::size_t k = c.row_begin(i); k < c.row_end(i); ++k) {
      fmt::format_to(out, " {} {} {:.17g}", c.terms[k].row, c.terms[k].col, c.terms[k].coef);
    }
    fmt::format_to(out, "\n");
  }
  fmt::format_to(out, "hints {}\n", p.hints.size());
  for (const auto& h : p.hints) {
    fmt::format_to(out, "{}", h.terms.size());
    for (const auto& [w, v] : h.terms) fmt::format_to(out, " {} {:.17g}", w, v);
    fmt::format_to(out, "\n");
  }
  fmt::format_to(out, "end\n");
  return fmt::to_string(buf);
}

namespace {

class Tokens {
 public:
  explicit Tokens(const std::string& text) : in_(text) {}
  std::string word(const char* what) {
    std::string s;
    if (!(in_ >> s)) throw InputError(fmt::format("moment problem: unexpected end of input reading {}", what));
    return s;
  }
  void expect(const char* key) {
    const std::string s = word(key);
    if (s != key) throw InputError(fmt::format("moment problem: expected \"{}\", found \"{}\"", key, s));
  }
  template <class T>
  T number(const char* what) {
    T v{};
    if (!(in_ >> v)) throw InputError(fmt::format("moment problem: bad or missing {}", what));
    return v;
  }

 private:
  std::istringstream in_;
};

}  // namespace

MomentProblem parse_problem(const std::string& text) {
  Tokens tok(text);
  tok.expect("qcsdp-moment-problem");
  if (tok.number<int>("version") != 1) throw InputError("moment problem: unsupported version");
  MomentProblem p;
  tok.expect("dim");
  p.dim = tok.number<std::size_t>("dim");
  tok.expect("level");
  p.level = tok.number<int>("level");
  tok.expect("game");
  p.gameHash = std::stoull(tok.word("game hash"), nullptr, 16);
  const auto dim = static_cast<std::int32_t>(p.dim);
  auto check = [dim](std::int32_t r, std::int32_t c) {
    if (r < 0 || c < 0 || r >= dim || c >= dim) throw InputError(fmt::format("moment problem: entry ({}, {}) outside dim {}", r, c, dim));
  };
  tok.expect("objective");
  const auto nobj = tok.number<std::size_t>("objective count");
  for (std::size_t i = 0; i < nobj; ++i) {
    Term t;
    t.row = tok.number<std::int32_t>("objective row");
    t.col = tok.number<std::int32_t>("objective col");
    t.coef = tok.number<double>("objective weight");
    check(t.row, t.col);
    p.objective.push_back(t);
  }
  tok.expect("constraints");
  const auto ncon = tok.number<std::size_t>("constraint count");
  auto& c = p.constraints;
  for (std::size_t i = 0; i < ncon; ++i) {
    const int fam = tok.number<int>("family");
    if (fam < 0 || fam >= static_cast<int>(Family::Count)) throw InputError(fmt::format("moment problem: constraint {} has unknown family {}", i, fam));
    const double rhs = tok.number<double>("rhs");
    const auto nt = tok.number<std::size_t>("term count");
    for (std::size_t k = 0; k < nt; ++k) {
      Term t;
      t.row = tok.number<std::int32_t>("term row");
      t.col = tok.number<std::int32_t>("term col");
      t.coef = tok.number<double>("term coef");
      check(t.row, t.col);
      c.terms.push_back(t);
    }
    c.start.push_back(static_cast<std::int64_t>(c.terms.size()));
    c.rhs.push_back(rhs);
    c.family.push_back(static_cast<Family>(fam));
  }
  tok.expect("hints");
  const auto nh = tok.number<std::size_t>("hint count");
  for (std::size_t i = 0; i < nh; ++i) {
    FaceHint h;
    const auto nt = tok.number<std::size_t>("hint term count");
    for (std::size_t k = 0; k < nt; ++k) {
      const auto w = tok.number<std::int32_t>("hint word");
      const auto v = tok.number<double>("hint coef");
      check(w, w);
      h.terms.emplace_back(w, v);
    }
    p.hints.push_back(std::move(h));
  }
  tok.expect("end");
  return p;
}

double deterministic_moment(const WordIndex& words, const std::vector<int>& fa, const std::vector<int>& fb, int u, int t) {
  const auto& alpha = words.alphabet();
  auto ok = [&](int w) {
    for (int c : words.word(w)) {
      const Letter& l = alpha[static_cast<std::size_t>(c)];
      const int want = l.party == 0 ? fa[static_cast<std::size_t>(l.question)] : fb[static_cast<std::size_t>(l.question)];
      if (l.answer != want) return false;
    }
    return true;
  };
  return ok(u) && ok(t) ? 1.0 : 0.0;
}

}  // namespace qcsdp
