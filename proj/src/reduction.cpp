#include "qcsdp/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <fmt/format.h>

#include "qcsdp/errors.hpp"

namespace qcsdp {

namespace {

constexpr double kInconsistent = 1e-7;

// Sorts by key, merges duplicates, drops coefficients at or below tol.
void tidy(SparseVec& v, double tol) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < v.size();) {
    auto acc = v[i];
    std::size_t j = i + 1;
    for (; j < v.size() && v[j].first == acc.first; ++j) acc.second += v[j].second;
    if (std::abs(acc.second) > tol) v[out++] = acc;
    i = j;
  }
  v.resize(out);
}

}  // namespace

SparseEliminator::SparseEliminator(std::int32_t keys, bool affine, double tol)
    : affine_(affine), tol_(tol), pivot_(static_cast<std::size_t>(keys), -1) {}

void SparseEliminator::reduce_leading(SparseVec& row, SparseVec& scratch) {
  while (!row.empty()) {
    const auto [k, c] = row.back();
    const std::int32_t p = pivot_[static_cast<std::size_t>(k)];
    if (p < 0) return;
    // row -= c * pivot row; both sorted ascending, the leading terms cancel.
    const auto* pr = pool_.data() + starts_[static_cast<std::size_t>(p)];
    const std::int32_t plen = lens_[static_cast<std::size_t>(p)] - 1;
    scratch.clear();
    std::size_t i = 0;
    std::int32_t j = 0;
    const std::size_t rlen = row.size() - 1;
    while (i < rlen || j < plen) {
      if (j >= plen || (i < rlen && row[i].first < pr[j].first)) {
        scratch.push_back(row[i++]);
      } else if (i >= rlen || pr[j].first < row[i].first) {
        const double v = -c * pr[j].second;
        if (std::abs(v) > tol_) scratch.emplace_back(pr[j].first, v);
        ++j;
      } else {
        const double v = row[i].second - c * pr[j].second;
        if (std::abs(v) > tol_) scratch.emplace_back(row[i].first, v);
        ++i;
        ++j;
      }
    }
    row.swap(scratch);
  }
}

bool SparseEliminator::add(SparseVec row) {
  tidy(row, tol_);
  SparseVec scratch;
  scratch.reserve(row.size() + 8);
  reduce_leading(row, scratch);
  if (row.empty()) return false;
  const auto [k, c] = row.back();
  if (affine_ && k == 0) {
    if (std::abs(c) > kInconsistent) throw SolverError(fmt::format("constraints are inconsistent: a row reduces to 0 = {:.3g}", -c));
    return false;
  }
  pivot_[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(starts_.size());
  starts_.push_back(static_cast<std::int64_t>(pool_.size()));
  lens_.push_back(static_cast<std::int32_t>(row.size()));
  for (const auto& [key, v] : row) pool_.emplace_back(key, v / c);
  return true;
}

SparseVec SparseEliminator::pivot_row(std::int32_t k) const {
  const std::int32_t p = pivot_[static_cast<std::size_t>(k)];
  const auto* pr = pool_.data() + starts_[static_cast<std::size_t>(p)];
  return SparseVec(pr, pr + lens_[static_cast<std::size_t>(p)]);
}

SparseVec SparseEliminator::normal_form(const SparseVec& row) {
  if (acc_.empty()) {
    acc_.assign(pivot_.size(), 0.0);
    queued_.assign(pivot_.size(), 0);
  }
  std::priority_queue<std::int32_t> heap;
  for (const auto& [k, c] : row) {
    acc_[static_cast<std::size_t>(k)] += c;
    if (!queued_[static_cast<std::size_t>(k)]) {
      queued_[static_cast<std::size_t>(k)] = 1;
      heap.push(k);
    }
  }
  SparseVec out;
  while (!heap.empty()) {
    const std::int32_t k = heap.top();
    heap.pop();
    const double c = acc_[static_cast<std::size_t>(k)];
    acc_[static_cast<std::size_t>(k)] = 0.0;
    queued_[static_cast<std::size_t>(k)] = 0;
    if (std::abs(c) <= tol_) continue;
    const std::int32_t p = pivot_[static_cast<std::size_t>(k)];
    if (p < 0) {
      out.emplace_back(k, c);
      continue;
    }
    const auto* pr = pool_.data() + starts_[static_cast<std::size_t>(p)];
    const std::int32_t plen = lens_[static_cast<std::size_t>(p)] - 1;
    for (std::int32_t j = 0; j < plen; ++j) {
      const auto u = static_cast<std::size_t>(pr[j].first);
      acc_[u] -= c * pr[j].second;
      if (!queued_[u]) {
        queued_[u] = 1;
        heap.push(pr[j].first);
      }
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

// Union-find over the upper-triangle entries of the moment matrix plus one
// node standing for the constant 1.
class EntryClasses {
 public:
  explicit EntryClasses(std::size_t dim) : n_(static_cast<std::int64_t>(dim)) {
    const std::int64_t e = n_ * (n_ + 1) / 2;
    if (e + 1 >= static_cast<std::int64_t>(INT32_MAX)) throw SizeError("moment matrix too large for the entry index");
    parent_.resize(static_cast<std::size_t>(e) + 1);
    for (std::size_t i = 0; i < parent_.size(); ++i) parent_[i] = static_cast<std::int32_t>(i);
    flags_.assign(parent_.size(), 0);
    flags_.back() = kConst;
  }

  std::int32_t entries() const { return static_cast<std::int32_t>(parent_.size() - 1); }
  std::int32_t const_node() const { return entries(); }

  std::int32_t id(std::int32_t r, std::int32_t c) const {
    if (r > c) std::swap(r, c);
    const std::int64_t rr = r;
    return static_cast<std::int32_t>(rr * n_ - rr * (rr - 1) / 2 + (c - r));
  }

  std::int32_t find(std::int32_t x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& px = parent_[static_cast<std::size_t>(x)];
      px = parent_[static_cast<std::size_t>(px)];
      x = px;
    }
    return x;
  }

  bool is_zero(std::int32_t root) const { return flags_[static_cast<std::size_t>(root)] & kZero; }
  bool is_const(std::int32_t root) const { return flags_[static_cast<std::size_t>(root)] & kConst; }

  bool unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    flags_[static_cast<std::size_t>(a)] |= flags_[static_cast<std::size_t>(b)];
    check(a);
    return true;
  }

  bool set_zero(std::int32_t root) {
    if (is_zero(root)) return false;
    flags_[static_cast<std::size_t>(root)] |= kZero;
    check(root);
    return true;
  }

 private:
  static constexpr std::uint8_t kZero = 1, kConst = 2;
  void check(std::int32_t root) const {
    if ((flags_[static_cast<std::size_t>(root)] & (kZero | kConst)) == (kZero | kConst)) {
      throw SolverError("constraints are inconsistent: an entry is forced to both 0 and 1");
    }
  }
  std::int64_t n_;
  std::vector<std::int32_t> parent_;
  std::vector<std::uint8_t> flags_;
};

}  // namespace

ReducedProblem reduce_problem(const MomentProblem& p, const ReductionOptions& opts) {
  const auto& rows = p.constraints;
  const auto n = static_cast<std::int32_t>(p.dim);
  if (n < 1) throw InputError("moment problem has dimension 0");
  ReducedProblem out;
  out.dim = p.dim;
  auto& st = out.stats;

  if (opts.referencePoint) {
    const double res = max_constraint_residual(rows, opts.referencePoint);
    if (res > 1e-9) throw SolverError(fmt::format("reference point violates the constraints (residual {:.3g})", res));
  }

  EntryClasses uf(p.dim);
  st.entries = static_cast<std::size_t>(uf.entries());
  // Merge pass: two-term +-1 rows unite entries, one-term rows fix a class to
  // 0 or 1. Repeat until nothing changes, since earlier merges can shorten rows.
  std::vector<char> resolved(rows.size(), 0);
  std::vector<std::pair<std::int32_t, double>> buf;
  bool changed = true;
  while (changed) {
    changed = false;
    ++st.mergePasses;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (resolved[i]) continue;
      buf.clear();
      double rhs = rows.rhs[i];
      for (std::size_t k = rows.row_begin(i); k < rows.row_end(i); ++k) {
        const Term& t = rows.terms[k];
        const std::int32_t r = uf.find(uf.id(t.row, t.col));
        if (uf.is_zero(r)) continue;
        if (uf.is_const(r)) {
          rhs -= t.coef;
          continue;
        }
        buf.emplace_back(r, t.coef);
      }
      tidy(buf, 1e-12);
      if (buf.empty()) {
        if (std::abs(rhs) > kInconsistent) throw SolverError(fmt::format("constraint {} ({}) reduces to 0 = {:.3g}", i, family_name(rows.family[i]), rhs));
        resolved[i] = 1;
      } else if (buf.size() == 1) {
        const auto [r, c] = buf[0];
        if (std::abs(rhs) <= 1e-12) {
          uf.set_zero(r);
        } else if (std::abs(rhs - c) <= 1e-12) {
          uf.unite(r, uf.const_node());
        } else {
          continue;
        }
        resolved[i] = 1;
        changed = true;
      } else if (buf.size() == 2 && std::abs(rhs) <= 1e-12 && std::abs(buf[0].second + buf[1].second) <= 1e-12) {
        uf.unite(buf[0].first, buf[1].first);
        resolved[i] = 1;
        changed = true;
      }
    }
  }

  // Number the surviving classes by their largest entry key (col-major in the
  // upper triangle), so elimination pivots on long words first.
  const std::int32_t ne = uf.entries();
  std::vector<std::int32_t> entry_var(static_cast<std::size_t>(ne));
  {
    std::vector<std::int64_t> key(static_cast<std::size_t>(ne) + 1, -1);
    for (std::int32_t r = 0; r < n; ++r)
      for (std::int32_t c = r; c < n; ++c) {
        const std::int32_t e = uf.id(r, c);
        const std::int32_t root = uf.find(e);
        auto& k = key[static_cast<std::size_t>(root)];
        k = std::max(k, static_cast<std::int64_t>(c) * n + r);
      }
    std::vector<std::pair<std::int64_t, std::int32_t>> roots;
    for (std::int32_t e = 0; e < ne; ++e) {
      if (uf.find(e) != e) continue;
      if (uf.is_zero(e) || uf.is_const(e)) continue;
      roots.emplace_back(key[static_cast<std::size_t>(e)], e);
    }
    std::sort(roots.begin(), roots.end());
    std::vector<std::int32_t> root_var(key.size(), -1);
    for (std::size_t i = 0; i < roots.size(); ++i) root_var[static_cast<std::size_t>(roots[i].second)] = static_cast<std::int32_t>(i) + 1;
    for (std::int32_t e = 0; e < ne; ++e) {
      const std::int32_t root = uf.find(e);
      if (uf.is_zero(root)) {
        entry_var[static_cast<std::size_t>(e)] = -1;
        ++st.zeroEntries;
      } else if (uf.is_const(root)) {
        entry_var[static_cast<std::size_t>(e)] = 0;
      } else {
        entry_var[static_cast<std::size_t>(e)] = root_var[static_cast<std::size_t>(root)];
      }
    }
    st.classes = roots.size();
  }
  auto var_of = [&](std::int32_t r, std::int32_t c) { return entry_var[static_cast<std::size_t>(uf.id(r, c))]; };

  const auto nvars = static_cast<std::int32_t>(st.classes) + 1;
  SparseEliminator elim(nvars, true);
  auto add_row = [&](const Term* terms, std::size_t count, double rhs) {
    SparseVec v;
    v.reserve(count + 1);
    if (rhs != 0.0) v.emplace_back(0, -rhs);
    for (std::size_t k = 0; k < count; ++k) {
      const std::int32_t var = var_of(terms[k].row, terms[k].col);
      if (var >= 0) v.emplace_back(var, terms[k].coef);
    }
    return elim.add(std::move(v));
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (resolved[i]) continue;
    ++st.eliminationRows;
    add_row(rows.terms.data() + rows.row_begin(i), rows.row_end(i) - rows.row_begin(i), rows.rhs[i]);
  }
  st.freeBeforeFace = static_cast<std::size_t>(nvars - 1) - elim.pivots();

  // Face reduction: a hint z is accepted when z^T M z is identically zero on
  // the affine set; then M z = 0 at every feasible point and those rows join
  // the system.
  std::vector<char> accepted(p.hints.size(), 0);
  if (opts.useHints) {
    st.hintsOffered = p.hints.size();
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t h = 0; h < p.hints.size(); ++h) {
        if (accepted[h]) continue;
        const auto& z = p.hints[h].terms;
        bool ok = false;
        if (z.size() == 1) {
          ok = var_of(z[0].first, z[0].first) == -1;
        } else if (z.size() == 2 && z[0].second == -z[1].second) {
          const auto a = var_of(z[0].first, z[0].first), b = var_of(z[0].first, z[1].first), c = var_of(z[1].first, z[1].first);
          ok = a == b && b == c;
        }
        if (!ok) {
          SparseVec q;
          for (const auto& [wi, ci] : z)
            for (const auto& [wj, cj] : z) {
              const std::int32_t var = var_of(wi, wj);
              if (var >= 0) q.emplace_back(var, ci * cj);
            }
          tidy(q, 1e-12);
          ok = q.empty() || elim.normal_form(q).empty();
        }
        if (!ok) continue;
        accepted[h] = 1;
        grew = true;
        ++st.hintsAccepted;
        for (std::int32_t t = 0; t < n; ++t) {
          SparseVec v;
          for (const auto& [w, cw] : z) {
            const std::int32_t var = var_of(w, t);
            if (var >= 0) v.emplace_back(var, cw);
          }
          elim.add(std::move(v));
        }
      }
    }
  }

  // Face basis: eliminate the accepted null vectors, pivoting on the largest
  // word index; the words left without a pivot span the face.
  SparseEliminator nulls(n, false);
  for (std::size_t h = 0; h < p.hints.size(); ++h) {
    if (!accepted[h]) continue;
    SparseVec v(p.hints[h].terms.begin(), p.hints[h].terms.end());
    nulls.add(v);
    out.acceptedHints.push_back(p.hints[h].terms);
  }
  std::vector<std::int32_t> basis_pos(static_cast<std::size_t>(n), -1);
  for (std::int32_t w = 0; w < n; ++w) {
    if (!nulls.is_pivot(w)) {
      basis_pos[static_cast<std::size_t>(w)] = static_cast<std::int32_t>(out.basis.size());
      out.basis.push_back(w);
    }
  }
  const auto k = static_cast<Eigen::Index>(out.basis.size());
  st.faceDim = out.basis.size();
  out.T = Eigen::MatrixXd::Zero(n, k);
  for (std::int32_t w = 0; w < n; ++w) {
    if (basis_pos[static_cast<std::size_t>(w)] >= 0) {
      out.T(w, basis_pos[static_cast<std::size_t>(w)]) = 1.0;
      continue;
    }
    for (const auto& [u, c] : nulls.pivot_row(w)) {
      if (u != w) out.T.row(w) -= c * out.T.row(u);
    }
  }

  // Free variables and the LMI blocks.
  std::vector<std::int32_t> free_index(static_cast<std::size_t>(nvars), -1);
  std::int32_t m = 0;
  for (std::int32_t v = 1; v < nvars; ++v)
    if (!elim.is_pivot(v)) free_index[static_cast<std::size_t>(v)] = m++;
  st.freeAfterFace = static_cast<std::size_t>(m);
  const double bytes = 8.0 * static_cast<double>(m) * (static_cast<double>(k) * static_cast<double>(k) + static_cast<double>(m));
  if (bytes > opts.memoryBudget) {
    throw SizeError(fmt::format("reduced SDP has {} free variables on a {}x{} face and needs about {:.1f} GB (budget {:.1f} GB)",
                                m, k, k, bytes / 1e9, opts.memoryBudget / 1e9));
  }
  out.F0 = Eigen::MatrixXd::Zero(k, k);
  std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(m));
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) {
      const std::int32_t var = var_of(out.basis[static_cast<std::size_t>(i)], out.basis[static_cast<std::size_t>(j)]);
      if (var < 0) continue;
      for (const auto& [u, c] : elim.normal_form({{var, 1.0}})) {
        if (u == 0) {
          out.F0(i, j) += c;
          if (i != j) out.F0(j, i) += c;
          continue;
        }
        const auto f = static_cast<std::size_t>(free_index[static_cast<std::size_t>(u)]);
        if (blocks[f].size() == 0) blocks[f] = Eigen::MatrixXd::Zero(k, k);
        used[f] = 1;
        blocks[f](i, j) += c;
        if (i != j) blocks[f](j, i) += c;
      }
    }
  // Objective in the free variables.
  SparseVec obj;
  for (const Term& t : p.objective) {
    const std::int32_t var = var_of(t.row, t.col);
    if (var >= 0) obj.emplace_back(var, t.coef);
  }
  tidy(obj, 0.0);
  Eigen::VectorXd cfull = Eigen::VectorXd::Zero(m);
  for (const auto& [u, c] : elim.normal_form(obj)) {
    if (u == 0) {
      out.c0 += c;
    } else {
      cfull(free_index[static_cast<std::size_t>(u)]) += c;
    }
  }
  // Keep only variables that enter the LMI. A variable outside the LMI with a
  // nonzero objective coefficient would make the problem unbounded.
  std::vector<Eigen::Index> keep;
  for (std::int32_t f = 0; f < m; ++f) {
    if (used[static_cast<std::size_t>(f)]) {
      keep.push_back(f);
    } else if (std::abs(cfull(f)) > 1e-12) {
      throw SolverError("objective depends on a variable the PSD constraint does not bound");
    }
  }
  out.c.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.F.push_back(std::move(blocks[static_cast<std::size_t>(keep[i])]));
    out.c(static_cast<Eigen::Index>(i)) = cfull(keep[i]);
  }

  if (opts.referencePoint) {
    for (const auto& z : out.acceptedHints) {
      double q = 0.0;
      for (const auto& [wi, ci] : z)
        for (const auto& [wj, cj] : z) q += ci * cj * opts.referencePoint(wi, wj);
      if (std::abs(q) > 1e-9) throw SolverError("an accepted face hint is violated by the reference point");
    }
  }
  return out;
}

Eigen::MatrixXd assemble_lmi(const ReducedProblem& r, const Eigen::VectorXd& z) {
  Eigen::MatrixXd m = r.F0;
  for (std::size_t j = 0; j < r.F.size(); ++j) m += z(static_cast<Eigen::Index>(j)) * r.F[j];
  return m;
}

double max_constraint_residual(const SparseRows& rows, const Eigen::MatrixXd& gamma) {
  return max_constraint_residual(rows, [&gamma](int r, int c) { return gamma(r, c); });
}

double max_constraint_residual(const SparseRows& rows, const std::function<double(int, int)>& entry) {
  double worst = 0.0;
  const auto count = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for reduction(max : worst) schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    double s = -rows.rhs[ii];
    for (std::size_t k = rows.row_begin(ii); k < rows.row_end(ii); ++k) s += rows.terms[k].coef * entry(rows.terms[k].row, rows.terms[k].col);
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

}  // namespace qcsdp
