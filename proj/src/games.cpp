#include "qcsdp/games.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "qcsdp/errors.hpp"
#include "qcsdp/rng.hpp"

namespace qcsdp {

std::vector<std::string> validate_game(const Game& g) {
  std::vector<std::string> out;
  if (g.qx < 1) out.push_back(fmt::format("qx must be >= 1 (got {})", g.qx));
  if (g.qy < 1) out.push_back(fmt::format("qy must be >= 1 (got {})", g.qy));
  if (g.ax < 1) out.push_back(fmt::format("ax must be >= 1 (got {})", g.ax));
  if (g.ay < 1) out.push_back(fmt::format("ay must be >= 1 (got {})", g.ay));
  if (!out.empty()) return out;
  const std::size_t nq = static_cast<std::size_t>(g.qx) * static_cast<std::size_t>(g.qy);
  if (g.mu.size() != nq) {
    out.push_back(fmt::format("mu size {} != qx*qy = {}", g.mu.size(), nq));
  } else {
    double sum = 0.0;
    for (std::size_t i = 0; i < nq; ++i) {
      if (!(g.mu[i] >= 0.0) || !std::isfinite(g.mu[i])) {
        out.push_back(fmt::format("mu entry {} (x={}, y={}) is negative or not finite", i, i / g.qy, i % g.qy));
      }
      sum += g.mu[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) out.push_back(fmt::format("mu sums to {:.12g}", sum));
  }
  if (g.predicate.size() != g.predicate_size()) {
    out.push_back(fmt::format("predicate size {} != qx*qy*ax*ay = {}", g.predicate.size(), g.predicate_size()));
  }
  return out;
}

std::vector<std::string> validate_csp(const CspInstance& csp) {
  std::vector<std::string> out;
  if (csp.nvars < 1) out.push_back("nvars must be >= 1");
  if (csp.clauses.empty()) out.push_back("no clauses");
  double sum = 0.0;
  for (std::size_t c = 0; c < csp.clauses.size(); ++c) {
    const auto& cl = csp.clauses[c];
    for (int v : cl.vars) {
      if (v < 0 || v >= csp.nvars) out.push_back(fmt::format("clause {}: variable {} outside [0, {})", c, v, csp.nvars));
    }
    if (!(cl.weight >= 0.0)) out.push_back(fmt::format("clause {}: negative weight", c));
    sum += cl.weight;
  }
  if (!csp.clauses.empty() && std::abs(sum - 1.0) > 1e-12) out.push_back(fmt::format("clause weights sum to {:.12g}", sum));
  return out;
}

namespace {

void check_povm(const std::vector<DenseMatrix>& povm, int dim, double tol, const std::string& label) {
  DenseMatrix sum = DenseMatrix::Zero(dim, dim);
  for (std::size_t a = 0; a < povm.size(); ++a) {
    const auto& e = povm[a];
    if (e.rows() != dim || e.cols() != dim) {
      throw InputError(fmt::format("{} element {} is {}x{}, expected {}x{}", label, a, e.rows(), e.cols(), dim, dim));
    }
    if (!is_hermitian(e, tol)) throw InputError(fmt::format("{} element {} not Hermitian", label, a));
    if (min_eigenvalue(e) < -tol) throw InputError(fmt::format("{} element {} not PSD", label, a));
    sum += e;
  }
  if ((sum - DenseMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > tol) {
    throw InputError(fmt::format("{} does not sum to the identity", label));
  }
}

}  // namespace

void check_strategy(const Game& g, const Strategy& s, double tol) {
  if (static_cast<int>(s.povmA.size()) != g.qx || static_cast<int>(s.povmB.size()) != g.qy) {
    throw InputError(fmt::format("strategy has {}/{} questions, game has {}/{}", s.povmA.size(), s.povmB.size(), g.qx, g.qy));
  }
  for (int x = 0; x < g.qx; ++x) {
    if (static_cast<int>(s.povmA[static_cast<std::size_t>(x)].size()) != g.ax) {
      throw InputError(fmt::format("first-prover question {} has {} outcomes, expected {}", x, s.povmA[static_cast<std::size_t>(x)].size(), g.ax));
    }
    check_povm(s.povmA[static_cast<std::size_t>(x)], s.dim, tol, fmt::format("povmA[{}]", x));
  }
  for (int y = 0; y < g.qy; ++y) {
    if (static_cast<int>(s.povmB[static_cast<std::size_t>(y)].size()) != g.ay) {
      throw InputError(fmt::format("second-prover question {} has {} outcomes, expected {}", y, s.povmB[static_cast<std::size_t>(y)].size(), g.ay));
    }
    check_povm(s.povmB[static_cast<std::size_t>(y)], s.dim, tol, fmt::format("povmB[{}]", y));
  }
  if (s.rho.rows() != s.dim || s.rho.cols() != s.dim) throw InputError("rho has the wrong dimension");
  if (!is_hermitian(s.rho, tol) || min_eigenvalue(s.rho) < -tol || std::abs(s.rho.trace() - Complex(1.0)) > tol) {
    throw InputError("rho is not a density matrix");
  }
}

Game chsh() {
  Game g;
  g.qx = g.qy = g.ax = g.ay = 2;
  g.mu.assign(4, 0.25);
  g.predicate.resize(16);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) g.predicate[static_cast<std::size_t>(((x * 2 + y) * 2 + a) * 2 + b)] = (a ^ b) == (x & y);
  return g;
}

Game trivial_game(bool accept) {
  Game g;
  g.qx = g.qy = g.ax = g.ay = 1;
  g.mu = {1.0};
  g.predicate = {static_cast<std::uint8_t>(accept)};
  return g;
}

Game random_binary_game(std::uint64_t seed) {
  CounterRng rng(seed, 0x67616d65);
  Game g;
  g.qx = g.qy = g.ax = g.ay = 2;
  g.mu.assign(4, 0.25);
  g.predicate.resize(16);
  for (auto& v : g.predicate) v = rng.uniform() < 0.5;
  return g;
}

OracleGame oracularize(const CspInstance& csp) {
  if (auto v = validate_csp(csp); !v.empty()) throw InputError("invalid csp: " + v.front());
  OracleGame og;
  og.nvars = csp.nvars;
  const int n = csp.nvars;

  // Merge clauses by sorted variable triple.
  std::map<std::array<int, 3>, std::pair<std::uint8_t, double>> merged;
  for (std::size_t c = 0; c < csp.clauses.size(); ++c) {
    const auto& cl = csp.clauses[c];
    if (cl.vars[0] == cl.vars[1] || cl.vars[0] == cl.vars[2] || cl.vars[1] == cl.vars[2]) {
      throw InputError(fmt::format("clause {} repeats a variable", c));
    }
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return cl.vars[static_cast<std::size_t>(i)] < cl.vars[static_cast<std::size_t>(j)]; });
    std::array<int, 3> sorted{};
    for (int k = 0; k < 3; ++k) sorted[static_cast<std::size_t>(k)] = cl.vars[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    // Re-express the accept mask with bits in sorted-variable order.
    std::uint8_t mask = 0;
    for (int bits = 0; bits < 8; ++bits) {
      std::array<int, 3> orig{};
      for (int k = 0; k < 3; ++k) orig[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = (bits >> (2 - k)) & 1;
      const int obits = orig[0] << 2 | orig[1] << 1 | orig[2];
      if (cl.accept >> obits & 1) mask = static_cast<std::uint8_t>(mask | 1u << bits);
    }
    auto [it, fresh] = merged.try_emplace(sorted, mask, 0.0);
    if (!fresh && it->second.first != mask) {
      throw InputError(fmt::format("clause {} shares variables {},{},{} with an earlier clause but has a different accept set", c, sorted[0], sorted[1], sorted[2]));
    }
    it->second.second += cl.weight;
  }
  for (const auto& [t, mw] : merged) {
    og.triples.push_back(t);
    og.tripleAccept.push_back(mw.first);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) og.pairs.emplace_back(i, j);

  Game& g = og.game;
  g.qx = static_cast<int>(og.triples.size());
  g.qy = static_cast<int>(og.pairs.size());
  g.ax = 8;
  g.ay = 4;
  g.mu.assign(static_cast<std::size_t>(g.qx * g.qy), 0.0);
  g.predicate.assign(g.predicate_size(), 0);
  auto pair_index = [n](int i, int j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
  };
  std::size_t x = 0;
  for (const auto& [t, mw] : merged) {
    for (int i : t)
      for (int j = 0; j < n; ++j) g.mu[x * static_cast<std::size_t>(g.qy) + static_cast<std::size_t>(pair_index(i, j))] += mw.second / (3.0 * n);
    ++x;
  }
  for (int xi = 0; xi < g.qx; ++xi) {
    const auto& t = og.triples[static_cast<std::size_t>(xi)];
    for (int yi = 0; yi < g.qy; ++yi) {
      const auto [pi, pj] = og.pairs[static_cast<std::size_t>(yi)];
      for (int a = 0; a < 8; ++a) {
        const bool clause_ok = og.tripleAccept[static_cast<std::size_t>(xi)] >> a & 1;
        for (int b = 0; b < 4; ++b) {
          bool ok = clause_ok;
          for (int k = 0; k < 3 && ok; ++k) {
            const int abit = (a >> (2 - k)) & 1;
            if (t[static_cast<std::size_t>(k)] == pi && abit != ((b >> 1) & 1)) ok = false;
            if (t[static_cast<std::size_t>(k)] == pj && abit != (b & 1)) ok = false;
          }
          g.predicate[static_cast<std::size_t>(((xi * g.qy + yi) * 8 + a) * 4 + b)] = ok;
        }
      }
    }
  }
  return og;
}

namespace {

void check_search_size(const Game& g) {
  const double count = std::pow(static_cast<double>(g.ax), g.qx) * std::pow(static_cast<double>(g.ay), g.qy);
  if (count > kClassicalSearchLimit) {
    throw SizeError(fmt::format("game too large for brute force ({:.3g} deterministic strategies > {:g})", count, kClassicalSearchLimit));
  }
}

// Decodes index k into a base-`base` digit vector of length `len`.
void decode(std::uint64_t k, int base, std::vector<int>& digits) {
  for (auto& d : digits) {
    d = static_cast<int>(k % static_cast<std::uint64_t>(base));
    k /= static_cast<std::uint64_t>(base);
  }
}

}  // namespace

double classical_value(const Game& g) {
  if (auto v = validate_game(g); !v.empty()) throw InputError("invalid game: " + v.front());
  check_search_size(g);
  std::uint64_t na = 1;
  for (int x = 0; x < g.qx; ++x) na *= static_cast<std::uint64_t>(g.ax);
  double best = 0.0;
#pragma omp parallel
  {
    std::vector<int> fa(static_cast<std::size_t>(g.qx));
    double local = 0.0;
#pragma omp for schedule(static)
    for (std::uint64_t k = 0; k < na; ++k) {
      decode(k, g.ax, fa);
      double value = 0.0;
      for (int y = 0; y < g.qy; ++y) {
        double by = 0.0;
        for (int b = 0; b < g.ay; ++b) {
          double v = 0.0;
          for (int x = 0; x < g.qx; ++x) {
            if (g.accepts(x, y, fa[static_cast<std::size_t>(x)], b)) v += g.prob(x, y);
          }
          by = std::max(by, v);
        }
        value += by;
      }
      local = std::max(local, value);
    }
#pragma omp critical
    best = std::max(best, local);
  }
  return best;
}

double classical_value_serial(const Game& g) {
  if (auto v = validate_game(g); !v.empty()) throw InputError("invalid game: " + v.front());
  check_search_size(g);
  std::uint64_t na = 1, nb = 1;
  for (int x = 0; x < g.qx; ++x) na *= static_cast<std::uint64_t>(g.ax);
  for (int y = 0; y < g.qy; ++y) nb *= static_cast<std::uint64_t>(g.ay);
  std::vector<int> fa(static_cast<std::size_t>(g.qx)), fb(static_cast<std::size_t>(g.qy));
  double best = 0.0;
  for (std::uint64_t i = 0; i < na; ++i) {
    decode(i, g.ax, fa);
    for (std::uint64_t j = 0; j < nb; ++j) {
      decode(j, g.ay, fb);
      double v = 0.0;
      for (int x = 0; x < g.qx; ++x)
        for (int y = 0; y < g.qy; ++y)
          if (g.accepts(x, y, fa[static_cast<std::size_t>(x)], fb[static_cast<std::size_t>(y)])) v += g.prob(x, y);
      best = std::max(best, v);
    }
  }
  return best;
}

std::pair<double, double> strategy_value_orderings(const Game& g, const Strategy& s) {
  check_strategy(g, s, 1e-8);
  Complex ab = 0.0, ba = 0.0;
  for (int x = 0; x < g.qx; ++x) {
    for (int y = 0; y < g.qy; ++y) {
      const double p = g.prob(x, y);
      if (p == 0.0) continue;
      for (int a = 0; a < g.ax; ++a) {
        const DenseMatrix& ea = s.povmA[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)];
        const DenseMatrix ea_rho = ea * s.rho;
        const DenseMatrix rho_ea = s.rho * ea;
        for (int b = 0; b < g.ay; ++b) {
          if (!g.accepts(x, y, a, b)) continue;
          const DenseMatrix& eb = s.povmB[static_cast<std::size_t>(y)][static_cast<std::size_t>(b)];
          // Tr(A B rho) = sum_ij B_ij (rho A)_ji, Tr(B A rho) = sum_ij B_ij (A rho)_ji.
          ab += p * (eb.array() * rho_ea.transpose().array()).sum();
          ba += p * (eb.array() * ea_rho.transpose().array()).sum();
        }
      }
    }
  }
  return {std::abs(ab), std::abs(ba)};
}

double strategy_value(const Game& g, const Strategy& s) {
  const auto [ab, ba] = strategy_value_orderings(g, s);
  return std::max(ab, ba);
}

CommutatorReport commutator_report(const Strategy& s) {
  std::vector<DenseMatrix> as, bs;
  for (const auto& povm : s.povmA)
    for (const auto& e : povm) {
      if (e.rows() != s.dim || e.cols() != s.dim) throw InputError("commutator_report: dimension mismatch");
      as.push_back(e);
    }
  for (const auto& povm : s.povmB)
    for (const auto& e : povm) {
      if (e.rows() != s.dim || e.cols() != s.dim) throw InputError("commutator_report: dimension mismatch");
      bs.push_back(e);
    }
  CommutatorReport rep;
  rep.table = commutator_norm_table(as, bs);
  rep.deltaMax = rep.table.size() ? rep.table.maxCoeff() : 0.0;
  return rep;
}

namespace {

// Unitary on H (x) C^k (ancilla-major block layout, block a = ancilla |a>)
// whose first block column is (sqrt E_0; ...; sqrt E_{k-1}).
DenseMatrix completion_unitary(const std::vector<DenseMatrix>& povm) {
  const auto k = static_cast<Eigen::Index>(povm.size());
  const Eigen::Index d = povm.front().rows();
  std::vector<DenseMatrix> roots;
  for (const auto& e : povm) roots.push_back(psd_sqrt(e));
  DenseMatrix u = DenseMatrix::Zero(d * k, d * k);
  if (k == 1) return DenseMatrix::Identity(d, d);
  if (k == 2) {
    u.block(0, 0, d, d) = roots[0];
    u.block(0, d, d, d) = -roots[1];
    u.block(d, 0, d, d) = roots[1];
    u.block(d, d, d, d) = roots[0];
    if ((u.adjoint() * u - DenseMatrix::Identity(2 * d, 2 * d)).cwiseAbs().maxCoeff() < 1e-9) return u;
  }
  // Commuting elements: per joint eigenvector a Householder reflection sending
  // e_0 to the column of square roots.
  bool commuting = true;
  for (Eigen::Index a = 0; a < k && commuting; ++a)
    for (Eigen::Index b = a + 1; b < k && commuting; ++b)
      commuting = commutator_norm(povm[static_cast<std::size_t>(a)], povm[static_cast<std::size_t>(b)]) < 1e-12;
  if (commuting) {
    // A generic combination separates the joint eigenspaces.
    DenseMatrix mix = DenseMatrix::Zero(d, d);
    for (Eigen::Index a = 0; a < k; ++a) mix += (1.0 + 0.6180339887 * static_cast<double>(a)) * povm[static_cast<std::size_t>(a)];
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (mix + mix.adjoint()));
    const DenseMatrix& w = es.eigenvectors();
    u.setZero();
    for (Eigen::Index i = 0; i < d; ++i) {
      Vector lam(k);
      for (Eigen::Index a = 0; a < k; ++a) lam(a) = w.col(i).dot(roots[static_cast<std::size_t>(a)] * w.col(i));
      // Reflection H = I - 2 v v^dagger / |v|^2 with v = e_0 - lam maps e_0 to lam.
      Vector v = -lam;
      v(0) += 1.0;
      DenseMatrix h = DenseMatrix::Identity(k, k);
      if (v.norm() > 1e-14) h -= 2.0 * v * v.adjoint() / v.squaredNorm();
      for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b) u.block(a * d, b * d, d, d) += h(a, b) * w.col(i) * w.col(i).adjoint();
    }
    if ((u.adjoint() * u - DenseMatrix::Identity(k * d, k * d)).cwiseAbs().maxCoeff() < 1e-9) return u;
  }
  // Generic: operator reflection U = I - 2 v (v^dagger v)^+ v^dagger with
  // v = J - C, J = |0> (x) I and C the column of square roots. Every block is
  // a function of the POVM elements, so U commutes with whatever they commute with.
  DenseMatrix col(d * k, d);
  for (Eigen::Index a = 0; a < k; ++a) col.block(a * d, 0, d, d) = roots[static_cast<std::size_t>(a)];
  DenseMatrix v = -col;
  v.topRows(d) += DenseMatrix::Identity(d, d);
  const DenseMatrix vv = DenseMatrix::Identity(d, d) - roots[0];  // v^dagger v / 2
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (vv + vv.adjoint()));
  Eigen::VectorXd inv = es.eigenvalues();
  for (Eigen::Index i = 0; i < d; ++i) inv(i) = inv(i) > 1e-12 ? 1.0 / inv(i) : 0.0;
  const DenseMatrix pinv = es.eigenvectors() * inv.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  u = DenseMatrix::Identity(d * k, d * k) - v * pinv * v.adjoint();
  const double err = (u.adjoint() * u - DenseMatrix::Identity(d * k, d * k)).cwiseAbs().maxCoeff();
  if (err > 1e-9) throw InputError(fmt::format("dilate_to_projective: completion is not unitary (error {:.3g}); POVM square roots are unstable", err));
  return u;
}

}  // namespace

Strategy dilate_to_projective(const Strategy& s) {
  if (s.povmA.empty() || s.povmB.empty()) throw InputError("dilate_to_projective: empty strategy");
  const Eigen::Index d = s.dim;
  const auto ka = static_cast<Eigen::Index>(s.povmA.front().size());
  const auto kb = static_cast<Eigen::Index>(s.povmB.front().size());
  auto check_roots = [](const std::vector<std::vector<DenseMatrix>>& fam) {
    for (const auto& povm : fam)
      for (const auto& e : povm) {
        if (min_eigenvalue(e) < -1e-9) throw InputError("dilate_to_projective: POVM element has eigenvalue below -1e-9, square root unstable");
      }
  };
  check_roots(s.povmA);
  check_roots(s.povmB);
  const Eigen::Index dd = d * ka * kb;
  // Global index (h, a, b) -> (h * ka + a) * kb + b.
  auto idx = [&](Eigen::Index h, Eigen::Index a, Eigen::Index b) { return (h * ka + a) * kb + b; };

  Strategy out;
  out.dim = static_cast<int>(dd);
  out.rho = DenseMatrix::Zero(dd, dd);
  for (Eigen::Index h = 0; h < d; ++h)
    for (Eigen::Index g = 0; g < d; ++g) out.rho(idx(h, 0, 0), idx(g, 0, 0)) = s.rho(h, g);

  for (const auto& povm : s.povmA) {
    if (static_cast<Eigen::Index>(povm.size()) != ka) throw InputError("dilate_to_projective: ragged answer sets");
    const DenseMatrix u = completion_unitary(povm);
    std::vector<DenseMatrix> elems;
    for (Eigen::Index a = 0; a < ka; ++a) {
      // U^dagger (|a><a| on the ancilla) U restricted to H (x) C^ka.
      const DenseMatrix small = u.middleRows(a * d, d).adjoint() * u.middleRows(a * d, d);
      DenseMatrix big = DenseMatrix::Zero(dd, dd);
      for (Eigen::Index a1 = 0; a1 < ka; ++a1)
        for (Eigen::Index a2 = 0; a2 < ka; ++a2)
          for (Eigen::Index h = 0; h < d; ++h)
            for (Eigen::Index g = 0; g < d; ++g) {
              const Complex v = small(a1 * d + h, a2 * d + g);
              if (v == Complex(0.0)) continue;
              for (Eigen::Index b = 0; b < kb; ++b) big(idx(h, a1, b), idx(g, a2, b)) = v;
            }
      elems.push_back(std::move(big));
    }
    out.povmA.push_back(std::move(elems));
  }
  for (const auto& povm : s.povmB) {
    if (static_cast<Eigen::Index>(povm.size()) != kb) throw InputError("dilate_to_projective: ragged answer sets");
    const DenseMatrix u = completion_unitary(povm);
    std::vector<DenseMatrix> elems;
    for (Eigen::Index b = 0; b < kb; ++b) {
      const DenseMatrix small = u.middleRows(b * d, d).adjoint() * u.middleRows(b * d, d);
      DenseMatrix big = DenseMatrix::Zero(dd, dd);
      for (Eigen::Index b1 = 0; b1 < kb; ++b1)
        for (Eigen::Index b2 = 0; b2 < kb; ++b2)
          for (Eigen::Index h = 0; h < d; ++h)
            for (Eigen::Index g = 0; g < d; ++g) {
              const Complex v = small(b1 * d + h, b2 * d + g);
              if (v == Complex(0.0)) continue;
              for (Eigen::Index a = 0; a < ka; ++a) big(idx(h, a, b1), idx(g, a, b2)) = v;
            }
      elems.push_back(std::move(big));
    }
    out.povmB.push_back(std::move(elems));
  }
  return out;
}

Strategy deterministic_strategy(const Game& g, const std::vector<int>& fa, const std::vector<int>& fb) {
  if (static_cast<int>(fa.size()) != g.qx || static_cast<int>(fb.size()) != g.qy) {
    throw InputError("deterministic_strategy: answer table sizes do not match the game");
  }
  Strategy s;
  s.dim = 1;
  s.rho = DenseMatrix::Identity(1, 1);
  for (int x = 0; x < g.qx; ++x) {
    std::vector<DenseMatrix> povm(static_cast<std::size_t>(g.ax), DenseMatrix::Zero(1, 1));
    povm.at(static_cast<std::size_t>(fa[static_cast<std::size_t>(x)]))(0, 0) = 1.0;
    s.povmA.push_back(std::move(povm));
  }
  for (int y = 0; y < g.qy; ++y) {
    std::vector<DenseMatrix> povm(static_cast<std::size_t>(g.ay), DenseMatrix::Zero(1, 1));
    povm.at(static_cast<std::size_t>(fb[static_cast<std::size_t>(y)]))(0, 0) = 1.0;
    s.povmB.push_back(std::move(povm));
  }
  return s;
}

Strategy honest_strategy(const OracleGame& og, const std::vector<int>& assignment) {
  if (static_cast<int>(assignment.size()) != og.nvars) throw InputError("honest_strategy: assignment length != nvars");
  std::vector<int> fa, fb;
  for (const auto& t : og.triples) {
    fa.push_back(assignment[static_cast<std::size_t>(t[0])] << 2 | assignment[static_cast<std::size_t>(t[1])] << 1 |
                 assignment[static_cast<std::size_t>(t[2])]);
  }
  for (const auto& [i, j] : og.pairs) {
    fb.push_back(assignment[static_cast<std::size_t>(i)] << 1 | assignment[static_cast<std::size_t>(j)]);
  }
  return deterministic_strategy(og.game, fa, fb);
}

Strategy tsirelson_strategy() {
  auto projector = [](double theta) {
    Vector v(2);
    v << std::cos(theta), std::sin(theta);
    return DenseMatrix(v * v.adjoint());
  };
  const DenseMatrix id2 = DenseMatrix::Identity(2, 2);
  Strategy s;
  s.dim = 4;
  for (double theta : {0.0, std::numbers::pi / 4}) {
    const DenseMatrix p = projector(theta);
    DenseMatrix e0(4, 4), e1(4, 4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        e0.block(2 * i, 2 * j, 2, 2) = p(i, j) * id2;
        e1.block(2 * i, 2 * j, 2, 2) = (id2 - p)(i, j) * id2;
      }
    s.povmA.push_back({e0, e1});
  }
  for (double theta : {std::numbers::pi / 8, -std::numbers::pi / 8}) {
    const DenseMatrix p = projector(theta);
    DenseMatrix e0 = DenseMatrix::Zero(4, 4), e1 = DenseMatrix::Zero(4, 4);
    for (int i = 0; i < 2; ++i) {
      e0.block(2 * i, 2 * i, 2, 2) = p;
      e1.block(2 * i, 2 * i, 2, 2) = id2 - p;
    }
    s.povmB.push_back({e0, e1});
  }
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  s.rho = phi * phi.adjoint();
  return s;
}

}  // namespace qcsdp
