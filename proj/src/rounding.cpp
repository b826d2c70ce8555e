#include "qcsdp/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qcsdp/errors.hpp"

namespace qcsdp {

namespace {

using Json = nlohmann::json;

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

DenseMatrix columns_of(const DenseMatrix& vectors, const std::vector<int>& words) {
  DenseMatrix c(vectors.rows(), static_cast<Eigen::Index>(words.size()));
  for (std::size_t k = 0; k < words.size(); ++k) c.col(static_cast<Eigen::Index>(k)) = vectors.col(words[k]);
  return c;
}

double norm2(const DenseMatrix& m) { return m.size() ? operator_norm(m) : 0.0; }

}  // namespace

ProjectorFamily build_projectors(const Game& g, const GramSolution& gs, bool strict, double cutoff) {
  if (gs.level < 1) throw InputError("build_projectors: level must be at least 1");
  ProjectorFamily pf;
  pf.words = WordIndex(g, gs.level, std::max<std::size_t>(kDefaultWordCap, static_cast<std::size_t>(gs.vectors.cols())));
  const WordIndex& wi = pf.words;
  if (static_cast<std::size_t>(gs.vectors.cols()) != wi.size()) {
    throw InputError(fmt::format("build_projectors: Gram solution has {} vectors, level {} of this game has {} words",
                                 gs.vectors.cols(), gs.level, wi.size()));
  }
  const int n = gs.level;
  pf.dim = static_cast<int>(gs.vectors.rows());
  const auto inner = static_cast<int>(wi.count_upto(n - 1));
  const double cut = cutoff * (gs.vectors.size() ? operator_norm(gs.vectors) : 0.0);

  pf.level.resize(sz(n + 1));
  for (int j = 0; j <= n; ++j) {
    std::vector<int> ws(wi.count_upto(j));
    for (std::size_t k = 0; k < ws.size(); ++k) ws[k] = static_cast<int>(k);
    pf.level[sz(j)] = subspace_projector(columns_of(gs.vectors, ws), 0.0, cut);
  }
  // Spans for different answers to one question are orthogonal at a feasible
  // point; directions near the cutoff can still overlap by rounding, so each
  // span is taken after removing the earlier answers' ranges.
  const DenseMatrix id = DenseMatrix::Identity(pf.dim, pf.dim);
  auto question_projectors = [&](int q, int answers, bool p) {
    std::vector<DenseMatrix> out;
    DenseMatrix taken = DenseMatrix::Zero(pf.dim, pf.dim);
    for (int a = 0; a < answers; ++a) {
      const int c = p ? wi.letter_p(q, a) : wi.letter_q(q, a);
      std::vector<int> ws(sz(inner));
      for (int s = 0; s < inner; ++s) ws[sz(s)] = wi.prepend(c, s);
      const DenseMatrix cols = columns_of(gs.vectors, ws);
      const DenseMatrix raw = subspace_projector(cols, 0.0, cut);
      pf.labelOverlap = std::max(pf.labelOverlap, norm2(taken * raw));
      out.push_back(subspace_projector((id - taken) * cols, 0.0, cut));
      taken += out.back();
    }
    return out;
  };
  for (int x = 0; x < g.qx; ++x) pf.labelP.push_back(question_projectors(x, g.ax, true));
  for (int y = 0; y < g.qy; ++y) pf.labelQ.push_back(question_projectors(y, g.ay, false));

  if (strict) {
    const IdentityReport r = verify_identities(pf, gs);
    const std::pair<const char*, double> fams[] = {{"vector-sum", r.vectorSum},       {"projector-action", r.projectorAction},
                                                   {"level-nesting", r.levelNesting}, {"projector-shape", r.projectorShape},
                                                   {"cancellation", r.cancellation},  {"one-shift", r.oneShift}};
    for (const auto& [name, v] : fams)
      if (v > kIdentityTol) throw VerificationError(fmt::format("identity {} residual {:.3e} exceeds {:g}", name, v, kIdentityTol));
  }
  return pf;
}

double IdentityReport::max() const {
  return std::max({vectorSum, projectorAction, levelNesting, projectorShape, cancellation, oneShift});
}

IdentityReport verify_identities(const ProjectorFamily& pf, const GramSolution& gs) {
  const WordIndex& wi = pf.words;
  const int n = wi.level();
  const auto inner = static_cast<int>(wi.count_upto(n - 1));
  const DenseMatrix& v = gs.vectors;
  const DenseMatrix id = DenseMatrix::Identity(pf.dim, pf.dim);
  IdentityReport r;

  std::vector<const DenseMatrix*> labels;
  std::vector<int> letters;
  for (std::size_t x = 0; x < pf.labelP.size(); ++x)
    for (std::size_t a = 0; a < pf.labelP[x].size(); ++a) {
      labels.push_back(&pf.labelP[x][a]);
      letters.push_back(wi.letter_p(static_cast<int>(x), static_cast<int>(a)));
    }
  const std::size_t numP = labels.size();
  for (std::size_t y = 0; y < pf.labelQ.size(); ++y)
    for (std::size_t b = 0; b < pf.labelQ[y].size(); ++b) {
      labels.push_back(&pf.labelQ[y][b]);
      letters.push_back(wi.letter_q(static_cast<int>(y), static_cast<int>(b)));
    }

  // Vector sum over each question's answers, for both provers.
  auto vector_sum = [&](const std::vector<std::vector<DenseMatrix>>& fam, bool p) {
    for (std::size_t q = 0; q < fam.size(); ++q)
      for (int s = 0; s < inner; ++s) {
        Vector acc = -v.col(s);
        for (std::size_t a = 0; a < fam[q].size(); ++a) {
          const int c = p ? wi.letter_p(static_cast<int>(q), static_cast<int>(a)) : wi.letter_q(static_cast<int>(q), static_cast<int>(a));
          acc += v.col(wi.prepend(c, s));
        }
        r.vectorSum = std::max(r.vectorSum, acc.norm());
      }
  };
  vector_sum(pf.labelP, true);
  vector_sum(pf.labelQ, false);

  for (std::size_t k = 0; k < labels.size(); ++k)
    for (int s = 0; s < inner; ++s)
      r.projectorAction = std::max(r.projectorAction, ((*labels[k]) * v.col(s) - v.col(wi.prepend(letters[k], s))).norm());

  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      r.levelNesting = std::max(r.levelNesting, norm2(pf.level[sz(i)] * pf.level[sz(j)] - pf.level[sz(std::min(i, j))]));

  auto shape = [&](const DenseMatrix& p) {
    r.projectorShape = std::max({r.projectorShape, norm2(p * p - p), norm2(p - p.adjoint())});
  };
  for (const auto& p : pf.level) shape(p);
  for (const auto* p : labels) shape(*p);

  // Cancellation on the low subspaces and the one-shift inclusion.
  const std::size_t numQ = labels.size() - numP;
  double cancel = 0.0;
#pragma omp parallel for collapse(2) schedule(dynamic) reduction(max : cancel)
  for (std::size_t kp = 0; kp < numP; ++kp)
    for (std::size_t kq = 0; kq < numQ; ++kq) {
      const DenseMatrix& pp = *labels[kp];
      const DenseMatrix& qq = *labels[numP + kq];
      const DenseMatrix c = pp * qq - qq * pp;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cancel = std::max(cancel, norm2(pf.level[sz(i)] * c * pf.level[sz(j)]));
    }
  r.cancellation = cancel;
  for (const auto* p : labels)
    for (int j = 0; j < n; ++j) r.oneShift = std::max(r.oneShift, norm2((id - pf.level[sz(j + 1)]) * (*p) * pf.level[sz(j)]));
  return r;
}

RoundingWeights uniform_weights(int level) {
  if (level < 2) throw InputError("rounding needs level >= 2 (level 1 has no interior weight levels)");
  RoundingWeights w;
  w.p.assign(sz(level + 1), 0.0);
  for (int i = 1; i < level; ++i) w.p[sz(i)] = 1.0 / (level - 1);
  w.q = w.p;
  return w;
}

void validate_weights(const RoundingWeights& w, int level) {
  if (level < 2) throw InputError("rounding needs level >= 2 (level 1 has no interior weight levels)");
  auto one = [&](const std::vector<double>& p, const char* name) {
    if (p.size() != sz(level + 1)) throw InputError(fmt::format("weights: \"{}\" needs {} entries (levels 0..{})", name, level + 1, level));
    double sum = 0.0;
    for (double x : p) {
      if (!std::isfinite(x) || x < 0.0) throw InputError(fmt::format("weights: \"{}\" has a negative or non-finite entry", name));
      sum += x;
    }
    if (p.front() != 0.0 || p.back() != 0.0) throw InputError(fmt::format("weights: \"{}\" must vanish at levels 0 and {}", name, level));
    if (std::abs(sum - 1.0) > 1e-9) throw InputError(fmt::format("weights: \"{}\" sums to {:.12g}, not 1", name, sum));
  };
  one(w.p, "p");
  one(w.q, "q");
}

WeightProfileCheck check_weight_profile(const RoundingWeights& w, int level) {
  WeightProfileCheck c;
  for (std::size_t i = 0; i < w.p.size() && i < w.q.size(); ++i) {
    c.sumP2 += w.p[i] * w.p[i];
    c.sumQ2 += w.q[i] * w.q[i];
    c.sumPQ += w.p[i] * w.q[i];
  }
  c.bound = kWeightProfileConstant / level;
  c.holds = std::max({c.sumP2, c.sumQ2, c.sumPQ}) <= c.bound + 1e-12;
  return c;
}

RoundingWeights parse_weights(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError(fmt::format("weights: invalid JSON ({})", e.what()));
  }
  RoundingWeights w;
  for (const char* key : {"p", "q"}) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_array()) throw InputError(fmt::format("weights: missing array \"{}\"", key));
    auto& dst = std::string(key) == "p" ? w.p : w.q;
    for (const auto& e : j[key]) {
      if (!e.is_number()) throw InputError(fmt::format("weights: \"{}\" has a non-numeric entry", key));
      dst.push_back(e.get<double>());
    }
  }
  return w;
}

RoundedStrategy round(const ProjectorFamily& pf, const GramSolution& gs, const std::optional<RoundingWeights>& weights) {
  const int n = pf.words.level();
  RoundedStrategy rs;
  rs.level = n;
  rs.dim = pf.dim;
  rs.weights = weights ? *weights : uniform_weights(n);
  validate_weights(rs.weights, n);
  const DenseMatrix id = DenseMatrix::Identity(pf.dim, pf.dim);

  auto tilde = [&](const DenseMatrix& label, const std::vector<double>& p) {
    DenseMatrix t = DenseMatrix::Zero(pf.dim, pf.dim);
    for (int i = 1; i < n; ++i)
      if (p[sz(i)] != 0.0) t += p[sz(i)] * pf.level[sz(i)] * label * pf.level[sz(i)];
    return DenseMatrix(0.5 * (t + t.adjoint()));
  };
  double mineig = std::numeric_limits<double>::infinity();
  auto side = [&](const std::vector<std::vector<DenseMatrix>>& labels, const std::vector<double>& p,
                  std::vector<std::vector<DenseMatrix>>& out, std::vector<DenseMatrix>& garbage) {
    out.assign(labels.size(), {});
    garbage.assign(labels.size(), id);
    for (std::size_t q = 0; q < labels.size(); ++q)
      for (const auto& l : labels[q]) {
        out[q].push_back(tilde(l, p));
        garbage[q] -= out[q].back();
        mineig = std::min(mineig, min_eigenvalue(out[q].back()));
      }
    for (const auto& e : garbage) mineig = std::min(mineig, min_eigenvalue(e));
  };
  side(pf.labelP, rs.weights.p, rs.pTilde, rs.pGarbage);
  side(pf.labelQ, rs.weights.q, rs.qTilde, rs.qGarbage);
  rs.minEigenvalue = mineig;

  const Vector phi = gs.vectors.col(0);
  rs.rho = phi * phi.adjoint() / phi.squaredNorm();
  return rs;
}

Game with_garbage_answers(const Game& g) {
  Game e;
  e.qx = g.qx;
  e.qy = g.qy;
  e.ax = g.ax + 1;
  e.ay = g.ay + 1;
  e.mu = g.mu;
  e.predicate.assign(e.predicate_size(), 0);
  for (int x = 0; x < g.qx; ++x)
    for (int y = 0; y < g.qy; ++y)
      for (int a = 0; a < g.ax; ++a)
        for (int b = 0; b < g.ay; ++b)
          e.predicate[sz(((x * e.qy + y) * e.ax + a) * e.ay + b)] = g.accepts(x, y, a, b) ? 1 : 0;
  return e;
}

Strategy to_strategy(const RoundedStrategy& rs, GarbagePolicy policy) {
  Strategy s;
  s.dim = rs.dim;
  s.rho = rs.rho;
  s.povmA = rs.pTilde;
  s.povmB = rs.qTilde;
  for (std::size_t x = 0; x < s.povmA.size(); ++x) {
    if (policy == GarbagePolicy::ExtraOutcome) {
      s.povmA[x].push_back(rs.pGarbage[x]);
    } else {
      s.povmA[x][0] += rs.pGarbage[x];
    }
  }
  for (std::size_t y = 0; y < s.povmB.size(); ++y) {
    if (policy == GarbagePolicy::ExtraOutcome) {
      s.povmB[y].push_back(rs.qGarbage[y]);
    } else {
      s.povmB[y][0] += rs.qGarbage[y];
    }
  }
  return s;
}

ValueReport verify_value(const Game& g, const RoundedStrategy& rs, const SdpSolution& sol) {
  if (rs.pTilde.size() != sz(g.qx) || rs.qTilde.size() != sz(g.qy) || (g.qx && rs.pTilde[0].size() != sz(g.ax)) ||
      (g.qy && rs.qTilde[0].size() != sz(g.ay))) {
    throw InputError("verify_value: rounded strategy does not match the game");
  }
  if (sol.level != rs.level) throw InputError("verify_value: solution and strategy come from different levels");
  ValueReport r;
  const Strategy s = to_strategy(rs, GarbagePolicy::ExtraOutcome);
  const auto [ab, ba] = strategy_value_orderings(with_garbage_answers(g), s);
  r.valueAB = ab;
  r.valueBA = ba;
  r.value = std::max(ab, ba);
  r.optimum = sol.optimum;
  r.deviation = std::abs(r.value - r.optimum);

  // rho is rank one: <phi| E F |phi> = (E phi)^dagger (F phi) for Hermitian E.
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rs.rho);
  const Vector psi = es.eigenvectors().col(es.eigenvalues().size() - 1);
  std::vector<Vector> pa, qb;
  std::vector<char> pg, qg;
  for (std::size_t x = 0; x < s.povmA.size(); ++x)
    for (std::size_t a = 0; a < s.povmA[x].size(); ++a) {
      pa.push_back(s.povmA[x][a] * psi);
      pg.push_back(a == s.povmA[x].size() - 1);
    }
  for (std::size_t y = 0; y < s.povmB.size(); ++y)
    for (std::size_t b = 0; b < s.povmB[y].size(); ++b) {
      qb.push_back(s.povmB[y][b] * psi);
      qg.push_back(b == s.povmB[y].size() - 1);
    }
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < qb.size(); ++j)
      if (pg[i] || qg[j]) r.maxGarbageProbability = std::max({r.maxGarbageProbability, std::abs(pa[i].dot(qb[j])), std::abs(qb[j].dot(pa[i]))});

  const WordIndex wi(g, 1);
  for (int x = 0; x < g.qx; ++x)
    for (int a = 0; a < g.ax; ++a)
      for (int y = 0; y < g.qy; ++y)
        for (int b = 0; b < g.ay; ++b) {
          const Complex e = (rs.pTilde[sz(x)][sz(a)] * psi).dot(rs.qTilde[sz(y)][sz(b)] * psi);
          const int pw = 1 + wi.letter_p(x, a), qw = 1 + wi.letter_q(y, b);
          r.maxEntryDeviation = std::max(r.maxEntryDeviation, std::abs(e - sol.gamma(pw, qw)));
        }
  return r;
}

double CommutatorBoundReport::max_garbage() const { return std::max({maxGarbageP, maxGarbageQ, maxGarbageBoth}); }

bool CommutatorBoundReport::holds() const { return maxCommutator <= bound + 1e-9; }

bool CommutatorBoundReport::garbage_holds() const {
  return maxGarbageP <= ax * bound + 1e-9 && maxGarbageQ <= ay * bound + 1e-9 && maxGarbageBoth <= ax * ay * bound + 1e-9;
}

CommutatorBoundReport verify_commutators(const RoundedStrategy& rs) {
  CommutatorBoundReport r;
  const int n = rs.level;
  if (n < 2) throw InputError("verify_commutators: level must be at least 2");
  r.ax = rs.pTilde.empty() ? 0 : static_cast<int>(rs.pTilde[0].size());
  r.ay = rs.qTilde.empty() ? 0 : static_cast<int>(rs.qTilde[0].size());
  r.bound = kCommutatorConstant / std::sqrt(static_cast<double>(n - 1));
  const WeightProfileCheck w = check_weight_profile(rs.weights, n);
  r.instanceBound = 2.0 * w.sumPQ + 2.0 * std::sqrt(w.sumP2) + 2.0 * std::sqrt(w.sumQ2);

  std::vector<DenseMatrix> ps, qs;
  for (const auto& povm : rs.pTilde) ps.insert(ps.end(), povm.begin(), povm.end());
  for (const auto& povm : rs.qTilde) qs.insert(qs.end(), povm.begin(), povm.end());
  const std::size_t np = ps.size(), nq = qs.size();
  ps.insert(ps.end(), rs.pGarbage.begin(), rs.pGarbage.end());
  qs.insert(qs.end(), rs.qGarbage.begin(), rs.qGarbage.end());
  const Eigen::MatrixXd t = commutator_norm_table(ps, qs);
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      const bool gi = static_cast<std::size_t>(i) >= np, gj = static_cast<std::size_t>(j) >= nq;
      double& slot = gi ? (gj ? r.maxGarbageBoth : r.maxGarbageP) : (gj ? r.maxGarbageQ : r.maxCommutator);
      slot = std::max(slot, t(i, j));
    }
  r.scaled = r.maxCommutator * std::sqrt(static_cast<double>(n - 1));
  return r;
}

std::vector<StudyRow> study_convergence(const Game& g, const std::vector<int>& levels, const StudyOptions& opts) {
  std::vector<StudyRow> rows;
  for (int n : levels) {
    StudyRow row;
    row.level = n;
    try {
      if (n < 1) throw InputError(fmt::format("level {} must be at least 1", n));
      const WordIndex wi(g, n, opts.wordCap);
      const MomentProblem p = build_level(g, wi);
      const std::vector<int> fa(sz(g.qx), 0), fb(sz(g.qy), 0);
      SolveOptions so;
      so.tol = opts.tol;
      so.referencePoint = [&wi, &fa, &fb](int u, int t) { return deterministic_moment(wi, fa, fb, u, t); };
      const SdpSolution sol = solve(p, so);
      row.sdpValue = sol.optimum;
      if (n >= 2) {
        const GramSolution gs = extract_gram(sol, kRoundingGramClamp);
        const ProjectorFamily pf = build_projectors(g, gs);
        const IdentityReport ir = verify_identities(pf, gs);
        const RoundedStrategy rs = round(pf, gs);
        const ValueReport vr = verify_value(g, rs, sol);
        const CommutatorBoundReport cr = verify_commutators(rs);
        row.roundedValue = vr.value;
        row.maxCommutator = cr.maxCommutator;
        row.maxGarbageCommutator = cr.max_garbage();
        row.identityResidualMax = ir.max();
      }
      row.status = "ok";
    } catch (const SizeError&) {
      row.status = "size-cap";
    } catch (const InputError&) {
      row.status = "input-error";
    } catch (const SolverError&) {
      row.status = "solver-error";
    } catch (const VerificationError&) {
      row.status = "verification-error";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string study_csv(const std::vector<StudyRow>& rows) {
  std::string out = "N,sdpValue,roundedValue,maxCommutator,maxGarbageCommutator,identityResidualMax,status\n";
  auto cell = [](const std::optional<double>& v) { return v ? fmt::format("{:.9g}", *v) : std::string(); };
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.level, cell(r.sdpValue), cell(r.roundedValue), cell(r.maxCommutator),
                       cell(r.maxGarbageCommutator), cell(r.identityResidualMax), r.status);
  }
  return out;
}

std::string serialize_rounded(const RoundedStrategy& rs) {
  Json manifest;
  manifest["level"] = rs.level;
  manifest["dim"] = rs.dim;
  manifest["weights"] = {{"p", rs.weights.p}, {"q", rs.weights.q}};
  manifest["minEigenvalue"] = rs.minEigenvalue;
  Json blocks = Json::array();
  std::vector<const DenseMatrix*> mats;
  auto add = [&](const std::string& label, const DenseMatrix& m) {
    blocks.push_back(label);
    mats.push_back(&m);
  };
  for (std::size_t x = 0; x < rs.pTilde.size(); ++x) {
    for (std::size_t a = 0; a < rs.pTilde[x].size(); ++a) add(fmt::format("P {} {}", x, a), rs.pTilde[x][a]);
    add(fmt::format("P {} garbage", x), rs.pGarbage[x]);
  }
  for (std::size_t y = 0; y < rs.qTilde.size(); ++y) {
    for (std::size_t b = 0; b < rs.qTilde[y].size(); ++b) add(fmt::format("Q {} {}", y, b), rs.qTilde[y][b]);
    add(fmt::format("Q {} garbage", y), rs.qGarbage[y]);
  }
  add("rho", rs.rho);
  manifest["blocks"] = blocks;

  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "qcsdp-rounded 1\n{}\n", manifest.dump());
  for (std::size_t k = 0; k < mats.size(); ++k) {
    fmt::format_to(out, "block {}\n", blocks[k].get<std::string>());
    const DenseMatrix& m = *mats[k];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        fmt::format_to(out, "{}{:.17g} {:.17g}", j ? " " : "", m(i, j).real(), m(i, j).imag());
      fmt::format_to(out, "\n");
    }
  }
  fmt::format_to(out, "end\n");
  return fmt::to_string(buf);
}

RoundedStrategy parse_rounded(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "qcsdp-rounded 1") throw InputError("strategy file: bad header");
  if (!std::getline(in, line)) throw InputError("strategy file: missing manifest");
  Json manifest;
  try {
    manifest = Json::parse(line);
  } catch (const Json::exception& e) {
    throw InputError(fmt::format("strategy file: invalid manifest ({})", e.what()));
  }
  RoundedStrategy rs;
  try {
    rs.level = manifest.at("level").get<int>();
    rs.dim = manifest.at("dim").get<int>();
    rs.weights.p = manifest.at("weights").at("p").get<std::vector<double>>();
    rs.weights.q = manifest.at("weights").at("q").get<std::vector<double>>();
    rs.minEigenvalue = manifest.at("minEigenvalue").get<double>();
  } catch (const Json::exception& e) {
    throw InputError(fmt::format("strategy file: manifest field missing ({})", e.what()));
  }
  if (rs.dim < 1) throw InputError("strategy file: bad dim");
  for (const auto& label : manifest.at("blocks")) {
    std::string tag;
    std::getline(in, tag);
    if (tag != "block " + label.get<std::string>()) throw InputError(fmt::format("strategy file: expected block \"{}\"", label.get<std::string>()));
    DenseMatrix m(rs.dim, rs.dim);
    for (Eigen::Index i = 0; i < rs.dim; ++i)
      for (Eigen::Index j = 0; j < rs.dim; ++j) {
        double re, im;
        if (!(in >> re >> im)) throw InputError(fmt::format("strategy file: block \"{}\" truncated", label.get<std::string>()));
        m(i, j) = Complex(re, im);
      }
    std::getline(in, line);
    std::istringstream ls(label.get<std::string>());
    std::string kind, q, a;
    ls >> kind >> q >> a;
    if (kind == "rho") {
      rs.rho = std::move(m);
      continue;
    }
    auto& fam = kind == "P" ? rs.pTilde : rs.qTilde;
    auto& garb = kind == "P" ? rs.pGarbage : rs.qGarbage;
    const auto qi = static_cast<std::size_t>(std::stoul(q));
    if (fam.size() <= qi) fam.resize(qi + 1);
    if (garb.size() <= qi) garb.resize(qi + 1);
    if (a == "garbage") {
      garb[qi] = std::move(m);
    } else {
      fam[qi].push_back(std::move(m));
    }
  }
  std::getline(in, line);
  if (line != "end") throw InputError("strategy file: missing end marker");
  return rs;
}

}  // namespace qcsdp
