#include "qcsdp/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "qcsdp/errors.hpp"
#include "qcsdp/linalg.hpp"
#include "qcsdp/rng.hpp"

namespace qcsdp {

namespace {

constexpr double kDriftTol = 1e-6;
constexpr int kEnumerationHardLimit = 24;

bool clause_satisfied(const Clause& cl, std::uint64_t bits) {
  const unsigned idx = static_cast<unsigned>(((bits >> cl.vars[0]) & 1U) << 2 | ((bits >> cl.vars[1]) & 1U) << 1 |
                                             ((bits >> cl.vars[2]) & 1U));
  return ((cl.accept >> idx) & 1U) != 0;
}

std::uint64_t to_bits(const std::vector<int>& z) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i]) bits |= std::uint64_t{1} << i;
  }
  return bits;
}

}  // namespace

MarginalPovm marginals(const OracleGame& og, const Strategy& s) {
  const int n = og.nvars;
  check_strategy(og.game, s);
  if (og.game.ay != 4 || static_cast<int>(og.pairs.size()) != og.game.qy) {
    throw InputError("marginals: game is not an oracularized game (second prover must answer pairs with 2 bits)");
  }
  std::map<std::pair<int, int>, int> pairIndex;
  for (std::size_t y = 0; y < og.pairs.size(); ++y) pairIndex[og.pairs[y]] = static_cast<int>(y);

  const int d = s.dim;
  MarginalPovm m;
  m.c.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& ci = m.c[static_cast<std::size_t>(i)];
    ci[0] = DenseMatrix::Zero(d, d);
    ci[1] = DenseMatrix::Zero(d, d);
    for (int j = 0; j < n; ++j) {
      auto it = pairIndex.find({std::min(i, j), std::max(i, j)});
      if (it == pairIndex.end()) {
        throw InputError(fmt::format("marginals: pair ({}, {}) missing from the second prover's question set",
                                     std::min(i, j), std::max(i, j)));
      }
      const auto& povm = s.povmB[static_cast<std::size_t>(it->second)];
      const bool first = (i == it->first.first);
      for (int b = 0; b < 4; ++b) {
        const int c = first ? (b >> 1) : (b & 1);
        ci[static_cast<std::size_t>(c)] += povm[static_cast<std::size_t>(b)];
      }
    }
    ci[0] /= static_cast<double>(n);
    ci[1] /= static_cast<double>(n);
  }
  return m;
}

AssignmentSampler::AssignmentSampler(const MarginalPovm& m, const DenseMatrix& rho, std::uint64_t seed) : seed_(seed) {
  const Eigen::Index d = rho.rows();
  if (rho.cols() != d || d == 0) throw InputError("AssignmentSampler: rho must be square and nonempty");
  for (std::size_t i = 0; i < m.c.size(); ++i) {
    for (int c = 0; c < 2; ++c) {
      if (m.c[i][static_cast<std::size_t>(c)].rows() != d) {
        throw InputError(fmt::format("AssignmentSampler: C_{}^{} has dimension {}, rho has {}", i, c,
                                     m.c[i][static_cast<std::size_t>(c)].rows(), d));
      }
    }
    roots_.push_back({psd_sqrt(m.c[i][0]), psd_sqrt(m.c[i][1])});
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (rho + rho.adjoint()));
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0)) throw InputError("AssignmentSampler: rho has no positive eigenvalue");
  double total = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double lam = es.eigenvalues()(k);
    if (lam > 1e-14 * top) total += lam;
  }
  for (Eigen::Index k = d - 1; k >= 0; --k) {
    const double lam = es.eigenvalues()(k);
    if (lam <= 1e-14 * top) continue;
    weights_.push_back(lam / total);
    components_.push_back(std::sqrt(lam / total) * es.eigenvectors().col(k));
  }
}

std::vector<int> AssignmentSampler::sample(std::uint64_t k) const {
  CounterRng rng(seed_, k);
  double u = rng.uniform();
  std::size_t comp = 0;
  while (comp + 1 < weights_.size() && u >= weights_[comp]) u -= weights_[comp++];
  Vector psi = components_[comp].normalized();
  std::vector<int> z(roots_.size());
  for (std::size_t i = 0; i < roots_.size(); ++i) {
    Vector v0 = roots_[i][0] * psi;
    Vector v1 = roots_[i][1] * psi;
    const double p0 = v0.squaredNorm();
    const double p1 = v1.squaredNorm();
    if (std::abs(p0 + p1 - 1.0) > kDriftTol) {
      throw VerificationError(fmt::format(
          "sample_assignment: outcome probabilities of variable {} sum to {:.12g} (draw {}, prefix length {})", i,
          p0 + p1, k, i));
    }
    const int c = rng.uniform() * (p0 + p1) < p0 ? 0 : 1;
    z[i] = c;
    psi = (c == 0 ? v0 : v1) / std::sqrt(c == 0 ? p0 : p1);
  }
  return z;
}

std::vector<double> AssignmentSampler::branch_probabilities() const {
  const int n = nvars();
  if (n > kEnumerationHardLimit) throw SizeError(fmt::format("branch_probabilities: {} variables exceed {}", n, kEnumerationHardLimit));
  std::vector<double> probs(std::size_t{1} << n, 0.0);
  drift_ = 0.0;
  // Depth-first over prefixes; stack[i] holds the unnormalized state after i outcomes.
  std::vector<Vector> stack(static_cast<std::size_t>(n) + 1);
  for (const auto& comp : components_) {
    stack[0] = comp;
    std::uint64_t bits = 0;
    int depth = 0;
    std::vector<int> next(static_cast<std::size_t>(n) + 1, 0);
    while (depth >= 0) {
      if (depth == n) {
        probs[bits] += stack[static_cast<std::size_t>(n)].squaredNorm();
        --depth;
        continue;
      }
      const auto sd = static_cast<std::size_t>(depth);
      const int c = next[sd];
      if (c == 2) {
        next[sd] = 0;
        --depth;
        continue;
      }
      if (c == 0) {
        const double w = stack[sd].squaredNorm();
        if (w > 1e-300) {
          const double s = (roots_[sd][0] * stack[sd]).squaredNorm() + (roots_[sd][1] * stack[sd]).squaredNorm();
          drift_ = std::max(drift_, std::abs(s - w) / w);
        }
      }
      next[sd] = c + 1;
      stack[sd + 1] = roots_[sd][static_cast<std::size_t>(c)] * stack[sd];
      if (c) bits |= std::uint64_t{1} << depth;
      else bits &= ~(std::uint64_t{1} << depth);
      ++depth;
    }
  }
  return probs;
}

std::vector<int> sample_assignment(const AssignmentSampler& as, std::uint64_t k) { return as.sample(k); }

double satisfied_weight(const CspInstance& csp, std::uint64_t bits) {
  double sat = 0.0;
  double total = 0.0;
  for (const auto& cl : csp.clauses) {
    total += cl.weight;
    if (clause_satisfied(cl, bits)) sat += cl.weight;
  }
  return total > 0.0 ? sat / total : 0.0;
}

double satisfied_weight(const CspInstance& csp, const std::vector<int>& z) {
  if (static_cast<int>(z.size()) != csp.nvars) throw InputError("satisfied_weight: assignment length differs from nvars");
  return satisfied_weight(csp, to_bits(z));
}

std::uint64_t best_assignment(const CspInstance& csp) {
  if (csp.nvars > kEnumerationHardLimit) throw SizeError(fmt::format("best_assignment: {} variables exceed {}", csp.nvars, kEnumerationHardLimit));
  std::uint64_t best = 0;
  double bestW = -1.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << csp.nvars); ++bits) {
    const double w = satisfied_weight(csp, bits);
    if (w > bestW + 1e-15) {
      bestW = w;
      best = bits;
    }
  }
  return best;
}

std::vector<double> sampled_satisfaction(const AssignmentSampler& as, const CspInstance& csp, int samples) {
  std::vector<double> out(static_cast<std::size_t>(std::max(samples, 0)));
  std::string failure;
#pragma omp parallel for schedule(dynamic, 64)
  for (int k = 0; k < samples; ++k) {
    try {
      out[static_cast<std::size_t>(k)] = satisfied_weight(csp, to_bits(as.sample(static_cast<std::uint64_t>(k))));
    } catch (const Error& e) {
#pragma omp critical(qcsdp_sampling_failure)
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw VerificationError(failure);
  return out;
}

std::vector<double> sampled_satisfaction_serial(const AssignmentSampler& as, const CspInstance& csp, int samples) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(samples, 0)));
  for (int k = 0; k < samples; ++k) out.push_back(satisfied_weight(csp, to_bits(as.sample(static_cast<std::uint64_t>(k)))));
  return out;
}

SoundnessReport soundness_check(const CspInstance& csp, const Strategy& s, const SoundnessOptions& opts) {
  if (opts.samples < 1) throw InputError("soundness_check: samples must be positive");
  if (opts.samples > kMaxSamples) {
    throw SizeError(fmt::format("soundness_check: {} samples exceed the budget of {}", opts.samples, kMaxSamples));
  }
  const OracleGame og = oracularize(csp);
  if (static_cast<int>(s.povmA.size()) != og.game.qx || static_cast<int>(s.povmB.size()) != og.game.qy) {
    throw InputError(fmt::format("soundness_check: strategy has {}x{} questions, the oracularized game has {}x{}",
                                 s.povmA.size(), s.povmB.size(), og.game.qx, og.game.qy));
  }
  SoundnessReport r;
  r.nvars = csp.nvars;
  r.gameValue = strategy_value(og.game, s);
  r.eps = 1.0 - r.gameValue;
  r.deltaMax = commutator_report(s).deltaMax;
  r.samples = opts.samples;
  r.epsBudget = opts.epsBudget;

  const AssignmentSampler as(marginals(og, s), s.rho, opts.seed);
  const auto w = opts.parallel ? sampled_satisfaction(as, csp, opts.samples)
                               : sampled_satisfaction_serial(as, csp, opts.samples);
  double sum = 0.0;
  for (double v : w) sum += v;
  r.satProb = sum / opts.samples;
  double var = 0.0;
  for (double v : w) var += (v - r.satProb) * (v - r.satProb);
  r.satProbStdError = opts.samples > 1 ? std::sqrt(var / (opts.samples - 1) / opts.samples) : 0.0;

  if (csp.nvars <= kExactEnumerationLimit) {
    const auto probs = as.branch_probabilities();
    double exact = 0.0;
    for (std::uint64_t bits = 0; bits < probs.size(); ++bits) {
      r.branchSum += probs[bits];
      exact += probs[bits] * satisfied_weight(csp, bits);
    }
    r.satProbExact = exact;
  }
  r.withinBudget = r.satProb >= 1.0 - opts.epsBudget;
  return r;
}

std::string soundness_csv(const std::vector<SoundnessReport>& rows) {
  std::string out = "nvars,gameValue,eps,deltaMax,samples,satProb,satProbExact\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{:.9g},{:.9g},{:.9g},{},{:.9g},{}\n", r.nvars, r.gameValue, r.eps, r.deltaMax, r.samples,
                       r.satProb, r.satProbExact ? fmt::format("{:.9g}", *r.satProbExact) : std::string());
  }
  return out;
}

namespace {

std::vector<std::vector<double>> position_marginals(const CspInstance& csp, const std::vector<double>& w) {
  std::vector<std::vector<double>> m(3, std::vector<double>(static_cast<std::size_t>(csp.nvars), 0.0));
  double total = 0.0;
  for (double x : w) total += x;
  for (std::size_t c = 0; c < csp.clauses.size(); ++c) {
    for (int k = 0; k < 3; ++k) {
      m[static_cast<std::size_t>(k)][static_cast<std::size_t>(csp.clauses[c].vars[static_cast<std::size_t>(k)])] +=
          w[c] / total;
    }
  }
  return m;
}

double deviation_of(const CspInstance& csp, const std::vector<double>& w) {
  const double target = 1.0 / csp.nvars;
  double dev = 0.0;
  for (const auto& row : position_marginals(csp, w)) {
    for (double v : row) dev = std::max(dev, std::abs(v - target));
  }
  return dev;
}

}  // namespace

double marginal_deviation(const CspInstance& csp) {
  std::vector<double> w;
  for (const auto& cl : csp.clauses) w.push_back(cl.weight);
  return deviation_of(csp, w);
}

ReweightResult reweight_uniform_marginals(const CspInstance& csp, int maxIterations, double tol) {
  if (auto v = validate_csp(csp); !v.empty()) throw InputError("invalid csp: " + v.front());
  const double target = 1.0 / csp.nvars;
  std::vector<double> w;
  for (const auto& cl : csp.clauses) w.push_back(cl.weight);
  ReweightResult res;
  res.deviationBefore = deviation_of(csp, w);
  std::vector<double> best = w;
  double bestDev = res.deviationBefore;
  for (int it = 0; it < maxIterations && bestDev > tol; ++it) {
    for (int k = 0; k < 3; ++k) {
      const auto m = position_marginals(csp, w);
      for (std::size_t c = 0; c < w.size(); ++c) {
        const double mv = m[static_cast<std::size_t>(k)][static_cast<std::size_t>(csp.clauses[c].vars[static_cast<std::size_t>(k)])];
        if (mv > 0.0) w[c] *= target / mv;
      }
      double total = 0.0;
      for (double x : w) total += x;
      for (double& x : w) x /= total;
    }
    res.iterations = it + 1;
    const double dev = deviation_of(csp, w);
    if (dev < bestDev) {
      bestDev = dev;
      best = w;
    }
  }
  res.csp = csp;
  for (std::size_t c = 0; c < best.size(); ++c) res.csp.clauses[c].weight = best[c];
  res.deviationAfter = bestDev;
  return res;
}

}  // namespace qcsdp
