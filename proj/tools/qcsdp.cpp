// qcsdp: solve, round, study, extract and fixture commands.
// Exit codes: 0 success, 2 input error, 3 solver failure, 4 verification failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qcsdp/errors.hpp"
#include "qcsdp/extraction.hpp"
#include "qcsdp/game_io.hpp"
#include "qcsdp/rounding.hpp"
#include "qcsdp/solver.hpp"
#include "qcsdp/suites.hpp"

namespace fs = std::filesystem;
using namespace qcsdp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerify = 4;

struct RunConfig {
  std::string gamePath;
  std::string builtin;
  std::string cspPath;
  int level = 1;
  std::string levels;
  double tol = 1e-8;
  double verifyTol = kIdentityTol;
  std::string weightsPath;
  std::uint64_t seed = 0;
  std::string outDir = ".";
  bool strict = false;
  std::string solutionPath;
  std::string strategy = "honest";
  int samples = 10000;
  double epsBudget = 0.1;
  bool reweight = false;
  int extractLevel = 2;
};

Game load_input_game(const RunConfig& cfg) {
  if (!cfg.gamePath.empty() && !cfg.builtin.empty()) throw InputError("give either --game or --builtin, not both");
  if (!cfg.gamePath.empty()) return load_game(cfg.gamePath);
  if (cfg.builtin == "chsh") return chsh();
  if (cfg.builtin == "trivial") return trivial_game(true);
  if (cfg.builtin.rfind("random:", 0) == 0) return random_binary_game(std::stoull(cfg.builtin.substr(7)));
  if (cfg.builtin.empty()) throw InputError("no game: give --game PATH or --builtin chsh|trivial|random:SEED");
  throw InputError(fmt::format("unknown builtin game \"{}\"", cfg.builtin));
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  fs::create_directories(cfg.outDir, ec);
  if (ec) throw InputError(fmt::format("cannot create output directory {}: {}", cfg.outDir, ec.message()));
  return (fs::path(cfg.outDir) / name).string();
}

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) throw InputError("empty levels list");
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const int a = std::stoi(text.substr(0, dots));
    const int b = std::stoi(text.substr(dots + 2));
    if (a > b) throw InputError(fmt::format("levels range {} is empty", text));
    for (int n = a; n <= b; ++n) out.push_back(n);
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (item.empty()) throw InputError(fmt::format("empty entry in levels list \"{}\"", text));
      out.push_back(std::stoi(item));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  for (int n : out)
    if (n < 1) throw InputError(fmt::format("level {} must be >= 1", n));
  return out;
}

const char* verdict(bool ok) { return ok ? "OK" : "FAIL"; }

int cmd_solve(const RunConfig& cfg) {
  const Game g = load_input_game(cfg);
  if (cfg.level < 1) throw InputError("level must be >= 1");
  const SdpSolution sol = solve_level(g, cfg.level, cfg.tol);
  write_file_atomic(out_path(cfg, fmt::format("solution-{}.txt", cfg.level)), serialize_solution(sol));
  fmt::print("level {} optimum {:.6f} gap {:.3g}\n", cfg.level, sol.optimum, sol.gapEstimate);
  return kExitOk;
}

int cmd_round(const RunConfig& cfg) {
  const Game g = load_input_game(cfg);
  if (cfg.level < 2) {
    throw InputError(fmt::format("level {} has no interior weight levels (p_0 = p_N = 0 leaves nothing to weight); rounding needs level >= 2",
                                 cfg.level));
  }
  std::optional<RoundingWeights> weights;
  if (!cfg.weightsPath.empty()) {
    weights = parse_weights(read_file(cfg.weightsPath));
    validate_weights(*weights, cfg.level);
    const WeightProfileCheck wc = check_weight_profile(*weights, cfg.level);
    if (!wc.holds) {
      throw InputError(fmt::format("weights violate max(sum p^2, sum q^2, sum p q) <= {}/N: {:.6g} > {:.6g}", kWeightProfileConstant,
                                   std::max({wc.sumP2, wc.sumQ2, wc.sumPQ}), wc.bound));
    }
  }
  SdpSolution sol;
  if (!cfg.solutionPath.empty()) {
    sol = parse_solution(read_file(cfg.solutionPath));
    if (sol.gameHash != game_hash(g)) throw InputError("solution file was produced for a different game");
    if (sol.level != cfg.level) throw InputError(fmt::format("solution file is level {}, requested level {}", sol.level, cfg.level));
  } else {
    sol = solve_level(g, cfg.level, cfg.tol);
  }
  const GramSolution gs = extract_gram(sol, kRoundingGramClamp);
  const ProjectorFamily pf = build_projectors(g, gs);
  const IdentityReport ir = verify_identities(pf, gs);
  const RoundedStrategy rs = round(pf, gs, weights);
  const ValueReport vr = verify_value(g, rs, sol);
  const CommutatorBoundReport cr = verify_commutators(rs);
  write_file_atomic(out_path(cfg, fmt::format("rounded-{}.txt", cfg.level)), serialize_rounded(rs));

  const bool identOk = ir.ok(cfg.verifyTol);
  const bool commOk = weights ? cr.maxCommutator <= cr.instanceBound + 1e-9 : cr.holds();
  const bool garbOk = weights ? true : cr.garbage_holds();
  fmt::print("level {} optimum {:.9f} rounded {:.9f}\n", cfg.level, sol.optimum, vr.value);
  fmt::print("value match {:.3g} {}; maxComm {:.6g}; bound C0/sqrt(N-1) {:.6g} {}\n", vr.deviation, verdict(vr.deviation <= kValueTol),
             cr.maxCommutator, cr.bound, verdict(commOk));
  fmt::print("garbage probability {:.3g} {}; garbage commutators P {:.6g} Q {:.6g} both {:.6g} {}\n", vr.maxGarbageProbability,
             verdict(vr.maxGarbageProbability <= kGarbageProbTol), cr.maxGarbageP, cr.maxGarbageQ, cr.maxGarbageBoth, verdict(garbOk));
  fmt::print("identity residuals vector-sum {:.3g} projector-action {:.3g} nesting {:.3g} shape {:.3g} cancellation {:.3g} one-shift {:.3g} {}\n",
             ir.vectorSum, ir.projectorAction, ir.levelNesting, ir.projectorShape, ir.cancellation, ir.oneShift, verdict(identOk));
  const bool all = identOk && vr.ok() && commOk && garbOk;
  if (cfg.strict && !all) {
    fmt::print(stderr, "strict verification failed\n");
    return kExitVerify;
  }
  return kExitOk;
}

int cmd_study(const RunConfig& cfg) {
  const Game g = load_input_game(cfg);
  const std::vector<int> levels = parse_levels(cfg.levels);
  StudyOptions so;
  so.tol = cfg.tol;
  const std::string csv = study_csv(study_convergence(g, levels, so));
  write_file_atomic(out_path(cfg, "study.csv"), csv);
  fmt::print("{}", csv);
  return kExitOk;
}

Strategy extraction_strategy(const RunConfig& cfg, const CspInstance& csp) {
  const OracleGame og = oracularize(csp);
  if (cfg.strategy == "honest") {
    const std::uint64_t bits = best_assignment(csp);
    std::vector<int> z(static_cast<std::size_t>(csp.nvars));
    for (int i = 0; i < csp.nvars; ++i) z[static_cast<std::size_t>(i)] = static_cast<int>((bits >> i) & 1U);
    return honest_strategy(og, z);
  }
  if (cfg.strategy == "rounded") {
    if (cfg.extractLevel < 2) throw InputError("rounded strategies need level >= 2");
    const SdpSolution sol = solve_level(og.game, cfg.extractLevel, cfg.tol);
    const GramSolution gs = extract_gram(sol, kRoundingGramClamp);
    return to_strategy(round(build_projectors(og.game, gs), gs), GarbagePolicy::MergeIntoFirst);
  }
  return to_strategy(parse_rounded(read_file(cfg.strategy)), GarbagePolicy::MergeIntoFirst);
}

int cmd_extract(const RunConfig& cfg) {
  if (cfg.cspPath.empty()) throw InputError("extract needs --csp PATH");
  CspInstance csp = load_csp(cfg.cspPath);
  if (cfg.reweight) {
    const ReweightResult rw = reweight_uniform_marginals(csp);
    fmt::print(stderr, "reweighted clauses: marginal deviation {:.3g} -> {:.3g}\n", rw.deviationBefore, rw.deviationAfter);
    csp = rw.csp;
  }
  const Strategy s = extraction_strategy(cfg, csp);
  SoundnessOptions so;
  so.samples = cfg.samples;
  so.seed = cfg.seed;
  so.epsBudget = cfg.epsBudget;
  const SoundnessReport r = soundness_check(csp, s, so);
  const std::string csv = soundness_csv({r});
  write_file_atomic(out_path(cfg, "extract.csv"), csv);
  fmt::print("{}", csv);
  fmt::print(stderr, "satProb {:.9g} +- {:.3g}; within budget 1 - {:g}: {}\n", r.satProb, r.satProbStdError, r.epsBudget,
             r.withinBudget ? "yes" : "no");
  return kExitOk;
}

int cmd_fixtures(const RunConfig& cfg) {
  std::vector<int> dims;
  for (int d = 2; d <= 256; d *= 2) dims.push_back(d);
  const auto rows = voiculescu_table(dims);
  std::string csv = "d,commutatorNorm,twoSinPiOverD,quadratureMax\n";
  for (const auto& r : rows) csv += fmt::format("{},{:.9g},{:.9g},{:.9g}\n", r.d, r.norm, r.expected, r.quadratureMax);
  fmt::print("{}", csv);
  const std::vector<SuiteResult> suites = {voiculescu_suite(rows), com_power_suite(cfg.seed), sq_bound_suite(cfg.seed)};
  bool ok = true;
  std::string report;
  for (const auto& s : suites) {
    ok = ok && s.passed();
    report += fmt::format("suite {} trials {} failures {} worst {:.3g} {}\n", s.name, s.trials, s.failures, s.worstRatio, verdict(s.passed()));
    if (!s.passed()) report += fmt::format("  first failure: {}\n", s.firstFailure);
  }
  write_file_atomic(out_path(cfg, "voiculescu.csv"), csv);
  write_file_atomic(out_path(cfg, "fixtures.txt"), report);
  fmt::print("{}", report);
  return ok ? kExitOk : kExitVerify;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kExitInput;
  } catch (const SolverError& e) {
    fmt::print(stderr, "solver failure: {}\n", e.what());
    return kExitSolver;
  } catch (const VerificationError& e) {
    fmt::print(stderr, "verification failure: {}\n", e.what());
    return kExitVerify;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kExitInput;
  } catch (const std::out_of_range& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    fmt::print(stderr, "solver failure: {}\n", e.what());
    return kExitSolver;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QC SDP hierarchy solver, rounding and extraction"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_game = [&](CLI::App* c) {
    auto* g = c->add_option("--game", cfg.gamePath, "game file (JSON)");
    c->add_option("--builtin", cfg.builtin, "chsh | trivial | random:SEED")->excludes(g);
  };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--tol", cfg.tol, "solver tolerance")->check(CLI::Range(1e-10, 1e-4));
    c->add_option("--out", cfg.outDir, "output directory");
    c->add_option("--seed", cfg.seed, "RNG seed");
  };

  auto* solve = app.add_subcommand("solve", "solve one level and write the solution");
  add_game(solve);
  add_common(solve);
  solve->add_option("--level", cfg.level, "hierarchy level")->check(CLI::Range(1, 64));

  auto* rnd = app.add_subcommand("round", "round a level-N solution and verify it");
  add_game(rnd);
  add_common(rnd);
  rnd->add_option("--level", cfg.level, "hierarchy level (>= 2)");
  rnd->add_option("--solution", cfg.solutionPath, "solution file from solve (solved in-process if absent)");
  rnd->add_option("--weights", cfg.weightsPath, "weights file {\"p\": [...], \"q\": [...]}");
  rnd->add_option("--verify-tol", cfg.verifyTol, "identity residual tolerance")->check(CLI::Range(1e-12, 1e-2));
  rnd->add_flag("--strict", cfg.strict, "exit 4 when any verification fails");

  auto* study = app.add_subcommand("study", "sweep levels and write study.csv");
  add_game(study);
  add_common(study);
  study->add_option("--levels", cfg.levels, "a..b or a,b,c")->required();

  auto* ext = app.add_subcommand("extract", "sample assignments from a strategy for a csp's oracularized game");
  add_common(ext);
  ext->add_option("--csp", cfg.cspPath, "csp file (JSON)")->required();
  ext->add_option("--strategy", cfg.strategy, "honest | rounded | PATH to a rounded-strategy file");
  ext->add_option("--level", cfg.extractLevel, "level for --strategy rounded");
  ext->add_option("--samples", cfg.samples, "Monte-Carlo samples");
  ext->add_option("--budget", cfg.epsBudget, "report satProb >= 1 - budget");
  ext->add_flag("--reweight", cfg.reweight, "reweight clauses toward uniform marginals first");

  auto* fix = app.add_subcommand("fixtures", "Voiculescu table and randomized inequality suites");
  add_common(fix);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  if (solve->parsed()) return guarded([&] { return cmd_solve(cfg); });
  if (rnd->parsed()) return guarded([&] { return cmd_round(cfg); });
  if (study->parsed()) return guarded([&] { return cmd_study(cfg); });
  if (ext->parsed()) return guarded([&] { return cmd_extract(cfg); });
  return guarded([&] { return cmd_fixtures(cfg); });
}
