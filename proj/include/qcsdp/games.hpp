#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qcsdp/linalg.hpp"

namespace qcsdp {

/// Two-prover one-round game. mu is indexed x * qy + y; the predicate is
/// indexed ((x * qy + y) * ax + a) * ay + b.
struct Game {
  int qx = 0;
  int qy = 0;
  int ax = 0;
  int ay = 0;
  std::vector<double> mu;
  std::vector<std::uint8_t> predicate;

  double prob(int x, int y) const { return mu[static_cast<std::size_t>(x * qy + y)]; }
  bool accepts(int x, int y, int a, int b) const {
    return predicate[static_cast<std::size_t>(((x * qy + y) * ax + a) * ay + b)] != 0;
  }
  std::size_t predicate_size() const {
    return static_cast<std::size_t>(qx) * static_cast<std::size_t>(qy) * static_cast<std::size_t>(ax) *
           static_cast<std::size_t>(ay);
  }
};

/// POVMs for both provers on a common space plus a shared state.
/// povmA[x][a], povmB[y][b].
struct Strategy {
  int dim = 0;
  std::vector<std::vector<DenseMatrix>> povmA;
  std::vector<std::vector<DenseMatrix>> povmB;
  DenseMatrix rho;
};

struct Clause {
  std::array<int, 3> vars{};
  // Bit (b1 << 2 | b2 << 1 | b3) is set when (b1, b2, b3) on vars (in the
  // listed order) satisfies the clause.
  std::uint8_t accept = 0;
  double weight = 0.0;
};

struct CspInstance {
  int nvars = 0;
  std::vector<Clause> clauses;
};

/// Result of oracularize: the game plus the labels of its questions.
/// First-prover answer bit k (big-endian) belongs to triples[x][k]; second-
/// prover answer bit k belongs to pairs[y].first (k = 0) / .second (k = 1).
struct OracleGame {
  Game game;
  int nvars = 0;
  std::vector<std::array<int, 3>> triples;
  std::vector<std::uint8_t> tripleAccept;  // accept mask in sorted-variable bit order
  std::vector<std::pair<int, int>> pairs;
};

std::vector<std::string> validate_game(const Game& g);
std::vector<std::string> validate_csp(const CspInstance& csp);
/// Throws InputError naming the violation when the strategy does not match g.
void check_strategy(const Game& g, const Strategy& s, double tol = 1e-10);

Game chsh();
/// One question and one answer per prover; V(0,0,0,0) = accept.
Game trivial_game(bool accept = true);
/// Random binary game (2 questions, 2 answers each), uniform mu, each
/// predicate entry accepted with probability 1/2. Deterministic in the seed.
Game random_binary_game(std::uint64_t seed);

OracleGame oracularize(const CspInstance& csp);

// Brute-force guard for classical_value.
inline constexpr double kClassicalSearchLimit = 1e7;

/// Exact classical value. Enumerates first-prover strategies in parallel and
/// answers each with the best second-prover response.
double classical_value(const Game& g);
/// Plain enumeration of every deterministic pair; oracle for classical_value.
double classical_value_serial(const Game& g);

/// sum mu V Tr(E1 E2 rho) for the ordering A then B (first) and B then A (second).
std::pair<double, double> strategy_value_orderings(const Game& g, const Strategy& s);
/// max over the two orderings of |value|.
double strategy_value(const Game& g, const Strategy& s);

struct CommutatorReport {
  double deltaMax = 0.0;
  // Row x * ax + a, column y * ay + b.
  Eigen::MatrixXd table;
};
CommutatorReport commutator_report(const Strategy& s);

/// Naimark dilation on H (x) C^ax (x) C^ay with every element projective.
Strategy dilate_to_projective(const Strategy& s);

/// d = 1 strategy answering fa[x] / fb[y].
Strategy deterministic_strategy(const Game& g, const std::vector<int>& fa, const std::vector<int>& fb);
/// Honest d = 1 strategy for an oracularized game from a variable assignment.
Strategy honest_strategy(const OracleGame& og, const std::vector<int>& assignment);
/// Optimal qubit strategy for CHSH: EPR pair, first-prover angles 0 and pi/4,
/// second-prover angles pi/8 and -pi/8.
Strategy tsirelson_strategy();

}  // namespace qcsdp
