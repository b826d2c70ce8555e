#pragma once

#include <string>

#include "qcsdp/games.hpp"

namespace qcsdp {

// Game file: {"qx","qy","ax","ay","mu":[[...]],"accept":[[x,y,a,b],...]}.
// mu entries are numbers or "num/den" strings. Errors name the failing field.
Game parse_game(const std::string& text);
Game load_game(const std::string& path);
std::string game_to_json(const Game& g);

// CSP file: {"nvars","clauses":[{"vars":[i,j,k],"accept":[[b1,b2,b3],...],"weight":w}]}.
// A missing weight defaults to 1 / (number of clauses).
CspInstance parse_csp(const std::string& text);
CspInstance load_csp(const std::string& path);
std::string csp_to_json(const CspInstance& csp);

std::string read_file(const std::string& path);
// Writes to path.tmp and renames, so a failed run leaves no partial file.
void write_file_atomic(const std::string& path, const std::string& content);

// FNV-1a over the game's serialized form; stamps problem and solution files.
std::uint64_t game_hash(const Game& g);

}  // namespace qcsdp
