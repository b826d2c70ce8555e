#include "qcsdp/game_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "qcsdp/errors.hpp"

namespace qcsdp {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(fmt::format("{}: not valid JSON ({})", what, e.what()));
  }
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw InputError(fmt::format("missing field \"{}\"", name));
  return j.at(name);
}

int count_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw InputError(fmt::format("field \"{}\" must be a positive integer", name));
  }
  return v.get<int>();
}

double parse_number(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        const double d = std::stod(s, &used);
        if (used == s.size()) return d;
      } else {
        const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        std::size_t u1 = 0, u2 = 0;
        const double n = std::stod(num, &u1);
        const double d = std::stod(den, &u2);
        if (u1 == num.size() && u2 == den.size() && d != 0.0) return n / d;
      }
    } catch (const std::exception&) {
    }
    throw InputError(fmt::format("field \"{}\": cannot parse \"{}\" as a number or num/den", where, s));
  }
  throw InputError(fmt::format("field \"{}\" must be a number or a \"num/den\" string", where));
}

}  // namespace

Game parse_game(const std::string& text) {
  const json j = parse_json(text, "game");
  Game g;
  g.qx = count_field(j, "qx");
  g.qy = count_field(j, "qy");
  g.ax = count_field(j, "ax");
  g.ay = count_field(j, "ay");
  const json& mu = field(j, "mu");
  if (!mu.is_array() || static_cast<int>(mu.size()) != g.qx) throw InputError(fmt::format("field \"mu\" must be a {}x{} array", g.qx, g.qy));
  g.mu.assign(static_cast<std::size_t>(g.qx * g.qy), 0.0);
  for (int x = 0; x < g.qx; ++x) {
    const json& row = mu[static_cast<std::size_t>(x)];
    if (!row.is_array() || static_cast<int>(row.size()) != g.qy) throw InputError(fmt::format("field \"mu\" row {} must have {} entries", x, g.qy));
    for (int y = 0; y < g.qy; ++y) g.mu[static_cast<std::size_t>(x * g.qy + y)] = parse_number(row[static_cast<std::size_t>(y)], fmt::format("mu[{}][{}]", x, y));
  }
  const json& acc = field(j, "accept");
  if (!acc.is_array()) throw InputError("field \"accept\" must be an array of [x,y,a,b]");
  g.predicate.assign(g.predicate_size(), 0);
  const int lim[4] = {g.qx, g.qy, g.ax, g.ay};
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const json& t = acc[k];
    if (!t.is_array() || t.size() != 4) throw InputError(fmt::format("field \"accept\" entry {} must be [x,y,a,b]", k));
    int v[4];
    for (std::size_t i = 0; i < 4; ++i) {
      if (!t[i].is_number_integer()) throw InputError(fmt::format("field \"accept\" entry {} has a non-integer", k));
      v[i] = t[i].get<int>();
      if (v[i] < 0 || v[i] >= lim[i]) throw InputError(fmt::format("field \"accept\" entry {} out of range", k));
    }
    g.predicate[static_cast<std::size_t>(((v[0] * g.qy + v[1]) * g.ax + v[2]) * g.ay + v[3])] = 1;
  }
  if (auto errs = validate_game(g); !errs.empty()) throw InputError("invalid game: " + errs.front());
  return g;
}

Game load_game(const std::string& path) { return parse_game(read_file(path)); }

std::string game_to_json(const Game& g) {
  json j;
  j["qx"] = g.qx;
  j["qy"] = g.qy;
  j["ax"] = g.ax;
  j["ay"] = g.ay;
  json mu = json::array();
  for (int x = 0; x < g.qx; ++x) {
    json row = json::array();
    for (int y = 0; y < g.qy; ++y) row.push_back(g.prob(x, y));
    mu.push_back(row);
  }
  j["mu"] = mu;
  json acc = json::array();
  for (int x = 0; x < g.qx; ++x)
    for (int y = 0; y < g.qy; ++y)
      for (int a = 0; a < g.ax; ++a)
        for (int b = 0; b < g.ay; ++b)
          if (g.accepts(x, y, a, b)) acc.push_back({x, y, a, b});
  j["accept"] = acc;
  return j.dump() + "\n";
}

CspInstance parse_csp(const std::string& text) {
  const json j = parse_json(text, "csp");
  CspInstance csp;
  csp.nvars = count_field(j, "nvars");
  const json& cls = field(j, "clauses");
  if (!cls.is_array() || cls.empty()) throw InputError("field \"clauses\" must be a non-empty array");
  for (std::size_t c = 0; c < cls.size(); ++c) {
    const json& cj = cls[c];
    Clause cl;
    const json& vars = field(cj, "vars");
    if (!vars.is_array() || vars.size() != 3) throw InputError(fmt::format("clauses[{}].vars must have 3 entries", c));
    for (std::size_t k = 0; k < 3; ++k) {
      if (!vars[k].is_number_integer()) throw InputError(fmt::format("clauses[{}].vars has a non-integer", c));
      cl.vars[k] = vars[k].get<int>();
    }
    const json& acc = field(cj, "accept");
    if (!acc.is_array()) throw InputError(fmt::format("clauses[{}].accept must be an array", c));
    for (const json& t : acc) {
      if (!t.is_array() || t.size() != 3) throw InputError(fmt::format("clauses[{}].accept entries must be 3 bits", c));
      int bits = 0;
      for (std::size_t k = 0; k < 3; ++k) {
        if (!t[k].is_number_integer() || (t[k].get<int>() != 0 && t[k].get<int>() != 1)) {
          throw InputError(fmt::format("clauses[{}].accept entries must be 0/1", c));
        }
        bits = bits << 1 | t[k].get<int>();
      }
      cl.accept = static_cast<std::uint8_t>(cl.accept | 1u << bits);
    }
    cl.weight = cj.contains("weight") ? parse_number(cj.at("weight"), fmt::format("clauses[{}].weight", c)) : 1.0 / static_cast<double>(cls.size());
    csp.clauses.push_back(cl);
  }
  if (auto errs = validate_csp(csp); !errs.empty()) throw InputError("invalid csp: " + errs.front());
  return csp;
}

CspInstance load_csp(const std::string& path) { return parse_csp(read_file(path)); }

std::string csp_to_json(const CspInstance& csp) {
  json j;
  j["nvars"] = csp.nvars;
  json cls = json::array();
  for (const auto& cl : csp.clauses) {
    json acc = json::array();
    for (int bits = 0; bits < 8; ++bits)
      if (cl.accept >> bits & 1) acc.push_back({bits >> 2 & 1, bits >> 1 & 1, bits & 1});
    cls.push_back({{"vars", {cl.vars[0], cl.vars[1], cl.vars[2]}}, {"accept", acc}, {"weight", cl.weight}});
  }
  j["clauses"] = cls;
  return j.dump() + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write {}", tmp));
    out << content;
    if (!out) throw InputError(fmt::format("write to {} failed", tmp));
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t game_hash(const Game& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 0x100000001b3ULL;
    }
  };
  const int dims[4] = {g.qx, g.qy, g.ax, g.ay};
  feed(dims, sizeof dims);
  feed(g.mu.data(), g.mu.size() * sizeof(double));
  feed(g.predicate.data(), g.predicate.size());
  return h;
}

}  // namespace qcsdp
