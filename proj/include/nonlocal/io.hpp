#ifndef NONLOCAL_IO_HPP
#define NONLOCAL_IO_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nonlocal/geometry.hpp"
#include "nonlocal/max_principle.hpp"

namespace nonlocal {

// ---------------------------------------------------------------------------
// Canonical number and JSON formatting
// ---------------------------------------------------------------------------

/// Fixed scientific formatting with 12 significant digits and a minimal
/// exponent: 1/3 -> "3.33333333333e-1". The golden-file contract.
inline std::string format_sci(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.11e", x);
  const std::string s(buf);
  const auto e = s.find('e');
  return s.substr(0, e) + "e" + std::to_string(std::stoi(s.substr(e + 1)));
}

namespace detail {

inline void canonical_dump_rec(const nlohmann::json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  const std::string pad1(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t k = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++k) {  // keys iterate sorted
        out += pad1 + nlohmann::json(it.key()).dump() + ": ";
        canonical_dump_rec(it.value(), out, depth + 1);
        if (k + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        out += pad1;
        canonical_dump_rec(j[k], out, depth + 1);
        if (k + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_sci(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

/// Deterministic serialization: sorted keys, two-space indent, every float
/// through format_sci. Identical trees give byte-identical output.
inline std::string canonical_dump(const nlohmann::json& j) {
  std::string out;
  detail::canonical_dump_rec(j, out, 0);
  out += "\n";
  return out;
}

/// Write the canonical serialization to `path`.
inline void emit_golden(const nlohmann::json& j, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("emit_golden: cannot open " + path);
  os << canonical_dump(j);
  if (!os) throw std::runtime_error("emit_golden: write failed for " + path);
}

// ---------------------------------------------------------------------------
// CSV tables
// ---------------------------------------------------------------------------

/// Lattice table with columns x1..xn,value,error_estimate ('.' decimal
/// separator, no locale).
inline void write_csv(std::ostream& os, const Lattice& lat, const std::vector<double>& value,
                      const std::vector<double>& error) {
  if (value.size() != lat.size() || error.size() != lat.size())
    throw std::invalid_argument("write_csv: column length must match the lattice");
  for (int a = 0; a < lat.dim; ++a) os << "x" << (a + 1) << ",";
  os << "value,error_estimate\n";
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const Point x = lat.point(f);
    for (int a = 0; a < lat.dim; ++a) os << format_sci(x[a]) << ",";
    os << format_sci(value[f]) << "," << format_sci(error[f]) << "\n";
  }
}

/// Per-jump audit log: path_id, t, from, to, accepted, rule.
template <typename JumpRecordT>
inline void write_jump_log(std::ostream& os, const std::vector<JumpRecordT>& log, const std::string& rule,
                           int dim) {
  os << "path_id,t,";
  for (int a = 0; a < dim; ++a) os << "from" << (a + 1) << ",";
  for (int a = 0; a < dim; ++a) os << "to" << (a + 1) << ",";
  os << "accepted,rule\n";
  for (const auto& r : log) {
    os << r.path_id << "," << format_sci(r.t) << ",";
    for (int a = 0; a < dim; ++a) os << format_sci(r.from[a]) << ",";
    for (int a = 0; a < dim; ++a) os << format_sci(r.to[a]) << ",";
    os << (r.accepted ? 1 : 0) << "," << rule << "\n";
  }
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline nlohmann::json point_json(const Point& x) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < x.dim; ++i) a.push_back(x[i]);
  return a;
}

inline nlohmann::json mp_report_json(const MPReport& rep) {
  nlohmann::json j;
  j["supersolution_min_residual"] = rep.supersolution_min_residual;
  j["residual_tolerance"] = rep.residual_tolerance;
  j["global_inf"] = rep.global_inf;
  j["inf_location"] = rep.inf_location ? point_json(*rep.inf_location) : nlohmann::json("far_field");
  j["interior_strict_margin"] = rep.interior_strict_margin;
  j["lsc_violations"] = rep.lsc_violations;
  j["verdict"] = to_string(rep.verdict);
  return j;
}

// ---------------------------------------------------------------------------
// Frozen calibration constants
// ---------------------------------------------------------------------------

/// FNV-1a, used to tie a constants file to the calibration family it was
/// produced from.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct ConstantsFile {
  int n = 1;
  double s = 0.5;
  double c_hat = 0.0;
  double c_sob = 0.0;
  std::string calibration_date;
  std::string family_hash;
};

inline nlohmann::json constants_json(const ConstantsFile& c) {
  nlohmann::json j;
  j["n"] = c.n;
  j["s"] = c.s;
  j["c_hat"] = c.c_hat;
  j["c_sob"] = c.c_sob;
  j["calibration_date"] = c.calibration_date;
  j["family_hash"] = c.family_hash;
  return j;
}

inline void save_constants(const ConstantsFile& c, const std::string& path) {
  emit_golden(constants_json(c), path);
}

inline ConstantsFile load_constants(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_constants: cannot open " + path);
  nlohmann::json j;
  is >> j;
  ConstantsFile c;
  c.n = j.at("n").get<int>();
  c.s = j.at("s").get<double>();
  c.c_hat = j.at("c_hat").get<double>();
  c.c_sob = j.at("c_sob").get<double>();
  c.calibration_date = j.at("calibration_date").get<std::string>();
  c.family_hash = j.at("family_hash").get<std::string>();
  return c;
}

// ---------------------------------------------------------------------------
// Experiment configuration parsing
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json parse_scalar(const std::string& raw) {
  // number if it parses completely, else bare string
  try {
    std::size_t used = 0;
    const double d = std::stod(raw, &used);
    if (used == raw.size()) {
      if (d == std::floor(d) && std::abs(d) < 1e15 && raw.find_first_of(".eE") == std::string::npos)
        return static_cast<long long>(d);
      return d;
    }
  } catch (const std::exception&) {
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  return raw;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Flat `key = value` text with optional `[section]` headers, or plain JSON
/// when the first character is '{'. Returns a JSON tree either way.
inline nlohmann::json parse_config_text(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return nlohmann::json::parse(text);
  nlohmann::json j = nlohmann::json::object();
  nlohmann::json* section = &j;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = detail::trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    if (t.front() == '[' && t.back() == ']') {
      const std::string name = detail::trim(t.substr(1, t.size() - 2));
      if (name.empty()) throw std::runtime_error("parse_config_text: empty section at line " + std::to_string(lineno));
      section = &j[name];
      if (section->is_null()) *section = nlohmann::json::object();
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("parse_config_text: expected key = value at line " + std::to_string(lineno));
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string val = detail::trim(t.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("parse_config_text: empty key at line " + std::to_string(lineno));
    (*section)[key] = detail::parse_scalar(val);
  }
  return j;
}

inline nlohmann::json parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("parse_config_file: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace nonlocal

#endif
