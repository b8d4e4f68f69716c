#pragma once

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <ranconv/errors.hpp>
#include <ranconv/json_io.hpp>

namespace ranconv::verify {

/// Everything a suite run depends on. A scenario comes from a JSON file, from
/// command-line flags, or both (flags win); invalid combinations are config
/// errors so a bad run never masquerades as a passing one.
struct Scenario {
  std::string suite;
  std::uint64_t seed = 1;
  std::vector<double> atoms = {0.25, 0.25, 0.25, 0.25};
  Index dim = 2;
  int trials = 200;
  double tolerance = 1e-8;

  // Instance-size knobs. Suites draw piece counts uniformly from
  // [piecesMin, piecesMax]; coefficients are Gaussian times paramScale.
  int piecesMin = 1;
  int piecesMax = 5;
  double paramScale = 1.0;

  // Inner-loop sizes for suites that sweep instances x points.
  int innerFns = 20;
  int innerPoints = 50;

  void validate() const {
    if (suite.empty()) throw ConfigError("scenario: no suite selected");
    if (trials < 1) throw ConfigError("scenario: trials must be >= 1, got " + std::to_string(trials));
    if (dim < 1) throw ConfigError("scenario: dim must be >= 1, got " + std::to_string(dim));
    if (atoms.empty()) throw ConfigError("scenario: atom list is empty");
    if (!(tolerance > 0)) throw ConfigError("scenario: tolerance must be positive");
    if (piecesMin < 1 || piecesMax < piecesMin)
      throw ConfigError("scenario: need 1 <= pieces_min <= pieces_max");
    if (!(paramScale > 0)) throw ConfigError("scenario: param_scale must be positive");
    if (innerFns < 1 || innerPoints < 1)
      throw ConfigError("scenario: inner_fns and inner_points must be >= 1");
    for (double p : atoms)
      if (!(p > 0)) throw ConfigError("scenario: atom probabilities must be positive");
  }

  AtomSpacePtr space() const { return makeAtomSpace(atoms); }
};

/// Parse the scenario fields present in a JSON object; absent fields keep
/// their current values so command-line flags and files can layer.
inline void applyScenarioJson(Scenario& sc, const Json& j) {
  if (!j.is_object()) throw ConfigError("scenario file: top level must be a JSON object");
  const auto getInt = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer()) throw ConfigError(std::string("scenario: ") + key + " must be an integer");
    out = j.at(key).get<int>();
  };
  if (j.contains("suite")) {
    if (!j.at("suite").is_string()) throw ConfigError("scenario: suite must be a string");
    sc.suite = j.at("suite").get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
      throw ConfigError("scenario: seed must be an integer");
    sc.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("atoms")) {
    if (!j.at("atoms").is_array()) throw ConfigError("scenario: atoms must be an array of probabilities");
    sc.atoms.clear();
    for (const auto& v : j.at("atoms")) {
      if (!v.is_number()) throw ConfigError("scenario: atoms entries must be numbers");
      sc.atoms.push_back(v.get<double>());
    }
  }
  if (j.contains("dim")) {
    if (!j.at("dim").is_number_integer()) throw ConfigError("scenario: dim must be an integer");
    sc.dim = j.at("dim").get<Index>();
  }
  getInt("trials", sc.trials);
  if (j.contains("tolerance")) {
    if (!j.at("tolerance").is_number()) throw ConfigError("scenario: tolerance must be a number");
    sc.tolerance = j.at("tolerance").get<double>();
  }
  getInt("pieces_min", sc.piecesMin);
  getInt("pieces_max", sc.piecesMax);
  if (j.contains("param_scale")) {
    if (!j.at("param_scale").is_number()) throw ConfigError("scenario: param_scale must be a number");
    sc.paramScale = j.at("param_scale").get<double>();
  }
  getInt("inner_fns", sc.innerFns);
  getInt("inner_points", sc.innerPoints);
}

/// Parse a comma-separated probability list, e.g. "0.1,0.2,0.3,0.4".
inline std::vector<double> parseAtomList(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("could not parse atom probability '" + tok + "' in \"" + text + "\"");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty atom list");
  return out;
}

}  // namespace ranconv::verify
