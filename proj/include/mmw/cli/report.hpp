#pragma once

// Report documents: the battery's results wrapped with tool version, input
// echo, configuration, warnings and timing.  The JSON form round-trips
// numerically bit-exact; the text form is a fixed-width table.

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmw/version.hpp"
#include "mmw/witnesses.hpp"

namespace mmw::cli {

struct OracleCheck {
  std::string bipartition;
  int rank = 0;
  std::vector<double> singular_values;
};

struct ReportDocument {
  std::string tool = kToolName;
  std::string version = kVersion;
  nlohmann::ordered_json input_echo;
  std::string input_path;
  int max_degree = 3;
  double tolerance = 1e-9;
  std::vector<std::string> criteria;  // selected family names
  std::optional<std::uint64_t> seed;
  bool oracle_requested = false;
  std::vector<int> cutoff;
  std::string state_kind;  // "pure" | "mixed"
  std::vector<std::string> construction_warnings;
  BatteryReport battery;
  std::vector<OracleCheck> oracle_checks;
  std::optional<bool> oracle_consistent;
  double wall_ms = 0.0;
};

inline nlohmann::ordered_json to_json(const CriterionResult& r) {
  nlohmann::ordered_json j;
  j["criterion"] = r.criterion;
  j["condition"] = r.condition;
  j["bipartition"] = r.bipartition;
  j["degrees"] = r.degrees;
  if (r.phi)
    j["phi"] = *r.phi;
  else
    j["phi"] = nullptr;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["margin"] = r.margin;
  j["verdict"] = r.fired ? "fired" : "not_fired";
  j["truncation_warning"] = r.truncation_warning;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline CriterionResult criterion_from_json(const nlohmann::ordered_json& j) {
  CriterionResult r;
  r.criterion = j.at("criterion").get<std::string>();
  r.condition = j.at("condition").get<std::string>();
  r.bipartition = j.at("bipartition").get<std::string>();
  r.degrees = j.at("degrees").get<std::vector<int>>();
  if (!j.at("phi").is_null()) r.phi = j.at("phi").get<double>();
  r.lhs = j.at("lhs").get<double>();
  r.rhs = j.at("rhs").get<double>();
  r.margin = j.at("margin").get<double>();
  r.fired = j.at("verdict").get<std::string>() == "fired";
  r.truncation_warning = j.at("truncation_warning").get<bool>();
  if (j.contains("error")) r.error = j.at("error").get<std::string>();
  return r;
}

inline nlohmann::ordered_json to_json(const ReportDocument& doc) {
  nlohmann::ordered_json j;
  j["tool"] = {{"name", doc.tool}, {"version", doc.version}};
  j["input"] = nlohmann::ordered_json{{"path", doc.input_path}, {"spec", doc.input_echo}};
  nlohmann::ordered_json config;
  config["max_degree"] = doc.max_degree;
  config["tolerance"] = doc.tolerance;
  config["criteria"] = doc.criteria;
  config["phase"] = "closed-form minimum over phi";
  if (doc.seed)
    config["seed"] = *doc.seed;
  else
    config["seed"] = nullptr;
  config["oracle"] = doc.oracle_requested;
  j["config"] = config;
  j["state"] = nlohmann::ordered_json{{"cutoff", doc.cutoff},
                                      {"modes", static_cast<int>(doc.cutoff.size())},
                                      {"kind", doc.state_kind},
                                      {"construction_warnings", doc.construction_warnings}};
  nlohmann::ordered_json results = nlohmann::ordered_json::array();
  for (const auto& r : doc.battery.results) results.push_back(to_json(r));
  j["results"] = results;
  j["flags"] = nlohmann::ordered_json{
      {"entangled_cuts", doc.battery.entangled_cuts},
      {"fully_entangled_via_theorem8", doc.battery.fully_entangled_via_theorem8},
      {"fully_entangled_via_all_cuts", doc.battery.fully_entangled_via_all_cuts},
      {"pure_full_via_theorem9", doc.battery.pure_full_via_theorem9},
  };
  std::vector<std::string> warnings = doc.construction_warnings;
  for (std::size_t i = 0; i < doc.battery.results.size(); ++i)
    if (doc.battery.results[i].truncation_warning)
      warnings.push_back("result " + std::to_string(i) + " (" +
                         doc.battery.results[i].criterion + ", " +
                         doc.battery.results[i].bipartition +
                         "): cutoff truncation affected this value");
  j["warnings"] = warnings;
  if (doc.oracle_requested) {
    nlohmann::ordered_json oracle;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : doc.oracle_checks)
      checks.push_back(nlohmann::ordered_json{{"bipartition", c.bipartition},
                                              {"rank", c.rank},
                                              {"singular_values", c.singular_values}});
    oracle["schmidt"] = checks;
    if (doc.oracle_consistent)
      oracle["consistent"] = *doc.oracle_consistent;
    else
      oracle["consistent"] = nullptr;
    j["oracle"] = oracle;
  }
  j["timing"] = nlohmann::ordered_json{{"wall_ms", doc.wall_ms}};
  return j;
}

inline std::string to_text(const ReportDocument& doc) {
  std::ostringstream out;
  char line[256];
  out << doc.tool << " " << doc.version << " -- " << doc.input_path << "\n";
  out << "state: " << doc.state_kind << ", cutoff [";
  for (std::size_t i = 0; i < doc.cutoff.size(); ++i)
    out << (i ? "," : "") << doc.cutoff[i];
  out << "]; max degree " << doc.max_degree << ", tolerance " << doc.tolerance << "\n";
  for (const auto& w : doc.construction_warnings) out << "warning: " << w << "\n";
  out << "\n";
  std::snprintf(line, sizeof(line), "%-18s %-12s %-14s %14s %14s %14s  %-9s %s\n", "criterion",
                "cut", "degrees", "lhs", "rhs", "margin", "verdict", "");
  out << line;
  out << std::string(104, '-') << "\n";
  for (const auto& r : doc.battery.results) {
    if (!r.error.empty()) {
      std::snprintf(line, sizeof(line), "%-18s %-12s error: %s\n", r.criterion.c_str(),
                    r.bipartition.c_str(), r.error.c_str());
      out << line;
      continue;
    }
    std::string deg;
    if (!r.degrees.empty()) {
      deg = "(";
      for (std::size_t i = 0; i < r.degrees.size(); ++i)
        deg += (i ? "," : "") + std::to_string(r.degrees[i]);
      deg += ")";
    } else if (r.phi) {
      std::snprintf(line, sizeof(line), "phi=%.4f", *r.phi);
      deg = line;
    }
    std::snprintf(line, sizeof(line), "%-18s %-12s %-14s %14.6g %14.6g %14.6g  %-9s %s\n",
                  r.criterion.c_str(), r.bipartition.c_str(), deg.c_str(), r.lhs, r.rhs,
                  r.margin, r.fired ? "fired" : "not_fired",
                  r.truncation_warning ? "[truncated]" : "");
    out << line;
  }
  out << "\n";
  out << "entangled cuts:";
  if (doc.battery.entangled_cuts.empty()) out << " (none)";
  for (const auto& c : doc.battery.entangled_cuts) out << " " << c;
  out << "\n";
  out << "fully_entangled_via_theorem8: "
      << (doc.battery.fully_entangled_via_theorem8 ? "true" : "false") << "\n";
  out << "fully_entangled_via_all_cuts: "
      << (doc.battery.fully_entangled_via_all_cuts ? "true" : "false") << "\n";
  out << "pure_full_via_theorem9:       "
      << (doc.battery.pure_full_via_theorem9 ? "true" : "false") << "\n";
  if (doc.oracle_requested) {
    out << "\nschmidt oracle:\n";
    for (const auto& c : doc.oracle_checks) {
      out << "  " << c.bipartition << ": rank " << c.rank << ", singular values";
      for (double v : c.singular_values) {
        std::snprintf(line, sizeof(line), " %.6g", v);
        out << line;
      }
      out << "\n";
    }
    if (doc.oracle_consistent)
      out << "  fired bipartite criteria consistent with Schmidt ranks: "
          << (*doc.oracle_consistent ? "yes" : "NO") << "\n";
  }
  std::snprintf(line, sizeof(line), "\nelapsed: %.2f ms\n", doc.wall_ms);
  out << line;
  return out.str();
}

}  // namespace mmw::cli
