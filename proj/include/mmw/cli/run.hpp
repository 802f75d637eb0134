#pragma once

// CLI orchestration: load a state-spec file, run the battery, emit a report.
// Exit codes: 0 = ran, nothing fired; 2 = ran, entanglement detected;
// 1 = error.  Detection is a positive finding, not a failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mmw/cli/report.hpp"
#include "mmw/cli/state_spec.hpp"
#include "mmw/oracle.hpp"
#include "mmw/witnesses.hpp"

namespace mmw::cli {

struct RunOptions {
  std::string state_path;
  int max_degree = 3;
  double tolerance = 1e-9;
  std::vector<std::string> criteria;  // empty = all families
  std::string format = "text";        // text | json
  std::optional<std::uint64_t> seed;
  bool with_oracle = false;
};

inline constexpr int kExitClean = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDetected = 2;

inline int run(const RunOptions& opt, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  try {
    if (opt.format != "text" && opt.format != "json") {
      err << "error: unknown format '" << opt.format << "' (expected text or json)\n";
      return kExitError;
    }
    std::ifstream file(opt.state_path);
    if (!file) {
      err << "error: cannot open state file '" << opt.state_path << "'\n";
      return kExitError;
    }
    std::ostringstream buf;
    buf << file.rdbuf();

    const auto t0 = std::chrono::steady_clock::now();
    StateSpec spec = parse_state_spec(buf.str());
    BuiltState built = build_state(spec, opt.seed);

    BatteryConfig config;
    config.max_degree = opt.max_degree;
    config.tolerance = opt.tolerance;
    if (!opt.criteria.empty()) {
      config.criteria.clear();
      for (const auto& name : opt.criteria)
        config.criteria.insert(criterion_family_from_name(name));
    }
    const BatteryReport battery = run_battery(built.state, config);

    ReportDocument doc;
    doc.input_echo = spec.echo;
    doc.input_path = opt.state_path;
    doc.max_degree = config.max_degree;
    doc.tolerance = config.tolerance;
    for (const auto& [family, name] : criterion_family_names())
      if (config.criteria.count(family)) doc.criteria.push_back(name);
    doc.seed = opt.seed ? opt.seed : spec.seed;
    doc.oracle_requested = opt.with_oracle;
    doc.cutoff = cutoff_of(built.state).dims();
    doc.state_kind = is_pure(built.state) ? "pure" : "mixed";
    doc.construction_warnings = built.warnings;
    doc.battery = battery;

    if (opt.with_oracle) {
      if (const auto* psi = std::get_if<PureState>(&built.state)) {
        bool consistent = true;
        for (const auto& cut : Bipartition::all(psi->n_modes())) {
          const auto sr = oracle::schmidt_rank(*psi, cut);
          doc.oracle_checks.push_back(OracleCheck{cut.label(), sr.rank, sr.singular_values});
          for (const auto& r : battery.results)
            if (r.fired && r.error.empty() && r.bipartition == cut.label() && sr.rank < 2)
              consistent = false;
        }
        doc.oracle_consistent = consistent;
      }
    }

    const auto t1 = std::chrono::steady_clock::now();
    doc.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    if (opt.format == "json")
      out << to_json(doc).dump(2) << "\n";
    else
      out << to_text(doc);

    const bool detected = battery.any_fired();
    return detected ? kExitDetected : kExitClean;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace mmw::cli
