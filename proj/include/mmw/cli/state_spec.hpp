#pragma once

// State-specification documents: one JSON object per state, with an explicit
// constructor tag and explicit cutoffs.  Complex numbers are [re, im] pairs.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmw/fock_core.hpp"
#include "mmw/state_library.hpp"

namespace mmw::cli {

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(what) {}
};
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

struct StateSpec {
  std::string constructor;
  std::vector<int> cutoff;
  std::vector<int> occupations;                  // fock
  std::vector<cplx> amplitudes;                  // coherent / cat
  int sign = -1;                                 // cat
  std::optional<std::uint64_t> seed;             // random_*
  int k = 4;                                     // random_separable_mixture
  std::vector<std::vector<int>> partition;       // random_product / mixture generator
  std::vector<StateSpec> factors;                // product
  std::vector<std::pair<double, StateSpec>> components;  // mixture

  nlohmann::ordered_json echo;  // the parsed document, for report echoing
};

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& doc, const char* key,
                                   const char* ctor) {
  auto it = doc.find(key);
  if (it == doc.end())
    throw SchemaError(std::string("state spec: constructor '") + ctor +
                      "' requires field '" + key + "'");
  return *it;
}

inline std::vector<int> int_list(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw SchemaError(std::string("state spec: '") + key + "' must be an array");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer())
      throw SchemaError(std::string("state spec: '") + key + "' must contain integers");
    out.push_back(v.get<int>());
  }
  return out;
}

inline std::vector<cplx> complex_list(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw SchemaError(std::string("state spec: '") + key + "' must be an array");
  std::vector<cplx> out;
  for (const auto& v : j) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw SchemaError(std::string("state spec: '") + key +
                        "' entries must be [re, im] number pairs");
    out.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  return out;
}

inline StateSpec parse_spec_json(const nlohmann::json& doc);

inline StateSpec parse_tagged(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("state spec: document must be a JSON object");
  const auto ctor_it = doc.find("constructor");
  if (ctor_it == doc.end() || !ctor_it->is_string())
    throw SchemaError("state spec: missing string field 'constructor'");
  StateSpec spec;
  spec.constructor = ctor_it->get<std::string>();
  const char* ctor = spec.constructor.c_str();

  static const std::set<std::string> known = {
      "fock",        "ghz",           "paper_psi",      "coherent",
      "cat",         "product",       "mixture",        "random_pure",
      "random_product", "random_separable_mixture",
  };
  if (!known.count(spec.constructor))
    throw SchemaError("state spec: unknown constructor '" + spec.constructor + "'");

  if (spec.constructor != "product" && spec.constructor != "mixture")
    spec.cutoff = int_list(field(doc, "cutoff", ctor), "cutoff");

  if (spec.constructor == "fock")
    spec.occupations = int_list(field(doc, "occupations", ctor), "occupations");
  if (spec.constructor == "coherent" || spec.constructor == "cat")
    spec.amplitudes = complex_list(field(doc, "amplitudes", ctor), "amplitudes");
  if (spec.constructor == "cat") {
    const auto& s = field(doc, "sign", ctor);
    if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1))
      throw SchemaError("state spec: 'sign' must be 1 or -1");
    spec.sign = s.get<int>();
  }
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned() && !s.is_number_integer())
      throw SchemaError("state spec: 'seed' must be an integer");
    spec.seed = s.get<std::uint64_t>();
  }
  if (spec.constructor == "random_separable_mixture") {
    const auto& kk = field(doc, "k", ctor);
    if (!kk.is_number_integer() || kk.get<int>() < 1)
      throw SchemaError("state spec: 'k' must be a positive integer");
    spec.k = kk.get<int>();
  }
  if (spec.constructor == "random_product" || spec.constructor == "random_separable_mixture") {
    if (doc.contains("partition")) {
      const auto& p = doc.at("partition");
      if (!p.is_array()) throw SchemaError("state spec: 'partition' must be an array of arrays");
      for (const auto& g : p) spec.partition.push_back(int_list(g, "partition"));
    }
  }
  if (spec.constructor == "product") {
    const auto& f = field(doc, "factors", ctor);
    if (!f.is_array() || f.size() < 2)
      throw SchemaError("state spec: 'factors' must be an array of at least two specs");
    for (const auto& sub : f) spec.factors.push_back(parse_spec_json(sub));
  }
  if (spec.constructor == "mixture") {
    const auto& comps = field(doc, "components", ctor);
    if (!comps.is_array() || comps.empty())
      throw SchemaError("state spec: 'components' must be a nonempty array");
    for (const auto& c : comps) {
      if (!c.is_object() || !c.contains("weight") || !c.contains("spec"))
        throw SchemaError("state spec: mixture components need 'weight' and 'spec'");
      if (!c.at("weight").is_number())
        throw SchemaError("state spec: mixture 'weight' must be a number");
      spec.components.emplace_back(c.at("weight").get<double>(), parse_spec_json(c.at("spec")));
    }
  }
  return spec;
}

inline StateSpec parse_spec_json(const nlohmann::json& doc) {
  StateSpec spec = parse_tagged(doc);
  spec.echo = nlohmann::ordered_json::parse(doc.dump());
  return spec;
}

}  // namespace detail

// Parses and schema-checks a state-spec document.  Malformed JSON raises
// ParseError with the line/column of the failure; unknown constructors and
// type errors raise SchemaError.
inline StateSpec parse_state_spec(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < err.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("state spec: JSON parse error at line " + std::to_string(line) +
                     ", column " + std::to_string(col) + ": " + err.what());
  }
  return detail::parse_spec_json(doc);
}

// A built state plus any construction warnings (truncation deficits).
struct BuiltState {
  State state;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::uint64_t require_seed(const StateSpec& spec,
                                  std::optional<std::uint64_t> seed_override) {
  if (seed_override) return *seed_override;
  if (spec.seed) return *spec.seed;
  throw ValidationError("state spec: constructor '" + spec.constructor +
                        "' needs a seed (field 'seed' or --seed)");
}

}  // namespace detail

// Validates parameters against the tagged constructor and builds the state.
// Parameter violations raise ValidationError naming the offending field.
inline BuiltState build_state(const StateSpec& spec,
                              std::optional<std::uint64_t> seed_override = std::nullopt) {
  BuiltState out{State(PureState(CutoffSpec({1}), {cplx(1.0, 0.0)})), {}};
  auto make_cutoff = [&spec]() {
    if (spec.cutoff.empty())
      throw ValidationError("state spec: 'cutoff' must list at least one dimension");
    for (int d : spec.cutoff)
      if (d < 1) throw ValidationError("state spec: cutoff dimensions must be >= 1");
    return CutoffSpec(spec.cutoff);
  };
  try {
    if (spec.constructor == "fock") {
      out.state = make_fock(make_cutoff(), spec.occupations);
    } else if (spec.constructor == "ghz") {
      out.state = make_ghz(make_cutoff());
    } else if (spec.constructor == "paper_psi") {
      out.state = make_paper_psi(make_cutoff());
    } else if (spec.constructor == "coherent") {
      auto t = make_coherent(make_cutoff(), CoherentParams{spec.amplitudes});
      if (t.deficit > kDeficitWarnTol)
        out.warnings.push_back("coherent truncation deficit " + std::to_string(t.deficit) +
                               " exceeds " + std::to_string(kDeficitWarnTol) +
                               "; increase the cutoff");
      out.state = std::move(t.state);
    } else if (spec.constructor == "cat") {
      auto t = make_cat(make_cutoff(), CatParams{spec.amplitudes, spec.sign});
      if (t.deficit > kDeficitWarnTol)
        out.warnings.push_back("cat truncation deficit " + std::to_string(t.deficit) +
                               " exceeds " + std::to_string(kDeficitWarnTol) +
                               "; increase the cutoff");
      out.state = std::move(t.state);
    } else if (spec.constructor == "product") {
      std::vector<PureState> factors;
      for (const auto& f : spec.factors) {
        BuiltState sub = build_state(f, seed_override);
        for (auto& w : sub.warnings) out.warnings.push_back(std::move(w));
        if (!is_pure(sub.state))
          throw ValidationError("state spec: product factors must be pure states");
        factors.push_back(std::get<PureState>(std::move(sub.state)));
      }
      out.state = make_product(factors);
    } else if (spec.constructor == "mixture") {
      std::vector<Ensemble::Component> comps;
      for (const auto& [weight, sub_spec] : spec.components) {
        BuiltState sub = build_state(sub_spec, seed_override);
        for (auto& w : sub.warnings) out.warnings.push_back(std::move(w));
        comps.push_back(Ensemble::Component{weight, std::move(sub.state)});
      }
      out.state = Ensemble(std::move(comps)).flatten();
    } else if (spec.constructor == "random_pure") {
      out.state = random_pure(make_cutoff(), detail::require_seed(spec, seed_override));
    } else if (spec.constructor == "random_product") {
      const CutoffSpec cutoff = make_cutoff();
      const auto partition =
          spec.partition.empty() ? singleton_partition(cutoff.n_modes()) : spec.partition;
      out.state = random_product(cutoff, partition, detail::require_seed(spec, seed_override));
    } else if (spec.constructor == "random_separable_mixture") {
      const CutoffSpec cutoff = make_cutoff();
      const auto partition =
          spec.partition.empty() ? singleton_partition(cutoff.n_modes()) : spec.partition;
      out.state = random_separable_mixture(cutoff, spec.k, partition,
                                           detail::require_seed(spec, seed_override))
                      .flatten();
    } else {
      throw SchemaError("state spec: unknown constructor '" + spec.constructor + "'");
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& err) {
    throw ValidationError("state spec: constructor '" + spec.constructor +
                          "' rejected its parameters: " + err.what());
  }
  return out;
}

}  // namespace mmw::cli
