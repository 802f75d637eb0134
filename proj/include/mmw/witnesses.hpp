#pragma once

// The entanglement criteria: pair-variance sums, conjugated-moment and
// split-moment inequalities for three modes, the collective-phase variance
// bound, the pure-state triple-moment test, their n-mode generalizations,
// and a battery runner that aggregates verdicts per bipartition.
//
// Every criterion evaluates an inequality that holds for the relevant
// separability class; a strict violation (margin > tolerance) certifies
// entanglement.  Margins are sign-normalized: margin > 0 <=> violation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mmw/fock_core.hpp"

namespace mmw {

inline constexpr double kDefaultCriterionTol = 1e-9;

// ---------------------------------------------------------------------------
// Bipartition of the mode set into two nonempty groups.
// ---------------------------------------------------------------------------
class Bipartition {
 public:
  Bipartition(int n_modes, std::vector<int> group) : n_modes_(n_modes), group_(std::move(group)) {
    std::sort(group_.begin(), group_.end());
    group_.erase(std::unique(group_.begin(), group_.end()), group_.end());
    if (n_modes_ < 2) throw ArgumentError("Bipartition: need at least two modes");
    if (group_.empty()) throw ArgumentError("Bipartition: group is empty");
    if (static_cast<int>(group_.size()) >= n_modes_)
      throw ArgumentError("Bipartition: group must be a proper subset");
    for (int m : group_)
      if (m < 0 || m >= n_modes_) throw ArgumentError("Bipartition: mode index out of range");
  }

  static Bipartition isolating(int n_modes, int mode) { return Bipartition(n_modes, {mode}); }

  // All unordered bipartitions, represented by the group containing mode 0,
  // in ascending bitmask order.
  static std::vector<Bipartition> all(int n_modes) {
    std::vector<Bipartition> cuts;
    if (n_modes < 2) return cuts;
    const unsigned top = 1u << n_modes;
    for (unsigned mask = 1; mask < top - 1; ++mask) {
      if (!(mask & 1u)) continue;
      std::vector<int> group;
      for (int i = 0; i < n_modes; ++i)
        if (mask & (1u << i)) group.push_back(i);
      cuts.emplace_back(n_modes, std::move(group));
    }
    return cuts;
  }

  int n_modes() const { return n_modes_; }
  const std::vector<int>& group() const { return group_; }
  std::vector<int> complement() const {
    std::vector<int> out;
    for (int i = 0; i < n_modes_; ++i)
      if (!contains(i)) out.push_back(i);
    return out;
  }
  bool contains(int mode) const {
    return std::binary_search(group_.begin(), group_.end(), mode);
  }

  bool same_cut(const Bipartition& other) const {
    return n_modes_ == other.n_modes_ &&
           (group_ == other.group_ || group_ == other.complement());
  }

  // Three-mode cuts use the conventional letters (A|BC, B|AC, AB|C);
  // otherwise index sets like {0,2}|{1,3}.
  std::string label() const {
    if (n_modes_ == 3) {
      const std::vector<int> g = group_.size() <= 1 ? group_ : complement();
      if (g == std::vector<int>{0}) return "A|BC";
      if (g == std::vector<int>{1}) return "B|AC";
      if (g == std::vector<int>{2}) return "AB|C";
    }
    auto side = [](const std::vector<int>& modes) {
      std::string s = "{";
      for (std::size_t i = 0; i < modes.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(modes[i]);
      }
      return s + "}";
    };
    return side(group_) + "|" + side(complement());
  }

 private:
  int n_modes_;
  std::vector<int> group_;
};

// ---------------------------------------------------------------------------
// One criterion evaluation.
// ---------------------------------------------------------------------------
struct CriterionResult {
  std::string criterion;    // family id: variance_pair, moment, sqrt_moment, ...
  std::string condition;    // human-readable statement of the tested violation
  std::string bipartition;  // cut label, or "full"
  std::vector<int> degrees;
  std::optional<double> phi;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // > 0 <=> violation <=> entanglement detected
  bool fired = false;
  bool truncation_warning = false;
  std::string error;  // nonempty when the battery caught an evaluation error
};

namespace detail {

inline double real_moment(const ModeMonomial& m, const State& s) {
  return expectation(m, s).real();
}

struct PairVarianceSum {
  double value = 0.0;
  double dropped = 0.0;
};

// Var(M' + M) + Var(i(M - M')) collapses to 2(<M'M> + <MM'>) - 4|<M>|^2 by
// the parallelogram identity, which also holds for the truncated operators
// because the truncated raising operator is the exact adjoint of the
// truncated lowering operator.
inline PairVarianceSum pair_variance_sum(const ModeMonomial& m, const State& s) {
  PairVarianceSum out;
  cplx z(0.0, 0.0);
  double mdm = 0.0, mmd = 0.0;
  if (const auto* psi = std::get_if<PureState>(&s)) {
    const auto dn = apply_monomial(m, *psi);
    const auto up = apply_monomial(m.adjoint(), *psi);
    mdm = norm2(dn.amplitudes);
    mmd = norm2(up.amplitudes);
    z = expectation(m, *psi);
    out.dropped = dn.dropped_weight + up.dropped_weight;
  } else {
    const auto& rho = std::get<DensityMatrix>(s);
    const ModeMonomial ma = m.adjoint();
    cplx a2(0.0, 0.0), b2(0.0, 0.0);
    for (std::size_t j = 0; j < rho.dim(); ++j) {
      const auto wa = apply_monomial(m, rho.cutoff(), rho.column(j));
      z += wa.amplitudes[j];
      const auto waa = apply_monomial(ma, rho.cutoff(), wa.amplitudes);
      a2 += waa.amplitudes[j];
      const auto wb = apply_monomial(ma, rho.cutoff(), rho.column(j));
      const auto wbb = apply_monomial(m, rho.cutoff(), wb.amplitudes);
      b2 += wbb.amplitudes[j];
      out.dropped += wa.dropped_weight + wb.dropped_weight;
    }
    mdm = a2.real();
    mmd = b2.real();
  }
  out.value = 2.0 * (mdm + mmd) - 4.0 * std::norm(z);
  return out;
}

inline std::string mode_name(int n_modes, int mode) {
  return n_modes <= 26 ? std::string(1, static_cast<char>('a' + mode))
                       : "a" + std::to_string(mode);
}

inline std::string powered(const std::string& name, int deg) {
  return deg == 1 ? name : name + "^" + std::to_string(deg);
}

// True when the state has support that a raise of `m` per mode would push out
// of the window, or a requested degree exceeds the window outright.
inline bool degrees_exceed_cutoff(const CutoffSpec& cutoff, std::span<const int> degrees) {
  for (int i = 0; i < cutoff.n_modes(); ++i)
    if (degrees[static_cast<std::size_t>(i)] >= cutoff.dim(i)) return true;
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pair-variance criterion for three modes.  With M the balanced base that
// lowers the two grouped modes and raises the distinguished one,
//   Var(M' + M) + Var(i(M - M'))  <  2(<NaNb> + <NbNc> + <NaNc> + <N_x>)
// certifies entanglement across the cut isolating the distinguished mode.
// ---------------------------------------------------------------------------
inline CriterionResult variance_pair_criterion(const State& s, int distinguished,
                                               double tol = kDefaultCriterionTol) {
  if (n_modes_of(s) != 3)
    throw UnsupportedError("variance_pair_criterion: defined for 3-mode states only");
  if (distinguished < 0 || distinguished > 2)
    throw ArgumentError("variance_pair_criterion: distinguished mode must be 0, 1 or 2");

  std::vector<int> raise(3, 0), lower(3, 0);
  for (int i = 0; i < 3; ++i)
    (i == distinguished ? raise : lower)[static_cast<std::size_t>(i)] = 1;
  const ModeMonomial base(raise, lower);  // e.g. a b c' for distinguished = 2

  const auto pair = detail::pair_variance_sum(base, s);
  const double lhs = pair.value;

  double rhs = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      std::vector<int> deg(3, 0);
      deg[static_cast<std::size_t>(i)] = 1;
      deg[static_cast<std::size_t>(j)] = 1;
      rhs += detail::real_moment(ModeMonomial::number_power(deg), s);
    }
  std::vector<int> tail(3, 0);
  tail[static_cast<std::size_t>(distinguished)] = 1;
  rhs += detail::real_moment(ModeMonomial::number_power(tail), s);
  rhs *= 2.0;

  CriterionResult r;
  r.criterion = "variance_pair";
  const std::string ms = base.to_string();
  const std::string mds = base.adjoint().to_string();
  r.condition = "Var(" + ms + " + " + mds + ") + Var(i(" + ms + " - " + mds + ")) < 2(<Na Nb> + <Nb Nc> + <Na Nc> + <N" +
                detail::mode_name(3, distinguished) + ">)";
  r.bipartition = Bipartition::isolating(3, distinguished).label();
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.fired = r.margin > tol;
  r.truncation_warning = pair.dropped > kTruncWarnTol;
  return r;
}

// ---------------------------------------------------------------------------
// Conjugated-moment criterion: with the daggered mode's factor conjugated,
//   |< a^m b^n (x')^l >|^2  >  < (a')^m a^m (b')^n b^n (x')^l x^l >
// certifies entanglement across the cut isolating the daggered mode.
// ---------------------------------------------------------------------------
inline CriterionResult moment_criterion(const State& s, int daggered_mode,
                                        std::span<const int> degrees,
                                        double tol = kDefaultCriterionTol) {
  if (n_modes_of(s) != 3)
    throw UnsupportedError("moment_criterion: defined for 3-mode states only");
  if (daggered_mode < 0 || daggered_mode > 2)
    throw ArgumentError("moment_criterion: daggered mode must be 0, 1 or 2");
  if (degrees.size() != 3) throw ArgumentError("moment_criterion: need three degrees");
  for (int d : degrees)
    if (d < 1) throw ArgumentError("moment_criterion: degrees must be >= 1");

  std::vector<int> raise(3, 0), lower(3, 0);
  for (int i = 0; i < 3; ++i)
    (i == daggered_mode ? raise : lower)[static_cast<std::size_t>(i)] =
        degrees[static_cast<std::size_t>(i)];
  const ModeMonomial probe(raise, lower);
  const ModeMonomial diag =
      ModeMonomial::number_power(std::vector<int>(degrees.begin(), degrees.end()));

  const cplx z = expectation(probe, s);
  const double lhs = std::norm(z);
  const double rhs = detail::real_moment(diag, s);

  CriterionResult r;
  r.criterion = "moment";
  r.condition = "|<" + probe.to_string() + ">|^2 > <" + diag.to_string() + ">";
  r.bipartition = Bipartition::isolating(3, daggered_mode).label();
  r.degrees.assign(degrees.begin(), degrees.end());
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = lhs - rhs;
  r.fired = r.margin > tol;
  r.truncation_warning = detail::degrees_exceed_cutoff(cutoff_of(s), degrees);
  return r;
}

// ---------------------------------------------------------------------------
// Split-moment criterion: no conjugation, group-factorized bound,
//   |< a^m b^n c^l >|  >  sqrt(<group number powers> <complement number powers>)
// certifies entanglement across the cut.
// ---------------------------------------------------------------------------
inline CriterionResult sqrt_criterion(const State& s, const Bipartition& cut,
                                      std::span<const int> degrees,
                                      double tol = kDefaultCriterionTol) {
  if (n_modes_of(s) != 3)
    throw UnsupportedError("sqrt_criterion: defined for 3-mode states only");
  if (cut.n_modes() != 3) throw ArgumentError("sqrt_criterion: cut is not a 3-mode bipartition");
  if (degrees.size() != 3) throw ArgumentError("sqrt_criterion: need three degrees");
  for (int d : degrees)
    if (d < 1) throw ArgumentError("sqrt_criterion: degrees must be >= 1");

  const ModeMonomial probe = ModeMonomial::lowering(std::vector<int>(degrees.begin(), degrees.end()));
  auto side_moment = [&](const std::vector<int>& modes) {
    std::vector<int> deg(3, 0);
    for (int m : modes) deg[static_cast<std::size_t>(m)] = degrees[static_cast<std::size_t>(m)];
    return ModeMonomial::number_power(deg);
  };
  const ModeMonomial left = side_moment(cut.group());
  const ModeMonomial right = side_moment(cut.complement());

  const double lhs = std::abs(expectation(probe, s));
  const double ml = std::max(0.0, detail::real_moment(left, s));
  const double mr = std::max(0.0, detail::real_moment(right, s));
  const double rhs = std::sqrt(ml * mr);

  CriterionResult r;
  r.criterion = "sqrt_moment";
  r.condition = "|<" + probe.to_string() + ">| > sqrt(<" + left.to_string() + "> <" +
                right.to_string() + ">)";
  r.bipartition = cut.label();
  r.degrees.assign(degrees.begin(), degrees.end());
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = lhs - rhs;
  r.fired = r.margin > tol;
  r.truncation_warning = detail::degrees_exceed_cutoff(cutoff_of(s), degrees);
  return r;
}

// ---------------------------------------------------------------------------
// Collective-phase variance criterion for n >= 2 modes.  With P = prod a_i,
//   Var K(phi) = A + 2 Re(e^{2 i phi} B),   A = <P'P> + <PP'> - 2|<P>|^2,
//   B = <P'^2> - <P'>^2,
// minimized in closed form at phi* = (pi - arg B)/2 with minimum A - 2|B|.
// A minimum below 1 certifies full entanglement.
// ---------------------------------------------------------------------------
inline CriterionResult full_variance_criterion(const State& s,
                                               double tol = kDefaultCriterionTol) {
  const int n = n_modes_of(s);
  if (n < 2)
    throw UnsupportedError("full_variance_criterion: needs at least two modes");
  const std::vector<int> ones(static_cast<std::size_t>(n), 1);
  const std::vector<int> twos(static_cast<std::size_t>(n), 2);
  const ModeMonomial P = ModeMonomial::lowering(ones);

  const cplx zP = expectation(P, s);
  const cplx zP2 = expectation(ModeMonomial::lowering(twos), s);
  const double PdP = detail::real_moment(ModeMonomial::number_power(ones), s);

  // <PP'> needs an actual raising pass; its truncation is the one place the
  // window can bite, so track it.
  double PPd = 0.0;
  double dropped = 0.0;
  if (const auto* psi = std::get_if<PureState>(&s)) {
    const auto up = apply_monomial(ModeMonomial::raising(ones), *psi);
    PPd = detail::norm2(up.amplitudes);
    dropped = up.dropped_weight;
  } else {
    const auto& rho = std::get<DensityMatrix>(s);
    const ModeMonomial raise = ModeMonomial::raising(ones);
    const ModeMonomial low = ModeMonomial::lowering(ones);
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < rho.dim(); ++j) {
      const auto w1 = apply_monomial(raise, rho.cutoff(), rho.column(j));
      dropped += w1.dropped_weight;
      const auto w2 = apply_monomial(low, rho.cutoff(), w1.amplitudes);
      acc += w2.amplitudes[j];
    }
    PPd = acc.real();
  }

  const double A = PdP + PPd - 2.0 * std::norm(zP);
  const cplx B = std::conj(zP2 - zP * zP);
  const double min_var = A - 2.0 * std::abs(B);
  // K(phi + pi) = -K(phi), so the variance has period pi; report phi* in [0, pi)
  double phi_star = (M_PI - std::arg(B)) / 2.0;
  while (phi_star < 0.0) phi_star += M_PI;
  while (phi_star >= M_PI) phi_star -= M_PI;

  CriterionResult r;
  r.criterion = "full_variance";
  r.condition = "min over phi of Var(e^{i phi} " + P.adjoint().to_string() + " + e^{-i phi} " +
                P.to_string() + ") < 1";
  r.bipartition = "full";
  r.phi = phi_star;
  r.lhs = min_var;
  r.rhs = 1.0;
  r.margin = 1.0 - min_var;
  r.fired = r.margin > tol;
  r.truncation_warning = dropped > kTruncWarnTol;
  return r;
}

// ---------------------------------------------------------------------------
// Pure-state triple-moment criterion (three modes).  Fires only when the
// factorized bound
//   |<a^m b^n c^l>| > sqrt(<(a')^m a^m> <(b')^n b^n> <(c')^l c^l>)
// is violated while the three companion two-versus-one factorized moments
// all stay within the same bound; all four together certify full
// entanglement of a pure state.  The margin is the smallest slack of the
// four conditions, so fired <=> margin > tolerance.
// ---------------------------------------------------------------------------
inline CriterionResult pure_full_criterion(const State& s, std::span<const int> degrees,
                                           double tol = kDefaultCriterionTol) {
  if (n_modes_of(s) != 3)
    throw UnsupportedError("pure_full_criterion: defined for 3-mode states only");
  if (!is_pure(s))
    throw ArgumentError("pure_full_criterion: valid for pure states only");
  if (degrees.size() != 3) throw ArgumentError("pure_full_criterion: need three degrees");
  for (int d : degrees)
    if (d < 1) throw ArgumentError("pure_full_criterion: degrees must be >= 1");

  auto single = [&](int mode) {
    std::vector<int> deg(3, 0);
    deg[static_cast<std::size_t>(mode)] = degrees[static_cast<std::size_t>(mode)];
    return deg;
  };
  auto pair_deg = [&](int m1, int m2) {
    std::vector<int> deg(3, 0);
    deg[static_cast<std::size_t>(m1)] = degrees[static_cast<std::size_t>(m1)];
    deg[static_cast<std::size_t>(m2)] = degrees[static_cast<std::size_t>(m2)];
    return deg;
  };

  double bound = 1.0;  // product of the three single-mode number-power moments
  for (int i = 0; i < 3; ++i)
    bound *= std::max(0.0, detail::real_moment(ModeMonomial::number_power(single(i)), s));

  const ModeMonomial probe = ModeMonomial::lowering(std::vector<int>(degrees.begin(), degrees.end()));
  const double lhs = std::abs(expectation(probe, s));
  const double rhs = std::sqrt(bound);
  const double violation_slack = lhs - rhs;

  // companion conditions: factorized cut moments must respect the bound
  double companion_slack = std::numeric_limits<double>::infinity();
  const int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
  for (const auto& pr : pairs) {
    const int other = 3 - pr[0] - pr[1];
    const cplx zpair = expectation(ModeMonomial::lowering(pair_deg(pr[0], pr[1])), s);
    const cplx zsingle = expectation(ModeMonomial::lowering(single(other)), s);
    companion_slack = std::min(companion_slack, bound - std::norm(zpair * zsingle));
  }

  CriterionResult r;
  r.criterion = "pure_full";
  r.condition = "|<" + probe.to_string() +
                ">| > sqrt(prod of single-mode number-power moments), with all factorized "
                "pair moments inside the same bound";
  r.bipartition = "full";
  r.degrees.assign(degrees.begin(), degrees.end());
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = std::min(violation_slack, companion_slack);
  r.fired = r.margin > tol;
  r.truncation_warning = detail::degrees_exceed_cutoff(cutoff_of(s), degrees);
  return r;
}

// ---------------------------------------------------------------------------
// n-mode moment criteria.  With group S of the cut lowered:
//   conjugate_complement = true:
//     |< prod_{i in S} a_i^{l_i}  prod_{j not in S} (a_j')^{l_j} >|^2
//        >  < prod_all (a_i')^{l_i} a_i^{l_i} >
//   conjugate_complement = false:
//     |< prod_all a_i^{l_i} >|^2
//        >  < prod_S (a')^l a^l > < prod_{S^c} (a')^l a^l >
// Either violation certifies entanglement across the cut.  At n = 3 these
// reduce to the moment and sqrt criteria above.
// ---------------------------------------------------------------------------
inline CriterionResult nmode_moment_criterion(const State& s, const Bipartition& cut,
                                              std::span<const int> degrees,
                                              bool conjugate_complement,
                                              double tol = kDefaultCriterionTol) {
  const int n = n_modes_of(s);
  if (cut.n_modes() != n) throw ArgumentError("nmode_moment_criterion: cut mode count mismatch");
  if (static_cast<int>(degrees.size()) != n)
    throw ArgumentError("nmode_moment_criterion: need one degree per mode");
  for (int d : degrees)
    if (d < 1) throw ArgumentError("nmode_moment_criterion: degrees must be >= 1");

  CriterionResult r;
  r.bipartition = cut.label();
  r.degrees.assign(degrees.begin(), degrees.end());
  r.truncation_warning = false;

  if (conjugate_complement) {
    std::vector<int> raise(static_cast<std::size_t>(n), 0),
        lower(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
      (cut.contains(i) ? lower : raise)[static_cast<std::size_t>(i)] =
          degrees[static_cast<std::size_t>(i)];
    const ModeMonomial probe(raise, lower);
    const ModeMonomial diag =
        ModeMonomial::number_power(std::vector<int>(degrees.begin(), degrees.end()));
    r.criterion = "nmode_moment_conj";
    r.condition = "|<" + probe.to_string() + ">|^2 > <" + diag.to_string() + ">";
    r.lhs = std::norm(expectation(probe, s));
    r.rhs = detail::real_moment(diag, s);
    // only the complement was conjugated; its degrees can hit the window
    std::vector<int> raising_only(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
      if (!cut.contains(i))
        raising_only[static_cast<std::size_t>(i)] = degrees[static_cast<std::size_t>(i)];
    r.truncation_warning = detail::degrees_exceed_cutoff(cutoff_of(s), raising_only);
  } else {
    const ModeMonomial probe =
        ModeMonomial::lowering(std::vector<int>(degrees.begin(), degrees.end()));
    auto side_moment = [&](const std::vector<int>& modes) {
      std::vector<int> deg(static_cast<std::size_t>(n), 0);
      for (int m : modes) deg[static_cast<std::size_t>(m)] = degrees[static_cast<std::size_t>(m)];
      return ModeMonomial::number_power(deg);
    };
    const ModeMonomial left = side_moment(cut.group());
    const ModeMonomial right = side_moment(cut.complement());
    r.criterion = "nmode_moment_split";
    r.condition = "|<" + probe.to_string() + ">|^2 > <" + left.to_string() + "> <" +
                  right.to_string() + ">";
    r.lhs = std::norm(expectation(probe, s));
    r.rhs = std::max(0.0, detail::real_moment(left, s)) *
            std::max(0.0, detail::real_moment(right, s));
  }
  r.margin = r.lhs - r.rhs;
  r.fired = r.margin > tol;
  return r;
}

// ---------------------------------------------------------------------------
// Battery
// ---------------------------------------------------------------------------
enum class CriterionFamily {
  VariancePair,
  Moment,
  SqrtMoment,
  FullVariance,
  PureFull,
  NModeMoment,
};

inline const std::vector<std::pair<CriterionFamily, std::string>>& criterion_family_names() {
  static const std::vector<std::pair<CriterionFamily, std::string>> names = {
      {CriterionFamily::VariancePair, "variance_pair"},
      {CriterionFamily::Moment, "moment"},
      {CriterionFamily::SqrtMoment, "sqrt_moment"},
      {CriterionFamily::FullVariance, "full_variance"},
      {CriterionFamily::PureFull, "pure_full"},
      {CriterionFamily::NModeMoment, "nmode_moment"},
  };
  return names;
}

inline CriterionFamily criterion_family_from_name(const std::string& name) {
  for (const auto& [family, fname] : criterion_family_names())
    if (fname == name) return family;
  throw ArgumentError("unknown criterion family: " + name);
}

struct BatteryConfig {
  int max_degree = 3;
  double tolerance = kDefaultCriterionTol;
  std::set<CriterionFamily> criteria = {
      CriterionFamily::VariancePair, CriterionFamily::Moment,     CriterionFamily::SqrtMoment,
      CriterionFamily::FullVariance, CriterionFamily::PureFull,   CriterionFamily::NModeMoment,
  };
};

struct BatteryReport {
  std::vector<CriterionResult> results;
  std::vector<std::string> entangled_cuts;  // cuts with at least one fired bipartite criterion
  bool fully_entangled_via_theorem8 = false;   // collective-phase variance bound violated
  bool fully_entangled_via_all_cuts = false;   // pure state, every bipartition detected
  bool pure_full_via_theorem9 = false;         // pure triple-moment test fired
  bool state_is_pure = false;
  int n_modes = 0;

  bool any_fired() const {
    for (const auto& r : results)
      if (r.fired) return true;
    return false;
  }
};

namespace detail {

// Lexicographic degree vectors with entries 1..max_degree.
inline std::vector<std::vector<int>> degree_grid(int n, int max_degree) {
  std::vector<std::vector<int>> grid;
  std::vector<int> cur(static_cast<std::size_t>(n), 1);
  while (true) {
    grid.push_back(cur);
    int i = n - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == max_degree) {
      cur[static_cast<std::size_t>(i)] = 1;
      --i;
    }
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
  }
  return grid;
}

template <typename Fn>
inline void battery_entry(std::vector<CriterionResult>& results, Fn&& make) {
  try {
    results.push_back(make());
  } catch (const Error& err) {
    CriterionResult r;
    r.error = err.what();
    results.push_back(std::move(r));
  }
}

}  // namespace detail

// Evaluates every selected criterion over all bipartitions and all degree
// vectors with entries <= config.max_degree, in a fixed deterministic order.
// Per-criterion errors become error records; they never abort the battery.
// Three-mode states use the dedicated three-mode criteria; other mode counts
// use the n-mode generalizations.
inline BatteryReport run_battery(const State& s, const BatteryConfig& config = {}) {
  if (config.max_degree < 1) throw ArgumentError("run_battery: max_degree must be >= 1");
  const int n = n_modes_of(s);
  BatteryReport report;
  report.state_is_pure = is_pure(s);
  report.n_modes = n;
  const double tol = config.tolerance;
  const auto has = [&](CriterionFamily f) { return config.criteria.count(f) > 0; };

  if (n == 3) {
    if (has(CriterionFamily::VariancePair))
      for (int x = 0; x < 3; ++x)
        detail::battery_entry(report.results,
                              [&] { return variance_pair_criterion(s, x, tol); });
    if (has(CriterionFamily::Moment))
      for (int x = 0; x < 3; ++x)
        for (const auto& deg : detail::degree_grid(3, config.max_degree))
          detail::battery_entry(report.results,
                                [&] { return moment_criterion(s, x, deg, tol); });
    if (has(CriterionFamily::SqrtMoment))
      for (const auto& cut : Bipartition::all(3))
        for (const auto& deg : detail::degree_grid(3, config.max_degree))
          detail::battery_entry(report.results,
                                [&] { return sqrt_criterion(s, cut, deg, tol); });
    if (has(CriterionFamily::PureFull) && report.state_is_pure)
      for (const auto& deg : detail::degree_grid(3, config.max_degree))
        detail::battery_entry(report.results,
                              [&] { return pure_full_criterion(s, deg, tol); });
  } else if (n >= 2) {
    if (has(CriterionFamily::NModeMoment)) {
      for (const auto& cut : Bipartition::all(n))
        for (const auto& deg : detail::degree_grid(n, config.max_degree))
          detail::battery_entry(report.results, [&] {
            return nmode_moment_criterion(s, cut, deg, true, tol);
          });
      for (const auto& cut : Bipartition::all(n))
        for (const auto& deg : detail::degree_grid(n, config.max_degree))
          detail::battery_entry(report.results, [&] {
            return nmode_moment_criterion(s, cut, deg, false, tol);
          });
    }
  }
  if (n >= 2 && has(CriterionFamily::FullVariance))
    detail::battery_entry(report.results, [&] { return full_variance_criterion(s, tol); });

  // derived flags
  std::set<std::string> cuts;
  for (const auto& r : report.results) {
    if (!r.fired || r.error.size()) continue;
    if (r.criterion == "full_variance")
      report.fully_entangled_via_theorem8 = true;
    else if (r.criterion == "pure_full")
      report.pure_full_via_theorem9 = true;
    else
      cuts.insert(r.bipartition);
  }
  report.entangled_cuts.assign(cuts.begin(), cuts.end());
  if (report.state_is_pure && n >= 2) {
    bool all_cut = true;
    for (const auto& cut : Bipartition::all(n))
      if (!cuts.count(cut.label())) all_cut = false;
    report.fully_entangled_via_all_cuts = all_cut;
  }
  return report;
}

}  // namespace mmw
