#pragma once

// Truncated multi-mode Fock space: basis indexing, states, normal-ordered
// ladder monomials, expectation values, variances and partial traces.
//
// Truncation semantics: each mode lives on occupations 0..d-1.  Lowering
// never leaves the window; raising past d-1 drops the component (hard
// truncation).  This makes the truncated raising operator the exact adjoint
// of the truncated lowering operator, so every balanced form stays Hermitian
// and every variance stays nonnegative on the truncated space.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mmw/errors.hpp"

namespace mmw {

using cplx = std::complex<double>;

inline constexpr double kNormTol = 1e-12;       // state normalization
inline constexpr double kHermTol = 1e-10;       // Hermiticity / trace checks
inline constexpr double kTruncWarnTol = 1e-12;  // relative weight lost before warning

// ---------------------------------------------------------------------------
// CutoffSpec: per-mode truncation dimensions.  Basis order is row-major with
// the last mode varying fastest.
// ---------------------------------------------------------------------------
class CutoffSpec {
 public:
  explicit CutoffSpec(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw ArgumentError("CutoffSpec: need at least one mode");
    strides_.assign(dims_.size(), 1);
    total_dim_ = 1;
    for (std::size_t i = dims_.size(); i-- > 0;) {
      if (dims_[i] < 1) throw ArgumentError("CutoffSpec: every dimension must be >= 1");
      strides_[i] = total_dim_;
      const std::size_t d = static_cast<std::size_t>(dims_[i]);
      if (total_dim_ > (static_cast<std::size_t>(-1) / d))
        throw CapacityError("CutoffSpec: total dimension overflows size_t");
      total_dim_ *= d;
    }
  }

  int n_modes() const { return static_cast<int>(dims_.size()); }
  int dim(int mode) const { return dims_.at(static_cast<std::size_t>(mode)); }
  std::size_t total_dim() const { return total_dim_; }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t stride(int mode) const { return strides_.at(static_cast<std::size_t>(mode)); }

  std::size_t rank_of(std::span<const int> occupations) const {
    if (occupations.size() != dims_.size())
      throw DimensionError("rank_of: occupation count != mode count");
    std::size_t r = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (occupations[i] < 0 || occupations[i] >= dims_[i])
        throw ArgumentError("rank_of: occupation out of range for mode " + std::to_string(i));
      r += static_cast<std::size_t>(occupations[i]) * strides_[i];
    }
    return r;
  }

  void unrank(std::size_t rank, std::span<int> occupations) const {
    if (rank >= total_dim_) throw ArgumentError("unrank: rank out of range");
    if (occupations.size() != dims_.size())
      throw DimensionError("unrank: occupation buffer size != mode count");
    for (std::size_t i = 0; i < dims_.size(); ++i)
      occupations[i] = static_cast<int>((rank / strides_[i]) % static_cast<std::size_t>(dims_[i]));
  }

  std::vector<int> occupations_of(std::size_t rank) const {
    std::vector<int> occ(dims_.size());
    unrank(rank, occ);
    return occ;
  }

  bool operator==(const CutoffSpec& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::size_t total_dim_ = 0;
};

// One basis vector: occupations plus its linear rank.
struct FockIndex {
  std::vector<int> occupations;
  std::size_t linear_rank = 0;
};

inline FockIndex fock_index(const CutoffSpec& cutoff, std::size_t rank) {
  return FockIndex{cutoff.occupations_of(rank), rank};
}

inline FockIndex fock_index(const CutoffSpec& cutoff, std::span<const int> occupations) {
  const std::size_t r = cutoff.rank_of(occupations);
  return FockIndex{std::vector<int>(occupations.begin(), occupations.end()), r};
}

// ---------------------------------------------------------------------------
// ModeMonomial: per-mode normal-ordered ladder powers  prod_i (a_i')^{u_i} a_i^{v_i}
// (a' denotes the raising operator).  Operators on distinct modes commute, so
// this per-mode normal ordering is a canonical form.
// ---------------------------------------------------------------------------
class ModeMonomial {
 public:
  ModeMonomial(std::vector<int> raise_degrees, std::vector<int> lower_degrees)
      : raise_(std::move(raise_degrees)), lower_(std::move(lower_degrees)) {
    if (raise_.size() != lower_.size() || raise_.empty())
      throw ArgumentError("ModeMonomial: need matching nonempty degree vectors");
    for (std::size_t i = 0; i < raise_.size(); ++i)
      if (raise_[i] < 0 || lower_[i] < 0)
        throw ArgumentError("ModeMonomial: degrees must be nonnegative");
  }

  static ModeMonomial identity(int n_modes) {
    return ModeMonomial(std::vector<int>(n_modes, 0), std::vector<int>(n_modes, 0));
  }
  // prod a_i^{v_i}
  static ModeMonomial lowering(std::vector<int> degrees) {
    std::vector<int> zeros(degrees.size(), 0);
    return ModeMonomial(std::move(zeros), std::move(degrees));
  }
  // prod (a_i')^{u_i}
  static ModeMonomial raising(std::vector<int> degrees) {
    std::vector<int> zeros(degrees.size(), 0);
    return ModeMonomial(std::move(degrees), std::move(zeros));
  }
  // prod (a_i')^{k_i} a_i^{k_i}; k=(1,..,1) is the number-operator product.
  static ModeMonomial number_power(std::vector<int> degrees) {
    std::vector<int> copy = degrees;
    return ModeMonomial(std::move(copy), std::move(degrees));
  }
  // Single-mode factor embedded in an n-mode identity.
  static ModeMonomial single(int n_modes, int mode, int raise_degree, int lower_degree) {
    if (mode < 0 || mode >= n_modes) throw ArgumentError("ModeMonomial::single: bad mode index");
    std::vector<int> u(n_modes, 0), v(n_modes, 0);
    u[static_cast<std::size_t>(mode)] = raise_degree;
    v[static_cast<std::size_t>(mode)] = lower_degree;
    return ModeMonomial(std::move(u), std::move(v));
  }

  ModeMonomial adjoint() const { return ModeMonomial(lower_, raise_); }

  int n_modes() const { return static_cast<int>(raise_.size()); }
  int raise_degree(int mode) const { return raise_.at(static_cast<std::size_t>(mode)); }
  int lower_degree(int mode) const { return lower_.at(static_cast<std::size_t>(mode)); }
  const std::vector<int>& raise_degrees() const { return raise_; }
  const std::vector<int>& lower_degrees() const { return lower_; }

  int total_degree() const {
    return std::accumulate(raise_.begin(), raise_.end(), 0) +
           std::accumulate(lower_.begin(), lower_.end(), 0);
  }

  bool operator==(const ModeMonomial& other) const {
    return raise_ == other.raise_ && lower_ == other.lower_;
  }

  // ASCII rendering, e.g. "a'^2 b c'" for (a')^2 b c'.  Modes are named
  // a, b, c, ... for up to 26 modes, a0, a1, ... beyond.
  std::string to_string() const {
    std::string out;
    for (int i = 0; i < n_modes(); ++i) {
      const std::string name = n_modes() <= 26
                                   ? std::string(1, static_cast<char>('a' + i))
                                   : "a" + std::to_string(i);
      auto append = [&out, &name](const char* mark, int deg) {
        if (deg == 0) return;
        if (!out.empty()) out += ' ';
        out += name;
        out += mark;
        if (deg > 1) out += "^" + std::to_string(deg);
      };
      append("'", raise_degree(i));
      append("", lower_degree(i));
    }
    return out.empty() ? "1" : out;
  }

 private:
  std::vector<int> raise_;
  std::vector<int> lower_;
};

// Hermitian combination  e^{i phase} M' + e^{-i phase} M  of a monomial M.
struct BalancedForm {
  ModeMonomial base;
  double phase = 0.0;

  std::string to_string() const {
    return "e^{i phi} (" + base.adjoint().to_string() + ") + e^{-i phi} (" +
           base.to_string() + "), phi=" + std::to_string(phase);
  }
};

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------
class PureState {
 public:
  PureState(CutoffSpec cutoff, std::vector<cplx> amplitudes)
      : cutoff_(std::move(cutoff)), amps_(std::move(amplitudes)) {
    if (amps_.size() != cutoff_.total_dim())
      throw DimensionError("PureState: amplitude count != total dimension");
    double norm2 = 0.0;
    for (const cplx& a : amps_) norm2 += std::norm(a);
    if (!(norm2 > 0.0)) throw ArgumentError("PureState: zero amplitude vector");
    const double scale = 1.0 / std::sqrt(norm2);
    for (cplx& a : amps_) a *= scale;
  }

  const CutoffSpec& cutoff() const { return cutoff_; }
  int n_modes() const { return cutoff_.n_modes(); }
  std::size_t dim() const { return cutoff_.total_dim(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  const cplx& amplitude(std::size_t rank) const { return amps_.at(rank); }

  double norm2() const {
    double s = 0.0;
    for (const cplx& a : amps_) s += std::norm(a);
    return s;
  }

 private:
  CutoffSpec cutoff_;
  std::vector<cplx> amps_;
};

// Hermitian, unit-trace matrix over the multi-mode Fock basis.  Column-major
// storage so that monomials can stream over contiguous columns.
class DensityMatrix {
 public:
  DensityMatrix(CutoffSpec cutoff, std::vector<cplx> column_major)
      : cutoff_(std::move(cutoff)), mat_(std::move(column_major)) {
    const std::size_t d = cutoff_.total_dim();
    if (mat_.size() != d * d) throw DimensionError("DensityMatrix: matrix size != dim^2");
    double herm_dev = 0.0;
    cplx trace = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      trace += at(j, j);
      for (std::size_t i = 0; i <= j; ++i)
        herm_dev = std::max(herm_dev, std::abs(at(i, j) - std::conj(at(j, i))));
    }
    if (herm_dev > kHermTol)
      throw ArgumentError("DensityMatrix: not Hermitian (max deviation " +
                          std::to_string(herm_dev) + ")");
    if (std::abs(trace - 1.0) > kHermTol)
      throw ArgumentError("DensityMatrix: trace != 1 (got " + std::to_string(trace.real()) + ")");
  }

  static DensityMatrix from_pure(const PureState& psi) {
    const std::size_t d = psi.dim();
    std::vector<cplx> m(d * d);
    const auto a = psi.amplitudes();
    for (std::size_t j = 0; j < d; ++j) {
      const cplx cj = std::conj(a[j]);
      for (std::size_t i = 0; i < d; ++i) m[j * d + i] = a[i] * cj;
    }
    return DensityMatrix(CutoffSpec(psi.cutoff()), std::move(m));
  }

  const CutoffSpec& cutoff() const { return cutoff_; }
  int n_modes() const { return cutoff_.n_modes(); }
  std::size_t dim() const { return cutoff_.total_dim(); }
  const cplx& at(std::size_t i, std::size_t j) const { return mat_[j * dim() + i]; }
  std::span<const cplx> column(std::size_t j) const {
    return std::span<const cplx>(mat_).subspan(j * dim(), dim());
  }
  std::span<const cplx> data() const { return mat_; }

 private:
  CutoffSpec cutoff_;
  std::vector<cplx> mat_;
};

using State = std::variant<PureState, DensityMatrix>;

inline const CutoffSpec& cutoff_of(const State& s) {
  return std::visit([](const auto& v) -> const CutoffSpec& { return v.cutoff(); }, s);
}
inline int n_modes_of(const State& s) { return cutoff_of(s).n_modes(); }
inline bool is_pure(const State& s) { return std::holds_alternative<PureState>(s); }

// ---------------------------------------------------------------------------
// Monomial application
// ---------------------------------------------------------------------------
struct ApplyResult {
  std::vector<cplx> amplitudes;  // unnormalized
  double dropped_weight = 0.0;   // squared magnitude truncated away
};

// prod_i (a_i')^{u_i} a_i^{v_i} |vec>, lowering before raising per mode.
// Coefficients a^v|n> = sqrt(n (n-1) ... (n-v+1)) |n-v> and
// (a')^u|m> = sqrt((m+1) ... (m+u)) |m+u>, accumulated as running products of
// square roots so no factorial is ever formed.  Components raised past the
// cutoff are dropped and their weight recorded.
inline ApplyResult apply_monomial(const ModeMonomial& m, const CutoffSpec& cutoff,
                                  std::span<const cplx> vec) {
  const int n = cutoff.n_modes();
  if (m.n_modes() != n)
    throw DimensionError("apply_monomial: monomial has " + std::to_string(m.n_modes()) +
                         " modes, state has " + std::to_string(n));
  if (vec.size() != cutoff.total_dim())
    throw DimensionError("apply_monomial: vector length != total dimension");

  ApplyResult out;
  out.amplitudes.assign(cutoff.total_dim(), cplx(0.0, 0.0));

  std::vector<int> occ(static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < vec.size(); ++r) {
    const cplx amp = vec[r];
    if (amp == cplx(0.0, 0.0)) continue;
    cutoff.unrank(r, occ);

    double coeff = 1.0;
    bool annihilated = false;
    bool truncated = false;
    std::ptrdiff_t shift = 0;
    for (int i = 0; i < n; ++i) {
      const int v = m.lower_degree(i);
      const int u = m.raise_degree(i);
      if (v == 0 && u == 0) continue;
      const int ni = occ[static_cast<std::size_t>(i)];
      if (ni < v) {
        annihilated = true;
        break;
      }
      for (int k = 0; k < v; ++k) coeff *= std::sqrt(static_cast<double>(ni - k));
      const int mid = ni - v;
      for (int k = 1; k <= u; ++k) coeff *= std::sqrt(static_cast<double>(mid + k));
      const int nf = mid + u;
      if (nf >= cutoff.dim(i)) truncated = true;
      shift += static_cast<std::ptrdiff_t>(nf - ni) * static_cast<std::ptrdiff_t>(cutoff.stride(i));
    }
    if (annihilated) continue;
    if (truncated) {
      out.dropped_weight += std::norm(amp) * coeff * coeff;
      continue;
    }
    out.amplitudes[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(r) + shift)] +=
        coeff * amp;
  }
  return out;
}

inline ApplyResult apply_monomial(const ModeMonomial& m, const PureState& s) {
  return apply_monomial(m, s.cutoff(), s.amplitudes());
}

namespace detail {

inline cplx inner(std::span<const cplx> bra, std::span<const cplx> ket) {
  cplx acc(0.0, 0.0);
  for (std::size_t i = 0; i < bra.size(); ++i) acc += std::conj(bra[i]) * ket[i];
  return acc;
}

inline double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& a : v) s += std::norm(a);
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Expectation values
// ---------------------------------------------------------------------------

// <s| prod (a')^{u} a^{v} |s>, evaluated as the inner product of the two
// lowering halves  < a^{u} s | a^{v} s >.  Both halves only lower, so the
// value is exact on the truncated space (raising never has to truncate).
inline cplx expectation(const ModeMonomial& m, const PureState& s) {
  if (m.n_modes() != s.n_modes())
    throw DimensionError("expectation: monomial/state mode count mismatch");
  const auto bra = apply_monomial(ModeMonomial::lowering(m.raise_degrees()), s);
  const auto ket = apply_monomial(ModeMonomial::lowering(m.lower_degrees()), s);
  return detail::inner(bra.amplitudes, ket.amplitudes);
}

// tr(rho M) by applying the monomial to each column and summing the diagonal;
// O(total_dim^2) without ever forming the dense operator.
inline cplx expectation(const ModeMonomial& m, const DensityMatrix& rho) {
  if (m.n_modes() != rho.n_modes())
    throw DimensionError("expectation: monomial/state mode count mismatch");
  cplx acc(0.0, 0.0);
  for (std::size_t j = 0; j < rho.dim(); ++j) {
    const auto col = apply_monomial(m, rho.cutoff(), rho.column(j));
    acc += col.amplitudes[j];
  }
  return acc;
}

inline cplx expectation(const ModeMonomial& m, const State& s) {
  return std::visit([&m](const auto& v) { return expectation(m, v); }, s);
}

// Real expectation of a balanced form:  e^{i phi} conj(<M>) + e^{-i phi} <M>.
inline double balanced_mean(const BalancedForm& f, const State& s) {
  const cplx z = expectation(f.base, s);
  return 2.0 * std::real(std::polar(1.0, -f.phase) * z);
}

// ---------------------------------------------------------------------------
// Variance of a balanced form
// ---------------------------------------------------------------------------
struct VarianceResult {
  double value = 0.0;
  double dropped_weight = 0.0;  // weight truncated while applying the form
  bool truncated = false;       // dropped_weight above the warning threshold
};

namespace detail {

// F |vec> for F = e^{i phi} M' + e^{-i phi} M, with truncation tracking.
inline ApplyResult apply_balanced(const BalancedForm& f, const CutoffSpec& cutoff,
                                  std::span<const cplx> vec) {
  const auto up = apply_monomial(f.base.adjoint(), cutoff, vec);
  const auto dn = apply_monomial(f.base, cutoff, vec);
  const cplx eip = std::polar(1.0, f.phase);
  const cplx eim = std::conj(eip);
  ApplyResult out;
  out.amplitudes.resize(vec.size());
  for (std::size_t i = 0; i < vec.size(); ++i)
    out.amplitudes[i] = eip * up.amplitudes[i] + eim * dn.amplitudes[i];
  out.dropped_weight = up.dropped_weight + dn.dropped_weight;
  return out;
}

}  // namespace detail

// Var(F) = <F^2> - <F>^2 with <F^2> = ||F|s>||^2 on pure states.
inline VarianceResult variance(const BalancedForm& f, const PureState& s) {
  const auto fs = detail::apply_balanced(f, s.cutoff(), s.amplitudes());
  const double mean = balanced_mean(f, State(s));
  VarianceResult r;
  r.value = detail::norm2(fs.amplitudes) - mean * mean;
  r.dropped_weight = fs.dropped_weight;
  r.truncated = fs.dropped_weight > kTruncWarnTol;
  return r;
}

// Mixed-state path: apply F twice per column and trace.  Only the inner
// application's truncation is observable in the trace, so only it feeds the
// warning.
inline VarianceResult variance(const BalancedForm& f, const DensityMatrix& rho) {
  if (f.base.n_modes() != rho.n_modes())
    throw DimensionError("variance: form/state mode count mismatch");
  cplx tr_f(0.0, 0.0), tr_f2(0.0, 0.0);
  double dropped = 0.0;
  for (std::size_t j = 0; j < rho.dim(); ++j) {
    const auto w1 = detail::apply_balanced(f, rho.cutoff(), rho.column(j));
    dropped += w1.dropped_weight;
    const auto w2 = detail::apply_balanced(f, rho.cutoff(), w1.amplitudes);
    tr_f += w1.amplitudes[j];
    tr_f2 += w2.amplitudes[j];
  }
  VarianceResult r;
  const double mean = tr_f.real();
  r.value = tr_f2.real() - mean * mean;
  r.dropped_weight = dropped;
  r.truncated = dropped > kTruncWarnTol;
  return r;
}

inline VarianceResult variance(const BalancedForm& f, const State& s) {
  return std::visit([&f](const auto& v) { return variance(f, v); }, s);
}

// ---------------------------------------------------------------------------
// Partial trace
// ---------------------------------------------------------------------------
namespace detail {

struct TraceMaps {
  CutoffSpec kept;
  std::vector<std::size_t> kept_offsets;    // rank contribution of each kept index
  std::vector<std::size_t> traced_offsets;  // rank contribution of each traced index
};

inline TraceMaps make_trace_maps(const CutoffSpec& cutoff, std::span<const int> keep) {
  const int n = cutoff.n_modes();
  std::vector<int> keep_sorted(keep.begin(), keep.end());
  std::sort(keep_sorted.begin(), keep_sorted.end());
  if (keep_sorted.empty()) throw ArgumentError("partial_trace: keep set is empty");
  if (std::adjacent_find(keep_sorted.begin(), keep_sorted.end()) != keep_sorted.end())
    throw ArgumentError("partial_trace: duplicate mode in keep set");
  if (keep_sorted.front() < 0 || keep_sorted.back() >= n)
    throw ArgumentError("partial_trace: mode index out of range");
  if (static_cast<int>(keep_sorted.size()) == n)
    throw ArgumentError("partial_trace: keep set must be a proper subset");

  std::vector<int> traced;
  for (int i = 0; i < n; ++i)
    if (!std::binary_search(keep_sorted.begin(), keep_sorted.end(), i)) traced.push_back(i);

  std::vector<int> kept_dims, traced_dims;
  for (int i : keep_sorted) kept_dims.push_back(cutoff.dim(i));
  for (int i : traced) traced_dims.push_back(cutoff.dim(i));

  TraceMaps maps{CutoffSpec(kept_dims), {}, {}};
  const CutoffSpec traced_spec(traced_dims.empty() ? std::vector<int>{1} : traced_dims);

  maps.kept_offsets.resize(maps.kept.total_dim());
  std::vector<int> occ(keep_sorted.size());
  for (std::size_t k = 0; k < maps.kept.total_dim(); ++k) {
    maps.kept.unrank(k, occ);
    std::size_t off = 0;
    for (std::size_t i = 0; i < occ.size(); ++i)
      off += static_cast<std::size_t>(occ[i]) * cutoff.stride(keep_sorted[i]);
    maps.kept_offsets[k] = off;
  }
  maps.traced_offsets.resize(traced_spec.total_dim());
  std::vector<int> tocc(traced.empty() ? 1 : traced.size());
  for (std::size_t t = 0; t < traced_spec.total_dim(); ++t) {
    traced_spec.unrank(t, tocc);
    std::size_t off = 0;
    for (std::size_t i = 0; i < traced.size(); ++i)
      off += static_cast<std::size_t>(tocc[i]) * cutoff.stride(traced[i]);
    maps.traced_offsets[t] = off;
  }
  return maps;
}

}  // namespace detail

inline DensityMatrix partial_trace(const PureState& s, std::span<const int> keep) {
  const auto maps = detail::make_trace_maps(s.cutoff(), keep);
  const std::size_t K = maps.kept.total_dim();
  const std::size_t T = maps.traced_offsets.size();
  const auto amps = s.amplitudes();
  std::vector<cplx> out(K * K, cplx(0.0, 0.0));
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t toff = maps.traced_offsets[t];
    for (std::size_t j = 0; j < K; ++j) {
      const cplx cj = std::conj(amps[maps.kept_offsets[j] + toff]);
      if (cj == cplx(0.0, 0.0)) continue;
      for (std::size_t i = 0; i < K; ++i)
        out[j * K + i] += amps[maps.kept_offsets[i] + toff] * cj;
    }
  }
  return DensityMatrix(maps.kept, std::move(out));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const auto maps = detail::make_trace_maps(rho.cutoff(), keep);
  const std::size_t K = maps.kept.total_dim();
  const std::size_t T = maps.traced_offsets.size();
  std::vector<cplx> out(K * K, cplx(0.0, 0.0));
  for (std::size_t j = 0; j < K; ++j)
    for (std::size_t i = 0; i < K; ++i) {
      cplx acc(0.0, 0.0);
      for (std::size_t t = 0; t < T; ++t)
        acc += rho.at(maps.kept_offsets[i] + maps.traced_offsets[t],
                      maps.kept_offsets[j] + maps.traced_offsets[t]);
      out[j * K + i] = acc;
    }
  return DensityMatrix(maps.kept, std::move(out));
}

inline DensityMatrix partial_trace(const State& s, std::span<const int> keep) {
  return std::visit([keep](const auto& v) { return partial_trace(v, keep); }, s);
}

// ---------------------------------------------------------------------------
// Embedding into a wider window (same physical state, larger cutoffs).
// ---------------------------------------------------------------------------
inline PureState embed(const PureState& s, const CutoffSpec& target) {
  const CutoffSpec& src = s.cutoff();
  if (target.n_modes() != src.n_modes())
    throw DimensionError("embed: mode count mismatch");
  for (int i = 0; i < src.n_modes(); ++i)
    if (target.dim(i) < src.dim(i))
      throw ArgumentError("embed: target cutoff smaller than source on mode " + std::to_string(i));
  std::vector<cplx> out(target.total_dim(), cplx(0.0, 0.0));
  std::vector<int> occ(static_cast<std::size_t>(src.n_modes()));
  for (std::size_t r = 0; r < s.dim(); ++r) {
    if (s.amplitude(r) == cplx(0.0, 0.0)) continue;
    src.unrank(r, occ);
    out[target.rank_of(occ)] = s.amplitude(r);
  }
  return PureState(target, std::move(out));
}

inline DensityMatrix embed(const DensityMatrix& rho, const CutoffSpec& target) {
  const CutoffSpec& src = rho.cutoff();
  if (target.n_modes() != src.n_modes())
    throw DimensionError("embed: mode count mismatch");
  for (int i = 0; i < src.n_modes(); ++i)
    if (target.dim(i) < src.dim(i))
      throw ArgumentError("embed: target cutoff smaller than source on mode " + std::to_string(i));
  std::vector<std::size_t> map(rho.dim());
  std::vector<int> occ(static_cast<std::size_t>(src.n_modes()));
  for (std::size_t r = 0; r < rho.dim(); ++r) {
    src.unrank(r, occ);
    map[r] = target.rank_of(occ);
  }
  const std::size_t D = target.total_dim();
  std::vector<cplx> out(D * D, cplx(0.0, 0.0));
  for (std::size_t j = 0; j < rho.dim(); ++j)
    for (std::size_t i = 0; i < rho.dim(); ++i) out[map[j] * D + map[i]] = rho.at(i, j);
  return DensityMatrix(target, std::move(out));
}

inline State embed(const State& s, const CutoffSpec& target) {
  return std::visit([&target](const auto& v) -> State { return embed(v, target); }, s);
}

// ---------------------------------------------------------------------------
// Ensemble: convex mixture of states.
// ---------------------------------------------------------------------------
class Ensemble {
 public:
  struct Component {
    double weight;
    State state;
  };

  explicit Ensemble(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.empty()) throw ArgumentError("Ensemble: no components");
    double sum = 0.0;
    const CutoffSpec& c0 = cutoff_of(components_.front().state);
    for (const auto& comp : components_) {
      if (!(comp.weight > 0.0) || comp.weight > 1.0 + kNormTol)
        throw ArgumentError("Ensemble: weights must lie in (0, 1]");
      if (!(cutoff_of(comp.state) == c0))
        throw DimensionError("Ensemble: components live on different cutoffs");
      sum += comp.weight;
    }
    if (std::abs(sum - 1.0) > kNormTol)
      throw ArgumentError("Ensemble: weights sum to " + std::to_string(sum) + ", expected 1");
  }

  const std::vector<Component>& components() const { return components_; }
  const CutoffSpec& cutoff() const { return cutoff_of(components_.front().state); }

  DensityMatrix flatten() const {
    const std::size_t d = cutoff().total_dim();
    std::vector<cplx> acc(d * d, cplx(0.0, 0.0));
    for (const auto& comp : components_) {
      if (const auto* psi = std::get_if<PureState>(&comp.state)) {
        const auto a = psi->amplitudes();
        for (std::size_t j = 0; j < d; ++j) {
          const cplx cj = comp.weight * std::conj(a[j]);
          for (std::size_t i = 0; i < d; ++i) acc[j * d + i] += a[i] * cj;
        }
      } else {
        const auto& rho = std::get<DensityMatrix>(comp.state);
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t i = 0; i < d; ++i) acc[j * d + i] += comp.weight * rho.at(i, j);
      }
    }
    return DensityMatrix(cutoff(), std::move(acc));
  }

 private:
  std::vector<Component> components_;
};

}  // namespace mmw
