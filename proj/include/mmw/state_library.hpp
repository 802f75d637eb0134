#pragma once

// Constructors for the named states (Fock, GHZ, coherent, odd/even cats,
// products) and seeded random generators for property testing.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "mmw/fock_core.hpp"

namespace mmw {

struct CoherentParams {
  std::vector<cplx> amplitudes;  // one alpha per mode
};

struct CatParams {
  std::vector<cplx> amplitudes;  // alpha, beta, gamma, ...
  int sign = -1;                 // |a,...> + sign |-a,...>
};

// A constructed state plus the squared-norm shortfall the truncation caused
// before renormalization.  Deficits above ~1e-8 mean the cutoff is too tight
// for the requested amplitudes.
struct TruncatedState {
  PureState state;
  double deficit = 0.0;
};

inline constexpr double kDeficitWarnTol = 1e-8;

// |n_1, ..., n_k> basis vector.
inline PureState make_fock(const CutoffSpec& cutoff, std::span<const int> occupations) {
  const std::size_t rank = cutoff.rank_of(occupations);  // validates range
  std::vector<cplx> amps(cutoff.total_dim(), cplx(0.0, 0.0));
  amps[rank] = 1.0;
  return PureState(cutoff, std::move(amps));
}

// (|0...0> + |1...1>)/sqrt(2) on any number of modes >= 2.
inline PureState make_ghz(const CutoffSpec& cutoff) {
  if (cutoff.n_modes() < 2) throw ArgumentError("make_ghz: need at least two modes");
  for (int i = 0; i < cutoff.n_modes(); ++i)
    if (cutoff.dim(i) < 2)
      throw ArgumentError("make_ghz: every mode needs dimension >= 2");
  std::vector<cplx> amps(cutoff.total_dim(), cplx(0.0, 0.0));
  const std::vector<int> ones(static_cast<std::size_t>(cutoff.n_modes()), 1);
  const double r = 1.0 / std::sqrt(2.0);
  amps[0] = r;
  amps[cutoff.rank_of(ones)] = r;
  return PureState(cutoff, std::move(amps));
}

// (|001> + |010> + |101> + |110>)/2, the three-mode benchmark state
// (exposed through the CLI as constructor tag "paper_psi").
inline PureState make_paper_psi(const CutoffSpec& cutoff) {
  if (cutoff.n_modes() != 3) throw ArgumentError("make_paper_psi: exactly three modes required");
  for (int i = 0; i < 3; ++i)
    if (cutoff.dim(i) < 2)
      throw ArgumentError("make_paper_psi: every mode needs dimension >= 2");
  std::vector<cplx> amps(cutoff.total_dim(), cplx(0.0, 0.0));
  const int kets[4][3] = {{0, 0, 1}, {0, 1, 0}, {1, 0, 1}, {1, 1, 0}};
  for (const auto& ket : kets) amps[cutoff.rank_of(ket)] = 0.5;
  return PureState(cutoff, std::move(amps));
}

namespace detail {

// Truncated coherent column c_n = alpha^n / sqrt(n!), built incrementally.
inline std::vector<cplx> coherent_column(cplx alpha, int dim) {
  std::vector<cplx> c(static_cast<std::size_t>(dim));
  c[0] = 1.0;
  for (int n = 1; n < dim; ++n)
    c[static_cast<std::size_t>(n)] =
        c[static_cast<std::size_t>(n - 1)] * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

// Tensor product of per-mode columns, last mode fastest; not normalized.
inline std::vector<cplx> kron_columns(const std::vector<std::vector<cplx>>& cols) {
  std::vector<cplx> full{cplx(1.0, 0.0)};
  for (const auto& col : cols) {
    std::vector<cplx> next(full.size() * col.size());
    std::size_t idx = 0;
    for (const cplx& f : full)
      for (const cplx& c : col) next[idx++] = f * c;
    full = std::move(next);
  }
  return full;
}

}  // namespace detail

// Tensor product of truncated single-mode coherent states, renormalized.
// The deficit 1 - prod_i sum_n |c_n|^2 quantifies the weight the truncation
// removed; it stays below 1e-8 whenever |alpha_i|^2 <= d_i/4 or so.
inline TruncatedState make_coherent(const CutoffSpec& cutoff, const CoherentParams& p) {
  if (static_cast<int>(p.amplitudes.size()) != cutoff.n_modes())
    throw DimensionError("make_coherent: amplitude count != mode count");
  std::vector<std::vector<cplx>> cols;
  for (int i = 0; i < cutoff.n_modes(); ++i)
    cols.push_back(detail::coherent_column(p.amplitudes[static_cast<std::size_t>(i)],
                                           cutoff.dim(i)));
  std::vector<cplx> full = detail::kron_columns(cols);
  double prenorm2 = 0.0;
  for (const cplx& a : full) prenorm2 += std::norm(a);
  // exact (untruncated) squared norm is exp(sum |alpha|^2) * exp(-sum) = 1
  // after the usual e^{-|alpha|^2/2} prefactor, which we never multiplied in;
  // relative to it the truncated weight is prenorm2 / exp(sum).
  double sum_abs2 = 0.0;
  for (const cplx& a : p.amplitudes) sum_abs2 += std::norm(a);
  const double deficit = std::max(0.0, 1.0 - prenorm2 * std::exp(-sum_abs2));
  return TruncatedState{PureState(cutoff, std::move(full)), deficit};
}

// N (|a_1,...> + sign |-a_1,...>); for sign -1 only odd total occupations
// survive and the normalization approaches
// [2 (1 - e^{-2 sum |alpha|^2})]^{-1/2}.
inline TruncatedState make_cat(const CutoffSpec& cutoff, const CatParams& p) {
  if (static_cast<int>(p.amplitudes.size()) != cutoff.n_modes())
    throw DimensionError("make_cat: amplitude count != mode count");
  if (p.sign != 1 && p.sign != -1) throw ArgumentError("make_cat: sign must be +1 or -1");
  bool all_zero = true;
  for (const cplx& a : p.amplitudes)
    if (a != cplx(0.0, 0.0)) all_zero = false;
  if (p.sign == -1 && all_zero)
    throw ArgumentError("make_cat: sign -1 with all-zero amplitudes is degenerate");

  std::vector<std::vector<cplx>> plus_cols, minus_cols;
  for (int i = 0; i < cutoff.n_modes(); ++i) {
    const cplx a = p.amplitudes[static_cast<std::size_t>(i)];
    plus_cols.push_back(detail::coherent_column(a, cutoff.dim(i)));
    minus_cols.push_back(detail::coherent_column(-a, cutoff.dim(i)));
  }
  std::vector<cplx> plus = detail::kron_columns(plus_cols);
  std::vector<cplx> minus = detail::kron_columns(minus_cols);
  double sum_abs2 = 0.0;
  for (const cplx& a : p.amplitudes) sum_abs2 += std::norm(a);
  const double scale = std::exp(-sum_abs2 / 2.0);  // restore e^{-|alpha|^2/2} prefactors
  std::vector<cplx> full(plus.size());
  for (std::size_t r = 0; r < full.size(); ++r)
    full[r] = scale * (plus[r] + static_cast<double>(p.sign) * minus[r]);

  double prenorm2 = 0.0;
  for (const cplx& a : full) prenorm2 += std::norm(a);
  if (!(prenorm2 > 0.0)) throw ArgumentError("make_cat: truncated state vanished");
  const double exact2 =
      2.0 * (1.0 + static_cast<double>(p.sign) * std::exp(-2.0 * sum_abs2));
  const double deficit = std::abs(exact2 - prenorm2);
  return TruncatedState{PureState(cutoff, std::move(full)), deficit};
}

// Tensor product of the given factors; the result lives on the concatenated
// mode list.
inline PureState make_product(std::span<const PureState> factors) {
  if (factors.size() < 2) throw ArgumentError("make_product: need at least two factors");
  std::vector<int> dims;
  for (const PureState& f : factors)
    dims.insert(dims.end(), f.cutoff().dims().begin(), f.cutoff().dims().end());
  std::vector<cplx> full{cplx(1.0, 0.0)};
  for (const PureState& f : factors) {
    std::vector<cplx> next(full.size() * f.dim());
    std::size_t idx = 0;
    for (const cplx& x : full)
      for (const cplx& y : f.amplitudes()) next[idx++] = x * y;
    full = std::move(next);
  }
  return PureState(CutoffSpec(dims), std::move(full));
}

// ---------------------------------------------------------------------------
// Seeded random generators.  Gaussian draws go through an explicit
// Box-Muller transform on mt19937_64 output so the streams are identical on
// every platform.
// ---------------------------------------------------------------------------
namespace detail {

inline double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa draw in (0, 1]; never exactly 0 so logs are safe.
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

inline cplx complex_gaussian(std::mt19937_64& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return cplx(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
}

inline std::vector<cplx> random_unit_vector(std::mt19937_64& rng, std::size_t dim) {
  std::vector<cplx> v(dim);
  for (cplx& a : v) a = complex_gaussian(rng);
  return v;  // PureState constructor normalizes
}

inline void validate_partition(const CutoffSpec& cutoff,
                               const std::vector<std::vector<int>>& partition) {
  std::vector<bool> seen(static_cast<std::size_t>(cutoff.n_modes()), false);
  if (partition.empty()) throw ArgumentError("partition: no groups");
  for (const auto& group : partition) {
    if (group.empty()) throw ArgumentError("partition: empty group");
    for (int m : group) {
      if (m < 0 || m >= cutoff.n_modes())
        throw ArgumentError("partition: mode index out of range");
      if (seen[static_cast<std::size_t>(m)])
        throw ArgumentError("partition: mode " + std::to_string(m) + " appears twice");
      seen[static_cast<std::size_t>(m)] = true;
    }
  }
  for (bool s : seen)
    if (!s) throw ArgumentError("partition: does not cover all modes");
}

// Random pure state per group, tensored back into the full (possibly
// interleaved) mode order.
inline PureState random_product_impl(const CutoffSpec& cutoff,
                                     const std::vector<std::vector<int>>& partition,
                                     std::mt19937_64& rng) {
  validate_partition(cutoff, partition);
  struct Group {
    std::vector<int> modes;
    CutoffSpec spec;
    std::vector<cplx> amps;
  };
  std::vector<Group> groups;
  for (const auto& modes : partition) {
    std::vector<int> sorted = modes;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> dims;
    for (int m : sorted) dims.push_back(cutoff.dim(m));
    CutoffSpec spec(dims);
    auto amps = random_unit_vector(rng, spec.total_dim());
    double n2 = 0.0;
    for (const cplx& a : amps) n2 += std::norm(a);
    const double s = 1.0 / std::sqrt(n2);
    for (cplx& a : amps) a *= s;
    groups.push_back(Group{std::move(sorted), std::move(spec), std::move(amps)});
  }
  std::vector<cplx> full(cutoff.total_dim());
  std::vector<int> occ(static_cast<std::size_t>(cutoff.n_modes()));
  std::vector<int> sub;
  for (std::size_t r = 0; r < full.size(); ++r) {
    cutoff.unrank(r, occ);
    cplx amp(1.0, 0.0);
    for (const Group& g : groups) {
      sub.assign(g.modes.size(), 0);
      for (std::size_t i = 0; i < g.modes.size(); ++i)
        sub[i] = occ[static_cast<std::size_t>(g.modes[i])];
      amp *= g.amps[g.spec.rank_of(sub)];
    }
    full[r] = amp;
  }
  return PureState(cutoff, std::move(full));
}

}  // namespace detail

// Haar-ish random pure state: complex-Gaussian amplitudes, normalized.
inline PureState random_pure(const CutoffSpec& cutoff, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return PureState(cutoff, detail::random_unit_vector(rng, cutoff.total_dim()));
}

inline std::vector<std::vector<int>> singleton_partition(int n_modes) {
  std::vector<std::vector<int>> p;
  for (int i = 0; i < n_modes; ++i) p.push_back({i});
  return p;
}

// Independent random pure state per mode group, tensored.
inline PureState random_product(const CutoffSpec& cutoff,
                                const std::vector<std::vector<int>>& partition,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return detail::random_product_impl(cutoff, partition, rng);
}

inline PureState random_product(const CutoffSpec& cutoff, std::uint64_t seed) {
  return random_product(cutoff, singleton_partition(cutoff.n_modes()), seed);
}

// k product states with uniform-then-normalized weights; fully separable for
// the singleton partition, biseparable for a two-group partition.
inline Ensemble random_separable_mixture(const CutoffSpec& cutoff, int k,
                                         const std::vector<std::vector<int>>& partition,
                                         std::uint64_t seed) {
  if (k < 1) throw ArgumentError("random_separable_mixture: need k >= 1 components");
  detail::validate_partition(cutoff, partition);
  std::mt19937_64 rng(seed);
  std::vector<double> weights(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (double& w : weights) {
    w = detail::uniform01(rng);
    sum += w;
  }
  for (double& w : weights) w /= sum;
  std::vector<Ensemble::Component> comps;
  for (int i = 0; i < k; ++i)
    comps.push_back(Ensemble::Component{weights[static_cast<std::size_t>(i)],
                                        detail::random_product_impl(cutoff, partition, rng)});
  return Ensemble(std::move(comps));
}

}  // namespace mmw
