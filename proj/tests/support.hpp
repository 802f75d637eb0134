#pragma once

// Shared helpers for the test suites: seeded random monomials/forms and
// random states restricted to a support window (headroom states).

#include <cstdint>
#include <random>
#include <vector>

#include "mmw/fock_core.hpp"
#include "mmw/state_library.hpp"

namespace test_support {

using mmw::cplx;
using mmw::CutoffSpec;
using mmw::PureState;

inline double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

inline cplx gaussian(std::mt19937_64& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return cplx(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
}

// Random pure state whose support satisfies n_i <= d_i - headroom on every
// mode, so raising by up to `headroom` never truncates.
inline PureState random_headroom_state(const CutoffSpec& cutoff, int headroom,
                                       std::mt19937_64& rng) {
  std::vector<cplx> amps(cutoff.total_dim(), cplx(0.0, 0.0));
  std::vector<int> occ(static_cast<std::size_t>(cutoff.n_modes()));
  for (std::size_t r = 0; r < amps.size(); ++r) {
    cutoff.unrank(r, occ);
    bool inside = true;
    for (int i = 0; i < cutoff.n_modes(); ++i)
      if (occ[static_cast<std::size_t>(i)] > cutoff.dim(i) - 1 - headroom) inside = false;
    if (inside) amps[r] = gaussian(rng);
  }
  return PureState(cutoff, std::move(amps));
}

// Random monomial with per-mode degrees bounded by max_degree.
inline mmw::ModeMonomial random_monomial(int n_modes, int max_degree, std::mt19937_64& rng) {
  std::vector<int> u(static_cast<std::size_t>(n_modes)), v(static_cast<std::size_t>(n_modes));
  for (int i = 0; i < n_modes; ++i) {
    u[static_cast<std::size_t>(i)] = static_cast<int>(rng() % (max_degree + 1));
    v[static_cast<std::size_t>(i)] = static_cast<int>(rng() % (max_degree + 1));
  }
  return mmw::ModeMonomial(u, v);
}

inline mmw::BalancedForm random_balanced_form(int n_modes, int max_degree,
                                              std::mt19937_64& rng) {
  return mmw::BalancedForm{random_monomial(n_modes, max_degree, rng),
                           2.0 * M_PI * uniform01(rng)};
}

}  // namespace test_support
