#pragma once

// Independent ground-truth machinery: dense operator matrices assembled from
// the single-mode ladder definitions (explicit matrix products and Kronecker
// factors, no code shared with the streaming application in fock_core), a
// Schmidt-rank decision for pure states, and a grid search over the phase of
// the collective quadrature form.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "mmw/fock_core.hpp"
#include "mmw/witnesses.hpp"

namespace mmw::oracle {

inline constexpr std::size_t kDimCap = 4096;

struct DenseOperator {
  CutoffSpec cutoff;
  std::vector<cplx> mat;  // row-major, total_dim x total_dim

  std::size_t dim() const { return cutoff.total_dim(); }
  const cplx& at(std::size_t i, std::size_t j) const { return mat[i * dim() + j]; }
};

namespace detail {

using Mat = std::vector<cplx>;  // row-major square

inline Mat eye(std::size_t d) {
  Mat m(d * d, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < d; ++i) m[i * d + i] = 1.0;
  return m;
}

// Single-mode lowering matrix: <n-1| a |n> = sqrt(n).
inline Mat lowering_matrix(std::size_t d) {
  Mat m(d * d, cplx(0.0, 0.0));
  for (std::size_t n = 1; n < d; ++n) m[(n - 1) * d + n] = std::sqrt(static_cast<double>(n));
  return m;
}

inline Mat dagger(const Mat& a, std::size_t d) {
  Mat m(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m[i * d + j] = std::conj(a[j * d + i]);
  return m;
}

inline Mat multiply(const Mat& a, const Mat& b, std::size_t d) {
  Mat m(d * d, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const cplx aik = a[i * d + k];
      if (aik == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < d; ++j) m[i * d + j] += aik * b[k * d + j];
    }
  return m;
}

inline Mat matrix_power(const Mat& a, int p, std::size_t d) {
  Mat m = eye(d);
  for (int k = 0; k < p; ++k) m = multiply(m, a, d);
  return m;
}

inline Mat kron(const Mat& a, std::size_t da, const Mat& b, std::size_t db) {
  Mat m(da * db * da * db);
  for (std::size_t i1 = 0; i1 < da; ++i1)
    for (std::size_t i2 = 0; i2 < db; ++i2)
      for (std::size_t j1 = 0; j1 < da; ++j1)
        for (std::size_t j2 = 0; j2 < db; ++j2)
          m[(i1 * db + i2) * (da * db) + (j1 * db + j2)] = a[i1 * da + j1] * b[i2 * db + j2];
  return m;
}

}  // namespace detail

// Explicit matrix of prod_i (a_i')^{u_i} a_i^{v_i}: per-mode ladder matrices,
// matrix powers, then a Kronecker fold with the last mode fastest.
inline DenseOperator dense_monomial(const CutoffSpec& cutoff, const ModeMonomial& m,
                                    std::size_t cap = kDimCap) {
  if (m.n_modes() != cutoff.n_modes())
    throw DimensionError("dense_monomial: monomial/cutoff mode count mismatch");
  if (cutoff.total_dim() > cap)
    throw CapacityError("dense_monomial: total dimension " + std::to_string(cutoff.total_dim()) +
                        " exceeds cap " + std::to_string(cap));
  detail::Mat full{cplx(1.0, 0.0)};
  std::size_t full_dim = 1;
  for (int i = 0; i < cutoff.n_modes(); ++i) {
    const std::size_t d = static_cast<std::size_t>(cutoff.dim(i));
    const detail::Mat low = detail::lowering_matrix(d);
    const detail::Mat raise = detail::dagger(low, d);
    const detail::Mat mode_op =
        detail::multiply(detail::matrix_power(raise, m.raise_degree(i), d),
                         detail::matrix_power(low, m.lower_degree(i), d), d);
    full = detail::kron(full, full_dim, mode_op, d);
    full_dim *= d;
  }
  return DenseOperator{cutoff, std::move(full)};
}

inline std::vector<cplx> dense_apply(const DenseOperator& op, std::span<const cplx> v) {
  const std::size_t d = op.dim();
  std::vector<cplx> out(d, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < d; ++j) acc += op.at(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

inline cplx dense_expectation(const DenseOperator& op, const PureState& s) {
  if (!(op.cutoff == s.cutoff())) throw DimensionError("dense_expectation: cutoff mismatch");
  const auto w = dense_apply(op, s.amplitudes());
  cplx acc(0.0, 0.0);
  const auto a = s.amplitudes();
  for (std::size_t i = 0; i < w.size(); ++i) acc += std::conj(a[i]) * w[i];
  return acc;
}

inline cplx dense_expectation(const DenseOperator& op, const DensityMatrix& rho) {
  if (!(op.cutoff == rho.cutoff())) throw DimensionError("dense_expectation: cutoff mismatch");
  const std::size_t d = op.dim();
  cplx acc(0.0, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) acc += op.at(i, j) * rho.at(j, i);
  return acc;
}

inline cplx dense_expectation(const DenseOperator& op, const State& s) {
  return std::visit([&op](const auto& v) { return dense_expectation(op, v); }, s);
}

// ---------------------------------------------------------------------------
// Schmidt rank across a bipartition: reshape the amplitude vector into a
// (group occupations) x (complement occupations) matrix and count singular
// values above rel_tol times the largest.  Rank 1 <=> separable across the
// cut.
// ---------------------------------------------------------------------------
struct SchmidtResult {
  int rank = 0;
  std::vector<double> singular_values;
};

inline SchmidtResult schmidt_rank(const PureState& s, const Bipartition& cut,
                                  double rel_tol = 1e-8, std::size_t cap = kDimCap) {
  if (cut.n_modes() != s.n_modes()) throw DimensionError("schmidt_rank: mode count mismatch");
  if (s.dim() > cap)
    throw CapacityError("schmidt_rank: dimension exceeds cap " + std::to_string(cap));
  const CutoffSpec& cutoff = s.cutoff();
  const std::vector<int> rows_modes = cut.group();
  const std::vector<int> cols_modes = cut.complement();

  auto side_dim = [&cutoff](const std::vector<int>& modes) {
    std::size_t d = 1;
    for (int m : modes) d *= static_cast<std::size_t>(cutoff.dim(m));
    return d;
  };
  const std::size_t R = side_dim(rows_modes);
  const std::size_t C = side_dim(cols_modes);

  Eigen::MatrixXcd a(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(C));
  std::vector<int> occ(static_cast<std::size_t>(s.n_modes()));
  for (std::size_t r = 0; r < s.dim(); ++r) {
    cutoff.unrank(r, occ);
    std::size_t ri = 0, ci = 0;
    for (int m : rows_modes) ri = ri * static_cast<std::size_t>(cutoff.dim(m)) +
                                  static_cast<std::size_t>(occ[static_cast<std::size_t>(m)]);
    for (int m : cols_modes) ci = ci * static_cast<std::size_t>(cutoff.dim(m)) +
                                  static_cast<std::size_t>(occ[static_cast<std::size_t>(m)]);
    a(static_cast<Eigen::Index>(ri), static_cast<Eigen::Index>(ci)) = s.amplitude(r);
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  SchmidtResult result;
  const auto& sv = svd.singularValues();
  result.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double top = result.singular_values.empty() ? 0.0 : result.singular_values.front();
  for (double v : result.singular_values)
    if (v > rel_tol * top) ++result.rank;
  return result;
}

// Smallest eigenvalue of a density matrix (on-demand positivity check).
inline double min_eigenvalue(const DensityMatrix& rho) {
  const std::size_t d = rho.dim();
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rho.at(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline std::vector<double> eigenvalues(const DensityMatrix& rho) {
  const std::size_t d = rho.dim();
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rho.at(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return std::vector<double>(es.eigenvalues().data(), es.eigenvalues().data() + d);
}

// ---------------------------------------------------------------------------
// Grid minimization of Var K(phi) for K(phi) = e^{i phi} prod a_i' +
// e^{-i phi} prod a_i.  A uniform grid brackets the minimum; a golden-section
// refinement inside the bracketing interval resolves it to ~1e-9 so the
// closed-form optimum can be checked without ever using the closed form.
// ---------------------------------------------------------------------------
struct GridMinResult {
  double phi = 0.0;
  double value = 0.0;
};

inline GridMinResult grid_min_variance(const State& s, int n_phi) {
  if (n_phi < 4) throw ArgumentError("grid_min_variance: need at least 4 grid points");
  const int n = n_modes_of(s);
  const ModeMonomial all_lower = ModeMonomial::lowering(std::vector<int>(n, 1));
  auto var_at = [&](double phi) { return variance(BalancedForm{all_lower, phi}, s).value; };

  double best_phi = 0.0;
  double best = var_at(0.0);
  const double step = 2.0 * M_PI / static_cast<double>(n_phi);
  for (int k = 1; k < n_phi; ++k) {
    const double phi = step * static_cast<double>(k);
    const double v = var_at(phi);
    if (v < best) {
      best = v;
      best_phi = phi;
    }
  }

  // Golden-section refinement on [best_phi - step, best_phi + step].
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_phi - step, hi = best_phi + step;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = var_at(x1), f2 = var_at(x2);
  while (hi - lo > 1e-7) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = var_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = var_at(x2);
    }
  }
  const double mid = (lo + hi) / 2.0;
  const double fm = var_at(mid);
  GridMinResult r;
  if (fm <= best) {
    r.phi = mid < 0.0 ? mid + 2.0 * M_PI : mid;
    r.value = fm;
  } else {
    r.phi = best_phi;
    r.value = best;
  }
  return r;
}

}  // namespace mmw::oracle
