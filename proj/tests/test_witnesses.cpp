#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mmw/oracle.hpp"
#include "mmw/state_library.hpp"
#include "mmw/witnesses.hpp"
#include "support.hpp"

using namespace mmw;

namespace {

// Variance of M' + M computed entirely through the dense oracle route.
double dense_pair_variance_sum(const CutoffSpec& c, const ModeMonomial& m, const PureState& s) {
  const auto dm = oracle::dense_monomial(c, m);
  const auto dma = oracle::dense_monomial(c, m.adjoint());
  const std::size_t d = c.total_dim();
  double total = 0.0;
  for (double phase : {0.0, -M_PI / 2.0}) {
    const cplx eip = std::polar(1.0, phase);
    std::vector<cplx> k(d * d);
    for (std::size_t i = 0; i < d * d; ++i) k[i] = eip * dma.mat[i] + std::conj(eip) * dm.mat[i];
    std::vector<cplx> w(d, cplx(0.0, 0.0));
    const auto a = s.amplitudes();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) w[i] += k[i * d + j] * a[j];
    double w2 = 0.0;
    cplx mean(0.0, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      w2 += std::norm(w[i]);
      mean += std::conj(a[i]) * w[i];
    }
    total += w2 - mean.real() * mean.real();
  }
  return total;
}

}  // namespace

TEST_CASE("pair-variance criterion on the benchmark state at cutoff 3") {
  const PureState psi = make_paper_psi(CutoffSpec({3, 3, 3}));
  const auto r = variance_pair_criterion(State(psi), 2);
  CHECK(r.lhs == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.fired);
  CHECK_FALSE(r.truncation_warning);
  CHECK(r.bipartition == "AB|C");

  // the dense route reproduces the same left-hand side
  const ModeMonomial base({0, 0, 1}, {1, 1, 0});
  CHECK(dense_pair_variance_sum(psi.cutoff(), base, psi) ==
        doctest::Approx(r.lhs).epsilon(1e-12));

  // mixed-state input takes the density path and agrees
  const auto rm = variance_pair_criterion(State(DensityMatrix::from_pure(psi)), 2);
  CHECK(rm.lhs == doctest::Approx(r.lhs).epsilon(1e-10));
}

TEST_CASE("pair-variance criterion: vacuum is silent, GHZ at cutoff 2 fires") {
  const PureState vac = make_fock(CutoffSpec({2, 2, 2}), std::vector<int>{0, 0, 0});
  const auto rv = variance_pair_criterion(State(vac), 2);
  CHECK(rv.lhs == doctest::Approx(0.0));
  CHECK(rv.rhs == doctest::Approx(0.0));
  CHECK_FALSE(rv.fired);

  const PureState ghz = make_ghz(CutoffSpec({2, 2, 2}));
  const auto rg = variance_pair_criterion(State(ghz), 2);
  CHECK(rg.lhs == doctest::Approx(0.0));
  CHECK(rg.rhs == doctest::Approx(4.0));
  CHECK(rg.fired);
  CHECK(rg.truncation_warning);  // both balanced halves leave the 2-level window
  CHECK(dense_pair_variance_sum(ghz.cutoff(), ModeMonomial({0, 0, 1}, {1, 1, 0}), ghz) ==
        doctest::Approx(rg.lhs).epsilon(1e-12));

  CHECK_THROWS_AS(variance_pair_criterion(State(make_ghz(CutoffSpec({2, 2, 2, 2}))), 0),
                  UnsupportedError);
}

TEST_CASE("conjugated-moment criterion: benchmark state and cat state") {
  const PureState psi = make_paper_psi(CutoffSpec({2, 2, 2}));
  const auto r = moment_criterion(State(psi), 2, std::vector<int>{1, 1, 1});
  CHECK(r.lhs == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.fired);
  CHECK(r.bipartition == "AB|C");

  const cplx a(0.8, 0.0);
  const auto cat = make_cat(CutoffSpec({16, 16, 16}), CatParams{{a, a, a}, -1});
  const auto rc = moment_criterion(State(cat.state), 0, std::vector<int>{1, 2, 1});
  const double coth = 1.0 / std::tanh(3 * 0.64);
  CHECK(std::abs(rc.lhs - std::pow(0.8 * 0.64 * 0.8 * coth, 2)) < 1e-6);
  CHECK(std::abs(rc.rhs - 0.4096 * 0.4096) < 1e-6);
  CHECK(rc.fired);
  CHECK(rc.bipartition == "A|BC");

  CHECK_THROWS_AS(moment_criterion(State(psi), 2, std::vector<int>{0, 1, 1}), ArgumentError);
}

TEST_CASE("conjugated-moment criterion: coherent products factorize to equality") {
  const auto coh = make_coherent(CutoffSpec({12, 12, 12}),
                                 CoherentParams{{cplx(0.3, 0.0), cplx(0.4, 0.1), cplx(0.5, 0.0)}});
  for (int mode = 0; mode < 3; ++mode)
    for (const auto& deg :
         {std::vector<int>{1, 1, 1}, std::vector<int>{2, 1, 1}, std::vector<int>{1, 2, 2}}) {
      const auto r = moment_criterion(State(coh.state), mode, deg);
      CHECK(std::abs(r.margin) < 1e-9);
      CHECK_FALSE(r.fired);
    }
}

TEST_CASE("conjugated-moment criterion: out-of-window degrees warn instead of firing") {
  const PureState psi = make_paper_psi(CutoffSpec({2, 2, 2}));
  const auto r = moment_criterion(State(psi), 2, std::vector<int>{2, 2, 2});
  CHECK(r.lhs == doctest::Approx(0.0));
  CHECK(r.rhs == doctest::Approx(0.0));
  CHECK_FALSE(r.fired);
  CHECK(r.truncation_warning);
}

TEST_CASE("split-moment criterion: weighted GHZ fires, balanced GHZ sits on the boundary") {
  CutoffSpec c({2, 2, 2});
  std::vector<cplx> amps(8, cplx(0.0, 0.0));
  amps[0] = std::sqrt(0.75);
  amps[7] = std::sqrt(0.25);
  const PureState weighted(c, std::move(amps));
  const auto r = sqrt_criterion(State(weighted), Bipartition(3, {0}), std::vector<int>{1, 1, 1});
  CHECK(r.lhs == doctest::Approx(std::sqrt(0.1875)).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.fired);

  const PureState ghz = make_ghz(c);
  const auto rb = sqrt_criterion(State(ghz), Bipartition(3, {0}), std::vector<int>{1, 1, 1});
  CHECK(rb.lhs == doctest::Approx(0.5));
  CHECK(rb.rhs == doctest::Approx(0.5));
  CHECK_FALSE(rb.fired);  // equality is not a strict violation

  const PureState prod = random_product(CutoffSpec({3, 3, 3}), 5);
  for (const auto& cut : Bipartition::all(3)) {
    const auto rp = sqrt_criterion(State(prod), cut, std::vector<int>{1, 1, 1});
    CHECK_FALSE(rp.fired);
  }
}

TEST_CASE("collective-phase variance criterion and its closed-form minimum") {
  const PureState ghz2 = make_ghz(CutoffSpec({2, 2, 2}));
  const auto r2 = full_variance_criterion(State(ghz2));
  CHECK(std::abs(r2.lhs) < 1e-10);
  CHECK(r2.fired);
  CHECK(r2.truncation_warning);
  CHECK(std::abs(*r2.phi) < 1e-12);

  const PureState ghz4 = make_ghz(CutoffSpec({4, 4, 4}));
  const auto r4 = full_variance_criterion(State(ghz4));
  CHECK(r4.lhs == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_FALSE(r4.fired);
  CHECK_FALSE(r4.truncation_warning);

  const PureState vac = make_fock(CutoffSpec({3, 3, 3}), std::vector<int>{0, 0, 0});
  const auto rv = full_variance_criterion(State(vac));
  CHECK(rv.lhs == 1.0);
  CHECK_FALSE(rv.fired);

  CHECK_THROWS_AS(full_variance_criterion(State(make_fock(CutoffSpec({4}), std::vector<int>{0}))),
                  UnsupportedError);
}

TEST_CASE("property: closed-form phase minimum matches the grid oracle") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 25; ++trial) {
    const PureState s = random_pure(CutoffSpec({4, 4, 4}), 8000 + trial);
    const auto closed = full_variance_criterion(State(s));
    // the closed form never exceeds any grid sample
    const ModeMonomial low = ModeMonomial::lowering({1, 1, 1});
    for (int k = 0; k < 32; ++k) {
      const double phi = 2.0 * M_PI * k / 32.0;
      CHECK(closed.lhs <= variance(BalancedForm{low, phi}, s).value + 1e-12);
    }
    const auto grid = oracle::grid_min_variance(State(s), 720);
    CHECK(std::abs(closed.lhs - grid.value) < 1e-9);
  }
  (void)rng;
}

TEST_CASE("pure triple-moment criterion: GHZ fires, products and mixtures do not") {
  const PureState ghz = make_ghz(CutoffSpec({2, 2, 2}));
  const auto r = pure_full_criterion(State(ghz), std::vector<int>{1, 1, 1});
  CHECK(r.lhs == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(std::sqrt(0.125)).epsilon(1e-12));
  CHECK(r.fired);

  const PureState prod = random_product(CutoffSpec({3, 3, 3}), 11);
  const auto rp = pure_full_criterion(State(prod), std::vector<int>{1, 1, 1});
  CHECK_FALSE(rp.fired);

  CHECK_THROWS_AS(
      pure_full_criterion(State(DensityMatrix::from_pure(ghz)), std::vector<int>{1, 1, 1}),
      ArgumentError);
}

TEST_CASE("n-mode criteria specialize to the three-mode ones") {
  std::mt19937_64 rng(515);
  for (int trial = 0; trial < 30; ++trial) {
    const PureState s = random_pure(CutoffSpec({3, 4, 3}), 31000 + trial);
    std::vector<int> deg{1 + static_cast<int>(rng() % 2), 1 + static_cast<int>(rng() % 2),
                         1 + static_cast<int>(rng() % 2)};

    // conjugated: cut {0,1} with daggered complement {2} is the daggered-C case
    const auto nm = nmode_moment_criterion(State(s), Bipartition(3, {0, 1}), deg, true);
    const auto m3 = moment_criterion(State(s), 2, deg);
    CHECK(nm.lhs == doctest::Approx(m3.lhs).epsilon(1e-12));
    CHECK(nm.rhs == doctest::Approx(m3.rhs).epsilon(1e-12));
    CHECK(nm.fired == m3.fired);

    // split: same cut, squared version of the sqrt criterion
    const auto ns = nmode_moment_criterion(State(s), Bipartition(3, {0, 1}), deg, false);
    const auto s3 = sqrt_criterion(State(s), Bipartition(3, {0, 1}), deg);
    CHECK(std::sqrt(ns.lhs) == doctest::Approx(s3.lhs).epsilon(1e-12));
    CHECK(std::sqrt(std::max(0.0, ns.rhs)) == doctest::Approx(s3.rhs).epsilon(1e-12));
    CHECK(ns.fired == s3.fired);
  }
}

TEST_CASE("n-mode criteria on the four-mode GHZ and products") {
  const PureState g4 = make_ghz(CutoffSpec({2, 2, 2, 2}));
  const auto split = nmode_moment_criterion(State(g4), Bipartition(4, {0}),
                                            std::vector<int>{1, 1, 1, 1}, false);
  CHECK(split.lhs == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(split.rhs == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_FALSE(split.fired);  // exact boundary

  const PureState prod = random_product(CutoffSpec({2, 2, 2, 2}), 17);
  for (const auto& cut : Bipartition::all(4))
    for (bool conj : {true, false}) {
      const auto r =
          nmode_moment_criterion(State(prod), cut, std::vector<int>{1, 1, 1, 1}, conj);
      CHECK_FALSE(r.fired);
    }
}

TEST_CASE("battery: cat state detects every cut, GHZ detects full entanglement") {
  const cplx a(0.8, 0.0);
  const auto cat = make_cat(CutoffSpec({16, 16, 16}), CatParams{{a, a, a}, -1});
  BatteryConfig cfg;
  cfg.max_degree = 2;
  const auto rep = run_battery(State(cat.state), cfg);
  CHECK(rep.entangled_cuts == std::vector<std::string>{"AB|C", "A|BC", "B|AC"});
  CHECK(rep.fully_entangled_via_all_cuts);
  CHECK(rep.state_is_pure);

  const auto repg = run_battery(State(make_ghz(CutoffSpec({2, 2, 2}))), cfg);
  CHECK(repg.fully_entangled_via_theorem8);
  CHECK(repg.pure_full_via_theorem9);
  CHECK(repg.fully_entangled_via_all_cuts);
}

TEST_CASE("battery: separable mixtures with headroom stay silent") {
  BatteryConfig cfg;
  cfg.max_degree = 2;
  const CutoffSpec draw({4, 4, 4});
  const CutoffSpec window({6, 6, 6});
  for (int i = 0; i < 10; ++i) {
    const Ensemble ens = random_separable_mixture(draw, 1 + (i % 4), singleton_partition(3),
                                                  770000 + i);
    const auto rep = run_battery(State(embed(ens.flatten(), window)), cfg);
    CHECK_FALSE(rep.any_fired());
  }
}

TEST_CASE("battery: deterministic ordering and two-mode support") {
  const PureState ghz = make_ghz(CutoffSpec({2, 2, 2}));
  BatteryConfig cfg;
  cfg.max_degree = 2;
  const auto r1 = run_battery(State(ghz), cfg);
  const auto r2 = run_battery(State(ghz), cfg);
  REQUIRE(r1.results.size() == r2.results.size());
  for (std::size_t i = 0; i < r1.results.size(); ++i) {
    CHECK(r1.results[i].criterion == r2.results[i].criterion);
    CHECK(r1.results[i].bipartition == r2.results[i].bipartition);
    CHECK(r1.results[i].lhs == r2.results[i].lhs);
    CHECK(r1.results[i].margin == r2.results[i].margin);
  }

  // two modes run the n-mode families; the two-mode GHZ analogue fires
  const PureState pair = make_ghz(CutoffSpec({2, 2}));
  const auto rep2 = run_battery(State(pair), cfg);
  CHECK(rep2.n_modes == 2);
  CHECK(rep2.fully_entangled_via_theorem8);

  // selecting a single family restricts the result set
  BatteryConfig only_full;
  only_full.criteria = {CriterionFamily::FullVariance};
  const auto repf = run_battery(State(ghz), only_full);
  CHECK(repf.results.size() == 1);
  CHECK(repf.results.front().criterion == "full_variance");
}
