#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "bdising/gap.hpp"
#include "bdising/linalg.hpp"
#include "bdising/model.hpp"
#include "bdising/oracle_ed.hpp"
#include "bdising/rapidity.hpp"
#include "bdising/spectrum.hpp"

using namespace bdising;

namespace {
ModelParams mk(int n, double h, double g) {
  ModelParams p;
  p.h = h;
  p.n_sites = n;
  p.gamma_left = p.gamma_right = g;
  return p;
}
}  // namespace

TEST_CASE("gap definition", "[gap]") {
  SECTION("no dissipation means no gap") {
    CHECK_THROWS_AS(gap_exact(mk(4, 1.0, 0.0)), std::invalid_argument);
  }
  SECTION("all-zero spectrum is rejected") {
    LiouvillianSpectrum spec;
    spec.eigenvalues = {cd(0.0), cd(0.0, 1e-12)};
    CHECK_THROWS_AS(gap_from_spectrum(spec), std::runtime_error);
  }
  SECTION("slowest pair carries the gap") {
    for (const auto& [n, h, g] : std::vector<std::tuple<int, double, double>>{
             {8, 0.3, 0.2}, {20, 2.0, 1.0}}) {
      const GapResult r = gap_exact(mk(n, h, g));
      REQUIRE(r.channel == Parity::even);
      REQUIRE(r.modes.size() == 2);
      // the two occupied rapidities are a K pair with equal Im E
      CHECK(std::abs(r.modes[0].imag() - r.modes[1].imag()) < 1e-9);
      double min_im = 1e300;
      for (const RapidityMode& m : solve_even_channel(mk(n, h, g)).modes)
        min_im = std::min(min_im, m.E.imag());
      CHECK(min_im > 0.0);
      CHECK(r.delta_g == Catch::Approx(4.0 * min_im).epsilon(1e-12));
    }
  }
  SECTION("frozen values at the degenerate point") {
    CHECK(gap_exact(mk(4, 1.0, 1.0)).delta_g == Catch::Approx(0.148957).epsilon(1e-4));
    CHECK(gap_exact(mk(20, 1.0, 1.0)).delta_g == Catch::Approx(0.00123215).epsilon(1e-4));
  }
}

TEST_CASE("gap matches brute-force diagonalization", "[gap]") {
  for (const double h : {0.3, 1.0, 3.0, 5.0}) {
    for (const double g : {0.5, 1.0, 2.0, 8.0}) {
      const ModelParams p = mk(4, h, g);
      const Vec ev = eigvals(build_superoperator(p).matrix);
      double max_re = -1e300;
      for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) > 1e-8) max_re = std::max(max_re, ev(i).real());
      INFO("h=" << h << " gamma=" << g);
      CHECK(std::abs(gap_exact(p).delta_g + max_re) < 1e-8);
    }
  }
}

TEST_CASE("gap from the assembled spectrum", "[gap]") {
  for (const auto& [h, g] : std::vector<std::pair<double, double>>{{0.3, 0.2}, {3.0, 8.0}}) {
    const ModelParams p = mk(5, h, g);
    const LiouvillianSpectrum li =
        assemble(solve_even_channel(p), solve_odd_channel(p), p.gamma());
    CHECK(std::abs(gap_from_spectrum(li).delta_g - gap_exact(p).delta_g) < 1e-10);
  }
}

TEST_CASE("perturbative limits", "[gap]") {
  // Both closed forms must converge onto the exact gap in their corner, with
  // the error shrinking as the coupling leaves the crossover region.
  const int n = 20;
  const double h = 0.3;
  SECTION("weak dissipation") {
    double prev = 1e300;
    const std::vector<std::pair<double, double>> cases = {
        {0.1, 0.05}, {0.01, 5e-3}, {0.001, 5e-4}};
    for (const auto& [g, bound] : cases) {
      const ModelParams p = mk(n, h, g);
      const double ratio = gap_perturbative_weak(p).delta_g / gap_exact(p).delta_g;
      INFO("gamma=" << g);
      CHECK(std::abs(ratio - 1.0) < bound);
      CHECK(std::abs(ratio - 1.0) < prev);
      prev = std::abs(ratio - 1.0);
    }
  }
  SECTION("strong dissipation") {
    double prev = 1e300;
    const std::vector<std::pair<double, double>> cases = {
        {10.0, 0.05}, {100.0, 5e-3}, {1000.0, 5e-4}};
    for (const auto& [g, bound] : cases) {
      const ModelParams p = mk(n, h, g);
      const double ratio = gap_perturbative_strong(p).delta_g / gap_exact(p).delta_g;
      INFO("gamma=" << g);
      CHECK(std::abs(ratio - 1.0) < bound);
      CHECK(std::abs(ratio - 1.0) < prev);
      prev = std::abs(ratio - 1.0);
    }
  }
}

TEST_CASE("gamma inversion duality", "[gap]") {
  SECTION("self-dual point is exact") {
    const std::vector<DualityRow> rows = duality_scan(3.0, {1.0}, 30);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mismatch == 0.0);
  }
  SECTION("mismatch decays with system size") {
    const double m50 = duality_scan(3.0, {0.2}, 50)[0].mismatch;
    const double m200 = duality_scan(3.0, {0.2}, 200)[0].mismatch;
    CHECK(m50 == Catch::Approx(0.086628).epsilon(1e-3));
    CHECK(m200 == Catch::Approx(0.020986).epsilon(1e-3));
    CHECK(m200 < m50);
  }
  SECTION("positive gamma required") {
    CHECK_THROWS_AS(duality_scan(3.0, {-1.0}, 10), std::invalid_argument);
  }
}
