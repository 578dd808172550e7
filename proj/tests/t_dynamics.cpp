#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "bdising/dynamics.hpp"
#include "bdising/gap.hpp"
#include "bdising/linalg.hpp"
#include "bdising/model.hpp"
#include "bdising/oracle_ed.hpp"

using namespace bdising;

namespace {
ModelParams mk(int n, double h, double g) {
  ModelParams p;
  p.h = h;
  p.n_sites = n;
  p.gamma_left = p.gamma_right = g;
  return p;
}

std::vector<double> grid(double t0, double t1, int steps) {
  std::vector<double> t(steps);
  for (int i = 0; i < steps; ++i)
    t[i] = t0 + (t1 - t0) * static_cast<double>(i) / (steps - 1);
  return t;
}
}  // namespace

TEST_CASE("equation of motion matrix", "[dynamics]") {
  SECTION("two-site block") {
    const XMatrix x = build_x(mk(2, 0.7, 0.4));
    Eigen::MatrixXd want(4, 4);
    want << -0.8, 0.0, 1.4, 0.0,   //
        0.0, 0.0, -2.0, 1.4,       //
        -1.4, 2.0, 0.0, 0.0,       //
        0.0, -1.4, 0.0, -0.8;
    CHECK((x.m - want).cwiseAbs().maxCoeff() < 1e-14);
  }
  SECTION("asymmetric dissipation is rejected") {
    ModelParams p = mk(3, 0.5, 0.2);
    p.gamma_right = 0.7;
    CHECK_THROWS_AS(build_x(p), std::invalid_argument);
  }
  SECTION("closed chain generates rotations only") {
    const Vec ev = eigvals(build_x(mk(6, 1.3, 0.0)).m.cast<cd>());
    double max_abs_re = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      max_abs_re = std::max(max_abs_re, std::abs(ev(i).real()));
    CHECK(max_abs_re < 1e-12);
  }
  SECTION("dissipation only damps") {
    for (const auto& [h, g] : std::vector<std::pair<double, double>>{
             {0.3, 0.2}, {2.0, 1.0}, {3.0, 5.0}}) {
      const Vec ev = eigvals(build_x(mk(8, h, g)).m.cast<cd>());
      double max_re = -1e300;
      for (Eigen::Index i = 0; i < ev.size(); ++i) max_re = std::max(max_re, ev(i).real());
      CHECK(max_re <= 1e-10);
    }
  }
}

TEST_CASE("initial covariance", "[dynamics]") {
  SECTION("fully polarized start") {
    for (const Gamma0Form form : {Gamma0Form::zero_diagonal, Gamma0Form::lower_right_minus_i}) {
      const CovarianceState s = gamma0_all_up(3, form);
      CHECK(magnetization(s) == Catch::Approx(1.0).epsilon(1e-14));
    }
    const Mat g = gamma0_all_up(4, Gamma0Form::zero_diagonal).gamma;
    CHECK((g + g.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(gamma0_all_up(2, Gamma0Form::lower_right_minus_i).gamma(3, 3) == cd(0.0, -1.0));
    CHECK_THROWS_AS(gamma0_all_up(0), std::invalid_argument);
  }
  SECTION("matches the spin-basis covariance of the all-up state") {
    // Independent route: realize the Majorana pair per site directly in the
    // 2^N spin space with Jordan-Wigner strings and evaluate
    // i<w_a w_b> - (i/2) delta_ab in the all-up state.
    const int n = 3;
    const Mat sx = (Mat(2, 2) << 0, 1, 1, 0).finished();
    const Mat sy = (Mat(2, 2) << 0, cd(0, -1), cd(0, 1), 0).finished();
    const Mat sz = (Mat(2, 2) << 1, 0, 0, -1).finished();
    const Mat id2 = Mat::Identity(2, 2);
    const auto kron = [](const Mat& a, const Mat& b) {
      Mat out(a.rows() * b.rows(), a.cols() * b.cols());
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
          out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
      return out;
    };
    // site l occupies bit l, so it is the l-th factor from the right
    const auto string_op = [&](int site, const Mat& head) {
      Mat op = Mat::Identity(1, 1);
      for (int l = n - 1; l >= 0; --l) {
        const Mat f = l < site ? Mat(-sz) : (l == site ? head : id2);
        op = kron(op, f);
      }
      return op;
    };
    std::vector<Mat> w;
    for (int j = 0; j < n; ++j) w.push_back(string_op(j, sx) / std::sqrt(2.0));
    for (int j = 0; j < n; ++j) w.push_back(string_op(j, sy) / std::sqrt(2.0));
    Mat want(2 * n, 2 * n);
    for (int a = 0; a < 2 * n; ++a)
      for (int b = 0; b < 2 * n; ++b)
        want(a, b) = cd(0, 1) * (w[a] * w[b])(0, 0) - (a == b ? cd(0, 0.5) : cd(0));
    const Mat got = gamma0_all_up(n, Gamma0Form::zero_diagonal).gamma;
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("magnetization readout", "[dynamics]") {
  CovarianceState s;
  s.gamma = Mat::Zero(4, 4);
  CHECK(magnetization(s) == 0.0);
  s.gamma(2, 0) = cd(0.0, 1.0);
  CHECK_THROWS_AS(magnetization(s), std::runtime_error);
}

TEST_CASE("evolution basics", "[dynamics]") {
  const ModelParams p = mk(4, 0.3, 0.2);
  const XMatrix x = build_x(p);
  const CovarianceState g0 = gamma0_all_up(4);
  SECTION("time zero returns the initial state") {
    const Evolution ev = evolve(x, g0, {0.0});
    REQUIRE(ev.states.size() == 1);
    CHECK((ev.states[0].gamma - g0.gamma).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_FALSE(ev.used_fallback);
  }
  SECTION("time grid must be ascending and nonnegative") {
    CHECK_THROWS_AS(evolve(x, g0, {1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(x, g0, {-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(x, g0, {}), std::invalid_argument);
    CHECK_THROWS_AS(magnetization_series(p, {}), std::invalid_argument);
  }
}

TEST_CASE("relaxation empties the chain", "[dynamics]") {
  // At this point the gap is 0.149, so by t = 200 every covariance entry is
  // dead to machine precision.
  const ModelParams p = mk(4, 1.0, 1.0);
  const Evolution ev = evolve(build_x(p), gamma0_all_up(4), {200.0});
  REQUIRE(ev.states.size() == 1);
  CHECK(ev.states[0].gamma.cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(magnetization(ev.states[0])) < 1e-8);
}

TEST_CASE("matches the density-matrix oracle", "[dynamics]") {
  const ModelParams p = mk(4, 0.3, 0.2);
  const std::vector<double> ts = grid(0.0, 20.0, 11);
  const MagnetizationSeries series = magnetization_series(p, ts);
  const SuperOperator so = build_superoperator(p);
  const std::vector<Vec> rhos = evolve_density(so, vectorized_pure_state(0, 4), ts);
  REQUIRE(rhos.size() == ts.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    worst = std::max(worst, std::abs(series.m_z[i] - magnetization_z(rhos[i], 4)));
  CHECK(worst < 1e-6);
  CHECK(series.m_z[0] == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spectral and integrator routes agree", "[dynamics]") {
  const ModelParams p = mk(20, 0.3, 0.2);
  const XMatrix x = build_x(p);
  const std::vector<double> ts = grid(0.0, 10.0, 5);
  const MagnetizationSeries series = magnetization_series(p, ts);
  REQUIRE_FALSE(series.used_fallback);
  Mat g = gamma0_all_up(20).gamma;
  double t_prev = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    g = dyn_detail::advance_adaptive(x.m, g, t_prev, ts[i]);
    t_prev = ts[i];
    CovarianceState s;
    s.gamma = g;
    s.time = ts[i];
    CHECK(std::abs(series.m_z[i] - magnetization(s)) < 1e-7);
  }
}

TEST_CASE("diagonal convention does not matter", "[dynamics]") {
  const ModelParams p = mk(6, 0.3, 0.2);
  const std::vector<double> ts = {0.0, 1.0, 5.0, 10.0};
  const MagnetizationSeries a = magnetization_series(p, ts, Gamma0Form::zero_diagonal);
  const MagnetizationSeries b = magnetization_series(p, ts, Gamma0Form::lower_right_minus_i);
  for (std::size_t i = 0; i < ts.size(); ++i)
    CHECK(std::abs(a.m_z[i] - b.m_z[i]) < 1e-12);
}

TEST_CASE("tail decay rate matches the gap", "[dynamics]") {
  // Fit the late-time exponential and compare with the spectral gap. The
  // window starts past the subleading modes (second rate is 2(Im E1 + Im E3),
  // well separated here).
  const ModelParams p = mk(20, 2.0, 1.0);
  const double gap = gap_exact(p).delta_g;
  const std::vector<double> ts = grid(600.0, 800.0, 11);
  const MagnetizationSeries series = magnetization_series(p, ts);
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double y = std::log(std::abs(series.m_z[i]));
    st += ts[i];
    sy += y;
    stt += ts[i] * ts[i];
    sty += ts[i] * y;
  }
  const double nn = static_cast<double>(ts.size());
  const double rate = -(nn * sty - st * sy) / (nn * stt - st * st);
  CHECK(rate == Catch::Approx(gap).epsilon(0.10));
}

TEST_CASE("gamma inversion duality of the dynamics", "[dynamics]") {
  SECTION("self-dual point") {
    const DynamicalDuality d = dynamical_duality_compare(3.0, 1.0, 12, grid(0.0, 5.0, 51));
    CHECK(d.divergence == 0.0);
  }
  SECTION("divergence halves with system size") {
    const std::vector<double> ts = grid(0.0, 10.0, 201);
    double prev = 1e300;
    std::vector<double> divs;
    for (const int n : {25, 50, 100}) {
      const DynamicalDuality d = dynamical_duality_compare(3.0, 0.2, n, ts);
      CHECK(d.divergence > 0.0);
      CHECK(d.divergence < prev);
      prev = d.divergence;
      divs.push_back(d.divergence);
    }
    CHECK(divs[0] / divs[1] == Catch::Approx(2.0).margin(0.5));
    CHECK(divs[1] / divs[2] == Catch::Approx(2.0).margin(0.5));
  }
  SECTION("guards") {
    CHECK_THROWS_AS(dynamical_duality_compare(3.0, 0.0, 10, {0.0, 1.0}),
                    std::invalid_argument);
  }
}
