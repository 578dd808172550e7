// End-to-end acceptance checks. Each criterion is a self-contained callable
// with its tolerances pinned here; the acceptance binary and the `validate`
// CLI command both print one pass/fail line per criterion.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "gap.hpp"
#include "model.hpp"
#include "oracle_ed.hpp"
#include "phase.hpp"
#include "rapidity.hpp"
#include "spectrum.hpp"
#include "tmatrix.hpp"

namespace bdising {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace accept {

inline ModelParams mk(int n, double h, double g) {
  ModelParams p;
  p.n_sites = n;
  p.h = h;
  p.gamma_left = p.gamma_right = g;
  return p;
}

inline const std::vector<std::pair<double, double>>& reference_points() {
  static const std::vector<std::pair<double, double>> pts = {
      {0.3, 0.2}, {3.0, 0.2}, {3.0, 5.0}, {3.0, 8.0}};
  return pts;
}

inline std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Shared payload for criteria 1 and 2: analytic assembly and blocked ED
// spectra at N in {3..6} x four reference points. Memoized so a full suite
// run pays the ED cost once.
struct OracleSweep {
  double max_pairing = 0.0;
  double max_re_assembled = -1e300;
  double max_re_ed = -1e300;
  double seconds = 0.0;
};

inline const OracleSweep& oracle_sweep() {
  static const OracleSweep sweep = [] {
    OracleSweep s;
    const auto t0 = std::chrono::steady_clock::now();
    for (int n : {3, 4, 5, 6})
      for (const auto& [h, g] : reference_points()) {
        const ModelParams p = mk(n, h, g);
        const LiouvillianSpectrum analytic =
            assemble(solve_even_channel(p), solve_odd_channel(p), p.gamma());
        const SuperOperator so = build_superoperator(p);
        const ParityMatrix pm = build_parity(n);
        const std::vector<cd> ed = spectrum_by_sectors(so, pm);
        s.max_pairing = std::max(s.max_pairing, pairing_distance(analytic.eigenvalues, ed));
        for (const cd& l : analytic.eigenvalues)
          s.max_re_assembled = std::max(s.max_re_assembled, l.real());
        for (const cd& l : ed) s.max_re_ed = std::max(s.max_re_ed, l.real());
      }
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
  }();
  return sweep;
}

inline CriterionResult criterion1() {
  CriterionResult r{1, "oracle_equivalence", false, "", 0.0};
  const OracleSweep& s = oracle_sweep();
  r.passed = s.max_pairing < 1e-7 && s.seconds < 120.0;
  r.detail = fmt("max pairing error %.3e (tol 1e-7), sweep %.1f s (limit 120 s)", s.max_pairing,
                 s.seconds);
  return r;
}

inline CriterionResult criterion2() {
  CriterionResult r{2, "spectrum_stability", false, "", 0.0};
  const OracleSweep& s = oracle_sweep();
  const double worst = std::max(s.max_re_assembled, s.max_re_ed);
  r.passed = worst <= 1e-9;
  r.detail = fmt("max Re lambda: assembled %.3e, diagonalized %.3e (tol 1e-9)",
                 s.max_re_assembled, s.max_re_ed);
  return r;
}

inline CriterionResult criterion3() {
  CriterionResult r{3, "segment_structure", false, "", 0.0};
  const int expected[4] = {3, 1, 5, 9};
  bool ok = true;
  std::string counts;
  for (std::size_t i = 0; i < reference_points().size(); ++i) {
    const auto& [h, g] = reference_points()[i];
    const ModelParams p = mk(6, h, g);
    const LiouvillianSpectrum spec =
        assemble(solve_even_channel(p), solve_odd_channel(p), p.gamma());
    const int measured = count_segments(spec, 0.0).n_segments;  // jump-detection mode
    const int analytic = segment_count(classify_region(h, g).structure);
    if (!counts.empty()) counts += ", ";
    counts += std::to_string(measured);
    ok = ok && measured == expected[i] && analytic == expected[i];
  }
  r.passed = ok;
  r.detail = "segment counts {" + counts + "}, expected {3, 1, 5, 9}";
  return r;
}

inline CriterionResult criterion4() {
  CriterionResult r{4, "phase_boundaries", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const int grid = 20;
  const double buffer = 0.05;
  int kept = 0, agree = 0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double h = 0.05 + (4.0 - 0.05) * i / (grid - 1);
      const double g = 0.05 + (4.0 - 0.05) * j / (grid - 1);
      const double hc = (1.0 + g * g) / (2.0 * g);
      if (std::abs(h - 1.0) < buffer || std::abs(g - 1.0) < buffer || std::abs(h - hc) < buffer)
        continue;
      ++kept;
      const RegionClassification analytic = classify_region(h, g);
      const BoundStateCount bc = classify_bound_states(solve_odd_channel(mk(100, h, g)));
      SpectrumStructure numeric;
      bool recognized = true;
      if (bc.n_pure_imaginary_pairs == 1 && bc.n_generic_complex_pairs == 0)
        numeric = SpectrumStructure::ThreeSegment;
      else if (bc.n_pure_imaginary_pairs == 0 && bc.n_generic_complex_pairs == 0)
        numeric = SpectrumStructure::OneSegment;
      else if (bc.n_pure_imaginary_pairs == 0 && bc.n_generic_complex_pairs == 2)
        numeric = SpectrumStructure::FiveSegment;
      else if (bc.n_pure_imaginary_pairs == 2 && bc.n_generic_complex_pairs == 0)
        numeric = SpectrumStructure::NineSegment;
      else
        recognized = false;
      if (recognized && numeric == analytic.structure) ++agree;
    }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double frac = kept ? static_cast<double>(agree) / kept : 0.0;
  r.passed = frac >= 0.99 && secs < 300.0;
  r.detail = fmt("agreement %.0f", static_cast<double>(agree)) + "/" +
             fmt("%.0f", static_cast<double>(kept)) +
             fmt(" = %.2f%% (need 99%%), %.1f s (limit 300 s)", 100.0 * frac, secs);
  return r;
}

inline CriterionResult criterion5() {
  CriterionResult r{5, "even_theta_anchor", false, "", 0.0};
  const RapiditySpectrum even = solve_even_channel(mk(6, 3.0, 5.0));
  const cd anchors[2] = {cd(2.61894, -1.60997), cd(2.61962, -1.60891)};
  double worst = 0.0;
  for (const cd& a : anchors) {
    double best = 1e300;
    for (const RapidityMode& m : even.modes) best = std::min(best, std::abs(m.theta - a));
    worst = std::max(worst, best);
  }
  r.passed = worst < 1e-4;
  r.detail = fmt("max anchor distance %.3e (tol 1e-4)", worst);
  return r;
}

inline CriterionResult criterion6() {
  CriterionResult r{6, "gap_scaling", false, "", 0.0};
  bool ok = true;
  std::string detail;
  for (const double g : {0.01, 100.0}) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::vector<int> ns = {32, 64, 128, 256};
    for (const int n : ns) {
      const double x = std::log(static_cast<double>(n));
      const double y = std::log(gap_exact(mk(n, 1.0, g)).delta_g);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = static_cast<double>(ns.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    ok = ok && std::abs(slope + 3.0) <= 0.1;
    if (!detail.empty()) detail += ", ";
    detail += fmt("slope(gamma=%g) = %.4f", g, slope);
  }
  r.passed = ok;
  r.detail = detail + " (want -3 +- 0.1)";
  return r;
}

inline CriterionResult criterion7() {
  CriterionResult r{7, "gap_duality", false, "", 0.0};
  const std::vector<double> gammas = {0.2, 0.5, 2.0, 5.0};
  bool ok = true;
  double worst100 = 0.0;
  for (const double h : {0.3, 3.0}) {
    const auto r100 = duality_scan(h, gammas, 100);
    const auto r50 = duality_scan(h, gammas, 50);
    const auto r200 = duality_scan(h, gammas, 200);
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      worst100 = std::max(worst100, r100[i].mismatch);
      ok = ok && r100[i].mismatch < 0.05 && r200[i].mismatch < r50[i].mismatch;
    }
  }
  r.passed = ok;
  r.detail = fmt("worst N=100 mismatch %.2f%% (tol 5%%); N=200 < N=50: ", 100.0 * worst100) +
             (ok ? "everywhere" : "violated");
  return r;
}

inline CriterionResult criterion8() {
  CriterionResult r{8, "gap_peak", false, "", 0.0};
  bool ok = true;
  std::string detail;
  for (const double h : {0.3, 3.0}) {
    double best_g = 0.0, best_gap = -1.0;
    for (int i = 0; i <= 30; ++i) {
      const double g = std::pow(10.0, -1.0 + 2.0 * i / 30.0);
      const double gap = gap_exact(mk(100, h, g)).delta_g;
      if (gap > best_gap) {
        best_gap = gap;
        best_g = g;
      }
    }
    ok = ok && best_g >= 0.8 && best_g <= 1.25;
    if (!detail.empty()) detail += ", ";
    detail += fmt("argmax(h=%g) = %.3f", h, best_g);
  }
  r.passed = ok;
  r.detail = detail + " (want in [0.8, 1.25])";
  return r;
}

inline CriterionResult criterion9() {
  CriterionResult r{9, "dynamics_oracle", false, "", 0.0};
  std::vector<double> ts;
  for (int i = 0; i <= 100; ++i) ts.push_back(20.0 * i / 100.0);
  bool ok = true;
  std::string detail;
  for (const auto& [h, g] : {std::pair{0.3, 0.2}, std::pair{3.0, 5.0}}) {
    const ModelParams p = mk(4, h, g);
    const SuperOperator so = build_superoperator(p);
    const std::vector<Vec> rho = evolve_density(so, vectorized_pure_state(0u, 4), ts);
    const MagnetizationSeries ms = magnetization_series(p, ts, Gamma0Form::zero_diagonal);
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
      worst = std::max(worst, std::abs(ms.m_z[i] - magnetization_z(rho[i], 4)));
    ok = ok && worst < 1e-6;
    if (!detail.empty()) detail += ", ";
    detail += fmt("max|dm|(h=%g, gamma=%g) = %.3e", h, g, worst);
  }
  r.passed = ok;
  r.detail = detail + " (tol 1e-6, zero-diagonal initial covariance)";
  return r;
}

inline CriterionResult criterion10() {
  CriterionResult r{10, "dynamical_duality", false, "", 0.0};
  std::vector<double> ts;
  for (int i = 0; i <= 600; ++i) ts.push_back(60.0 * i / 600.0);
  const DynamicalDuality d = dynamical_duality_compare(0.3, 0.2, 100, ts);
  bool early_ok = true;
  for (std::size_t i = 0; i < ts.size() && ts[i] < d.t_transient; ++i)
    if (d.m_z[i] < d.m_z_dual[i] - 1e-9) early_ok = false;
  r.passed = d.divergence < 0.02 && early_ok;
  r.detail = fmt("post-crossing divergence %.4f (tol 0.02), slower early decay at gamma=0.2: ",
                 d.divergence) +
             (early_ok ? "yes" : "no");
  return r;
}

inline CriterionResult criterion11() {
  CriterionResult r{11, "disorder_robustness", false, "", 0.0};
  DisorderSpec dspec;
  dspec.delta = 0.1;
  dspec.seed = 1;
  dspec.n_configs = 50;
  bool ok = true;
  std::string detail;
  for (const double g : {5.0, 8.0}) {
    const ModelParams base = mk(6, 3.0, g);
    const LiouvillianSpectrum clean =
        assemble(solve_even_channel(base), solve_odd_channel(base), base.gamma());
    const SegmentDecomposition ref = count_segments(clean, 0.0);
    // Disordered configs are counted at the scale of the clean reference, not
    // by per-config jump detection: disorder erodes the separator/texture gap
    // contrast (43x clean, ~1.2x worst config at gamma=8) while the stripe
    // layout survives, so only a fixed reference-derived scale reads it.
    const double thr = reference_threshold(ref);
    int preserved = 0;
    for (const ModelParams& cfg : sample_disorder(base, dspec)) {
      const LiouvillianSpectrum spec = assemble(
          solve_channel_matrix(cfg, Parity::even), solve_channel_matrix(cfg, Parity::odd),
          cfg.gamma());
      if (count_segments(spec, thr).n_segments == ref.n_segments) ++preserved;
    }
    ok = ok && preserved >= 45;
    if (!detail.empty()) detail += ", ";
    detail += fmt("gamma=%g: %.0f/50 preserved at scale %.3f", g,
                  static_cast<double>(preserved), thr);
  }
  r.passed = ok;
  r.detail = detail + " (need 45/50)";
  return r;
}

inline CriterionResult criterion12() {
  CriterionResult r{12, "symmetry_suite", false, "", 0.0};
  std::mt19937_64 rng(0x5eedULL);
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < 200; ++k) {
    const double h = 0.05 + 3.95 * uniform01(rng());
    const double g = 0.05 + 7.95 * uniform01(rng());
    const int n = 2 + static_cast<int>(uniform01(rng()) * 9.0);
    const ModelParams p = mk(n, h, g);
    const SymmetryReport re = check_symmetries(build_t(p, Parity::even));
    const SymmetryReport ro = check_symmetries(build_t(p, Parity::odd));
    double local = std::max({re.k_matrix_residual, re.k_pairing_residual, re.trace_residual,
                             ro.k_matrix_residual, ro.k_pairing_residual,
                             ro.pt_pairing_residual, ro.trace_residual});
    // Conjugation closure holds for the Liouvillian spectrum, not for a
    // single channel (whose trace is imaginary); verify it on the assembled
    // eigenvalues where enumeration is affordable.
    if (n <= n_max_ed_default) {
      const LiouvillianSpectrum spec = assemble(solve_channel_matrix(p, Parity::even),
                                                solve_channel_matrix(p, Parity::odd), p.gamma());
      std::vector<cd> conj_vals;
      conj_vals.reserve(spec.eigenvalues.size());
      for (const cd& l : spec.eigenvalues) conj_vals.push_back(std::conj(l));
      // Hausdorff, not greedy pairing: conjugation is an involution, so
      // set-distance zero is exactly closure, and it is immune to the
      // partner-stealing noise greedy matching shows in dense clusters.
      local = std::max(local, hausdorff_distance(spec.eigenvalues, conj_vals));
    }
    const bool flags_ok = re.applicable && re.k_symmetry && ro.k_symmetry && ro.pt_symmetry;
    if (!flags_ok || local >= 1e-8) ++failures;
    worst = std::max(worst, local);
  }
  r.passed = failures == 0;
  r.detail = fmt("200 random points, worst residual %.3e (tol 1e-8), %g failures", worst,
                 static_cast<double>(failures));
  return r;
}

}  // namespace accept

// quick = true restricts to the criteria that finish within a minute total.
inline std::vector<CriterionResult> run_acceptance(std::vector<int> only = {},
                                                   bool quick = false) {
  using Fn = CriterionResult (*)();
  static const Fn table[12] = {
      accept::criterion1, accept::criterion2,  accept::criterion3,  accept::criterion4,
      accept::criterion5, accept::criterion6,  accept::criterion7,  accept::criterion8,
      accept::criterion9, accept::criterion10, accept::criterion11, accept::criterion12};
  static const std::vector<int> quick_set = {3, 5, 6, 8, 9, 10, 11, 12};
  if (only.empty()) only = quick ? quick_set : std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<CriterionResult> out;
  for (const int id : only) {
    if (id < 1 || id > 12) throw std::invalid_argument("run_acceptance: criterion id out of range");
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = table[id - 1]();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion_" + std::to_string(id);
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace bdising
