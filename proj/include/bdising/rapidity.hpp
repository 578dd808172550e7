// Analytic rapidity spectrum of one parity channel. Eigenvalues of the
// channel matrix obey E^2 = J^2 + h^2 + 2Jh cos(theta) where theta solves a
// transcendental boundary equation
//   p1(E) sin(N theta) - p2 sin((N+1) theta) + p3 sin((N-1) theta) = 0,
//   p1(E) = a E + b,  a = iJ(P gL + gR),  b = -(J^3 - J P gL gR),
//   p2 = J^2 h,       p3 = h P gL gR.
// Two solver routes: polynomialization in z = e^{i theta} (companion-matrix
// roots + Newton polish) for moderate degree, and seeded Newton iteration on
// the scaled transcendental form when the polynomial route would involve
// roots too far from the unit circle for reliable folding. Both fall back to
// the channel-matrix eigensolver when the root count comes up short.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "model.hpp"
#include "tmatrix.hpp"

namespace bdising {

struct RapidityMode {
  Parity channel = Parity::even;
  cd theta;
  cd z;  // e^{i theta}
  cd E;
  int sign = +1;  // +1 if E is the principal sqrt branch of E^2(theta)
  double residual = 0.0;  // boundary-equation residual relative to largest term
  bool is_bound_state = false;
  bool is_pure_imaginary_E = false;  // Re theta = pi within tolerance
};

struct RapiditySpectrum {
  Parity channel = Parity::even;
  std::vector<RapidityMode> modes;  // exactly 2N
  ModelParams params;
  std::string route;  // "polynomial", "newton", or "matrix" (fallback)
  Vec eigenvalues() const {
    Vec e(static_cast<Eigen::Index>(modes.size()));
    for (std::size_t i = 0; i < modes.size(); ++i) e(static_cast<Eigen::Index>(i)) = modes[i].E;
    return e;
  }
};

struct BoundStateCount {
  int n_pure_imaginary_pairs = 0;
  int n_generic_complex_pairs = 0;
};

inline constexpr double tol_pure_imaginary_theta = 1e-6;   // |Re theta - pi|
inline constexpr double mode_residual_tol = 1e-6;          // relative residual gate
inline constexpr double poly_route_log_limit = 480.0;      // degree * ln(max|z|) budget

struct BoundaryCoeffs {
  cd a;      // coefficient of E in p1
  cd b;      // constant part of p1
  double p2 = 0.0;
  double p3 = 0.0;
};

inline BoundaryCoeffs boundary_coeffs(const ModelParams& p, Parity parity) {
  const double J = p.J;
  const double h = p.uniform_field() ? p.h : p.h_list.front();
  const double sign_p = static_cast<double>(parity_sign(parity));
  BoundaryCoeffs c;
  c.a = cd(0.0, J * (sign_p * p.gamma_left + p.gamma_right));
  c.b = -(J * J * J - J * sign_p * p.gamma_left * p.gamma_right);
  c.p2 = J * J * h;
  c.p3 = h * sign_p * p.gamma_left * p.gamma_right;
  return c;
}

inline cd energy_squared_from_theta(cd theta, const ModelParams& p) {
  const double h = p.uniform_field() ? p.h : p.h_list.front();
  return p.J * p.J + h * h + 2.0 * p.J * h * std::cos(theta);
}

// Principal-branch energy; modes carry sign = -1 for the other branch.
inline cd energy_from_theta(cd theta, const ModelParams& p) {
  return std::sqrt(energy_squared_from_theta(theta, p));
}

// sin(k theta) and cos(k theta) scaled by e^{-m}, m = (N+1)|Im theta|, so all
// exponentials stay <= 1 in magnitude for k <= N+1. Ratios and relative
// residuals are exact; only the common scale is dropped.
struct ScaledTrig {
  cd sin_nm1, sin_n, sin_np1;
  cd cos_nm1, cos_n, cos_np1;
  double log_scale = 0.0;  // m; true value = stored * e^{m}
};

inline ScaledTrig scaled_trig(cd theta, int n) {
  const double m = (static_cast<double>(n) + 1.0) * std::abs(theta.imag());
  const cd i_unit(0.0, 1.0);
  auto pair_at = [&](int k) {
    const cd ep = std::exp(i_unit * (static_cast<double>(k) * theta) - m);
    const cd em = std::exp(-i_unit * (static_cast<double>(k) * theta) - m);
    return std::pair<cd, cd>{(ep - em) / (2.0 * i_unit), (ep + em) / 2.0};
  };
  ScaledTrig t;
  t.log_scale = m;
  std::tie(t.sin_nm1, t.cos_nm1) = pair_at(n - 1);
  std::tie(t.sin_n, t.cos_n) = pair_at(n);
  std::tie(t.sin_np1, t.cos_np1) = pair_at(n + 1);
  return t;
}

// Raw boundary-equation value. Overflows for huge N |Im theta|; internal
// solvers use the scaled relative form below instead.
inline cd boundary_equation_residual(cd theta, cd E, const ModelParams& p, Parity parity) {
  const BoundaryCoeffs c = boundary_coeffs(p, parity);
  const double n = p.n_sites;
  return (c.a * E + c.b) * std::sin(n * theta) - c.p2 * std::sin((n + 1.0) * theta) +
         c.p3 * std::sin((n - 1.0) * theta);
}

inline double relative_boundary_residual(cd theta, cd E, const ModelParams& p, Parity parity) {
  const BoundaryCoeffs c = boundary_coeffs(p, parity);
  const ScaledTrig t = scaled_trig(theta, p.n_sites);
  const cd t1 = (c.a * E + c.b) * t.sin_n;
  const cd t2 = c.p2 * t.sin_np1;
  const cd t3 = c.p3 * t.sin_nm1;
  const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3),
                                 std::numeric_limits<double>::min()});
  return std::abs(t1 - t2 + t3) / scale;
}

// theta -> -theta flips every sin(k theta), and theta -> theta + 2pi fixes
// them all, so both maps preserve the root set (with the same E). Fold to the
// representative Re theta in (0, pi]; on the Re = pi line pick Im >= 0, at
// Re = 0 pick Im > 0.
inline cd fold_theta(cd theta) {
  double re = std::remainder(theta.real(), 2.0 * M_PI);  // (-pi, pi]
  double im = theta.imag();
  if (re < 0.0 || (re == 0.0 && im < 0.0)) {
    re = -re;
    im = -im;
  }
  if (std::abs(re - M_PI) < 1e-14 && im < 0.0) im = -im;  // pi - i t ~ pi + i t
  return cd(re, im);
}

struct PolishResult {
  cd theta;
  cd E;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// Newton iteration on f(theta) = p1(E(theta)) S_N - p2 S_{N+1} + p3 S_{N-1}
// with the energy branch tracked by continuity from E_seed: at each step the
// sqrt branch of E^2(theta) closer to the previous E is kept. f and f' share
// the e^{-m} scale so the Newton step is overflow-safe.
inline PolishResult newton_polish(cd theta0, cd E_seed, const ModelParams& p, Parity parity,
                                  int max_iter = 40) {
  const BoundaryCoeffs c = boundary_coeffs(p, parity);
  const double n = p.n_sites;
  const double h = p.uniform_field() ? p.h : p.h_list.front();
  cd theta = theta0;
  cd E_cur = E_seed;
  PolishResult out;
  for (int it = 0; it < max_iter; ++it) {
    const cd e2 = energy_squared_from_theta(theta, p);
    cd E = std::sqrt(e2);
    if (std::abs(E - E_cur) > std::abs(-E - E_cur)) E = -E;
    E_cur = E;
    const ScaledTrig t = scaled_trig(theta, p.n_sites);
    const cd p1 = c.a * E + c.b;
    const cd f = p1 * t.sin_n - c.p2 * t.sin_np1 + c.p3 * t.sin_nm1;
    const cd dE = (std::abs(E) > 1e-12) ? (-p.J * h * std::sin(theta) / E) : cd(0.0);
    const cd df = c.a * dE * t.sin_n + p1 * n * t.cos_n - c.p2 * (n + 1.0) * t.cos_np1 +
                  c.p3 * (n - 1.0) * t.cos_nm1;
    if (std::abs(df) < std::numeric_limits<double>::min()) break;
    const cd step = f / df;
    theta -= step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(theta))) break;
  }
  theta = fold_theta(theta);
  const cd e2 = energy_squared_from_theta(theta, p);
  cd E = std::sqrt(e2);
  if (std::abs(E - E_cur) > std::abs(-E - E_cur)) E = -E;
  out.theta = theta;
  out.E = E;
  out.residual = relative_boundary_residual(theta, E, p, parity);
  out.converged = out.residual < mode_residual_tol;
  return out;
}

// Inverse map: theta = arccos((E^2 - J^2 - h^2)/(2Jh)), branch picked among
// {+-theta, +-conj theta} by minimal boundary residual after folding. The
// parity only affects the tie-break through the residual.
inline cd theta_from_eigenvalue(cd E, const ModelParams& p, Parity parity = Parity::even) {
  if (p.J == 0.0) throw std::invalid_argument("theta_from_eigenvalue: J must be nonzero");
  const double h = p.uniform_field() ? p.h : p.h_list.front();
  if (h == 0.0) throw std::invalid_argument("theta_from_eigenvalue: h must be nonzero");
  const cd cos_theta = (E * E - p.J * p.J - h * h) / (2.0 * p.J * h);
  const cd theta0 = std::acos(cos_theta);
  const cd candidates[4] = {theta0, -theta0, std::conj(theta0), -std::conj(theta0)};
  cd best = fold_theta(theta0);
  double best_res = std::numeric_limits<double>::infinity();
  for (const cd& cand : candidates) {
    const cd folded = fold_theta(cand);
    const double res = relative_boundary_residual(folded, E, p, parity);
    if (res < best_res) {
      best_res = res;
      best = folded;
    }
  }
  return best;
}

namespace detail {

// Thermodynamic-limit bound-state roots: both channels share the limiting
// quadratic J^2 h x^2 - J(J^2+g^2) x + h g^2 = 0 for z = -x; finite-N bound
// roots sit exponentially close to these.
inline std::pair<cd, cd> bound_x_pair(const ModelParams& p) {
  const double J = p.J, g = p.gamma();
  const double h = p.uniform_field() ? p.h : p.h_list.front();
  const cd disc = cd((J * J + g * g) * (J * J + g * g) - 4.0 * h * h * g * g, 0.0);
  const cd root = std::sqrt(disc);
  const cd x_plus = ((J * J + g * g) + root) / (2.0 * J * h);
  const cd x_minus = ((J * J + g * g) - root) / (2.0 * J * h);
  return {x_plus, x_minus};
}

inline double max_root_magnitude_estimate(const ModelParams& p) {
  const auto [xp, xm] = bound_x_pair(p);
  double rho = 2.0;
  for (const cd& x : {xp, xm}) {
    const double ax = std::abs(x);
    if (ax > rho) rho = ax;
    if (ax > 1e-300 && 1.0 / ax > rho) rho = 1.0 / ax;
  }
  return rho;
}

// Odd channel: p1 is E-free, so z^{N+1} * equation is already polynomial:
//   -p2 z^{2N+2} + p1 z^{2N+1} + p3 z^{2N} - p3 z^2 - p1 z + p2.
inline std::vector<cd> build_odd_polynomial(const ModelParams& p) {
  const BoundaryCoeffs c = boundary_coeffs(p, Parity::odd);
  const int n = p.n_sites;
  std::vector<cd> coeff(2 * n + 3, cd(0.0));
  coeff[0] = c.p2;
  coeff[1] = -c.b;  // p1 = b (a = 0 for symmetric dissipation)
  coeff[2] = -c.p3;
  coeff[2 * n] = c.p3;
  coeff[2 * n + 1] = c.b;
  coeff[2 * n + 2] = -c.p2;
  return coeff;
}

// Even channel: eliminate E by squaring. With A = b S_N - p2 S_{N+1} + p3 S_{N-1},
// f(+E) f(-E) = A^2 - a^2 E^2 S_N^2; in z this times z^{2N+2} is a degree
// 4N+4 polynomial, assembled by convolving sparse Laurent coefficient arrays.
inline std::vector<cd> build_even_polynomial(const ModelParams& p) {
  const BoundaryCoeffs c = boundary_coeffs(p, Parity::even);
  const int n = p.n_sites;
  const double h = p.uniform_field() ? p.h : p.h_list.front();
  // Laurent arrays indexed by exponent + offset. 2i sin(k theta) = z^k - z^-k,
  // so work with the tilde forms and divide the (2i)^2 out of both terms.
  const int off_a = n + 1;
  std::vector<cd> a_tilde(2 * n + 3, cd(0.0));  // exponents -(N+1)..(N+1)
  a_tilde[off_a + n] += c.b;
  a_tilde[off_a - n] -= c.b;
  a_tilde[off_a + n + 1] -= c.p2;
  a_tilde[off_a - (n + 1)] += c.p2;
  a_tilde[off_a + n - 1] += c.p3;
  a_tilde[off_a - (n - 1)] -= c.p3;
  std::vector<cd> s_tilde(2 * n + 1, cd(0.0));  // exponents -N..N
  s_tilde[2 * n] = 1.0;
  s_tilde[0] = -1.0;
  auto conv = [](const std::vector<cd>& u, const std::vector<cd>& v) {
    std::vector<cd> w(u.size() + v.size() - 1, cd(0.0));
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] == cd(0.0)) continue;
      for (std::size_t j = 0; j < v.size(); ++j) w[i + j] += u[i] * v[j];
    }
    return w;
  };
  std::vector<cd> poly = conv(a_tilde, a_tilde);  // exponents -(2N+2)..(2N+2)
  // -a^2 E^2(z) = 4 J^2 g^2 (Jh z + (J^2+h^2) + Jh z^-1) for symmetric g.
  const double gg = -std::real(c.a * c.a);  // = 4 J^2 g^2
  std::vector<cd> weight = {cd(gg * p.J * h), cd(gg * (p.J * p.J + h * h)), cd(gg * p.J * h)};
  const std::vector<cd> sn2 = conv(conv(s_tilde, s_tilde), weight);  // -(2N+1)..(2N+1)
  for (std::size_t i = 0; i < sn2.size(); ++i) poly[i + 1] += sn2[i];
  return poly;  // ascending, degree 4N+4
}

struct ThetaClass {
  cd theta;
  cd seed_z;
};

// Remove `count` roots nearest the spurious point z0 (theta = 0 or pi).
// Genuine band-edge roots sit at distance ~pi/N from +-1 while the spurious
// roots land within companion accuracy, so demand a wide separation margin.
inline bool remove_spurious(std::vector<cd>& roots, cd z0, int count) {
  for (int k = 0; k < count; ++k) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const double d = std::abs(roots[i] - z0);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    if (best_d > 1e-3) return false;
    roots.erase(roots.begin() + static_cast<std::ptrdiff_t>(best));
    double kept_min = std::numeric_limits<double>::infinity();
    for (const cd& r : roots) kept_min = std::min(kept_min, std::abs(r - z0));
    if (k + 1 == count && kept_min < 10.0 * std::max(best_d, 1e-12)) return false;
  }
  return true;
}

// Fold z <-> 1/z partners positionally: repeatedly take the largest remaining
// root as class seed and discard the remaining root closest to its inverse.
// Mis-pairing among clustered roots only affects which partner is discarded;
// the seed (and the Newton polish after it) fixes the class.
inline std::vector<ThetaClass> fold_root_pairs(std::vector<cd> roots) {
  std::vector<ThetaClass> classes;
  while (roots.size() >= 2) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < roots.size(); ++i)
      if (std::abs(roots[i]) > std::abs(roots[imax])) imax = i;
    const cd seed = roots[imax];
    roots.erase(roots.begin() + static_cast<std::ptrdiff_t>(imax));
    const cd target = 1.0 / seed;
    std::size_t ipart = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const double d = std::abs(roots[i] - target);
      if (d < best) {
        best = d;
        ipart = i;
      }
    }
    roots.erase(roots.begin() + static_cast<std::ptrdiff_t>(ipart));
    ThetaClass tc;
    tc.seed_z = seed;
    tc.theta = fold_theta(cd(0.0, -1.0) * std::log(seed));
    classes.push_back(tc);
  }
  return classes;
}

inline std::string format_root_list(const std::vector<cd>& roots) {
  std::ostringstream os;
  os.precision(12);
  for (const cd& r : roots) os << " (" << r.real() << (r.imag() < 0 ? "" : "+") << r.imag() << "i)";
  return os.str();
}

}  // namespace detail

inline void require_solvable(const ModelParams& p, const char* who) {
  validate(p);
  if (!p.uniform_field())
    throw std::invalid_argument(std::string(who) + ": uniform field required");
  if (!p.symmetric_dissipation())
    throw std::invalid_argument(std::string(who) + ": symmetric dissipation required");
  if (p.J == 0.0) throw std::invalid_argument(std::string(who) + ": J must be nonzero");
  if (p.h == 0.0) throw std::invalid_argument(std::string(who) + ": h must be nonzero");
}

namespace detail {

inline RapidityMode make_mode(cd theta, cd E, const ModelParams& p, Parity parity) {
  RapidityMode m;
  m.channel = parity;
  m.theta = theta;
  m.z = std::exp(cd(0.0, 1.0) * theta);
  m.E = E;
  const cd principal = energy_from_theta(theta, p);
  m.sign = (std::abs(E - principal) <= std::abs(E + principal)) ? +1 : -1;
  m.residual = relative_boundary_residual(theta, E, p, parity);
  m.is_bound_state = std::abs(theta.imag()) > 1e-6 * p.n_sites;
  m.is_pure_imaginary_E = std::abs(theta.real() - M_PI) < tol_pure_imaginary_theta;
  return m;
}

inline void sort_modes(std::vector<RapidityMode>& modes) {
  std::sort(modes.begin(), modes.end(), [](const RapidityMode& a, const RapidityMode& b) {
    if (a.theta.real() != b.theta.real()) return a.theta.real() < b.theta.real();
    if (a.theta.imag() != b.theta.imag()) return a.theta.imag() < b.theta.imag();
    if (a.E.real() != b.E.real()) return a.E.real() < b.E.real();
    return a.E.imag() < b.E.imag();
  });
}

// Matrix fallback: eigendecompose the channel matrix and invert each
// eigenvalue to theta. The eigenvalues are kept verbatim: they are exact by
// construction, so polishing against the boundary equation could only move
// them (and does not apply at all under non-uniform fields). theta is the
// dispersion inverse, meaningful only when the analytic form applies.
inline RapiditySpectrum solve_via_matrix(const ModelParams& p, Parity parity) {
  RapiditySpectrum spec;
  spec.channel = parity;
  spec.params = p;
  spec.route = "matrix";
  const TMatrix t = build_t(p, parity);
  const Vec ev = eigvals(t.entries);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const cd theta = theta_from_eigenvalue(ev(i), p, parity);
    spec.modes.push_back(make_mode(theta, ev(i), p, parity));
  }
  sort_modes(spec.modes);
  return spec;
}

// Near-coincident root pairs (the almost-degenerate bound pair) sit in a flat
// basin of the boundary function: the residual bottoms out at machine noise
// while the root itself is only determined to eps/spacing, which reaches 1e-7
// once the pair is ~1e-5 apart. The pair limit is semi-simple, so the channel
// matrix eigenproblem stays well conditioned there; adopt its values for
// clustered modes only, leaving the rest to certify the analytic route.
inline bool assist_clustered_modes(std::vector<RapidityMode>& modes, const ModelParams& p,
                                   Parity parity) {
  const std::size_t m = modes.size();
  std::vector<bool> clustered(m, false);
  bool any = false;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double scale = std::max({1.0, std::abs(modes[i].E), std::abs(modes[j].E)});
      if (std::abs(modes[i].E - modes[j].E) < 1e-3 * scale) {
        clustered[i] = clustered[j] = true;
        any = true;
      }
    }
  if (!any) return false;
  const Vec ev = eigvals(build_t(p, parity).entries);
  struct Pair {
    double d;
    std::size_t mode;
    Eigen::Index eig;
  };
  std::vector<Pair> pairs;
  pairs.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < ev.size(); ++k)
      pairs.push_back({std::abs(modes[i].E - ev(k)), i, k});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.mode != b.mode) return a.mode < b.mode;
    return a.eig < b.eig;
  });
  std::vector<bool> mode_used(m, false), eig_used(static_cast<std::size_t>(ev.size()), false);
  for (const Pair& pr : pairs) {
    if (mode_used[pr.mode] || eig_used[static_cast<std::size_t>(pr.eig)]) continue;
    mode_used[pr.mode] = true;
    eig_used[static_cast<std::size_t>(pr.eig)] = true;
    if (clustered[pr.mode]) {
      const cd e = ev(pr.eig);
      modes[pr.mode] = make_mode(theta_from_eigenvalue(e, p, parity), e, p, parity);
    }
  }
  return true;
}

}  // namespace detail

// Odd channel (P = -1): polynomial route of degree 2N+2. Spurious z = +-1 are
// simple roots; the N surviving classes each carry both energy signs.
inline RapiditySpectrum solve_odd_channel(const ModelParams& p) {
  require_solvable(p, "solve_odd_channel");
  const int n = p.n_sites;
  RapiditySpectrum spec;
  spec.channel = Parity::odd;
  spec.params = p;

  const double degree = 2.0 * n + 2.0;
  const double rho = detail::max_root_magnitude_estimate(p);
  const bool poly_ok = degree * std::log(rho) < poly_route_log_limit;

  std::vector<cd> thetas;
  if (poly_ok) {
    spec.route = "polynomial";
    std::vector<cd> roots = to_std(companion_roots(detail::build_odd_polynomial(p)));
    std::vector<cd> raw = roots;
    if (!detail::remove_spurious(roots, cd(1.0), 1) ||
        !detail::remove_spurious(roots, cd(-1.0), 1)) {
      spec = detail::solve_via_matrix(p, Parity::odd);
      spec.route = "matrix";
      return spec;
    }
    const auto classes = detail::fold_root_pairs(std::move(roots));
    for (const auto& tc : classes) {
      PolishResult pol = newton_polish(tc.theta, energy_from_theta(tc.theta, p), p, Parity::odd);
      thetas.push_back(pol.converged ? pol.theta : tc.theta);
    }
    if (static_cast<int>(thetas.size()) != n)
      throw std::runtime_error("solve_odd_channel: expected " + std::to_string(n) +
                               " theta classes, got " + std::to_string(thetas.size()) +
                               "; roots:" + detail::format_root_list(raw));
  } else {
    spec.route = "newton";
    // Real-axis bracketing: every p_i is real in the odd channel so the
    // boundary function is real for real theta.
    auto f_real = [&](double th) {
      const ScaledTrig t = scaled_trig(cd(th, 0.0), n);
      const BoundaryCoeffs c = boundary_coeffs(p, Parity::odd);
      return std::real(c.b * t.sin_n - c.p2 * t.sin_np1 + c.p3 * t.sin_nm1);
    };
    for (int round = 0; round < 2 && static_cast<int>(thetas.size()) != n; ++round) {
      thetas.clear();
      const int grid = (round == 0 ? 16 : 64) * n;
      const double lo_end = M_PI / (4.0 * grid);
      const double hi_end = M_PI - lo_end;
      double prev_th = lo_end;
      double prev_f = f_real(prev_th);
      for (int i = 1; i <= grid; ++i) {
        const double th = lo_end + (hi_end - lo_end) * static_cast<double>(i) / grid;
        const double fv = f_real(th);
        if (std::signbit(fv) != std::signbit(prev_f)) {
          double lo = prev_th, hi = th, flo = prev_f;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f_real(mid);
            if (std::signbit(fm) == std::signbit(flo)) {
              lo = mid;
              flo = fm;
            } else {
              hi = mid;
            }
          }
          const cd th_seed(0.5 * (lo + hi), 0.0);
          PolishResult pol = newton_polish(th_seed, energy_from_theta(th_seed, p), p, Parity::odd);
          if (pol.converged) thetas.push_back(pol.theta);
        }
        prev_th = th;
        prev_f = fv;
      }
      // Bound-state seeds from the limiting quadratic, z = -x and -conj(x).
      const auto [xp, xm] = detail::bound_x_pair(p);
      for (const cd& x : {xp, xm, std::conj(xp), std::conj(xm)}) {
        if (std::abs(x) < 1.0 + 1e-9) continue;
        const cd seed = fold_theta(cd(0.0, -1.0) * std::log(-x));
        PolishResult pol = newton_polish(seed, energy_from_theta(seed, p), p, Parity::odd);
        if (pol.converged) thetas.push_back(pol.theta);
      }
      // Dedup folded thetas.
      std::sort(thetas.begin(), thetas.end(), [](cd a, cd b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
      });
      std::vector<cd> unique_thetas;
      for (const cd& th : thetas) {
        bool dup = false;
        for (const cd& u : unique_thetas)
          if (std::abs(th - u) < 1e-8 * (1.0 + std::abs(u))) dup = true;
        if (!dup) unique_thetas.push_back(th);
      }
      thetas = std::move(unique_thetas);
    }
    if (static_cast<int>(thetas.size()) != n) {
      spec = detail::solve_via_matrix(p, Parity::odd);
      return spec;
    }
  }

  for (const cd& th : thetas) {
    const cd E = energy_from_theta(th, p);
    spec.modes.push_back(detail::make_mode(th, E, p, Parity::odd));
    spec.modes.push_back(detail::make_mode(th, -E, p, Parity::odd));
  }
  if (detail::assist_clustered_modes(spec.modes, p, Parity::odd)) spec.route += "+pair-assist";
  detail::sort_modes(spec.modes);
  return spec;
}

// Even channel (P = +1): the energy enters p1 linearly, so square to
// eliminate it (degree 4N+4 polynomial, z = +-1 become double roots), then
// recover the sign per class by residual and polish with the branch tracked.
inline RapiditySpectrum solve_even_channel(const ModelParams& p) {
  require_solvable(p, "solve_even_channel");
  const int n = p.n_sites;
  RapiditySpectrum spec;
  spec.channel = Parity::even;
  spec.params = p;

  const double degree = 4.0 * n + 4.0;
  const double rho = detail::max_root_magnitude_estimate(p);
  const bool poly_ok = degree * std::log(rho) < poly_route_log_limit;

  std::vector<RapidityMode> modes;
  bool ok = false;
  if (poly_ok) {
    spec.route = "polynomial";
    std::vector<cd> roots = to_std(companion_roots(detail::build_even_polynomial(p)));
    if (detail::remove_spurious(roots, cd(1.0), 2) && detail::remove_spurious(roots, cd(-1.0), 2)) {
      const auto classes = detail::fold_root_pairs(std::move(roots));
      if (static_cast<int>(classes.size()) == 2 * n) {
        ok = true;
        for (const auto& tc : classes) {
          // Decide the energy sign at the companion root itself; polishing
          // with the wrong sign would walk theta into the conjugate class.
          const cd Ep = energy_from_theta(tc.theta, p);
          const double rp = relative_boundary_residual(tc.theta, Ep, p, Parity::even);
          const double rm = relative_boundary_residual(tc.theta, -Ep, p, Parity::even);
          PolishResult pol = newton_polish(tc.theta, rp <= rm ? Ep : -Ep, p, Parity::even);
          if (!pol.converged ||
              std::abs(pol.theta - tc.theta) > 0.05 * (1.0 + std::abs(tc.theta))) {
            ok = false;
            break;
          }
          modes.push_back(detail::make_mode(pol.theta, pol.E, p, Parity::even));
        }
      }
    }
  } else {
    spec.route = "newton";
    // Matrix-seeded Newton: cheap and complete for large N, and every
    // accepted mode is still certified by the boundary-equation residual.
    const TMatrix t = build_t(p, Parity::even);
    const Vec ev = eigvals(t.entries);
    ok = true;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      const cd theta = theta_from_eigenvalue(ev(i), p, Parity::even);
      PolishResult pol = newton_polish(theta, ev(i), p, Parity::even);
      if (!pol.converged || std::abs(pol.E - ev(i)) > 1e-6 * (1.0 + std::abs(ev(i)))) {
        ok = false;
        break;
      }
      modes.push_back(detail::make_mode(pol.theta, pol.E, p, Parity::even));
    }
  }

  if (ok) {
    // Exactly degenerate theta slots (thermodynamically merged bound pairs)
    // can both win the same sign; force complementary signs there.
    for (std::size_t i = 0; i + 1 < modes.size() && ok; ++i) {
      for (std::size_t j = i + 1; j < modes.size(); ++j) {
        if (std::abs(modes[i].theta - modes[j].theta) < 1e-9 &&
            std::abs(modes[i].E - modes[j].E) < 1e-9 * (1.0 + std::abs(modes[i].E))) {
          const cd flipped = -modes[j].E;
          const double res = relative_boundary_residual(modes[j].theta, flipped, p, Parity::even);
          if (res < mode_residual_tol) {
            modes[j] = detail::make_mode(modes[j].theta, flipped, p, Parity::even);
          } else {
            ok = false;
          }
          break;
        }
      }
    }
  }
  if (!ok || static_cast<int>(modes.size()) != 2 * n) {
    spec = detail::solve_via_matrix(p, Parity::even);
    return spec;
  }
  if (detail::assist_clustered_modes(modes, p, Parity::even)) spec.route += "+pair-assist";
  spec.modes = std::move(modes);
  detail::sort_modes(spec.modes);
  return spec;
}

inline RapiditySpectrum solve_channel(const ModelParams& p, Parity parity) {
  return parity == Parity::even ? solve_even_channel(p) : solve_odd_channel(p);
}

// Pure matrix route, usable outside the analytic preconditions (non-uniform
// fields, gamma_left != gamma_right). The E values are exact channel-matrix
// eigenvalues; theta is only meaningful when the boundary equation applies.
inline RapiditySpectrum solve_channel_matrix(const ModelParams& p, Parity parity) {
  validate(p);
  if (p.J == 0.0) throw std::invalid_argument("solve_channel_matrix: J must be nonzero");
  if (p.h_at(0) == 0.0) throw std::invalid_argument("solve_channel_matrix: h must be nonzero");
  return detail::solve_via_matrix(p, parity);
}

// Counts bound conjugate pairs, split by Re theta = pi (pure imaginary E)
// versus generic complex location. tol_bound < 0 selects the default
// 1e-6 * N scaling.
inline BoundStateCount classify_bound_states(const RapiditySpectrum& spec,
                                             double tol_bound = -1.0) {
  if (tol_bound < 0.0) tol_bound = 1e-6 * spec.params.n_sites;
  int pure = 0, generic = 0;
  for (const RapidityMode& m : spec.modes) {
    if (std::abs(m.theta.imag()) <= tol_bound) continue;
    if (std::abs(m.theta.real() - M_PI) < tol_pure_imaginary_theta)
      ++pure;
    else
      ++generic;
  }
  if (pure % 2 != 0 || generic % 2 != 0)
    throw std::runtime_error("classify_bound_states: unpaired bound modes (pure=" +
                             std::to_string(pure) + ", generic=" + std::to_string(generic) + ")");
  return {pure / 2, generic / 2};
}

}  // namespace bdising
