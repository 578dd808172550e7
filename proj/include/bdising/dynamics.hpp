// Relaxation dynamics of the average magnetization. The covariance matrix
// of the 2N Majorana modes obeys d/dt Gamma = X Gamma + Gamma X^T (the
// inhomogeneous term vanishes for boundary spin-flip dissipation), so one
// spectral decomposition of X gives Gamma(t) at every requested time, with
// an adaptive Runge-Kutta fallback when X is near-defective.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "model.hpp"

namespace bdising {

struct XMatrix {
  int n_sites = 0;
  Eigen::MatrixXd m;  // 2N x 2N real
};

struct CovarianceState {
  Mat gamma;  // 2N x 2N complex
  double time = 0.0;
};

// The printed initial covariance carries -i on the lower-right diagonal
// block, but the defining relation Gamma_jk = i<w_j w_k> - (i/2) delta_jk
// with w_j^2 = 1/2 forces a zero diagonal. Both candidates are kept; the
// small-size density-matrix oracle adjudicates the default.
enum class Gamma0Form { zero_diagonal, lower_right_minus_i };

inline XMatrix build_x(const ModelParams& p) {
  validate(p);
  if (!p.symmetric_dissipation())
    throw std::invalid_argument("build_x: requires gamma_left == gamma_right");
  const int n = p.n_sites;
  XMatrix x;
  x.n_sites = n;
  x.m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  x.m(0, 0) = -2.0 * p.gamma();
  x.m(2 * n - 1, 2 * n - 1) = -2.0 * p.gamma();
  for (int j = 0; j < n; ++j) {
    x.m(j, n + j) = 2.0 * p.h_at(j);
    x.m(n + j, j) = -2.0 * p.h_at(j);
  }
  for (int j = 1; j < n; ++j) {
    x.m(j, n + j - 1) = -2.0 * p.J;
    x.m(n + j - 1, j) = 2.0 * p.J;
  }
  return x;
}

inline CovarianceState gamma0_all_up(int n_sites, Gamma0Form form = Gamma0Form::zero_diagonal) {
  if (n_sites < 1) throw std::invalid_argument("gamma0_all_up: need at least one site");
  CovarianceState s;
  s.time = 0.0;
  s.gamma = Mat::Zero(2 * n_sites, 2 * n_sites);
  for (int j = 0; j < n_sites; ++j) {
    s.gamma(j, n_sites + j) = cd(-0.5, 0.0);
    s.gamma(n_sites + j, j) = cd(0.5, 0.0);
    if (form == Gamma0Form::lower_right_minus_i) s.gamma(n_sites + j, n_sites + j) = cd(0.0, -1.0);
  }
  return s;
}

inline double magnetization(const CovarianceState& s) {
  const int n = static_cast<int>(s.gamma.rows()) / 2;
  cd acc(0.0);
  for (int j = 0; j < n; ++j) acc += s.gamma(n + j, j) - s.gamma(j, n + j);
  acc /= static_cast<double>(n);
  if (std::abs(acc.imag()) > 1e-6)
    throw std::runtime_error("magnetization: imaginary residue " + std::to_string(acc.imag()));
  return acc.real();
}

namespace dyn_detail {

struct XSpectral {
  Vec s;   // eigenvalues of X
  Mat v;   // right eigenvectors (columns)
  Mat w;   // v^{-1}
  bool usable = false;
};

inline XSpectral decompose(const XMatrix& x) {
  XSpectral d;
  const int m = static_cast<int>(x.m.rows());
  EigPair e = eig_right(x.m.cast<cd>());
  d.s = e.values;
  d.v = e.right;
  d.w = e.right.partialPivLu().solve(Mat::Identity(m, m));
  const double scale = std::max(1.0, x.m.cwiseAbs().maxCoeff());
  const double resid =
      (d.v * d.s.asDiagonal() * d.w - x.m.cast<cd>()).cwiseAbs().maxCoeff();
  d.usable = resid < 1e-8 * scale;
  return d;
}

inline Mat rhs(const Eigen::MatrixXd& x, const Mat& g) {
  return x.cast<cd>() * g + g * x.transpose().cast<cd>();
}

// Classic fourth-order step with step-doubling error control.
inline Mat rk4_step(const Eigen::MatrixXd& x, const Mat& g, double dt) {
  const Mat k1 = rhs(x, g);
  const Mat k2 = rhs(x, g + (0.5 * dt) * k1);
  const Mat k3 = rhs(x, g + (0.5 * dt) * k2);
  const Mat k4 = rhs(x, g + dt * k3);
  return g + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline Mat advance_adaptive(const Eigen::MatrixXd& x, Mat g, double t0, double t1) {
  const double tol = 1e-10;
  double t = t0;
  double dt = std::min(0.01, (t1 - t0 > 0.0 ? t1 - t0 : 0.01));
  while (t < t1 - 1e-15) {
    dt = std::min(dt, t1 - t);
    const Mat full = rk4_step(x, g, dt);
    const Mat half = rk4_step(x, rk4_step(x, g, 0.5 * dt), 0.5 * dt);
    const double err = (full - half).cwiseAbs().maxCoeff() /
                       std::max(1.0, half.cwiseAbs().maxCoeff());
    if (err < tol || dt < 1e-12) {
      g = half;
      t += dt;
      if (err > 0.0) dt *= std::clamp(0.9 * std::pow(tol / err, 0.2), 0.25, 4.0);
    } else {
      dt *= std::clamp(0.9 * std::pow(tol / err, 0.2), 0.1, 0.9);
    }
  }
  return g;
}

inline void require_time_grid(const std::vector<double>& t_list, const char* who) {
  if (t_list.empty()) throw std::invalid_argument(std::string(who) + ": empty time grid");
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    if (t_list[i] < 0.0) throw std::invalid_argument(std::string(who) + ": negative time");
    if (i > 0 && t_list[i] < t_list[i - 1])
      throw std::invalid_argument(std::string(who) + ": time grid must be ascending");
  }
}

}  // namespace dyn_detail

struct Evolution {
  std::vector<CovarianceState> states;
  bool used_fallback = false;
};

inline Evolution evolve(const XMatrix& x, const CovarianceState& gamma0,
                        const std::vector<double>& t_list) {
  dyn_detail::require_time_grid(t_list, "evolve");
  Evolution out;
  dyn_detail::XSpectral d = dyn_detail::decompose(x);
  if (d.usable) {
    const Mat c = d.w * gamma0.gamma * d.w.transpose();
    // Propagator identity at t = 0 doubles as a conditioning gate.
    const double id_err = (d.v * c * d.v.transpose() - gamma0.gamma).cwiseAbs().maxCoeff();
    if (id_err > 1e-10 * std::max(1.0, gamma0.gamma.cwiseAbs().maxCoeff())) d.usable = false;
    if (d.usable) {
      const int m = static_cast<int>(x.m.rows());
      for (const double t : t_list) {
        Vec f(m);
        for (int j = 0; j < m; ++j) f(j) = std::exp(d.s(j) * t);
        Mat dmat = c.cwiseProduct(f * f.transpose());
        CovarianceState s;
        s.gamma = d.v * dmat * d.v.transpose();
        s.time = t;
        out.states.push_back(std::move(s));
      }
      return out;
    }
  }
  out.used_fallback = true;
  Mat g = gamma0.gamma;
  double t_prev = 0.0;
  for (const double t : t_list) {
    g = dyn_detail::advance_adaptive(x.m, g, t_prev, t);
    t_prev = t;
    out.states.push_back(CovarianceState{g, t});
  }
  return out;
}

struct MagnetizationSeries {
  std::vector<double> t;
  std::vector<double> m_z;
  bool used_fallback = false;
};

// m^z(t) without materializing Gamma(t): with X = V S V^{-1} and
// C = V^{-1} Gamma(0) V^{-T}, the trace against the magnetization kernel
// collapses to f^T Q f with f_j = exp(s_j t).
inline MagnetizationSeries magnetization_series(const ModelParams& p,
                                                const std::vector<double>& t_list,
                                                Gamma0Form form = Gamma0Form::zero_diagonal) {
  dyn_detail::require_time_grid(t_list, "magnetization_series");
  const XMatrix x = build_x(p);
  const CovarianceState g0 = gamma0_all_up(p.n_sites, form);
  MagnetizationSeries out;
  out.t = t_list;
  dyn_detail::XSpectral d = dyn_detail::decompose(x);
  if (d.usable) {
    const int n = p.n_sites, m = 2 * n;
    const Mat c = d.w * g0.gamma * d.w.transpose();
    const double id_err = (d.v * c * d.v.transpose() - g0.gamma).cwiseAbs().maxCoeff();
    if (id_err <= 1e-10) {
      Mat kernel = Mat::Zero(m, m);  // m^z = (1/N) tr(kernel * Gamma)
      for (int j = 0; j < n; ++j) {
        kernel(j, n + j) = cd(1.0);
        kernel(n + j, j) = cd(-1.0);
      }
      const Mat g = d.v.transpose() * kernel * d.v;
      Mat q(m, m);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) q(a, b) = c(a, b) * g(b, a);
      for (const double t : t_list) {
        Vec f(m);
        for (int j = 0; j < m; ++j) f(j) = std::exp(d.s(j) * t);
        const cd val = (f.transpose() * q * f)(0, 0) / static_cast<double>(n);
        if (std::abs(val.imag()) > 1e-6)
          throw std::runtime_error("magnetization_series: imaginary residue");
        out.m_z.push_back(val.real());
      }
      return out;
    }
  }
  Evolution ev = evolve(x, g0, t_list);
  out.used_fallback = true;
  for (const CovarianceState& s : ev.states) out.m_z.push_back(magnetization(s));
  return out;
}

struct DynamicalDuality {
  std::vector<double> t;
  std::vector<double> m_z;       // at gamma
  std::vector<double> m_z_dual;  // at 1/gamma
  double t_transient = 0.0;      // first crossing unless overridden
  double divergence = 0.0;       // max |difference| past the transient
};

inline DynamicalDuality dynamical_duality_compare(double h, double gamma, int n_sites,
                                                  const std::vector<double>& t_list,
                                                  double t_transient = -1.0, double J = 1.0,
                                                  Gamma0Form form = Gamma0Form::zero_diagonal) {
  if (gamma <= 0.0) throw std::invalid_argument("dynamical_duality_compare: gamma must be positive");
  ModelParams p;
  p.J = J;
  p.h = h;
  p.n_sites = n_sites;
  p.gamma_left = p.gamma_right = gamma;
  DynamicalDuality out;
  out.t = t_list;
  out.m_z = magnetization_series(p, t_list, form).m_z;
  p.gamma_left = p.gamma_right = 1.0 / gamma;
  out.m_z_dual = magnetization_series(p, t_list, form).m_z;
  if (t_transient >= 0.0) {
    out.t_transient = t_transient;
  } else {
    out.t_transient = t_list.front();
    for (std::size_t i = 1; i < t_list.size(); ++i) {
      const double d0 = out.m_z[i - 1] - out.m_z_dual[i - 1];
      const double d1 = out.m_z[i] - out.m_z_dual[i];
      if (d0 == 0.0 || (std::signbit(d0) != std::signbit(d1))) {
        out.t_transient = t_list[i];
        break;
      }
    }
  }
  for (std::size_t i = 0; i < t_list.size(); ++i)
    if (t_list[i] > out.t_transient)
      out.divergence = std::max(out.divergence, std::abs(out.m_z[i] - out.m_z_dual[i]));
  return out;
}

}  // namespace bdising
