// The 2N x 2N non-Hermitian single-particle matrix of each parity channel:
// tridiagonal with alternating field/coupling bonds and imaginary corner
// potentials. Its eigenvalues are the rapidity spectrum; parity enters only
// through the sign of the upper-left corner entry.
#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"
#include "model.hpp"

namespace bdising {

struct TMatrix {
  Parity parity = Parity::even;
  int n_sites = 0;
  Mat entries;  // dense storage of the tridiagonal matrix, size 2N x 2N
  ModelParams params;
  int size() const { return 2 * n_sites; }
};

// Pattern: diag = (P*i*gammaL, 0, ..., 0, i*gammaR); off-diagonal bonds
// alternate h_j on (2j-1, 2j) and J on (2j, 2j+1), 1-based.
inline TMatrix build_t(const ModelParams& params, Parity parity) {
  const int n = params.n_sites;
  if (n < 1) throw std::invalid_argument("build_t: n_sites must be >= 1");
  if (!params.h_list.empty() &&
      params.h_list.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("build_t: field list length mismatch");
  TMatrix t;
  t.parity = parity;
  t.n_sites = n;
  t.params = params;
  t.entries = Mat::Zero(2 * n, 2 * n);
  const cd i_unit(0.0, 1.0);
  t.entries(0, 0) = static_cast<double>(parity_sign(parity)) * i_unit * params.gamma_left;
  t.entries(2 * n - 1, 2 * n - 1) = i_unit * params.gamma_right;
  for (int j = 0; j < n; ++j) {
    const double hj = params.h_at(j);
    t.entries(2 * j, 2 * j + 1) = hj;
    t.entries(2 * j + 1, 2 * j) = hj;
  }
  for (int j = 0; j + 1 < n; ++j) {
    t.entries(2 * j + 1, 2 * j + 2) = params.J;
    t.entries(2 * j + 2, 2 * j + 1) = params.J;
  }
  return t;
}

struct BiorthogonalEigensystem {
  Vec values;
  Mat right;  // columns |Psi_j>
  Mat left;   // rows <Phi_j|, scaled so <Phi_i|Psi_j> = delta_ij
  bool exceptional_point = false;
  double min_normalizer = 0.0;          // min_j |<Phi_j|Psi_j>| before scaling
  double reconstruction_residual = 0.0; // max-norm of T - sum E |Psi><Phi|
  double trace_residual = 0.0;          // |sum E - i(P gammaL + gammaR)|
};

// Threshold on the biorthogonal normalizer below which the matrix is treated
// as (numerically) defective; the reconstruction contract is suspended there.
inline constexpr double exceptional_point_tol = 1e-10;

inline BiorthogonalEigensystem eig_biorthogonal(const TMatrix& t) {
  BiorthogonalEigensystem sys;
  EigFull ef = eig_full(t.entries);
  sys.values = std::move(ef.values);
  sys.right = std::move(ef.right);
  sys.left = std::move(ef.left_h);
  const auto n = sys.values.size();
  // LAPACK left rows satisfy u^H T = E u^H with unit norm; rescale each row
  // so that <Phi_i|Psi_i> = 1 unless the normalizer collapses.
  double min_norm = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const cd norm = sys.left.row(i) * sys.right.col(i);
    min_norm = std::min(min_norm, std::abs(norm));
    if (std::abs(norm) >= exceptional_point_tol) sys.left.row(i) /= norm;
  }
  sys.min_normalizer = min_norm;
  sys.exceptional_point = (min_norm < exceptional_point_tol);
  if (!sys.exceptional_point) {
    Mat rebuilt = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      rebuilt += sys.values(i) * (sys.right.col(i) * sys.left.row(i));
    sys.reconstruction_residual = (rebuilt - t.entries).cwiseAbs().maxCoeff();
  }
  const cd expected_trace =
      cd(0.0, 1.0) * (static_cast<double>(parity_sign(t.parity)) * t.params.gamma_left +
                      t.params.gamma_right);
  sys.trace_residual = std::abs(sys.values.sum() - expected_trace);
  return sys;
}

struct SymmetryReport {
  bool applicable = false;  // symmetry statements assume uniform h, gammaL == gammaR
  bool k_symmetry = false;
  bool pt_symmetry = false;          // odd channel only
  bool reflection_symmetry = false;  // even channel only
  double k_matrix_residual = 0.0;    // max |eta T eta + conj(T)|
  double k_pairing_residual = 0.0;   // spectrum vs -conj(spectrum)
  double pt_pairing_residual = 0.0;  // spectrum vs conj(spectrum)
  double reflection_residual = 0.0;  // max |R T R - T|
  double trace_residual = 0.0;
};

// Verifies eta^-1 T eta = -T* with eta = diag(-1, 1, -1, ...), PT reality /
// conjugate pairing for the odd channel, and site-reflection invariance for
// the even channel. Report-only; thresholds scale with the matrix magnitude.
inline SymmetryReport check_symmetries(const TMatrix& t) {
  SymmetryReport rep;
  rep.applicable = t.params.uniform_field() && t.params.symmetric_dissipation();
  if (!rep.applicable) return rep;
  const auto n2 = t.entries.rows();
  const double scale = std::max(1.0, t.entries.cwiseAbs().maxCoeff());
  const double tol = 1e-8 * scale;

  Mat eta_t_eta = t.entries;
  for (Eigen::Index i = 0; i < n2; ++i)
    for (Eigen::Index j = 0; j < n2; ++j)
      if ((i + j) % 2 == 1) eta_t_eta(i, j) = -eta_t_eta(i, j);
  rep.k_matrix_residual = (eta_t_eta + t.entries.conjugate()).cwiseAbs().maxCoeff();

  const Vec vals = eigvals(t.entries);
  rep.k_pairing_residual = pairing_distance(vals, Vec(-vals.conjugate()));
  rep.k_symmetry = rep.k_matrix_residual < tol && rep.k_pairing_residual < tol;

  if (t.parity == Parity::odd) {
    rep.pt_pairing_residual = pairing_distance(vals, Vec(vals.conjugate()));
    rep.pt_symmetry = rep.pt_pairing_residual < tol;
  }
  if (t.parity == Parity::even) {
    Mat reflected(n2, n2);
    for (Eigen::Index i = 0; i < n2; ++i)
      for (Eigen::Index j = 0; j < n2; ++j)
        reflected(i, j) = t.entries(n2 - 1 - i, n2 - 1 - j);
    rep.reflection_residual = (reflected - t.entries).cwiseAbs().maxCoeff();
    rep.reflection_symmetry = rep.reflection_residual < tol;
  }
  const cd expected_trace =
      cd(0.0, 1.0) * (static_cast<double>(parity_sign(t.parity)) * t.params.gamma_left +
                      t.params.gamma_right);
  rep.trace_residual = std::abs(vals.sum() - expected_trace);
  return rep;
}

}  // namespace bdising
