// Dense non-Hermitian eigensolvers, companion-matrix polynomial roots, and
// multiset pairing helpers shared by the analytic and oracle modules.
//
// Eigenvalue problems go through LAPACK (zgeev) when BDISING_USE_LAPACK is
// defined; otherwise Eigen's ComplexEigenSolver is used. The LAPACK path is
// the default build: a 2048-dim complex eigenproblem takes seconds instead
// of minutes, which the oracle-equivalence runtime budget requires.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#ifdef BDISING_USE_LAPACK
#include <lapacke.h>
#endif

namespace bdising {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

namespace detail {
#ifdef BDISING_USE_LAPACK
inline lapack_complex_double* lapack_ptr(cd* p) {
  return reinterpret_cast<lapack_complex_double*>(p);
}
#endif
}  // namespace detail

// Eigenvalues of a general complex matrix.
inline Vec eigvals(Mat a) {
  const auto n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("eigvals: matrix not square");
  Vec w(n);
  if (n == 0) return w;
#ifdef BDISING_USE_LAPACK
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'N', static_cast<lapack_int>(n),
      detail::lapack_ptr(a.data()), static_cast<lapack_int>(n),
      detail::lapack_ptr(w.data()), nullptr, 1, nullptr, 1);
  if (info != 0) throw std::runtime_error("zgeev failed, info=" + std::to_string(info));
#else
  Eigen::ComplexEigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw std::runtime_error("ComplexEigenSolver failed");
  w = es.eigenvalues();
#endif
  return w;
}

struct EigPair {
  Vec values;
  Mat right;  // columns are right eigenvectors
};

inline EigPair eig_right(Mat a) {
  const auto n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("eig_right: matrix not square");
  EigPair out;
  out.values.resize(n);
  out.right.resize(n, n);
  if (n == 0) return out;
#ifdef BDISING_USE_LAPACK
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'V', static_cast<lapack_int>(n),
      detail::lapack_ptr(a.data()), static_cast<lapack_int>(n),
      detail::lapack_ptr(out.values.data()), nullptr, 1,
      detail::lapack_ptr(out.right.data()), static_cast<lapack_int>(n));
  if (info != 0) throw std::runtime_error("zgeev failed, info=" + std::to_string(info));
#else
  Eigen::ComplexEigenSolver<Mat> es(a, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) throw std::runtime_error("ComplexEigenSolver failed");
  out.values = es.eigenvalues();
  out.right = es.eigenvectors();
#endif
  return out;
}

struct EigFull {
  Vec values;
  Mat right;   // columns v_i:  A v_i = values_i v_i
  Mat left_h;  // rows u_i^H:   u_i^H A = values_i u_i^H (same index order)
};

inline EigFull eig_full(Mat a) {
  const auto n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("eig_full: matrix not square");
  EigFull out;
  out.values.resize(n);
  out.right.resize(n, n);
  out.left_h.resize(n, n);
  if (n == 0) return out;
#ifdef BDISING_USE_LAPACK
  Mat vl(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'V', 'V', static_cast<lapack_int>(n),
      detail::lapack_ptr(a.data()), static_cast<lapack_int>(n),
      detail::lapack_ptr(out.values.data()),
      detail::lapack_ptr(vl.data()), static_cast<lapack_int>(n),
      detail::lapack_ptr(out.right.data()), static_cast<lapack_int>(n));
  if (info != 0) throw std::runtime_error("zgeev failed, info=" + std::to_string(info));
  out.left_h = vl.adjoint();
#else
  // Right eigenvectors of A and of A^H share index order after matching;
  // Eigen has no combined driver, so diagonalize twice and match greedily.
  Eigen::ComplexEigenSolver<Mat> es(a, true);
  if (es.info() != Eigen::Success) throw std::runtime_error("ComplexEigenSolver failed");
  out.values = es.eigenvalues();
  out.right = es.eigenvectors();
  Eigen::ComplexEigenSolver<Mat> esh(a.adjoint().eval(), true);
  if (esh.info() != Eigen::Success) throw std::runtime_error("ComplexEigenSolver failed");
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double d = std::abs(std::conj(esh.eigenvalues()(j)) - out.values(i));
      if (d < best_d) { best_d = d; best = j; }
    }
    used[static_cast<std::size_t>(best)] = true;
    out.left_h.row(i) = esh.eigenvectors().col(best).adjoint();
  }
#endif
  return out;
}

// Roots of c[0] + c[1] z + ... + c[d] z^d via the companion matrix.
// Leading coefficients below rel_trim * max|c| are trimmed first.
inline Vec companion_roots(std::vector<cd> c, double rel_trim = 1e-14) {
  double scale = 0.0;
  for (const cd& x : c) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) throw std::invalid_argument("companion_roots: zero polynomial");
  while (c.size() > 1 && std::abs(c.back()) < rel_trim * scale) c.pop_back();
  const std::size_t d = c.size() - 1;
  if (d == 0) return Vec(0);
  Mat comp = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i + 1 < d; ++i)
    comp(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = 1.0;
  for (std::size_t i = 0; i < d; ++i)
    comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d - 1)) =
        -c[i] / c[d];
  return eigvals(std::move(comp));
}

// Greedy nearest-neighbour pairing distance between two equally sized
// multisets of complex numbers. Sorts both by (Re, Im) and, for each entry
// of a, scans b's entries in a window ordered by |Re difference| so the
// search can stop early; returns the maximum matched distance.
inline double pairing_distance(std::vector<cd> a, std::vector<cd> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("pairing_distance: size mismatch");
  const auto lex = [](const cd& x, const cd& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  std::sort(a.begin(), a.end(), lex);
  std::sort(b.begin(), b.end(), lex);
  const std::size_t n = a.size();
  std::vector<bool> used(n, false);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // b is sorted by Re; start near the matching Re and expand outward.
    std::size_t lo = static_cast<std::size_t>(
        std::lower_bound(b.begin(), b.end(), a[i], lex) - b.begin());
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = n;
    const auto consider = [&](std::size_t j) {
      if (used[j]) return;
      const double d = std::abs(a[i] - b[j]);
      if (d < best) { best = d; best_j = j; }
    };
    std::size_t l = lo, r = lo;
    while (l > 0 || r < n) {
      bool advanced = false;
      if (r < n) {
        if (b[r].real() - a[i].real() <= best) { consider(r); ++r; advanced = true; }
        else r = n;
      }
      if (l > 0) {
        if (a[i].real() - b[l - 1].real() <= best) { consider(l - 1); --l; advanced = true; }
        else l = 0;
      }
      if (!advanced) break;
    }
    if (best_j == n) throw std::logic_error("pairing_distance: no candidate found");
    used[best_j] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

inline std::vector<cd> to_std(const Vec& v) {
  return std::vector<cd>(v.data(), v.data() + v.size());
}

inline double pairing_distance(const Vec& a, const Vec& b) {
  return pairing_distance(to_std(a), to_std(b));
}

// Symmetric Hausdorff distance between two point sets.
inline double hausdorff_distance(const std::vector<cd>& a, const std::vector<cd>& b) {
  const auto one_sided = [](const std::vector<cd>& from, const std::vector<cd>& to) {
    double worst = 0.0;
    for (const cd& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const cd& y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

inline double hausdorff_distance(const Vec& a, const Vec& b) {
  return hausdorff_distance(to_std(a), to_std(b));
}

}  // namespace bdising
