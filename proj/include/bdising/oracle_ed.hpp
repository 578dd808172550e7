// Brute-force ground truth: the vectorized Lindblad generator as a dense
// 4^N x 4^N matrix, built independently along two routes and compared
// elementwise:
//   route A: i(1 (x) H^T - H (x) 1) + sum_mu [L (x) L* - 1/2(L^dag L (x) 1
//            + 1 (x) L^T L*)]
//   route B: the equivalent two-copy spin form with sigma acting on the row
//            (m) bits and tau on the column (n) bits of the vectorized index
//            v = m * 2^N + n (row-major |m><n| -> |m> (x) |n>).
// Bit j of m/n is site j; bit value 1 means spin down (sigma^z = -1).
#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "linalg.hpp"
#include "model.hpp"

namespace bdising {

struct SuperOperator {
  int n_sites = 0;
  Eigen::Index dim = 0;  // 4^N
  Mat matrix;
  ModelParams params;
};

struct ParityMatrix {
  int n_sites = 0;
  Eigen::VectorXd signs;  // +-1 per vectorized basis index
};

namespace ed_detail {

inline double sz_sign(std::uint32_t bits, int site) {
  return (bits >> site) & 1u ? -1.0 : 1.0;
}

// Dense spin-space operators (2^N x 2^N); N <= 6 keeps these tiny.
inline Mat hamiltonian_dense(const ModelParams& p) {
  const int n = p.n_sites;
  const Eigen::Index d = Eigen::Index(1) << n;
  Mat h = Mat::Zero(d, d);
  for (std::uint32_t m = 0; m < static_cast<std::uint32_t>(d); ++m) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) diag -= p.h_at(j) * sz_sign(m, j);
    h(m, m) = diag;
    for (int j = 0; j + 1 < n; ++j) {
      const std::uint32_t m2 = m ^ (3u << j);  // sigma^x_j sigma^x_{j+1}
      h(m2, m) += -p.J;
    }
  }
  return h;
}

inline Mat jump_operator_dense(const ModelParams& p, bool left) {
  const int n = p.n_sites;
  const Eigen::Index d = Eigen::Index(1) << n;
  Mat l = Mat::Zero(d, d);
  const int site = left ? 0 : n - 1;
  const double amp = std::sqrt(left ? p.gamma_left : p.gamma_right);
  for (std::uint32_t m = 0; m < static_cast<std::uint32_t>(d); ++m)
    l(m ^ (1u << site), m) += amp;
  return l;
}

inline void add_kron(Mat& out, cd alpha, const Mat& a, const Mat& b) {
  const Eigen::Index da = a.rows(), db = b.rows();
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j) {
      const cd av = a(i, j);
      if (av == cd(0.0)) continue;
      for (Eigen::Index k = 0; k < db; ++k)
        for (Eigen::Index l = 0; l < db; ++l) {
          const cd bv = b(k, l);
          if (bv == cd(0.0)) continue;
          out(i * db + k, j * db + l) += alpha * av * bv;
        }
    }
}

inline Mat build_route_a(const ModelParams& p) {
  const Eigen::Index ds = Eigen::Index(1) << p.n_sites;
  const Mat h = hamiltonian_dense(p);
  const Mat id = Mat::Identity(ds, ds);
  Mat out = Mat::Zero(ds * ds, ds * ds);
  const cd i_unit(0.0, 1.0);
  add_kron(out, i_unit, id, h.transpose());
  add_kron(out, -i_unit, h, id);
  for (bool left : {true, false}) {
    const Mat l = jump_operator_dense(p, left);
    const Mat ldl = l.adjoint() * l;
    add_kron(out, 1.0, l, l.conjugate());
    add_kron(out, -0.5, ldl, id);
    add_kron(out, -0.5, id, ldl.transpose().conjugate());
  }
  return out;
}

inline Mat build_route_b(const ModelParams& p) {
  const int n = p.n_sites;
  const Eigen::Index dim = Eigen::Index(1) << (2 * n);
  const std::uint32_t nm = (1u << n) - 1u;
  Mat out = Mat::Zero(dim, dim);
  const cd i_unit(0.0, 1.0);
  for (std::uint64_t v = 0; v < static_cast<std::uint64_t>(dim); ++v) {
    const std::uint32_t m = static_cast<std::uint32_t>(v >> n);
    const std::uint32_t q = static_cast<std::uint32_t>(v) & nm;
    double zsum = 0.0;
    for (int j = 0; j < n; ++j) zsum += p.h_at(j) * (sz_sign(m, j) - sz_sign(q, j));
    out(v, v) += i_unit * zsum - (p.gamma_left + p.gamma_right);
    for (int j = 0; j + 1 < n; ++j) {
      out((std::uint64_t(m ^ (3u << j)) << n) | q, v) += i_unit * p.J;
      out((std::uint64_t(m) << n) | (q ^ (3u << j)), v) += -i_unit * p.J;
    }
    out((std::uint64_t(m ^ 1u) << n) | (q ^ 1u), v) += p.gamma_left;
    const std::uint32_t top = 1u << (n - 1);
    out((std::uint64_t(m ^ top) << n) | (q ^ top), v) += p.gamma_right;
  }
  return out;
}

}  // namespace ed_detail

inline SuperOperator build_superoperator(const ModelParams& p) {
  validate(p);
  if (p.n_sites > n_max_ed_default)
    throw std::invalid_argument("build_superoperator: N exceeds dense-oracle limit " +
                                std::to_string(n_max_ed_default));
  SuperOperator s;
  s.n_sites = p.n_sites;
  s.params = p;
  s.dim = Eigen::Index(1) << (2 * p.n_sites);
  s.matrix = ed_detail::build_route_a(p);
  {
    const Mat alt = ed_detail::build_route_b(p);
    const double diff = (s.matrix - alt).cwiseAbs().maxCoeff();
    if (diff > 1e-10)
      throw std::runtime_error("build_superoperator: construction routes disagree by " +
                               std::to_string(diff));
  }
  return s;
}

inline ParityMatrix build_parity(int n_sites) {
  ParityMatrix pm;
  pm.n_sites = n_sites;
  const Eigen::Index dim = Eigen::Index(1) << (2 * n_sites);
  pm.signs.resize(dim);
  for (Eigen::Index v = 0; v < dim; ++v)
    pm.signs(v) = (__builtin_popcountll(static_cast<unsigned long long>(v)) % 2 == 0) ? 1.0 : -1.0;
  return pm;
}

// Max-norm of [L, P] for diagonal +-1 P: entries mixing the sectors
// contribute |L_uv| * 2, everything else cancels.
inline double parity_commutator_norm(const SuperOperator& s, const ParityMatrix& pm) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < s.dim; ++c)
    for (Eigen::Index r = 0; r < s.dim; ++r)
      if (pm.signs(r) != pm.signs(c)) worst = std::max(worst, std::abs(s.matrix(r, c)));
  return 2.0 * worst;
}

inline std::pair<std::vector<cd>, std::vector<cd>> parity_resolved_spectrum(
    const SuperOperator& s, const ParityMatrix& pm) {
  if (parity_commutator_norm(s, pm) > 1e-8)
    throw std::runtime_error("parity_resolved_spectrum: [L, P] exceeds tolerance");
  std::vector<cd> out[2];
  for (int sector = 0; sector < 2; ++sector) {
    const double want = sector == 0 ? 1.0 : -1.0;
    std::vector<Eigen::Index> idx;
    for (Eigen::Index v = 0; v < s.dim; ++v)
      if (pm.signs(v) == want) idx.push_back(v);
    Mat block(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b)
        block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            s.matrix(idx[a], idx[b]);
    out[sector] = to_std(eigvals(std::move(block)));
  }
  return {std::move(out[0]), std::move(out[1])};
}

namespace ed_detail {

inline std::uint32_t reverse_bits(std::uint32_t m, int n) {
  std::uint32_t r = 0;
  for (int j = 0; j < n; ++j)
    if ((m >> j) & 1u) r |= 1u << (n - 1 - j);
  return r;
}

// Eigenvalues of L restricted to one parity sector, split further by the
// site-reflection symmetry when the parameters allow it. The reflection
// permutation v -> (rev m, rev n) commutes with L for uniform fields and
// symmetric dissipation; orbit combinations (e_v +- e_Rv)/sqrt(2) then block
// the sector into two, roughly halving the eigensolver dimension.
inline std::vector<cd> sector_spectrum_reflected(const SuperOperator& s,
                                                 const std::vector<Eigen::Index>& idx) {
  const int n = s.n_sites;
  const std::uint32_t nm = (1u << n) - 1u;
  auto reflect = [&](Eigen::Index v) -> Eigen::Index {
    const std::uint32_t m = static_cast<std::uint32_t>(v >> n);
    const std::uint32_t q = static_cast<std::uint32_t>(v) & nm;
    return (static_cast<Eigen::Index>(reverse_bits(m, n)) << n) |
           static_cast<Eigen::Index>(reverse_bits(q, n));
  };
  std::vector<cd> all;
  for (int rsign = 0; rsign < 2; ++rsign) {
    // Orthonormal block basis: columns are either fixed points (rsign 0 only)
    // or two-element orbit combos.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> basis;  // (v, Rv); v==Rv fixed
    for (const Eigen::Index v : idx) {
      const Eigen::Index rv = reflect(v);
      if (rv == v) {
        if (rsign == 0) basis.emplace_back(v, v);
      } else if (v < rv) {
        basis.emplace_back(v, rv);
      }
    }
    const Eigen::Index bs = static_cast<Eigen::Index>(basis.size());
    if (bs == 0) continue;
    const double sign = rsign == 0 ? 1.0 : -1.0;
    Mat block(bs, bs);
    for (Eigen::Index a = 0; a < bs; ++a) {
      const auto [u, ru] = basis[static_cast<std::size_t>(a)];
      const double wa = (u == ru) ? 1.0 : M_SQRT1_2;
      for (Eigen::Index b = 0; b < bs; ++b) {
        const auto [v, rv] = basis[static_cast<std::size_t>(b)];
        const double wb = (v == rv) ? 1.0 : M_SQRT1_2;
        cd acc = s.matrix(u, v);
        if (v != rv) acc += sign * s.matrix(u, rv);
        if (u != ru) {
          acc += sign * s.matrix(ru, v);
          if (v != rv) acc += s.matrix(ru, rv);
        }
        block(a, b) = wa * wb * acc;
      }
    }
    const Vec ev = eigvals(std::move(block));
    all.insert(all.end(), ev.data(), ev.data() + ev.size());
  }
  return all;
}

}  // namespace ed_detail

// Full ED spectrum using every available exact block structure: parity
// always, plus site reflection when the parameters are symmetric. The union
// over blocks is the spectrum of the full matrix (verified against direct
// diagonalization in the tests at small N).
inline std::vector<cd> spectrum_by_sectors(const SuperOperator& s, const ParityMatrix& pm) {
  if (parity_commutator_norm(s, pm) > 1e-8)
    throw std::runtime_error("spectrum_by_sectors: [L, P] exceeds tolerance");
  const bool reflect_ok = s.params.uniform_field() && s.params.symmetric_dissipation();
  std::vector<cd> all;
  for (int sector = 0; sector < 2; ++sector) {
    const double want = sector == 0 ? 1.0 : -1.0;
    std::vector<Eigen::Index> idx;
    for (Eigen::Index v = 0; v < s.dim; ++v)
      if (pm.signs(v) == want) idx.push_back(v);
    if (reflect_ok) {
      const std::vector<cd> part = ed_detail::sector_spectrum_reflected(s, idx);
      all.insert(all.end(), part.begin(), part.end());
    } else {
      Mat block(idx.size(), idx.size());
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b)
          block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
              s.matrix(idx[a], idx[b]);
      const Vec ev = eigvals(std::move(block));
      all.insert(all.end(), ev.data(), ev.data() + ev.size());
    }
  }
  return all;
}

inline Vec vectorized_pure_state(std::uint32_t spin_bits, int n_sites) {
  const Eigen::Index dim = Eigen::Index(1) << (2 * n_sites);
  Vec rho = Vec::Zero(dim);
  rho((static_cast<Eigen::Index>(spin_bits) << n_sites) | spin_bits) = 1.0;
  return rho;
}

inline cd trace_of(const Vec& rho, int n_sites) {
  const Eigen::Index d = Eigen::Index(1) << n_sites;
  cd tr(0.0);
  for (Eigen::Index m = 0; m < d; ++m) tr += rho(m * d + m);
  return tr;
}

// Site-averaged magnetization (1/N) sum_j tr(sigma^z_j rho).
inline double magnetization_z(const Vec& rho, int n_sites) {
  const Eigen::Index d = Eigen::Index(1) << n_sites;
  cd acc(0.0);
  for (Eigen::Index m = 0; m < d; ++m) {
    double zsum = 0.0;
    for (int j = 0; j < n_sites; ++j)
      zsum += ed_detail::sz_sign(static_cast<std::uint32_t>(m), j);
    acc += zsum * rho(m * d + m);
  }
  if (std::abs(acc.imag()) > 1e-8)
    throw std::runtime_error("magnetization_z: non-real expectation value");
  return acc.real() / n_sites;
}

// Propagate the vectorized density matrix to each time in t_list (ascending).
// Primary route: eigen-expansion of L; if the eigenbasis is ill-conditioned
// the scaled matrix exponential takes over. Trace preservation is enforced.
inline std::vector<Vec> evolve_density(const SuperOperator& s, const Vec& rho0,
                                       const std::vector<double>& t_list) {
  if (rho0.size() != s.dim) throw std::invalid_argument("evolve_density: state size mismatch");
  if (std::abs(trace_of(rho0, s.n_sites) - cd(1.0)) > 1e-8)
    throw std::invalid_argument("evolve_density: initial state must have unit trace");
  for (std::size_t i = 0; i + 1 < t_list.size(); ++i)
    if (t_list[i + 1] < t_list[i])
      throw std::invalid_argument("evolve_density: t_list must be ascending");

  std::vector<Vec> out;
  out.reserve(t_list.size());
  bool expansion_ok = true;
  EigPair ep;
  Vec coeff;
  {
    ep = eig_right(s.matrix);
    Eigen::PartialPivLU<Mat> lu(ep.right);
    coeff = lu.solve(rho0);
    const double resid = (ep.right * coeff - rho0).norm();
    if (!(resid < 1e-8 * std::max(1.0, rho0.norm()))) expansion_ok = false;
  }
  if (expansion_ok) {
    for (const double t : t_list) {
      Vec scaled = coeff;
      for (Eigen::Index i = 0; i < scaled.size(); ++i)
        scaled(i) *= std::exp(ep.values(i) * t);
      out.push_back(ep.right * scaled);
    }
  } else {
    Vec state = rho0;
    double t_prev = 0.0;
    for (const double t : t_list) {
      const double dt = t - t_prev;
      if (dt > 0.0) state = (Mat(s.matrix * dt)).exp() * state;
      t_prev = t;
      out.push_back(state);
    }
  }
  for (const Vec& rho : out)
    if (std::abs(trace_of(rho, s.n_sites) - cd(1.0)) > 1e-8)
      throw std::runtime_error("evolve_density: trace drift beyond tolerance");
  return out;
}

}  // namespace bdising
