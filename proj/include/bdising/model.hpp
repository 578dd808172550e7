// Model parameters, parity labels, disorder sampling, shared numeric conventions.
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdising {

// Global tolerance for equality checks; individual routines may override.
inline constexpr double eps_num = 1e-9;

// Largest N for which the dense 4^N superoperator oracle is built by default.
inline constexpr int n_max_ed_default = 6;

// Largest N for which the full 4^N spectrum is enumerated by default.
inline constexpr int n_max_enum_default = 10;

enum class Parity : int { even = +1, odd = -1 };

inline constexpr int parity_sign(Parity p) { return static_cast<int>(p); }
inline constexpr const char* parity_name(Parity p) {
  return p == Parity::even ? "even" : "odd";
}

// Transverse-field Ising chain with boundary dissipation on sites 1 and N.
// The field is uniform (h) unless h_list is non-empty, in which case
// h_list[j] is the field on site j+1 and h keeps the nominal base value.
struct ModelParams {
  double J = 1.0;
  double h = 0.0;
  std::vector<double> h_list{};
  double gamma_left = 0.0;
  double gamma_right = 0.0;
  int n_sites = 2;

  bool uniform_field() const { return h_list.empty(); }
  double h_at(int site) const {  // site is 0-based
    return h_list.empty() ? h : h_list.at(static_cast<std::size_t>(site));
  }
  bool symmetric_dissipation() const { return gamma_left == gamma_right; }
  // Shorthand for the symmetric case gamma_left == gamma_right.
  double gamma() const {
    if (!symmetric_dissipation())
      throw std::logic_error("gamma(): gamma_left != gamma_right");
    return gamma_left;
  }
};

inline ModelParams with_gamma(ModelParams p, double g) {
  p.gamma_left = g;
  p.gamma_right = g;
  return p;
}

// Validates the stated invariants and returns the parameters unchanged.
// J = 0 is allowed here; analytic solvers check J != 0 themselves.
inline ModelParams validate(const ModelParams& p) {
  if (p.n_sites < 2)
    throw std::invalid_argument("ModelParams: n_sites must be >= 2");
  if (p.gamma_left < 0 || p.gamma_right < 0)
    throw std::invalid_argument("ModelParams: dissipation strengths must be >= 0");
  if (!p.h_list.empty() &&
      p.h_list.size() != static_cast<std::size_t>(p.n_sites))
    throw std::invalid_argument("ModelParams: per-site field list must have exactly n_sites entries");
  if (p.h_list.empty() && p.h < 0)
    throw std::invalid_argument("ModelParams: uniform field must be >= 0");
  return p;
}

struct DisorderSpec {
  double delta = 0.0;
  std::uint64_t seed = 0;
  int n_configs = 1;
};

// Maps a raw 64-bit draw to a double in [0, 1). Done by hand because the
// standard-library distributions are implementation-defined; this keeps
// sampled configurations byte-identical across toolchains.
inline double uniform01(std::uint64_t raw) {
  return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

// Draws n_configs parameter sets with h_j = h(1 + delta_j), delta_j uniform
// on (-delta, delta). Deterministic for a fixed seed.
inline std::vector<ModelParams> sample_disorder(const ModelParams& params,
                                                const DisorderSpec& spec) {
  if (!params.uniform_field())
    throw std::invalid_argument("sample_disorder: base parameters must have a uniform field");
  if (spec.delta < 0)
    throw std::invalid_argument("sample_disorder: delta must be >= 0");
  if (spec.n_configs < 1)
    throw std::invalid_argument("sample_disorder: n_configs must be >= 1");
  std::mt19937_64 rng(spec.seed);
  std::vector<ModelParams> out;
  out.reserve(static_cast<std::size_t>(spec.n_configs));
  for (int c = 0; c < spec.n_configs; ++c) {
    ModelParams p = params;
    p.h_list.resize(static_cast<std::size_t>(params.n_sites));
    for (auto& hj : p.h_list) {
      const double u = uniform01(rng());  // in [0,1)
      hj = params.h * (1.0 + spec.delta * (2.0 * u - 1.0));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace bdising
