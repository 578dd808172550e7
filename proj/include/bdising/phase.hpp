// Thermodynamic-limit classification of the Liouvillian spectral structure
// in the (h, gamma) plane. Bound states correspond to roots x of
//   h x^2 - (1+gamma^2) x + h gamma^2 = 0   (J = 1 units),
// surviving only for |x| > 1; real roots sit at Re theta = pi (pure
// imaginary rapidity), complex ones (|x| = gamma) wander off that line.
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "linalg.hpp"

namespace bdising {

enum class SpectrumStructure { OneSegment, ThreeSegment, FiveSegment, NineSegment };

inline int segment_count(SpectrumStructure s) {
  switch (s) {
    case SpectrumStructure::OneSegment: return 1;
    case SpectrumStructure::ThreeSegment: return 3;
    case SpectrumStructure::FiveSegment: return 5;
    case SpectrumStructure::NineSegment: return 9;
  }
  return 0;
}

inline const char* structure_name(SpectrumStructure s) {
  switch (s) {
    case SpectrumStructure::OneSegment: return "one-segment";
    case SpectrumStructure::ThreeSegment: return "three-segment";
    case SpectrumStructure::FiveSegment: return "five-segment";
    case SpectrumStructure::NineSegment: return "nine-segment";
  }
  return "?";
}

inline std::pair<cd, cd> bound_state_x(double h, double gamma) {
  if (h <= 0.0 || gamma <= 0.0)
    throw std::invalid_argument("bound_state_x: h and gamma must be positive");
  const double s = 1.0 + gamma * gamma;
  const cd disc(s * s - 4.0 * h * h * gamma * gamma, 0.0);
  const cd root = std::sqrt(disc);
  return {(s + root) / (2.0 * h), (s - root) / (2.0 * h)};
}

struct RegionClassification {
  SpectrumStructure structure = SpectrumStructure::OneSegment;
  bool on_boundary = false;
  int segments = 1;
};

// Region map: three-segment for h < 1 (any gamma); for h > 1 the structure is
// one-segment below gamma = 1, nine-segment up to the critical field
// h_c = (1+gamma^2)/(2gamma), five-segment beyond it. Points on h = 1,
// gamma = 1 (h > 1), or h = h_c are flagged; h = 1 with gamma > 1 classifies
// as three-segment, the other boundaries keep the closure of their region.
inline RegionClassification classify_region(double h, double gamma) {
  if (h <= 0.0 || gamma <= 0.0)
    throw std::invalid_argument("classify_region: h and gamma must be positive");
  constexpr double tol = 1e-12;
  const double h_crit = (1.0 + gamma * gamma) / (2.0 * gamma);
  RegionClassification rc;
  const bool at_h1 = std::abs(h - 1.0) <= tol;
  const bool at_g1 = std::abs(gamma - 1.0) <= tol;
  const bool at_hc = gamma > 1.0 && std::abs(h - h_crit) <= tol;
  rc.on_boundary = at_h1 || (at_g1 && h > 1.0) || at_hc;
  if (h < 1.0 || (at_h1 && gamma > 1.0 + tol)) {
    rc.structure = SpectrumStructure::ThreeSegment;
  } else if (at_h1) {
    rc.structure = SpectrumStructure::OneSegment;
  } else if (gamma <= 1.0 + tol) {
    rc.structure = SpectrumStructure::OneSegment;
  } else if (h <= h_crit + tol) {
    rc.structure = SpectrumStructure::NineSegment;
  } else {
    rc.structure = SpectrumStructure::FiveSegment;
  }
  rc.segments = segment_count(rc.structure);
  return rc;
}

// Imaginary parts theta_I = ln x of the pure-imaginary-E bound states in the
// thermodynamic limit: one per real root x > 1. Complex roots (five-segment
// region) are out of scope here.
inline std::vector<double> bound_state_theta_I(double h, double gamma) {
  const auto [xp, xm] = bound_state_x(h, gamma);
  std::vector<double> out;
  for (const cd& x : {xp, xm}) {
    if (std::abs(x.imag()) > 1e-12 * std::abs(x)) continue;
    if (x.real() > 1.0 + 1e-12) out.push_back(std::log(x.real()));
  }
  return out;
}

}  // namespace bdising
