#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "aqm/states.hpp"

namespace aqm::nonmarkov {

using aqm::DensityMatrix;
using aqm::HilbertSpace;
using aqm::Matrix;

// Qubit on resonance with a vacuum bath of Lorentzian spectral density.
// lambda is the Lorentzian width, gamma0 the coupling strength; the bath
// is Markovian iff gamma0 < lambda/2 (then lambda' = sqrt(lambda^2 -
// 2 gamma0 lambda) is real and G decays monotonically).
struct LorentzianBathParams {
  double lambda = 1.0;
  double gamma0 = 0.0;

  void validate() const {
    if (!(lambda > 0.0)) {
      throw InvalidArgumentError("LorentzianBathParams: lambda must be > 0");
    }
    if (gamma0 < 0.0) {
      throw InvalidArgumentError("LorentzianBathParams: gamma0 must be >= 0");
    }
  }

  bool markovian() const { return gamma0 < lambda / 2.0; }
};

// G(t) = e^{-lambda t/2} [cosh(lambda' t/2) + (lambda/lambda') sinh(lambda' t/2)].
//
// Evaluated through u = (lambda' t/2)^2, which is real in both regimes:
// the series branch covers the removable lambda' = 0 point, the
// oscillatory branch (u < 0) uses cos/sin, and the overdamped branch
// (u > 0) splits into decaying exponentials so nothing overflows at
// large t. The result is real for all real lambda, gamma0 >= 0 and
// bounded by 1 in magnitude.
inline double decoherence_function(const LorentzianBathParams& params,
                                   double t) {
  params.validate();
  if (t < 0.0) {
    throw InvalidArgumentError("decoherence_function: t must be >= 0");
  }
  const double lambda = params.lambda;
  const double half_lt = 0.5 * lambda * t;
  const double u =
      0.25 * (lambda * lambda - 2.0 * params.gamma0 * lambda) * t * t;

  double g;
  if (std::abs(u) < 1e-4) {
    const double cosh_term = 1.0 + u / 2.0 + u * u / 24.0;
    const double sinh_term = 1.0 + u / 6.0 + u * u / 120.0;
    g = std::exp(-half_lt) * (cosh_term + half_lt * sinh_term);
  } else if (u < 0.0) {
    const double w = std::sqrt(-u);
    g = std::exp(-half_lt) * (std::cos(w) + half_lt * std::sin(w) / w);
  } else {
    const double w = std::sqrt(u);
    const double k = half_lt / w;  // lambda/lambda'
    g = 0.5 * (1.0 + k) * std::exp(w - half_lt) +
        0.5 * (1.0 - k) * std::exp(-w - half_lt);
  }

  if (std::abs(g) > 1.0 + 1e-12) {
    throw InvariantError("decoherence_function: |G| = " + std::to_string(g) +
                         " exceeds 1");
  }
  return std::clamp(g, -1.0, 1.0);
}

// Earliest sign change of G on (0, t_max], refined by bisection; NaN when
// G never crosses zero (the Markovian regime).
inline double first_zero_time(const LorentzianBathParams& params, double t_max,
                              int scan_points = 4096, double tol = 1e-12) {
  double prev_t = 0.0;
  double prev_g = decoherence_function(params, 0.0);
  for (int i = 1; i <= scan_points; ++i) {
    const double t = t_max * double(i) / double(scan_points);
    const double g = decoherence_function(params, t);
    if ((prev_g > 0.0 && g <= 0.0) || (prev_g < 0.0 && g >= 0.0)) {
      double lo = prev_t, hi = t;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double gm = decoherence_function(params, mid);
        if ((prev_g > 0.0) == (gm > 0.0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev_t = t;
    prev_g = g;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Exact single-qubit state at time t:
//   [[1 - G^2 rho11(0),  G rho01(0)],
//    [G rho10(0),        G^2 rho11(0)]].
// The diagonal is computed as a pair summing to 1 exactly.
inline DensityMatrix evolve_closed_form(const DensityMatrix& rho0,
                                        const LorentzianBathParams& params,
                                        double t) {
  if (rho0.dim() != 2) {
    throw DimensionError("evolve_closed_form: input must be a single qubit");
  }
  const double g = decoherence_function(params, t);
  const double p_excited = g * g * rho0.entry(1, 1).real();
  Matrix m(2, 2);
  m(0, 0) = 1.0 - p_excited;
  m(1, 1) = p_excited;
  m(0, 1) = g * rho0.entry(0, 1);
  m(1, 0) = g * rho0.entry(1, 0);
  return DensityMatrix(rho0.space(), m);
}

struct PuritySample {
  double t = 0.0;
  double g = 0.0;
  double purity = 0.0;
};

// (t, G, purity) along a monotone time grid. For rho0 = |+><+| the
// closed form is purity = 1 - G^2/2 + G^4/2.
inline std::vector<PuritySample> purity_series(
    const DensityMatrix& rho0, const LorentzianBathParams& params,
    const std::vector<double>& times) {
  if (rho0.dim() != 2) {
    throw DimensionError("purity_series: input must be a single qubit");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw InvalidArgumentError("purity_series: time grid must be increasing");
    }
  }
  std::vector<PuritySample> samples;
  samples.reserve(times.size());
  for (double t : times) {
    PuritySample s;
    s.t = t;
    s.g = decoherence_function(params, t);
    s.purity = purity(evolve_closed_form(rho0, params, t));
    samples.push_back(s);
  }
  return samples;
}

// Uniform grid [0, t_max] with n points (the bundled figure grid is
// t_max = 10/lambda, n = 2000).
inline std::vector<double> uniform_grid(double t_max, int n_points) {
  if (n_points < 2 || !(t_max > 0.0)) {
    throw InvalidArgumentError("uniform_grid: need n_points >= 2, t_max > 0");
  }
  std::vector<double> grid(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    grid[std::size_t(i)] = t_max * double(i) / double(n_points - 1);
  }
  return grid;
}

}  // namespace aqm::nonmarkov
