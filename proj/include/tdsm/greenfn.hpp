#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tdsm/bessel.hpp"
#include "tdsm/geometry.hpp"
#include "tdsm/signal.hpp"

namespace tdsm {

struct Medium {
  double c = 1.0;  ///< sound speed

  void validate() const;
};

/// Gauss-Legendre panel rule for the 2D retarded convolution.
///
/// The integrand lambda(tau) / (2 pi sqrt((t - tau)^2 - r^2 / c^2)) is mapped
/// through tau = (t - r / c) - u^2, which removes the inverse square root at
/// the wave front. Panels are uniform in tau (width `panel`), so the scheme
/// is O(panel^(2 points)) for smooth pulses.
struct QuadratureOptions {
  int points = 12;
  double panel = 0.0;  ///< tau-width of a panel; 0 picks min(pi / omega, 1 / sqrt(sigma)) / 2
  /// Pulse envelope level below which tau-panels are skipped.
  double envelope_cutoff = 1e-17;
};

/// 3D retarded potential radiated from y: lambda(t - |x - y| / c) / (4 pi |x - y|).
[[nodiscard]] double greens3d_conv(const Vec3& x, const Vec3& y, double t, const SignalSpec& spec,
                                   const Medium& medium);

/// 2D retarded potential radiated from y (the time convolution G_2 * lambda).
[[nodiscard]] double greens2d_conv(const Vec3& x, const Vec3& y, double t, const SignalSpec& spec,
                                   const Medium& medium, const QuadratureOptions& quad = {});

/// Same integral parameterized by the distance r = |x - y| > 0.
[[nodiscard]] double greens2d_conv_r(double r, double t, const SignalSpec& spec, const Medium& medium,
                                     const QuadratureOptions& quad = {});

/// Point-scatterer kernel -lambda(t - |x - z| / c - |y - z| / c) / (4 pi |x - z| |y - z|).
[[nodiscard]] double eval_Uz(const Vec3& x, double t, const Vec3& y, const Vec3& z, const SignalSpec& spec,
                             const Medium& medium);

/// G_z(x, t) = (G * lambda)(x, t; z) in 2D or 3D.
[[nodiscard]] double eval_Gz(const Vec3& x, double t, const Vec3& z, const SignalSpec& spec, const Medium& medium,
                             int dimension, const QuadratureOptions& quad = {});

/// Samples greens2d_conv_r(r, t_k) on a whole time grid.
[[nodiscard]] std::vector<double> greens2d_trace(double r, const TimeGrid& grid, const SignalSpec& spec,
                                                 const Medium& medium, const QuadratureOptions& quad = {});

/// Outgoing 2D Helmholtz fundamental solution (i/4) H0(k r); the Fourier
/// transform of G_2 under f^(w) = int f(t) exp(i w t) dt with k = w / c.
[[nodiscard]] cplx helmholtz2d(cplx k, double r);

}  // namespace tdsm
