#pragma once

#include <complex>

namespace tdsm {

using cplx = std::complex<double>;

/// J0, J1, Y0, Y1 at one complex argument.
///
/// Valid for z != 0 with -pi/2 <= arg z <= pi/2 (the damped-frequency regime
/// Im k >= 0, r > 0). Near the real axis: ascending series below |z| = 4,
/// Miller recurrence with Neumann series up to 17, Hankel expansion beyond.
struct Bessel01 {
  cplx j0;
  cplx j1;
  cplx y0;
  cplx y1;

  [[nodiscard]] cplx h0() const noexcept { return j0 + cplx(0.0, 1.0) * y0; }
  [[nodiscard]] cplx h1() const noexcept { return j1 + cplx(0.0, 1.0) * y1; }
};

[[nodiscard]] Bessel01 bessel01(cplx z);

/// Hankel functions of the first kind, orders 0 and 1.
[[nodiscard]] cplx hankel1_0(cplx z);
[[nodiscard]] cplx hankel1_1(cplx z);

}  // namespace tdsm
