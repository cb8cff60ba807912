#include "tdsm/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "tdsm/error.hpp"

namespace tdsm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEuler = std::numbers::egamma;
constexpr double kSeriesLimit = 14.0;
// Miller recurrence covers the band where the ascending series cancels and the
// Hankel expansion has not yet converged to double precision.
constexpr double kMillerLow = 4.0;
constexpr double kAsymptoticLimit = 17.0;
constexpr double kMillerMaxImag = 8.0;

Bessel01 ascending_series(cplx z) {
  const cplx half = 0.5 * z;
  const cplx w = -half * half;
  const cplx log_half = std::log(half);

  // term0 = w^m / (m!)^2, term1 = w^m / (m! (m+1)!)
  cplx term0 = 1.0;
  cplx term1 = 1.0;
  cplx sum_j0 = term0;
  cplx sum_j1 = term1;
  cplx sum_y0 = 0.0;                    // sum_{m>=1} H_m term0
  cplx sum_y1 = term1 * (1.0 - 2.0 * kEuler);  // sum (psi(m+1) + psi(m+2)) term1, m = 0
  double harmonic = 0.0;
  for (int m = 1; m < 200; ++m) {
    term0 *= w / static_cast<double>(m * m);
    term1 *= w / static_cast<double>(m * (m + 1));
    harmonic += 1.0 / m;
    const double harmonic_next = harmonic + 1.0 / (m + 1);
    sum_j0 += term0;
    sum_j1 += term1;
    sum_y0 += harmonic * term0;
    sum_y1 += (harmonic + harmonic_next - 2.0 * kEuler) * term1;
    if (std::abs(term0) < 1e-18 * std::abs(sum_j0) && std::abs(term1) < 1e-18 * std::abs(sum_j1) &&
        m > std::abs(half)) {
      break;
    }
  }

  Bessel01 out;
  out.j0 = sum_j0;
  out.j1 = half * sum_j1;
  out.y0 = (2.0 / kPi) * ((log_half + kEuler) * out.j0 - sum_y0);
  out.y1 = -2.0 / (kPi * z) + (2.0 / kPi) * log_half * out.j1 - (1.0 / kPi) * half * sum_y1;
  return out;
}

// Backward recurrence J_{n-1} = (2n / z) J_n - J_{n+1}, normalized by
// 1 = J_0 + 2 sum J_2k; Y_0 and Y_1 follow from the Neumann series
//   Y_0 = (2/pi)(log(z/2) + gamma) J_0 - (4/pi) sum (-1)^k J_2k / k
//   Y_1 = (2/pi)(log(z/2) + gamma) J_1 - 2 J_0 / (pi z)
//         + (2/pi) sum (-1)^k (J_{2k-1} - J_{2k+1}) / k.
Bessel01 miller(cplx z) {
  const int top = 2 * (static_cast<int>(std::abs(z) + 30.0) / 2 + 1);
  std::vector<cplx> j(static_cast<std::size_t>(top) + 2, 0.0);
  j[static_cast<std::size_t>(top)] = 1e-30;
  for (int n = top; n >= 1; --n) {
    const auto u = static_cast<std::size_t>(n);
    j[u - 1] = (2.0 * n) / z * j[u] - j[u + 1];
    if (std::abs(j[u - 1]) > 1e250) {
      for (std::size_t m = u - 1; m < j.size(); ++m) j[m] *= 1e-250;
    }
  }
  cplx norm = j[0];
  for (int k = 2; k <= top; k += 2) norm += 2.0 * j[static_cast<std::size_t>(k)];
  for (auto& v : j) v /= norm;

  cplx s0 = 0.0;
  cplx s1 = 0.0;
  for (int k = 1; 2 * k + 1 <= top + 1; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const auto e = static_cast<std::size_t>(2 * k);
    s0 += sign * j[e] / static_cast<double>(k);
    s1 += sign * (j[e - 1] - j[e + 1]) / static_cast<double>(k);
  }
  const cplx lg = std::log(0.5 * z) + kEuler;
  Bessel01 out;
  out.j0 = j[0];
  out.j1 = j[1];
  out.y0 = (2.0 / kPi) * lg * out.j0 - (4.0 / kPi) * s0;
  out.y1 = (2.0 / kPi) * lg * out.j1 - 2.0 / (kPi * z) * out.j0 + (2.0 / kPi) * s1;
  return out;
}

// Hankel expansion: J = A (P cos chi - Q sin chi), Y = A (P sin chi + Q cos chi),
// chi = z - nu pi / 2 - pi / 4, A = sqrt(2 / (pi z)).
void asymptotic_pq(cplx z, int nu, cplx& p, cplx& q) {
  const double mu = 4.0 * nu * nu;
  p = 0.0;
  q = 0.0;
  cplx term = 1.0;  // a_k(nu) / z^k
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 60; ++k) {
    const double mag = std::abs(term);
    if (mag > prev) {
      break;
    }
    // i^k pattern: k = 0 -> +P, 1 -> +Q, 2 -> -P, 3 -> -Q
    switch (k % 4) {
      case 0: p += term; break;
      case 1: q += term; break;
      case 2: p -= term; break;
      default: q -= term; break;
    }
    if (mag < 1e-17) {
      break;
    }
    prev = mag;
    const double odd = 2.0 * k + 1.0;
    term *= (mu - odd * odd) / (8.0 * (k + 1.0)) / z;
  }
}

Bessel01 asymptotic(cplx z) {
  const cplx amp = std::sqrt(2.0 / (kPi * z));
  Bessel01 out;
  for (int nu = 0; nu < 2; ++nu) {
    cplx p;
    cplx q;
    asymptotic_pq(z, nu, p, q);
    const cplx chi = z - (0.5 * nu + 0.25) * kPi;
    const cplx c = std::cos(chi);
    const cplx s = std::sin(chi);
    const cplx j = amp * (p * c - q * s);
    const cplx y = amp * (p * s + q * c);
    if (nu == 0) {
      out.j0 = j;
      out.y0 = y;
    } else {
      out.j1 = j;
      out.y1 = y;
    }
  }
  return out;
}

}  // namespace

Bessel01 bessel01(cplx z) {
  require(z != cplx(0.0, 0.0), "bessel: argument must be nonzero");
  const double r = std::abs(z);
  if (std::abs(z.imag()) < kMillerMaxImag) {
    if (r < kMillerLow) return ascending_series(z);
    return r < kAsymptoticLimit ? miller(z) : asymptotic(z);
  }
  return r < kSeriesLimit ? ascending_series(z) : asymptotic(z);
}

cplx hankel1_0(cplx z) { return bessel01(z).h0(); }

cplx hankel1_1(cplx z) { return bessel01(z).h1(); }

}  // namespace tdsm
