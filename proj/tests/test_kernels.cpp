#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "tdsm/bessel.hpp"
#include "tdsm/error.hpp"
#include "tdsm/greenfn.hpp"
#include "tdsm/spectral.hpp"

using namespace tdsm;

namespace {

constexpr double kPi = std::numbers::pi;

struct BesselRef {
  std::array<double, 2> z;
  std::array<std::array<double, 2>, 4> v;  // J0, J1, Y0, Y1
};

// mpmath at 30 digits
const BesselRef kBessel[] = {
    {{0.05, 0.0}, {{{0.99937509764946858, 0.0}, {0.024992188313759701, 0.0}, {-1.9793110008172096, 0.0}, {-12.78985517117497, 0.0}}}},
    {{0.7, 0.3}, {{{0.8998070861650923, -0.099805415000367081}, {0.34009023691309799, 0.12472222069418017}, {-0.13287008685389355, 0.31850409573506576}, {-0.98800032903999457, 0.35832857101576185}}}},
    {{3.2, 0.06}, {{{-0.32091169856857359, -0.015684563983687136}, {0.26154171450826821, -0.024123785311480833}, {0.3073974496333445, -0.022256875524656709}, {0.37142116019199958, 0.011474276213032529}}}},
    {{9.5, 2.0}, {{{-0.78367640098337845, -0.53751918762471711}, {0.51812975571876501, -0.78024657786598628}, {0.56292245843116627, -0.76026628537477603}, {0.80519568578772672, 0.49359353202405886}}}},
    {{13.9, 0.01}, {{{0.18358861536478731, -0.0011652703247846815}, {0.11653131672028714, 0.0017519950689150044}, {0.10986532906082768, 0.0017975378419492944}, {-0.17975945047203149, 0.0012279313949069065}}}},
    {{14.1, 0.5}, {{{0.17560402855156822, -0.077735862335457476}, {0.16902068847454351, 0.076019327008238859}, {0.16280167832025949, 0.078946859966911262}, {-0.16985222947609833, 0.080380742237641561}}}},
    {{25.0, 0.2}, {{{0.098299461203005047, 0.025231825012772974}, {-0.12777998372496433, 0.020397497520684472}, {-0.12972328507517598, 0.019904418984873021}, {-0.10090923583794506, -0.024817910687679128}}}},
    {{60.0, 3.0}, {{{-0.93198585381888703, -0.45104926108798467}, {0.44559664756335498, -0.93089065665096119}, {0.45351830608517015, -0.92749530599156743}, {0.93540373931470115, 0.44316380137421617}}}},
    {{0.3, 1.2}, {{{1.3580186443124313, -0.21195634311306541}, {0.23664791916896762, 0.69026928198984102}, {0.028022384196365854, 1.278624595952686}, {-0.81156470590456778, 0.47806426067236493}}}},
    {{5.0, 5.0}, {{{-2.6759430047390846, 22.38204884667717}, {-21.412874162535427, -1.3614108123356676}, {-22.383287175949577, -2.674376535135113}, {1.362996195143459, -21.411499364996768}}}},
};

// Independent oracle for the 2D retarded potential. With s = t - r/c - tau the
// integrand lambda(t - r/c - s) / (2 pi sqrt(s (s + 2 r / c))) has its
// singularity at s = 0, where tanh-sinh sees exact small abscissae.
double greens2d_oracle(double r, double t, const SignalSpec& spec, double c) {
  const double b = t - r / c;
  if (b <= 0.0) return 0.0;
  const double rc = r / c;
  auto f = [&](double s) {
    return eval_signal(spec, b - s) / (2.0 * kPi * std::sqrt(s * (s + 2.0 * rc)));
  };
  const double split = std::min(b, 0.25);
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = ts.integrate(f, 0.0, split, 1e-13);
  if (b > split) {
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, split, b, 20, 1e-13);
  }
  return total;
}

}  // namespace

TEST(Bessel, MatchesHighPrecisionValues) {
  for (const auto& ref : kBessel) {
    const cplx z(ref.z[0], ref.z[1]);
    const auto b = bessel01(z);
    const cplx got[4] = {b.j0, b.j1, b.y0, b.y1};
    for (int m = 0; m < 4; ++m) {
      const cplx want(ref.v[m][0], ref.v[m][1]);
      EXPECT_LE(std::abs(got[m] - want), 1e-11 * std::max(1.0, std::abs(want))) << "z=" << z << " m=" << m;
    }
  }
}

TEST(Bessel, RealAxisAgreesWithStd) {
  for (double x = 0.01; x < 80.0; x *= 1.37) {
    const auto b = bessel01(cplx(x, 0.0));
    EXPECT_NEAR(b.j0.real(), std::cyl_bessel_j(0.0, x), 1e-12) << x;
    EXPECT_NEAR(b.j1.real(), std::cyl_bessel_j(1.0, x), 1e-12) << x;
    EXPECT_NEAR(b.y0.real(), std::cyl_neumann(0.0, x), 1e-12 * std::max(1.0, std::abs(std::cyl_neumann(0.0, x))));
    EXPECT_NEAR(b.y1.real(), std::cyl_neumann(1.0, x), 1e-12 * std::max(1.0, std::abs(std::cyl_neumann(1.0, x))));
    EXPECT_NEAR(b.j0.imag(), 0.0, 1e-14);
  }
}

TEST(Bessel, WronskianOffAxis) {
  // J1 Y0 - J0 Y1 = 2 / (pi z)
  for (const cplx z : {cplx(0.2, 0.1), cplx(7.0, 0.4), cplx(13.5, 1.0), cplx(14.5, 1.0), cplx(40.0, 0.05)}) {
    const auto b = bessel01(z);
    const cplx w = b.j1 * b.y0 - b.j0 * b.y1;
    EXPECT_LE(std::abs(w - 2.0 / (kPi * z)), 1e-11 * std::abs(2.0 / (kPi * z))) << z;
  }
}

TEST(Greens3d, ClosedForm) {
  const Vec3 x(2, 0, 0), y(0, 0, 0);
  EXPECT_NEAR(greens3d_conv(x, y, 5.0, SignalSpec{}, Medium{}), std::sin(12.0) / (8 * kPi), 1e-15);
  EXPECT_NEAR(greens3d_conv(x, y, 5.0, SignalSpec{}, Medium{}), -0.0213496, 1e-7);
  EXPECT_EQ(greens3d_conv(x, y, 2.0, SignalSpec{}, Medium{}), 0.0);
  EXPECT_EQ(greens3d_conv(x, y, 1.0, SignalSpec{}, Medium{}), 0.0);
  EXPECT_THROW((void)greens3d_conv(x, x, 1.0, SignalSpec{}, Medium{}), Error);
}

TEST(Greens2d, CausalBeforeFront) {
  const Vec3 x(1, 0, 0), y(0, 0, 0);
  EXPECT_EQ(greens2d_conv(x, y, 1.0, SignalSpec{}, Medium{}), 0.0);
  EXPECT_EQ(greens2d_conv(x, y, 0.5, SignalSpec{}, Medium{}), 0.0);
  EXPECT_THROW((void)greens2d_conv(x, x, 3.0, SignalSpec{}, Medium{}), Error);
}

TEST(Greens2d, UnitDistanceAgainstOracle) {
  const double got = greens2d_conv_r(1.0, 5.0, SignalSpec{}, Medium{});
  const double want = greens2d_oracle(1.0, 5.0, SignalSpec{}, 1.0);
  EXPECT_LE(std::abs(got - want), 1e-6 * std::abs(want));
}

TEST(Greens2d, RandomConfigurationsAgainstOracle) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> pos(-4.0, 4.0), time(0.0, 25.0), speed(0.5, 2.0);
  int checked = 0;
  for (int n = 0; n < 50; ++n) {
    const Vec3 x(pos(rng), pos(rng), 0.0), y(pos(rng), pos(rng), 0.0);
    const double t = time(rng);
    const Medium med{speed(rng)};
    const double got = greens2d_conv(x, y, t, SignalSpec{}, med);
    const double want = greens2d_oracle((x - y).norm(), t, SignalSpec{}, med.c);
    const double scale = std::max(std::abs(want), 1e-300);
    if (want == 0.0) {
      EXPECT_EQ(got, 0.0);
    } else {
      EXPECT_LE(std::abs(got - want), 1e-6 * scale) << "r=" << (x - y).norm() << " t=" << t << " c=" << med.c;
      ++checked;
    }
  }
  EXPECT_GT(checked, 25);
}

// A narrow pulse of mass m acts like m * delta(t - t0).
TEST(Greens2d, NarrowPulseLimit) {
  SignalSpec spec;
  spec.omega = 0.5;
  spec.sigma = 2500.0;
  spec.t0 = 3.0;
  const double mass = std::sin(spec.omega * spec.t0) * std::sqrt(kPi / spec.sigma);
  const double r = 1.0;
  for (double t : {5.0, 6.0, 9.0}) {
    const double s = t - spec.t0;
    const double kernel = 1.0 / (2 * kPi * std::sqrt(s * s - r * r));
    EXPECT_NEAR(greens2d_conv_r(r, t, spec, Medium{}), mass * kernel, 1e-3 * std::abs(mass * kernel)) << t;
  }
}

TEST(Greens2d, TraceMatchesPointwise) {
  const TimeGrid grid(25.0, 128);
  const auto tr = greens2d_trace(2.3, grid, SignalSpec{}, Medium{});
  ASSERT_EQ(tr.size(), grid.size());
  for (std::size_t k = 0; k < grid.size(); k += 7) {
    EXPECT_NEAR(tr[k], greens2d_conv_r(2.3, grid.node(k), SignalSpec{}, Medium{}), 1e-14);
  }
}

TEST(PointKernel, Substitution) {
  const Vec3 x(4, 0, 0), y(0, 4, 0), z(0, 0, 0);
  EXPECT_NEAR(eval_Uz(x, 11.0, y, z, SignalSpec{}, Medium{}), -std::sin(12.0) / (64 * kPi), 1e-15);
  EXPECT_NEAR(eval_Uz(x, 11.0, y, z, SignalSpec{}, Medium{}), 0.00266869, 1e-8);
  EXPECT_EQ(eval_Uz(x, 8.0, y, z, SignalSpec{}, Medium{}), 0.0);
  EXPECT_THROW((void)eval_Uz(x, 8.0, y, x, SignalSpec{}, Medium{}), Error);
}

TEST(PointKernel, GreenDelegation) {
  const Vec3 x(2, 0, 0), z(0, 0, 0);
  EXPECT_EQ(eval_Gz(x, 5.0, z, SignalSpec{}, Medium{}, 3), greens3d_conv(x, z, 5.0, SignalSpec{}, Medium{}));
  EXPECT_EQ(eval_Gz(x, 1.5, z, SignalSpec{}, Medium{}, 2), 0.0);
  EXPECT_EQ(eval_Gz(x, 2.0, z, SignalSpec{}, Medium{}, 2), 0.0);
  EXPECT_EQ(eval_Gz(x, 7.0, z, SignalSpec{}, Medium{}, 2), greens2d_conv(x, z, 7.0, SignalSpec{}, Medium{}));
}

TEST(Helmholtz, SmallArgumentLog) {
  // (i/4) H0(kr) ~ -(1/2pi)(log(kr/2) + gamma) + i/4 for small kr
  const double r = 1e-4;
  const cplx v = helmholtz2d(cplx(1.0, 0.0), r);
  EXPECT_NEAR(v.real(), -(std::log(r / 2) + std::numbers::egamma) / (2 * kPi), 1e-8);
  EXPECT_NEAR(v.imag(), 0.25, 1e-8);
}

TEST(Spectral, PulseReconstructionInWindow) {
  for (const TimeGrid grid : {TimeGrid(25.0, 128), TimeGrid(15.0, 128), TimeGrid(19.0, 256)}) {
    const SpectralSynthesizer synth(SignalSpec{}, grid, Medium{});
    std::vector<cplx> spec(synth.bins());
    for (std::size_t q = 0; q < spec.size(); ++q) spec[q] = synth.pulse(q);
    const auto back = synth.to_time(spec);
    const auto ref = sample_signal(SignalSpec{}, grid);
    double err = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      err = std::max(err, std::abs(back[k] - ref[k]));
      peak = std::max(peak, std::abs(ref[k]));
    }
    EXPECT_LT(err, 1e-3 * peak) << "T=" << grid.terminal_time();
  }
}

TEST(Spectral, RetainedBinsAboveThreshold) {
  const SpectralSynthesizer synth(SignalSpec{}, TimeGrid(25.0, 128), Medium{});
  double peak = 0.0;
  for (std::size_t q = 0; q < synth.bins(); ++q) peak = std::max(peak, std::abs(synth.pulse(q)));
  for (std::size_t q = 0; q < synth.bins(); ++q) {
    EXPECT_GE(std::abs(synth.pulse(q)), 1e-3 * peak);
    EXPECT_GT(synth.wavenumber(q).imag(), 0.0);
  }
  EXPECT_GE(synth.period(), 2 * 25.0);
}

// A 2D point source propagated in frequency reproduces the time-domain
// retarded potential.
TEST(Spectral, HelmholtzTransferMatchesRetardedPotential) {
  const TimeGrid grid(25.0, 128);
  const SpectralSynthesizer synth(SignalSpec{}, grid, Medium{});
  const double r = 3.1;
  std::vector<cplx> spec(synth.bins());
  for (std::size_t q = 0; q < spec.size(); ++q) spec[q] = synth.pulse(q) * helmholtz2d(synth.wavenumber(q), r);
  const auto got = synth.to_time(spec);
  const auto want = greens2d_trace(r, grid, SignalSpec{}, Medium{});
  double err = 0.0, peak = 0.0;
  for (std::size_t k = 0; k < want.size(); ++k) {
    err = std::max(err, std::abs(got[k] - want[k]));
    peak = std::max(peak, std::abs(want[k]));
  }
  EXPECT_LT(err, 1e-3 * peak);
}
