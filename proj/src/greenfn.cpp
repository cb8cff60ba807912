#include "tdsm/greenfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/special_functions/legendre.hpp>

#include "tdsm/error.hpp"

namespace tdsm {

namespace {

constexpr double kPi = std::numbers::pi;

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

const GaussRule& gauss_rule(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) {
    return it->second;
  }
  // boost returns the non-negative zeros only
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  GaussRule rule;
  for (double x : zeros) {
    const double dp = boost::math::legendre_p_prime(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
    if (x != 0.0) {
      rule.nodes.push_back(-x);
      rule.weights.push_back(w);
    }
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

void require_distinct(double r, const char* what) {
  if (!(r > 0.0)) {
    fail(ErrorKind::invalid_argument, std::string(what) + ": coincident points (singular kernel)");
  }
}

}  // namespace

void Medium::validate() const { require(std::isfinite(c) && c > 0.0, "medium: sound speed must be positive"); }

double greens3d_conv(const Vec3& x, const Vec3& y, double t, const SignalSpec& spec, const Medium& medium) {
  const double r = distance(x, y);
  require_distinct(r, "greens3d_conv");
  return eval_signal(spec, t - r / medium.c) / (4.0 * kPi * r);
}

double greens2d_conv_r(double r, double t, const SignalSpec& spec, const Medium& medium,
                       const QuadratureOptions& quad) {
  require_distinct(r, "greens2d_conv");
  require(quad.points >= 1 && quad.points <= 64, "greens2d_conv: quadrature points must lie in [1, 64]");
  const double travel = r / medium.c;
  const double front = t - travel;  // upper limit of the tau integral
  if (front <= 0.0) {
    return 0.0;
  }

  const double reach = std::sqrt(-std::log(quad.envelope_cutoff) / spec.sigma);
  double tau_lo = spec.t0 - reach;
  if (spec.causal_truncation) {
    tau_lo = std::max(tau_lo, 0.0);
  }
  const double tau_hi = std::min(front, spec.t0 + reach);
  if (tau_hi <= tau_lo) {
    return 0.0;
  }

  double panel = quad.panel;
  if (panel <= 0.0) {
    panel = 0.5 * std::min(kPi / spec.omega, 1.0 / std::sqrt(spec.sigma));
  }

  // u-breakpoints: tau panels mapped by u = sqrt(front - tau), increasing u.
  std::vector<double> breaks;
  const double beta = std::sqrt(2.0 * travel);
  const double u_lo = std::sqrt(front - tau_hi);
  const double u_hi = std::sqrt(front - tau_lo);
  breaks.push_back(u_lo);
  const auto n_panels = static_cast<int>(std::ceil((tau_hi - tau_lo) / panel - 1e-9));
  for (int p = 1; p <= n_panels; ++p) {
    const double tau = std::max(tau_hi - p * panel, tau_lo);
    breaks.push_back(std::sqrt(front - tau));
  }
  breaks.back() = u_hi;
  // 1 / sqrt(beta^2 + u^2) has poles at +-i beta; grade panels touching u = 0.
  if (u_lo == 0.0 && breaks.size() > 1) {
    std::vector<double> graded{0.0};
    double b = breaks[1];
    std::vector<double> inner;
    while (b > beta && b > 1e-12) {
      b *= 0.5;
      inner.push_back(b);
    }
    graded.insert(graded.end(), inner.rbegin(), inner.rend());
    graded.insert(graded.end(), breaks.begin() + 1, breaks.end());
    breaks = std::move(graded);
  }

  const auto& rule = gauss_rule(quad.points);
  const double beta2 = beta * beta;
  double sum = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p];
    const double b = breaks[p + 1];
    if (b <= a) {
      continue;
    }
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double part = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double u = mid + half * rule.nodes[q];
      part += rule.weights[q] * eval_signal(spec, front - u * u) / std::sqrt(beta2 + u * u);
    }
    sum += half * part;
  }
  return sum / kPi;
}

double greens2d_conv(const Vec3& x, const Vec3& y, double t, const SignalSpec& spec, const Medium& medium,
                     const QuadratureOptions& quad) {
  return greens2d_conv_r(distance(x, y), t, spec, medium, quad);
}

std::vector<double> greens2d_trace(double r, const TimeGrid& grid, const SignalSpec& spec, const Medium& medium,
                                   const QuadratureOptions& quad) {
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = greens2d_conv_r(r, grid.node(k), spec, medium, quad);
  }
  return out;
}

double eval_Uz(const Vec3& x, double t, const Vec3& y, const Vec3& z, const SignalSpec& spec, const Medium& medium) {
  const double rx = distance(x, z);
  const double ry = distance(y, z);
  require_distinct(rx, "eval_Uz");
  require_distinct(ry, "eval_Uz");
  return -eval_signal(spec, t - rx / medium.c - ry / medium.c) / (4.0 * kPi * rx * ry);
}

double eval_Gz(const Vec3& x, double t, const Vec3& z, const SignalSpec& spec, const Medium& medium, int dimension,
               const QuadratureOptions& quad) {
  if (dimension == 3) {
    return greens3d_conv(x, z, t, spec, medium);
  }
  require(dimension == 2, "eval_Gz: dimension must be 2 or 3");
  return greens2d_conv(x, z, t, spec, medium, quad);
}

cplx helmholtz2d(cplx k, double r) { return cplx(0.0, 0.25) * hankel1_0(k * r); }

}  // namespace tdsm
