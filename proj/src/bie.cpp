#include "tdsm/bie.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tdsm/error.hpp"

namespace tdsm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

double cross_dot(const Vec2& normal, const Vec2& d) { return normal.dot(d); }

// Weights R_j for int_0^{2 pi} ln(4 sin^2((t - tau) / 2)) f(tau) dtau, indexed by |i - j| mod 2n.
std::vector<double> log_weights(int half) {
  const int total = 2 * half;
  std::vector<double> out(static_cast<std::size_t>(total));
  for (int m = 0; m < total; ++m) {
    const double t = kPi * m / half;
    double acc = 0.0;
    for (int s = 1; s < half; ++s) {
      acc += std::cos(s * t) / s;
    }
    out[static_cast<std::size_t>(m)] = -(2.0 * kPi / half) * acc - (kPi / (half * half)) * std::cos(half * t);
  }
  return out;
}

}  // namespace

void BieOptions::validate() const {
  require(nodes_per_curve >= 8 && nodes_per_curve % 2 == 0, "bie: nodes_per_curve must be even and >= 8");
  require(coupling > 0.0, "bie: coupling must be positive");
  require(residual_tol > 0.0, "bie: residual tolerance must be positive");
}

HelmholtzBie::HelmholtzBie(std::span<const BoundaryCurve> curves, cplx k, const BieOptions& options)
    : k_(k), eta_(options.coupling * std::abs(k)), tol_(options.residual_tol) {
  options.validate();
  require(k != cplx(0.0) && k.imag() >= 0.0, "bie: wavenumber must be nonzero with Im k >= 0");
  require(!curves.empty(), "bie: at least one boundary curve is required");

  std::vector<std::size_t> offset;
  std::vector<Vec2> second;
  for (const auto& curve : curves) {
    require(curve.size() >= 8 && curve.size() % 2 == 0, "bie: curves need an even node count >= 8");
    offset.push_back(pos_.size());
    const double w = 2.0 * kPi / static_cast<double>(curve.size());
    for (const auto& node : curve.nodes) {
      pos_.push_back(node.pos);
      normal_.emplace_back(node.d1.y(), -node.d1.x());
      speed_.push_back(node.d1.norm());
      weight_.push_back(w);
      second.push_back(node.d2);
    }
  }
  offset.push_back(pos_.size());

  const auto total = static_cast<Eigen::Index>(pos_.size());
  matrix_ = Eigen::MatrixXcd::Identity(total, total);
  const cplx half_ik = 0.5 * kI * k_;
  const double half_eta = 0.5 * eta_;

  // Full kernel L + M~ at distinct points (row target i, column source j).
  auto kernel = [&](std::size_t i, std::size_t j, const Bessel01& b, double r) {
    const Vec2 d = pos_[i] - pos_[j];
    return half_ik * cross_dot(normal_[j], d) * b.h1() / r + half_eta * b.h0() * speed_[j];
  };

  for (std::size_t a = 0; a + 1 < offset.size(); ++a) {
    const std::size_t lo = offset[a];
    const std::size_t hi = offset[a + 1];
    const int half = static_cast<int>((hi - lo) / 2);
    const auto rw = log_weights(half);
    const double tw = kPi / half;

    for (std::size_t i = lo; i < hi; ++i) {
      // Diagonal limits.
      const double sp = speed_[i];
      const cplx l2 = cross_dot(normal_[i], second[i]) / (2.0 * kPi * sp * sp);
      const cplx m1 = kI * eta_ / (2.0 * kPi) * sp;
      const cplx m2 =
          half_eta * sp * (1.0 + (2.0 * kI / kPi) * (std::numbers::egamma + std::log(k_ * sp / 2.0)));
      const auto ii = static_cast<Eigen::Index>(i);
      matrix_(ii, ii) += rw[0] * m1 + tw * (l2 + m2);

      for (std::size_t j = i + 1; j < hi; ++j) {
        const Vec2 d = pos_[i] - pos_[j];
        const double r = d.norm();
        const Bessel01 b = bessel01(k_ * r);
        const double s = std::sin(0.5 * kPi * static_cast<double>(j - i) / half);
        const double logterm = std::log(4.0 * s * s);
        const auto m = static_cast<std::size_t>((j - i) % (2 * half));
        // Both orientations share r and the Bessel values.
        for (int flip = 0; flip < 2; ++flip) {
          const std::size_t row = flip == 0 ? i : j;
          const std::size_t col = flip == 0 ? j : i;
          const Vec2 dd = pos_[row] - pos_[col];
          const cplx full = kernel(row, col, b, r);
          const cplx k1 = -(k_ / (2.0 * kPi)) * cross_dot(normal_[col], dd) * b.j1 / r +
                          kI * eta_ / (2.0 * kPi) * b.j0 * speed_[col];
          const cplx k2 = full - k1 * logterm;
          matrix_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += rw[m] * k1 + tw * k2;
        }
      }
    }

    // Off-diagonal blocks: smooth kernels, trapezoid rule.
    for (std::size_t b = 0; b + 1 < offset.size(); ++b) {
      if (b == a) {
        continue;
      }
      for (std::size_t i = lo; i < hi; ++i) {
        for (std::size_t j = offset[b]; j < offset[b + 1]; ++j) {
          const double r = (pos_[i] - pos_[j]).norm();
          require(r > 0.0, "bie: boundary curves intersect");
          matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
              weight_[j] * kernel(i, j, bessel01(k_ * r), r);
        }
      }
    }
  }
  lu_.compute(matrix_);
}

Eigen::VectorXcd HelmholtzBie::point_source_trace(const Vec3& y) const {
  Eigen::VectorXcd out(size());
  for (Eigen::Index i = 0; i < size(); ++i) {
    const double r = (pos_[static_cast<std::size_t>(i)] - y.head<2>()).norm();
    require(r > 0.0, "bie: point source lies on the boundary");
    out(i) = 0.25 * kI * hankel1_0(k_ * r);
  }
  return out;
}

Eigen::MatrixXcd HelmholtzBie::density(const Eigen::MatrixXcd& boundary_values) const {
  require(boundary_values.rows() == size(), "bie: boundary data has the wrong length");
  const Eigen::MatrixXcd rhs = 2.0 * boundary_values;
  Eigen::MatrixXcd phi = lu_.solve(rhs);
  const double scale = rhs.norm();
  residual_ = scale > 0.0 ? (matrix_ * phi - rhs).norm() / scale : 0.0;
  if (!(residual_ <= tol_)) {
    std::ostringstream msg;
    msg << "bie: linear solve did not converge at k = " << k_ << " (relative residual " << residual_ << ")";
    fail(ErrorKind::solver, msg.str());
  }
  return phi;
}

Eigen::MatrixXcd HelmholtzBie::potential_matrix(std::span<const Vec3> targets) const {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(targets.size()), size());
  const cplx quarter_ik = 0.25 * kI * k_;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Vec2 x = targets[t].head<2>();
    for (std::size_t j = 0; j < pos_.size(); ++j) {
      const Vec2 d = x - pos_[j];
      const double r = d.norm();
      require(r > 0.0, "bie: evaluation point lies on the boundary");
      const Bessel01 b = bessel01(k_ * r);
      const cplx val = quarter_ik * normal_[j].dot(d) * b.h1() / r + 0.25 * eta_ * b.h0() * speed_[j];
      out(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = weight_[j] * val;
    }
  }
  return out;
}

}  // namespace tdsm
