#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tdsm/bessel.hpp"
#include "tdsm/geometry.hpp"

namespace tdsm {

struct BieOptions {
  int nodes_per_curve = 128;  ///< even, >= 8
  double coupling = 1.0;      ///< combined-field parameter eta = coupling * |k|
  double residual_tol = 1e-8;

  void validate() const;
};

/// Exterior sound-soft Helmholtz problem for one wavenumber, Im k >= 0.
///
/// The scattered field is the combined potential
///   u(x) = int_dD [dPhi(x, y) / dnu(y) - i eta Phi(x, y)] phi(y) ds(y),
/// Phi = (i/4) H0(k |x - y|). The boundary equation
///   phi + K phi - i eta S phi = 2 f
/// is discretized by Nystrom quadrature at t_j = pi j / n with the
/// logarithmic split of Kress; blocks coupling distinct curves use the
/// trapezoid rule. The matrix is LU-factored once per instance.
class HelmholtzBie {
 public:
  HelmholtzBie(std::span<const BoundaryCurve> curves, cplx k, const BieOptions& options = {});

  [[nodiscard]] cplx wavenumber() const noexcept { return k_; }
  [[nodiscard]] double coupling() const noexcept { return eta_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(pos_.size()); }
  [[nodiscard]] const std::vector<Vec2>& nodes() const noexcept { return pos_; }
  [[nodiscard]] const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }

  /// Phi_k(node, y) for every boundary node.
  [[nodiscard]] Eigen::VectorXcd point_source_trace(const Vec3& y) const;

  /// Densities whose potentials have the given boundary traces (one column each).
  /// Throws a solver error when the relative residual exceeds residual_tol.
  [[nodiscard]] Eigen::MatrixXcd density(const Eigen::MatrixXcd& boundary_values) const;

  /// Relative residual of the most recent density() call.
  [[nodiscard]] double last_residual() const noexcept { return residual_; }

  /// Rows map densities to field values at the targets.
  [[nodiscard]] Eigen::MatrixXcd potential_matrix(std::span<const Vec3> targets) const;

 private:
  cplx k_;
  double eta_;
  double tol_;
  std::vector<Vec2> pos_;
  std::vector<Vec2> normal_;  // (x2', -x1'), length |x'|
  std::vector<double> speed_;
  std::vector<double> weight_;  // trapezoid weight 2 pi / N of the owning curve
  Eigen::MatrixXcd matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  mutable double residual_ = 0.0;
};

}  // namespace tdsm
