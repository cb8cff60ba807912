#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tdsm/bie.hpp"
#include "tdsm/geometry.hpp"
#include "tdsm/greenfn.hpp"
#include "tdsm/signal.hpp"
#include "tdsm/spectral.hpp"

namespace tdsm {

/// u[i][k][j]: receiver i, time node k, source j.
///
/// Stored source-major with contiguous traces ([j][i][k]), so that
/// trace(i, j) is a span over all time nodes.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t receivers, std::size_t times, std::size_t sources);

  [[nodiscard]] std::size_t receivers() const noexcept { return receivers_; }
  [[nodiscard]] std::size_t times() const noexcept { return times_; }
  [[nodiscard]] std::size_t sources() const noexcept { return sources_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

  [[nodiscard]] double& at(std::size_t i, std::size_t k, std::size_t j) noexcept {
    return data_[(j * receivers_ + i) * times_ + k];
  }
  [[nodiscard]] double at(std::size_t i, std::size_t k, std::size_t j) const noexcept {
    return data_[(j * receivers_ + i) * times_ + k];
  }
  [[nodiscard]] std::span<double> trace(std::size_t i, std::size_t j) noexcept {
    return {data_.data() + (j * receivers_ + i) * times_, times_};
  }
  [[nodiscard]] std::span<const double> trace(std::size_t i, std::size_t j) const noexcept {
    return {data_.data() + (j * receivers_ + i) * times_, times_};
  }
  [[nodiscard]] std::vector<double>& raw() noexcept { return data_; }
  [[nodiscard]] const std::vector<double>& raw() const noexcept { return data_; }

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator*=(double factor) noexcept;
  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t receivers_ = 0;
  std::size_t times_ = 0;
  std::size_t sources_ = 0;
  std::vector<double> data_;
};

/// Sources on Gamma_i, receivers on Gamma_m, sampling times, pulse and medium.
struct Acquisition {
  SurfaceGeometry sources;
  SurfaceGeometry receivers;
  TimeGrid grid;
  SignalSpec signal;
  Medium medium;

  [[nodiscard]] int dimension() const noexcept { return receivers.dimension; }
  void validate() const;
};

struct ScatteredDataSet {
  Acquisition acquisition;
  Tensor3 values;
  /// Sorted key/value provenance (model, noise, seed, ...).
  std::map<std::string, std::string> metadata;
  /// Non-fatal diagnostics from synthesis; not persisted.
  std::vector<std::string> warnings;
};

struct PointScatterer {
  Vec3 center = Vec3::Zero();
  double strength = 1.0;   ///< C in 3D, kappa in 2D
  double diameter = 0.002;
};

/// Two-leg point response U_z(x_i, t_k; y_j) for every receiver/source pair.
///
/// Returns a (times x sources * receivers) matrix, column j * N_m + i.
/// 3D uses the closed-form retarded product; 2D synthesizes
/// -(G_2 * G_2 * lambda) through `synth` (required when dimension == 2).
[[nodiscard]] Eigen::MatrixXd point_response(const Vec3& z, const Acquisition& acq,
                                             const SpectralSynthesizer* synth);

/// Single-scattering point-model data, summed over the scatterers.
[[nodiscard]] ScatteredDataSet synth_point_model(std::span<const PointScatterer> scatterers, const Acquisition& acq,
                                                 const SpectralOptions& spectral = {});

struct BieSynthOptions {
  BieOptions bie;
  SpectralOptions spectral;
  int threads = 1;
};

/// Sound-soft extended scatterers in 2D by frequency synthesis.
[[nodiscard]] ScatteredDataSet synth_bie_2d(std::span<const BoundaryCurve> boundaries, const Acquisition& acq,
                                            const BieSynthOptions& options = {});

struct NoiseSpec {
  double level = 0.0;  ///< epsilon
  std::uint64_t seed = 0;

  void validate() const;
};

/// u (1 + epsilon r), r uniform on [-1, 1] drawn per sample in file order (i, k, j).
[[nodiscard]] ScatteredDataSet add_noise(const ScatteredDataSet& data, const NoiseSpec& noise);

/// The deterministic r in [-1, 1) used by add_noise.
[[nodiscard]] double uniform_pm1(std::uint64_t bits) noexcept;

/// First time at which scattered energy from `boundaries` can reach x from y.
[[nodiscard]] double first_arrival(const Vec3& x, const Vec3& y, std::span<const BoundaryCurve> boundaries,
                                   const Medium& medium);

}  // namespace tdsm
