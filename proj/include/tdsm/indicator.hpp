#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tdsm/forward.hpp"
#include "tdsm/geometry.hpp"
#include "tdsm/greenfn.hpp"
#include "tdsm/spectral.hpp"

namespace tdsm {

enum class IndicatorKind { i1, i2, i3, i1prime };

/// Accepts i1, i2, i3, i1prime; throws a config error listing them otherwise.
[[nodiscard]] IndicatorKind parse_indicator(std::string_view name);
[[nodiscard]] std::string_view indicator_name(IndicatorKind kind) noexcept;

/// out[k] = sum_{l=0..k} f[k-l] g[l] dt (truncated linear convolution).
[[nodiscard]] std::vector<double> discrete_conv(std::span<const double> f, std::span<const double> g, double dt);

/// (sum_j sum_k |values[j][k]|^2 dt ds_j)^(1/2).
[[nodiscard]] double norm_R_Gamma(std::span<const std::vector<double>> values, double dt,
                                  std::span<const double> weights);

/// Trace matrix view of a tensor: (times x sources * receivers), column j * N_m + i.
[[nodiscard]] Eigen::Map<const Eigen::MatrixXd> trace_matrix(const Tensor3& t);

struct IndicatorOptions {
  /// Zero-padded FFT convolution; matches the direct sums to ~1e-13 relative.
  bool accelerate = true;
  int threads = 1;
  QuadratureOptions quadrature;
  SpectralOptions spectral;
};

/// Evaluates indicators against one or more datasets that share an acquisition.
///
/// Per-dataset state (transformed traces, N_uu) is prepared once; per-probe
/// kernels U_z and G_z are built once and applied to every dataset, so a
/// batch of noise realizations costs little more than one.
class IndicatorEngine {
 public:
  IndicatorEngine(std::vector<const ScatteredDataSet*> datasets, const IndicatorOptions& options = {});
  ~IndicatorEngine();
  IndicatorEngine(const IndicatorEngine&) = delete;
  IndicatorEngine& operator=(const IndicatorEngine&) = delete;

  [[nodiscard]] std::size_t datasets() const noexcept;
  [[nodiscard]] const Acquisition& acquisition() const noexcept;
  /// N_{u,u} of dataset d.
  [[nodiscard]] double data_norm(std::size_t d) const;

  /// I1, I2 or I3 at z for every dataset. Thread-safe.
  [[nodiscard]] std::vector<double> evaluate(IndicatorKind kind, const Vec3& z) const;

  /// U_z traces in trace-matrix layout (2D uses the engine's synthesizer).
  [[nodiscard]] Eigen::MatrixXd point_kernel(const Vec3& z) const;
  /// G_z traces, (times x receivers).
  [[nodiscard]] Eigen::MatrixXd green_kernel(const Vec3& z) const;

  /// sqrt(sum_j ds_j dt sum_k a_j(k)^2), a_j = sum_i ds_i (u_ij * K)(t_k).
  /// Pairwise kernels have one column per (i, j); per-receiver kernels one per i.
  [[nodiscard]] double cross_norm(std::size_t d, const Eigen::MatrixXd& kernel) const;
  /// Same sum with both factors supplied (no cached data spectra).
  [[nodiscard]] double pair_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Single-probe indicators (direct sums).
[[nodiscard]] double indicator_I1(const ScatteredDataSet& data, const Vec3& z);
[[nodiscard]] double indicator_I2(const ScatteredDataSet& data, const Vec3& z);
[[nodiscard]] double indicator_I3(const ScatteredDataSet& data, const Vec3& z);

/// Produces u_z, the data of the scatterer translated by z - y0.
using TranslatedSynth = std::function<Tensor3(const Vec3& z)>;

/// N_{u,u_z}^2 / (N_{u,u} N_{u_z,u_z}).
[[nodiscard]] double indicator_I1prime(const ScatteredDataSet& data, const Vec3& z, const TranslatedSynth& synth);

struct IndicatorField {
  SamplingGrid grid;
  std::vector<double> values;
  IndicatorKind kind = IndicatorKind::i1;
  /// Probes assigned 0 because they coincide with a sensor.
  std::vector<std::size_t> flagged;
  std::map<std::string, std::string> metadata;

  [[nodiscard]] std::size_t argmax() const;
  [[nodiscard]] double max_value() const;
  [[nodiscard]] double min_value() const;
};

/// Meshes one indicator over the grid.
[[nodiscard]] IndicatorField sweep(const ScatteredDataSet& data, const SamplingGrid& grid, IndicatorKind kind,
                                   const IndicatorOptions& options = {});

/// One field per dataset, sharing probe kernels.
[[nodiscard]] std::vector<IndicatorField> sweep_many(const IndicatorEngine& engine, const SamplingGrid& grid,
                                                     IndicatorKind kind, int threads = 1);

/// I1' over the grid, one synthesis per probe.
[[nodiscard]] IndicatorField sweep_i1prime(const ScatteredDataSet& data, const SamplingGrid& grid,
                                           const TranslatedSynth& synth, int threads = 1);

}  // namespace tdsm
