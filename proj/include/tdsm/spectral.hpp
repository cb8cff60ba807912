#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tdsm/bessel.hpp"
#include "tdsm/greenfn.hpp"
#include "tdsm/signal.hpp"

namespace tdsm {

struct SpectralOptions {
  /// Period of the discrete transform as a multiple of T (>= 2).
  double padding_factor = 2.0;
  /// Keep bins with |pulse spectrum| >= threshold * max.
  double threshold = 1e-3;
  /// Exponential window strength eta * L, eta the imaginary frequency shift.
  double damping = 6.0;
  /// Fine-grid refinement of the output step; 0 chooses it from the pulse bandwidth.
  int oversample = 0;

  void validate() const;
};

/// Frequency synthesis of causal time traces on a TimeGrid.
///
/// The pulse is multiplied by exp(-eta t), sampled on a fine grid of period
/// L = padding_factor * T and transformed with f^(w) = int f(t) exp(i w t) dt.
/// A trace whose transform is pulse(w + i eta) * H(w + i eta) is recovered by
/// inverting over the retained bins and undoing the window. Transfer
/// functions are therefore evaluated at complex wavenumbers
/// k_q = (w_q + i eta) / c, which keeps the 2D log singularity at w = 0 out of
/// reach and damps wrap-around of slowly decaying 2D tails by exp(-eta L).
class SpectralSynthesizer {
 public:
  SpectralSynthesizer(const SignalSpec& spec, const TimeGrid& grid, const Medium& medium,
                      const SpectralOptions& options = {});

  [[nodiscard]] std::size_t bins() const noexcept { return freqs_.size(); }
  [[nodiscard]] double frequency(std::size_t q) const { return freqs_.at(q); }
  [[nodiscard]] cplx wavenumber(std::size_t q) const { return wavenumbers_.at(q); }
  [[nodiscard]] cplx pulse(std::size_t q) const { return pulse_.at(q); }
  [[nodiscard]] double damping_rate() const noexcept { return eta_; }
  [[nodiscard]] double period() const noexcept { return period_; }
  [[nodiscard]] const TimeGrid& grid() const noexcept { return grid_; }

  /// Time samples of the trace whose retained-bin spectrum is given.
  [[nodiscard]] std::vector<double> to_time(std::span<const cplx> spectrum) const;
  /// Column-wise batch version: (bins x n) spectra -> (grid.size() x n) traces.
  [[nodiscard]] Eigen::MatrixXd to_time(const Eigen::MatrixXcd& spectra) const;

 private:
  TimeGrid grid_;
  double eta_ = 0.0;
  double period_ = 0.0;
  std::vector<double> freqs_;
  std::vector<cplx> wavenumbers_;
  std::vector<cplx> pulse_;
  Eigen::MatrixXcd synthesis_;  // grid.size() x bins
};

}  // namespace tdsm
