#include "tdsm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tdsm/error.hpp"

namespace tdsm {

void SpectralOptions::validate() const {
  require(padding_factor >= 2.0, "spectral: padding factor must be >= 2");
  require(threshold >= 0.0 && threshold < 1.0, "spectral: threshold must lie in [0, 1)");
  require(damping >= 0.0, "spectral: damping must be >= 0");
  require(oversample >= 0, "spectral: oversample must be >= 0");
}

SpectralSynthesizer::SpectralSynthesizer(const SignalSpec& spec, const TimeGrid& grid, const Medium& medium,
                                         const SpectralOptions& options)
    : grid_(grid) {
  spec.validate();
  medium.validate();
  options.validate();
  constexpr double kPi = std::numbers::pi;

  int refine = options.oversample;
  if (refine == 0) {
    const double band = spec.omega + 10.5 * std::sqrt(spec.sigma);
    refine = std::max(1, static_cast<int>(std::ceil(grid.dt() * band / kPi)));
  }
  const double h = grid.dt() / refine;
  const auto fine = static_cast<std::size_t>(std::ceil(options.padding_factor * grid.steps())) *
                    static_cast<std::size_t>(refine);
  period_ = static_cast<double>(fine) * h;
  eta_ = options.damping / period_;

  std::vector<double> windowed(fine);
  for (std::size_t n = 0; n < fine; ++n) {
    const double t = static_cast<double>(n) * h;
    windowed[n] = eval_signal(spec, t) * std::exp(-eta_ * t);
  }

  // Direct DFT over the non-negative bins below Nyquist.
  const std::size_t half = fine / 2;
  std::vector<cplx> spectrum(half);
  double peak = 0.0;
  for (std::size_t q = 0; q < half; ++q) {
    const double w = 2.0 * kPi * static_cast<double>(q) / period_;
    cplx acc = 0.0;
    for (std::size_t n = 0; n < fine; ++n) {
      if (windowed[n] != 0.0) {
        acc += windowed[n] * std::polar(1.0, w * static_cast<double>(n) * h);
      }
    }
    spectrum[q] = acc * h;
    peak = std::max(peak, std::abs(spectrum[q]));
  }

  for (std::size_t q = 0; q < half; ++q) {
    if (std::abs(spectrum[q]) >= options.threshold * peak && spectrum[q] != cplx(0.0)) {
      const double w = 2.0 * kPi * static_cast<double>(q) / period_;
      freqs_.push_back(w);
      wavenumbers_.emplace_back(w / medium.c, eta_ / medium.c);
      pulse_.push_back(spectrum[q]);
    }
  }
  require(!freqs_.empty(), "spectral: no retained frequency bins");

  synthesis_.resize(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(freqs_.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.node(k);
    const double undo = std::exp(eta_ * t) / period_;
    for (std::size_t q = 0; q < freqs_.size(); ++q) {
      const double mult = freqs_[q] == 0.0 ? 1.0 : 2.0;  // Hermitian partner of each positive bin
      synthesis_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(q)) =
          mult * undo * std::polar(1.0, -freqs_[q] * t);
    }
  }
}

std::vector<double> SpectralSynthesizer::to_time(std::span<const cplx> spectrum) const {
  require(spectrum.size() == bins(), "spectral: spectrum length must equal the retained bin count");
  const Eigen::Map<const Eigen::VectorXcd> s(spectrum.data(), static_cast<Eigen::Index>(spectrum.size()));
  const Eigen::VectorXd real = (synthesis_ * s).real();
  return {real.data(), real.data() + real.size()};
}

Eigen::MatrixXd SpectralSynthesizer::to_time(const Eigen::MatrixXcd& spectra) const {
  require(static_cast<std::size_t>(spectra.rows()) == bins(),
          "spectral: spectrum rows must equal the retained bin count");
  return (synthesis_ * spectra).real();
}

}  // namespace tdsm
