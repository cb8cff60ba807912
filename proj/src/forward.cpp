#include "tdsm/forward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "tdsm/error.hpp"
#include "tdsm/parallel.hpp"

namespace tdsm {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void zero_first_sample(Tensor3& t) {
  for (std::size_t j = 0; j < t.sources(); ++j) {
    for (std::size_t i = 0; i < t.receivers(); ++i) {
      t.at(i, 0, j) = 0.0;
    }
  }
}

void scatter_columns(const Eigen::MatrixXd& traces, double factor, Tensor3& out) {
  const std::size_t nm = out.receivers();
  for (std::size_t j = 0; j < out.sources(); ++j) {
    for (std::size_t i = 0; i < nm; ++i) {
      auto dst = out.trace(i, j);
      const auto col = static_cast<Eigen::Index>(j * nm + i);
      for (std::size_t k = 0; k < dst.size(); ++k) {
        dst[k] += factor * traces(static_cast<Eigen::Index>(k), col);
      }
    }
  }
}

}  // namespace

Tensor3::Tensor3(std::size_t receivers, std::size_t times, std::size_t sources)
    : receivers_(receivers), times_(times), sources_(sources), data_(receivers * times * sources, 0.0) {}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  require(receivers_ == other.receivers_ && times_ == other.times_ && sources_ == other.sources_,
          "tensor: shape mismatch");
  for (std::size_t n = 0; n < data_.size(); ++n) {
    data_[n] += other.data_[n];
  }
  return *this;
}

Tensor3& Tensor3::operator*=(double factor) noexcept {
  for (double& v : data_) {
    v *= factor;
  }
  return *this;
}

void Acquisition::validate() const {
  require(sources.size() >= 1 && receivers.size() >= 1, "acquisition: sources and receivers must be nonempty");
  require(sources.dimension == receivers.dimension, "acquisition: source and receiver dimensions differ");
  require(dimension() == 2 || dimension() == 3, "acquisition: dimension must be 2 or 3");
  signal.validate();
  medium.validate();
}

Eigen::MatrixXd point_response(const Vec3& z, const Acquisition& acq, const SpectralSynthesizer* synth) {
  const std::size_t nm = acq.receivers.size();
  const std::size_t ni = acq.sources.size();
  const std::size_t nt = acq.grid.size();
  if (acq.dimension() == 3) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(nm * ni));
    for (std::size_t j = 0; j < ni; ++j) {
      for (std::size_t i = 0; i < nm; ++i) {
        const auto col = static_cast<Eigen::Index>(j * nm + i);
        for (std::size_t k = 0; k < nt; ++k) {
          out(static_cast<Eigen::Index>(k), col) =
              eval_Uz(acq.receivers.points[i], acq.grid.node(k), acq.sources.points[j], z, acq.signal, acq.medium);
        }
      }
    }
    return out;
  }

  require(synth != nullptr, "point_response: 2D needs a spectral synthesizer");
  require(synth->grid() == acq.grid, "point_response: synthesizer grid differs from the acquisition grid");
  const auto nq = static_cast<Eigen::Index>(synth->bins());
  Eigen::MatrixXcd to_rx(nq, static_cast<Eigen::Index>(nm));
  Eigen::MatrixXcd from_tx(nq, static_cast<Eigen::Index>(ni));
  for (std::size_t i = 0; i < nm; ++i) {
    const double r = (acq.receivers.points[i] - z).norm();
    if (!(r > 0.0)) {
      fail(ErrorKind::invalid_argument, "point_response: coincident points (singular kernel)");
    }
    for (Eigen::Index q = 0; q < nq; ++q) {
      to_rx(q, static_cast<Eigen::Index>(i)) = helmholtz2d(synth->wavenumber(static_cast<std::size_t>(q)), r);
    }
  }
  for (std::size_t j = 0; j < ni; ++j) {
    const double r = (acq.sources.points[j] - z).norm();
    if (!(r > 0.0)) {
      fail(ErrorKind::invalid_argument, "point_response: coincident points (singular kernel)");
    }
    for (Eigen::Index q = 0; q < nq; ++q) {
      const auto qq = static_cast<std::size_t>(q);
      from_tx(q, static_cast<Eigen::Index>(j)) = -synth->pulse(qq) * helmholtz2d(synth->wavenumber(qq), r);
    }
  }
  Eigen::MatrixXcd spectra(nq, static_cast<Eigen::Index>(nm * ni));
  for (std::size_t j = 0; j < ni; ++j) {
    spectra.middleCols(static_cast<Eigen::Index>(j * nm), static_cast<Eigen::Index>(nm)) =
        to_rx.array().colwise() * from_tx.col(static_cast<Eigen::Index>(j)).array();
  }
  Eigen::MatrixXd out = synth->to_time(spectra);
  out.row(0).setZero();
  return out;
}

ScatteredDataSet synth_point_model(std::span<const PointScatterer> scatterers, const Acquisition& acq,
                                   const SpectralOptions& spectral) {
  acq.validate();
  ScatteredDataSet out;
  out.acquisition = acq;
  out.values = Tensor3(acq.receivers.size(), acq.grid.size(), acq.sources.size());
  out.metadata["model"] = "point_model";

  std::optional<SpectralSynthesizer> synth;
  if (acq.dimension() == 2 && !scatterers.empty()) {
    synth.emplace(acq.signal, acq.grid, acq.medium, spectral);
  }
  const double wavelength = 2.0 * kPi * acq.medium.c / acq.signal.omega;
  std::ostringstream desc;
  for (std::size_t m = 0; m < scatterers.size(); ++m) {
    const auto& s = scatterers[m];
    require(s.diameter > 0.0, "point model: diameter must be positive");
    if (s.diameter >= 0.1 * wavelength) {
      out.warnings.push_back("point scatterer " + std::to_string(m) + " has diameter " + format_double(s.diameter) +
                             " >= 0.1 center wavelength; not point-like");
    }
    for (const auto* surface : {&acq.sources, &acq.receivers}) {
      for (const auto& p : surface->points) {
        if ((p - s.center).norm() == 0.0) {
          fail(ErrorKind::invalid_argument, "point model: scatterer center coincides with a sensor");
        }
      }
    }
    scatter_columns(point_response(s.center, acq, synth ? &*synth : nullptr), s.strength, out.values);
    desc << (m ? ";" : "") << format_double(s.center.x()) << ',' << format_double(s.center.y()) << ','
         << format_double(s.center.z()) << ':' << format_double(s.strength);
  }
  zero_first_sample(out.values);
  out.metadata["scatterers"] = desc.str();
  return out;
}

ScatteredDataSet synth_bie_2d(std::span<const BoundaryCurve> boundaries, const Acquisition& acq,
                              const BieSynthOptions& options) {
  acq.validate();
  require(acq.dimension() == 2, "bie synthesis is 2D only");
  options.bie.validate();
  ScatteredDataSet out;
  out.acquisition = acq;
  out.values = Tensor3(acq.receivers.size(), acq.grid.size(), acq.sources.size());
  out.metadata["model"] = "bie_2d";
  if (boundaries.empty()) {
    return out;
  }
  for (const auto& curve : boundaries) {
    for (const auto* surface : {&acq.sources, &acq.receivers}) {
      for (const auto& p : surface->points) {
        for (const auto& node : curve.nodes) {
          if ((p.head<2>() - node.pos).norm() < 1e-9) {
            fail(ErrorKind::invalid_argument, "bie synthesis: a sensor lies on a scatterer boundary");
          }
        }
      }
    }
  }

  const SpectralSynthesizer synth(acq.signal, acq.grid, acq.medium, options.spectral);
  const std::size_t nm = acq.receivers.size();
  const std::size_t ni = acq.sources.size();
  Eigen::MatrixXcd spectra(static_cast<Eigen::Index>(synth.bins()), static_cast<Eigen::Index>(nm * ni));
  std::vector<double> residuals(synth.bins(), 0.0);

  parallel_for(synth.bins(), options.threads, [&](std::size_t q) {
    const HelmholtzBie bie(boundaries, synth.wavenumber(q), options.bie);
    Eigen::MatrixXcd incident(bie.size(), static_cast<Eigen::Index>(ni));
    for (std::size_t j = 0; j < ni; ++j) {
      incident.col(static_cast<Eigen::Index>(j)) = -bie.point_source_trace(acq.sources.points[j]);
    }
    const Eigen::MatrixXcd phi = bie.density(incident);
    residuals[q] = bie.last_residual();
    const Eigen::MatrixXcd field = bie.potential_matrix(acq.receivers.points) * phi;  // nm x ni
    for (std::size_t j = 0; j < ni; ++j) {
      for (std::size_t i = 0; i < nm; ++i) {
        spectra(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j * nm + i)) =
            synth.pulse(q) * field(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  });

  scatter_columns(synth.to_time(spectra), 1.0, out.values);
  zero_first_sample(out.values);
  out.metadata["bie_max_residual"] = format_double(*std::max_element(residuals.begin(), residuals.end()));
  out.metadata["bie_frequencies"] = std::to_string(synth.bins());
  return out;
}

void NoiseSpec::validate() const { require(std::isfinite(level) && level >= 0.0, "noise: level must be >= 0"); }

double uniform_pm1(std::uint64_t bits) noexcept {
  return -1.0 + 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53);
}

ScatteredDataSet add_noise(const ScatteredDataSet& data, const NoiseSpec& noise) {
  noise.validate();
  ScatteredDataSet out = data;
  out.metadata["noise"] = format_double(noise.level);
  out.metadata["seed"] = std::to_string(noise.seed);
  if (noise.level == 0.0) {
    return out;
  }
  std::mt19937_64 gen(noise.seed);
  auto& t = out.values;
  for (std::size_t i = 0; i < t.receivers(); ++i) {
    for (std::size_t k = 0; k < t.times(); ++k) {
      for (std::size_t j = 0; j < t.sources(); ++j) {
        t.at(i, k, j) *= 1.0 + noise.level * uniform_pm1(gen());
      }
    }
  }
  return out;
}

double first_arrival(const Vec3& x, const Vec3& y, std::span<const BoundaryCurve> boundaries,
                     const Medium& medium) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& curve : boundaries) {
    for (const auto& node : curve.nodes) {
      best = std::min(best, (x.head<2>() - node.pos).norm() + (y.head<2>() - node.pos).norm());
    }
  }
  return best / medium.c;
}

}  // namespace tdsm
