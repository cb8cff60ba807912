#include "tdsm/indicator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <sstream>

#include <fftw3.h>

#include "tdsm/error.hpp"
#include "tdsm/parallel.hpp"

namespace tdsm {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

std::string format_point(const Vec3& z, int dimension) {
  char buf[96];
  if (dimension == 3) {
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g, %.6g)", z.x(), z.y(), z.z());
  } else {
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", z.x(), z.y());
  }
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t fft_size(std::size_t times) {
  std::size_t n = 1;
  while (n < 2 * times) {
    n <<= 1;
  }
  return n;
}

}  // namespace

IndicatorKind parse_indicator(std::string_view name) {
  if (name == "i1") return IndicatorKind::i1;
  if (name == "i2") return IndicatorKind::i2;
  if (name == "i3") return IndicatorKind::i3;
  if (name == "i1prime") return IndicatorKind::i1prime;
  fail(ErrorKind::config, "unknown indicator '" + std::string(name) + "'; expected one of {i1, i2, i3, i1prime}");
}

std::string_view indicator_name(IndicatorKind kind) noexcept {
  switch (kind) {
    case IndicatorKind::i1: return "i1";
    case IndicatorKind::i2: return "i2";
    case IndicatorKind::i3: return "i3";
    case IndicatorKind::i1prime: return "i1prime";
  }
  return "i1";
}

std::vector<double> discrete_conv(std::span<const double> f, std::span<const double> g, double dt) {
  require(f.size() == g.size(), "discrete_conv: series lengths differ");
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t k = 0; k < f.size(); ++k) {
    double acc = 0.0;
    for (std::size_t l = 0; l <= k; ++l) {
      acc += f[k - l] * g[l];
    }
    out[k] = acc * dt;
  }
  return out;
}

double norm_R_Gamma(std::span<const std::vector<double>> values, double dt, std::span<const double> weights) {
  require(values.size() == weights.size(), "norm_R_Gamma: one weight per source is required");
  double acc = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    require(weights[j] > 0.0, "norm_R_Gamma: weights must be positive");
    double row = 0.0;
    for (double v : values[j]) {
      row += v * v;
    }
    acc += row * dt * weights[j];
  }
  return std::sqrt(acc);
}

Eigen::Map<const Eigen::MatrixXd> trace_matrix(const Tensor3& t) {
  return {t.raw().data(), static_cast<Eigen::Index>(t.times()),
          static_cast<Eigen::Index>(t.receivers() * t.sources())};
}

struct IndicatorEngine::Impl {
  struct Prepared {
    const ScatteredDataSet* data = nullptr;
    Eigen::MatrixXcd spectra;
    double nuu = 0.0;
  };

  Acquisition acq;
  IndicatorOptions options;
  std::size_t nm = 0;
  std::size_t ni = 0;
  std::size_t nt = 0;
  double dt = 0.0;
  Eigen::VectorXd wx;
  Eigen::VectorXd wy;
  std::size_t nfft = 0;
  std::size_t nh = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::optional<SpectralSynthesizer> synth;
  std::vector<Prepared> prepared;

  ~Impl() {
    std::lock_guard lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }

  bool per_receiver(const Eigen::MatrixXd& kernel) const {
    const auto cols = static_cast<std::size_t>(kernel.cols());
    require(static_cast<std::size_t>(kernel.rows()) == nt, "indicator: kernel has the wrong number of time nodes");
    if (cols == nm * ni) {
      return false;
    }
    require(cols == nm, "indicator: kernel must have one column per pair or per receiver");
    return true;
  }

  Eigen::MatrixXcd transform(const Eigen::Ref<const Eigen::MatrixXd>& traces) const {
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(nh), traces.cols());
    std::vector<double> buf(nfft, 0.0);
    for (Eigen::Index c = 0; c < traces.cols(); ++c) {
      std::fill(buf.begin(), buf.end(), 0.0);
      for (std::size_t k = 0; k < nt; ++k) {
        buf[k] = traces(static_cast<Eigen::Index>(k), c);
      }
      fftw_execute_dft_r2c(forward, buf.data(), reinterpret_cast<fftw_complex*>(out.col(c).data()));
    }
    return out;
  }

  double norm_fft(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, bool b_per_receiver) const {
    Eigen::VectorXcd acc(static_cast<Eigen::Index>(nh));
    std::vector<double> buf(nfft);
    const double scale = dt / static_cast<double>(nfft);
    double total = 0.0;
    for (std::size_t j = 0; j < ni; ++j) {
      acc.setZero();
      for (std::size_t i = 0; i < nm; ++i) {
        const auto ca = static_cast<Eigen::Index>(j * nm + i);
        const auto cb = static_cast<Eigen::Index>(b_per_receiver ? i : j * nm + i);
        acc += wx(static_cast<Eigen::Index>(i)) * a.col(ca).cwiseProduct(b.col(cb));
      }
      fftw_execute_dft_c2r(backward, reinterpret_cast<fftw_complex*>(acc.data()), buf.data());
      double row = 0.0;
      for (std::size_t k = 0; k < nt; ++k) {
        const double v = buf[k] * scale;
        row += v * v;
      }
      total += row * wy(static_cast<Eigen::Index>(j));
    }
    return std::sqrt(total * dt);
  }

  double norm_direct(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b,
                     bool b_per_receiver) const {
    std::vector<double> acc(nt);
    double total = 0.0;
    for (std::size_t j = 0; j < ni; ++j) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t i = 0; i < nm; ++i) {
        const double* u = a.col(static_cast<Eigen::Index>(j * nm + i)).data();
        const double* g = b.col(static_cast<Eigen::Index>(b_per_receiver ? i : j * nm + i)).data();
        const double w = wx(static_cast<Eigen::Index>(i));
        for (std::size_t l = 0; l < nt; ++l) {
          if (g[l] == 0.0) {
            continue;
          }
          const double c = w * g[l];
          for (std::size_t m = 0; m + l < nt; ++m) {
            acc[l + m] += c * u[m];
          }
        }
      }
      double row = 0.0;
      for (double v : acc) {
        row += v * v;
      }
      total += row * wy(static_cast<Eigen::Index>(j));
    }
    return std::sqrt(total * dt * dt * dt);
  }

  void check_probe(const Vec3& z) const {
    for (const auto* surface : {&acq.sources, &acq.receivers}) {
      for (const auto& p : surface->points) {
        if ((p - z).norm() == 0.0) {
          fail(ErrorKind::invalid_argument, "indicator: probe coincides with a sensor (singular kernel)");
        }
      }
    }
  }
};

IndicatorEngine::IndicatorEngine(std::vector<const ScatteredDataSet*> datasets, const IndicatorOptions& options)
    : impl_(std::make_unique<Impl>()) {
  require(!datasets.empty() && datasets.front() != nullptr, "indicator: at least one dataset is required");
  auto& m = *impl_;
  m.acq = datasets.front()->acquisition;
  m.acq.validate();
  m.options = options;
  m.nm = m.acq.receivers.size();
  m.ni = m.acq.sources.size();
  m.nt = m.acq.grid.size();
  m.dt = m.acq.grid.dt();
  m.wx = Eigen::Map<const Eigen::VectorXd>(m.acq.receivers.weights.data(), static_cast<Eigen::Index>(m.nm));
  m.wy = Eigen::Map<const Eigen::VectorXd>(m.acq.sources.weights.data(), static_cast<Eigen::Index>(m.ni));

  if (options.accelerate) {
    m.nfft = fft_size(m.nt);
    m.nh = m.nfft / 2 + 1;
    std::vector<double> real(m.nfft);
    std::vector<cplx> spec(m.nh);
    std::lock_guard lock(fftw_planner_mutex());
    const int n = static_cast<int>(m.nfft);
    m.forward = fftw_plan_dft_r2c_1d(n, real.data(), reinterpret_cast<fftw_complex*>(spec.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    m.backward = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(spec.data()), real.data(),
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!m.forward || !m.backward) {
      fail(ErrorKind::solver, "indicator: FFT planning failed");
    }
  }
  if (m.acq.dimension() == 2) {
    m.synth.emplace(m.acq.signal, m.acq.grid, m.acq.medium, options.spectral);
  }

  for (const auto* d : datasets) {
    require(d != nullptr, "indicator: null dataset");
    const auto& t = d->values;
    require(t.receivers() == m.nm && t.times() == m.nt && t.sources() == m.ni,
            "indicator: dataset shape differs from the acquisition");
    require(d->acquisition.grid == m.acq.grid, "indicator: datasets must share one time grid");
    Impl::Prepared p;
    p.data = d;
    const auto traces = trace_matrix(t);
    if (options.accelerate) {
      p.spectra = m.transform(traces);
      p.nuu = m.norm_fft(p.spectra, p.spectra, false);
    } else {
      p.nuu = m.norm_direct(traces, traces, false);
    }
    m.prepared.push_back(std::move(p));
  }
}

IndicatorEngine::~IndicatorEngine() = default;

std::size_t IndicatorEngine::datasets() const noexcept { return impl_->prepared.size(); }

const Acquisition& IndicatorEngine::acquisition() const noexcept { return impl_->acq; }

double IndicatorEngine::data_norm(std::size_t d) const { return impl_->prepared.at(d).nuu; }

Eigen::MatrixXd IndicatorEngine::point_kernel(const Vec3& z) const {
  const auto& m = *impl_;
  m.check_probe(z);
  return point_response(z, m.acq, m.synth ? &*m.synth : nullptr);
}

Eigen::MatrixXd IndicatorEngine::green_kernel(const Vec3& z) const {
  const auto& m = *impl_;
  m.check_probe(z);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.nt), static_cast<Eigen::Index>(m.nm));
  for (std::size_t i = 0; i < m.nm; ++i) {
    const Vec3& x = m.acq.receivers.points[i];
    if (m.acq.dimension() == 3) {
      for (std::size_t k = 0; k < m.nt; ++k) {
        out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
            greens3d_conv(x, z, m.acq.grid.node(k), m.acq.signal, m.acq.medium);
      }
    } else {
      const auto trace = greens2d_trace((x - z).norm(), m.acq.grid, m.acq.signal, m.acq.medium, m.options.quadrature);
      out.col(static_cast<Eigen::Index>(i)) =
          Eigen::Map<const Eigen::VectorXd>(trace.data(), static_cast<Eigen::Index>(trace.size()));
    }
  }
  return out;
}

double IndicatorEngine::cross_norm(std::size_t d, const Eigen::MatrixXd& kernel) const {
  const auto& m = *impl_;
  const auto& p = m.prepared.at(d);
  const bool per = m.per_receiver(kernel);
  if (m.options.accelerate) {
    return m.norm_fft(p.spectra, m.transform(kernel), per);
  }
  return m.norm_direct(trace_matrix(p.data->values), kernel, per);
}

double IndicatorEngine::pair_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
  const auto& m = *impl_;
  require(!m.per_receiver(a), "indicator: first factor must be pairwise");
  const bool per = m.per_receiver(b);
  if (m.options.accelerate) {
    const Eigen::MatrixXcd ah = m.transform(a);
    if (&a == &b) {
      return m.norm_fft(ah, ah, per);
    }
    return m.norm_fft(ah, m.transform(b), per);
  }
  return m.norm_direct(a, b, per);
}

std::vector<double> IndicatorEngine::evaluate(IndicatorKind kind, const Vec3& z) const {
  const auto& m = *impl_;
  require(kind != IndicatorKind::i1prime, "indicator: i1prime needs a translated-scatterer synthesizer");
  std::vector<double> out(m.prepared.size(), 0.0);

  std::optional<Eigen::MatrixXcd> uhat;
  Eigen::MatrixXd u;
  double nUU = 0.0;
  if (kind != IndicatorKind::i3) {
    u = point_kernel(z);
    if (m.options.accelerate) {
      uhat = m.transform(u);
      nUU = m.norm_fft(*uhat, *uhat, false);
    } else {
      nUU = m.norm_direct(u, u, false);
    }
  }

  Eigen::MatrixXd g;
  std::optional<Eigen::MatrixXcd> ghat;
  if (kind != IndicatorKind::i1) {
    g = green_kernel(z);
    if (m.options.accelerate) {
      ghat = m.transform(g);
    }
  }

  for (std::size_t d = 0; d < m.prepared.size(); ++d) {
    const auto& p = m.prepared[d];
    double num = 0.0;
    if (kind == IndicatorKind::i1) {
      num = m.options.accelerate ? m.norm_fft(p.spectra, *uhat, false)
                                 : m.norm_direct(trace_matrix(p.data->values), u, false);
    } else {
      num = m.options.accelerate ? m.norm_fft(p.spectra, *ghat, true)
                                 : m.norm_direct(trace_matrix(p.data->values), g, true);
    }
    if (kind == IndicatorKind::i3) {
      out[d] = num;
      continue;
    }
    const double denom = p.nuu * nUU;
    if (!(denom > 0.0)) {
      fail(ErrorKind::invalid_argument, "indicator: zero denominator (degenerate data)");
    }
    out[d] = num * num / denom;
  }
  return out;
}

namespace {

double single_probe(const ScatteredDataSet& data, const Vec3& z, IndicatorKind kind) {
  IndicatorOptions opts;
  opts.accelerate = false;
  const IndicatorEngine engine({&data}, opts);
  return engine.evaluate(kind, z).front();
}

bool coincides_with_sensor(const Acquisition& acq, const Vec3& z) {
  for (const auto* surface : {&acq.sources, &acq.receivers}) {
    for (const auto& p : surface->points) {
      if ((p - z).norm() == 0.0) {
        return true;
      }
    }
  }
  return false;
}

void annotate(IndicatorField& field) {
  field.metadata["indicator"] = std::string(indicator_name(field.kind));
  if (field.values.empty()) {
    return;
  }
  const std::size_t best = field.argmax();
  const Vec3& p = field.grid.point(best);
  field.metadata["argmax_index"] = std::to_string(best);
  field.metadata["argmax"] = format_double(p.x()) + "," + format_double(p.y()) +
                             (field.grid.dimension() == 3 ? "," + format_double(p.z()) : std::string());
  field.metadata["max"] = format_double(field.max_value());
  field.metadata["min"] = format_double(field.min_value());
  field.metadata["flagged"] = std::to_string(field.flagged.size());
}

void rethrow_with_probe(const Error& e, std::size_t idx, const Vec3& z, int dimension) {
  throw Error(e.kind(), "probe " + std::to_string(idx) + " at " + format_point(z, dimension) + ": " + e.what());
}

}  // namespace

double indicator_I1(const ScatteredDataSet& data, const Vec3& z) { return single_probe(data, z, IndicatorKind::i1); }

double indicator_I2(const ScatteredDataSet& data, const Vec3& z) { return single_probe(data, z, IndicatorKind::i2); }

double indicator_I3(const ScatteredDataSet& data, const Vec3& z) { return single_probe(data, z, IndicatorKind::i3); }

double indicator_I1prime(const ScatteredDataSet& data, const Vec3& z, const TranslatedSynth& synth) {
  IndicatorOptions opts;
  opts.accelerate = false;
  const IndicatorEngine engine({&data}, opts);
  const Tensor3 uz = synth(z);
  require(uz.receivers() == data.values.receivers() && uz.times() == data.values.times() &&
              uz.sources() == data.values.sources(),
          "i1prime: synthesized tensor has the wrong shape");
  const Eigen::MatrixXd a = trace_matrix(data.values);
  const Eigen::MatrixXd b = trace_matrix(uz);
  const double cross = engine.pair_norm(a, b);
  const double self = engine.pair_norm(b, b);
  const double denom = engine.data_norm(0) * self;
  if (!(denom > 0.0)) {
    fail(ErrorKind::invalid_argument, "i1prime: zero denominator (degenerate data)");
  }
  return cross * cross / denom;
}

std::size_t IndicatorField::argmax() const {
  require(!values.empty(), "indicator field is empty");
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

double IndicatorField::max_value() const {
  require(!values.empty(), "indicator field is empty");
  return *std::max_element(values.begin(), values.end());
}

double IndicatorField::min_value() const {
  require(!values.empty(), "indicator field is empty");
  return *std::min_element(values.begin(), values.end());
}

std::vector<IndicatorField> sweep_many(const IndicatorEngine& engine, const SamplingGrid& grid, IndicatorKind kind,
                                       int threads) {
  require(kind != IndicatorKind::i1prime, "sweep: use sweep_i1prime for i1prime");
  const std::size_t nd = engine.datasets();
  std::vector<std::vector<double>> per_probe(grid.size());
  std::vector<char> flag(grid.size(), 0);
  const int dim = engine.acquisition().dimension();
  parallel_for(grid.size(), threads, [&](std::size_t idx) {
    const Vec3& z = grid.point(idx);
    if (coincides_with_sensor(engine.acquisition(), z)) {
      per_probe[idx].assign(nd, 0.0);
      flag[idx] = 1;
      return;
    }
    try {
      per_probe[idx] = engine.evaluate(kind, z);
    } catch (const Error& e) {
      rethrow_with_probe(e, idx, z, dim);
    }
  });

  std::vector<IndicatorField> out(nd);
  for (std::size_t d = 0; d < nd; ++d) {
    auto& f = out[d];
    f.grid = grid;
    f.kind = kind;
    f.values.resize(grid.size());
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      f.values[idx] = per_probe[idx][d];
      if (flag[idx]) {
        f.flagged.push_back(idx);
      }
    }
    annotate(f);
  }
  return out;
}

IndicatorField sweep(const ScatteredDataSet& data, const SamplingGrid& grid, IndicatorKind kind,
                     const IndicatorOptions& options) {
  const IndicatorEngine engine({&data}, options);
  return std::move(sweep_many(engine, grid, kind, options.threads).front());
}

IndicatorField sweep_i1prime(const ScatteredDataSet& data, const SamplingGrid& grid, const TranslatedSynth& synth,
                             int threads) {
  IndicatorField f;
  f.grid = grid;
  f.kind = IndicatorKind::i1prime;
  f.values.assign(grid.size(), 0.0);
  std::vector<char> flag(grid.size(), 0);
  const int dim = data.acquisition.dimension();
  parallel_for(grid.size(), threads, [&](std::size_t idx) {
    const Vec3& z = grid.point(idx);
    if (coincides_with_sensor(data.acquisition, z)) {
      flag[idx] = 1;
      return;
    }
    try {
      f.values[idx] = indicator_I1prime(data, z, synth);
    } catch (const Error& e) {
      rethrow_with_probe(e, idx, z, dim);
    }
  });
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (flag[idx]) {
      f.flagged.push_back(idx);
    }
  }
  annotate(f);
  return f;
}

}  // namespace tdsm
