#include "tdsm/signal.hpp"

#include <cmath>
#include <string>

#include "tdsm/error.hpp"

namespace tdsm {

void SignalSpec::validate() const {
  require(std::isfinite(omega) && omega > 0.0, "signal: omega must be positive");
  require(std::isfinite(sigma) && sigma > 0.0, "signal: sigma must be positive");
  require(std::isfinite(t0), "signal: t0 must be finite");
}

double eval_signal(const SignalSpec& spec, double t) noexcept {
  if (spec.causal_truncation && t < 0.0) {
    return 0.0;
  }
  const double s = t - spec.t0;
  return std::sin(spec.omega * t) * std::exp(-spec.sigma * s * s);
}

TimeGrid::TimeGrid(double terminal_time, int steps) : terminal_(terminal_time), steps_(steps), dt_(0.0) {
  require(std::isfinite(terminal_time) && terminal_time > 0.0, "time grid: T must be positive");
  require(steps >= 1, "time grid: step count must be >= 1");
  dt_ = terminal_ / static_cast<double>(steps_);
}

std::vector<double> sample_signal(const SignalSpec& spec, const TimeGrid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = eval_signal(spec, grid.node(k));
  }
  return out;
}

}  // namespace tdsm
