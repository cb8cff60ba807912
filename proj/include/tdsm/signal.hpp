#pragma once

#include <cstddef>
#include <vector>

namespace tdsm {

/// Gaussian-modulated sinusoidal pulse sin(omega t) exp(-sigma (t - t0)^2).
struct SignalSpec {
  double omega = 4.0;  ///< center frequency (rad / time)
  double sigma = 1.6;  ///< bandwidth parameter (1 / time^2)
  double t0 = 3.0;     ///< time shift
  bool causal_truncation = true;  ///< force the pulse to vanish for t < 0

  void validate() const;
};

[[nodiscard]] double eval_signal(const SignalSpec& spec, double t) noexcept;

/// Closed uniform grid t_k = k * dt, k = 0..steps, on [0, T].
class TimeGrid {
 public:
  TimeGrid() : TimeGrid(1.0, 1) {}
  TimeGrid(double terminal_time, int steps);

  [[nodiscard]] double terminal_time() const noexcept { return terminal_; }
  [[nodiscard]] int steps() const noexcept { return steps_; }
  [[nodiscard]] double dt() const noexcept { return dt_; }
  /// Number of nodes, steps + 1.
  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(steps_) + 1; }
  [[nodiscard]] double node(std::size_t k) const noexcept { return static_cast<double>(k) * dt_; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double terminal_;
  int steps_;
  double dt_;
};

[[nodiscard]] std::vector<double> sample_signal(const SignalSpec& spec, const TimeGrid& grid);

}  // namespace tdsm
