#pragma once

#include <cstddef>
#include <vector>

#include "eddi/errors.hpp"

namespace eddi {

// Uniformly sampled real-valued signal on the grid {t0 + i*dt : 0 <= i < size()}.
// Construction rejects non-finite samples and non-positive steps, so every
// TimeSeries in flight is safe to integrate or difference.
class TimeSeries {
public:
  TimeSeries(double t0, double dt, std::vector<double> values);

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return values_.size(); }
  double time(std::size_t i) const noexcept { return t0_ + dt_ * static_cast<double>(i); }
  double t_end() const noexcept { return time(values_.size() - 1); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }

private:
  double t0_;
  double dt_;
  std::vector<double> values_;
};

// Same length and same instants within 1e-9 relative agreement on the step.
bool same_grid(const TimeSeries& a, const TimeSeries& b) noexcept;
void require_same_grid(const TimeSeries& a, const TimeSeries& b);

// Running trapezoid integral on the same grid; first sample is exactly 0.
TimeSeries cumtrapz(const TimeSeries& s);

// Second-order derivative estimate: central differences in the interior,
// one-sided three-point stencils at both ends. Needs at least 3 samples.
TimeSeries central_diff(const TimeSeries& s);

// Linear interpolation at time t, which must lie inside [t0, t_end].
double interp_at(const TimeSeries& s, double t);

// Centered moving average over `window` samples. Near the edges the window is
// shrunk by the same amount on both sides, so output length equals input
// length and edge samples pass through progressively less averaged.
TimeSeries moving_average(const TimeSeries& s, std::size_t window);
std::vector<double> moving_average(const std::vector<double>& v, std::size_t window);

}  // namespace eddi
