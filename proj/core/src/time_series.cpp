#include "eddi/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace eddi {

TimeSeries::TimeSeries(double t0, double dt, std::vector<double> values)
    : t0_(t0), dt_(dt), values_(std::move(values)) {
  if (!std::isfinite(t0)) {
    throw Error(errc::invalid_argument, "time series: t0 is not finite");
  }
  if (!std::isfinite(dt) || dt <= 0.0) {
    throw Error(errc::invalid_argument, "time series: dt must be finite and > 0");
  }
  if (values_.empty()) {
    throw Error(errc::invalid_argument, "time series: no samples");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(errc::invalid_argument,
                  "time series: non-finite sample at index " + std::to_string(i));
    }
  }
}

bool same_grid(const TimeSeries& a, const TimeSeries& b) noexcept {
  if (a.size() != b.size()) return false;
  const double scale = std::max(a.dt(), b.dt());
  return std::abs(a.dt() - b.dt()) <= 1e-9 * scale &&
         std::abs(a.t0() - b.t0()) <= 1e-9 * scale;
}

void require_same_grid(const TimeSeries& a, const TimeSeries& b) {
  if (!same_grid(a, b)) {
    throw Error(errc::grid_mismatch, "time series grids differ (t0/dt/length)");
  }
}

TimeSeries cumtrapz(const TimeSeries& s) {
  if (s.size() < 2) {
    throw Error(errc::series_too_short, "cumtrapz: need at least 2 samples");
  }
  std::vector<double> out(s.size());
  out[0] = 0.0;
  const double half_dt = 0.5 * s.dt();
  for (std::size_t i = 1; i < s.size(); ++i) {
    out[i] = out[i - 1] + half_dt * (s[i - 1] + s[i]);
  }
  return TimeSeries(s.t0(), s.dt(), std::move(out));
}

TimeSeries central_diff(const TimeSeries& s) {
  const std::size_t n = s.size();
  if (n < 3) {
    throw Error(errc::series_too_short, "central_diff: need at least 3 samples");
  }
  std::vector<double> out(n);
  const double inv_2dt = 1.0 / (2.0 * s.dt());
  // Difference-of-differences forms keep constants exactly flat.
  out[0] = (4.0 * (s[1] - s[0]) - (s[2] - s[0])) * inv_2dt;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (s[i + 1] - s[i - 1]) * inv_2dt;
  }
  out[n - 1] = (4.0 * (s[n - 1] - s[n - 2]) - (s[n - 1] - s[n - 3])) * inv_2dt;
  return TimeSeries(s.t0(), s.dt(), std::move(out));
}

double interp_at(const TimeSeries& s, double t) {
  const std::size_t n = s.size();
  const double pos = (t - s.t0()) / s.dt();
  const double slack = 1e-9;  // tolerate rounding in callers' t0 + i*dt arithmetic
  if (!(pos >= -slack && pos <= static_cast<double>(n - 1) + slack)) {
    throw Error(errc::out_of_range, "interp_at: t outside [t0, t_end]");
  }
  if (n == 1) return s[0];
  double clamped = std::clamp(pos, 0.0, static_cast<double>(n - 1));
  std::size_t k = static_cast<std::size_t>(clamped);
  if (k >= n - 1) k = n - 2;
  const double frac = clamped - static_cast<double>(k);
  return s[k] + frac * (s[k + 1] - s[k]);
}

std::vector<double> moving_average(const std::vector<double>& v, std::size_t window) {
  const std::size_t n = v.size();
  if (window == 0) {
    throw Error(errc::invalid_argument, "moving_average: window must be >= 1");
  }
  if (window > n) {
    throw Error(errc::window_too_large,
                "moving_average: window " + std::to_string(window) + " exceeds length " +
                    std::to_string(n));
  }
  std::vector<double> out(n);
  const std::ptrdiff_t left = static_cast<std::ptrdiff_t>((window - 1) / 2);
  const std::ptrdiff_t right = static_cast<std::ptrdiff_t>(window - 1) - left;
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n) - 1;
  for (std::ptrdiff_t i = 0; i <= last; ++i) {
    // Shrink both half-windows by the larger overhang so the window stays
    // centered; at the very edge this degenerates to the sample itself.
    const std::ptrdiff_t reduce =
        std::max<std::ptrdiff_t>(0, std::max(left - i, right - (last - i)));
    const std::ptrdiff_t lo = i - std::max<std::ptrdiff_t>(0, left - reduce);
    const std::ptrdiff_t hi = i + std::max<std::ptrdiff_t>(0, right - reduce);
    long double acc = 0.0L;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) acc += v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] =
        static_cast<double>(acc / static_cast<long double>(hi - lo + 1));
  }
  return out;
}

TimeSeries moving_average(const TimeSeries& s, std::size_t window) {
  return TimeSeries(s.t0(), s.dt(), moving_average(s.values(), window));
}

}  // namespace eddi
