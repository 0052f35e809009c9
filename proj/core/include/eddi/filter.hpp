#pragma once

#include <utility>
#include <vector>

#include "eddi/time_series.hpp"

namespace eddi {

// High-pass design request. Only order 3 is supported; a sample_rate_hz of 0
// means "take the rate from the series being filtered".
struct HighpassSpec {
  double cutoff_hz = 0.0;
  double sample_rate_hz = 0.0;
  int order = 3;
};

// One direct-form-II-transposed section; first-order sections set b2 = a2 = 0.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct FilterCoefficients {
  std::vector<Biquad> sections;
  double sample_rate_hz = 0.0;
  int order = 0;
};

// Bilinear-transform Butterworth high-pass with cutoff pre-warping, emitted as
// one first-order section plus one biquad. DC gain is exactly 0 and the gain
// at Nyquist exactly 1 by construction.
FilterCoefficients butterworth_highpass(const HighpassSpec& spec);

// |H| of the cascade at freq_hz, evaluated on the unit circle.
double filter_magnitude(const FilterCoefficients& coeffs, double freq_hz);

// Zero-phase filtering: forward pass, reverse, forward pass, reverse. Each
// pass starts from the steady-state step response scaled by its first input
// sample, with odd-reflection padding of 3x order per side (removed from the
// output). Signal length must exceed 6x the filter order.
TimeSeries filtfilt(const FilterCoefficients& coeffs, const TimeSeries& s);

// Measured acceleration to displacement and velocity: cumulative trapezoid
// integration with a zero-phase high-pass after each integration stage to
// suppress drift. Returns (q, qd) on the acceleration grid.
std::pair<TimeSeries, TimeSeries> accel_to_state(const TimeSeries& accel,
                                                 const HighpassSpec& spec);

}  // namespace eddi
