#pragma once

#include <vector>

#include "eddi/time_series.hpp"

namespace eddi {

struct Spectrum {
  std::vector<double> freqs_hz;    // k * fs / N, one-sided up to Nyquist
  std::vector<double> magnitudes;  // global max 1; all zero for zero input
};

// One-sided magnitude spectrum of the mean-removed, Hann-windowed signal.
Spectrum fft_magnitude(const TimeSeries& s);

// Time-frequency magnitude map. magnitudes[i][j] is the response at
// freqs_hz[i], times[j], normalized so the global maximum is 1 (nonzero
// input). coi_hz[j] is the frequency above which edge effects are negligible
// at column j (cone of influence), clamped to the Nyquist frequency.
struct Scalogram {
  std::vector<double> freqs_hz;  // strictly increasing
  std::vector<double> times;
  std::vector<std::vector<double>> magnitudes;  // freq-major: [freq][time]
  std::vector<double> coi_hz;
};

// Analytic Morlet filter bank evaluated by frequency-domain multiplication:
// at scale s = omega0 / (2 pi f), the positive-frequency response is
// exp(-(s w - omega0)^2 / 2) — unit gain at w = omega0 / s, zero for w <= 0.
// The input is zero-padded to twice the next power of two, so the wrap-around
// of the wavelet tails lands in the discarded padding.
Scalogram cwt_morlet(const TimeSeries& s, const std::vector<double>& freqs_hz,
                     double omega0 = 6.0);

// Per-column argmax frequency — the ridge tracks instantaneous frequency.
std::vector<double> scalogram_ridge(const Scalogram& sg);

}  // namespace eddi
