#include "eddi/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace eddi {
namespace {

// Steady-state DF2T state for a unit constant input; scaled by the actual
// input level when a pass starts. Keeps the high-pass from ringing at onset.
struct SectionState {
  double s1 = 0.0, s2 = 0.0;
};

SectionState unit_step_state(const Biquad& q) {
  const double den = 1.0 + q.a1 + q.a2;
  const double gain = std::abs(den) > 1e-300 ? (q.b0 + q.b1 + q.b2) / den : 0.0;
  SectionState st;
  st.s2 = q.b2 - q.a2 * gain;
  st.s1 = q.b1 + q.b2 - (q.a1 + q.a2) * gain;
  return st;
}

double section_dc_gain(const Biquad& q) {
  const double den = 1.0 + q.a1 + q.a2;
  return std::abs(den) > 1e-300 ? (q.b0 + q.b1 + q.b2) / den : 0.0;
}

void sosfilt_in_place(const std::vector<Biquad>& sections, std::vector<double>& x) {
  double level = x.empty() ? 0.0 : x.front();
  for (const Biquad& q : sections) {
    SectionState st = unit_step_state(q);
    double s1 = st.s1 * level;
    double s2 = st.s2 * level;
    for (double& sample : x) {
      const double in = sample;
      const double out = q.b0 * in + s1;
      s1 = q.b1 * in - q.a1 * out + s2;
      s2 = q.b2 * in - q.a2 * out;
      sample = out;
    }
    level *= section_dc_gain(q);
  }
}

}  // namespace

FilterCoefficients butterworth_highpass(const HighpassSpec& spec) {
  if (spec.order != 3) {
    throw Error(errc::invalid_argument, "butterworth_highpass: only order 3 is supported");
  }
  const double fs = spec.sample_rate_hz;
  if (!(fs > 0.0) || !std::isfinite(fs)) {
    throw Error(errc::invalid_cutoff, "butterworth_highpass: sample rate must be > 0");
  }
  if (!(spec.cutoff_hz > 0.0) || !(spec.cutoff_hz < 0.5 * fs)) {
    throw Error(errc::invalid_cutoff,
                "butterworth_highpass: cutoff must lie in (0, sample_rate/2)");
  }

  // Pre-warped analog cutoff in bilinear coordinates: w = tan(pi*fc/fs).
  const double w = std::tan(std::numbers::pi * spec.cutoff_hz / fs);
  const double w2 = w * w;

  FilterCoefficients out;
  out.sample_rate_hz = fs;
  out.order = 3;

  // Real-pole section s/(s + wc).
  {
    Biquad q;
    const double norm = 1.0 / (1.0 + w);
    q.b0 = norm;
    q.b1 = -norm;
    q.b2 = 0.0;
    q.a1 = (w - 1.0) * norm;
    q.a2 = 0.0;
    out.sections.push_back(q);
  }
  // Conjugate-pair section s^2/(s^2 + wc*s + wc^2).
  {
    Biquad q;
    const double norm = 1.0 / (1.0 + w + w2);
    q.b0 = norm;
    q.b1 = -2.0 * norm;
    q.b2 = norm;
    q.a1 = 2.0 * (w2 - 1.0) * norm;
    q.a2 = (1.0 - w + w2) * norm;
    out.sections.push_back(q);
  }
  return out;
}

double filter_magnitude(const FilterCoefficients& coeffs, double freq_hz) {
  const double theta = 2.0 * std::numbers::pi * freq_hz / coeffs.sample_rate_hz;
  const std::complex<double> z1 = std::polar(1.0, -theta);
  const std::complex<double> z2 = z1 * z1;
  double mag = 1.0;
  for (const Biquad& q : coeffs.sections) {
    const std::complex<double> num = q.b0 + q.b1 * z1 + q.b2 * z2;
    const std::complex<double> den = 1.0 + q.a1 * z1 + q.a2 * z2;
    mag *= std::abs(num) / std::abs(den);
  }
  return mag;
}

TimeSeries filtfilt(const FilterCoefficients& coeffs, const TimeSeries& s) {
  const std::size_t n = s.size();
  const std::size_t pad = 3 * static_cast<std::size_t>(coeffs.order);
  if (n <= 6 * static_cast<std::size_t>(coeffs.order)) {
    throw Error(errc::series_too_short,
                "filtfilt: need more than " + std::to_string(6 * coeffs.order) + " samples");
  }
  const std::vector<double>& v = s.values();

  // Odd reflection around both endpoints.
  std::vector<double> ext(n + 2 * pad);
  for (std::size_t k = 0; k < pad; ++k) {
    ext[k] = 2.0 * v.front() - v[pad - k];
  }
  std::copy(v.begin(), v.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t k = 0; k < pad; ++k) {
    ext[pad + n + k] = 2.0 * v.back() - v[n - 2 - k];
  }

  sosfilt_in_place(coeffs.sections, ext);
  std::reverse(ext.begin(), ext.end());
  sosfilt_in_place(coeffs.sections, ext);
  std::reverse(ext.begin(), ext.end());

  std::vector<double> out(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                          ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
  return TimeSeries(s.t0(), s.dt(), std::move(out));
}

std::pair<TimeSeries, TimeSeries> accel_to_state(const TimeSeries& accel,
                                                 const HighpassSpec& spec) {
  const double series_rate = 1.0 / accel.dt();
  HighpassSpec design = spec;
  if (design.sample_rate_hz == 0.0) {
    design.sample_rate_hz = series_rate;
  } else if (std::abs(design.sample_rate_hz - series_rate) > 1e-6 * series_rate) {
    throw Error(errc::grid_mismatch,
                "accel_to_state: spec sample rate disagrees with the series");
  }
  const FilterCoefficients coeffs = butterworth_highpass(design);
  TimeSeries qd = filtfilt(coeffs, cumtrapz(accel));
  TimeSeries q = filtfilt(coeffs, cumtrapz(qd));
  return {std::move(q), std::move(qd)};
}

}  // namespace eddi
