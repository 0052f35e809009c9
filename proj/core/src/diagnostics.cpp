#include "eddi/diagnostics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "eddi/errors.hpp"

namespace eddi {

namespace {

struct FftwArrayDeleter {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
using ComplexBuf = std::unique_ptr<fftw_complex[], FftwArrayDeleter>;

ComplexBuf alloc_complex(std::size_t n) {
  return ComplexBuf(fftw_alloc_complex(n));
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

Spectrum fft_magnitude(const TimeSeries& s) {
  const std::size_t n = s.size();
  const double fs = 1.0 / s.dt();

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += s[i];
  mean /= double(n);

  std::vector<double> in(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann =
        0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * double(i) / double(n - 1)));
    in[i] = (s[i] - mean) * hann;
  }

  const std::size_t n_bins = n / 2 + 1;
  ComplexBuf out = alloc_complex(n_bins);
  Plan plan(fftw_plan_dft_r2c_1d(int(n), in.data(), out.get(), FFTW_ESTIMATE));
  fftw_execute(plan.get());

  Spectrum sp;
  sp.freqs_hz.resize(n_bins);
  sp.magnitudes.resize(n_bins);
  double max_mag = 0.0;
  for (std::size_t k = 0; k < n_bins; ++k) {
    sp.freqs_hz[k] = double(k) * fs / double(n);
    sp.magnitudes[k] = std::hypot(out[k][0], out[k][1]);
    max_mag = std::max(max_mag, sp.magnitudes[k]);
  }
  if (max_mag > 0.0) {
    for (double& m : sp.magnitudes) m /= max_mag;
  }
  return sp;
}

Scalogram cwt_morlet(const TimeSeries& s, const std::vector<double>& freqs_hz, double omega0) {
  if (!(omega0 > 0.0)) {
    throw Error(errc::invalid_argument, "cwt_morlet: omega0 must be positive");
  }
  if (freqs_hz.empty()) {
    throw Error(errc::invalid_argument, "cwt_morlet: frequency list is empty");
  }
  const double fs = 1.0 / s.dt();
  const double nyquist = 0.5 * fs;
  for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
    if (!(freqs_hz[i] > 0.0)) {
      throw Error(errc::invalid_argument, "cwt_morlet: frequencies must be positive");
    }
    if (freqs_hz[i] >= nyquist) {
      throw Error(errc::frequency_above_nyquist,
                  "cwt_morlet: " + std::to_string(freqs_hz[i]) + " Hz is at or above Nyquist " +
                      std::to_string(nyquist) + " Hz");
    }
    if (i > 0 && freqs_hz[i] <= freqs_hz[i - 1]) {
      throw Error(errc::invalid_argument, "cwt_morlet: frequencies must be strictly increasing");
    }
  }

  const std::size_t n = s.size();
  const std::size_t m = 2 * next_pow2(n);

  ComplexBuf sig = alloc_complex(m);
  ComplexBuf spec = alloc_complex(m);
  ComplexBuf filt = alloc_complex(m);
  ComplexBuf resp = alloc_complex(m);
  for (std::size_t i = 0; i < m; ++i) {
    sig[i][0] = i < n ? s[i] : 0.0;
    sig[i][1] = 0.0;
  }
  Plan fwd(fftw_plan_dft_1d(int(m), sig.get(), spec.get(), FFTW_FORWARD, FFTW_ESTIMATE));
  Plan bwd(fftw_plan_dft_1d(int(m), filt.get(), resp.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
  fftw_execute(fwd.get());

  Scalogram sg;
  sg.freqs_hz = freqs_hz;
  sg.times.resize(n);
  for (std::size_t j = 0; j < n; ++j) sg.times[j] = s.time(j);
  sg.magnitudes.assign(freqs_hz.size(), std::vector<double>(n, 0.0));

  const double dw = 2.0 * std::numbers::pi * fs / double(m);
  double max_mag = 0.0;
  for (std::size_t fi = 0; fi < freqs_hz.size(); ++fi) {
    const double scale = omega0 / (2.0 * std::numbers::pi * freqs_hz[fi]);
    for (std::size_t k = 0; k < m; ++k) {
      // Positive frequencies only: the analytic wavelet vanishes for w <= 0.
      if (k == 0 || k > m / 2) {
        filt[k][0] = 0.0;
        filt[k][1] = 0.0;
        continue;
      }
      const double w = double(k) * dw;
      const double arg = scale * w - omega0;
      const double gain = std::exp(-0.5 * arg * arg);
      filt[k][0] = spec[k][0] * gain;
      filt[k][1] = spec[k][1] * gain;
    }
    fftw_execute(bwd.get());
    auto& row = sg.magnitudes[fi];
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = std::hypot(resp[j][0], resp[j][1]) / double(m);
      max_mag = std::max(max_mag, row[j]);
    }
  }
  if (max_mag > 0.0) {
    for (auto& row : sg.magnitudes) {
      for (double& v : row) v /= max_mag;
    }
  }

  sg.coi_hz.resize(n);
  const double coi_factor = std::numbers::sqrt2 * omega0 / (2.0 * std::numbers::pi);
  for (std::size_t j = 0; j < n; ++j) {
    const double from_edge = std::min(sg.times[j] - s.t0(), s.t_end() - sg.times[j]);
    sg.coi_hz[j] = from_edge > 0.0 ? std::min(nyquist, coi_factor / from_edge) : nyquist;
  }
  return sg;
}

std::vector<double> scalogram_ridge(const Scalogram& sg) {
  const std::size_t n_t = sg.times.size();
  std::vector<double> ridge(n_t);
  for (std::size_t j = 0; j < n_t; ++j) {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t fi = 0; fi < sg.freqs_hz.size(); ++fi) {
      if (sg.magnitudes[fi][j] > best_mag) {
        best_mag = sg.magnitudes[fi][j];
        best = fi;
      }
    }
    ridge[j] = sg.freqs_hz[best];
  }
  return ridge;
}

}  // namespace eddi
