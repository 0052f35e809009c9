#include "eddi/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "eddi/errors.hpp"

namespace eddi {

namespace {

using State = std::array<double, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
// Fifth-order weights; the seventh stage evaluates at (t+h, y1) and is reused
// as the next step's first stage (FSAL).
constexpr double kB5[7] = {35.0 / 384.0,       0.0,  500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0, 0.0};
constexpr double kB4[7] = {5179.0 / 57600.0, 0.0,           7571.0 / 16695.0, 393.0 / 640.0,
                           -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0};
// Dense-output weights for the quartic interpolant over an accepted step.
constexpr double kD1 = -12715105075.0 / 11282082432.0;
constexpr double kD3 = 87487479700.0 / 32700410799.0;
constexpr double kD4 = -10690763975.0 / 1880347072.0;
constexpr double kD5 = 701980252875.0 / 199316789632.0;
constexpr double kD6 = -1453857185.0 / 822651844.0;
constexpr double kD7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kMinScale = 0.2;
constexpr double kMaxScale = 5.0;
constexpr double kPiErrExp = 0.17;   // 1/5 minus the PI damping share
constexpr double kPiOldExp = 0.04;   // weight of the previous step's error

struct DenseStep {
  State c1, c2, c3, c4, c5;

  State eval(double theta) const noexcept {
    const double theta1 = 1.0 - theta;
    State y;
    for (int i = 0; i < 2; ++i) {
      y[i] = c1[i] + theta * (c2[i] + theta1 * (c3[i] + theta * (c4[i] + theta1 * c5[i])));
    }
    return y;
  }
};

void check_spec(const SolverSpec& spec) {
  if (!(spec.rtol > 0.0) || !(spec.rtol < 1.0) || !std::isfinite(spec.rtol)) {
    throw Error(errc::invalid_argument, "solver: rtol must lie in (0, 1)");
  }
  if (!(spec.atol > 0.0) || !std::isfinite(spec.atol)) {
    throw Error(errc::invalid_argument, "solver: atol must be positive");
  }
  if (!(spec.sample_rate_hz > 0.0) || !std::isfinite(spec.sample_rate_hz)) {
    throw Error(errc::invalid_argument, "solver: sample rate must be positive");
  }
  if (!(spec.t_span > 0.0) || !std::isfinite(spec.t_span)) {
    throw Error(errc::invalid_argument, "solver: time span must be positive");
  }
}

// Initial step guess from the scaled magnitudes of the state, the derivative,
// and an Euler probe of the derivative's change.
template <typename Rhs>
double initial_step(const Rhs& f, double t0, const State& y0, const State& f0, double t_end,
                    double rtol, double atol, SolverStats& stats) {
  const auto scale = [&](const State& y, int i) { return atol + rtol * std::abs(y[i]); };
  double d0 = 0.0, d1 = 0.0;
  for (int i = 0; i < 2; ++i) {
    d0 = std::max(d0, std::abs(y0[i]) / scale(y0, i));
    d1 = std::max(d1, std::abs(f0[i]) / scale(y0, i));
  }
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, t_end - t0);

  State y1;
  for (int i = 0; i < 2; ++i) y1[i] = y0[i] + h0 * f0[i];
  const State f1 = f(t0 + h0, y1);
  ++stats.rhs_evals;
  double d2 = 0.0;
  for (int i = 0; i < 2; ++i) d2 = std::max(d2, std::abs(f1[i] - f0[i]) / scale(y0, i));
  d2 /= h0;

  double h1;
  if (std::max(d1, d2) <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
  }
  return std::min({100.0 * h0, h1, t_end - t0});
}

template <typename Rhs>
Response integrate_core(const Rhs& f, State y0, const SolverSpec& spec, double inertia,
                        SolverStats* stats_out) {
  check_spec(spec);
  const double dt_out = 1.0 / spec.sample_rate_hz;
  const std::size_t n_out = std::size_t(std::llround(spec.t_span * spec.sample_rate_hz)) + 1;
  const double t_end = double(n_out - 1) * dt_out;

  SolverStats stats;
  std::vector<double> q_out, qd_out, qdd_out;
  q_out.reserve(n_out);
  qd_out.reserve(n_out);
  qdd_out.reserve(n_out);

  const auto emit = [&](double t, const State& y) {
    const State dy = f(t, y);
    ++stats.rhs_evals;
    q_out.push_back(y[0]);
    qd_out.push_back(y[1]);
    qdd_out.push_back(dy[1]);
  };

  double t = 0.0;
  State y = y0;
  State k1 = f(t, y);
  ++stats.rhs_evals;
  emit(t, y);
  std::size_t next_out = 1;

  double h = initial_step(f, t, y, k1, t_end, spec.rtol, spec.atol, stats);
  double facold = 1e-4;
  bool last_rejected = false;

  while (next_out < n_out) {
    if (!(h > 1e-14 * std::max(1.0, std::abs(t)))) {
      throw Error(errc::step_size_underflow,
                  "solver: step size underflow at t = " + std::to_string(t) + " s");
    }
    const bool last = (t_end - t) <= h;
    if (last) h = t_end - t;

    State k2, k3, k4, k5, k6, k7, y1;
    {
      State ytmp;
      for (int i = 0; i < 2; ++i) ytmp[i] = y[i] + h * kA21 * k1[i];
      k2 = f(t + kC[1] * h, ytmp);
      for (int i = 0; i < 2; ++i) ytmp[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
      k3 = f(t + kC[2] * h, ytmp);
      for (int i = 0; i < 2; ++i) {
        ytmp[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
      }
      k4 = f(t + kC[3] * h, ytmp);
      for (int i = 0; i < 2; ++i) {
        ytmp[i] = y[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
      }
      k5 = f(t + kC[4] * h, ytmp);
      for (int i = 0; i < 2; ++i) {
        ytmp[i] =
            y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] + kA64 * k4[i] + kA65 * k5[i]);
      }
      k6 = f(t + kC[5] * h, ytmp);
      for (int i = 0; i < 2; ++i) {
        y1[i] = y[i] + h * (kB5[0] * k1[i] + kB5[2] * k3[i] + kB5[3] * k4[i] + kB5[4] * k5[i] +
                            kB5[5] * k6[i]);
      }
      k7 = f(t + h, y1);
      stats.rhs_evals += 6;
    }

    // Embedded error estimate, max norm against the tolerance envelope.
    double err = 0.0;
    double err_abs = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double e = h * ((kB5[0] - kB4[0]) * k1[i] + (kB5[2] - kB4[2]) * k3[i] +
                            (kB5[3] - kB4[3]) * k4[i] + (kB5[4] - kB4[4]) * k5[i] +
                            (kB5[5] - kB4[5]) * k6[i] + (kB5[6] - kB4[6]) * k7[i]);
      const double sc = spec.atol + spec.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
      err = std::max(err, std::abs(e) / sc);
      err_abs = std::max(err_abs, std::abs(e));
    }
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      // Accepted: build the dense interpolant, emit covered grid points.
      DenseStep dense;
      for (int i = 0; i < 2; ++i) {
        const double dy = y1[i] - y[i];
        const double bspl = h * k1[i] - dy;
        dense.c1[i] = y[i];
        dense.c2[i] = dy;
        dense.c3[i] = bspl;
        dense.c4[i] = dy - h * k7[i] - bspl;
        dense.c5[i] = h * (kD1 * k1[i] + kD3 * k3[i] + kD4 * k4[i] + kD5 * k5[i] + kD6 * k6[i] +
                           kD7 * k7[i]);
      }
      const double t_new = last ? t_end : t + h;
      const double slack = 1e-12 * std::max(1.0, std::abs(t_new));
      while (next_out < n_out && double(next_out) * dt_out <= t_new + slack) {
        const double theta =
            std::clamp((double(next_out) * dt_out - t) / h, 0.0, 1.0);
        emit(double(next_out) * dt_out, dense.eval(theta));
        ++next_out;
      }

      ++stats.accepted;
      stats.accumulated_error += err_abs;
      t = t_new;
      y = y1;
      k1 = k7;

      // PI update: the previous accepted step's error damps the step change.
      double scale = kSafety * std::pow(err, -kPiErrExp) * std::pow(facold, kPiOldExp);
      scale = std::clamp(scale, kMinScale, kMaxScale);
      if (last_rejected) scale = std::min(scale, 1.0);
      h *= scale;
      facold = std::max(err, 1e-4);
      last_rejected = false;
    } else {
      ++stats.rejected;
      const double scale = std::clamp(kSafety * std::pow(err, -kPiErrExp), kMinScale, 1.0);
      h *= scale;
      last_rejected = true;
    }
  }

  if (stats_out) *stats_out = stats;
  return Response(TimeSeries(0.0, dt_out, std::move(q_out)),
                  TimeSeries(0.0, dt_out, std::move(qd_out)),
                  TimeSeries(0.0, dt_out, std::move(qdd_out)), inertia);
}

}  // namespace

double ForceSignal::at(double t) const noexcept {
  if (t < samples_.t0() || t > samples_.t_end()) return 0.0;
  const double pos = (t - samples_.t0()) / samples_.dt();
  std::size_t k = std::size_t(pos);
  if (k >= samples_.size() - 1) k = samples_.size() - 2;
  const double alpha = pos - double(k);
  return samples_[k] + alpha * (samples_[k + 1] - samples_[k]);
}

std::array<double, 2> rhs(const IdentifiedSystem& sys, double t, const std::array<double, 2>& state,
                          const ForceSignal* force) noexcept {
  const double f_val = force ? force->at(t) : 0.0;
  const double qdd =
      (f_val - sys.damping.evaluate(state[0], state[1]) - sys.stiffness.evaluate(state[0])) /
      sys.inertia;
  return {state[1], qdd};
}

Response integrate_rk45(const IdentifiedSystem& sys, std::array<double, 2> ic,
                        const SolverSpec& spec, const ForceSignal* force, SolverStats* stats) {
  return integrate_core([&sys, force](double t, const State& y) { return rhs(sys, t, y, force); },
                        ic, spec, sys.inertia, stats);
}

std::pair<Response, IdentifiedSystem> gen_duffing() {
  IdentifiedSystem truth(0.05, DampingModel(BasisLibrary::parse("qd, q^2*qd"), {0.5, 4000.0}),
                         StiffnessModel(BasisLibrary::parse("q, q^3"), {300.0, 3e8}));
  SolverSpec spec;
  spec.sample_rate_hz = 1e4;
  spec.t_span = 1.0;
  Response r = integrate_rk45(truth, {0.0, 10.0}, spec);
  return {std::move(r), std::move(truth)};
}

std::pair<Response, IdentifiedSystem> gen_pendulum() {
  const double ml2 = 1.28;    // rotational inertia, m=2 kg at l=0.8 m
  const double bl2 = 0.064;   // viscous damping in theta, b=0.1 kg/s^2
  const double mgl = 15.696;  // gravity torque scale, g=9.81 m/s^2
  IdentifiedSystem truth(
      ml2, DampingModel(BasisLibrary::parse("qd"), {bl2}),
      StiffnessModel(BasisLibrary::parse("q, q^2, q^3, q^4, q^5"),
                     {mgl, 0.0, -mgl / 6.0, 0.0, mgl / 120.0}));
  SolverSpec spec;
  spec.sample_rate_hz = 100.0;
  spec.t_span = 100.0;
  const auto pend_rhs = [=](double, const State& y) -> State {
    return {y[1], -(bl2 * y[1] + mgl * std::sin(y[0])) / ml2};
  };
  Response r = integrate_core(pend_rhs, {std::numbers::pi / 2.0, 0.0}, spec, ml2, nullptr);
  return {std::move(r), std::move(truth)};
}

}  // namespace eddi
