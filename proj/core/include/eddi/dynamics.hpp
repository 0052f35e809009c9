#pragma once

#include <array>
#include <cstddef>
#include <utility>

#include "eddi/model.hpp"
#include "eddi/response.hpp"

namespace eddi {

// Sampled external force. Linear interpolation between samples inside the
// recorded window, exactly zero outside it (an impact record ends long before
// the response does).
class ForceSignal {
public:
  explicit ForceSignal(TimeSeries samples) : samples_(std::move(samples)) {}

  const TimeSeries& samples() const noexcept { return samples_; }
  double at(double t) const noexcept;

private:
  TimeSeries samples_;
};

struct SolverSpec {
  double rtol = 1e-12;
  double atol = 1e-16;
  double sample_rate_hz = 0.0;
  double t_span = 0.0;
};

// Per-run integration counters. accumulated_error sums the accepted steps'
// absolute local error estimates; it bounds the global error when error
// growth is non-amplifying, which the convergence property test relies on.
struct SolverStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  double accumulated_error = 0.0;
};

// State derivative of inertia*qdd + B(q,qd) + K(q) = F(t); returns (qd, qdd).
// A null force is identical to a force that samples to zero.
std::array<double, 2> rhs(const IdentifiedSystem& sys, double t, const std::array<double, 2>& state,
                          const ForceSignal* force = nullptr) noexcept;

// Adaptive Dormand-Prince 5(4) integration with PI step control, sampled onto
// the uniform output grid through the method's dense-output interpolant. The
// returned Response carries qdd re-evaluated from the right-hand side at each
// grid point. Throws Error(errc::step_size_underflow) naming the failure time
// if the controller collapses the step (e.g. a diverging identified model).
Response integrate_rk45(const IdentifiedSystem& sys, std::array<double, 2> ic,
                        const SolverSpec& spec, const ForceSignal* force = nullptr,
                        SolverStats* stats = nullptr);

// Hardening-spring benchmark: 0.05*qdd + 0.5*qd + 4000*q^2*qd + 300*q +
// 3e8*q^3 = 0 from (0, 10 m/s), 1 s at 10 kHz. Returns the simulated response
// and the ground-truth system for scoring.
std::pair<Response, IdentifiedSystem> gen_duffing();

// Damped pendulum benchmark: 1.28*qdd + 0.064*qd + 15.696*sin(q) = 0 from
// (pi/2, 0), 100 s at 100 Hz. The response is simulated with the exact sine
// restoring force; the returned truth system carries its degree-5 Taylor
// stiffness (the polynomial a fit should recover).
std::pair<Response, IdentifiedSystem> gen_pendulum();

}  // namespace eddi
