#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "eddi/time_series.hpp"

namespace eddi {

// One measured or simulated free response: generalized displacement and
// velocity (acceleration when available) on a shared grid, plus the effective
// generalized inertia (kg for translation, kg*m^2 for rotation). This is the
// unit every identification consumes.
struct Response {
  TimeSeries q;
  TimeSeries qd;
  std::optional<TimeSeries> qdd;
  double inertia;

  Response(TimeSeries q_in, TimeSeries qd_in, std::optional<TimeSeries> qdd_in, double inertia_in)
      : q(std::move(q_in)), qd(std::move(qd_in)), qdd(std::move(qdd_in)), inertia(inertia_in) {
    require_same_grid(q, qd);
    if (qdd) require_same_grid(q, *qdd);
    if (!(inertia > 0.0) || !std::isfinite(inertia)) {
      throw Error(errc::invalid_argument, "response: inertia must be positive and finite");
    }
  }

  std::size_t size() const noexcept { return q.size(); }
  double momentum(std::size_t i) const noexcept { return inertia * qd[i]; }
};

}  // namespace eddi
