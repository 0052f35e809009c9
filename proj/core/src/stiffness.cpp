#include "eddi/stiffness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "eddi/basis.hpp"
#include "eddi/errors.hpp"
#include "eddi/time_series.hpp"

namespace eddi {

std::size_t ConservativeForceSamples::retained_count() const noexcept {
  std::size_t n = 0;
  for (bool m : mask) n += m ? 1 : 0;
  return n;
}

TimeSeries lagrangian(const TimeSeries& t_series, const TimeSeries& e_series) {
  require_same_grid(t_series, e_series);
  std::vector<double> l(t_series.size());
  for (std::size_t i = 0; i < l.size(); ++i) l[i] = 2.0 * t_series[i] - e_series[i];
  return TimeSeries(t_series.t0(), t_series.dt(), std::move(l));
}

namespace {

// Index of l's first sample within r's grid; l must sit on that grid.
std::size_t align_offset(const TimeSeries& l_series, const Response& r) {
  const double dt = r.q.dt();
  if (std::abs(l_series.dt() - dt) > 1e-9 * dt) {
    throw Error(errc::grid_mismatch, "conservative_force: sample spacing differs from the response");
  }
  const double offset_real = (l_series.t0() - r.q.t0()) / dt;
  const long long offset = std::llround(offset_real);
  if (offset < 0 || std::abs(offset_real - double(offset)) > 1e-6 ||
      std::size_t(offset) + l_series.size() > r.size()) {
    throw Error(errc::grid_mismatch, "conservative_force: series does not sit on the response grid");
  }
  return std::size_t(offset);
}

}  // namespace

ConservativeForceSamples conservative_force(const TimeSeries& l_series, const Response& r,
                                            double eps_dq, std::size_t smooth_window) {
  if (!(eps_dq > 0.0) || !(eps_dq < 1.0)) {
    throw Error(errc::invalid_argument, "conservative_force: eps_dq must lie in (0, 1)");
  }
  if (smooth_window == 0) {
    throw Error(errc::invalid_argument, "conservative_force: smooth_window must be >= 1");
  }
  const std::size_t offset = align_offset(l_series, r);
  const std::size_t n = l_series.size();

  ConservativeForceSamples cf;
  cf.q_samples.resize(n);
  cf.force_samples.assign(n, 0.0);
  cf.mask.assign(n, false);
  cf.abs_dq.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) cf.q_samples[i] = r.q[offset + i];

  std::vector<double> dq(n, 0.0);
  double max_dq = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    dq[i] = r.q[offset + i + 1] - r.q[offset + i - 1];
    cf.abs_dq[i] = std::abs(dq[i]);
    max_dq = std::max(max_dq, cf.abs_dq[i]);
  }
  if (max_dq == 0.0) {
    throw Error(errc::all_masked, "conservative_force: displacement never moves");
  }

  const double floor = eps_dq * max_dq;
  std::size_t retained = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (cf.abs_dq[i] < floor) continue;
    const double dl = l_series[i + 1] - l_series[i - 1];
    const double dqd = r.qd[offset + i + 1] - r.qd[offset + i - 1];
    const double p = r.inertia * r.qd[offset + i];
    cf.force_samples[i] = (dl - p * dqd) / dq[i];
    cf.mask[i] = true;
    ++retained;
  }
  if (retained == 0) {
    throw Error(errc::all_masked, "conservative_force: every sample fell below the increment floor");
  }

  const std::size_t window = std::min(smooth_window, retained);
  if (window > 1) {
    std::vector<double> seq;
    seq.reserve(retained);
    for (std::size_t i = 0; i < n; ++i) {
      if (cf.mask[i]) seq.push_back(cf.force_samples[i]);
    }
    seq = moving_average(seq, window);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (cf.mask[i]) cf.force_samples[i] = seq[j++];
    }
  }
  return cf;
}

StiffnessFit fit_stiffness(const ConservativeForceSamples& cf, const BasisLibrary& lib,
                           bool weight_by_dq) {
  const std::size_t n = cf.q_samples.size();
  if (cf.force_samples.size() != n || cf.mask.size() != n) {
    throw Error(errc::invalid_argument, "fit_stiffness: sample arrays must share one length");
  }
  if (weight_by_dq && cf.abs_dq.size() != n) {
    throw Error(errc::invalid_argument, "fit_stiffness: increment weights are not available");
  }
  for (const BasisTerm& term : lib.terms()) {
    if (term.qd_exp != 0 || term.q_exp < 1) {
      throw Error(errc::invalid_argument,
                  "fit_stiffness: library must hold displacement-only terms of degree >= 1, got " +
                      render_term(term));
    }
  }

  std::vector<std::size_t> idx;
  idx.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (cf.mask[i]) idx.push_back(i);
  }
  if (idx.size() < lib.size()) {
    throw Error(errc::insufficient_samples,
                "fit_stiffness: " + std::to_string(idx.size()) + " retained samples for " +
                    std::to_string(lib.size()) + " terms");
  }

  Eigen::MatrixXd a(Eigen::Index(idx.size()), Eigen::Index(lib.size()));
  Eigen::VectorXd b(Eigen::Index(idx.size()));
  for (std::size_t row = 0; row < idx.size(); ++row) {
    const std::size_t i = idx[row];
    const double w = weight_by_dq ? cf.abs_dq[i] : 1.0;
    for (std::size_t j = 0; j < lib.size(); ++j) {
      a(Eigen::Index(row), Eigen::Index(j)) = w * eval_term(lib[j], cf.q_samples[i], 0.0);
    }
    b(Eigen::Index(row)) = -w * cf.force_samples[i];
  }
  LeastSquaresSolution sol = solve_least_squares(a, b);
  return {StiffnessModel(lib, std::move(sol.coeffs)), sol.residual_rms, std::move(sol.dropped)};
}

}  // namespace eddi
