#include "eddi/damping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eddi/errors.hpp"

namespace eddi {

namespace {

// Index of the first grid sample at or after t (with on-grid slack).
std::size_t first_index_at(const TimeSeries& s, double t) {
  const double pos = (t - s.t0()) / s.dt();
  const double slack = 1e-9 * std::max(1.0, std::abs(pos));
  return std::size_t(std::max(0.0, std::ceil(pos - slack)));
}

// Index of the last grid sample at or before t.
std::size_t last_index_at(const TimeSeries& s, double t) {
  const double pos = (t - s.t0()) / s.dt();
  const double slack = 1e-9 * std::max(1.0, std::abs(pos));
  const auto idx = std::size_t(std::floor(pos + slack));
  return std::min(idx, s.size() - 1);
}

TimeSeries damping_power(const Response& r, const DampingModel& dm) {
  std::vector<double> p(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    p[i] = r.qd[i] * dm.evaluate(r.q[i], r.qd[i]);
  }
  return TimeSeries(r.q.t0(), r.q.dt(), std::move(p));
}

}  // namespace

TimeSeries kinetic_energy(const Response& r) {
  std::vector<double> t(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    t[i] = 0.5 * r.inertia * r.qd[i] * r.qd[i];
  }
  return TimeSeries(r.q.t0(), r.q.dt(), std::move(t));
}

ZeroCrossingSet find_zero_crossings(const Response& r, double min_T_fraction) {
  const TimeSeries& q = r.q;
  std::vector<double> gammas;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) {
      gammas.push_back(q.time(i));
    } else if (i + 1 < q.size() && q[i] * q[i + 1] < 0.0) {
      const double frac = q[i] / (q[i] - q[i + 1]);
      gammas.push_back(q.time(i) + frac * q.dt());
    }
  }
  if (gammas.empty()) {
    throw Error(errc::no_crossings, "zero crossings: displacement never crosses zero");
  }

  const TimeSeries t_series = kinetic_energy(r);
  std::vector<double> t_at;
  t_at.reserve(gammas.size());
  for (double g : gammas) t_at.push_back(interp_at(t_series, g));

  const double floor_energy = min_T_fraction * t_at.front();
  ZeroCrossingSet zc;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (t_at[i] >= floor_energy) {
      zc.gammas.push_back(gammas[i]);
      zc.T_at_gamma.push_back(t_at[i]);
    }
  }
  if (zc.gammas.empty()) {
    throw Error(errc::no_crossings, "zero crossings: all crossings fall below the energy floor");
  }
  return zc;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_system(const Response& r,
                                                            const BasisLibrary& lib,
                                                            const ZeroCrossingSet& zc) {
  const std::size_t m = lib.size();
  if (zc.size() < m + 1) {
    throw Error(errc::insufficient_crossings,
                "damping system: need at least " + std::to_string(m + 1) + " crossings, have " +
                    std::to_string(zc.size()));
  }
  const std::size_t n = zc.size() - 1;

  Eigen::MatrixXd q_mat(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> integrand(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      integrand[i] = r.qd[i] * eval_term(lib[j], r.q[i], r.qd[i]);
    }
    const TimeSeries cumulative = cumtrapz(TimeSeries(r.q.t0(), r.q.dt(), std::move(integrand)));
    const double at_gamma0 = interp_at(cumulative, zc.gammas[0]);
    for (std::size_t i = 1; i <= n; ++i) {
      q_mat(i - 1, j) = interp_at(cumulative, zc.gammas[i]) - at_gamma0;
    }
  }

  Eigen::VectorXd r_vec(n);
  for (std::size_t i = 1; i <= n; ++i) {
    r_vec(i - 1) = zc.T_at_gamma[0] - zc.T_at_gamma[i];
  }
  return {std::move(q_mat), std::move(r_vec)};
}

LeastSquaresSolution solve_damping(const Eigen::MatrixXd& q_mat, const Eigen::VectorXd& r_vec) {
  return solve_least_squares(q_mat, r_vec);
}

TimeSeries dissipated_energy(const Response& r, const DampingModel& dm, double gamma0) {
  if (gamma0 < r.q.t0() || gamma0 > r.q.t_end()) {
    throw Error(errc::out_of_range, "dissipated energy: gamma0 outside the record");
  }
  const TimeSeries cumulative = cumtrapz(damping_power(r, dm));
  const double at_gamma0 = interp_at(cumulative, gamma0);
  const std::size_t i0 = first_index_at(cumulative, gamma0);

  std::vector<double> d(cumulative.size() - i0);
  for (std::size_t i = i0; i < cumulative.size(); ++i) {
    d[i - i0] = cumulative[i] - at_gamma0;
  }
  return TimeSeries(cumulative.time(i0), cumulative.dt(), std::move(d));
}

TimeSeries mechanical_energy(const TimeSeries& t_series, const TimeSeries& d_series,
                             double T_gamma0) {
  require_same_grid(t_series, d_series);
  std::vector<double> e(d_series.size());
  for (std::size_t i = 0; i < d_series.size(); ++i) e[i] = T_gamma0 - d_series[i];
  return TimeSeries(d_series.t0(), d_series.dt(), std::move(e));
}

EnergyTrace make_energy_trace(const Response& r, const DampingModel& dm,
                              const ZeroCrossingSet& zc) {
  const TimeSeries d_full = dissipated_energy(r, dm, zc.gammas.front());
  const std::size_t i1 = last_index_at(d_full, zc.gammas.back());
  std::vector<double> d(d_full.values().begin(), d_full.values().begin() + i1 + 1);

  const TimeSeries t_full = kinetic_energy(r);
  const std::size_t t_i0 = first_index_at(t_full, zc.gammas.front());
  std::vector<double> t(t_full.values().begin() + t_i0,
                        t_full.values().begin() + t_i0 + i1 + 1);

  TimeSeries t_restricted(d_full.t0(), d_full.dt(), std::move(t));
  TimeSeries d_restricted(d_full.t0(), d_full.dt(), std::move(d));
  TimeSeries e = mechanical_energy(t_restricted, d_restricted, zc.T_at_gamma.front());
  return EnergyTrace{std::move(t_restricted), std::move(d_restricted), std::move(e)};
}

DampingModel prune_damping(const Response& r, const DampingModel& dm, double gamma0,
                           double rel_threshold) {
  const TimeSeries d_full = dissipated_energy(r, dm, gamma0);
  const double d_end = d_full[d_full.size() - 1];
  if (d_end == 0.0) return dm;

  const std::size_t m = dm.library().size();
  std::vector<double> impact(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> reduced = dm.coeffs();
    reduced[j] = 0.0;
    const TimeSeries d_wo = dissipated_energy(r, DampingModel(dm.library(), reduced), gamma0);
    impact[j] = std::abs(d_wo[d_wo.size() - 1] - d_end) / std::abs(d_end);
  }

  std::vector<BasisTerm> kept_terms;
  std::vector<double> kept_coeffs;
  for (std::size_t j = 0; j < m; ++j) {
    if (impact[j] >= rel_threshold) {
      kept_terms.push_back(dm.library()[j]);
      kept_coeffs.push_back(dm.coeffs()[j]);
    }
  }
  if (kept_terms.empty()) {
    const std::size_t best = std::size_t(std::max_element(impact.begin(), impact.end()) -
                                         impact.begin());
    kept_terms.push_back(dm.library()[best]);
    kept_coeffs.push_back(dm.coeffs()[best]);
  }
  return DampingModel(BasisLibrary(std::move(kept_terms)), std::move(kept_coeffs));
}

}  // namespace eddi
