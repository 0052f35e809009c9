#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "eddi/least_squares.hpp"
#include "eddi/model.hpp"
#include "eddi/response.hpp"

namespace eddi {

// Times where the displacement passes through zero, each paired with the
// interpolated kinetic energy there. At these instants the potential vanishes,
// so the kinetic energy IS the mechanical energy — the anchor of phase one.
struct ZeroCrossingSet {
  std::vector<double> gammas;      // strictly increasing, seconds
  std::vector<double> T_at_gamma;  // joules

  std::size_t size() const noexcept { return gammas.size(); }
};

struct EnergyTrace {
  TimeSeries T;  // kinetic
  TimeSeries D;  // cumulative dissipated, zero at the first crossing
  TimeSeries E;  // estimated mechanical, E = T(gamma0) - D
};

// T(t) = 1/2 * inertia * qd(t)^2 on the response grid.
TimeSeries kinetic_energy(const Response& r);

// Linear-interpolated roots of q. Crossings whose kinetic energy falls below
// min_T_fraction times the first crossing's are discarded (tail noise guard).
ZeroCrossingSet find_zero_crossings(const Response& r, double min_T_fraction = 1e-4);

// Build the phase-one regression: Q(i,j) = integral over [gamma_0, gamma_i]
// of qd * B_j(q, qd); R(i) = T(gamma_0) - T(gamma_i); i = 1..N. Solving
// Q b = R balances dissipated energy against kinetic-energy loss between
// crossings, where the potential terms drop out.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_system(const Response& r,
                                                            const BasisLibrary& lib,
                                                            const ZeroCrossingSet& zc);

// Least-squares damping coefficients; see solve_least_squares for the rank
// handling contract.
LeastSquaresSolution solve_damping(const Eigen::MatrixXd& q_mat, const Eigen::VectorXd& r_vec);

// D(t) = integral over [gamma0, t] of qd * B(q, qd), on the response grid
// restricted to t >= gamma0 (the off-grid gamma0 offset is interpolated away).
TimeSeries dissipated_energy(const Response& r, const DampingModel& dm, double gamma0);

// E = T_gamma0 - D on D's grid; the kinetic series is accepted alongside to
// enforce that the caller kept the two on one grid.
TimeSeries mechanical_energy(const TimeSeries& t_series, const TimeSeries& d_series,
                             double T_gamma0);

// Kinetic, dissipated, and estimated mechanical energy on the grid restricted
// to [gamma_0, gamma_N].
EnergyTrace make_energy_trace(const Response& r, const DampingModel& dm,
                              const ZeroCrossingSet& zc);

// Optional post-hoc simplification: drop terms whose removal changes the
// final dissipated energy by less than rel_threshold (relative). At least one
// term is always retained.
DampingModel prune_damping(const Response& r, const DampingModel& dm, double gamma0,
                           double rel_threshold = 1e-3);

}  // namespace eddi
