#pragma once

#include <cstddef>
#include <vector>

#include "eddi/least_squares.hpp"
#include "eddi/model.hpp"
#include "eddi/response.hpp"

namespace eddi {

// Pointwise conservative-force estimate dL/dq, sampled against displacement.
// Entries with mask = false (grid endpoints and turning points, where the
// displacement increment vanishes) are excluded from every fit; their force
// slots hold 0. abs_dq records |central displacement increment| per sample
// and feeds the optional increment weighting in fit_stiffness.
struct ConservativeForceSamples {
  std::vector<double> q_samples;
  std::vector<double> force_samples;
  std::vector<bool> mask;  // true = retained
  std::vector<double> abs_dq;

  std::size_t size() const noexcept { return q_samples.size(); }
  std::size_t retained_count() const noexcept;
};

// L = 2T - E pointwise on a shared grid.
TimeSeries lagrangian(const TimeSeries& t_series, const TimeSeries& e_series);

// Estimate dL/dq by central differences: at each interior sample,
// (L[i+1]-L[i-1] - p[i]*(qd[i+1]-qd[i-1])) / (q[i+1]-q[i-1]) with
// p = inertia * qd. Samples whose displacement increment falls below
// eps_dq * max|increment| are masked out (the division blows up at turning
// points). Retained samples are then smoothed by a centered moving average
// over the retained sequence in time order; smooth_window is clamped to the
// retained count, and a window of 1 disables smoothing.
//
// L may cover a trailing sub-window of the response grid (same spacing,
// on-grid start); samples are aligned by time.
ConservativeForceSamples conservative_force(const TimeSeries& l_series, const Response& r,
                                            double eps_dq = 1e-3,
                                            std::size_t smooth_window = 100);

struct StiffnessFit {
  StiffnessModel model;
  double residual_rms;
  std::vector<std::size_t> dropped;
};

// Least-squares fit of the restoring force K(q) = sum k_n q^n to the masked
// samples, with K = -dL/dq (a hardening spring pulls back, so its k come out
// positive). Same rank handling as solve_least_squares. With weight_by_dq,
// rows are weighted by abs_dq: samples near turning points carry the largest
// discretization error, so they count least.
StiffnessFit fit_stiffness(const ConservativeForceSamples& cf, const BasisLibrary& lib,
                           bool weight_by_dq = false);

}  // namespace eddi
