#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "eddi/basis.hpp"
#include "eddi/model.hpp"
#include "eddi/response.hpp"

namespace eddi {

struct StlsqSpec {
  double threshold = 0.0;  // lambda
  int max_iters = 20;
  bool normalize_columns = true;
};

struct StlsqResult {
  std::vector<double> coeffs;  // original units; deactivated entries exactly 0
  // Active-column count after each least-squares solve. Strictly a record of
  // the shrinking support: entries never increase.
  std::vector<std::size_t> active_count_history;
};

// Sequentially thresholded least squares: solve, deactivate columns whose
// coefficient magnitude falls below threshold, resolve, until stable or
// max_iters rounds. With normalize_columns, columns are scaled to unit 2-norm
// first and the threshold applies to the normalized coefficients (raw
// coefficients here span many orders of magnitude, so a raw threshold would
// be meaningless); reported coefficients are always in original units.
StlsqResult stlsq(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y, const StlsqSpec& spec);

// Single joint regression of -inertia * qdd (free response) against the
// concatenated damping and stiffness dictionaries on the full grid, split
// back into the two models by library membership. Uses the recorded qdd when
// present, otherwise differentiates qd.
IdentifiedSystem sindy_identify(const Response& r, const BasisLibrary& damping_lib,
                                const BasisLibrary& stiffness_lib, const StlsqSpec& spec);

}  // namespace eddi
