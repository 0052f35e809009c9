#include "eddi/sindy.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "eddi/errors.hpp"
#include "eddi/least_squares.hpp"
#include "eddi/time_series.hpp"

namespace eddi {

namespace {

void check_spec(const StlsqSpec& spec) {
  if (!(spec.threshold >= 0.0) || !std::isfinite(spec.threshold)) {
    throw Error(errc::invalid_argument, "stlsq: threshold must be finite and >= 0");
  }
  if (spec.max_iters < 1) {
    throw Error(errc::invalid_argument, "stlsq: max_iters must be >= 1");
  }
}

// Least squares restricted to the active columns; inactive slots stay 0.
std::vector<double> solve_active(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y,
                                 const std::vector<bool>& active) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < theta.cols(); ++j) {
    if (active[std::size_t(j)]) cols.push_back(j);
  }
  Eigen::MatrixXd sub(theta.rows(), Eigen::Index(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    sub.col(Eigen::Index(c)) = theta.col(cols[c]);
  }
  const LeastSquaresSolution sol = solve_least_squares(sub, y);
  std::vector<double> xi(std::size_t(theta.cols()), 0.0);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    xi[std::size_t(cols[c])] = sol.coeffs[c];
  }
  return xi;
}

}  // namespace

StlsqResult stlsq(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y, const StlsqSpec& spec) {
  check_spec(spec);
  if (theta.rows() < theta.cols() || theta.cols() == 0) {
    throw Error(errc::invalid_argument,
                "stlsq: need at least as many rows as columns, got " +
                    std::to_string(theta.rows()) + "x" + std::to_string(theta.cols()));
  }
  if (theta.rows() != y.size()) {
    throw Error(errc::invalid_argument, "stlsq: row count and target length differ");
  }

  const std::size_t n_cols = std::size_t(theta.cols());
  Eigen::MatrixXd work = theta;
  std::vector<double> scale(n_cols, 1.0);
  if (spec.normalize_columns) {
    for (std::size_t j = 0; j < n_cols; ++j) {
      const double norm = work.col(Eigen::Index(j)).norm();
      if (norm > 0.0) {
        scale[j] = norm;
        work.col(Eigen::Index(j)) /= norm;
      }
    }
  }

  std::vector<bool> active(n_cols, true);
  StlsqResult result;
  std::vector<double> xi = solve_active(work, y, active);
  result.active_count_history.push_back(n_cols);

  for (int iter = 0; iter < spec.max_iters; ++iter) {
    bool changed = false;
    std::size_t remaining = 0;
    for (std::size_t j = 0; j < n_cols; ++j) {
      if (!active[j]) continue;
      if (std::abs(xi[j]) < spec.threshold) {
        active[j] = false;
        xi[j] = 0.0;
        changed = true;
      } else {
        ++remaining;
      }
    }
    if (remaining == 0) {
      throw Error(errc::all_thresholded, "stlsq: threshold " + std::to_string(spec.threshold) +
                                             " deactivated every column");
    }
    if (!changed) break;
    xi = solve_active(work, y, active);
    result.active_count_history.push_back(remaining);
  }

  result.coeffs.resize(n_cols);
  for (std::size_t j = 0; j < n_cols; ++j) {
    result.coeffs[j] = active[j] ? xi[j] / scale[j] : 0.0;
  }
  return result;
}

IdentifiedSystem sindy_identify(const Response& r, const BasisLibrary& damping_lib,
                                const BasisLibrary& stiffness_lib, const StlsqSpec& spec) {
  const TimeSeries qdd = r.qdd ? *r.qdd : central_diff(r.qd);
  const std::size_t n = r.size();
  const std::size_t n_damp = damping_lib.size();
  const std::size_t n_stiff = stiffness_lib.size();

  Eigen::MatrixXd theta(Eigen::Index(n), Eigen::Index(n_damp + n_stiff));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double q = r.q[i];
    const double qd = r.qd[i];
    for (std::size_t j = 0; j < n_damp; ++j) {
      theta(Eigen::Index(i), Eigen::Index(j)) = eval_term(damping_lib[j], q, qd);
    }
    for (std::size_t j = 0; j < n_stiff; ++j) {
      theta(Eigen::Index(i), Eigen::Index(n_damp + j)) = eval_term(stiffness_lib[j], q, qd);
    }
    y(Eigen::Index(i)) = -r.inertia * qdd[i];
  }

  const StlsqResult sol = stlsq(theta, y, spec);
  std::vector<double> b(sol.coeffs.begin(), sol.coeffs.begin() + std::ptrdiff_t(n_damp));
  std::vector<double> k(sol.coeffs.begin() + std::ptrdiff_t(n_damp), sol.coeffs.end());
  return IdentifiedSystem(r.inertia, DampingModel(damping_lib, std::move(b)),
                          StiffnessModel(stiffness_lib, std::move(k)));
}

}  // namespace eddi
