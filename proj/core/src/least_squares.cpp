#include "eddi/least_squares.hpp"

#include <cmath>

#include "eddi/errors.hpp"

namespace eddi {

LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                         double pivot_ratio) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  if (rows < cols) {
    throw Error(errc::invalid_argument, "least squares: more columns than rows");
  }
  if (b.size() != rows) {
    throw Error(errc::invalid_argument, "least squares: right-hand side length mismatch");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::VectorXd pivots = qr.matrixR().diagonal().cwiseAbs();

  Eigen::Index rank = 0;
  if (pivots.size() > 0 && pivots(0) > 0.0) {
    rank = 1;
    while (rank < cols && pivots(rank) >= pivot_ratio * pivots(0)) ++rank;
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(cols);
  if (rank > 0) {
    const Eigen::MatrixXd a_perm = a * qr.colsPermutation();
    y.head(rank) = a_perm.leftCols(rank).householderQr().solve(b);
  }
  const Eigen::VectorXd x = qr.colsPermutation() * y;

  LeastSquaresSolution sol;
  sol.coeffs.assign(x.data(), x.data() + cols);
  sol.residual_rms = (a * x - b).norm() / std::sqrt(double(rows));
  for (Eigen::Index k = rank; k < cols; ++k) {
    sol.dropped.push_back(std::size_t(qr.colsPermutation().indices()(k)));
  }
  return sol;
}

}  // namespace eddi
