#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace eddi {

struct LeastSquaresSolution {
  std::vector<double> coeffs;
  double residual_rms = 0.0;          // ||A x - b||_2 / sqrt(rows)
  std::vector<std::size_t> dropped;   // columns zeroed by rank handling
};

// Minimum residual solve of A x = b via column-pivoted QR. Requires rows >=
// cols. Columns whose pivot falls below pivot_ratio times the leading pivot
// are linearly dependent up to noise: their coefficients are zeroed and their
// indices reported in `dropped` rather than amplified into the solution.
LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                         double pivot_ratio = 1e-10);

}  // namespace eddi
