#pragma once

#include <vector>

#include "eddi/basis.hpp"

namespace eddi {

// Dissipative force model B(q, qd) = sum_j coeffs[j] * library[j](q, qd).
class DampingModel {
public:
  DampingModel(BasisLibrary library, std::vector<double> coeffs);

  const BasisLibrary& library() const noexcept { return library_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }

  double evaluate(double q, double qd) const noexcept;

private:
  BasisLibrary library_;
  std::vector<double> coeffs_;
};

// Conservative restoring-force model K(q) = sum_n coeffs[n] * q^exp(n).
// Terms are displacement-only monomials of degree >= 1.
class StiffnessModel {
public:
  StiffnessModel(BasisLibrary library, std::vector<double> coeffs);

  const BasisLibrary& library() const noexcept { return library_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }

  double evaluate(double q) const noexcept;

  // Potential energy V(q) = integral of K from 0 to q; V(0) = 0.
  double potential(double q) const noexcept;

private:
  BasisLibrary library_;
  std::vector<double> coeffs_;
};

// Full single-degree-of-freedom model: inertia * qdd + B(q, qd) + K(q) = F(t).
struct IdentifiedSystem {
  double inertia;
  DampingModel damping;
  StiffnessModel stiffness;

  IdentifiedSystem(double inertia_in, DampingModel damping_in, StiffnessModel stiffness_in);
};

}  // namespace eddi
