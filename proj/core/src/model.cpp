#include "eddi/model.hpp"

#include <cmath>
#include <utility>

#include "eddi/errors.hpp"

namespace eddi {

namespace {

void check_coeffs(const BasisLibrary& lib, const std::vector<double>& coeffs, const char* what) {
  if (coeffs.size() != lib.size()) {
    throw Error(errc::invalid_argument,
                std::string(what) + ": coefficient count does not match library size");
  }
  for (double c : coeffs) {
    if (!std::isfinite(c)) {
      throw Error(errc::invalid_argument, std::string(what) + ": non-finite coefficient");
    }
  }
}

}  // namespace

DampingModel::DampingModel(BasisLibrary library, std::vector<double> coeffs)
    : library_(std::move(library)), coeffs_(std::move(coeffs)) {
  check_coeffs(library_, coeffs_, "damping model");
}

double DampingModel::evaluate(double q, double qd) const noexcept {
  double sum = 0.0;
  for (std::size_t j = 0; j < coeffs_.size(); ++j) {
    sum += coeffs_[j] * eval_term(library_[j], q, qd);
  }
  return sum;
}

StiffnessModel::StiffnessModel(BasisLibrary library, std::vector<double> coeffs)
    : library_(std::move(library)), coeffs_(std::move(coeffs)) {
  check_coeffs(library_, coeffs_, "stiffness model");
  for (const BasisTerm& term : library_.terms()) {
    if (term.qd_exp != 0 || term.q_exp < 1) {
      throw Error(errc::invalid_argument,
                  "stiffness model: terms must be displacement-only with degree >= 1, got " +
                      render_term(term));
    }
  }
}

double StiffnessModel::evaluate(double q) const noexcept {
  double sum = 0.0;
  for (std::size_t j = 0; j < coeffs_.size(); ++j) {
    sum += coeffs_[j] * eval_term(library_[j], q, 0.0);
  }
  return sum;
}

double StiffnessModel::potential(double q) const noexcept {
  double sum = 0.0;
  for (std::size_t j = 0; j < coeffs_.size(); ++j) {
    const unsigned n = library_[j].q_exp;
    sum += coeffs_[j] * eval_term({.q_exp = n + 1, .qd_exp = 0}, q, 0.0) / double(n + 1);
  }
  return sum;
}

IdentifiedSystem::IdentifiedSystem(double inertia_in, DampingModel damping_in,
                                   StiffnessModel stiffness_in)
    : inertia(inertia_in), damping(std::move(damping_in)), stiffness(std::move(stiffness_in)) {
  if (!(inertia > 0.0) || !std::isfinite(inertia)) {
    throw Error(errc::invalid_argument, "identified system: inertia must be positive and finite");
  }
}

}  // namespace eddi
