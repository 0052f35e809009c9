#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eddi/time_series.hpp"

namespace eddi {

// Monomial q^q_exp * qd^qd_exp in displacement and velocity.
struct BasisTerm {
  unsigned q_exp = 0;
  unsigned qd_exp = 0;
  friend bool operator==(const BasisTerm&, const BasisTerm&) = default;
};

// Ordered list of distinct, non-constant monomials. Order is meaningful: it is
// the column order of every regression built from the library.
//
// Text form:
//   library := term (',' term)*
//   term    := factor ('*' factor)*
//   factor  := ('q' | 'qd') ('^' uint)?
// Whitespace is ignored; repeated factors multiply, so "q*q*qd" is q^2*qd.
class BasisLibrary {
public:
  explicit BasisLibrary(std::vector<BasisTerm> terms);
  static BasisLibrary parse(std::string_view text);

  std::size_t size() const noexcept { return terms_.size(); }
  const BasisTerm& operator[](std::size_t i) const noexcept { return terms_[i]; }
  const std::vector<BasisTerm>& terms() const noexcept { return terms_; }

  // Canonical text form; parse(render()) reproduces the library exactly.
  std::string render() const;

  friend bool operator==(const BasisLibrary&, const BasisLibrary&) = default;

private:
  std::vector<BasisTerm> terms_;
};

std::string render_term(const BasisTerm& term);

double eval_term(const BasisTerm& term, double q, double qd) noexcept;
TimeSeries eval_term(const BasisTerm& term, const TimeSeries& q, const TimeSeries& qd);

}  // namespace eddi
