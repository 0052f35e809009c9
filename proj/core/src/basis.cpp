#include "eddi/basis.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace eddi {
namespace {

constexpr unsigned kMaxExponent = 99;

double ipow(double base, unsigned exp) noexcept {
  double out = 1.0;
  while (exp > 0) {
    if (exp & 1u) out *= base;
    base *= base;
    exp >>= 1u;
  }
  return out;
}

void check_terms(const std::vector<BasisTerm>& terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].q_exp == 0 && terms[i].qd_exp == 0) {
      throw Error(errc::invalid_argument, "basis library: constant term not allowed");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (terms[j] == terms[i]) {
        throw Error(errc::duplicate_term,
                    "basis library: duplicate term '" + render_term(terms[i]) + "'");
      }
    }
  }
}

// Cursor over the input; all failures report a byte offset into `text`.
struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  [[noreturn]] void fail(std::size_t at, const std::string& expected) const {
    throw ParseError(at, "term list: expected " + expected + " at offset " +
                             std::to_string(at));
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  // factor := ('q' | 'qd') ('^' uint)?
  void parse_factor(BasisTerm& term) {
    skip_ws();
    if (pos >= text.size() || text[pos] != 'q') fail(pos, "'q' or 'qd'");
    ++pos;
    bool velocity = false;
    if (pos < text.size() && text[pos] == 'd') {
      velocity = true;
      ++pos;
    }
    unsigned exp = 1;
    skip_ws();
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      skip_ws();
      const std::size_t digits_at = pos;
      std::size_t end = pos;
      while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
      if (end == pos) fail(digits_at, "unsigned integer exponent");
      auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + end, exp);
      if (ec != std::errc() || exp > kMaxExponent) {
        throw ParseError(digits_at, "term list: exponent out of range at offset " +
                                        std::to_string(digits_at));
      }
      pos = end;
    }
    if (velocity) {
      term.qd_exp += exp;
    } else {
      term.q_exp += exp;
    }
  }

  // term := factor ('*' factor)*
  BasisTerm parse_term() {
    const std::size_t term_at = (skip_ws(), pos);
    BasisTerm term;
    parse_factor(term);
    while (true) {
      skip_ws();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        parse_factor(term);
      } else {
        break;
      }
    }
    if (term.q_exp == 0 && term.qd_exp == 0) {
      throw ParseError(term_at, "term list: constant term (all exponents zero) at offset " +
                                    std::to_string(term_at));
    }
    return term;
  }

  std::vector<BasisTerm> parse_library() {
    std::vector<BasisTerm> terms;
    terms.push_back(parse_term());
    while (!at_end()) {
      if (text[pos] != ',') fail(pos, "',' or end of input");
      ++pos;
      terms.push_back(parse_term());
    }
    return terms;
  }
};

}  // namespace

BasisLibrary::BasisLibrary(std::vector<BasisTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) {
    throw Error(errc::invalid_argument, "basis library: no terms");
  }
  check_terms(terms_);
}

BasisLibrary BasisLibrary::parse(std::string_view text) {
  Parser parser{text};
  return BasisLibrary(parser.parse_library());
}

std::string render_term(const BasisTerm& term) {
  std::string out;
  if (term.q_exp > 0) {
    out += "q";
    if (term.q_exp > 1) out += "^" + std::to_string(term.q_exp);
  }
  if (term.qd_exp > 0) {
    if (!out.empty()) out += "*";
    out += "qd";
    if (term.qd_exp > 1) out += "^" + std::to_string(term.qd_exp);
  }
  return out;
}

std::string BasisLibrary::render() const {
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0) out += ", ";
    out += render_term(terms_[i]);
  }
  return out;
}

double eval_term(const BasisTerm& term, double q, double qd) noexcept {
  return ipow(q, term.q_exp) * ipow(qd, term.qd_exp);
}

TimeSeries eval_term(const BasisTerm& term, const TimeSeries& q, const TimeSeries& qd) {
  require_same_grid(q, qd);
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = eval_term(term, q[i], qd[i]);
  }
  return TimeSeries(q.t0(), q.dt(), std::move(out));
}

}  // namespace eddi
