#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eddi {

// Failure categories carried by Error. The CLI maps these onto exit codes;
// library callers can branch on them without parsing messages.
enum class errc {
  invalid_argument,
  series_too_short,
  out_of_range,
  window_too_large,
  grid_mismatch,
  invalid_cutoff,
  parse_error,
  duplicate_term,
  no_crossings,
  insufficient_crossings,
  insufficient_samples,
  all_masked,
  all_thresholded,
  step_size_underflow,
  frequency_above_nyquist,
  csv_format,
  io_error,
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

// Term-list syntax failure; offset is the byte position in the input string.
class ParseError : public Error {
public:
  ParseError(std::size_t offset, const std::string& what)
      : Error(errc::parse_error, what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

}  // namespace eddi
