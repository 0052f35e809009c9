#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "eddi/time_series.hpp"

namespace eddi {

// Named columns sampled on one uniform time grid, as stored in the shared
// CSV layout: header line, column 1 `t` strictly increasing and uniform
// within 1e-9 relative, remaining columns named signals. dt is re-derived
// from the file as the mean step, snapped to the nearest short decimal when
// the two agree to within a few ulps.
struct CsvTable {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<std::string> names;             // excluding t
  std::vector<std::vector<double>> columns;   // one per name, equal lengths

  std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
  bool has(std::string_view name) const noexcept;
  TimeSeries series(std::string_view name) const;  // errc::csv_format if absent
};

// Errors carry file line numbers (the header is line 1).
CsvTable read_timeseries_csv(std::istream& in);
CsvTable read_timeseries_csv(const std::filesystem::path& path);

// Writes t plus the named series, which must share one grid. Numbers are
// shortest-round-trip formatted, so write -> read -> write is byte-stable.
void write_timeseries_csv(std::ostream& out, const std::vector<std::string>& names,
                          const std::vector<const TimeSeries*>& series);
void write_timeseries_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                          const std::vector<const TimeSeries*>& series);

// Plain rectangular CSV without the time-column contract (restoring-force
// samples, spectra, scalogram rows).
void write_csv(std::ostream& out, const std::vector<std::string>& names,
               const std::vector<const std::vector<double>*>& columns);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
               const std::vector<const std::vector<double>*>& columns);

// Shortest representation that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace eddi
