#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "lfc/grid_model.hpp"
#include "lfc/protection.hpp"

namespace lfc {

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

/// Writes a trace as CSV with header
/// t,de,dpg,dpm,dw,dw_meas,rocof_meas,dpl,dptie,p1,p2,p3,p4
/// and, when a trip is given, a terminal annotation row
/// "# trip,<kind>,<time>".
void write_trace_csv(std::ostream& os, const Trace& trace,
                     const std::optional<TripEvent>& trip = std::nullopt);

void write_trace_csv_file(const std::string& path, const Trace& trace,
                          const std::optional<TripEvent>& trip = std::nullopt);

}  // namespace lfc
