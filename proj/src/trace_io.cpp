#include "lfc/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace lfc {

std::string format_double(double v) {
  if (v == 0.0) return "0";  // normalize -0
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_trace_csv(std::ostream& os, const Trace& trace,
                     const std::optional<TripEvent>& trip) {
  os << "t,de,dpg,dpm,dw,dw_meas,rocof_meas,dpl,dptie,p1,p2,p3,p4\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    os << format_double(trace.time_at(i));
    for (int j = 0; j < 6; ++j) os << ',' << format_double(trace.states[i](j));
    for (int j = 0; j < 2; ++j) os << ',' << format_double(trace.inputs[i](j));
    for (int j = 0; j < 4; ++j) os << ',' << format_double(trace.attacks[i](j));
    os << '\n';
  }
  if (trip) {
    os << "# trip," << to_string(trip->kind) << ',' << format_double(trip->time_s) << '\n';
  }
}

void write_trace_csv_file(const std::string& path, const Trace& trace,
                          const std::optional<TripEvent>& trip) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_trace_csv(os, trace, trip);
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace lfc
