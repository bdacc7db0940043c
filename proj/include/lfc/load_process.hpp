#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lfc/grid_model.hpp"

namespace lfc {

/// Two-timescale Gaussian random walk for normal-operation demand.
/// A fast walk steps every fast_step seconds with N(0, sigma_fast^2)
/// increments; a slow walk steps every slow_step seconds with
/// N(0, sigma_slow^2) increments. The demand is their sum, zero-order held.
struct LoadProcessConfig {
  double sigma_fast = 0.05 / 3.0;
  double sigma_slow = 0.2 / 3.0;
  double fast_step_s = 1.0;
  double slow_step_s = 300.0;
  std::optional<double> clamp_pu;  // symmetric |dP_L| clamp, off by default

  void validate() const;
};

/// Piecewise-constant demand schedule. Value i applies on
/// [i * fast_step, (i+1) * fast_step).
struct LoadSchedule {
  double step_s = 1.0;
  std::vector<double> values;

  double at(double t) const;
  InputSchedule as_input() const;  // dP_L on channel 0, dP_tie = 0
};

/// Samples a demand trace over [0, duration]. Both walks start at zero and
/// the output is deterministic given the seed.
LoadSchedule sample_load_trace(const LoadProcessConfig& config, double duration,
                               std::uint64_t seed);

}  // namespace lfc
