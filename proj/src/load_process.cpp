#include "lfc/load_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lfc/rng.hpp"

namespace lfc {

void LoadProcessConfig::validate() const {
  if (sigma_fast < 0.0 || sigma_slow < 0.0) {
    throw std::invalid_argument("LoadProcessConfig: sigmas must be >= 0");
  }
  if (!(fast_step_s > 0.0) || !(slow_step_s > 0.0)) {
    throw std::invalid_argument("LoadProcessConfig: steps must be > 0");
  }
  if (clamp_pu && !(*clamp_pu > 0.0)) {
    throw std::invalid_argument("LoadProcessConfig: clamp must be > 0");
  }
}

double LoadSchedule::at(double t) const {
  if (values.empty()) return 0.0;
  if (t <= 0.0) return values.front();
  auto idx = static_cast<std::size_t>(t / step_s);
  // guard the t == duration boundary
  idx = std::min(idx, values.size() - 1);
  return values[idx];
}

InputSchedule LoadSchedule::as_input() const {
  return [copy = *this](double t) { return ExogenousInput(copy.at(t), 0.0); };
}

LoadSchedule sample_load_trace(const LoadProcessConfig& config, double duration,
                               std::uint64_t seed) {
  config.validate();
  if (!(duration > 0.0)) throw std::invalid_argument("sample_load_trace: duration must be > 0");

  Rng rng(seed);
  Rng fast_rng = rng.split(1);
  Rng slow_rng = rng.split(2);

  const auto n = static_cast<std::size_t>(std::ceil(duration / config.fast_step_s));
  const auto slow_every =
      static_cast<std::size_t>(std::lround(config.slow_step_s / config.fast_step_s));

  LoadSchedule schedule;
  schedule.step_s = config.fast_step_s;
  schedule.values.reserve(n + 1);

  double w_fast = 0.0;
  double w_slow = 0.0;
  schedule.values.push_back(0.0);  // both walks start at zero
  for (std::size_t i = 1; i <= n; ++i) {
    w_fast += fast_rng.normal(0.0, config.sigma_fast);
    if (slow_every > 0 && i % slow_every == 0) {
      w_slow += slow_rng.normal(0.0, config.sigma_slow);
    }
    double v = w_fast + w_slow;
    if (config.clamp_pu) v = std::clamp(v, -*config.clamp_pu, *config.clamp_pu);
    schedule.values.push_back(v);
  }
  return schedule;
}

}  // namespace lfc
