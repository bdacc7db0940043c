#include "lfc/grid_model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace lfc {

void SystemParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("SystemParams: ") + name + " must be positive");
    }
  };
  positive(governor_tc, "governor_tc");
  positive(turbine_tc, "turbine_tc");
  positive(freq_sensor_tc, "freq_sensor_tc");
  positive(rocof_sensor_tc, "rocof_sensor_tc");
  positive(inertia, "inertia");
  positive(agc_gain, "agc_gain");
  positive(droop_gain, "droop_gain");
  positive(measurement_gain, "measurement_gain");
  positive(base_frequency, "base_frequency");
  if (damping < 0.0 || !std::isfinite(damping)) {
    throw std::invalid_argument("SystemParams: damping must be >= 0");
  }
}

SystemParams mg_preset(const std::string& name) {
  SystemParams p;
  if (name == "MG1") {
    p.agc_gain = 3.0;
    p.droop_gain = 40.0;
    p.governor_tc = 0.08;
    p.turbine_tc = 0.45;
    p.inertia = 6.0;
    p.damping = 0.03;
  } else if (name == "MG2") {
    p.agc_gain = 10.0;
    p.droop_gain = 50.0;
    p.governor_tc = 0.08;
    p.turbine_tc = 0.45;
    p.inertia = 6.0;
    p.damping = 0.03;
  } else if (name == "MG3") {
    p.agc_gain = 12.0;
    p.droop_gain = 50.0;
    p.governor_tc = 0.1;
    p.turbine_tc = 0.45;
    p.inertia = 8.0;
    p.damping = 0.03;
  } else {
    throw std::invalid_argument("unknown system preset: " + name);
  }
  return p;
}

StateMatrices build_state_matrices(const SystemParams& params) {
  params.validate();
  const double k = params.agc_gain;
  const double d = params.droop_gain;
  const double tg = params.governor_tc;
  const double tt = params.turbine_tc;
  const double M = params.inertia;
  const double D = params.damping;
  const double tw = params.freq_sensor_tc;
  const double tv = params.rocof_sensor_tc;
  const double B = params.measurement_gain;

  StateMatrices m;
  m.A.setZero();
  m.B.setZero();
  m.W.setZero();

  m.A(0, 3) = -(k * B);
  m.A(1, 0) = 1.0 / tg;
  m.A(1, 1) = -1.0 / tg;
  m.A(1, 3) = -d / tg;
  m.A(2, 1) = 1.0 / tt;
  m.A(2, 2) = -1.0 / tt;
  m.A(3, 2) = 1.0 / M;
  m.A(3, 3) = -D / M;
  m.A(4, 3) = 1.0 / tw;
  m.A(4, 4) = -1.0 / tw;
  m.A(5, 2) = 1.0 / (M * tv);
  m.A(5, 3) = -D / (M * tv);
  m.A(5, 5) = -1.0 / tv;

  m.B(1, 1) = -k;
  m.B(3, 0) = -1.0 / M;
  m.B(5, 0) = -1.0 / (M * tv);

  m.W(0, 0) = -(k * B);
  m.W(0, 1) = k;
  m.W(0, 2) = -k;
  m.W(3, 3) = -1.0 / M;
  m.W(5, 3) = -1.0 / (M * tv);
  return m;
}

PlantState derivative(const PlantState& x, const ExogenousInput& u,
                      const AttackVector& p, const StateMatrices& m) {
  return m.A * x + m.B * u + m.W * p;
}

PlantState step(const PlantState& x, const ExogenousInput& u, const AttackVector& p,
                const StateMatrices& m, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  const PlantState k1 = derivative(x, u, p, m);
  const PlantState k2 = derivative(x + 0.5 * dt * k1, u, p, m);
  const PlantState k3 = derivative(x + 0.5 * dt * k2, u, p, m);
  const PlantState k4 = derivative(x + dt * k3, u, p, m);
  PlantState next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) {
    throw std::runtime_error("step: state became non-finite (dt=" + std::to_string(dt) + ")");
  }
  return next;
}

Trace simulate(const SystemParams& params, const InputSchedule& input,
               const AttackSchedule& attack, double horizon, double dt_sample,
               double dt_internal) {
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate: horizon must be > 0");
  if (!(dt_sample > 0.0) || !(dt_internal > 0.0)) {
    throw std::invalid_argument("simulate: step sizes must be > 0");
  }
  const double sub_real = dt_sample / dt_internal;
  const int sub = static_cast<int>(std::lround(sub_real));
  if (sub < 1 || std::abs(sub_real - sub) > 1e-9) {
    throw std::invalid_argument("simulate: dt_internal must divide dt_sample");
  }
  const StateMatrices m = build_state_matrices(params);
  const auto n_samples = static_cast<std::size_t>(std::lround(horizon / dt_sample));

  Trace trace;
  trace.dt = dt_sample;
  trace.states.reserve(n_samples + 1);
  trace.inputs.reserve(n_samples + 1);
  trace.attacks.reserve(n_samples + 1);

  PlantState x = PlantState::Zero();
  trace.states.push_back(x);
  trace.inputs.push_back(input(0.0));
  trace.attacks.push_back(attack(0.0));

  for (std::size_t i = 0; i < n_samples; ++i) {
    for (int j = 0; j < sub; ++j) {
      const double t = static_cast<double>(i) * dt_sample + j * dt_internal;
      x = step(x, input(t), attack(t), m, dt_internal);
    }
    const double ts = static_cast<double>(i + 1) * dt_sample;
    trace.states.push_back(x);
    trace.inputs.push_back(input(ts));
    trace.attacks.push_back(attack(ts));
  }
  return trace;
}

std::vector<std::complex<double>> eigenmodes(const SystemParams& params) {
  const StateMatrices m = build_state_matrices(params);
  Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> solver(m.A, false);
  std::vector<std::complex<double>> eigs(6);
  for (int i = 0; i < 6; ++i) eigs[i] = solver.eigenvalues()(i);
  // deterministic presentation: sort by real part, then imaginary part
  std::sort(eigs.begin(), eigs.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return eigs;
}

double dominant_mode_frequency(const SystemParams& params) {
  double best_real = -std::numeric_limits<double>::infinity();
  double freq = 0.0;
  bool found = false;
  for (const auto& z : eigenmodes(params)) {
    if (std::abs(z.imag()) > 1e-9 && z.real() > best_real) {
      best_real = z.real();
      freq = std::abs(z.imag());
      found = true;
    }
  }
  if (!found) throw std::runtime_error("dominant_mode_frequency: no oscillatory eigenpair");
  return freq;
}

}  // namespace lfc
