#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace lfc {

/// Load-frequency-control plant parameters. All quantities per-unit on the
/// system base except the time constants (seconds) and base frequency (Hz).
struct SystemParams {
  double agc_gain = 3.0;          // k
  double droop_gain = 40.0;       // d
  double governor_tc = 0.08;      // tau_G, s
  double turbine_tc = 0.45;       // tau_T, s
  double inertia = 6.0;           // M, s
  double damping = 0.03;          // D
  double freq_sensor_tc = 0.1;    // tau_omega, s
  double rocof_sensor_tc = 0.1;   // tau_nu, s
  double measurement_gain = 1.0;  // B
  double base_frequency = 60.0;   // Hz

  /// Throws std::invalid_argument when a time constant or gain is out of range.
  void validate() const;
};

/// Named presets MG1..MG3 (2.5 MVA-class microgrid models).
SystemParams mg_preset(const std::string& name);

/// State vector x = (de, dpg, dpm, dw, dw_meas, rocof_meas):
/// governor-droop control signal, governor output, mechanical power, system
/// frequency, measured frequency, measured rate of change of frequency.
/// All per-unit deviations from nominal; rocof_meas in pu/s.
using PlantState = Eigen::Matrix<double, 6, 1>;

enum : int {
  kStateDe = 0,
  kStateDpg = 1,
  kStateDpm = 2,
  kStateDw = 3,
  kStateDwMeas = 4,
  kStateRocofMeas = 5,
};

/// Exogenous input u = (dP_L, dP_tie): demand and tie-line power deviations.
using ExogenousInput = Eigen::Matrix<double, 2, 1>;

/// Attack vector p = (p1, p2, p3, p4): frequency-measurement bias,
/// generation-control bias, tie-line-measurement bias, switched load (>= 0).
using AttackVector = Eigen::Matrix<double, 4, 1>;

/// Realization of dx/dt = A x + B u + W p.
struct StateMatrices {
  Eigen::Matrix<double, 6, 6> A;
  Eigen::Matrix<double, 6, 2> B;
  Eigen::Matrix<double, 6, 4> W;
};

StateMatrices build_state_matrices(const SystemParams& params);

/// dx/dt for the current state and held inputs.
PlantState derivative(const PlantState& x, const ExogenousInput& u,
                      const AttackVector& p, const StateMatrices& m);

/// One classical RK4 step of length dt with u and p held constant.
/// Throws std::runtime_error if the state leaves the finite range.
PlantState step(const PlantState& x, const ExogenousInput& u, const AttackVector& p,
                const StateMatrices& m, double dt);

/// Piecewise-constant schedules: value(t) is held over each integration step.
using InputSchedule = std::function<ExogenousInput(double t)>;
using AttackSchedule = std::function<AttackVector(double t)>;

/// Sampled simulation output. Sample i is at time i * dt.
struct Trace {
  double dt = 0.0;
  std::vector<PlantState> states;
  std::vector<ExogenousInput> inputs;
  std::vector<AttackVector> attacks;

  std::size_t size() const { return states.size(); }
  double time_at(std::size_t i) const { return static_cast<double>(i) * dt; }
};

/// Default internal integration step. tau_G/16 keeps the per-step defect of
/// the governor state below 1e-8 against the exact linear solution.
inline constexpr double kDefaultInternalDt = 0.005;

/// Integrates from rest over [0, horizon], sampling every dt_sample.
/// dt_internal must divide dt_sample.
Trace simulate(const SystemParams& params, const InputSchedule& input,
               const AttackSchedule& attack, double horizon, double dt_sample,
               double dt_internal = kDefaultInternalDt);

/// All six eigenvalues of A. Conjugate pairs appear together.
std::vector<std::complex<double>> eigenmodes(const SystemParams& params);

/// The least-damped oscillatory eigenvalue pair's |imaginary part| in rad/s.
/// Throws std::runtime_error when A has no complex pair.
double dominant_mode_frequency(const SystemParams& params);

}  // namespace lfc
