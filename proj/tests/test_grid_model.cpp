#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lfc/grid_model.hpp"
#include "lfc/trace_io.hpp"
#include "oracles.hpp"

using namespace lfc;

namespace {

Eigen::VectorXd forcing(const StateMatrices& m, const ExogenousInput& u, const AttackVector& p) {
  return m.B * u + m.W * p;
}

}  // namespace

TEST_CASE("presets reproduce the published system data") {
  const SystemParams mg1 = mg_preset("MG1");
  CHECK(mg1.agc_gain == 3.0);
  CHECK(mg1.droop_gain == 40.0);
  CHECK(mg1.governor_tc == 0.08);
  CHECK(mg1.turbine_tc == 0.45);
  CHECK(mg1.inertia == 6.0);
  CHECK(mg1.damping == 0.03);
  CHECK(mg1.freq_sensor_tc == 0.1);
  CHECK(mg1.rocof_sensor_tc == 0.1);
  CHECK(mg1.measurement_gain == 1.0);
  CHECK(mg1.base_frequency == 60.0);

  const SystemParams mg2 = mg_preset("MG2");
  CHECK(mg2.agc_gain == 10.0);
  CHECK(mg2.droop_gain == 50.0);
  CHECK(mg2.governor_tc == 0.08);
  CHECK(mg2.inertia == 6.0);

  const SystemParams mg3 = mg_preset("MG3");
  CHECK(mg3.agc_gain == 12.0);
  CHECK(mg3.droop_gain == 50.0);
  CHECK(mg3.governor_tc == 0.1);
  CHECK(mg3.inertia == 8.0);

  CHECK_THROWS_AS((void)mg_preset("MG9"), std::invalid_argument);
}

TEST_CASE("state matrices match the hand-entered realization exactly") {
  const SystemParams p = mg_preset("MG1");
  const StateMatrices m = build_state_matrices(p);

  // every entry of A
  Eigen::Matrix<double, 6, 6> a_expected;
  a_expected << 0, 0, 0, -3.0, 0, 0,                        // AGC row: -(k B) on dw
      1.0 / 0.08, -1.0 / 0.08, 0, -40.0 / 0.08, 0, 0,       // governor
      0, 1.0 / 0.45, -1.0 / 0.45, 0, 0, 0,                  // turbine
      0, 0, 1.0 / 6.0, -0.03 / 6.0, 0, 0,                   // swing
      0, 0, 0, 1.0 / 0.1, -1.0 / 0.1, 0,                    // frequency sensor
      0, 0, 1.0 / (6.0 * 0.1), -0.03 / (6.0 * 0.1), 0, -1.0 / 0.1;          // rocof sensor
  CHECK((m.A - a_expected).cwiseAbs().maxCoeff() == 0.0);

  Eigen::Matrix<double, 6, 2> b_expected;
  b_expected << 0, 0, 0, -3.0, 0, 0, -1.0 / 6.0, 0, 0, 0, -1.0 / (6.0 * 0.1), 0;
  CHECK((m.B - b_expected).cwiseAbs().maxCoeff() == 0.0);

  Eigen::Matrix<double, 6, 4> w_expected;
  w_expected << -3.0, 3.0, -3.0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1.0 / 6.0, 0, 0, 0, 0, 0,
      0, 0, -1.0 / (6.0 * 0.1);
  CHECK((m.W - w_expected).cwiseAbs().maxCoeff() == 0.0);

  // spot values called out in the interface contract
  CHECK(m.A(0, 3) == -3.0);
  CHECK(m.A(3, 2) == 1.0 / 6.0);
  CHECK(m.W(0, 0) == -p.agc_gain);  // W[1,1] = -k when B = 1

  SystemParams bad = p;
  bad.governor_tc = 0.0;
  CHECK_THROWS_AS((void)build_state_matrices(bad), std::invalid_argument);
  bad.governor_tc = -0.1;
  CHECK_THROWS_AS((void)build_state_matrices(bad), std::invalid_argument);
}

TEST_CASE("derivative is the plain matrix-vector product") {
  const StateMatrices m = build_state_matrices(mg_preset("MG1"));

  SUBCASE("zero everything") {
    const PlantState d = derivative(PlantState::Zero(), ExogenousInput::Zero(),
                                    AttackVector::Zero(), m);
    CHECK(d.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("load step hits the swing equation") {
    const PlantState d = derivative(PlantState::Zero(), ExogenousInput(0.1, 0.0),
                                    AttackVector::Zero(), m);
    CHECK(d(kStateDw) == doctest::Approx(-0.1 / 6.0).epsilon(1e-15));
  }
  SUBCASE("switched load acts like demand") {
    AttackVector p = AttackVector::Zero();
    p(3) = 0.18;
    const PlantState d = derivative(PlantState::Zero(), ExogenousInput::Zero(), p, m);
    CHECK(d(kStateDw) == doctest::Approx(-0.03).epsilon(1e-15));
  }
}

TEST_CASE("rk4 step against the closed-form linear solution") {
  const StateMatrices m = build_state_matrices(mg_preset("MG1"));
  const ExogenousInput u(0.1, 0.0);
  const AttackVector p = AttackVector::Zero();
  const Eigen::VectorXd c = forcing(m, u, p);

  SUBCASE("equilibrium is a fixed point") {
    // x* solves A x* = -(B u); one step must stay put to machine precision
    const PlantState x_star = m.A.partialPivLu().solve(-c);
    const PlantState next = step(x_star, u, p, m, 0.01);
    CHECK((next - x_star).cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("one 10 ms step from rest") {
    const PlantState got = step(PlantState::Zero(), u, p, m, 0.01);
    const Eigen::VectorXd want =
        oracle::linear_ode_exact(m.A, Eigen::VectorXd::Zero(6), c, 0.01);
    // the governor state carries the largest defect: 1.44e-8 at dt = 10 ms
    const double err = (got - want).cwiseAbs().maxCoeff();
    CHECK(err < 2e-8);
    CHECK(err > 1e-9);  // guards against accidentally comparing RK4 to itself
  }

  SUBCASE("halving dt cuts the same-horizon error about 16x") {
    const Eigen::VectorXd want =
        oracle::linear_ode_exact(m.A, Eigen::VectorXd::Zero(6), c, 0.01);
    const PlantState coarse = step(PlantState::Zero(), u, p, m, 0.01);
    PlantState fine = step(PlantState::Zero(), u, p, m, 0.005);
    fine = step(fine, u, p, m, 0.005);
    const double ratio = (coarse - want).cwiseAbs().maxCoeff() /
                         (fine - want).cwiseAbs().maxCoeff();
    CHECK(ratio > 12.0);
    CHECK(ratio < 22.0);
  }

  SUBCASE("dt must be positive") {
    CHECK_THROWS_AS((void)step(PlantState::Zero(), u, p, m, 0.0), std::invalid_argument);
  }

  SUBCASE("non-finite states abort with a diagnostic") {
    PlantState x = PlantState::Zero();
    x(0) = std::numeric_limits<double>::max();
    x(1) = -std::numeric_limits<double>::max();
    StateMatrices blow = m;
    blow.A(0, 1) = 1e300;
    CHECK_THROWS_AS((void)step(x, u, p, blow, 1.0), std::runtime_error);
  }
}

TEST_CASE("simulate: step-load response follows the exact solution") {
  const SystemParams params = mg_preset("MG1");
  const StateMatrices m = build_state_matrices(params);
  const ExogenousInput u(0.1, 0.0);
  const Eigen::VectorXd c = forcing(m, u, AttackVector::Zero());

  const Trace trace = simulate(
      params, [&](double) { return u; }, [](double) { return AttackVector::Zero(); }, 90.0,
      0.01);
  REQUIRE(trace.size() == 9001);

  SUBCASE("sampled states track the matrix-exponential oracle") {
    // spot-check a spread of sample times, including the sharp initial transient
    for (std::size_t i : {1u, 2u, 5u, 10u, 100u, 1000u, 9000u}) {
      const Eigen::VectorXd want =
          oracle::linear_ode_exact(m.A, Eigen::VectorXd::Zero(6), c, trace.time_at(i));
      CHECK((trace.states[i] - want).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  SUBCASE("settles to the analytic equilibrium, frequency first") {
    const PlantState x_star = m.A.partialPivLu().solve(-c);
    CHECK(x_star(kStateDe) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(x_star(kStateDpg) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(x_star(kStateDpm) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::abs(x_star(kStateDw)) < 1e-12);
    // residual check of the equilibrium family
    CHECK((m.A * x_star + c).cwiseAbs().maxCoeff() < 1e-12);

    // frequency deviation is inside 1e-3 from 30 s on
    const auto i30 = static_cast<std::size_t>(30.0 / trace.dt);
    CHECK(std::abs(trace.states[i30](kStateDw)) < 1e-3);
    // the AGC integral state needs ~61 s to close within 1e-3 of dP_L
    // (slowest MG1 mode is -0.0758 1/s); it is NOT there at 30 s
    CHECK(std::abs(trace.states[i30](kStateDe) - 0.1) > 5e-3);
    CHECK(std::abs(trace.states.back()(kStateDe) - 0.1) < 1e-3);
    CHECK(std::abs(trace.states.back()(kStateDw)) < 1e-3);
  }
}

TEST_CASE("simulate: constant frequency-bias attack settles at dw = -p1") {
  const SystemParams params = mg_preset("MG1");
  AttackVector p = AttackVector::Zero();
  p(0) = 0.01;
  const Trace trace = simulate(
      params, [](double) { return ExogenousInput::Zero(); }, [&](double) { return p; }, 90.0,
      0.05);
  CHECK(trace.states.back()(kStateDw) == doctest::Approx(-0.01).epsilon(1e-3));
  CHECK(trace.states.back()(kStateDwMeas) == doctest::Approx(-0.01).epsilon(1e-3));
}

TEST_CASE("simulate: zero inputs from rest stay identically zero") {
  const Trace trace = simulate(
      mg_preset("MG2"), [](double) { return ExogenousInput::Zero(); },
      [](double) { return AttackVector::Zero(); }, 5.0, 0.05);
  for (const auto& x : trace.states) CHECK(x.cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace.time_at(i) > trace.time_at(i - 1));
  }
}

TEST_CASE("simulate: superposition of input responses") {
  const SystemParams params = mg_preset("MG2");
  auto zero_attack = [](double) { return AttackVector::Zero(); };
  auto u1 = [](double t) { return ExogenousInput(t < 5.0 ? 0.05 : -0.02, 0.0); };
  auto u2 = [](double t) { return ExogenousInput(0.03 * std::sin(2.0 * t), 0.0); };
  auto u12 = [&](double t) { return ExogenousInput(u1(t)(0) + u2(t)(0), 0.0); };

  const Trace a = simulate(params, u1, zero_attack, 10.0, 0.05);
  const Trace b = simulate(params, u2, zero_attack, 10.0, 0.05);
  const Trace ab = simulate(params, u12, zero_attack, 10.0, 0.05);
  for (std::size_t i = 0; i < ab.size(); ++i) {
    CHECK((ab.states[i] - a.states[i] - b.states[i]).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("simulate rejects bad step configuration") {
  const SystemParams params = mg_preset("MG1");
  auto uz = [](double) { return ExogenousInput::Zero(); };
  auto pz = [](double) { return AttackVector::Zero(); };
  CHECK_THROWS_AS((void)simulate(params, uz, pz, 0.0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS((void)simulate(params, uz, pz, 10.0, 0.003), std::invalid_argument);
}

TEST_CASE("eigenmodes: oscillatory pairs and stability, cross-checked") {
  SUBCASE("MG2 pair near 4 rad/s, MG3 near 3.4 rad/s") {
    CHECK(dominant_mode_frequency(mg_preset("MG2")) == doctest::Approx(4.0).epsilon(0.10));
    CHECK(dominant_mode_frequency(mg_preset("MG3")) == doctest::Approx(3.4).epsilon(0.10));
  }

  for (const char* name : {"MG1", "MG2", "MG3"}) {
    CAPTURE(name);
    const SystemParams params = mg_preset(name);
    const auto eigs = eigenmodes(params);
    REQUIRE(eigs.size() == 6);

    // open-loop stable
    for (const auto& z : eigs) CHECK(z.real() < 0.0);

    // complex eigenvalues appear as conjugate pairs
    for (const auto& z : eigs) {
      if (std::abs(z.imag()) > 1e-9) {
        bool has_conjugate = false;
        for (const auto& w : eigs) {
          if (std::abs(w.real() - z.real()) < 1e-9 && std::abs(w.imag() + z.imag()) < 1e-9) {
            has_conjugate = true;
          }
        }
        CHECK(has_conjugate);
      }
    }

    // cross-check against Durand-Kerner roots of the characteristic polynomial
    const StateMatrices m = build_state_matrices(params);
    const auto coeffs = oracle::characteristic_polynomial(m.A);
    auto roots = oracle::polynomial_roots(coeffs);
    REQUIRE(roots.size() == 6);
    for (const auto& z : eigs) {
      double best = 1e300;
      for (const auto& r : roots) best = std::min(best, std::abs(r - z));
      CHECK(best < 1e-6 * std::max(1.0, std::abs(z)));
    }
  }
}

TEST_CASE("trace csv export uses the fixed header and round-trips doubles") {
  const Trace trace = simulate(
      mg_preset("MG1"), [](double) { return ExogenousInput(0.017, 0.0); },
      [](double) { return AttackVector::Zero(); }, 0.2, 0.05);
  std::ostringstream os;
  write_trace_csv(os, trace, TripEvent{TripKind::ROCOF, 0.15});
  const std::string text = os.str();
  CHECK(text.rfind("t,de,dpg,dpm,dw,dw_meas,rocof_meas,dpl,dptie,p1,p2,p3,p4\n", 0) == 0);
  CHECK(text.find("# trip,ROCOF,0.15") != std::string::npos);

  // shortest round-trip double formatting is exact
  const double v = trace.states[3](kStateDpg);
  CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-0.0) == "0");
}
