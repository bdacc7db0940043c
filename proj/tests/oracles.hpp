#pragma once

// Independent numerical oracles used by the test suites. Everything here is
// computed without touching the library's own integration or eigenvalue
// paths so the checks stay two-sided.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

namespace oracle {

/// Exact solution of dx/dt = A x + c (constant forcing) after time t:
/// x(t) = e^{At} x0 + A^{-1} (e^{At} - I) c, via the matrix exponential.
inline Eigen::VectorXd linear_ode_exact(const Eigen::MatrixXd& A, const Eigen::VectorXd& x0,
                                        const Eigen::VectorXd& c, double t) {
  const Eigen::MatrixXd E = (A * t).exp();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  return E * x0 + A.partialPivLu().solve((E - I) * c);
}

/// Characteristic polynomial coefficients by the Faddeev-LeVerrier
/// recurrence: p(s) = s^n + c[1] s^{n-1} + ... + c[n].
inline std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& A) {
  const auto n = A.rows();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = 1.0;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    M = A * M + c[static_cast<std::size_t>(k) - 1] * Eigen::MatrixXd::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(A * M).trace() / static_cast<double>(k);
  }
  return c;
}

/// Durand-Kerner simultaneous root iteration for a monic polynomial with the
/// given coefficients (c[0] = 1). Independent of any eigenvalue solver.
inline std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs,
                                                          int iterations = 400) {
  const std::size_t n = coeffs.size() - 1;
  std::vector<std::complex<double>> roots(n);
  // distinct, non-real starting points
  const std::complex<double> seed(0.4, 0.9);
  std::complex<double> p(1.0, 0.0);
  for (auto& r : roots) {
    p *= seed;
    r = p;
  }
  auto eval = [&coeffs](std::complex<double> z) {
    std::complex<double> v(0.0, 0.0);
    for (double c : coeffs) v = v * z + c;
    return v;
  };
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      std::complex<double> denom(1.0, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      roots[i] -= eval(roots[i]) / denom;
    }
  }
  return roots;
}

/// Central finite difference of a scalar function of one coordinate.
inline double central_difference(const std::function<double(double)>& f, double x0,
                                 double h = 1e-5) {
  return (f(x0 + h) - f(x0 - h)) / (2.0 * h);
}

inline double relative_error(double got, double want) {
  const double denom = std::max({std::abs(got), std::abs(want), 1e-12});
  return std::abs(got - want) / denom;
}

}  // namespace oracle
