#pragma once
// Independent reference computations for tests. Everything here works in
// polar coordinates (r, θ) on polydisks and uses Boost's scalar adaptive
// Gauss-Kronrod rule, so it shares no code with the library's quadrature.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace rt::testing {

using Cx = std::complex<double>;

template <class F>
auto gk(F&& f, double a, double b, double tol = 1e-12) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol);
}

/// Symbol as a function of radii and angles.
using PolarFn = std::function<Cx(const std::vector<double>& r, const std::vector<double>& theta)>;

/// ⟨φ z^k, z^{k'}⟩ / ‖z^{k'}‖² on the polydisk with the given radii (n = 1 or 2),
/// by Gauss-Kronrod in r and an N-point periodic rule in θ.
inline Cx projection_weight(const PolarFn& phi, const std::vector<double>& radii, const std::vector<long>& k,
                            const std::vector<long>& kp, int theta_points = 48) {
  const std::size_t n = radii.size();
  const double two_pi = 2 * std::numbers::pi;
  auto angular = [&](const std::vector<double>& r) {
    // (1/(2π)^n) ∫ φ(r,θ) e^{i(k-k')·θ} dθ
    Cx acc = 0;
    std::vector<double> th(n);
    const int total = n == 1 ? theta_points : theta_points * theta_points;
    for (int s = 0; s < total; ++s) {
      th[0] = two_pi * (s % theta_points) / theta_points;
      if (n == 2) th[1] = two_pi * (s / theta_points) / theta_points;
      double phase = 0;
      for (std::size_t j = 0; j < n; ++j) phase += static_cast<double>(k[j] - kp[j]) * th[j];
      acc += phi(r, th) * std::polar(1.0, phase);
    }
    return acc / static_cast<double>(total);
  };
  // ⟨φ z^k, z^{k'}⟩ = (2π)^n ∫ angular(r) ∏ r_j^{k_j + k'_j + 1} dr; complex valued, so the
  // stopping rule sees |value| and an identically zero imaginary part costs nothing.
  Cx radial;
  if (n == 1) {
    radial = gk([&](double r) { return angular({r}) * std::pow(r, static_cast<double>(k[0] + kp[0] + 1)); }, 0.0,
                radii[0]);
  } else {
    radial = gk([&](double r1) {
      return gk([&](double r2) {
        return angular({r1, r2}) * std::pow(r1, static_cast<double>(k[0] + kp[0] + 1)) *
               std::pow(r2, static_cast<double>(k[1] + kp[1] + 1));
      }, 0.0, radii[1]);
    }, 0.0, radii[0]);
  }
  const Cx inner = std::pow(two_pi, static_cast<double>(n)) * radial;
  double norm = 1;
  for (std::size_t j = 0; j < n; ++j)
    norm *= two_pi * std::pow(radii[j], 2.0 * static_cast<double>(kp[j]) + 2) / (2.0 * static_cast<double>(kp[j]) + 2);
  return inner / norm;
}

/// ∫ over {Σ (t_j / ρ)^{q_j} < 1} of ∏ t_j^{a_j}: the Dirichlet integral
/// ρ^{Σ(a_j+1)} ∏ Γ((a_j+1)/q_j)/q_j / Γ(1 + Σ (a_j+1)/q_j).
inline double dirichlet_integral(const std::vector<double>& a, const std::vector<double>& q, double rho) {
  double log_v = 0, s = 0, power = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double b = (a[j] + 1) / q[j];
    log_v += std::lgamma(b) - std::log(q[j]);
    s += b;
    power += a[j] + 1;
  }
  return std::exp(log_v - std::lgamma(1 + s)) * std::pow(rho, power);
}

}  // namespace rt::testing
