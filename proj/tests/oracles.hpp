#ifndef CTAP_TESTS_ORACLES_HPP
#define CTAP_TESTS_ORACLES_HPP

// Test-side reference implementations. They are written directly from the
// physics, in SI and long double, and share no code with the library.

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

inline constexpr long double hbar = 1.054571817e-34L;
inline constexpr long double mu_B = 9.2740100783e-24L;

// Multi-frequency dressed potential, upper branch, at position x (m). The
// window is the comb line nearest to resonance; the other lines contribute
// Stark shifts hbar^2 Omega^2 / (4 (mu_B g B - hbar w_j)).
inline long double dressed_potential(long double x, const std::vector<long double>& omegas, long double rabi,
                                     long double gradient, long double g_F_abs) {
  const long double zeeman = mu_B * g_F_abs * gradient * x;
  std::size_t n = 0;
  for (std::size_t j = 1; j < omegas.size(); ++j) {
    if (std::fabs(zeeman - hbar * omegas[j]) < std::fabs(zeeman - hbar * omegas[n])) n = j;
  }
  long double stark = 0.0L;
  for (std::size_t j = 0; j < omegas.size(); ++j) {
    if (j == n) continue;
    stark += hbar * hbar * rabi * rabi / (4.0L * (zeeman - hbar * omegas[j]));
  }
  const long double d = zeeman - hbar * omegas[n] + 2.0L * stark;
  const long double e_plus = 0.5L * std::sqrt(hbar * hbar * rabi * rabi + d * d);
  // One-based window index.
  const long double sign = ((n + 1) % 2 == 0) ? 1.0L : -1.0L;
  long double tail = 0.0L;
  for (std::size_t k = 1; k <= n; ++k) tail += ((k % 2 == 0) ? 1.0L : -1.0L) * hbar * omegas[k - 1];
  return sign * (e_plus - hbar * omegas[n] / 2.0L) - tail;
}

// Free Gaussian packet exp(-x^2 / (2 s^2)) normalised, evolved under
// i dpsi/dt = -c d^2/dx^2 psi.
inline std::complex<double> free_gaussian(double x, double t, double sigma, double c) {
  const std::complex<double> a(sigma * sigma, 2.0 * c * t);
  const std::complex<double> norm = std::pow(M_PI, -0.25) * std::sqrt(sigma) / std::sqrt(a);
  return norm * std::exp(-x * x / (2.0 * a));
}

// Eigenvalues of a real symmetric 3x3 matrix by the trigonometric method.
inline std::vector<double> symmetric3_eigenvalues(const double a[3][3]) {
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) + (a[2][2] - q) * (a[2][2] - q) +
                    2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p == 0.0) return {q, q, q};
  double b[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
  const double det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                     b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                     b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::fmax(-1.0, std::fmin(1.0, det / 2.0));
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  return {e3, 3.0 * q - e1 - e3, e1};
}

// Effective 1D coupling of N atoms under transverse confinement a_perp.
inline double g1d(double n_atoms, double a_s, double a_perp, double mass) {
  const double h = 1.054571817e-34;
  return 4.0 * n_atoms * h * h * a_s / (mass * a_perp) / (a_perp - 1.4603 * a_s);
}

}  // namespace oracle

#endif  // CTAP_TESTS_ORACLES_HPP
