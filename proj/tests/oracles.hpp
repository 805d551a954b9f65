// SPDX-License-Identifier: Apache-2.0
// Independent reference computations for tests. Nothing here calls into the
// code paths it is used to check.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "helio/geometry.hpp"
#include "helio/mlp.hpp"

namespace oracle {

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

inline double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

/// P_u^m(x) = (1 - x^2)^(m/2) d^m/dx^m P_u(x) from the explicit Legendre
/// polynomial coefficients. Adequate for u <= 12.
inline double legendre_explicit(int u, int m, double x) {
  double sum = 0.0;
  for (int k = 0; 2 * k <= u; ++k) {
    const int power = u - 2 * k;
    if (power < m) continue;
    const double c = ((k % 2) ? -1.0 : 1.0) * binomial(u, k) * binomial(2 * u - 2 * k, u) /
                     std::pow(2.0, u);
    sum += c * factorial(power) / factorial(power - m) * std::pow(x, power - m);
  }
  return std::pow(1.0 - x * x, 0.5 * m) * sum;
}

/// Y_u^v with elevation argument and no Condon-Shortley phase.
inline std::complex<double> sh_explicit(int u, int v, double theta_deg, double phi_deg) {
  const int m = v < 0 ? -v : v;
  const double th = theta_deg * std::numbers::pi / 180.0;
  const double ph = phi_deg * std::numbers::pi / 180.0;
  const double norm =
      std::sqrt((2.0 * u + 1.0) * factorial(u - m) / (4.0 * std::numbers::pi * factorial(u + m)));
  return norm * legendre_explicit(u, m, std::sin(th)) * std::polar(1.0, v * ph);
}

/// Straight-line scalar forward pass: tanh hidden layers, identity output.
inline double forward_scalar(const helio::MlpParams& params, const helio::Point3& p) {
  std::vector<double> a{p.x, p.y, p.z};
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& W = params.layers[l].weights;
    const auto& b = params.layers[l].biases;
    std::vector<double> z(static_cast<std::size_t>(W.rows()));
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      double s = b(i);
      for (Eigen::Index j = 0; j < W.cols(); ++j) s += double(W(i, j)) * a[static_cast<std::size_t>(j)];
      z[static_cast<std::size_t>(i)] = (l + 1 < params.layers.size()) ? std::tanh(s) : s;
    }
    a = std::move(z);
  }
  return a[0];
}

/// Central second differences along x, y, z in extended precision, so only
/// the O(h^2) truncation error remains.
inline double laplacian_fd_extended(const helio::MlpParams& params, const helio::Point3& p, double h) {
  using LD = long double;
  auto f = [&](LD x, LD y, LD z) {
    std::vector<LD> a{x, y, z};
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      const auto& W = params.layers[l].weights;
      const auto& b = params.layers[l].biases;
      std::vector<LD> out(static_cast<std::size_t>(W.rows()));
      for (Eigen::Index i = 0; i < W.rows(); ++i) {
        LD s = b(i);
        for (Eigen::Index j = 0; j < W.cols(); ++j) s += LD(W(i, j)) * a[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = (l + 1 < params.layers.size()) ? std::tanh(s) : s;
      }
      a = std::move(out);
    }
    return a[0];
  };
  const LD x = p.x, y = p.y, z = p.z, hh = h;
  const LD f0 = f(x, y, z);
  const LD sum = (f(x + hh, y, z) - 2 * f0 + f(x - hh, y, z)) + (f(x, y + hh, z) - 2 * f0 + f(x, y - hh, z)) +
                 (f(x, y, z + hh) - 2 * f0 + f(x, y, z - hh));
  return static_cast<double>(sum / (hh * hh));
}

/// Sum of central second differences along x, y, z.
template <typename F>
double laplacian_fd(F&& f, const helio::Point3& p, double h) {
  const double f0 = f(p);
  double sum = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    helio::Point3 a = p, b = p;
    double* pa = axis == 0 ? &a.x : axis == 1 ? &a.y : &a.z;
    double* pb = axis == 0 ? &b.x : axis == 1 ? &b.y : &b.z;
    *pa += h;
    *pb -= h;
    sum += (f(a) - 2.0 * f0 + f(b)) / (h * h);
  }
  return sum;
}

}  // namespace oracle
