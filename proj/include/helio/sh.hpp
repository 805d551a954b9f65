// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "helio/geometry.hpp"

namespace helio {

using cdouble = std::complex<double>;

/// Column of Y_u^v in the (u, v) ordering A_{0,0}, A_{1,-1}, A_{1,0}, ...
constexpr int sh_index(int u, int v) { return u * u + u + v; }
constexpr int sh_count(int order) { return (order + 1) * (order + 1); }

/// Complex spherical-harmonic coefficients up to a truncation order.
struct ShModel {
  int order = 0;
  Eigen::VectorXcd coeffs;  ///< length sh_count(order)

  static ShModel zeros(int order);
  cdouble& at(int u, int v) { return coeffs(sh_index(u, v)); }
  cdouble at(int u, int v) const { return coeffs(sh_index(u, v)); }
};

struct ShFitConfig {
  double gamma = 1e-6;
  int order = 0;
};

/// Associated Legendre function P_u^m(x), no Condon-Shortley phase.
double assoc_legendre(int u, int m, double x);

/// Y_u^v(theta, phi) = N_u^|v| P_u^|v|(sin theta) e^{i v phi}, theta = elevation.
cdouble sh_eval(int u, int v, const Direction& dir);

/// Q x (U+1)^2 matrix of Y_u^v evaluated at dirs.
Eigen::MatrixXcd sh_matrix(std::span<const Direction> dirs, int order);

/// Piecewise order rule: ceil(f/250) below 3 kHz, 12 up to 6 kHz, ceil(f/500) above.
int sh_order_for_freq(double freq_hz);

/// Built-in extrapolation regularization for the seven standard frequencies;
/// other frequencies fall back to the nearest tabulated one.
double extrap_gamma_for_freq(double freq_hz);

/// Regularized least squares (Y^H Y + gamma H) A = Y^H P with
/// H = diag(1 + u(u+1)). Throws NumericError on a singular unregularized system.
ShModel sh_fit(std::span<const cdouble> pressures, std::span<const Direction> dirs,
               const ShFitConfig& cfg);

std::vector<cdouble> sh_predict(const ShModel& model, std::span<const Direction> dirs);

/// {order_U, coeffs: [[re, im], ...]}
nlohmann::json sh_model_to_json(const ShModel& model);
ShModel sh_model_from_json(const nlohmann::json& j);

}  // namespace helio
