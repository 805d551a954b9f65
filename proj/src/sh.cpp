// SPDX-License-Identifier: Apache-2.0
#include "helio/sh.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

#include "helio/error.hpp"

namespace helio {

ShModel ShModel::zeros(int order) {
  if (order < 0) throw DomainError("SH order must be nonnegative");
  return {order, Eigen::VectorXcd::Zero(sh_count(order))};
}

double assoc_legendre(int u, int m, double x) {
  if (m < 0 || m > u) throw DomainError("assoc_legendre requires 0 <= m <= u");
  if (!(std::abs(x) <= 1.0)) throw DomainError("assoc_legendre requires |x| <= 1");
  const double s = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = 1.0;
  for (int k = 1; k <= m; ++k) pmm *= (2.0 * k - 1.0) * s;
  if (u == m) return pmm;
  double pm1 = x * (2.0 * m + 1.0) * pmm;
  for (int l = m + 2; l <= u; ++l) {
    const double pl = ((2.0 * l - 1.0) * x * pm1 - (l + m - 1.0) * pmm) / (l - m);
    pmm = pm1;
    pm1 = pl;
  }
  return pm1;
}

namespace {

// Fully normalized sqrt((2u+1)(u-m)!/(4pi(u+m)!)) P_u^m(x) for all
// 0 <= m <= u <= order, stored at sh_index(u, m).
void normalized_legendre(int order, double x, std::vector<double>& out) {
  out.assign(sh_count(order), 0.0);
  const double s = std::sqrt((1.0 - x) * (1.0 + x));
  double diag = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int m = 0; m <= order; ++m) {
    if (m > 0) diag *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    out[sh_index(m, m)] = diag;
    if (m == order) break;
    double prev2 = diag;
    double prev1 = std::sqrt(2.0 * m + 3.0) * x * diag;
    out[sh_index(m + 1, m)] = prev1;
    for (int l = m + 2; l <= order; ++l) {
      const double l2 = static_cast<double>(l) * l;
      const double m2 = static_cast<double>(m) * m;
      const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      const double lm1 = l - 1.0;
      const double b = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
      const double cur = a * (x * prev1 - b * prev2);
      out[sh_index(l, m)] = cur;
      prev2 = prev1;
      prev1 = cur;
    }
  }
}

void fill_row(const Direction& dir, int order, std::vector<double>& legendre,
              Eigen::MatrixXcd& y, Eigen::Index q) {
  auto row = y.row(q);
  normalized_legendre(order, sin_deg(dir.theta_deg), legendre);
  for (int m = 0; m <= order; ++m) {
    const double ang = m * dir.phi_deg;
    const cdouble e(cos_deg(ang), sin_deg(ang));
    for (int u = m; u <= order; ++u) {
      const double n = legendre[sh_index(u, m)];
      row(sh_index(u, m)) = n * e;
      if (m > 0) row(sh_index(u, -m)) = n * std::conj(e);
    }
  }
}

}  // namespace

cdouble sh_eval(int u, int v, const Direction& dir) {
  if (u < 0 || std::abs(v) > u) throw DomainError("sh_eval requires |v| <= u");
  std::vector<double> legendre;
  normalized_legendre(u, sin_deg(dir.theta_deg), legendre);
  const double n = legendre[sh_index(u, std::abs(v))];
  const double ang = v * dir.phi_deg;
  return n * cdouble(cos_deg(ang), sin_deg(ang));
}

Eigen::MatrixXcd sh_matrix(std::span<const Direction> dirs, int order) {
  if (order < 0) throw DomainError("SH order must be nonnegative");
  if (dirs.empty()) throw PreconditionError("sh_matrix needs at least one direction");
  Eigen::MatrixXcd y(static_cast<Eigen::Index>(dirs.size()), sh_count(order));
  std::vector<double> legendre;
  for (std::size_t q = 0; q < dirs.size(); ++q)
    fill_row(dirs[q], order, legendre, y, static_cast<Eigen::Index>(q));
  return y;
}

int sh_order_for_freq(double freq_hz) {
  if (!(freq_hz > 0.0)) throw DomainError("frequency must be positive");
  if (freq_hz < 3000.0) return static_cast<int>(std::ceil(freq_hz / 250.0));
  if (freq_hz <= 6000.0) return 12;
  return static_cast<int>(std::ceil(freq_hz / 500.0));
}

double extrap_gamma_for_freq(double freq_hz) {
  static constexpr std::array<double, 7> freqs{2067, 4134, 6202, 8269, 10336, 12403, 14470};
  static constexpr std::array<double, 7> gammas{1e-6, 1e-4, 1e-1, 1e-1, 1e-2, 1e-1, 1e-3};
  std::size_t best = 0;
  for (std::size_t i = 1; i < freqs.size(); ++i)
    if (std::abs(freqs[i] - freq_hz) < std::abs(freqs[best] - freq_hz)) best = i;
  return gammas[best];
}

ShModel sh_fit(std::span<const cdouble> pressures, std::span<const Direction> dirs,
               const ShFitConfig& cfg) {
  if (pressures.size() != dirs.size() || dirs.empty())
    throw PreconditionError("sh_fit needs matching, nonempty pressures and directions");
  if (!(cfg.gamma >= 0.0)) throw DomainError("regularization gamma must be nonnegative");
  const int k = sh_count(cfg.order);
  if (cfg.gamma == 0.0 && static_cast<int>(dirs.size()) < k)
    throw NumericError("unregularized SH fit of order " + std::to_string(cfg.order) +
                       " needs at least " + std::to_string(k) + " directions, got " +
                       std::to_string(dirs.size()));

  const Eigen::MatrixXcd y = sh_matrix(dirs, cfg.order);
  const Eigen::Map<const Eigen::VectorXcd> p(pressures.data(),
                                             static_cast<Eigen::Index>(pressures.size()));
  Eigen::MatrixXcd normal = y.adjoint() * y;
  for (int u = 0; u <= cfg.order; ++u)
    for (int v = -u; v <= u; ++v) normal(sh_index(u, v), sh_index(u, v)) += cfg.gamma * (1.0 + u * (u + 1.0));
  const Eigen::VectorXcd rhs = y.adjoint() * p;

  ShModel model{cfg.order, Eigen::VectorXcd()};
  const Eigen::LLT<Eigen::MatrixXcd> llt(normal);
  if (llt.info() == Eigen::Success && llt.rcond() > 1e3 * std::numeric_limits<double>::epsilon()) {
    model.coeffs = llt.solve(rhs);
    return model;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(normal);
  if (qr.rank() < k) {
    if (cfg.gamma == 0.0)
      throw NumericError("singular SH normal equations: rank " + std::to_string(qr.rank()) +
                         " < " + std::to_string(k));
  }
  model.coeffs = qr.solve(rhs);
  return model;
}

std::vector<cdouble> sh_predict(const ShModel& model, std::span<const Direction> dirs) {
  if (model.coeffs.size() != sh_count(model.order))
    throw PreconditionError("SH model coefficient count does not match its order");
  if (dirs.empty()) return {};
  const Eigen::VectorXcd est = sh_matrix(dirs, model.order) * model.coeffs;
  return {est.data(), est.data() + est.size()};
}

nlohmann::json sh_model_to_json(const ShModel& model) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.coeffs.size(); ++i)
    coeffs.push_back({model.coeffs(i).real(), model.coeffs(i).imag()});
  return {{"order_U", model.order}, {"coeffs", std::move(coeffs)}};
}

ShModel sh_model_from_json(const nlohmann::json& j) {
  try {
    ShModel m = ShModel::zeros(j.at("order_U").get<int>());
    const auto& c = j.at("coeffs");
    if (c.size() != static_cast<std::size_t>(m.coeffs.size()))
      throw ConfigError("SH model has " + std::to_string(c.size()) + " coefficients, expected " +
                        std::to_string(m.coeffs.size()));
    for (std::size_t i = 0; i < c.size(); ++i)
      m.coeffs(static_cast<Eigen::Index>(i)) = {c[i].at(0).get<double>(), c[i].at(1).get<double>()};
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed SH model: ") + e.what());
  }
}

}  // namespace helio
