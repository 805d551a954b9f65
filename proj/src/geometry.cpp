// SPDX-License-Identifier: Apache-2.0
#include "helio/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "helio/error.hpp"

namespace helio {

Direction Direction::checked(double theta_deg, double phi_deg) {
  if (!(theta_deg >= -90.0 && theta_deg <= 90.0))
    throw DomainError("elevation out of [-90, 90]: " + std::to_string(theta_deg));
  if (!(phi_deg >= 0.0 && phi_deg < 360.0))
    throw DomainError("azimuth out of [0, 360): " + std::to_string(phi_deg));
  return {theta_deg, phi_deg};
}

SphereGeometry SphereGeometry::for_frequency(double freq_hz) {
  if (!(freq_hz > 0.0)) throw DomainError("frequency must be positive");
  return {freq_hz <= 3000.0 ? 0.2 : 0.09};
}

Scenario parse_scenario(const std::string& name) {
  if (name == "interp") return Scenario::interp;
  if (name == "extrap") return Scenario::extrap;
  throw ConfigError("unknown scenario '" + name + "' (expected interp or extrap)");
}

const char* scenario_name(Scenario s) {
  return s == Scenario::interp ? "interp" : "extrap";
}

namespace {

// Reduce to [0, 360) and report whether the angle is a multiple of 90.
bool quarter_turn(double deg, int& quadrant) {
  double m = std::fmod(deg, 360.0);
  if (m < 0) m += 360.0;
  const double q = m / 90.0;
  if (q == std::floor(q)) {
    quadrant = static_cast<int>(q) % 4;
    return true;
  }
  return false;
}

}  // namespace

double sin_deg(double deg) {
  int q = 0;
  if (quarter_turn(deg, q)) {
    static constexpr double table[4] = {0.0, 1.0, 0.0, -1.0};
    return table[q];
  }
  return std::sin(deg * std::numbers::pi / 180.0);
}

double cos_deg(double deg) {
  int q = 0;
  if (quarter_turn(deg, q)) {
    static constexpr double table[4] = {1.0, 0.0, -1.0, 0.0};
    return table[q];
  }
  return std::cos(deg * std::numbers::pi / 180.0);
}

Point3 sph_to_cart(const Direction& dir, double r) {
  if (!(r > 0.0)) throw DomainError("radius must be positive");
  const double ct = cos_deg(dir.theta_deg);
  return {r * ct * cos_deg(dir.phi_deg), r * ct * sin_deg(dir.phi_deg),
          r * sin_deg(dir.theta_deg)};
}

Direction cart_to_sph(const Point3& p) {
  const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  if (!(r > 0.0)) throw DomainError("cannot take the direction of the origin");
  const double theta = std::asin(std::clamp(p.z / r, -1.0, 1.0)) * 180.0 / std::numbers::pi;
  double phi = std::atan2(p.y, p.x) * 180.0 / std::numbers::pi;
  if (phi < 0) phi += 360.0;
  if (phi >= 360.0) phi -= 360.0;
  return {theta, phi};
}

GridSplit build_interp_grid() {
  GridSplit g;
  for (int i = 0; i < 21; ++i) {
    const double theta = -60.0 + 6.0 * i;
    for (int j = 0; j < 60; ++j) {
      const Direction d{theta, 4.0 + 6.0 * j};
      if (i % 2 == 0 && j % 2 == 0)
        g.known.push_back(d);
      else
        g.unknown.push_back(d);
    }
  }
  return g;
}

GridSplit build_extrap_grid() {
  GridSplit g;
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 45; ++j) g.known.push_back({-56.0 + 8.0 * i, 4.0 + 8.0 * j});
  for (double theta : {-80.0, -72.0, -64.0, 64.0, 72.0, 80.0})
    for (int j = 0; j < 45; ++j) g.unknown.push_back({theta, 4.0 + 8.0 * j});
  return g;
}

GridSplit build_grid(Scenario s) {
  return s == Scenario::interp ? build_interp_grid() : build_extrap_grid();
}

std::string grid_to_csv(const GridSplit& grid) {
  std::ostringstream os;
  os.precision(17);
  os << "theta_deg,phi_deg,set\n";
  for (const auto& d : grid.known) os << d.theta_deg << ',' << d.phi_deg << ",known\n";
  for (const auto& d : grid.unknown) os << d.theta_deg << ',' << d.phi_deg << ",unknown\n";
  return os.str();
}

}  // namespace helio
