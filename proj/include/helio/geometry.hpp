// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace helio {

/// Measurement direction. Elevation theta is 0 on the horizontal plane and
/// +90 at the zenith; azimuth phi is counter-clockwise from +x (facing
/// direction), so 0 < phi < 180 is the left hemisphere (y > 0).
struct Direction {
  double theta_deg = 0.0;
  double phi_deg = 0.0;

  /// Throws DomainError when theta is outside [-90, 90] or phi outside [0, 360).
  static Direction checked(double theta_deg, double phi_deg);

  friend bool operator==(const Direction&, const Direction&) = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Evaluation sphere. Radius depends on frequency (head-and-torso vs head).
struct SphereGeometry {
  double radius_m = 0.09;

  static SphereGeometry for_frequency(double freq_hz);
};

struct GridSplit {
  std::vector<Direction> known;
  std::vector<Direction> unknown;
};

enum class Scenario { interp, extrap };

Scenario parse_scenario(const std::string& name);
const char* scenario_name(Scenario s);

/// sin/cos of an angle in degrees; exact at multiples of 90 degrees.
double sin_deg(double deg);
double cos_deg(double deg);

Point3 sph_to_cart(const Direction& dir, double r);

/// Inverse of sph_to_cart for a point off the origin.
Direction cart_to_sph(const Point3& p);

/// 21 elevations x 60 azimuths; every other row and column is known (330).
GridSplit build_interp_grid();

/// 15 x 45 known directions within |theta| <= 56, 6 x 45 unknown beyond.
GridSplit build_extrap_grid();

GridSplit build_grid(Scenario s);

/// CSV with header theta_deg,phi_deg,set.
std::string grid_to_csv(const GridSplit& grid);

}  // namespace helio
