// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "helio/error.hpp"
#include "helio/geometry.hpp"

using namespace helio;

namespace {

std::set<std::pair<double, double>> as_set(const std::vector<Direction>& dirs) {
  std::set<std::pair<double, double>> out;
  for (const auto& d : dirs) out.emplace(d.theta_deg, d.phi_deg);
  return out;
}

double max_abs_theta(const std::vector<Direction>& dirs) {
  double m = 0.0;
  for (const auto& d : dirs) m = std::max(m, std::abs(d.theta_deg));
  return m;
}

double min_abs_theta(const std::vector<Direction>& dirs) {
  double m = 1e9;
  for (const auto& d : dirs) m = std::min(m, std::abs(d.theta_deg));
  return m;
}

}  // namespace

TEST_CASE("sph_to_cart axis and pole cases") {
  const auto a = sph_to_cart({0, 0}, 0.09);
  CHECK(a == Point3{0.09, 0, 0});
  const auto b = sph_to_cart({90, 123}, 0.2);
  CHECK(b.x == doctest::Approx(0.0));
  CHECK(b.y == doctest::Approx(0.0));
  CHECK(b.z == 0.2);
  const auto c = sph_to_cart({0, 90}, 1.0);
  CHECK(c == Point3{0, 1, 0});
  CHECK_THROWS_AS(sph_to_cart({0, 0}, 0.0), DomainError);
  CHECK_THROWS_AS(sph_to_cart({0, 0}, -1.0), DomainError);
}

TEST_CASE("Direction::checked enforces ranges") {
  CHECK_NOTHROW(Direction::checked(-90, 0));
  CHECK_NOTHROW(Direction::checked(90, 359.999));
  CHECK_THROWS_AS(Direction::checked(90.5, 0), DomainError);
  CHECK_THROWS_AS(Direction::checked(0, 360), DomainError);
  CHECK_THROWS_AS(Direction::checked(0, -1), DomainError);
}

TEST_CASE("radius follows frequency band") {
  CHECK(SphereGeometry::for_frequency(2067).radius_m == 0.2);
  CHECK(SphereGeometry::for_frequency(3000).radius_m == 0.2);
  CHECK(SphereGeometry::for_frequency(3001).radius_m == 0.09);
  CHECK(SphereGeometry::for_frequency(14470).radius_m == 0.09);
}

TEST_CASE("interp grid counts and layout") {
  const auto g = build_interp_grid();
  CHECK(g.known.size() == 330);
  CHECK(g.unknown.size() == 930);
  CHECK(g.known.size() + g.unknown.size() == 1260);

  const auto known = as_set(g.known);
  const auto unknown = as_set(g.unknown);
  CHECK(known.size() == 330);
  CHECK(unknown.size() == 930);
  for (const auto& k : known) CHECK(unknown.count(k) == 0);

  std::set<double> thetas, phis;
  for (const auto& d : g.known) {
    thetas.insert(d.theta_deg);
    phis.insert(d.phi_deg);
  }
  CHECK(thetas.size() == 11);
  CHECK(phis.size() == 30);
  CHECK(*thetas.begin() == -60);
  CHECK(*thetas.rbegin() == 60);
  CHECK(*phis.begin() == 4);
  CHECK(*phis.rbegin() == 352);
}

TEST_CASE("extrap grid counts and elevation gap") {
  const auto g = build_extrap_grid();
  CHECK(g.known.size() == 675);
  CHECK(g.unknown.size() == 270);
  CHECK(max_abs_theta(g.known) == 56);
  CHECK(min_abs_theta(g.unknown) == 64);
  const auto known = as_set(g.known);
  for (const auto& d : g.unknown) CHECK(known.count({d.theta_deg, d.phi_deg}) == 0);
  CHECK(as_set(g.unknown).size() == 270);
}

TEST_CASE("left iff 0 < phi < 180") {
  for (double phi = 0.5; phi < 360; phi += 1.0) {
    const auto p = sph_to_cart({10, phi}, 0.09);
    CHECK((p.y > 0) == (phi < 180));
  }
}

TEST_CASE("interp grid has no direction on the y = 0 plane") {
  const auto g = build_interp_grid();
  for (const auto* set : {&g.known, &g.unknown})
    for (const auto& d : *set) CHECK(sph_to_cart(d, 0.09).y != 0.0);
}

TEST_CASE("grid directions round-trip through Cartesian coordinates") {
  for (auto s : {Scenario::interp, Scenario::extrap}) {
    const auto g = build_grid(s);
    for (double r : {0.09, 0.2})
      for (const auto* set : {&g.known, &g.unknown})
        for (const auto& d : *set) {
          const auto p = sph_to_cart(d, r);
          CHECK(std::abs(std::hypot(p.x, p.y, p.z) - r) <= 1e-12 * r);
          const auto back = cart_to_sph(p);
          CHECK(std::abs(back.theta_deg - d.theta_deg) < 1e-9);
          CHECK(std::abs(back.phi_deg - d.phi_deg) < 1e-9);
        }
  }
}

TEST_CASE("grid CSV export") {
  const auto csv = grid_to_csv(build_interp_grid());
  CHECK(csv.rfind("theta_deg,phi_deg,set\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1261);
  CHECK(csv.find(",known\n") != std::string::npos);
  CHECK(csv.find(",unknown\n") != std::string::npos);
}

TEST_CASE("scenario names") {
  CHECK(parse_scenario("interp") == Scenario::interp);
  CHECK(parse_scenario("extrap") == Scenario::extrap);
  CHECK(std::string(scenario_name(Scenario::extrap)) == "extrap");
  CHECK_THROWS_AS(parse_scenario("sideways"), ConfigError);
}
