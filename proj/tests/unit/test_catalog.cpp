#include "isodiam/catalog.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace isodiam;

TEST_CASE("critical catenoid height") {
  const double T0 = critical_catenoid_T0();
  CHECK(std::abs(T0 * std::tanh(T0) - 1.0) < 1e-10);
  CHECK(T0 == doctest::Approx(1.19968).epsilon(1e-5));
  CHECK(1.0 - 1.0 / std::tanh(1.0) < 0.0);
  CHECK(1.5 - 1.0 / std::tanh(1.5) > 0.0);
}

TEST_CASE("critical Mobius height") {
  const double T0 = critical_mobius_T0();
  CHECK(std::abs(1.0 / std::tanh(T0) - 2.0 * std::tanh(2.0 * T0)) < 1e-10);
  // The rim conormal is radial exactly at the critical height.
  CHECK(mobius_conormal_angle(T0) < 1e-8);
  CHECK(mobius_conormal_angle(T0 + 0.1) > 1e-3);
}

TEST_CASE("catenoid closed forms against quadrature of the parametrisation") {
  using boost::math::quadrature::gauss_kronrod;
  for (double T : {0.3, 0.8, 1.7}) {
    const TruncatedCatenoid c{T};
    // Surface element cosh^2 t, rim speed cosh T.
    const double area = 2 * M_PI * gauss_kronrod<double, 61>::integrate([](double t) { return std::pow(std::cosh(t), 2); }, -T, T);
    CHECK(c.area() == doctest::Approx(area).epsilon(1e-12));
    CHECK(c.boundary_length() == doctest::Approx(2 * 2 * M_PI * std::cosh(T)).epsilon(1e-14));
    CHECK(c.ambient_radius() == doctest::Approx(c.point(T, 0.3).norm()).epsilon(1e-14));
  }
}

TEST_CASE("minimal ratio values") {
  const double T0 = critical_catenoid_T0();
  CHECK(std::abs(minimal_ratio(T0) - 1.0) < 1e-6);
  CHECK(minimal_ratio(0.8) == doctest::Approx(0.9537).epsilon(1e-4));
  for (int i = 0; i <= 280; ++i) {
    const double T = 0.2 + 0.01 * i;
    if (std::abs(T - T0) > 0.05) CHECK(minimal_ratio(T) < 1 - 1e-4);
    if (std::abs(T - T0) > 1e-3) CHECK(minimal_ratio(T) < 1.0);
  }
  CHECK_THROWS_AS(minimal_ratio(0.0), Error);
}

TEST_CASE("mesh measures agree with closed forms") {
  for (double T : {0.5, critical_catenoid_T0(), 2.5}) {
    const TruncatedCatenoid c{T};
    const MeshMeasures m = catenoid_mesh(T, 1024, 64);
    CHECK(std::abs(m.area / c.area() - 1) < 1e-5);
    CHECK(std::abs(m.boundary_length / c.boundary_length() - 1) < 1e-5);
    CHECK(std::abs(m.ambient_radius / c.ambient_radius() - 1) < 1e-5);
    CHECK(m.center.norm() < 1e-9);
    CHECK(std::abs(m.ratio - minimal_ratio(T)) < 1e-5);
  }
  CHECK(catenoid_mesh(critical_catenoid_T0()).max_conormal_angle < 1e-3);
  CHECK(catenoid_mesh(0.8).max_conormal_angle > 1e-2);
}

TEST_CASE("intrinsic radius dominates the ambient one") {
  const auto rep = intrinsic_dominance(critical_catenoid_T0());
  CHECK(rep.holds);
  CHECK(rep.intrinsic >= rep.ambient);
  // The neck circle alone already needs half its circumference.
  CHECK(rep.intrinsic >= M_PI - 1e-6);
}

TEST_CASE("equatorial disks and annuli") {
  CHECK(std::abs(equatorial_disk_check(4096).ratio - 1) < 1e-6);
  CHECK(std::abs(equatorial_disk_check(4096, 2.5, Point(3, -1)).ratio - 1) < 1e-6);
  for (double a : {0.1, 0.5}) {
    const DiskCheck d = annulus_check(a);
    CHECK(d.ratio < 1.0);
    CHECK(d.ratio == doctest::Approx(d.expected).epsilon(1e-6));
  }
}

TEST_CASE("ratio sweep has its single interior peak at the critical height") {
  const auto rows = ratio_sweep(0.2, 3.0, 57);
  const PeakReport p = peaks(rows);
  CHECK(p.interior_maxima == 1);
  CHECK(std::abs(p.T_max - critical_catenoid_T0()) <= 0.05);
  for (const auto& r : rows) CHECK(r.discrepancy < 1e-5);

  const auto path = std::filesystem::temp_directory_path() / "isodiam_sweep_test.csv";
  write_sweep_csv(rows, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "T,rho,discrepancy");
  std::filesystem::remove(path);
}
