#include <doctest.h>

#include "flattori/cartan.hpp"

using namespace flattori;

namespace {
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}
}  // namespace

TEST_CASE("rho vector and rho functional") {
  CHECK(rho_vector(2).isApprox(vec2(0.5, -0.5)));
  CHECK(rho_vector(3).isApprox(vec3(1.0, 0.0, -1.0)));
  // rho(v) = sum_{i<j} (v_i - v_j)/2, checked directly.
  Vec v = vec3(0.7, 0.1, -0.8);
  double direct = 0.0;
  for (auto [i, j] : positive_roots(3)) direct += 0.5 * (v(i) - v(j));
  CHECK(rho_of(v) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("projection to the Cartan subspace") {
  Vec v = vec3(1.0, 2.0, 6.0);
  Vec p = project_to_cartan(v);
  CHECK(is_cartan_vector(p));
  CHECK((v - p).isApprox(Vec::Constant(3, 3.0)));
}

TEST_CASE("fundamental weights invert triangularly") {
  Rng rng(7);
  for (int it = 0; it < 50; ++it) {
    for (int d : {2, 3, 4}) {
      Vec v = project_to_cartan(random_gaussian(d, 1, rng).col(0));
      Vec chi = fundamental_weight_values(v);
      CHECK((cartan_from_weights(chi) - v).norm() < 1e-12);
    }
  }
}

TEST_CASE("opposition involution") {
  CHECK(opposition(vec3(2, -1, -1)).isApprox(vec3(1, 1, -2)));
  CHECK(opposition(vec3(1, 0, -1)).isApprox(vec3(1, 0, -1)));
  Rng rng(8);
  Vec v = project_to_cartan(random_gaussian(3, 1, rng).col(0));
  CHECK(opposition(opposition(v)).isApprox(v));
  // iota preserves the chamber and the norm.
  Vec w = dominant_representative(v);
  CHECK(in_closed_chamber(opposition(w)));
  CHECK(opposition(w).norm() == doctest::Approx(w.norm()));
  // rho is iota-invariant.
  CHECK(rho_of(opposition(w)) == doctest::Approx(rho_of(w)).epsilon(1e-12));
}

TEST_CASE("chamber membership and wall distance") {
  CHECK(in_closed_chamber(vec3(1, 0, -1)));
  CHECK(in_open_chamber(vec3(1, 0, -1)));
  CHECK(in_closed_chamber(vec3(0.5, 0.5, -1)));
  CHECK(!in_open_chamber(vec3(0.5, 0.5, -1)));
  CHECK(!in_closed_chamber(vec3(0, 1, -1)));
  CHECK(wall_distance(vec3(1, 0, -1)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  // Euclidean distance to the nearest non-dominant region, brute-force check.
  Rng rng(9);
  for (int it = 0; it < 20; ++it) {
    Vec v = dominant_representative(project_to_cartan(random_gaussian(3, 1, rng).col(0)));
    double brute = std::numeric_limits<double>::infinity();
    for (const Vec& w : weyl_orbit(v))
      if (!w.isApprox(v)) brute = std::min(brute, (w - v).norm() / 2.0);
    CHECK(wall_distance(v) == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("weyl orbit") {
  Vec v = vec3(3, 2, 1);
  CHECK(weyl_orbit(v).size() == 6);
  CHECK(dominant_representative(vec3(-1, 1, 0)).isApprox(vec3(1, 0, -1)));
  CHECK(weyl_min_distance(vec3(-1, 1, 0), vec3(1, 0, -1)) == doctest::Approx(0.0));
  // The dominant representative minimizes distance to any dominant vector.
  Rng rng(10);
  for (int it = 0; it < 20; ++it) {
    Vec a = project_to_cartan(random_gaussian(3, 1, rng).col(0));
    Vec b = dominant_representative(project_to_cartan(random_gaussian(3, 1, rng).col(0)));
    CHECK(weyl_min_distance(a, b) ==
          doctest::Approx((dominant_representative(a) - b).norm()).epsilon(1e-9));
  }
}

TEST_CASE("weight norm comparability constants") {
  // d=2: chi^1(v) = v_1 and ||v|| = sqrt2 |v_1|, so both constants are 1/sqrt2.
  auto c2 = weight_norm_constants(2);
  CHECK(c2.upper == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(c2.lower == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
  auto c3 = weight_norm_constants(3);
  CHECK(c3.upper >= c3.lower);
  CHECK(c3.lower > 0.0);
  // Sample check of the two-sided bound.
  Rng rng(11);
  for (int it = 0; it < 200; ++it) {
    Vec v = project_to_cartan(random_gaussian(3, 1, rng).col(0));
    double sup = fundamental_weight_values(v).cwiseAbs().maxCoeff();
    CHECK(sup <= c3.upper * v.norm() + 1e-12);
    CHECK(sup >= 0.99 * c3.lower * v.norm() - 1e-12);
  }
}
