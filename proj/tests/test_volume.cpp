#include <doctest.h>

#include <random>

#include "flattori/volume.hpp"

using namespace flattori;

TEST_CASE("Harish-Chandra density basics") {
  Vec v(3);
  v << 1.0, 0.2, -1.2;
  CHECK(hc_density(v) ==
        doctest::Approx(std::sinh(0.8) * std::sinh(2.2) * std::sinh(1.4)).epsilon(1e-12));
  // Vanishes on the walls.
  Vec w(3);
  w << 0.5, 0.5, -1.0;
  CHECK(hc_density(w) == doctest::Approx(0.0));
}

TEST_CASE("growth rates") {
  CHECK(volume_growth_rate(2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(volume_growth_rate(3) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("d=2 closed form matches direct arclength quadrature") {
  for (double t : {0.5, 1.0, 3.0, 10.0}) {
    // vol = int_0^t sinh(sqrt2 s) ds by midpoint quadrature.
    const int n = 200000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::sinh(std::sqrt(2.0) * (i + 0.5) * t / n) * t / n;
    CHECK(flat_ball_volume(2, t) == doctest::Approx(acc).epsilon(1e-8));
  }
}

TEST_CASE("d=3 quadrature matches Cartesian Monte Carlo at moderate t") {
  // Oracle: integrate xi over the chamber ball in (v1, v2) coordinates
  // (v3 = -v1-v2, Lebesgue on a has Jacobian sqrt(3) w.r.t. d v1 d v2).
  for (double t : {1.0, 2.0, 4.0}) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(-t, t);
    const int n = 4000000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double v1 = unif(rng), v2 = unif(rng);
      Vec v(3);
      v << v1, v2, -v1 - v2;
      if (v.norm() > t || !(v1 >= v2 && v2 >= v(2))) continue;
      acc += hc_density(v);
    }
    acc *= std::sqrt(3.0) * (2.0 * t) * (2.0 * t) / n;
    CHECK(flat_ball_volume(3, t) == doctest::Approx(acc).epsilon(0.01));
  }
}

TEST_CASE("exponential growth rate is visible at t = 40") {
  for (int d : {2, 3}) {
    const double t = 40.0;
    const double rate = std::log(flat_ball_volume(d, t)) / t;
    CHECK(std::abs(rate - volume_growth_rate(d)) <= 0.05 * volume_growth_rate(d));
  }
}

TEST_CASE("volume is monotone and the wall strip becomes negligible") {
  for (int d : {2, 3}) {
    double prev = 0.0;
    for (double t : {1.0, 2.0, 4.0, 8.0}) {
      double v = flat_ball_volume(d, t);
      CHECK(v > prev);
      prev = v;
      double strip = flat_ball_strip_volume(d, t, 1.0);
      CHECK(strip <= v * (1.0 + 1e-9));
      CHECK(strip >= 0.0);
    }
    // Strip fraction decays in t.
    double f1 = flat_ball_strip_volume(d, 6.0, 1.0) / flat_ball_volume(d, 6.0);
    double f2 = flat_ball_strip_volume(d, 12.0, 1.0) / flat_ball_volume(d, 12.0);
    CHECK(f2 < f1);
    CHECK(f2 < 0.05);
  }
}

TEST_CASE("volume table") {
  VolumeTable tab = make_volume_table(3, {2.0, 4.0, 6.0});
  CHECK(tab.t.size() == 3);
  CHECK(tab.volume[2] == doctest::Approx(flat_ball_volume(3, 6.0)).epsilon(1e-9));
  CHECK(tab.log_volume[1] == doctest::Approx(std::log(tab.volume[1])).epsilon(1e-12));
}
