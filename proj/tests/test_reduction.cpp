#include <doctest.h>

#include "flattori/reduction.hpp"

using namespace flattori;

TEST_CASE("systole basics") {
  CHECK(systole(GroupElement(Mat::Identity(2, 2))).value == doctest::Approx(1.0));
  CHECK(systole(GroupElement(Mat::Identity(3, 3))).value == doctest::Approx(1.0));
  Mat d2(2, 2);
  d2 << 2.0, 0.0, 0.0, 0.5;
  Systole s = systole(GroupElement(d2));
  CHECK(s.value == doctest::Approx(0.5));
  CHECK(s.witness.cwiseAbs().maxCoeff() == doctest::Approx(0.5));
  // Witness consistency: coeffs^T g = witness.
  Rng rng(31);
  for (int d : {2, 3}) {
    for (int it = 0; it < 30; ++it) {
      GroupElement g = random_group_element(d, rng, 0.8);
      Systole sy = systole(g);
      Vec v = Vec::Zero(d);
      for (int i = 0; i < d; ++i) v += static_cast<double>(sy.coeffs(i)) * g.m.row(i).transpose();
      CHECK((v - sy.witness).norm() < 1e-10);
      CHECK(sy.value > 0.0);
    }
  }
}

TEST_CASE("systole invariances and Minkowski floor") {
  Rng rng(32);
  for (int d : {2, 3}) {
    for (int it = 0; it < 40; ++it) {
      GroupElement g = random_group_element(d, rng, 0.7);
      // Right multiplication by orthogonal k preserves all norms.
      Mat k = kak(random_group_element(d, rng)).k;
      CHECK(systole(GroupElement(g.m * k)).value == doctest::Approx(systole(g).value));
      // Integral change of basis (elementary gamma) preserves the lattice.
      Mat e = Mat::Identity(d, d);
      e(0, d - 1) += 1.0;
      CHECK(systole(GroupElement(e * g.m)).value == doctest::Approx(systole(g).value));
      // Minkowski sanity floor for the height.
      CHECK(omega_level(g) >= height_floor(d) - 1e-9);
    }
  }
}

TEST_CASE("Siegel reduction: domain membership and residual") {
  Rng rng(33);
  for (int d : {2, 3}) {
    for (int it = 0; it < 60; ++it) {
      GroupElement g = random_group_element(d, rng, 0.9);
      SiegelForm sf = siegel_reduce(g);
      CHECK(sf.n_norm <= 1.0 + 1e-9);
      CHECK(sf.min_ratio >= 0.8 - 1e-9);
      // gamma g = n exp(a) k.
      Mat lhs = sf.gamma.cast<double>() * g.m;
      Mat rhs = sf.nak.reassemble();
      CHECK((lhs - rhs).norm() < 1e-8 * lhs.norm());
      CHECK(std::abs(static_cast<double>(integer_det(sf.gamma)) - 1.0) < 0.5);
    }
  }
}

TEST_CASE("Siegel reduction examples") {
  // diag(1/3, 3): reduced a strictly descending.
  Mat g(2, 2);
  g << 1.0 / 3.0, 0.0, 0.0, 3.0;
  SiegelForm sf = siegel_reduce(GroupElement(g));
  CHECK(sf.nak.a(0) > sf.nak.a(1));
  CHECK(sf.nak.a(0) == doctest::Approx(std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("Siegel systole bounds") {
  // a_d(g') u0^{d-1} <= s(g') <= a_d(g') for the reduced form.
  Rng rng(34);
  const SiegelParams par;
  for (int d : {2, 3}) {
    for (int it = 0; it < 500; ++it) {
      GroupElement g = random_group_element(d, rng, 0.8);
      SiegelForm sf = siegel_reduce(g, par);
      const double ad = std::exp(sf.nak.a(d - 1));
      const double s = systole(g).value;  // gamma-invariant
      CHECK(s <= ad * (1.0 + 1e-9));
      CHECK(s >= ad * std::pow(par.u0, d - 1) * (1.0 - 1e-9));
    }
  }
}

TEST_CASE("systole sub-multiplicativity under A") {
  Rng rng(35);
  for (int d : {2, 3}) {
    for (int it = 0; it < 100; ++it) {
      GroupElement x = random_group_element(d, rng, 0.8);
      Vec b = project_to_cartan(random_gaussian(d, 1, rng).col(0));
      Mat eb = b.array().exp().matrix().asDiagonal();
      const double ratio = systole(GroupElement(x.m * eb)).value / systole(x).value;
      CHECK(ratio <= std::exp(b.norm()) + 1e-9);
      CHECK(ratio >= std::exp(-b.norm()) - 1e-9);
    }
  }
}

TEST_CASE("torus height profile") {
  auto census = class_census2(4.2);
  REQUIRE(!census.empty());
  // Disc-5 torus: reproducible max height across seeds within 5%.
  const TorusRecord* disc5 = nullptr;
  for (const auto& rec : census)
    if (rec.disc == 5) disc5 = &rec;
  REQUIRE(disc5 != nullptr);
  Rng r1(101), r2(202);
  HeightReport h1 = torus_height_check(*disc5, 4000, r1);
  HeightReport h2 = torus_height_check(*disc5, 4000, r2);
  CHECK(h1.max_height > 0.9);
  CHECK(std::abs(h1.max_height - h2.max_height) <= 0.05 * h1.max_height);
  CHECK(h1.exponent_estimate == doctest::Approx(std::log(h1.max_height) / disc5->lambda.norm()));
  // Height trend: max height over large-disc tori is not below the disc-5 one
  // (cusp excursions grow with the discriminant).
  double max_large = 0.0;
  Rng r3(303);
  for (const auto& rec : census)
    if (rec.disc > 100) max_large = std::max(max_large, torus_height_check(rec, 800, r3).max_height);
  CHECK(max_large >= h1.max_height * 0.8);
}

TEST_CASE("systole growth search") {
  // Deep cusp point: height 1/eps is huge; the search brings it into a band.
  const double eps = 1e-4;
  Mat g(2, 2);
  g << eps, 0.0, 0.0, 1.0 / eps;
  GrowthSearchResult res = systole_growth_search(GroupElement(g), 5.0, 50.0, 30.0);
  REQUIRE(res.b.has_value());
  CHECK(res.final_height >= 5.0);
  CHECK(res.final_height <= 50.0);
  // Already in target: b = 0.
  GrowthSearchResult triv = systole_growth_search(GroupElement(Mat::Identity(2, 2)), 0.5, 2.0, 5.0);
  REQUIRE(triv.b.has_value());
  CHECK(triv.b->norm() == doctest::Approx(0.0));
  // Step size scales at most linearly with the log of the initial height.
  for (double e : {1e-2, 1e-3, 1e-5}) {
    Mat gg(2, 2);
    gg << e, 0.0, 0.0, 1.0 / e;
    GrowthSearchResult r = systole_growth_search(GroupElement(gg), 5.0, 50.0, 40.0);
    REQUIRE(r.b.has_value());
    CHECK(r.b->norm() <= 1.5 * std::log(1.0 / e) + 3.0);
  }
}

TEST_CASE("Haar sampling of the modular quotient") {
  Rng rng(77);
  long proposals = 0;
  const int n = 200000;
  std::vector<double> heights;
  heights.reserve(n);
  double obs_acc = 0.0;
  for (int i = 0; i < n; ++i) {
    GroupElement g = haar_sample_quotient2(rng, &proposals);
    CHECK(std::abs(g.m.determinant() - 1.0) < 1e-9);
    heights.push_back(omega_level(g));
    obs_acc += std::exp(-heights.back());
  }
  // Acceptance rate = pi sqrt3 / 6.
  const double rate = static_cast<double>(n) / static_cast<double>(proposals);
  CHECK(rate == doctest::Approx(M_PI * std::sqrt(3.0) / 6.0).epsilon(0.02));
  // Mass of Omega(R)^c decreases in R.
  auto tail = [&](double R) {
    std::size_t c = 0;
    for (double h : heights) c += (h > R);
    return static_cast<double>(c) / heights.size();
  };
  CHECK(tail(2.0) > tail(4.0));
  CHECK(tail(4.0) > tail(8.0));
  CHECK(tail(8.0) >= tail(16.0));
  CHECK(tail(16.0) < 0.01);
  // Observable mean stable across seeds within 3 standard errors.
  Rng rng2(78);
  double obs2 = 0.0;
  for (int i = 0; i < n; ++i) obs2 += std::exp(-omega_level(haar_sample_quotient2(rng2)));
  const double mean1 = obs_acc / n, mean2 = obs2 / n;
  CHECK(std::abs(mean1 - mean2) < 3.0 * 0.5 / std::sqrt(static_cast<double>(n)));
}
