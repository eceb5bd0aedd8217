#include <doctest.h>

#include "flattori/flats.hpp"

using namespace flattori;

namespace {

TransversePair random_transverse_pair(int d, Rng& rng) {
  for (;;) {
    Flag a = random_flag(d, rng);
    Flag b = random_flag(d, rng);
    if (flag_delta(a, b) > 0.05) return {a, b};
  }
}

GroupElement diag_exp(const Vec& v) {
  return GroupElement(Vec(v.array().exp()).asDiagonal().toDenseMatrix());
}

}  // namespace

TEST_CASE("flat basis maps the standard pair to the given pair") {
  Rng rng(51);
  for (int it = 0; it < 50; ++it) {
    for (int d : {2, 3}) {
      TransversePair p = random_transverse_pair(d, rng);
      GroupElement g = flat_basis(p);
      CHECK(flag_distance(act(g, standard_flag(d)), p.forward) < 1e-6);
      CHECK(flag_distance(act(g, opposite_standard_flag(d)), p.backward) < 1e-6);
    }
  }
}

TEST_CASE("flat distance: zero on the flat, matches grid search off it") {
  Rng rng(52);
  const int d = 3;
  TransversePair std_pair{standard_flag(d), opposite_standard_flag(d)};
  // Points on the flat A.o have distance zero.
  for (int it = 0; it < 10; ++it) {
    Vec v = project_to_cartan(random_gaussian(d, 1, rng).col(0));
    CHECK(flat_distance(diag_exp(v), std_pair).distance < 1e-6);
  }
  // Off-flat points: compare against a dense grid + local refinement oracle.
  for (int it = 0; it < 10; ++it) {
    GroupElement h = random_group_element(d, rng, 0.5);
    FlatDistanceResult res = flat_distance(h, std_pair);
    double best = std::numeric_limits<double>::infinity();
    Vec best_v;
    for (double s = -4.0; s <= 4.0; s += 0.05)
      for (double u = -4.0; u <= 4.0; u += 0.05) {
        Vec v(3);
        v << s, u, -s - u;
        double val = symmetric_space_distance(h, diag_exp(v));
        if (val < best) {
          best = val;
          best_v = v;
        }
      }
    CHECK(res.distance <= best + 1e-6);
    CHECK(res.distance >= best - 0.05);  // grid resolution slack
    // And the argmin certificate reproduces the reported distance.
    CHECK(symmetric_space_distance(h, diag_exp(res.argmin)) ==
          doctest::Approx(res.distance).epsilon(1e-6));
  }
}

TEST_CASE("flat distance is G-equivariant") {
  Rng rng(53);
  for (int d : {2, 3}) {
    TransversePair p = random_transverse_pair(d, rng);
    GroupElement h = random_group_element(d, rng, 0.5);
    GroupElement q = random_group_element(d, rng, 0.5);
    double d1 = flat_distance(h, p).distance;
    double d2 = flat_distance(GroupElement(q.m * h.m),
                              {act(q, p.forward), act(q, p.backward)})
                    .distance;
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-5));
  }
}

TEST_CASE("eigenflags are fixed and attracting/repelling") {
  Rng rng(54);
  for (int d : {2, 3}) {
    for (int it = 0; it < 30; ++it) {
      // Conjugate of a regular diagonal element: loxodromic by construction.
      Vec a(d);
      for (int i = 0; i < d; ++i) a(i) = (d - 1 - 2.0 * i) * (0.8 + 0.2 * (it % 3));
      a = project_to_cartan(a);
      GroupElement h = random_group_element(d, rng);
      GroupElement g(h.m * diag_exp(a).m * h.m.inverse());
      TransversePair eig = eigen_flags(g);
      CHECK(flag_distance(act(g, eig.forward), eig.forward) < 1e-7);
      CHECK(flag_distance(act(g, eig.backward), eig.backward) < 1e-7);
      // Forward iteration attracts generic flags to the forward eigenflag.
      Flag x = random_flag(d, rng);
      Flag xk = x;
      for (int k = 0; k < 8; ++k) xk = act(g, xk);
      CHECK(flag_distance(xk, eig.forward) < 1e-2);
      // loxodromic_frame conjugates g to exp(lambda) M.
      GroupElement p = loxodromic_frame(g);
      Mat conj = p.m.inverse() * g.m * p.m;
      Vec lam = jordan_projection(g).lambda;
      Mat expected = Vec(lam.array().exp()).asDiagonal();
      // Allow the M-ambiguity: compare entrywise absolute values.
      CHECK((conj.cwiseAbs() - expected.cwiseAbs()).norm() < 1e-6 * expected.norm());
    }
  }
}

TEST_CASE("Cartan flags approximate eigenflags for chamber-deep elements") {
  Rng rng(55);
  for (int d : {2, 3}) {
    for (int it = 0; it < 20; ++it) {
      Vec a(d);
      for (int i = 0; i < d; ++i) a(i) = 3.0 * (d - 1 - 2.0 * i);
      a = project_to_cartan(a);
      GroupElement h = random_group_element(d, rng, 0.5);
      GroupElement g(h.m * diag_exp(a).m * h.m.inverse());
      LoxodromyDiagnosis diag = diagnose_loxodromy(g, h);
      CHECK(diag.loxodromic);
      // x = hK lies on the invariant flat of g, by construction.
      CHECK(diag.flat_dist < 1e-4);
      CHECK(diag.wall_margin > 0.0);
      CHECK(diag.forward_gap < 1e-4);
      CHECK(diag.backward_gap < 1e-4);
    }
  }
}

TEST_CASE("Weyl-corrected Jordan vs Cartan bound at the flat distance scale") {
  // min_w || w(lambda(g)) - a_x(g) || <= 2 d_X(x, flat(g^+, g^-)).
  Rng rng(56);
  for (int d : {2, 3}) {
    for (int it = 0; it < 60; ++it) {
      Vec a(d);
      for (int i = 0; i < d; ++i) a(i) = (1.2 + 0.3 * (it % 4)) * (d - 1 - 2.0 * i);
      a = project_to_cartan(a);
      GroupElement h = random_group_element(d, rng, 0.6);
      GroupElement g(h.m * diag_exp(a).m * h.m.inverse());
      if (!jordan_projection(g).loxodromic) continue;
      GroupElement x = random_group_element(d, rng, 0.6);
      double flat_d = flat_distance(x, eigen_flags(g)).distance;
      double lhs = weyl_min_distance(jordan_projection(g).lambda, cartan_projection_at(g, x));
      CHECK(lhs <= 2.0 * flat_d + 1e-6);
    }
  }
}

TEST_CASE("flag_perp is opposite and basepoint-equivariant") {
  Rng rng(57);
  for (int d : {2, 3}) {
    GroupElement h = random_group_element(d, rng);
    Flag xi = random_flag(d, rng);
    Flag perp = flag_perp(h, xi);
    // Transversality gauge is maximal in the metric seen from h: pulling back
    // by h makes the pair orthogonal.
    GroupElement hi = h.inverse();
    CHECK(flag_delta(act(hi, xi), act(hi, perp)) == doctest::Approx(1.0).epsilon(1e-8));
    // At the origin it is the orthogonal opposite.
    GroupElement id(Mat::Identity(d, d));
    CHECK(flag_distance(flag_perp(id, xi), orthogonal_opposite(xi)) < 1e-6);
  }
}
