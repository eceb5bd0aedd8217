#include <doctest.h>

#include "flattori/cocycle.hpp"

using namespace flattori;

TEST_CASE("cocycle vanishes on K and reads off A") {
  Rng rng(41);
  for (int d : {2, 3}) {
    // sigma(k, xi) = 0 for k in SO(d).
    for (int it = 0; it < 20; ++it) {
      GroupElement k(kak(random_group_element(d, rng)).k);
      Flag xi = random_flag(d, rng);
      CHECK(iwasawa_cocycle(k, xi).norm() < 1e-10);
    }
    // sigma(exp(a), eta_0) = a.
    Vec a = project_to_cartan(random_gaussian(d, 1, rng).col(0));
    GroupElement ea(Vec(a.array().exp()).asDiagonal().toDenseMatrix());
    CHECK((iwasawa_cocycle(ea, standard_flag(d)) - a).norm() < 1e-10);
    // sigma(g, eta_0) is the KAN Iwasawa a-part.
    GroupElement g = random_group_element(d, rng);
    CHECK((iwasawa_cocycle(g, standard_flag(d)) - iwasawa_kan(g).a).norm() < 1e-12);
  }
}

TEST_CASE("cocycle relation sigma(g1 g2, xi) = sigma(g1, g2 xi) + sigma(g2, xi)") {
  Rng rng(42);
  for (int it = 0; it < 300; ++it) {
    for (int d : {2, 3}) {
      GroupElement g1 = random_group_element(d, rng);
      GroupElement g2 = random_group_element(d, rng);
      Flag xi = random_flag(d, rng);
      Vec lhs = iwasawa_cocycle(GroupElement(g1.m * g2.m), xi);
      Vec rhs = iwasawa_cocycle(g1, act(g2, xi)) + iwasawa_cocycle(g2, xi);
      CHECK((lhs - rhs).norm() <= 1e-8);
    }
  }
}

TEST_CASE("cocycle agrees with the wedge-norm route") {
  Rng rng(43);
  for (int it = 0; it < 300; ++it) {
    for (int d : {2, 3}) {
      GroupElement g = random_group_element(d, rng);
      Flag xi = random_flag(d, rng);
      CHECK((iwasawa_cocycle(g, xi) - iwasawa_cocycle_wedge(g, xi)).norm() <= 1e-8);
    }
  }
}

TEST_CASE("cocycle norm is controlled by the Cartan projection") {
  Rng rng(44);
  for (int it = 0; it < 100; ++it) {
    for (int d : {2, 3}) {
      GroupElement g = random_group_element(d, rng);
      Flag xi = random_flag(d, rng);
      // chi^i(sigma(g, xi)) <= chi^i(a(g)) coefficient-wise via wedge norms.
      Vec cs = fundamental_weight_values(iwasawa_cocycle(g, xi));
      Vec ca = fundamental_weight_values(cartan_projection(g));
      for (int i = 0; i < d - 1; ++i) CHECK(cs(i) <= ca(i) + 1e-8);
    }
  }
}

TEST_CASE("Busemann cocycle additivity in the basepoints") {
  Rng rng(45);
  for (int it = 0; it < 50; ++it) {
    for (int d : {2, 3}) {
      Flag xi = random_flag(d, rng);
      GroupElement hx = random_group_element(d, rng);
      GroupElement hy = random_group_element(d, rng);
      GroupElement hz = random_group_element(d, rng);
      Vec lhs = busemann_cocycle(xi, hx, hy) + busemann_cocycle(xi, hy, hz);
      CHECK((lhs - busemann_cocycle(xi, hx, hz)).norm() < 1e-8);
      // Independence of the K-representative of the basepoint.
      GroupElement k(kak(random_group_element(d, rng)).k);
      CHECK((busemann_cocycle(xi, hx, GroupElement(hy.m * k.m)) - busemann_cocycle(xi, hx, hy))
                .norm() < 1e-8);
    }
  }
}

TEST_CASE("Gromov product basics") {
  Rng rng(46);
  for (int d : {2, 3}) {
    CHECK(gromov_product(standard_flag(d), opposite_standard_flag(d)).norm() < 1e-12);
    // Transformation rule: (g xi | g eta)_o - (xi|eta)_o = iota sigma(g, xi) + sigma(g, eta).
    for (int it = 0; it < 100; ++it) {
      GroupElement g = random_group_element(d, rng);
      Flag xi = random_flag(d, rng);
      Flag eta = random_flag(d, rng);
      Vec lhs = gromov_product(act(g, xi), act(g, eta)) - gromov_product(xi, eta);
      Vec rhs = opposition(iwasawa_cocycle(g, xi)) + iwasawa_cocycle(g, eta);
      CHECK((lhs - rhs).norm() < 1e-7);
      // Conformal factor is symmetric in its two flags (rho is iota-invariant
      // and the delta gauge is symmetric).
      GroupElement h = random_group_element(d, rng);
      CHECK(conformal_factor(h, xi, eta) ==
            doctest::Approx(conformal_factor(h, eta, xi)).epsilon(1e-7));
    }
  }
}

TEST_CASE("quasi-invariance of the round measure (Monte Carlo sanity)") {
  // E_mu[f(g xi)] = E_mu[f(xi) q_g(xi)] for the K-invariant measure mu; a
  // tight quadrature version of this is asserted in the acceptance suite.
  Rng rng(47);
  for (int d : {2, 3}) {
    GroupElement g = random_group_element(d, rng, 0.4);
    double lhs = 0.0, rhs = 0.0;
    const int n = 20000;
    for (int it = 0; it < n; ++it) {
      Flag xi = random_flag(d, rng);
      auto f = [&](const Flag& x) {
        return std::exp(-2.0 * flag_distance(x, standard_flag(d)));
      };
      lhs += f(act(g, xi));
      rhs += f(xi) * quasi_invariant_density(g, xi);
    }
    CHECK(lhs / n == doctest::Approx(rhs / n).epsilon(0.03));
  }
}

TEST_CASE("Hopf coordinates") {
  Rng rng(48);
  for (int d : {2, 3}) {
    GroupElement g = random_group_element(d, rng);
    GroupElement h = random_group_element(d, rng);
    HopfPoint p = hopf_coordinates(g);
    // Translation matches Hopf of the product.
    HopfPoint q1 = hopf_translate(h, p);
    HopfPoint q2 = hopf_coordinates(GroupElement(h.m * g.m));
    CHECK(flag_distance(q1.forward, q2.forward) < 1e-8);
    CHECK(flag_distance(q1.backward, q2.backward) < 1e-8);
    CHECK((q1.flow - q2.flow).norm() < 1e-8);
    // Right A-action only shifts the flow coordinate.
    Vec y = project_to_cartan(random_gaussian(d, 1, rng).col(0));
    HopfPoint r = hopf_coordinates(GroupElement(g.m * Vec(y.array().exp()).asDiagonal().toDenseMatrix()));
    CHECK(flag_distance(r.forward, p.forward) < 1e-7);
    CHECK(flag_distance(r.backward, p.backward) < 1e-7);
    CHECK((r.flow - (p.flow + y)).norm() < 1e-8);
  }
}
