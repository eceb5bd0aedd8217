#ifndef FLATTORI_COCYCLE_HPP
#define FLATTORI_COCYCLE_HPP

#include <cmath>

#include "flattori/flags.hpp"

namespace flattori {

/// The frame of a flag as a rotation in SO(d) (flip the last column if the
/// orthogonal frame has determinant -1; the flag is unchanged).
inline Mat frame_rotation(const Flag& f) {
  Mat k = f.frame;
  if (k.determinant() < 0) k.col(k.cols() - 1) *= -1.0;
  return k;
}

/// Iwasawa cocycle sigma(g, xi), defined by g k_xi in K exp(sigma) N where
/// k_xi is a rotation mapping the standard flag to xi.  Well defined because
/// the M-ambiguity in k_xi commutes into K and N.
inline Vec iwasawa_cocycle(const GroupElement& g, const Flag& xi) {
  return iwasawa_kan(GroupElement(g.m * frame_rotation(xi))).a;
}

/// Independent route through the wedge representations:
/// chi^i(sigma(g,xi)) = log || Lambda^i g . w_i(xi) ||  (w_i unit Pluecker).
inline Vec iwasawa_cocycle_wedge(const GroupElement& g, const Flag& xi) {
  const int d = g.d();
  Vec chi(d - 1);
  for (int i = 1; i < d; ++i) {
    Vec w = wedge_coordinates(xi.frame, i);
    chi(i - 1) = std::log((compound_matrix(g.m, i) * w).norm() / w.norm());
  }
  return cartan_from_weights(chi);
}

/// Busemann cocycle beta_xi(x, y) = sigma(h_x^{-1} h_y, h_y^{-1} xi) for
/// points x = h_x K, y = h_y K.
inline Vec busemann_cocycle(const Flag& xi, const GroupElement& hx, const GroupElement& hy) {
  GroupElement hy_inv = hy.inverse();
  return iwasawa_cocycle(GroupElement(hx.m.inverse() * hy.m), act(hy_inv, xi));
}

/// Gromov product (xi | eta)_o of two transverse flags, characterized by
/// chi^i((xi|eta)_o) = -log delta_i(xi, eta); the triangular chi-system is
/// inverted exactly.
inline Vec gromov_product(const Flag& xi, const Flag& eta) {
  // chi^i pairs the i-th wedge of eta's reversed chain with xi's chain; this
  // orientation is the one that satisfies the transformation rule
  // (g xi | g eta)_o - (xi|eta)_o = iota sigma(g, xi) + sigma(g, eta).
  Vec levels = flag_delta_levels(eta, xi);
  return cartan_from_weights((-levels.array().log()).matrix());
}

/// Gromov product based at x = hK: transport both flags back to the origin.
inline Vec gromov_product_at(const GroupElement& h, const Flag& xi, const Flag& eta) {
  GroupElement hi = h.inverse();
  return gromov_product(act(hi, xi), act(hi, eta));
}

/// Conformal factor f_x(xi, eta) = exp(-2 rho((xi|eta)_x)).  The exponent
/// 2 rho (the full sum of positive roots) is forced by G-invariance of
/// d mu_x d mu_x / f_x together with the quasi-invariance density below.
inline double conformal_factor(const GroupElement& h, const Flag& xi, const Flag& eta) {
  return std::exp(-2.0 * rho_of(gromov_product_at(h, xi, eta)));
}

/// Radon-Nikodym derivative d(g_* mu_o)/d mu_o (xi) = exp(-2 rho sigma(g^{-1}, xi))
/// of the push-forward of the K-invariant measure on the flag variety.  (For
/// d = 2 this is the classical circle-action derivative ||g^{-1} v||^{-2};
/// the exponent is the sum of positive roots, not its half.)
inline double quasi_invariant_density(const GroupElement& g, const Flag& xi) {
  return std::exp(-2.0 * rho_of(iwasawa_cocycle(g.inverse(), xi)));
}

// ---------------------------------------------------------------------------
// Hopf coordinates
// ---------------------------------------------------------------------------

/// Hopf coordinates of gM in G/M: (g eta_0, g zeta_0, sigma(g, eta_0)).
struct HopfPoint {
  Flag forward;
  Flag backward;
  Vec flow;  // element of the Cartan subspace
};

inline HopfPoint hopf_coordinates(const GroupElement& g) {
  const int d = g.d();
  return {act(g, standard_flag(d)), act(g, opposite_standard_flag(d)), iwasawa_kan(g).a};
}

/// The G-action in Hopf coordinates: h.(xi, eta, Y) = (h xi, h eta, Y + sigma(h, xi)).
inline HopfPoint hopf_translate(const GroupElement& h, const HopfPoint& p) {
  return {act(h, p.forward), act(h, p.backward), p.flow + iwasawa_cocycle(h, p.forward)};
}

}  // namespace flattori

#endif
