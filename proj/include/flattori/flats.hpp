#ifndef FLATTORI_FLATS_HPP
#define FLATTORI_FLATS_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "flattori/cocycle.hpp"

namespace flattori {

/// A transverse pair of flags (the two endpoints of a maximal flat).
struct TransversePair {
  Flag forward;
  Flag backward;
};

namespace detail {

/// One-dimensional intersection of two subspaces given by orthonormal column
/// bases: the right singular vector of the stacked complement projectors with
/// the smallest singular value.
inline Vec subspace_intersection_line(const Mat& qa, const Mat& qb) {
  const int d = static_cast<int>(qa.rows());
  Mat stack(2 * d, d);
  stack.topRows(d) = Mat::Identity(d, d) - qa * qa.transpose();
  stack.bottomRows(d) = Mat::Identity(d, d) - qb * qb.transpose();
  Eigen::JacobiSVD<Mat> svd(stack, Eigen::ComputeFullV);
  return svd.matrixV().col(d - 1);
}

}  // namespace detail

/// A group element g with g.eta_0 = xi and g.zeta_0 = eta: its columns span
/// the lines E_i(xi) cap E_{d-i+1}(eta).  The flat through (xi, eta) is
/// { g exp(v) K : v in a }.
inline GroupElement flat_basis(const TransversePair& pair) {
  const int d = pair.forward.d();
  Mat g(d, d);
  for (int i = 1; i <= d; ++i) {
    Mat qa = pair.forward.frame.leftCols(i);
    Mat qb = pair.backward.frame.leftCols(d - i + 1);
    g.col(i - 1) = detail::subspace_intersection_line(qa, qb);
  }
  if (g.determinant() < 0) g.col(d - 1) *= -1.0;
  return GroupElement(g);
}

namespace detail {

/// Nelder-Mead on R^n for smooth convex objectives (n = d-1 <= 3 here).
inline Vec nelder_mead(const std::function<double(const Vec&)>& f, Vec x0, double scale,
                       int max_iter = 600) {
  const int n = static_cast<int>(x0.size());
  std::vector<Vec> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  for (int i = 0; i < n; ++i) pts[i + 1](i) += scale;
  for (int i = 0; i <= n; ++i) val[i] = f(pts[i]);
  for (int it = 0; it < max_iter; ++it) {
    // order
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (val[j] < val[i]) {
          std::swap(val[i], val[j]);
          std::swap(pts[i], pts[j]);
        }
    if ((pts[n] - pts[0]).norm() < 1e-12 && std::abs(val[n] - val[0]) < 1e-14) break;
    Vec centroid = Vec::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= n;
    Vec xr = centroid + (centroid - pts[n]);
    double fr = f(xr);
    if (fr < val[0]) {
      Vec xe = centroid + 2.0 * (centroid - pts[n]);
      double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe;
        val[n] = fe;
      } else {
        pts[n] = xr;
        val[n] = fr;
      }
    } else if (fr < val[n - 1]) {
      pts[n] = xr;
      val[n] = fr;
    } else {
      Vec xc = centroid + 0.5 * (pts[n] - centroid);
      double fc = f(xc);
      if (fc < val[n]) {
        pts[n] = xc;
        val[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          val[i] = f(pts[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (val[i] < val[best]) best = i;
  return pts[best];
}

/// Orthonormal basis of the sum-zero subspace of R^d (columns).
inline Mat cartan_basis(int d) {
  Mat b(d, d - 1);
  for (int j = 0; j < d - 1; ++j) {
    Vec v = Vec::Zero(d);
    for (int i = 0; i <= j; ++i) v(i) = 1.0;
    v(j + 1) = -(j + 1);
    b.col(j) = v / v.norm();
  }
  return b;
}

}  // namespace detail

struct FlatDistanceResult {
  double distance;
  Vec argmin;  // Cartan vector v at the closest flat point g exp(v) K
};

/// Distance from the point x = h K to the maximal flat with endpoints `pair`:
/// min over v in a of d_X(x, g exp(v) K).  The objective is convex; we run
/// Nelder-Mead from a few starts and keep the best.
inline FlatDistanceResult flat_distance(const GroupElement& h, const TransversePair& pair) {
  const int d = h.d();
  GroupElement g = flat_basis(pair);
  Mat base = h.m.inverse() * g.m;
  Mat cb = detail::cartan_basis(d);
  auto objective = [&](const Vec& coords) {
    Vec v = cb * coords;
    Mat m = base * v.array().exp().matrix().asDiagonal();
    Eigen::JacobiSVD<Mat> svd(m);
    return project_to_cartan(svd.singularValues().array().log().matrix()).norm();
  };
  // Start at the flat point suggested by the Cartan part of base, plus 0.
  Eigen::JacobiSVD<Mat> svd0(base);
  Vec a0 = project_to_cartan(svd0.singularValues().array().log().matrix());
  Vec best;
  double best_val = std::numeric_limits<double>::infinity();
  for (Vec start : {Vec(Vec::Zero(d - 1)), Vec(cb.transpose() * (-a0)), Vec(cb.transpose() * a0)}) {
    for (double scale : {1.0, 0.1}) {
      Vec cand = detail::nelder_mead(objective, start, scale);
      double val = objective(cand);
      if (val < best_val) {
        best_val = val;
        best = cand;
      }
    }
  }
  // Polish from the winner.
  Vec cand = detail::nelder_mead(objective, best, 1e-3);
  if (objective(cand) < best_val) {
    best_val = objective(cand);
    best = cand;
  }
  return {best_val, cb * best};
}

// ---------------------------------------------------------------------------
// Attracting / repelling flags
// ---------------------------------------------------------------------------

/// Cartan flags of g seen from the origin: from g = k exp(a) l^T, the forward
/// flag is k.eta_0 and the backward flag is (l kappa).eta_0 where kappa is the
/// coordinate reversal.  Requires a(g) regular for the pair to be well posed.
inline TransversePair cartan_flags(const GroupElement& g) {
  KAKDecomposition dec = kak(g);
  const int d = g.d();
  return {make_flag(dec.k), make_flag(dec.l * opposite_standard_flag(d).frame)};
}

/// Cartan flags of g seen from x = hK (the flags of h^{-1} g h, pushed back).
inline TransversePair cartan_flags_at(const GroupElement& g, const GroupElement& h) {
  TransversePair p = cartan_flags(GroupElement(h.m.inverse() * g.m * h.m));
  return {act(h, p.forward), act(h, p.backward)};
}

/// Attracting and repelling fixed flags g^+, g^- of a loxodromic element,
/// from its eigenbasis ordered by decreasing |eigenvalue|.
inline TransversePair eigen_flags(const GroupElement& g) {
  const int d = g.d();
  auto ev = eigenvalues_of(g);
  Mat basis(d, d);
  for (int i = 0; i < d; ++i) {
    // Null vector of g - ev_i (real for loxodromic elements).
    Mat m = g.m - ev[i].real() * Mat::Identity(d, d);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    basis.col(i) = svd.matrixV().col(d - 1);
  }
  return {make_flag(basis), make_flag(basis.rowwise().reverse())};
}

/// The fixed-point / translation normal form of a loxodromic g: an element
/// p with p.eta_0 = g^+, p.zeta_0 = g^-, so p^{-1} g p = exp(lambda(g)) m
/// with m in M.  Returned p is the flat basis of the eigenflag pair.
inline GroupElement loxodromic_frame(const GroupElement& g) {
  return flat_basis(eigen_flags(g));
}

// ---------------------------------------------------------------------------
// xi^perp and the loxodromy certificate
// ---------------------------------------------------------------------------

/// The flag opposite to xi with respect to the basepoint x = hK.
inline Flag flag_perp(const GroupElement& h, const Flag& xi) {
  GroupElement hi = h.inverse();
  return act(h, orthogonal_opposite(act(hi, xi)));
}

/// Certificate for loxodromy from Cartan data at a basepoint: if a_x(g) is
/// r-deep inside the chamber beyond the threshold and x sits within `r` of
/// the g-invariant flat, then g is loxodromic with eigenflags epsilon-close
/// to the Cartan flags at x.  This routine just reports the measured
/// quantities; the inequalities are asserted by the callers/tests.
struct LoxodromyDiagnosis {
  Vec cartan_at_x;        // a_x(g)
  double wall_margin;     // distance of a_x(g) to the chamber walls
  bool loxodromic;        // spectral verdict
  double flat_dist;       // d_X(x, flat of eigenflags), when loxodromic
  double forward_gap;     // d(g^+, forward Cartan flag at x)
  double backward_gap;    // d(g^-, backward Cartan flag at x)
};

inline LoxodromyDiagnosis diagnose_loxodromy(const GroupElement& g, const GroupElement& h) {
  LoxodromyDiagnosis out;
  out.cartan_at_x = cartan_projection_at(g, h);
  out.wall_margin = wall_distance(out.cartan_at_x);
  JordanData jd = jordan_projection(g);
  out.loxodromic = jd.loxodromic;
  out.flat_dist = std::numeric_limits<double>::quiet_NaN();
  out.forward_gap = std::numeric_limits<double>::quiet_NaN();
  out.backward_gap = std::numeric_limits<double>::quiet_NaN();
  if (out.loxodromic) {
    TransversePair eig = eigen_flags(g);
    out.flat_dist = flat_distance(h, eig).distance;
    TransversePair cart = cartan_flags_at(g, h);
    out.forward_gap = flag_distance(eig.forward, cart.forward);
    out.backward_gap = flag_distance(eig.backward, cart.backward);
  }
  return out;
}

}  // namespace flattori

#endif
