#ifndef FLATTORI_CARTAN_HPP
#define FLATTORI_CARTAN_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "flattori/types.hpp"

namespace flattori {

/// The Cartan subspace a of sl(d,R): diagonal matrices of trace zero,
/// represented as d-vectors with sum zero.  The inner product is the trace
/// form tr(XY), i.e. the standard Euclidean product on the coordinates.

/// Orthogonal projection of an arbitrary d-vector onto the sum-zero subspace.
inline Vec project_to_cartan(const Vec& v) {
  return v.array() - v.mean();
}

inline bool is_cartan_vector(const Vec& v, double tol = kTol) {
  return std::abs(v.sum()) <= tol * std::max(1.0, v.cwiseAbs().maxCoeff());
}

/// Half-sum of positive roots: rho_i = (d + 1 - 2i)/2 in coordinates, so
/// rho(v) = sum_{i<j} (v_i - v_j)/2.
inline Vec rho_vector(int d) {
  Vec r(d);
  for (int i = 0; i < d; ++i) r(i) = 0.5 * (d - 1 - 2 * i);
  return r;
}

inline double rho_of(const Vec& v) { return rho_vector(static_cast<int>(v.size())).dot(v); }

/// Positive roots alpha_{ij}(v) = v_i - v_j for i < j (all with multiplicity 1).
inline std::vector<std::pair<int, int>> positive_roots(int d) {
  std::vector<std::pair<int, int>> roots;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) roots.emplace_back(i, j);
  return roots;
}

/// Simple roots alpha_i(v) = v_i - v_{i+1}, i = 1..d-1.
inline Vec simple_root_values(const Vec& v) {
  const int d = static_cast<int>(v.size());
  Vec s(d - 1);
  for (int i = 0; i < d - 1; ++i) s(i) = v(i) - v(i + 1);
  return s;
}

/// Fundamental weights chi^i(v) = v_1 + ... + v_i, i = 1..d-1.
inline Vec fundamental_weight_values(const Vec& v) {
  const int d = static_cast<int>(v.size());
  Vec c(d - 1);
  double acc = 0.0;
  for (int i = 0; i < d - 1; ++i) {
    acc += v(i);
    c(i) = acc;
  }
  return c;
}

/// Inverse of fundamental_weight_values: recover the sum-zero vector from its
/// partial sums chi^1..chi^{d-1}.  (The system is triangular and exact.)
inline Vec cartan_from_weights(const Vec& chi) {
  const int d = static_cast<int>(chi.size()) + 1;
  Vec v(d);
  double prev = 0.0;
  for (int i = 0; i < d - 1; ++i) {
    v(i) = chi(i) - prev;
    prev = chi(i);
  }
  v(d - 1) = -chi(d - 2);
  return v;
}

/// Opposition involution iota(v) = (-v_d, ..., -v_1).
inline Vec opposition(const Vec& v) {
  const int d = static_cast<int>(v.size());
  Vec w(d);
  for (int i = 0; i < d; ++i) w(i) = -v(d - 1 - i);
  return w;
}

/// Membership in the closed (resp. open) Weyl chamber a^+ : v_1 >= ... >= v_d.
inline bool in_closed_chamber(const Vec& v, double tol = kTol) {
  return simple_root_values(v).minCoeff() >= -tol;
}
inline bool in_open_chamber(const Vec& v, double margin = 0.0) {
  return simple_root_values(v).minCoeff() > margin;
}

/// Distance from v to the walls of a^+ (defined for v in the closed chamber):
/// the wall {v_i = v_{i+1}} is at Euclidean distance (v_i - v_{i+1})/sqrt(2).
inline double wall_distance(const Vec& v) {
  return simple_root_values(v).minCoeff() / std::sqrt(2.0);
}

/// The Weyl group of SL(d) acts by permuting coordinates.  Enumerate all d!
/// images of v (d <= 4 in practice, so this stays tiny).
inline std::vector<Vec> weyl_orbit(const Vec& v) {
  const int d = static_cast<int>(v.size());
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<Vec> orbit;
  do {
    Vec w(d);
    for (int i = 0; i < d; ++i) w(i) = v(idx[i]);
    orbit.push_back(w);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return orbit;
}

/// Dominant representative: coordinates sorted in decreasing order.
inline Vec dominant_representative(const Vec& v) {
  Vec w = v;
  std::sort(w.data(), w.data() + w.size(), std::greater<double>());
  return w;
}

/// min_{w in Weyl} || w(u) - v ||.
inline double weyl_min_distance(const Vec& u, const Vec& v) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& w : weyl_orbit(u)) best = std::min(best, (w - v).norm());
  return best;
}

/// Comparability constant between the sup of |chi^i| and the Euclidean norm:
/// C_a = max_{||v|| = 1} max_i |chi^i(v)|, and the matching lower constant.
/// Computed by dense sampling plus local refinement on the unit sphere of a
/// (dimension d-1 <= 3; the objective is piecewise linear so this is robust).
struct WeightNormConstants {
  double upper;  // max_i |chi^i(v)| <= upper * ||v||
  double lower;  // max_i |chi^i(v)| >= lower * ||v||
};

inline WeightNormConstants weight_norm_constants(int d) {
  // max_i |chi^i| is a norm given by finitely many linear functionals; its
  // extrema over the sphere are attained at functional directions (upper) and
  // at intersections of level sets (lower).  Random sampling with projection
  // finds both to ample accuracy for d <= 4.
  Rng rng(12345);
  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  auto value = [&](const Vec& v) { return fundamental_weight_values(v).cwiseAbs().maxCoeff(); };
  // Exact candidates for the max: v proportional to the projection of the
  // weight functionals themselves.
  for (int i = 0; i < d - 1; ++i) {
    Vec grad = Vec::Zero(d);
    for (int j = 0; j <= i; ++j) grad(j) = 1.0;
    Vec v = project_to_cartan(grad);
    v.normalize();
    hi = std::max(hi, value(v));
  }
  for (int it = 0; it < 20000; ++it) {
    Vec v = project_to_cartan(random_gaussian(d, 1, rng).col(0));
    if (v.norm() < 1e-12) continue;
    v.normalize();
    lo = std::min(lo, value(v));
  }
  return {hi, lo};
}

}  // namespace flattori

#endif
