#ifndef FLATTORI_REDUCTION_HPP
#define FLATTORI_REDUCTION_HPP

#include <optional>

#include "flattori/flats.hpp"
#include "flattori/lattice_enum.hpp"
#include "flattori/tori.hpp"

namespace flattori {

// ---------------------------------------------------------------------------
// Systole of the row lattice Z^d g
// ---------------------------------------------------------------------------

struct Systole {
  double value = 0.0;
  IVec coeffs;  // integer coefficient vector of the witness
  Vec witness;  // the witness vector itself (coeffs^T * g)
};

namespace detail {

/// Pairwise size reduction of the integer coefficient basis U against the
/// real rows of B = U g (greedy, norm-sorted).
inline void greedy_reduce_rows(Mat& b, Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>& u) {
  const int d = static_cast<int>(b.rows());
  bool changed = true;
  int guard = 0;
  while (changed && guard++ < 256) {
    changed = false;
    // Sort rows by norm (ascending).
    for (int i = 0; i + 1 < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if (b.row(j).norm() < b.row(i).norm()) {
          b.row(i).swap(b.row(j));
          u.row(i).swap(u.row(j));
        }
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (i == j) continue;
        const double q = std::round(b.row(j).dot(b.row(i)) / b.row(i).squaredNorm());
        if (q != 0.0) {
          b.row(j) -= q * b.row(i);
          u.row(j) -= static_cast<int64_t>(q) * u.row(i);
          changed = true;
        }
      }
  }
}

}  // namespace detail

/// Exact shortest nonzero vector of the row lattice Z^d g (d <= 3): greedy
/// reduction followed by exhaustive enumeration of small coefficient
/// combinations of the reduced basis (radius 4 is ample for a pairwise
/// reduced basis in dimension <= 3).
inline Systole systole(const GroupElement& g) {
  const int d = g.d();
  Mat b = g.m;
  Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic> u =
      Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>::Identity(d, d);
  detail::greedy_reduce_rows(b, u);
  Systole best;
  best.value = std::numeric_limits<double>::infinity();
  const int R = 4;
  std::vector<int64_t> c(d, -R);
  for (;;) {
    bool zero = true;
    for (int i = 0; i < d; ++i) zero = zero && c[i] == 0;
    if (!zero) {
      Vec v = Vec::Zero(d);
      for (int i = 0; i < d; ++i) v += static_cast<double>(c[i]) * b.row(i).transpose();
      if (v.norm() < best.value) {
        best.value = v.norm();
        best.witness = v;
        best.coeffs = IVec::Zero(d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) best.coeffs(j) += c[i] * u(i, j);
      }
    }
    int pos = 0;
    while (pos < d && c[pos] == R) c[pos++] = -R;
    if (pos == d) break;
    ++c[pos];
  }
  return best;
}

/// 1/s, the height used for the Omega(R) exhaustion.
inline double omega_level(const GroupElement& g) { return 1.0 / systole(g).value; }

/// Minkowski sanity floor for 1/s on unimodular lattices: s <= sqrt(gamma_d)
/// with Hermite's constant gamma_2 = 2/sqrt3, gamma_3 = 2^{2/3}.
inline double height_floor(int d) {
  const double hermite = (d == 2) ? 2.0 / std::sqrt(3.0) : std::pow(2.0, 2.0 / 3.0);
  return 1.0 / std::sqrt(hermite);
}

// ---------------------------------------------------------------------------
// Siegel reduction
// ---------------------------------------------------------------------------

struct SiegelParams {
  double s0 = 1.0;   // unipotent bound (> 1/2)
  double u0 = 0.8;   // consecutive ratio bound (< sqrt3/2)
};

struct SiegelForm {
  IMat gamma;        // reducing element: gamma * g = n exp(a) k
  IwasawaNAK nak;    // of gamma * g
  double n_norm = 0.0;
  double min_ratio = 0.0;  // min over i of exp(a_i - a_{i+1})
};

namespace detail {

/// Unimodular integer matrix with prescribed last row (a primitive vector).
inline Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic> complete_to_last_row(
    const IVec& c) {
  const int d = static_cast<int>(c.size());
  if (d == 2) {
    int64_t x, y;
    ext_gcd(c(0), c(1), x, y);  // c0 x + c1 y = 1
    Eigen::Matrix<int64_t, 2, 2> t;
    t << -y, x, c(0), c(1);  // det = -y c1 - x c0 = -(1) ... fix sign below
    if (t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0) != 1) t.row(0) *= -1;
    Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic> out = t;
    return out;
  }
  I3 cc;
  cc << c(0), c(1), c(2);
  const IM3 e = column_reduction(cc);      // e * c = e1
  const IM3 vt = unimodular_inverse(e);    // columns: first is c
  // T = vt^T has first row c; rotate rows so c is last with det +1.
  IM3 t;
  t.row(0) = vt.col(1).transpose();
  t.row(1) = vt.col(2).transpose();
  t.row(2) = vt.col(0).transpose();
  // Row rotation of 3 rows is an even permutation: det stays +1 (or -1 if
  // the completion had det -1; fix by negating a non-c row).
  int64_t det = t(0, 0) * (t(1, 1) * t(2, 2) - t(1, 2) * t(2, 1)) -
                t(0, 1) * (t(1, 0) * t(2, 2) - t(1, 2) * t(2, 0)) +
                t(0, 2) * (t(1, 0) * t(2, 1) - t(1, 1) * t(2, 0));
  if (det < 0) t.row(0) *= -1;
  Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic> out = t;
  return out;
}

}  // namespace detail

/// Siegel reduction: gamma in SL(d,Z) with gamma * g in the Siegel domain
/// N_{s0} A_{u0} K.  Shortest lattice vector goes to the last row, the
/// quotient is reduced recursively, then the unipotent part is size-reduced.
inline SiegelForm siegel_reduce(const GroupElement& g, const SiegelParams& par = {}) {
  const int d = g.d();
  Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic> u =
      Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>::Identity(d, d);
  auto current = [&]() { return Mat(u.cast<double>() * g.m); };
  // 1) shortest vector to the last row.
  {
    Systole s = systole(GroupElement(current()));
    IVec c = s.coeffs;
    int64_t gc = 0;
    for (int i = 0; i < d; ++i) gc = std::gcd(gc, std::abs(c(i)));
    if (gc > 1) c /= gc;
    u = detail::complete_to_last_row(c);
  }
  if (d == 3) {
    // 2) Lagrange-reduce the projections of rows 0, 1 orthogonal to row 2,
    // ending with the shorter projection in row 1.
    Mat b = current();
    Vec last = b.row(2).transpose().eval();
    auto proj = [&](const Vec& v) { return Vec(v - last * (v.dot(last) / last.squaredNorm())); };
    for (int guard = 0; guard < 128; ++guard) {
      Vec p0 = proj(b.row(0).transpose()), p1 = proj(b.row(1).transpose());
      if (p0.norm() < p1.norm()) {
        b.row(0).swap(b.row(1));
        u.row(0).swap(u.row(1));
        continue;
      }
      const double q = std::round(p0.dot(p1) / p1.squaredNorm());
      if (q == 0.0) break;
      b.row(0) -= q * b.row(1);
      u.row(0) -= static_cast<int64_t>(q) * u.row(1);
    }
    // Keep det +1 (row swaps may have flipped it).
    IMat ui(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) ui(i, j) = u(i, j);
    if (integer_det(ui) < 0) u.row(0) *= -1;
  } else {
    IMat ui(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) ui(i, j) = u(i, j);
    if (integer_det(ui) < 0) u.row(0) *= -1;
  }
  // 3) size reduction of the unipotent part (rows from the bottom up).
  for (int pass = 0; pass < 8; ++pass) {
    IwasawaNAK nak = iwasawa_nak(GroupElement(current()));
    bool moved = false;
    for (int i = d - 2; i >= 0; --i)
      for (int j = i + 1; j < d; ++j) {
        const double q = std::round(nak.n(i, j));
        if (q != 0.0) {
          u.row(i) -= static_cast<int64_t>(q) * u.row(j);
          moved = true;
        }
      }
    if (!moved) break;
  }
  SiegelForm out;
  out.gamma = IMat(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out.gamma(i, j) = u(i, j);
  out.nak = iwasawa_nak(GroupElement(current()));
  out.n_norm = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j) out.n_norm = std::max(out.n_norm, std::abs(out.nak.n(i, j)));
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < d; ++i)
    out.min_ratio = std::min(out.min_ratio, std::exp(out.nak.a(i) - out.nak.a(i + 1)));
  (void)par;
  return out;
}

// ---------------------------------------------------------------------------
// Torus heights and systole growth
// ---------------------------------------------------------------------------

struct HeightReport {
  double max_height = 0.0;
  double mean_height = 0.0;
  double exponent_estimate = 0.0;  // log(max)/||lambda||
};

/// Sample the compact torus of a census record uniformly in its period
/// parallelepiped and report the height profile (Lem. of the key-observation
/// circle: F lies in Omega(exp(C ||lambda||))).
inline HeightReport torus_height_check(const TorusRecord& rec, int n_samples, Rng& rng) {
  GroupElement frame = loxodromic_frame(to_group_element(rec.repr));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  HeightReport rep;
  double acc = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    Vec v = Vec::Zero(rec.d);
    for (const Vec& b : rec.periods.basis) v += unif(rng) * b;
    Mat av = v.array().exp().matrix().asDiagonal();
    const double h = omega_level(GroupElement(frame.m * av));
    rep.max_height = std::max(rep.max_height, h);
    acc += h;
  }
  rep.mean_height = acc / n_samples;
  rep.exponent_estimate = std::log(rep.max_height) / std::max(rec.lambda.norm(), 1e-12);
  return rep;
}

struct GrowthSearchResult {
  std::optional<Vec> b;  // Cartan step with omega_level(g exp(b)) in target
  double final_height = 0.0;
  int steps = 0;
};

/// Character-descent search: walk along the Cartan direction that expands
/// the current systole witness until the height enters (lo, hi); bisect on
/// overshoot.  Mirrors the constructive strategy of the growth lemma.
inline GrowthSearchResult systole_growth_search(const GroupElement& g, double lo, double hi,
                                                double step_bound) {
  const int d = g.d();
  Vec b = Vec::Zero(d);
  auto height_at = [&](const Vec& bb) {
    Mat av = bb.array().exp().matrix().asDiagonal();
    return omega_level(GroupElement(g.m * av));
  };
  GrowthSearchResult res;
  double h = height_at(b);
  if (h >= lo && h <= hi) {
    res.b = b;
    res.final_height = h;
    return res;
  }
  const int max_steps = 400;
  double step = 0.25;
  for (int it = 0; it < max_steps; ++it) {
    if (h >= lo && h <= hi) {
      res.b = b;
      res.final_height = h;
      res.steps = it;
      return res;
    }
    // Gradient of log ||w exp(b)|| in b at the current witness w.
    Mat av = b.array().exp().matrix().asDiagonal();
    Systole s = systole(GroupElement(g.m * av));
    Vec w = s.witness;
    Vec grad(d);
    for (int i = 0; i < d; ++i) grad(i) = w(i) * w(i) / w.squaredNorm();
    grad = project_to_cartan(grad);
    if (grad.norm() < 1e-12) break;
    grad.normalize();
    // Too high => grow the witness (move along +grad); too low => shrink.
    const double dir = (h > hi) ? 1.0 : -1.0;
    Vec bnext = b + dir * step * grad;
    if (bnext.norm() > step_bound) break;
    const double hnext = height_at(bnext);
    const bool overshoot = (h > hi && hnext < lo) || (h < lo && hnext > hi);
    if (overshoot) {
      step *= 0.5;
      continue;
    }
    b = bnext;
    h = hnext;
  }
  res.final_height = h;
  res.steps = max_steps;
  if (h >= lo && h <= hi) res.b = b;
  return res;
}

// ---------------------------------------------------------------------------
// Haar sampling of SL(2,Z)\SL(2,R)/M
// ---------------------------------------------------------------------------

/// Sample the quotient Haar probability via the classical modular domain
/// (|x| <= 1/2, x^2 + y^2 >= 1, measure dx dy / y^2) and a uniform rotation.
/// The rejection proposal is |x| <= 1/2, y >= sqrt3/2 with the same measure;
/// acceptance probability is pi sqrt3 / 6.
inline GroupElement haar_sample_quotient2(Rng& rng, long* proposals = nullptr) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (;;) {
    if (proposals) ++*proposals;
    const double x = unif(rng) - 0.5;
    // y from density 1/y^2 on [sqrt3/2, inf): y = (sqrt3/2) / u.
    const double y = (std::sqrt(3.0) / 2.0) / std::max(unif(rng), 1e-300);
    if (x * x + y * y < 1.0) continue;
    const double theta = 2.0 * M_PI * unif(rng);
    Mat nfac(2, 2);
    nfac << 1.0 / std::sqrt(y), 0.0, x / std::sqrt(y), std::sqrt(y);
    Mat rot(2, 2);
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return GroupElement(nfac * rot);
  }
}

}  // namespace flattori

#endif
