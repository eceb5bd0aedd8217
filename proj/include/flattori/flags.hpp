#ifndef FLATTORI_FLAGS_HPP
#define FLATTORI_FLAGS_HPP

#include <cmath>
#include <vector>

#include "flattori/decompositions.hpp"
#include "flattori/types.hpp"

namespace flattori {

// ---------------------------------------------------------------------------
// Full flags and the Furstenberg boundary
// ---------------------------------------------------------------------------

/// A full flag in R^d stored as an orthonormal frame: column j spans the new
/// direction of the j-th subspace, so V_i = span(col_0..col_{i-1}).  The
/// frame is determined up to diagonal sign changes; we fix signs
/// deterministically (largest-magnitude entry of each column positive, ties
/// to the lowest row index) so equal flags have identical frames.
struct Flag {
  Mat frame;

  int d() const { return static_cast<int>(frame.rows()); }
};

namespace detail {

inline void fix_frame_signs(Mat& q) {
  const int d = static_cast<int>(q.rows());
  for (int j = 0; j < d; ++j) {
    int arg = 0;
    for (int i = 1; i < d; ++i)
      if (std::abs(q(i, j)) > std::abs(q(arg, j)) + 1e-14) arg = i;
    if (q(arg, j) < 0) q.col(j) *= -1.0;
  }
}

/// Orthonormalize the columns of m in order (thin QR with positive diagonal),
/// then apply the sign convention.
inline Mat orthonormalize_columns(const Mat& m) {
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < q.cols(); ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  fix_frame_signs(q);
  return q;
}

}  // namespace detail

inline Flag make_flag(const Mat& basis) { return {detail::orthonormalize_columns(basis)}; }

/// Standard flag eta_0 (coordinate flag e_1, e_2, ...).
inline Flag standard_flag(int d) { return {Mat::Identity(d, d)}; }

/// Opposite standard flag zeta_0 (coordinate flag e_d, e_{d-1}, ...).
inline Flag opposite_standard_flag(int d) {
  Mat j = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) j(d - 1 - i, i) = 1.0;
  detail::fix_frame_signs(j);
  return {j};
}

/// g acts on flags by multiplying the frame and re-orthonormalizing.
inline Flag act(const GroupElement& g, const Flag& f) { return make_flag(g.m * f.frame); }

/// Reverse a flag's subspace chain with respect to the standard inner
/// product: the i-th subspace of the result is the orthogonal complement of
/// the (d-i)-th subspace of f.  For an orthonormal frame this is column
/// reversal.  (This is xi^perp based at the origin; see flats.hpp for
/// general basepoints.)
inline Flag orthogonal_opposite(const Flag& f) {
  Mat rev = f.frame.rowwise().reverse();
  detail::fix_frame_signs(rev);
  return {rev};
}

// ---------------------------------------------------------------------------
// Wedge powers / Pluecker coordinates
// ---------------------------------------------------------------------------

inline std::vector<std::vector<int>> combinations(int d, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  for (;;) {
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[i] == d - k + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

/// Pluecker coordinates of the span of the first k columns of m: the vector
/// of k x k minors indexed by increasing row subsets.
inline Vec wedge_coordinates(const Mat& m, int k) {
  const int d = static_cast<int>(m.rows());
  auto rows = combinations(d, k);
  Vec w(static_cast<int>(rows.size()));
  Mat sub(k, k);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub(i, j) = m(rows[r][i], j);
    w(static_cast<int>(r)) = sub.determinant();
  }
  return w;
}

/// The k-th compound matrix Lambda^k(g) acting on Pluecker coordinates:
/// entries are the k x k minors of g, rows and columns indexed by increasing
/// subsets.
inline Mat compound_matrix(const Mat& g, int k) {
  const int d = static_cast<int>(g.rows());
  auto subs = combinations(d, k);
  const int n = static_cast<int>(subs.size());
  Mat out(n, n);
  Mat sub(k, k);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = g(subs[r][i], subs[c][j]);
      out(r, c) = sub.determinant();
    }
  return out;
}

// ---------------------------------------------------------------------------
// Distances on projective spaces and flags
// ---------------------------------------------------------------------------

/// d(x,y) = ||v_x ^ v_y|| / (||v_x|| ||v_y||) between the lines spanned by u
/// and v; via ||u^v||^2 = ||u||^2 ||v||^2 - <u,v>^2 this is sin of the angle.
inline double projective_distance(const Vec& u, const Vec& v) {
  const double nu = u.squaredNorm(), nv = v.squaredNorm(), ip = u.dot(v);
  const double s2 = std::max(0.0, nu * nv - ip * ip);
  return std::sqrt(s2 / (nu * nv));
}

/// delta(y, x) = |<v_y, v_x>| / (||v_y|| ||v_x||): the distance from x to the
/// hyperplane y^perp (equivalently cos of the angle); symmetric.
inline double projective_delta(const Vec& u, const Vec& v) {
  return std::abs(u.dot(v)) / (u.norm() * v.norm());
}

/// Flag distance: sup over i of the projective distance between the i-th
/// Pluecker images of the two flags.
inline double flag_distance(const Flag& x, const Flag& y) {
  const int d = x.d();
  double best = 0.0;
  for (int i = 1; i < d; ++i)
    best = std::max(best, projective_distance(wedge_coordinates(x.frame, i),
                                              wedge_coordinates(y.frame, i)));
  return best;
}

/// Transversality gauge delta(xi, eta) = inf over i of the delta-distance
/// between the i-th wedge of xi and the (complementary) wedge of eta's
/// reversed chain; positive iff the flags are transverse.  For orthonormal
/// frames P, Q this is |det(P_i^T Qrev_i)| with P_i the first i columns of P
/// and Qrev_i the last i columns of Q.
inline double flag_delta(const Flag& xi, const Flag& eta) {
  const int d = xi.d();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i < d; ++i) {
    Mat p = xi.frame.leftCols(i);
    Mat q = eta.frame.rightCols(i);
    best = std::min(best, std::abs((p.transpose() * q).determinant()));
  }
  return best;
}

/// Per-level delta values (the building blocks of the Gromov product).
inline Vec flag_delta_levels(const Flag& xi, const Flag& eta) {
  const int d = xi.d();
  Vec out(d - 1);
  for (int i = 1; i < d; ++i) {
    Mat p = xi.frame.leftCols(i);
    Mat q = eta.frame.rightCols(i);
    out(i - 1) = std::abs((p.transpose() * q).determinant());
  }
  return out;
}

inline bool are_transverse(const Flag& xi, const Flag& eta, double tol = 1e-12) {
  return flag_delta(xi, eta) > tol;
}

/// Haar(K)-uniform random flag.
inline Flag random_flag(int d, Rng& rng) { return make_flag(random_gaussian(d, d, rng)); }

}  // namespace flattori

#endif
