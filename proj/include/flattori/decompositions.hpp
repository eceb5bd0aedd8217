#ifndef FLATTORI_DECOMPOSITIONS_HPP
#define FLATTORI_DECOMPOSITIONS_HPP

#include <complex>
#include <cmath>
#include <vector>

#include "flattori/cartan.hpp"
#include "flattori/types.hpp"

namespace flattori {

// ---------------------------------------------------------------------------
// Cartan (KAK) decomposition
// ---------------------------------------------------------------------------

/// g = k * exp(a) * l^T with k, l in SO(d) and a the decreasing vector of
/// log singular values (an element of the closed Weyl chamber).
struct KAKDecomposition {
  Mat k;
  Vec a;
  Mat l;

  Mat reassemble() const { return k * a.array().exp().matrix().asDiagonal() * l.transpose(); }
};

namespace detail {

/// Deterministic sign fixing for an SVD pair (U, V), g = U S V^T: make the
/// largest-magnitude entry of each column of U positive (ties broken by the
/// lowest row index), mirroring each flip in V, then flip the last column
/// pair if needed so that det U = det V = +1.
inline void fix_svd_signs(Mat& u, Mat& v) {
  const int d = static_cast<int>(u.rows());
  for (int j = 0; j < d; ++j) {
    int arg = 0;
    for (int i = 1; i < d; ++i)
      if (std::abs(u(i, j)) > std::abs(u(arg, j)) + 1e-14) arg = i;
    if (u(arg, j) < 0) {
      u.col(j) *= -1.0;
      v.col(j) *= -1.0;
    }
  }
  if (u.determinant() < 0) {
    u.col(d - 1) *= -1.0;
    v.col(d - 1) *= -1.0;
  }
}

}  // namespace detail

inline KAKDecomposition kak(const GroupElement& g) {
  Eigen::JacobiSVD<Mat> svd(g.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat u = svd.matrixU();
  Mat v = svd.matrixV();
  detail::fix_svd_signs(u, v);
  Vec a = svd.singularValues().array().log();
  return {u, project_to_cartan(a), v};
}

/// Cartan projection a(g): decreasing log singular values (sum zero since
/// det g = 1; we re-project to kill rounding drift).
inline Vec cartan_projection(const GroupElement& g) { return kak(g).a; }

/// Cartan projection based at x = h K: a_x(g) = a(h^{-1} g h).
inline Vec cartan_projection_at(const GroupElement& g, const GroupElement& h) {
  return cartan_projection(GroupElement(h.m.inverse() * g.m * h.m));
}

/// Distance on the symmetric space X = G/K between x = gK and y = hK,
/// d_X(x,y) = || a(g^{-1} h) || in the trace-form norm.
inline double symmetric_space_distance(const GroupElement& g, const GroupElement& h) {
  return cartan_projection(GroupElement(g.m.inverse() * h.m)).norm();
}

// ---------------------------------------------------------------------------
// Iwasawa decompositions
// ---------------------------------------------------------------------------

/// g = k * exp(a) * n  (KAN): k in SO(d), a in the Cartan subspace, n upper
/// unipotent.
struct IwasawaKAN {
  Mat k;
  Vec a;
  Mat n;

  Mat reassemble() const { return k * a.array().exp().matrix().asDiagonal() * n; }
};

/// g = n * exp(a) * k  (NAK).
struct IwasawaNAK {
  Mat n;
  Vec a;
  Mat k;

  Mat reassemble() const { return n * a.array().exp().matrix().asDiagonal() * k; }
};

inline IwasawaKAN iwasawa_kan(const GroupElement& g) {
  const int d = g.d();
  Eigen::HouseholderQR<Mat> qr(g.m);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    if (r(i, i) < 0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  Vec a = r.diagonal().array().log();
  Mat n = r;
  for (int i = 0; i < d; ++i) n.row(i) /= r(i, i);
  return {q, project_to_cartan(a), n};
}

/// NAK by Gram-Schmidt on the rows from the bottom up: row_d(g) is a_d times
/// a unit vector, and row_j decomposes against the already-orthonormalized
/// rows below it; the coefficients populate the upper unipotent factor.
inline IwasawaNAK iwasawa_nak(const GroupElement& g) {
  const int d = g.d();
  Mat k = Mat::Zero(d, d);
  Mat n = Mat::Identity(d, d);
  Vec a(d);
  for (int j = d - 1; j >= 0; --j) {
    Vec r = g.m.row(j).transpose();
    for (int l = j + 1; l < d; ++l) {
      const double coeff = r.dot(k.row(l).transpose());
      n(j, l) = coeff / std::exp(a(l));
      r -= coeff * k.row(l).transpose();
    }
    a(j) = std::log(r.norm());
    k.row(j) = r.transpose() / r.norm();
  }
  // n(j,l) above divides by exp(a(l)) so that g = n * diag(e^a) * k exactly.
  return {n, project_to_cartan(a), k};
}

// ---------------------------------------------------------------------------
// Jordan projection
// ---------------------------------------------------------------------------

struct JordanData {
  /// Decreasing log moduli of the eigenvalues (sum zero).
  Vec lambda;
  /// True when the moduli are pairwise distinct (all eigenvalues then real),
  /// i.e. lambda lies in the open chamber.
  bool loxodromic;
  /// Eigenvalues sorted by decreasing modulus.
  std::vector<std::complex<double>> eigenvalues;
};

namespace detail {

/// Characteristic polynomial coefficients p(x) = x^d + c[d-1] x^{d-1} + ... + c[0]
/// via Faddeev-LeVerrier (exact divisions, stable for d <= 4).
inline std::vector<double> char_poly_coeffs(const Mat& m) {
  const int d = static_cast<int>(m.rows());
  std::vector<double> c(d + 1, 0.0);
  c[d] = 1.0;
  Mat mk = Mat::Identity(d, d);
  for (int k = 1; k <= d; ++k) {
    mk = m * mk;
    const double ck = -mk.trace() / k;
    c[d - k] = ck;
    mk += ck * Mat::Identity(d, d);
  }
  return c;
}

inline std::complex<double> poly_eval(const std::vector<double>& c, std::complex<double> x) {
  std::complex<double> acc = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) acc = acc * x + c[i];
  return acc;
}

inline std::complex<double> poly_deriv_eval(const std::vector<double>& c, std::complex<double> x) {
  std::complex<double> acc = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 1; --i)
    acc = acc * x + static_cast<double>(i) * c[i];
  return acc;
}

inline std::complex<double> newton_polish(const std::vector<double>& c, std::complex<double> x) {
  for (int it = 0; it < 8; ++it) {
    const std::complex<double> dp = poly_deriv_eval(c, x);
    if (std::abs(dp) < 1e-300) break;
    const std::complex<double> step = poly_eval(c, x) / dp;
    x -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

}  // namespace detail

/// Eigenvalues of g: closed forms for d = 2 (quadratic) and d = 3 (Cardano),
/// both Newton-polished on the characteristic polynomial; general d falls
/// back to Eigen's eigensolver (also polished).
inline std::vector<std::complex<double>> eigenvalues_of(const GroupElement& g) {
  const int d = g.d();
  const auto c = detail::char_poly_coeffs(g.m);
  std::vector<std::complex<double>> ev;
  if (d == 2) {
    // x^2 + c1 x + c0
    const double c1 = c[1], c0 = c[0];
    const std::complex<double> disc = std::complex<double>(c1 * c1 - 4.0 * c0, 0.0);
    const std::complex<double> s = std::sqrt(disc);
    ev = {(-c1 + s) / 2.0, (-c1 - s) / 2.0};
  } else if (d == 3) {
    // Depressed cubic t^3 + pt + q with x = t - c2/3.
    const double c2 = c[2], c1 = c[1], c0 = c[0];
    const double p = c1 - c2 * c2 / 3.0;
    const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    const std::complex<double> disc = std::complex<double>(q * q / 4.0 + p * p * p / 27.0, 0.0);
    const std::complex<double> s = std::sqrt(disc);
    std::complex<double> u = std::pow(-q / 2.0 + s, 1.0 / 3.0);
    if (std::abs(u) < 1e-30) u = std::pow(-q / 2.0 - s, 1.0 / 3.0);
    const std::complex<double> omega(-0.5, std::sqrt(3.0) / 2.0);
    for (int j = 0; j < 3; ++j) {
      std::complex<double> uj = u * std::pow(omega, j);
      std::complex<double> t = (std::abs(uj) < 1e-30) ? 0.0 : uj - p / (3.0 * uj);
      ev.push_back(t - c2 / 3.0);
    }
  } else {
    Eigen::EigenSolver<Mat> es(g.m);
    for (int i = 0; i < d; ++i) ev.push_back(es.eigenvalues()(i));
  }
  for (auto& z : ev) {
    z = detail::newton_polish(c, z);
    if (std::abs(z.imag()) < 1e-10 * (1.0 + std::abs(z.real()))) z = z.real();
  }
  std::sort(ev.begin(), ev.end(), [](const auto& x, const auto& y) {
    if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
    return x.real() > y.real();
  });
  return ev;
}

inline JordanData jordan_projection(const GroupElement& g, double regularity_tol = 1e-10) {
  auto ev = eigenvalues_of(g);
  const int d = g.d();
  Vec lambda(d);
  for (int i = 0; i < d; ++i) lambda(i) = std::log(std::abs(ev[i]));
  lambda = project_to_cartan(lambda);
  bool lox = true;
  for (int i = 0; i + 1 < d; ++i)
    if (lambda(i) - lambda(i + 1) <= regularity_tol) lox = false;
  return {lambda, lox, std::move(ev)};
}

}  // namespace flattori

#endif
