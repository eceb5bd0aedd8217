#ifndef FLATTORI_TORI_HPP
#define FLATTORI_TORI_HPP

#include <array>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "flattori/flats.hpp"
#include "flattori/lattice_enum.hpp"
#include "flattori/quadforms.hpp"

namespace flattori {

// ---------------------------------------------------------------------------
// Exact characteristic polynomials and irreducibility over Q
// ---------------------------------------------------------------------------

/// Monic integer characteristic polynomial, coefficients in ascending powers:
/// p(x) = sum_k coeffs[k] x^k with coeffs[d] = 1 (Faddeev-LeVerrier, exact).
inline std::vector<int64_t> char_poly(const IMat& m) {
  const int d = static_cast<int>(m.rows());
  IMat mk = IMat::Identity(d, d);
  std::vector<int64_t> c(d + 1, 0);
  c[d] = 1;
  for (int k = 1; k <= d; ++k) {
    mk = (m * mk).eval();
    int64_t tr = 0;
    for (int i = 0; i < d; ++i) tr += mk(i, i);
    // c_{d-k} = -(1/k) * sum_{j=1}^{k} c_{d-k+j} tr(m^j); use the recursive
    // form with the auxiliary matrix instead: M_k = m (M_{k-1} + c_{d-k+1} I).
    c[d - k] = -tr / k;
    if (k < d) mk += c[d - k] * IMat::Identity(d, d);
  }
  return c;
}

/// Irreducibility over Q of a monic integer polynomial with constant term
/// +-1 (the SL(d,Z) characteristic polynomial case), d <= 4.
inline bool is_irreducible(const std::vector<int64_t>& c) {
  const int d = static_cast<int>(c.size()) - 1;
  if (d <= 1) return d == 1;
  auto eval = [&](int64_t x) {
    int64_t acc = 0;
    for (int k = d; k >= 0; --k) acc = acc * x + c[k];
    return acc;
  };
  // Rational roots divide the constant term (+-1 here).
  if (eval(1) == 0 || eval(-1) == 0) return false;
  if (d <= 3) return true;  // no root => irreducible for degrees 2, 3
  if (d == 4) {
    // Quadratic factorizations (x^2 + a x + e1)(x^2 + b x + e2), e1 e2 = c0.
    for (int64_t e1 : {int64_t(1), int64_t(-1)}) {
      const int64_t e2 = c[0] / e1;
      if (e1 * e2 != c[0]) continue;
      // a + b = c3; e1 + e2 + a b = c2; a e2 + b e1 = c1.
      for (int64_t a = -std::abs(c[2]) - std::abs(c[3]) - 4;
           a <= std::abs(c[2]) + std::abs(c[3]) + 4; ++a) {
        const int64_t b = c[3] - a;
        if (e1 + e2 + a * b != c[2]) continue;
        if (a * e2 + b * e1 != c[1]) continue;
        return false;
      }
    }
    return true;
  }
  throw std::invalid_argument("is_irreducible: d <= 4 only");
}

/// A proper nonempty subset I of {0..d-1} with |sum_{i in I} lambda_i| <= tol,
/// if one exists (exhaustive over 2^d - 2 subsets).
inline std::optional<std::vector<int>> subset_sum_zero(const Vec& lambda, double tol) {
  const int d = static_cast<int>(lambda.size());
  for (unsigned mask = 1; mask + 1 < (1u << d); ++mask) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) s += lambda(i);
    if (std::abs(s) <= tol) {
      std::vector<int> subset;
      for (int i = 0; i < d; ++i)
        if (mask & (1u << i)) subset.push_back(i);
      return subset;
    }
  }
  return std::nullopt;
}

enum class TorusVerdict { compact, non_compact, not_loxodromic };

/// Compactness of the periodic A-orbit through the flat of gamma:
/// loxodromic (lambda in the open chamber) and char poly irreducible over Q.
inline TorusVerdict is_compact_torus(const IMat& gamma) {
  JordanData jd = jordan_projection(to_group_element(gamma));
  if (!jd.loxodromic) return TorusVerdict::not_loxodromic;
  return is_irreducible(char_poly(gamma)) ? TorusVerdict::compact : TorusVerdict::non_compact;
}

// ---------------------------------------------------------------------------
// Unit search and period lattices
// ---------------------------------------------------------------------------

/// Integer determinant of a small integer matrix (d <= 4), exact.
inline int64_t integer_det(const IMat& m) {
  const int d = static_cast<int>(m.rows());
  if (d == 1) return m(0, 0);
  int64_t acc = 0;
  for (int j = 0; j < d; ++j) {
    IMat minor(d - 1, d - 1);
    for (int r = 1; r < d; ++r) {
      int cc = 0;
      for (int c = 0; c < d; ++c)
        if (c != j) minor(r - 1, cc++) = m(r, c);
    }
    const int64_t cof = ((j % 2) ? -1 : 1) * integer_det(minor);
    acc += m(0, j) * cof;
  }
  return acc;
}

/// All u = sum_i c_i gamma^i, |c_i| <= coeff_bound, with det u = +-1 and u
/// not +-identity-torsion-trivial; these are norm-one units of the order
/// Z[gamma] realized as group elements commuting with gamma.
inline std::vector<IMat> unit_search(const IMat& gamma, int64_t coeff_bound) {
  const int d = static_cast<int>(gamma.rows());
  std::vector<IMat> powers;
  IMat p = IMat::Identity(d, d);
  for (int i = 0; i < d; ++i) {
    powers.push_back(p);
    p = (p * gamma).eval();
  }
  std::vector<IMat> out;
  std::vector<int64_t> c(d, -coeff_bound);
  for (;;) {
    IMat u = IMat::Zero(d, d);
    for (int i = 0; i < d; ++i) u += c[i] * powers[i];
    const int64_t det = integer_det(u);
    if (det == 1) {
      // For compact type the order is totally real, so its only torsion
      // units are +-identity; everything else is a genuine period.
      const bool is_torsion =
          (u == IMat::Identity(d, d)) || (u == IMat(-IMat::Identity(d, d)));
      if (!is_torsion) out.push_back(u);
    }
    int pos = 0;
    while (pos < d && c[pos] == coeff_bound) c[pos++] = -coeff_bound;
    if (pos == d) break;
    ++c[pos];
  }
  return out;
}

/// Rank-(d-1) lattice of period vectors in a, with a reduced basis.
struct PeriodLattice {
  std::vector<Vec> basis;  // 0 <= rank <= d-1 vectors in the sum-zero space

  int rank() const { return static_cast<int>(basis.size()); }

  double covolume() const {
    if (basis.empty()) return 0.0;
    Mat g(rank(), rank());
    for (int i = 0; i < rank(); ++i)
      for (int j = 0; j < rank(); ++j) g(i, j) = basis[i].dot(basis[j]);
    return std::sqrt(std::max(0.0, g.determinant()));
  }
};

namespace detail {

/// Reduce v against the current basis (nearest lattice point by rounded
/// least-squares coefficients); returns the remainder.
inline Vec lattice_reduce_vector(const std::vector<Vec>& basis, Vec v) {
  if (basis.empty()) return v;
  const int r = static_cast<int>(basis.size());
  Mat b(v.size(), r);
  for (int i = 0; i < r; ++i) b.col(i) = basis[i];
  for (int pass = 0; pass < 8; ++pass) {
    Vec coef = (b.transpose() * b).ldlt().solve(b.transpose() * v);
    bool moved = false;
    for (int i = 0; i < r; ++i) {
      const double q = std::round(coef(i));
      if (q != 0.0) {
        v -= q * basis[i];
        moved = true;
      }
    }
    if (!moved) break;
  }
  return v;
}

/// Smallest denominator q <= qmax with |q alpha - round(q alpha)| small;
/// returns 0 on failure.
inline int64_t rationalize(double alpha, int64_t qmax, double tol) {
  for (int64_t q = 1; q <= qmax; ++q) {
    if (std::abs(q * alpha - std::round(q * alpha)) <= tol * q) return q;
  }
  return 0;
}

/// Lagrange reduction of a real rank-2 basis.
inline void lagrange_reduce_real(Vec& b1, Vec& b2) {
  for (int guard = 0; guard < 256; ++guard) {
    if (b1.squaredNorm() > b2.squaredNorm()) b1.swap(b2);
    const double q = std::round(b1.dot(b2) / b1.squaredNorm());
    if (q == 0.0) break;
    b2 -= q * b1;
  }
}

/// Insert a vector into a real lattice basis (rank <= 2 suffices for d <= 3).
/// Handles refinement: when v is a rational non-integral combination of the
/// current basis, the basis is replaced by one for the denser lattice.
inline void lattice_insert(std::vector<Vec>& basis, Vec v, double tol) {
  v = lattice_reduce_vector(basis, v);
  if (v.norm() <= tol) return;
  if (basis.empty()) {
    basis.push_back(v);
    return;
  }
  if (basis.size() == 1) {
    const double alpha = v.dot(basis[0]) / basis[0].squaredNorm();
    Vec resid = v - alpha * basis[0];
    if (resid.norm() > tol) {
      basis.push_back(v);
      lagrange_reduce_real(basis[0], basis[1]);
      return;
    }
    // Collinear refinement: v = (p/q) b1 with gcd(p, q) = 1, so the joint
    // lattice is generated by b1 / q.
    const int64_t q = rationalize(alpha, 4096, 1e-7);
    if (q <= 1) return;  // q = 1 would have been reduced away; 0 = no refine
    const int64_t p = static_cast<int64_t>(std::llround(q * alpha));
    basis[0] *= static_cast<double>(std::gcd(std::abs(p), q)) / static_cast<double>(q);
    return;
  }
  // Rank 2: v lies in the plane of (b1, b2) up to tol (the Cartan space has
  // dimension 2 for d = 3); find its rational coordinates.
  Mat b(v.size(), 2);
  b.col(0) = basis[0];
  b.col(1) = basis[1];
  Vec alpha = (b.transpose() * b).ldlt().solve(b.transpose() * v);
  if ((v - b * alpha).norm() > 64 * tol)
    throw std::logic_error("lattice_insert: vector outside the rank-2 span");
  int64_t q = 0;
  for (int64_t qq = 1; qq <= 4096; ++qq) {
    if (std::abs(qq * alpha(0) - std::round(qq * alpha(0))) <= 1e-7 * qq &&
        std::abs(qq * alpha(1) - std::round(qq * alpha(1))) <= 1e-7 * qq) {
      q = qq;
      break;
    }
  }
  if (q <= 1) return;  // no refinement detected
  const int64_t p1 = static_cast<int64_t>(std::llround(q * alpha(0)));
  const int64_t p2 = static_cast<int64_t>(std::llround(q * alpha(1)));
  // New lattice in (b1, b2)-coordinates scaled by q: the integer lattice
  // generated by (q,0), (0,q), (p1,p2).  Reduce these rows to a 2D basis.
  std::vector<std::array<int64_t, 2>> rows{{q, 0}, {0, q}, {p1, p2}};
  // Column 1 Euclid.
  for (;;) {
    std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
      const int64_t ax = x[0] == 0 ? INT64_MAX : std::abs(x[0]);
      const int64_t ay = y[0] == 0 ? INT64_MAX : std::abs(y[0]);
      return ax < ay;
    });
    if (rows[1][0] == 0) break;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i][0] == 0) continue;
      const int64_t f = rows[i][0] / rows[0][0];
      rows[i][0] -= f * rows[0][0];
      rows[i][1] -= f * rows[0][1];
    }
  }
  // rows[0] is the x-pivot; combine the x == 0 rows by gcd in y.
  int64_t gy = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) gy = std::gcd(gy, std::abs(rows[i][1]));
  Vec nb1 = (rows[0][0] * basis[0] + rows[0][1] * basis[1]) / static_cast<double>(q);
  Vec nb2 = (gy * basis[1]) / static_cast<double>(q);
  if (nb2.norm() <= tol) throw std::logic_error("lattice_insert: degenerate refinement");
  lagrange_reduce_real(nb1, nb2);
  basis[0] = nb1;
  basis[1] = nb2;
}

}  // namespace detail

/// The lambda-logarithm image of a unit u in the coherent eigenbasis of
/// gamma: the vector (log |eigenvalue of u on the j-th eigenvector of
/// gamma|), eigenvectors of gamma ordered by decreasing eigenvalue modulus.
inline Vec unit_log_vector(const IMat& gamma, const IMat& u) {
  const int d = static_cast<int>(gamma.rows());
  Eigen::EigenSolver<Mat> es(gamma.cast<double>());
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(j));
  });
  Vec out(d);
  const Mat ud = u.cast<double>();
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXcd v = es.eigenvectors().col(order[j]);
    Eigen::VectorXcd uv = ud * v;
    // u commutes with gamma, so v is an eigenvector of u as well.
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    out(j) = std::log(std::abs(uv(imax) / v(imax)));
  }
  return project_to_cartan(out);
}

struct PeriodResult {
  PeriodLattice lattice;
  bool stabilized = false;
};

/// Period lattice of the torus of gamma: the log-images of the units found
/// at coeff_bound; stabilized iff doubling the bound yields the same lattice.
inline PeriodResult period_lattice(const IMat& gamma, int64_t coeff_bound) {
  auto build = [&](int64_t bound) {
    PeriodLattice lat;
    for (const IMat& u : unit_search(gamma, bound))
      detail::lattice_insert(lat.basis, unit_log_vector(gamma, u), 1e-7);
    return lat;
  };
  PeriodResult res;
  res.lattice = build(coeff_bound);
  PeriodLattice twice = build(2 * coeff_bound);
  res.stabilized = res.lattice.rank() == twice.rank();
  if (res.stabilized) {
    for (const Vec& v : twice.basis)
      if (detail::lattice_reduce_vector(res.lattice.basis, v).norm() > 1e-6)
        res.stabilized = false;
  }
  res.lattice = twice;  // the larger search can only refine the lattice
  return res;
}

inline double vol_a_torus(const PeriodLattice& lat) { return lat.covolume(); }

/// Number of period vectors in the open chamber interior with norm <= T.
inline std::size_t count_regular_periods(const PeriodLattice& lat, double T) {
  if (lat.rank() == 0) return 0;
  std::size_t count = 0;
  if (lat.rank() == 1) {
    const Vec& b = lat.basis[0];
    const auto kmax = static_cast<int64_t>(std::floor(T / b.norm() + 1e-9));
    for (int64_t k = 1; k <= kmax; ++k) {
      if (in_open_chamber(k * b) || in_open_chamber(-k * b)) ++count;
    }
    return count;
  }
  if (lat.rank() != 2) throw std::invalid_argument("count_regular_periods: rank <= 2");
  const Vec &b1 = lat.basis[0], &b2 = lat.basis[1];
  const double a = b1.squaredNorm(), b = b1.dot(b2), c = b2.squaredNorm();
  const double cperp = c - b * b / a;
  const auto m2max = static_cast<int64_t>(std::floor(T / std::sqrt(cperp) + 1.0));
  for (int64_t m2 = -m2max; m2 <= m2max; ++m2) {
    const double lc = c * m2 * m2 - T * T;
    const double disc = b * b * m2 * m2 - a * lc;
    if (disc < 0) continue;
    const auto lo = static_cast<int64_t>(std::ceil((-b * m2 - std::sqrt(disc)) / a - 1e-9));
    const auto hi = static_cast<int64_t>(std::floor((-b * m2 + std::sqrt(disc)) / a + 1e-9));
    for (int64_t m1 = lo; m1 <= hi; ++m1) {
      if (m1 == 0 && m2 == 0) continue;
      Vec v = m1 * b1 + m2 * b2;
      if (v.norm() <= T + 1e-9 && in_open_chamber(v)) ++count;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Class census
// ---------------------------------------------------------------------------

struct TorusRecord {
  int d = 2;
  IMat repr;
  std::vector<int64_t> charpoly;
  int64_t disc = 0;
  Vec lambda;
  PeriodLattice periods;
  double vol_a = 0.0;
  bool stabilized = false;
  std::string class_key;
};

struct CensusOptions {
  int64_t unit_coeff_bound = 12;
  int64_t conjugator_entry_bound = 50;
};

namespace detail {

/// Integer kernel basis of an n x n integer matrix by fraction-free
/// (Bareiss-flavored) elimination; returned vectors are integer and
/// gcd-normalized but not necessarily a saturated basis.
inline std::vector<Eigen::Matrix<int64_t, Eigen::Dynamic, 1>> integer_kernel(
    Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic> m) {
  using IVec = Eigen::Matrix<int64_t, Eigen::Dynamic, 1>;
  const int n = static_cast<int>(m.cols());
  const int rows = static_cast<int>(m.rows());
  std::vector<int> pivot_col;
  int r = 0;
  for (int col = 0; col < n && r < rows; ++col) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (m(i, col) != 0 && (piv < 0 || std::abs(m(i, col)) < std::abs(m(piv, col)))) piv = i;
    if (piv < 0) continue;
    m.row(r).swap(m.row(piv));
    for (int i = 0; i < rows; ++i) {
      if (i == r || m(i, col) == 0) continue;
      const int64_t g = std::gcd(std::abs(m(i, col)), std::abs(m(r, col)));
      const int64_t fi = m(r, col) / g, fr = m(i, col) / g;
      m.row(i) = fi * m.row(i) - fr * m.row(r);
      const int64_t rg = m.row(i).cwiseAbs().maxCoeff() == 0
                             ? 1
                             : [&] {
                                 int64_t acc = 0;
                                 for (int j = 0; j < n; ++j)
                                   acc = std::gcd(acc, std::abs(m(i, j)));
                                 return acc == 0 ? int64_t(1) : acc;
                               }();
      m.row(i) /= rg;
    }
    pivot_col.push_back(col);
    ++r;
  }
  std::vector<IVec> kernel;
  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col) is_pivot[c] = true;
  for (int free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    // Back-substitute with a common denominator kept integral.
    IVec v = IVec::Zero(n);
    v(free) = 1;
    for (int i = r - 1; i >= 0; --i) {
      const int pc = pivot_col[i];
      int64_t num = 0;
      for (int j = pc + 1; j < n; ++j) num += m(i, j) * v(j);
      const int64_t den = m(i, pc);
      if (num % den != 0) {
        const int64_t g = std::gcd(std::abs(num), std::abs(den));
        const int64_t scale = std::abs(den / g);
        v *= scale;
        num *= scale;
      }
      v(pc) = -num / den;
    }
    int64_t g = 0;
    for (int j = 0; j < n; ++j) g = std::gcd(g, std::abs(v(j)));
    if (g > 1) v /= g;
    kernel.push_back(v);
  }
  return kernel;
}

/// Bounded search for h in GL(d,Z), |h_ij| <= bound, |det h| = 1, with
/// h g1 = g2 h.  Sound but only complete up to the bound (and up to kernel
/// saturation), which is the documented census honesty margin.
inline bool bounded_conjugate(const IMat& g1, const IMat& g2, int64_t bound) {
  const int d = static_cast<int>(g1.rows());
  const int n = d * d;
  Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic> sys =
      Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  // Equation (i,j): sum_k h_ik g1_kj - g2_ik h_kj = 0; unknown index k*d+l.
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const int row = i * d + j;
      for (int k = 0; k < d; ++k) {
        sys(row, i * d + k) += g1(k, j);
        sys(row, k * d + j) -= g2(i, k);
      }
    }
  auto kernel = integer_kernel(sys);
  if (kernel.empty()) return false;
  const int kr = static_cast<int>(kernel.size());
  // Small integer combinations of the kernel vectors (and /s refinements).
  const int64_t cmax = 6;
  std::vector<int64_t> c(kr, -cmax);
  for (;;) {
    Eigen::Matrix<int64_t, Eigen::Dynamic, 1> v =
        Eigen::Matrix<int64_t, Eigen::Dynamic, 1>::Zero(n);
    for (int i = 0; i < kr; ++i) v += c[i] * kernel[i];
    for (int64_t s = 1; s <= 6; ++s) {
      bool integral = true;
      for (int j = 0; j < n && integral; ++j) integral = (v(j) % s) == 0;
      if (!integral) continue;
      IMat h(d, d);
      bool within = true;
      for (int j = 0; j < n; ++j) {
        h(j / d, j % d) = v(j) / s;
        if (std::abs(v(j) / s) > bound) within = false;
      }
      if (!within) continue;
      const int64_t det = integer_det(h);
      if (det == 1 || det == -1) return true;
    }
    int pos = 0;
    while (pos < kr && c[pos] == cmax) c[pos++] = -cmax;
    if (pos == kr) break;
    ++c[pos];
  }
  return false;
}

}  // namespace detail

/// d=2 census: exact class list via reduced-form cycles per trace, with
/// exact Pell-unit volumes on the reduced discriminant of each class form.
inline std::vector<TorusRecord> class_census2(double T, const CensusOptions& opt = {}) {
  std::vector<TorusRecord> out;
  for (int64_t t = 3;; ++t) {
    const double eps = (t + std::sqrt(static_cast<double>(t * t - 4))) / 2.0;
    const double lam_norm = std::sqrt(2.0) * std::log(eps);
    if (lam_norm > T + 1e-12) break;
    const int64_t D = t * t - 4;
    for (const auto& cycle : form_class_cycles(D)) {
      const QuadForm& f = *std::min_element(cycle.begin(), cycle.end());
      TorusRecord rec;
      rec.d = 2;
      rec.repr = form_matrix(f, t);
      rec.charpoly = char_poly(rec.repr);
      rec.disc = D;
      rec.lambda = Vec(2);
      rec.lambda << std::log(eps), -std::log(eps);
      // Stabilizer = norm-one units of the multiplier ring, whose
      // discriminant is the reduced discriminant of the class form.
      const int64_t content = f.content();
      const int64_t dred = D / (content * content);
      PellUnit fu = fundamental_unit_from(dred, t, content);
      const double ell0 = std::sqrt(2.0) * fu.log_value();
      Vec gen(2);
      gen << fu.log_value(), -fu.log_value();
      rec.periods.basis = {gen};
      rec.vol_a = ell0;
      rec.stabilized = true;  // exact Pell computation
      std::ostringstream key;
      key << "d2:t=" << t << ":form=(" << f.a << "," << f.b << "," << f.c << ")";
      rec.class_key = key.str();
      if (rec.lambda.norm() <= T + 1e-12) out.push_back(std::move(rec));
      (void)opt;
    }
  }
  return out;
}

namespace detail {

/// Real roots of x^3 + c2 x^2 + c1 x + c0 when all three are real
/// (discriminant > 0), by the trigonometric method; unordered.
inline std::array<double, 3> cubic_real_roots(double c0, double c1, double c2) {
  const double p = c1 - c2 * c2 / 3.0;
  const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  const double m = 2.0 * std::sqrt(std::max(-p / 3.0, 0.0));
  double arg = (3.0 * q) / (p * m);
  arg = std::clamp(arg, -1.0, 1.0);
  const double phi = std::acos(arg) / 3.0;
  std::array<double, 3> out;
  for (int k = 0; k < 3; ++k)
    out[k] = m * std::cos(phi - 2.0 * M_PI * k / 3.0) - c2 / 3.0;
  return out;
}

/// Greedy conjugation descent: conjugate by elementary matrices E_ij(+-1)
/// while the Frobenius norm strictly decreases.  Elements of one conjugacy
/// class tend to a small set of minimal forms, which makes the expensive
/// conjugator search run on few candidates.
inline void minimize_by_conjugation(Eigen::Matrix<int64_t, 3, 3>& m) {
  for (int guard = 0; guard < 256; ++guard) {
    int64_t best = m.squaredNorm();
    Eigen::Matrix<int64_t, 3, 3> best_m = m;
    bool improved = false;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        for (int64_t s : {int64_t(1), int64_t(-1)}) {
          Eigen::Matrix<int64_t, 3, 3> e = Eigen::Matrix<int64_t, 3, 3>::Identity();
          Eigen::Matrix<int64_t, 3, 3> ei = e;
          e(i, j) = s;
          ei(i, j) = -s;
          Eigen::Matrix<int64_t, 3, 3> cand = e * m * ei;
          if (cand.squaredNorm() < best) {
            best = cand.squaredNorm();
            best_m = cand;
            improved = true;
          }
        }
      }
    if (!improved) break;
    m = best_m;
  }
}

}  // namespace detail

/// d=3 census: stream the Cartan ball of radius T, keep compact-type
/// loxodromics with ||lambda|| <= T (cheap exact integer filters first),
/// bucket by exact characteristic polynomial, canonicalize by greedy
/// conjugation descent, and deduplicate the few distinct minimal forms by
/// bounded conjugator search.  The class list is bound-qualified: complete
/// only for classes with a representative in the ball, and dedup is complete
/// only up to the conjugator bound (an upper-bound census).
inline std::vector<TorusRecord> class_census3(double T, const CensusOptions& opt = {}) {
  std::map<std::vector<int64_t>, std::set<std::array<int64_t, 9>>> buckets;
  for_each_in_ball3(T, EnumOptions{}, [&](const Eigen::Matrix<int64_t, 3, 3>& m, const Vec&) {
    // Exact integer characteristic polynomial x^3 + c2 x^2 + c1 x + c0.
    const int64_t c2 = -(m(0, 0) + m(1, 1) + m(2, 2));
    const int64_t c1 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                       m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const int64_t c0 = -1;  // det = 1 structurally
    // Irreducible over Q <=> no root at +-1.
    if (1 + c2 + c1 + c0 == 0 || -1 + c2 - c1 + c0 == 0) return;
    // Totally real (needed for three real eigenvalues): disc > 0.
    const int64_t disc = 18 * c2 * c1 * c0 - 4 * c2 * c2 * c2 * c0 + c2 * c2 * c1 * c1 -
                         4 * c1 * c1 * c1 - 27 * c0 * c0;
    if (disc <= 0) return;
    auto roots = detail::cubic_real_roots(static_cast<double>(c0), static_cast<double>(c1),
                                          static_cast<double>(c2));
    Vec lam(3);
    for (int i = 0; i < 3; ++i) lam(i) = std::log(std::abs(roots[i]));
    std::sort(lam.data(), lam.data() + 3, std::greater<double>());
    lam = project_to_cartan(lam);
    if (!in_open_chamber(lam, 1e-9)) return;  // loxodromic: distinct moduli
    if (lam.norm() > T + 1e-9) return;
    Eigen::Matrix<int64_t, 3, 3> mm = m;
    detail::minimize_by_conjugation(mm);
    std::array<int64_t, 9> key;
    for (int i = 0; i < 9; ++i) key[i] = mm(i / 3, i % 3);
    buckets[{c0, c1, c2, 1}].insert(key);
  });
  std::vector<TorusRecord> out;
  for (auto& [cp, forms] : buckets) {
    std::vector<IMat> reps;
    for (const auto& key : forms) {
      IMat m(3, 3);
      for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = key[i];
      bool known = false;
      for (const IMat& r : reps)
        if (detail::bounded_conjugate(r, m, opt.conjugator_entry_bound)) {
          known = true;
          break;
        }
      if (!known) reps.push_back(m);
    }
    int idx = 0;
    for (const IMat& r : reps) {
      TorusRecord rec;
      rec.d = 3;
      rec.repr = r;
      rec.charpoly = cp;
      // Discriminant of the cubic x^3 + c2 x^2 + c1 x + c0.
      const int64_t c2 = cp[2], c1 = cp[1], c0 = cp[0];
      rec.disc = 18 * c2 * c1 * c0 - 4 * c2 * c2 * c2 * c0 + c2 * c2 * c1 * c1 -
                 4 * c1 * c1 * c1 - 27 * c0 * c0;
      rec.lambda = jordan_projection(to_group_element(r)).lambda;
      PeriodResult pr = period_lattice(r, opt.unit_coeff_bound);
      rec.periods = pr.lattice;
      rec.stabilized = pr.stabilized;
      rec.vol_a = vol_a_torus(pr.lattice);
      std::ostringstream key;
      key << "d3:cp=(" << cp[0] << "," << cp[1] << "," << cp[2] << "):rep=" << idx++;
      rec.class_key = key.str();
      out.push_back(std::move(rec));
    }
  }
  return out;
}

inline std::vector<TorusRecord> class_census(int d, double T, const CensusOptions& opt = {}) {
  if (d == 2) return class_census2(T, opt);
  if (d == 3) return class_census3(T, opt);
  throw std::invalid_argument("class_census: d must be 2 or 3");
}

}  // namespace flattori

#endif
