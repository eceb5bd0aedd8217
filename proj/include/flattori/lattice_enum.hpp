#ifndef FLATTORI_LATTICE_ENUM_HPP
#define FLATTORI_LATTICE_ENUM_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "flattori/decompositions.hpp"

namespace flattori {

using std::int64_t;

/// Exact-integer group element (entries of an SL(d,Z) matrix).
inline GroupElement to_group_element(const IMat& m) {
  return GroupElement(m.cast<double>());
}

inline Vec cartan_of_integer(const IMat& m) { return cartan_projection(to_group_element(m)); }

/// max over { v in a : ||v|| <= t } of sum_i exp(2 v_i).  This caps both the
/// Frobenius norm squared of g and of Lambda^2 g over the Cartan ball, which
/// drives the integer search bounds.
inline double frobenius_cap(int d, double t) {
  if (d == 2) return 2.0 * std::cosh(std::sqrt(2.0) * t);
  // Maximize over the unit circle of the sum-zero plane (d = 3), dense scan
  // plus ternary refinement.
  auto value = [&](double phi) {
    double c = std::cos(phi), s = std::sin(phi);
    // Orthonormal basis of the sum-zero plane.
    double b1[3] = {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0};
    double b2[3] = {1.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0), -2.0 / std::sqrt(6.0)};
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) acc += std::exp(2.0 * t * (c * b1[i] + s * b2[i]));
    return acc;
  };
  double best_phi = 0.0, best = -1.0;
  const int n = 4096;
  for (int i = 0; i < n; ++i) {
    double phi = 2.0 * M_PI * i / n;
    double v = value(phi);
    if (v > best) {
      best = v;
      best_phi = phi;
    }
  }
  double lo = best_phi - 2.0 * M_PI / n, hi = best_phi + 2.0 * M_PI / n;
  for (int it = 0; it < 200; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (value(m1) < value(m2))
      lo = m1;
    else
      hi = m2;
  }
  return std::max(best, value(0.5 * (lo + hi))) * (1.0 + 1e-12);
}

struct EnumOptions {
  /// Optional basepoint h (the ball is measured with a_x, x = hK).
  std::optional<GroupElement> basepoint;
  int shard_index = 0;
  int shard_count = 1;
};

namespace detail {

inline void ext_gcd(int64_t a, int64_t b, int64_t& x, int64_t& y) {
  if (b == 0) {
    x = (a >= 0) ? 1 : -1;
    y = 0;
    return;
  }
  int64_t x1, y1;
  ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
}

using I3 = Eigen::Matrix<int64_t, 3, 1>;
using IM3 = Eigen::Matrix<int64_t, 3, 3>;
using IM2 = Eigen::Matrix<int64_t, 2, 2>;

inline I3 cross3(const I3& a, const I3& b) {
  I3 c;
  c << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
  return c;
}

inline int64_t gcd3(const I3& v) {
  return std::gcd(std::gcd(std::abs(v(0)), std::abs(v(1))), std::abs(v(2)));
}

/// Unimodular E (det +1) with E c = gcd(c) * e1, by integer row reduction.
inline IM3 column_reduction(I3 v) {
  IM3 e = IM3::Identity();
  int sign = 1;
  for (;;) {
    int piv = -1;
    for (int i = 0; i < 3; ++i)
      if (v(i) != 0 && (piv < 0 || std::abs(v(i)) < std::abs(v(piv)))) piv = i;
    bool done = true;
    for (int i = 0; i < 3; ++i)
      if (i != piv && v(i) != 0) {
        int64_t q = v(i) / v(piv);
        v(i) -= q * v(piv);
        e.row(i) -= q * e.row(piv);
        done = false;
      }
    if (done) {
      if (piv != 0) {
        v.row(0).swap(v.row(piv));
        e.row(0).swap(e.row(piv));
        sign = -sign;
      }
      if (v(0) < 0) {
        v(0) = -v(0);
        e.row(0) *= -1;
        sign = -sign;
      }
      if (sign < 0) e.row(1) *= -1;  // restore det +1 without touching E c = g e1
      return e;
    }
  }
}

/// Exact inverse of a unimodular (det +-1) integer 3x3 matrix via adjugate.
inline IM3 unimodular_inverse(const IM3& m) {
  IM3 adj;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int64_t a = m((j + 1) % 3, (i + 1) % 3), b = m((j + 1) % 3, (i + 2) % 3);
      int64_t c = m((j + 2) % 3, (i + 1) % 3), dd = m((j + 2) % 3, (i + 2) % 3);
      adj(i, j) = a * dd - b * c;
    }
  int64_t det = m(0, 0) * adj(0, 0) + m(0, 1) * adj(1, 0) + m(0, 2) * adj(2, 0);
  return (det == 1) ? adj : IM3(-adj);
}

/// Lagrange reduction of a rank-2 lattice basis in Z^3; T maps reduced
/// coordinates to original ones: (old1, old2) = (new1, new2) * T^T.
inline void lagrange_reduce(I3& b1, I3& b2, IM2& t) {
  t = IM2::Identity();
  for (int guard = 0; guard < 256; ++guard) {
    if (b1.squaredNorm() > b2.squaredNorm()) {
      b1.swap(b2);
      t.col(0).swap(t.col(1));
    }
    int64_t num = b1.dot(b2), den = b1.squaredNorm();
    int64_t q = static_cast<int64_t>(std::llround(static_cast<double>(num) / den));
    if (q == 0) break;
    b2 -= q * b1;
    t.col(1) -= q * t.col(0);
  }
}

/// Enumerate integer (m1, m2) with || p + m1 b1 + m2 b2 ||^2 <= r2.
template <typename F>
void ellipse_enumerate(const I3& p, const I3& b1, const I3& b2, double r2, F&& fn) {
  const double a = static_cast<double>(b1.squaredNorm());
  const double b = static_cast<double>(b1.dot(b2));
  const double c = static_cast<double>(b2.squaredNorm());
  const double d1 = static_cast<double>(p.dot(b1));
  const double d2 = static_cast<double>(p.dot(b2));
  const double pp = static_cast<double>(p.squaredNorm());
  const double cperp = c - b * b / a;  // > 0 for independent b1, b2
  // Range of m2 from the profile min over real m1.
  const double qa = cperp;
  const double qb = d2 - b * d1 / a;
  const double qc = pp - d1 * d1 / a - r2;
  const double disc2 = qb * qb - qa * qc;
  if (disc2 < 0) return;
  const int64_t lo2 = static_cast<int64_t>(std::ceil((-qb - std::sqrt(disc2)) / qa - 1e-9));
  const int64_t hi2 = static_cast<int64_t>(std::floor((-qb + std::sqrt(disc2)) / qa + 1e-9));
  for (int64_t m2 = lo2; m2 <= hi2; ++m2) {
    const double lb = b * m2 + d1;
    const double lc = c * m2 * m2 + 2.0 * d2 * m2 + pp - r2;
    const double disc1 = lb * lb - a * lc;
    if (disc1 < 0) continue;
    const int64_t lo1 = static_cast<int64_t>(std::ceil((-lb - std::sqrt(disc1)) / a - 1e-9));
    const int64_t hi1 = static_cast<int64_t>(std::floor((-lb + std::sqrt(disc1)) / a + 1e-9));
    for (int64_t m1 = lo1; m1 <= hi1; ++m1) fn(m1, m2);
  }
}

/// Eigenvalues of a symmetric positive-definite 3x3 matrix, descending, via
/// the trigonometric closed form (much faster than an SVD in hot loops).
inline Eigen::Vector3d sym3_eigenvalues(const Eigen::Matrix3d& s) {
  const double q = s.trace() / 3.0;
  Eigen::Matrix3d b = s - q * Eigen::Matrix3d::Identity();
  const double p2 = (b * b).trace() / 6.0;
  const double p = std::sqrt(std::max(p2, 0.0));
  Eigen::Vector3d out;
  if (p < 1e-300) {
    out.setConstant(q);
    return out;
  }
  double r = b.determinant() / (2.0 * p * p * p);
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  out(0) = q + 2.0 * p * std::cos(phi);
  out(2) = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  out(1) = 3.0 * q - out(0) - out(2);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// d = 2 enumeration
// ---------------------------------------------------------------------------

/// Cartan vector of a real 2x2 determinant-one matrix in closed form: the
/// singular values solve s^2 + 1/s^2 = ||m||_F^2.
inline Vec cartan2_closed_form(double frob2) {
  const double s1sq = 0.5 * (frob2 + std::sqrt(std::max(0.0, frob2 * frob2 - 4.0)));
  const double alpha = 0.5 * std::log(s1sq);
  Vec a(2);
  a << alpha, -alpha;
  return a;
}

/// Streaming enumeration of { gamma in SL(2,Z) : || a_x(gamma) || <= t }.
/// Exact: for d = 2 the predicate ||a|| <= t is equivalent to the integer
/// Frobenius condition ||gamma||_F^2 <= 2 cosh(sqrt2 t).  The callback
/// receives the entries (a, b, c, d); no per-element allocation.
template <typename F>
void for_each_in_ball2(double t, const EnumOptions& opt, F&& fn) {
  double t_search = t;
  Eigen::Matrix2d hi;  // h^{-1} for the basepoint filter
  if (opt.basepoint) {
    t_search = t + 2.0 * symmetric_space_distance(GroupElement(Mat::Identity(2, 2)),
                                                  *opt.basepoint);
    hi = opt.basepoint->inverse().m.topLeftCorner<2, 2>();
  }
  const double fmax = frobenius_cap(2, t_search);
  const double row_bound = fmax - 1.0;  // other row contributes >= 1
  const int64_t amax = static_cast<int64_t>(std::floor(std::sqrt(row_bound)));
  const Eigen::Matrix2d h =
      opt.basepoint ? Eigen::Matrix2d(opt.basepoint->m.topLeftCorner<2, 2>())
                    : Eigen::Matrix2d(Eigen::Matrix2d::Identity());
  int64_t pair_counter = 0;
  for (int64_t a = -amax; a <= amax; ++a) {
    for (int64_t b = -amax; b <= amax; ++b) {
      if (a * a + b * b > row_bound || (a == 0 && b == 0)) continue;
      if (std::gcd(std::abs(a), std::abs(b)) != 1) continue;
      if ((pair_counter++ % opt.shard_count) != opt.shard_index) continue;
      // Particular solution of a d0 - b c0 = 1 and the solution line.
      int64_t x, y;
      detail::ext_gcd(a, b, x, y);  // a x + b y = 1
      const int64_t c0 = -y, d0 = x;
      // (c, d) = (c0 + k a, d0 + k b); Frobenius condition is quadratic in k.
      const double ab2 = static_cast<double>(a * a + b * b);
      const double lin = static_cast<double>(a * c0 + b * d0);
      const double cst = static_cast<double>(c0 * c0 + d0 * d0) - (fmax - ab2);
      const double disc = lin * lin - ab2 * cst;
      if (disc < 0) continue;
      const int64_t klo = static_cast<int64_t>(std::ceil((-lin - std::sqrt(disc)) / ab2 - 1e-9));
      const int64_t khi = static_cast<int64_t>(std::floor((-lin + std::sqrt(disc)) / ab2 + 1e-9));
      for (int64_t k = klo; k <= khi; ++k) {
        const int64_t c = c0 + k * a, d = d0 + k * b;
        if (static_cast<double>(a * a + b * b + c * c + d * d) > fmax * (1.0 + 1e-12)) continue;
        if (opt.basepoint) {
          Eigen::Matrix2d gm;
          gm << static_cast<double>(a), static_cast<double>(b), static_cast<double>(c),
              static_cast<double>(d);
          const Eigen::Matrix2d conj = hi * gm * h;
          if (cartan2_closed_form(conj.squaredNorm()).norm() > t + 1e-9) continue;
        }
        fn(a, b, c, d);
      }
    }
  }
}

/// Materialized version (use only at radii where the ball fits in memory).
inline std::vector<IMat> enumerate_ball2(double t, const EnumOptions& opt = {}) {
  std::vector<IMat> out;
  for_each_in_ball2(t, opt, [&](int64_t a, int64_t b, int64_t c, int64_t d) {
    IMat m(2, 2);
    m << a, b, c, d;
    out.push_back(std::move(m));
  });
  std::sort(out.begin(), out.end(), [](const IMat& u, const IMat& v) {
    for (int i = 0; i < 4; ++i) {
      if (u(i / 2, i % 2) != v(i / 2, i % 2)) return u(i / 2, i % 2) < v(i / 2, i % 2);
    }
    return false;
  });
  return out;
}

// ---------------------------------------------------------------------------
// d = 3 enumeration
// ---------------------------------------------------------------------------

/// Streaming enumeration of { gamma in SL(3,Z) : || a_x(gamma) || <= t }.
/// Row-based search: row 1 over primitive vectors in a ball, row 2 through a
/// cylinder around row 1 (the cross product is bounded by the Lambda^2
/// Frobenius cap), row 3 over the affine solution lattice of det = 1; exact
/// SVD filter at the end.  The callback receives the integer matrix and its
/// Cartan vector a_x(gamma).
template <typename F>
void for_each_in_ball3(double t, const EnumOptions& opt, F&& fn) {
  using detail::I3;
  using detail::IM2;
  using detail::IM3;
  double t_search = t;
  Mat hmat, himat;
  if (opt.basepoint) {
    t_search = t + 2.0 * symmetric_space_distance(GroupElement(Mat::Identity(3, 3)),
                                                  *opt.basepoint);
    hmat = opt.basepoint->m;
    himat = opt.basepoint->inverse().m;
  }
  const double bf2 = frobenius_cap(3, t_search);
  const double row1_bound = bf2 - 2.0;
  const int64_t rmax = static_cast<int64_t>(std::floor(std::sqrt(row1_bound)));
  std::vector<std::pair<int64_t, I3>> r3list;  // (norm^2, r3), sorted
  int64_t r1_counter = 0;
  I3 r1;
  for (int64_t x = -rmax; x <= rmax; ++x)
    for (int64_t y = -rmax; y <= rmax; ++y)
      for (int64_t z = -rmax; z <= rmax; ++z) {
        r1 << x, y, z;
        const int64_t n1 = r1.squaredNorm();
        if (n1 == 0 || static_cast<double>(n1) > row1_bound) continue;
        if (detail::gcd3(r1) != 1) continue;
        if ((r1_counter++ % opt.shard_count) != opt.shard_index) continue;
        const IM3 e1m = detail::column_reduction(r1);
        const IM3 v = detail::unimodular_inverse(e1m);
        const I3 u2 = v.col(1), u3 = v.col(2);
        I3 w2 = detail::cross3(r1, u2), w3 = detail::cross3(r1, u3);
        IM2 tw;
        detail::lagrange_reduce(w2, w3, tw);
        // (beta, gamma) in reduced coords; cross c = beta' w2 + gamma' w3.
        detail::ellipse_enumerate(
            I3(I3::Zero()), w2, w3, bf2 - 2.0, [&](int64_t bb, int64_t gg) {
              if (bb == 0 && gg == 0) return;
              const I3 c = bb * w2 + gg * w3;
              if (detail::gcd3(c) != 1) return;
              const int64_t beta = tw(0, 0) * bb + tw(0, 1) * gg;
              const int64_t gamma = tw(1, 0) * bb + tw(1, 1) * gg;
              // det = <c, r3> = 1 solution lattice.
              const IM3 e2m = detail::column_reduction(c);
              I3 p = e2m.row(0), h1 = e2m.row(1), h2 = e2m.row(2);
              IM2 th;
              detail::lagrange_reduce(h1, h2, th);
              const double r3_bound = bf2 - static_cast<double>(n1) - 1.0;
              if (r3_bound < 1.0) return;
              r3list.clear();
              detail::ellipse_enumerate(p, h1, h2, r3_bound, [&](int64_t m1, int64_t m2) {
                const I3 r3 = p + m1 * h1 + m2 * h2;
                r3list.emplace_back(r3.squaredNorm(), r3);
              });
              if (r3list.empty()) return;
              std::sort(r3list.begin(), r3list.end(),
                        [](const auto& u, const auto& w) { return u.first < w.first; });
              // alpha range: || alpha r1 + base ||^2 <= bf2 - n1 - 1.
              const I3 base = beta * u2 + gamma * u3;
              const double qa = static_cast<double>(n1);
              const double qb = static_cast<double>(r1.dot(base));
              const double qc =
                  static_cast<double>(base.squaredNorm()) - (bf2 - static_cast<double>(n1) - 1.0);
              const double disc = qb * qb - qa * qc;
              if (disc < 0) return;
              const int64_t alo =
                  static_cast<int64_t>(std::ceil((-qb - std::sqrt(disc)) / qa - 1e-9));
              const int64_t ahi =
                  static_cast<int64_t>(std::floor((-qb + std::sqrt(disc)) / qa + 1e-9));
              const int64_t cn = c.squaredNorm();
              for (int64_t alpha = alo; alpha <= ahi; ++alpha) {
                const I3 r2 = alpha * r1 + base;
                const int64_t n2 = r2.squaredNorm();
                const double rem = bf2 - static_cast<double>(n1 + n2);
                for (const auto& [n3, r3] : r3list) {
                  if (static_cast<double>(n3) > rem) break;
                  // Lambda^2 Frobenius prune on the three row crosses.
                  const int64_t cr23 = detail::cross3(r2, r3).squaredNorm();
                  if (static_cast<double>(cn + cr23) > bf2) continue;
                  const int64_t cr31 = detail::cross3(r3, r1).squaredNorm();
                  if (static_cast<double>(cn + cr23 + cr31) > bf2) continue;
                  IM3 m;
                  m.row(0) = r1.transpose();
                  m.row(1) = r2.transpose();
                  m.row(2) = r3.transpose();
                  Eigen::Matrix3d md = m.cast<double>();
                  if (opt.basepoint) md = himat * md * hmat;
                  const Eigen::Vector3d ev = detail::sym3_eigenvalues(md.transpose() * md);
                  Vec a(3);
                  for (int i = 0; i < 3; ++i) a(i) = 0.5 * std::log(std::max(ev(i), 1e-300));
                  a = project_to_cartan(a);
                  if (a.norm() <= t + 1e-9) fn(m, a);
                }
              }
            });
      }
}

/// Materialized version (use only at radii where the ball fits in memory).
inline std::vector<IMat> enumerate_ball3(double t, const EnumOptions& opt = {}) {
  std::vector<IMat> out;
  for_each_in_ball3(t, opt, [&](const detail::IM3& m, const Vec&) {
    IMat mm(3, 3);
    mm = m.cast<int64_t>();
    out.push_back(std::move(mm));
  });
  std::sort(out.begin(), out.end(), [](const IMat& u, const IMat& v) {
    for (int i = 0; i < 9; ++i) {
      if (u(i / 3, i % 3) != v(i / 3, i % 3)) return u(i / 3, i % 3) < v(i / 3, i % 3);
    }
    return false;
  });
  return out;
}

inline std::vector<IMat> enumerate_ball(int d, double t, const EnumOptions& opt = {}) {
  if (d == 2) return enumerate_ball2(t, opt);
  if (d == 3) return enumerate_ball3(t, opt);
  throw std::invalid_argument("enumerate_ball: d must be 2 or 3");
}

/// Reference implementation: entrywise box scan with determinant and SVD
/// filters.  Exponentially slower; used as the correctness oracle in tests.
inline std::vector<IMat> enumerate_ball_bruteforce(int d, double t) {
  const double bf2 = frobenius_cap(d, t);
  const int64_t emax = static_cast<int64_t>(std::floor(std::sqrt(bf2 - (d - 1.0))));
  std::vector<IMat> out;
  IMat m(d, d);
  std::function<void(int, int64_t)> rec = [&](int pos, int64_t norm_acc) {
    if (static_cast<double>(norm_acc) > bf2) return;
    if (pos == d * d) {
      const double det = m.cast<double>().determinant();
      if (std::llround(det) != 1 || std::abs(det - 1.0) > 0.25) return;
      if (cartan_of_integer(m).norm() <= t + 1e-9) out.push_back(m);
      return;
    }
    for (int64_t v = -emax; v <= emax; ++v) {
      m(pos / d, pos % d) = v;
      rec(pos + 1, norm_acc + v * v);
    }
  };
  rec(0, 0);
  std::sort(out.begin(), out.end(), [d](const IMat& u, const IMat& v) {
    for (int i = 0; i < d * d; ++i)
      if (u(i / d, i % d) != v(i / d, i % d)) return u(i / d, i % d) < v(i / d, i % d);
    return false;
  });
  return out;
}

/// Counts used by the counting/angular experiments: total, Cartan-regular,
/// and wall-strip members of Gamma cap D_t(x).
struct BallCounts {
  std::size_t total = 0;
  std::size_t regular = 0;
  std::size_t strip = 0;  // dist(a(gamma), chamber walls) <= s
};

inline BallCounts classify_ball(const std::vector<IMat>& ball, double strip_s,
                                const EnumOptions& opt = {}) {
  BallCounts counts;
  for (const IMat& m : ball) {
    Vec a = opt.basepoint ? cartan_projection_at(to_group_element(m), *opt.basepoint)
                          : cartan_of_integer(m);
    ++counts.total;
    if (in_open_chamber(a, 1e-9)) ++counts.regular;
    if (wall_distance(a) <= strip_s) ++counts.strip;
  }
  return counts;
}

/// Streaming ball classification: never materializes the ball, so it scales
/// to the largest radii of the counting experiments.
inline BallCounts count_ball(int d, double t, double strip_s, const EnumOptions& opt = {}) {
  BallCounts counts;
  auto tally = [&](const Vec& a) {
    ++counts.total;
    if (in_open_chamber(a, 1e-9)) ++counts.regular;
    if (wall_distance(a) <= strip_s) ++counts.strip;
  };
  if (d == 2) {
    Eigen::Matrix2d h, hi;
    if (opt.basepoint) {
      h = opt.basepoint->m.topLeftCorner<2, 2>();
      hi = opt.basepoint->inverse().m.topLeftCorner<2, 2>();
    }
    for_each_in_ball2(t, opt, [&](int64_t a, int64_t b, int64_t c, int64_t dd) {
      double frob2;
      if (opt.basepoint) {
        Eigen::Matrix2d gm;
        gm << static_cast<double>(a), static_cast<double>(b), static_cast<double>(c),
            static_cast<double>(dd);
        frob2 = (hi * gm * h).squaredNorm();
      } else {
        frob2 = static_cast<double>(a * a + b * b + c * c + dd * dd);
      }
      tally(cartan2_closed_form(frob2));
    });
  } else if (d == 3) {
    for_each_in_ball3(t, opt, [&](const detail::IM3&, const Vec& a) { tally(a); });
  } else {
    throw std::invalid_argument("count_ball: d must be 2 or 3");
  }
  return counts;
}

}  // namespace flattori

#endif
