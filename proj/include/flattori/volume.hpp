#ifndef FLATTORI_VOLUME_HPP
#define FLATTORI_VOLUME_HPP

#include <cmath>
#include <vector>

#include "flattori/cartan.hpp"

namespace flattori {

/// Harish-Chandra radial density xi(v) = prod_{i<j} sinh(v_i - v_j) on the
/// closed Weyl chamber (all root multiplicities are 1 for SL(d,R)).
inline double hc_density(const Vec& v) {
  const int d = static_cast<int>(v.size());
  double prod = 1.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) prod *= std::sinh(v(i) - v(j));
  return prod;
}

/// Exponential volume growth rate delta_0 = 2 max_{||Y|| <= 1} rho(Y) = 2 ||rho||.
inline double volume_growth_rate(int d) { return 2.0 * rho_vector(d).norm(); }

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
struct GaussLegendre {
  std::vector<double> node, weight;

  explicit GaussLegendre(int n) : node(n), weight(n) {
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      node[i] = x;
      weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

inline const GaussLegendre& gl24() {
  static const GaussLegendre g(24);
  return g;
}

/// Integrate f over [a,b] with `panels` panels of 24-point Gauss-Legendre.
template <typename F>
double integrate(F&& f, double a, double b, int panels) {
  const auto& g = gl24();
  double total = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.node.size(); ++i)
      acc += g.weight[i] * f(lo + 0.5 * h * (g.node[i] + 1.0));
    total += 0.5 * h * acc;
  }
  return total;
}

/// Unit-circle parametrization of the d=3 chamber: u(0) is the wall
/// direction with v2 = v3 and u(pi/3) the wall with v1 = v2.
inline Vec chamber_direction3(double phi) {
  Vec w1(3), w2(3);
  w1 << 2, -1, -1;
  w1 /= std::sqrt(6.0);
  w2 << 1, 1, -2;
  w2 /= std::sqrt(6.0);
  // Gram-Schmidt w2 against w1 (their angle is 60 degrees).
  Vec p = w2 - w2.dot(w1) * w1;
  p.normalize();
  return std::cos(phi) * w1 + std::sin(phi) * p;
}

}  // namespace detail

/// Volume of D_t = {exp(v) K : v in a^+ , ||v|| <= t} in the Harish-Chandra
/// normalization vol(D_t) = int_{a^+ cap B(0,t)} xi(v) dv.
/// d = 2 is the closed form (cosh(sqrt2 t) - 1)/sqrt2; d = 3 uses polar
/// Gauss-Legendre quadrature over the chamber sector.
inline double flat_ball_volume(int d, double t, int panels = 96) {
  if (t <= 0.0) return 0.0;
  if (d == 2) return (std::cosh(std::sqrt(2.0) * t) - 1.0) / std::sqrt(2.0);
  if (d == 3) {
    auto radial = [&](double phi) {
      Vec u = detail::chamber_direction3(phi);
      return detail::integrate([&](double r) { return hc_density(r * u) * r; }, 0.0, t, panels);
    };
    return detail::integrate(radial, 0.0, M_PI / 3.0, 32);
  }
  throw std::invalid_argument("flat_ball_volume: d must be 2 or 3");
}

/// Volume of the wall strip D_t^s = {v in a^+ cap B(0,t) : dist(v, walls) <= s}.
inline double flat_ball_strip_volume(int d, double t, double s, int panels = 96) {
  if (t <= 0.0 || s <= 0.0) return 0.0;
  if (d == 2) {
    // dist((x,-x), wall) = sqrt2 x = arclength, so the strip is just D_min(s,t).
    return flat_ball_volume(2, std::min(s, t));
  }
  if (d == 3) {
    auto radial = [&](double phi) {
      Vec u = detail::chamber_direction3(phi);
      const double w = wall_distance(u);  // dist(r u, walls) = r w
      const double cap = (w <= s / t) ? t : s / w;
      return detail::integrate([&](double r) { return hc_density(r * u) * r; }, 0.0, cap, panels);
    };
    return detail::integrate(radial, 0.0, M_PI / 3.0, 64);
  }
  throw std::invalid_argument("flat_ball_strip_volume: d must be 2 or 3");
}

/// Tabulated volumes on a t-grid (for CSV export and the CLI `volume` command).
struct VolumeTable {
  int d;
  std::vector<double> t;
  std::vector<double> volume;
  std::vector<double> log_volume;
  std::vector<double> strip_fraction;  // vol(D_t^s)/vol(D_t) at s = 1
};

inline VolumeTable make_volume_table(int d, const std::vector<double>& grid, double strip_s = 1.0) {
  VolumeTable tab;
  tab.d = d;
  for (double t : grid) {
    const double v = flat_ball_volume(d, t);
    tab.t.push_back(t);
    tab.volume.push_back(v);
    tab.log_volume.push_back(v > 0 ? std::log(v) : -std::numeric_limits<double>::infinity());
    tab.strip_fraction.push_back(v > 0 ? flat_ball_strip_volume(d, t, strip_s) / v : 0.0);
  }
  return tab;
}

}  // namespace flattori

#endif
