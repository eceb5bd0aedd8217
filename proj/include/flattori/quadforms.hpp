#ifndef FLATTORI_QUADFORMS_HPP
#define FLATTORI_QUADFORMS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "flattori/types.hpp"

namespace flattori {

// ---------------------------------------------------------------------------
// Indefinite binary quadratic forms (positive non-square discriminant)
// ---------------------------------------------------------------------------

struct QuadForm {
  std::int64_t a, b, c;

  std::int64_t disc() const { return b * b - 4 * a * c; }
  std::int64_t content() const { return std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)); }
  auto operator<=>(const QuadForm&) const = default;
};

inline bool is_square(std::int64_t n) {
  if (n < 0) return false;
  std::int64_t r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  for (std::int64_t s = std::max<std::int64_t>(0, r - 2); s <= r + 2; ++s)
    if (s * s == n) return true;
  return false;
}

/// Gauss reduction criterion for indefinite forms: |sqrt(D) - 2|a|| < b < sqrt(D).
inline bool is_reduced(const QuadForm& f) {
  const double sq = std::sqrt(static_cast<double>(f.disc()));
  return f.b > 0 && f.b < sq && std::abs(sq - 2.0 * std::abs(static_cast<double>(f.a))) < f.b;
}

/// The Gauss rho-step: (a,b,c) -> (c, b', *) with b' = -b mod 2c normalized
/// into the reduced window.  On reduced forms this walks the cycle.
inline QuadForm rho_step(const QuadForm& f) {
  const std::int64_t D = f.disc();
  const double sq = std::sqrt(static_cast<double>(D));
  const std::int64_t ac = std::abs(f.c);
  // b' == -b (mod 2|c|), chosen with sqrt(D) - 2|c| < b' < sqrt(D).
  std::int64_t lo = static_cast<std::int64_t>(std::ceil(sq - 2.0 * ac));
  std::int64_t b2 = -f.b;
  std::int64_t m = (lo - b2) % (2 * ac);
  if (m < 0) m += 2 * ac;
  b2 = lo + ((2 * ac - m) % (2 * ac));
  if (b2 >= static_cast<std::int64_t>(std::floor(sq)) + 1) b2 -= 2 * ac;
  const std::int64_t c2 = (b2 * b2 - D) / (4 * f.c);
  return {f.c, b2, c2};
}

/// All reduced forms of discriminant D (including imprimitive ones).
inline std::vector<QuadForm> reduced_forms(std::int64_t D) {
  if (D <= 0 || is_square(D)) throw std::invalid_argument("reduced_forms: need D > 0 non-square");
  std::vector<QuadForm> out;
  const double sq = std::sqrt(static_cast<double>(D));
  for (std::int64_t b = (D % 2 == 0) ? 2 : 1; b < sq; b += 2) {
    const std::int64_t n = (D - b * b) / 4;  // = -a c > 0
    for (std::int64_t a = 1; a * a <= n; ++a) {
      if (n % a) continue;
      for (std::int64_t dv : {a, n / a}) {
        const std::int64_t c = -(n / dv);
        for (std::int64_t sign : {1, -1}) {
          QuadForm f{sign * dv, b, sign * c};
          if (is_reduced(f)) out.push_back(f);
        }
        if (dv == n / a) break;  // avoid double-visiting square divisors
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Partition the reduced forms of discriminant D into rho-cycles.  Two
/// reduced indefinite forms are properly equivalent iff they share a cycle,
/// so the cycles enumerate the form classes.
inline std::vector<std::vector<QuadForm>> form_class_cycles(std::int64_t D) {
  auto forms = reduced_forms(D);
  std::set<QuadForm> remaining(forms.begin(), forms.end());
  std::vector<std::vector<QuadForm>> cycles;
  while (!remaining.empty()) {
    QuadForm start = *remaining.begin();
    std::vector<QuadForm> cycle;
    QuadForm f = start;
    do {
      cycle.push_back(f);
      remaining.erase(f);
      f = rho_step(f);
      if (cycle.size() > 8 * forms.size() + 16)
        throw std::logic_error("form_class_cycles: rho walk failed to close");
    } while (!(f == start));
    cycles.push_back(std::move(cycle));
  }
  return cycles;
}

inline std::size_t class_number(std::int64_t D) { return form_class_cycles(D).size(); }

/// Integer matrix of trace t and determinant 1 realizing the form (a,b,c) of
/// discriminant t^2 - 4 (requires b == t mod 2, automatic for that
/// discriminant).
inline IMat form_matrix(const QuadForm& f, std::int64_t t) {
  if (((t - f.b) % 2) != 0 || f.disc() != t * t - 4)
    throw std::invalid_argument("form_matrix: discriminant/trace mismatch");
  IMat m(2, 2);
  m << (t - f.b) / 2, -f.c, f.a, (t + f.b) / 2;
  return m;
}

// ---------------------------------------------------------------------------
// Units of real quadratic orders via known-unit root extraction
// ---------------------------------------------------------------------------

/// A norm-one unit (t + u sqrt(D)) / 2 of the order of discriminant D,
/// t^2 - D u^2 = 4.
struct PellUnit {
  std::int64_t t, u, D;

  double log_value() const {
    const double sq = std::sqrt(static_cast<double>(D));
    return std::log((t + u * sq) / 2.0);
  }
};

namespace detail {

/// Multiply (t1 + u1 sqrt(D))/2 * (t2 + u2 sqrt(D))/2 in the quadratic ring.
inline PellUnit unit_mul(const PellUnit& x, const PellUnit& y) {
  // ((t1 t2 + D u1 u2)/2 + (t1 u2 + t2 u1)/2 sqrt(D)) / 2
  __int128 t = (static_cast<__int128>(x.t) * y.t + static_cast<__int128>(x.D) * x.u * y.u) / 2;
  __int128 u = (static_cast<__int128>(x.t) * y.u + static_cast<__int128>(y.t) * x.u) / 2;
  if (t > INT64_MAX || u > INT64_MAX) throw std::overflow_error("unit_mul overflow");
  return {static_cast<std::int64_t>(t), static_cast<std::int64_t>(u), x.D};
}

inline PellUnit unit_pow(PellUnit base, int k) {
  PellUnit acc{2, 0, base.D};  // the identity (2 + 0 sqrt(D))/2 = 1
  while (k > 0) {
    if (k & 1) acc = unit_mul(acc, base);
    base = unit_mul(base, base);
    k >>= 1;
  }
  return acc;
}

}  // namespace detail

/// Fundamental norm-one unit of the order of discriminant D, given one known
/// norm-one unit (t0 + u0 sqrt(D))/2 > 1 which generates a finite-index
/// subgroup: the fundamental unit is its k-th root for the largest k for
/// which an exact k-th root exists in the order.  (Every norm-one unit > 1
/// is at least (3 + sqrt5)/2, so k <= log(eta)/log(2.618).)
inline PellUnit fundamental_unit_from(std::int64_t D, std::int64_t t0, std::int64_t u0) {
  if (t0 * t0 - D * u0 * u0 != 4) throw std::invalid_argument("fundamental_unit_from: not a unit");
  const double log_eta = PellUnit{t0, u0, D}.log_value();
  const int kmax = static_cast<int>(std::floor(log_eta / std::log((3.0 + std::sqrt(5.0)) / 2.0) + 1e-9));
  for (int k = std::max(kmax, 1); k >= 2; --k) {
    // Candidate trace of the k-th root: 2 cosh(log_eta / k), must be integral.
    const double tc = 2.0 * std::cosh(log_eta / k);
    const std::int64_t t = static_cast<std::int64_t>(std::llround(tc));
    if (std::abs(tc - t) > 1e-6 || t < 3) continue;
    const std::int64_t n = t * t - 4;
    if (n % D != 0) continue;
    const std::int64_t uu = n / D;
    const std::int64_t u = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(uu))));
    if (u * u != uu || ((t - D % 2 * u) % 2) != 0) continue;
    PellUnit cand{t, u, D};
    PellUnit pw = detail::unit_pow(cand, k);
    if (pw.t == t0 && pw.u == u0) return cand;
  }
  return {t0, u0, D};
}

}  // namespace flattori

#endif
