#ifndef FLATTORI_TYPES_HPP
#define FLATTORI_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace flattori {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using IMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Global default tolerance for numerical identities; individual checks
/// may override where a looser or tighter bound is justified.
inline constexpr double kTol = 1e-9;

/// Deterministic RNG used throughout; every randomized routine takes a
/// generator (or a seed) explicitly so runs are reproducible.
using Rng = std::mt19937_64;

inline Mat random_gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  return m;
}

/// An element of SL(d,R).  The constructor rescales to determinant one and
/// rejects matrices with non-positive determinant.
struct GroupElement {
  Mat m;

  GroupElement() = default;
  explicit GroupElement(Mat mat) : m(std::move(mat)) {
    if (m.rows() != m.cols() || m.rows() < 2)
      throw std::invalid_argument("GroupElement: need a square matrix, d >= 2");
    const double det = m.determinant();
    if (!(det > 0.0))
      throw std::invalid_argument("GroupElement: determinant must be positive");
    m /= std::pow(det, 1.0 / static_cast<double>(m.rows()));
  }

  int d() const { return static_cast<int>(m.rows()); }
  GroupElement inverse() const { return GroupElement(m.inverse()); }
  GroupElement operator*(const GroupElement& o) const { return GroupElement(m * o.m); }
};

inline GroupElement random_group_element(int d, Rng& rng, double spread = 1.0) {
  for (;;) {
    Mat m = Mat::Identity(d, d) + spread * random_gaussian(d, d, rng);
    if (std::abs(m.determinant()) > 1e-6) {
      if (m.determinant() < 0) m.col(0) *= -1.0;
      return GroupElement(m);
    }
  }
}

}  // namespace flattori

#endif
