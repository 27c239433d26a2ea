#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <span>
#include <stdexcept>
#include <vector>

#include "anchorguard/errors.hpp"
#include "anchorguard/geometry.hpp"

namespace anchorguard {

/// Symmetric 2x2 variance-covariance matrix [s11 s12; s12 s22] (m^2).
struct CovarianceMatrix2 {
  double s11 = 0.0;
  double s22 = 0.0;
  double s12 = 0.0;
  double det = 0.0;

  static CovarianceMatrix2 from_entries(double s11, double s22, double s12) {
    return {s11, s22, s12, s11 * s22 - s12 * s12};
  }

  /// rho_12 = s12 / (sigma_1 sigma_2); needs s11 * s22 > 0.
  double correlation() const { return s12 / std::sqrt(s11 * s22); }

  /// |C| written as sigma_1^2 sigma_2^2 (1 - rho_12^2).
  double det_from_correlation() const {
    const double rho = correlation();
    return s11 * s22 * (1.0 - rho * rho);
  }
};

/// Row-major 2x2 matrix.
struct Matrix2 {
  std::array<double, 4> m{1.0, 0.0, 0.0, 1.0};

  double operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }

  static Matrix2 identity() { return {}; }

  friend Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
    return {{a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0), a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1),
             a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0), a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1)}};
  }

  Point2 apply(Point2 p) const { return {m[0] * p.x + m[1] * p.y, m[2] * p.x + m[3] * p.y}; }
};

inline Matrix2 as_matrix(const CovarianceMatrix2& c) { return {{c.s11, c.s12, c.s12, c.s22}}; }

struct MahalanobisScore {
  int anchor_id = -1;
  double d = 0.0;
  double threshold = 0.0;
  bool outlier = false;
};

/// C = 1/(n-1) * sum (p - center)(p - center)^T.
inline CovarianceMatrix2 covariance(std::span<const Point2> points, Point2 center) {
  if (points.size() < 3) throw InsufficientData("covariance: need at least 3 points");
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (Point2 p : points) {
    const Point2 d = p - center;
    sxx += d.x * d.x;
    syy += d.y * d.y;
    sxy += d.x * d.y;
  }
  const double k = 1.0 / static_cast<double>(points.size() - 1);
  return CovarianceMatrix2::from_entries(k * sxx, k * syy, k * sxy);
}

inline double singular_threshold(const CovarianceMatrix2& c) {
  const double scale = std::max(c.s11, c.s22);
  return std::max(1e-9 * scale * scale, 1e-18);
}

/// Adjugate over determinant.
inline Matrix2 invert(const CovarianceMatrix2& c) {
  if (!(c.det > singular_threshold(c))) throw SingularCovariance("covariance matrix is singular or near-singular");
  return {{c.s22 / c.det, -c.s12 / c.det, -c.s12 / c.det, c.s11 / c.det}};
}

inline double quadratic_form(Point2 v, const Matrix2& cinv) {
  const Point2 w = cinv.apply(v);
  return std::max(0.0, v.x * w.x + v.y * w.y);
}

inline double distance_to_centroid(Point2 p, Point2 centroid, const Matrix2& cinv) {
  return std::sqrt(quadratic_form(p - centroid, cinv));
}

inline double pairwise_distance(Point2 p, Point2 q, const Matrix2& cinv) {
  return std::sqrt(quadratic_form(q - p, cinv));
}

/// sqrt of the (1 - alpha) quantile of chi-square with 2 degrees of freedom.
inline double chi2_cutoff(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("chi2_cutoff: alpha must be in (0, 1)");
  return std::sqrt(-2.0 * std::log(alpha));
}

/// What confirm_outliers needs from a stage-two suspect.
template <class S>
concept SuspectLike = requires(const S& s) {
  { s.anchor_id } -> std::convertible_to<int>;
  { s.observed_pos } -> std::convertible_to<Point2>;
  { s.reference_pos } -> std::convertible_to<Point2>;
};

/// Scores each suspect's discrepancy from its stored reference, placed at the
/// centroid, against the covariance of `reference_positions` about the
/// centroid. `variance_floor` (m^2) is added to both variances.
template <SuspectLike Suspect>
std::vector<MahalanobisScore> confirm_outliers(std::span<const Suspect> suspects,
                                               std::span<const Point2> reference_positions, Point2 centroid,
                                               double cutoff, double variance_floor = 0.0) {
  CovarianceMatrix2 c = covariance(reference_positions, centroid);
  if (variance_floor > 0.0) c = CovarianceMatrix2::from_entries(c.s11 + variance_floor, c.s22 + variance_floor, c.s12);
  const Matrix2 cinv = invert(c);
  std::vector<MahalanobisScore> out;
  out.reserve(suspects.size());
  for (const Suspect& s : suspects) {
    const Point2 q = centroid + (s.observed_pos - s.reference_pos);
    MahalanobisScore score;
    score.anchor_id = s.anchor_id;
    score.d = distance_to_centroid(q, centroid, cinv);
    score.threshold = cutoff;
    score.outlier = score.d > cutoff;
    out.push_back(score);
  }
  return out;
}

template <SuspectLike Suspect>
std::vector<MahalanobisScore> confirm_outliers(const std::vector<Suspect>& suspects,
                                               const std::vector<Point2>& reference_positions, Point2 centroid,
                                               double cutoff, double variance_floor = 0.0) {
  return confirm_outliers(std::span<const Suspect>(suspects), std::span<const Point2>(reference_positions), centroid,
                          cutoff, variance_floor);
}

}  // namespace anchorguard
