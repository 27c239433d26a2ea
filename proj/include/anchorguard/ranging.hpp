#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <string_view>

#include "anchorguard/geometry.hpp"
#include "anchorguard/random.hpp"

namespace anchorguard {

enum class RangingKind {
  Exact,
  GaussianAdditive,         // ToA-style: d + N(0, sigma), sigma in metres
  LogNormalMultiplicative,  // RSSI-style: d * exp(N(0, sigma)), sigma unitless
};

struct RangingModel {
  RangingKind kind = RangingKind::Exact;
  double sigma = 0.0;

  static RangingModel exact() { return {}; }
  static RangingModel gaussian(double sigma) { return {RangingKind::GaussianAdditive, sigma}; }
  static RangingModel log_normal(double sigma) { return {RangingKind::LogNormalMultiplicative, sigma}; }

  bool noiseless() const noexcept { return kind == RangingKind::Exact || sigma == 0.0; }
};

inline std::string_view to_string(RangingKind k) {
  switch (k) {
    case RangingKind::Exact: return "exact";
    case RangingKind::GaussianAdditive: return "gaussian";
    case RangingKind::LogNormalMultiplicative: return "lognormal";
  }
  return "?";
}

struct Measurement {
  int from_id = -1;
  int to_id = -1;
  double distance = 0.0;
};

inline double true_distance(Point2 p, Point2 q) noexcept { return distance(p, q); }

/// One ranged sample of a true distance. Draws nothing from `rng` when the
/// model is noiseless, so sigma = 0 is bitwise identical to Exact.
inline double measure(double true_d, const RangingModel& model, Rng& rng) {
  if (model.noiseless()) return true_d;
  std::normal_distribution<double> noise(0.0, model.sigma);
  switch (model.kind) {
    case RangingKind::GaussianAdditive: return std::max(0.0, true_d + noise(rng));
    case RangingKind::LogNormalMultiplicative: return true_d * std::exp(noise(rng));
    case RangingKind::Exact: break;
  }
  return true_d;
}

inline Measurement measure(int from_id, Point2 from, int to_id, Point2 to, const RangingModel& model, Rng& rng) {
  return {from_id, to_id, measure(true_distance(from, to), model, rng)};
}

}  // namespace anchorguard
