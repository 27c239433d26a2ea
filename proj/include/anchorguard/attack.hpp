#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "anchorguard/deployment.hpp"

namespace anchorguard {

struct FixedOffset {
  double dx = 0.0;
  double dy = 0.0;
};

/// Random direction, radius uniform in [min_r, max_r].
struct UniformRadial {
  double min_r = 20.0;
  double max_r = 60.0;
};

struct UniformRandom {};

struct SpecificIds {
  std::vector<NodeId> ids;
};

using Displacement = std::variant<FixedOffset, UniformRadial>;
using Selection = std::variant<UniformRandom, SpecificIds>;

struct AttackSpec {
  int n_malicious = 0;
  Displacement displacement = UniformRadial{};
  Selection selection = UniformRandom{};
};

struct GroundTruth {
  std::set<NodeId> malicious_ids;
  std::map<NodeId, Point2> original_positions;
};

inline constexpr int kMaxDisplacementTries = 1000;

namespace detail {

inline std::vector<NodeId> select_victims(const Network& net, const AttackSpec& spec, Rng& rng) {
  const int count = static_cast<int>(net.nodes.size());
  if (const auto* chosen = std::get_if<SpecificIds>(&spec.selection)) {
    std::set<NodeId> unique;
    for (NodeId id : chosen->ids) {
      if (id < 0 || id >= count) throw InvalidSpec("compromise: unknown node id " + std::to_string(id));
      if (!unique.insert(id).second) throw InvalidSpec("compromise: duplicate node id " + std::to_string(id));
    }
    if (static_cast<int>(chosen->ids.size()) != spec.n_malicious)
      throw InvalidSpec("compromise: n_malicious does not match the number of specific ids");
    return chosen->ids;
  }
  // Victims are a prefix of one permutation, so smaller attacks drawn from the
  // same stream are subsets of larger ones.
  std::vector<NodeId> order(net.nodes.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<NodeId>(k);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(static_cast<std::size_t>(spec.n_malicious));
  return order;
}

inline Point2 displaced(Point2 truth, const Displacement& how, const Area& area, Rng& rng) {
  if (const auto* fixed = std::get_if<FixedOffset>(&how)) {
    const Point2 p = truth + Point2{fixed->dx, fixed->dy};
    if (!area.contains(p)) throw InvalidSpec("compromise: fixed offset leaves the simulation area");
    return p;
  }
  const auto& radial = std::get<UniformRadial>(how);
  std::uniform_real_distribution<double> radius(radial.min_r, radial.max_r);
  std::uniform_real_distribution<double> theta(0.0, 2.0 * std::numbers::pi);
  for (int tries = 0; tries < kMaxDisplacementTries; ++tries) {
    const double r = radius(rng);
    const double t = theta(rng);
    const Point2 p = truth + Point2{r * std::cos(t), r * std::sin(t)};
    if (area.contains(p)) return p;
  }
  throw InvalidSpec("compromise: no displacement keeps the report inside the simulation area");
}

}  // namespace detail

/// Returns a copy of `net` in which `spec.n_malicious` anchors advertise a
/// falsified location reference. True positions and references are untouched.
inline std::pair<Network, GroundTruth> compromise(const Network& net, const AttackSpec& spec, Rng& rng) {
  if (spec.n_malicious < 0 || spec.n_malicious > static_cast<int>(net.nodes.size()))
    throw InvalidSpec("compromise: n_malicious out of range");
  if (const auto* radial = std::get_if<UniformRadial>(&spec.displacement)) {
    if (!(radial->min_r >= 0.0) || !(radial->max_r >= radial->min_r))
      throw InvalidSpec("compromise: need 0 <= min_r <= max_r");
  }

  Network out = net;
  GroundTruth truth;
  for (NodeId id : detail::select_victims(net, spec, rng)) {
    AnchorNode& n = out.nodes[static_cast<std::size_t>(id)];
    truth.original_positions[id] = n.true_pos;
    n.reported_pos = detail::displaced(n.true_pos, spec.displacement, net.area, rng);
    n.compromised = true;
    truth.malicious_ids.insert(id);
  }
  return {std::move(out), std::move(truth)};
}

}  // namespace anchorguard
