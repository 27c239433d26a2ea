#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anchorguard/errors.hpp"
#include "anchorguard/geometry.hpp"
#include "anchorguard/random.hpp"
#include "anchorguard/ranging.hpp"

namespace anchorguard {

using NodeId = int;
using GroupId = int;

struct AnchorNode {
  NodeId id = -1;
  Point2 true_pos;
  /// Location reference the node advertises. Equals true_pos unless compromised.
  Point2 reported_pos;
  GroupId group_id = -1;
  bool compromised = false;
  bool quarantined = false;
};

struct AnchorGroup {
  GroupId group_id = -1;
  std::vector<NodeId> member_ids;
  Point2 trilateration_point;
  std::vector<GroupId> neighbor_group_ids;
  /// Cleared when quarantine leaves fewer than three members.
  bool active = true;
};

/// Deployment-time location references held by the aggregation point.
/// m1 is keyed by group, m_cross by (anchor, neighbor group). The sample
/// maps are only filled by the calibrated overload of build_references.
struct ReferenceTable {
  std::map<GroupId, Point2> m1;
  std::map<std::pair<NodeId, GroupId>, Point2> m_cross;
  std::map<GroupId, std::vector<Point2>> m1_samples;
  std::map<std::pair<NodeId, GroupId>, std::vector<Point2>> m_cross_samples;
};

struct Area {
  double width = 600.0;
  double height = 600.0;

  bool contains(Point2 p) const noexcept { return p.x >= 0.0 && p.y >= 0.0 && p.x <= width && p.y <= height; }
};

struct Network {
  std::vector<AnchorNode> nodes;
  std::vector<AnchorGroup> groups;
  ReferenceTable references;
  Area area;
  double comm_radius = 150.0;

  const AnchorNode& node(NodeId id) const { return nodes.at(static_cast<std::size_t>(id)); }
  const AnchorGroup& group(GroupId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= groups.size()) throw UnknownGroup(id);
    return groups[static_cast<std::size_t>(id)];
  }
};

struct DeploymentOptions {
  double comm_radius = 150.0;
  // member distance from the group's trilateration point
  double group_radius_min = 3.0;
  double group_radius_max = 8.0;
  double min_spacing = 2.0;
  double min_angle_deg = 25.0;
  int max_attempts = 10000;
};

/// Groups whose trilateration points lie within the network's communication
/// radius of `group_id`'s, nearest first (ties by id). Inactive groups are skipped.
inline std::vector<GroupId> neighbor_groups(const Network& net, GroupId group_id) {
  const AnchorGroup& g = net.group(group_id);
  std::vector<std::pair<double, GroupId>> found;
  for (const AnchorGroup& h : net.groups) {
    if (h.group_id == group_id || !h.active) continue;
    const double d = distance(g.trilateration_point, h.trilateration_point);
    if (d <= net.comm_radius) found.emplace_back(d, h.group_id);
  }
  std::sort(found.begin(), found.end());
  std::vector<GroupId> out;
  out.reserve(found.size());
  for (const auto& [d, id] : found) out.push_back(id);
  return out;
}

inline void link_neighbors(Network& net) {
  for (AnchorGroup& g : net.groups) g.neighbor_group_ids = neighbor_groups(net, g.group_id);
}

/// The three members that trilaterate the group's reference point.
inline std::array<NodeId, 3> primary_triple(const AnchorGroup& g) {
  if (g.member_ids.size() < 3)
    throw DegenerateGeometry("group " + std::to_string(g.group_id) + " has fewer than 3 members", g.group_id);
  return {g.member_ids[0], g.member_ids[1], g.member_ids[2]};
}

namespace detail {

inline double min_interior_angle(Point2 a, Point2 b, Point2 c) {
  auto angle = [](Point2 at, Point2 u, Point2 v) {
    const Point2 e1 = u - at;
    const Point2 e2 = v - at;
    return std::atan2(std::abs(cross(e1, e2)), e1.x * e2.x + e1.y * e2.y);
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

inline Point2 sample_annulus(Point2 center, double r_min, double r_max, Rng& rng) {
  std::uniform_real_distribution<double> radius(r_min, r_max);
  std::uniform_real_distribution<double> theta(0.0, 2.0 * std::numbers::pi);
  const double r = radius(rng);
  const double t = theta(rng);
  return center + Point2{r * std::cos(t), r * std::sin(t)};
}

inline bool clear_of(const std::vector<AnchorNode>& nodes, Point2 p, double spacing) {
  return std::none_of(nodes.begin(), nodes.end(),
                      [&](const AnchorNode& n) { return distance(n.true_pos, p) < spacing; });
}

/// One candidate triple whose centroid is exactly `center`, or nothing if the
/// candidate violates the placement constraints.
inline std::optional<std::array<Point2, 3>> propose_triple(Point2 center, const Network& net,
                                                           const DeploymentOptions& opt, Rng& rng) {
  const Point2 p1 = sample_annulus(center, opt.group_radius_min, opt.group_radius_max, rng);
  const Point2 p2 = sample_annulus(center, opt.group_radius_min, opt.group_radius_max, rng);
  const Point2 p3 = 3.0 * center - p1 - p2;
  const double r3 = distance(p3, center);
  if (r3 < opt.group_radius_min || r3 > opt.group_radius_max) return std::nullopt;
  const std::array<Point2, 3> t{p1, p2, p3};
  for (std::size_t a = 0; a < 3; ++a) {
    if (!net.area.contains(t[a]) || !clear_of(net.nodes, t[a], opt.min_spacing)) return std::nullopt;
    for (std::size_t b = a + 1; b < 3; ++b)
      if (distance(t[a], t[b]) < opt.min_spacing) return std::nullopt;
  }
  if (min_interior_angle(p1, p2, p3) < opt.min_angle_deg * std::numbers::pi / 180.0) return std::nullopt;
  return t;
}

inline NodeId add_node(Network& net, Point2 p) {
  AnchorNode n;
  n.id = static_cast<NodeId>(net.nodes.size());
  n.true_pos = p;
  n.reported_pos = p;
  net.nodes.push_back(n);
  return n.id;
}

inline void add_group(Network& net, const std::array<Point2, 3>& triple, Point2 center) {
  AnchorGroup g;
  g.group_id = static_cast<GroupId>(net.groups.size());
  g.trilateration_point = center;
  for (Point2 p : triple) {
    const NodeId id = add_node(net, p);
    net.nodes.back().group_id = g.group_id;
    g.member_ids.push_back(id);
  }
  net.groups.push_back(std::move(g));
}

inline GroupId nearest_group(const Network& net, Point2 p) {
  GroupId best = -1;
  double best_d = 0.0;
  for (const AnchorGroup& g : net.groups) {
    const double d = distance(g.trilateration_point, p);
    if (best < 0 || d < best_d) {
      best = g.group_id;
      best_d = d;
    }
  }
  return best;
}

inline void attach(Network& net, NodeId id) {
  const GroupId g = nearest_group(net, net.nodes[static_cast<std::size_t>(id)].true_pos);
  net.nodes[static_cast<std::size_t>(id)].group_id = g;
  net.groups[static_cast<std::size_t>(g)].member_ids.push_back(id);
}

}  // namespace detail

/// Chained trilateration-point deployment: the first triple is placed around
/// a random point, a node is put on that point, and every later triple is
/// placed around an existing node that becomes its trilateration point.
/// Nodes that do not complete a triple join the nearest group.
inline Network deploy(Area area, int target_count, Rng& rng, const DeploymentOptions& opt = {}) {
  if (target_count < 4) throw std::invalid_argument("deploy: target_count must be >= 4");
  if (!(area.width > 0.0) || !(area.height > 0.0)) throw std::invalid_argument("deploy: area must be positive");
  const double margin = opt.group_radius_max;
  if (area.width <= 2.0 * margin || area.height <= 2.0 * margin)
    throw DeploymentFailure("deploy: area too small for the group radius");

  Network net;
  net.area = area;
  net.comm_radius = opt.comm_radius;
  net.nodes.reserve(static_cast<std::size_t>(target_count));

  std::uniform_real_distribution<double> ux(margin, area.width - margin);
  std::uniform_real_distribution<double> uy(margin, area.height - margin);
  const Point2 first_center{ux(rng), uy(rng)};

  std::optional<std::array<Point2, 3>> triple;
  for (int attempt = 0; attempt < opt.max_attempts && !triple; ++attempt)
    triple = detail::propose_triple(first_center, net, opt, rng);
  if (!triple) throw DeploymentFailure("deploy: could not place the initial triple");
  detail::add_group(net, *triple, first_center);
  const NodeId on_first_point = detail::add_node(net, first_center);

  // nodes that may still serve as a trilateration point for a new triple
  std::vector<NodeId> seeds{0, 1, 2};
  while (static_cast<int>(net.nodes.size()) + 3 <= target_count) {
    bool placed = false;
    for (int attempt = 0; attempt < opt.max_attempts && !seeds.empty(); ++attempt) {
      std::uniform_int_distribution<std::size_t> pick(0, seeds.size() - 1);
      const std::size_t k = pick(rng);
      const Point2 center = net.nodes[static_cast<std::size_t>(seeds[k])].true_pos;
      triple = detail::propose_triple(center, net, opt, rng);
      if (!triple) continue;
      seeds.erase(seeds.begin() + static_cast<std::ptrdiff_t>(k));
      const NodeId first_new = static_cast<NodeId>(net.nodes.size());
      detail::add_group(net, *triple, center);
      for (NodeId id = first_new; id < first_new + 3; ++id) seeds.push_back(id);
      placed = true;
      break;
    }
    if (!placed)
      throw DeploymentFailure("deploy: rejection sampling exhausted after " + std::to_string(net.nodes.size()) +
                              " nodes");
  }

  std::vector<NodeId> leftovers{on_first_point};
  while (static_cast<int>(net.nodes.size()) < target_count) {
    bool placed = false;
    for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
      std::uniform_int_distribution<std::size_t> pick(0, net.groups.size() - 1);
      const Point2 center = net.groups[pick(rng)].trilateration_point;
      const Point2 p = detail::sample_annulus(center, opt.group_radius_min, opt.group_radius_max, rng);
      if (!area.contains(p) || !detail::clear_of(net.nodes, p, opt.min_spacing)) continue;
      leftovers.push_back(detail::add_node(net, p));
      placed = true;
      break;
    }
    if (!placed) throw DeploymentFailure("deploy: could not place leftover node");
  }
  for (NodeId id : leftovers) detail::attach(net, id);

  link_neighbors(net);
  return net;
}

namespace detail {

inline std::array<Point2, 3> reported_positions(const Network& net, const std::array<NodeId, 3>& ids) {
  return {net.node(ids[0]).reported_pos, net.node(ids[1]).reported_pos, net.node(ids[2]).reported_pos};
}

inline Point2 mean_of(const std::vector<Point2>& pts) {
  Point2 s;
  for (Point2 p : pts) s = s + p;
  return (1.0 / static_cast<double>(pts.size())) * s;
}

template <class RangeFn>
Point2 calibrate_one(const std::array<Point2, 3>& anchors, RangeFn&& range, int rounds,
                     std::vector<Point2>* samples, GroupId gid) {
  std::vector<Point2> local;
  std::vector<Point2>& out = samples ? *samples : local;
  out.clear();
  out.reserve(static_cast<std::size_t>(rounds));
  try {
    for (int r = 0; r < rounds; ++r) out.push_back(trilaterate(anchors, range()).position);
  } catch (const DegenerateGeometry& e) {
    throw DegenerateGeometry(std::string("group ") + std::to_string(gid) + ": " + e.what(), gid);
  }
  return mean_of(out);
}

}  // namespace detail

/// Deployment-time references with `rounds` ranging rounds under `model`.
/// Each reference is the mean of its rounds; the raw rounds are kept as the
/// calibration samples. Positions used as anchors are the reported ones.
inline ReferenceTable build_references(const Network& net, const RangingModel& model, int rounds, Rng& rng) {
  if (rounds < 1) throw std::invalid_argument("build_references: rounds must be >= 1");
  const bool keep = !model.noiseless() || rounds > 1;
  ReferenceTable refs;
  for (const AnchorGroup& g : net.groups) {
    if (!g.active) continue;
    const auto ids = primary_triple(g);
    const auto anchors = detail::reported_positions(net, ids);
    const Point2 t = g.trilateration_point;
    auto ranges = [&] {
      std::array<double, 3> r{};
      for (std::size_t k = 0; k < 3; ++k) r[k] = measure(true_distance(net.node(ids[k]).true_pos, t), model, rng);
      return r;
    };
    std::vector<Point2>* samples = keep ? &refs.m1_samples[g.group_id] : nullptr;
    refs.m1[g.group_id] = detail::calibrate_one(anchors, ranges, rounds, samples, g.group_id);
  }
  for (const AnchorGroup& g : net.groups) {
    if (!g.active) continue;
    for (GroupId hid : g.neighbor_group_ids) {
      const AnchorGroup& h = net.group(hid);
      if (!h.active) continue;
      const auto ids = primary_triple(h);
      const auto anchors = detail::reported_positions(net, ids);
      for (NodeId a : g.member_ids) {
        const Point2 target = net.node(a).true_pos;
        auto ranges = [&] {
          std::array<double, 3> r{};
          for (std::size_t k = 0; k < 3; ++k)
            r[k] = measure(true_distance(net.node(ids[k]).true_pos, target), model, rng);
          return r;
        };
        std::vector<Point2>* samples = keep ? &refs.m_cross_samples[{a, hid}] : nullptr;
        refs.m_cross[{a, hid}] = detail::calibrate_one(anchors, ranges, rounds, samples, hid);
      }
    }
  }
  return refs;
}

/// Noiseless references: M1 per group, M2.. per (anchor, neighbor group).
inline ReferenceTable build_references(const Network& net) {
  Rng unused{0};
  return build_references(net, RangingModel::exact(), 1, unused);
}

}  // namespace anchorguard
