#pragma once

#include <vector>

#include "anchorguard/anchorguard.hpp"

namespace fixtures {

using namespace anchorguard;

/// Hand-placed network: one group per center, members at fixed offsets
/// (6, 0), (-3, 5), (-3, -5) around it. Neighbors and exact references are built.
inline Network hand_network(const std::vector<Point2>& centers, double comm_radius = 100.0) {
  Network net;
  net.area = {600.0, 600.0};
  net.comm_radius = comm_radius;
  const std::array<Point2, 3> offsets{Point2{6.0, 0.0}, Point2{-3.0, 5.0}, Point2{-3.0, -5.0}};
  for (Point2 c : centers) {
    AnchorGroup g;
    g.group_id = static_cast<GroupId>(net.groups.size());
    g.trilateration_point = c;
    for (Point2 o : offsets) {
      AnchorNode n;
      n.id = static_cast<NodeId>(net.nodes.size());
      n.true_pos = n.reported_pos = c + o;
      n.group_id = g.group_id;
      net.nodes.push_back(n);
      g.member_ids.push_back(n.id);
    }
    net.groups.push_back(g);
  }
  link_neighbors(net);
  net.references = build_references(net);
  return net;
}

inline Network displace(Network net, NodeId id, Point2 offset) {
  AnchorNode& n = net.nodes.at(static_cast<std::size_t>(id));
  n.reported_pos = n.true_pos + offset;
  n.compromised = true;
  return net;
}

inline Network full_scale(std::uint64_t seed, int n_nodes = 122) {
  Rng rng{seed};
  Network net = deploy({600.0, 600.0}, n_nodes, rng);
  net.references = build_references(net);
  return net;
}

}  // namespace fixtures
