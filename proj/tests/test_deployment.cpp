#include <gtest/gtest.h>

#include <numbers>
#include <set>

#include "anchorguard/deployment.hpp"
#include "fixtures.hpp"

using namespace anchorguard;

namespace {

double min_angle(Point2 a, Point2 b, Point2 c) {
  auto at = [](Point2 p, Point2 q, Point2 r) {
    const Point2 u = q - p, v = r - p;
    return std::atan2(std::abs(cross(u, v)), u.x * v.x + u.y * v.y);
  };
  return std::min({at(a, b, c), at(b, c, a), at(c, a, b)});
}

}  // namespace

class DeploySeeds : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(DeploySeeds, FullScaleStructure) {
  Rng rng{GetParam()};
  const Network net = deploy({600, 600}, 122, rng);
  ASSERT_EQ(net.nodes.size(), 122u);
  EXPECT_EQ(net.groups.size(), 40u);

  std::set<NodeId> seen;
  for (const AnchorGroup& g : net.groups) {
    ASSERT_GE(g.member_ids.size(), 3u);
    for (NodeId id : g.member_ids) {
      EXPECT_TRUE(seen.insert(id).second) << "node " << id << " in two groups";
      EXPECT_EQ(net.node(id).group_id, g.group_id);
    }
    const auto t = primary_triple(g);
    const Point2 a = net.node(t[0]).true_pos, b = net.node(t[1]).true_pos, c = net.node(t[2]).true_pos;
    // trilateration point is the centroid of the primary triple
    EXPECT_LT(distance((1.0 / 3.0) * (a + b + c), g.trilateration_point), 1e-9);
    EXPECT_GE(min_angle(a, b, c), 25.0 * std::numbers::pi / 180.0 - 1e-12);
    EXPECT_GE(triangle_area(a, b, c), kDegenerateArea);
    for (Point2 p : {a, b, c}) {
      EXPECT_GE(distance(p, g.trilateration_point), 3.0 - 1e-9);
      EXPECT_LE(distance(p, g.trilateration_point), 8.0 + 1e-9);
    }
  }
  EXPECT_EQ(seen.size(), 122u);

  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    EXPECT_TRUE(net.area.contains(net.nodes[i].true_pos));
    EXPECT_EQ(net.nodes[i].true_pos, net.nodes[i].reported_pos);
    EXPECT_FALSE(net.nodes[i].compromised);
    for (std::size_t j = i + 1; j < net.nodes.size(); ++j)
      EXPECT_GE(distance(net.nodes[i].true_pos, net.nodes[j].true_pos), 2.0 - 1e-9);
  }

  // chained: every later trilateration point coincides with an earlier node
  for (std::size_t k = 1; k < net.groups.size(); ++k) {
    bool on_node = false;
    for (const AnchorNode& n : net.nodes) on_node |= distance(n.true_pos, net.groups[k].trilateration_point) < 1e-12;
    EXPECT_TRUE(on_node) << "group " << k;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, DeploySeeds, ::testing::Values(1u, 2u, 42u, 1000u, 987654321u));

TEST(Deploy, SameSeedSameNetwork) {
  Rng a{77}, b{77};
  const Network n1 = deploy({600, 600}, 122, a), n2 = deploy({600, 600}, 122, b);
  ASSERT_EQ(n1.nodes.size(), n2.nodes.size());
  for (std::size_t k = 0; k < n1.nodes.size(); ++k) EXPECT_EQ(n1.nodes[k].true_pos, n2.nodes[k].true_pos);
}

TEST(Deploy, RejectsBadInput) {
  Rng rng{1};
  EXPECT_THROW(deploy({600, 600}, 3, rng), std::invalid_argument);
  EXPECT_THROW(deploy({0, 600}, 10, rng), std::invalid_argument);
  EXPECT_THROW(deploy({10, 10}, 10, rng), DeploymentFailure);
}

TEST(Deploy, TinyAreaCannotHoldAllNodes) {
  Rng rng{1};
  DeploymentOptions opt;
  opt.max_attempts = 200;
  EXPECT_THROW(deploy({20, 20}, 122, rng, opt), DeploymentFailure);
}

TEST(Neighbors, SortedByDistanceWithinRadius) {
  const Network net = fixtures::hand_network({{100, 100}, {130, 100}, {100, 160}, {400, 400}}, 70.0);
  EXPECT_EQ(net.groups[0].neighbor_group_ids, (std::vector<GroupId>{1, 2}));
  EXPECT_EQ(net.groups[1].neighbor_group_ids, (std::vector<GroupId>{0, 2}));
  EXPECT_TRUE(net.groups[3].neighbor_group_ids.empty());
  EXPECT_THROW(net.group(17), UnknownGroup);
  EXPECT_THROW(neighbor_groups(net, -1), UnknownGroup);
}

TEST(Neighbors, Symmetric) {
  const Network net = fixtures::full_scale(5);
  for (const AnchorGroup& g : net.groups)
    for (GroupId h : g.neighbor_group_ids) {
      const auto& back = net.group(h).neighbor_group_ids;
      EXPECT_NE(std::find(back.begin(), back.end(), g.group_id), back.end());
      EXPECT_LE(distance(g.trilateration_point, net.group(h).trilateration_point), net.comm_radius);
    }
}

TEST(References, ExactReferencesMatchTruth) {
  const Network net = fixtures::full_scale(11);
  for (const AnchorGroup& g : net.groups) EXPECT_LT(distance(net.references.m1.at(g.group_id), g.trilateration_point), 1e-9);
  std::size_t expected = 0;
  for (const AnchorGroup& g : net.groups) expected += g.member_ids.size() * g.neighbor_group_ids.size();
  EXPECT_EQ(net.references.m_cross.size(), expected);
  for (const auto& [key, pos] : net.references.m_cross) EXPECT_LT(distance(pos, net.node(key.first).true_pos), 1e-9);
  EXPECT_TRUE(net.references.m1_samples.empty());
}

TEST(References, CalibratedReferencesAverageRounds) {
  Network net = fixtures::full_scale(12);
  Rng rng{4};
  const ReferenceTable refs = build_references(net, RangingModel::gaussian(0.5), 16, rng);
  for (const auto& [gid, samples] : refs.m1_samples) {
    ASSERT_EQ(samples.size(), 16u);
    Point2 s;
    for (Point2 p : samples) s = s + p;
    EXPECT_LT(distance((1.0 / 16.0) * s, refs.m1.at(gid)), 1e-9);
    EXPECT_LT(distance(refs.m1.at(gid), net.group(gid).trilateration_point), 3.0);
  }
  EXPECT_EQ(refs.m_cross_samples.size(), refs.m_cross.size());
  EXPECT_THROW(build_references(net, RangingModel::exact(), 0, rng), std::invalid_argument);
}

TEST(References, DegenerateTripleNamesGroup) {
  Network net = fixtures::hand_network({{100, 100}});
  net.nodes[2].reported_pos = net.nodes[2].true_pos = {106 + 6, 100};
  net.nodes[1].reported_pos = net.nodes[1].true_pos = {106 + 3, 100};
  try {
    build_references(net);
    FAIL() << "expected DegenerateGeometry";
  } catch (const DegenerateGeometry& e) {
    ASSERT_TRUE(e.group_id());
    EXPECT_EQ(*e.group_id(), 0);
  }
}
