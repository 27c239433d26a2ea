#pragma once

#include <array>
#include <chrono>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "anchorguard/deployment.hpp"
#include "anchorguard/mahalanobis.hpp"
#include "anchorguard/ranging.hpp"

namespace anchorguard {

/// One anchor whose cross-group re-localization disagrees with its stored
/// reference. `observed_pos` is the freshly trilaterated location.
struct SuspectRecord {
  NodeId anchor_id = -1;
  GroupId group_id = -1;
  GroupId verifier_group_id = -1;
  Point2 observed_pos;
  Point2 reference_pos;
  double deviation = 0.0;
};

struct GroupCheck {
  GroupId group_id = -1;
  bool passed = false;
  bool degenerate = false;
  Point2 observed;
  Point2 reference;
  /// Largest deviation over all member triples; infinite when degenerate.
  double deviation = 0.0;
};

struct DetectionReport {
  std::vector<GroupCheck> checks;
  std::vector<SuspectRecord> suspects;
  std::set<NodeId> flagged_ids;
  std::set<GroupId> groups_failed;
  /// Members of failed groups that had no passing neighbor to verify against.
  std::set<NodeId> indeterminate_ids;
  double elapsed_ms = 0.0;
};

/// Default comparison tolerance: max(1 m, 3 * sigma * 2).
inline double default_epsilon(double sigma) { return std::max(1.0, 3.0 * sigma * 2.0); }

/// Stage one. The verifier at the group's trilateration point ranges every
/// member; each member triple is trilaterated from the members' reported
/// positions and compared with M1. Fails if any triple deviates by more than
/// `epsilon` or is degenerate.
inline GroupCheck group_check(const Network& net, GroupId group_id, double epsilon, const RangingModel& model,
                              Rng& rng) {
  const AnchorGroup& g = net.group(group_id);
  const auto ref = net.references.m1.find(group_id);
  if (ref == net.references.m1.end()) throw std::out_of_range("group_check: no M1 reference for group");

  const std::size_t n = g.member_ids.size();
  std::vector<Point2> claimed(n);
  std::vector<double> ranges(n);
  for (std::size_t k = 0; k < n; ++k) {
    const AnchorNode& a = net.node(g.member_ids[k]);
    claimed[k] = a.reported_pos;
    ranges[k] = measure(true_distance(a.true_pos, g.trilateration_point), model, rng);
  }

  GroupCheck out;
  out.group_id = group_id;
  out.reference = ref->second;
  out.observed = ref->second;
  bool first = true;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        try {
          const auto r = trilaterate(std::array{claimed[a], claimed[b], claimed[c]},
                                     std::array{ranges[a], ranges[b], ranges[c]});
          if (first) out.observed = r.position;
          out.deviation = std::max(out.deviation, distance(r.position, ref->second));
        } catch (const DegenerateGeometry&) {
          out.degenerate = true;
          out.deviation = std::numeric_limits<double>::infinity();
        }
        first = false;
      }
  out.passed = !out.degenerate && out.deviation <= epsilon;
  return out;
}

/// Nearest neighbor group of `group_id` not listed in `excluded`.
inline std::optional<GroupId> choose_verifier(const Network& net, GroupId group_id,
                                              const std::set<GroupId>& excluded = {}) {
  for (GroupId h : net.group(group_id).neighbor_group_ids)
    if (net.group(h).active && !excluded.contains(h)) return h;
  return std::nullopt;
}

/// Stage two against an explicit verifier group. Each member reports its
/// ranges to the verifier's anchors and is trilaterated from them: honest
/// anchors report physical ranges, compromised ones report ranges that agree
/// with the location they claim. Returns every member whose result deviates
/// from its M2 entry by more than `epsilon`.
inline std::vector<SuspectRecord> isolate_suspects_via(const Network& net, GroupId failed_group_id,
                                                       GroupId verifier_group_id, double epsilon,
                                                       const RangingModel& model, Rng& rng) {
  const AnchorGroup& g = net.group(failed_group_id);
  const AnchorGroup& h = net.group(verifier_group_id);
  const auto ids = primary_triple(h);
  std::array<Point2, 3> anchors{};
  for (std::size_t k = 0; k < 3; ++k) anchors[k] = net.node(ids[k]).reported_pos;

  std::vector<SuspectRecord> out;
  for (NodeId a : g.member_ids) {
    const AnchorNode& node = net.node(a);
    const auto ref = net.references.m_cross.find({a, verifier_group_id});
    if (ref == net.references.m_cross.end()) throw std::out_of_range("isolate_suspects: no M2 reference for anchor");
    std::array<double, 3> ranges{};
    for (std::size_t k = 0; k < 3; ++k) {
      const AnchorNode& v = net.node(ids[k]);
      const double d = node.compromised ? true_distance(node.reported_pos, v.reported_pos)
                                        : true_distance(node.true_pos, v.true_pos);
      ranges[k] = measure(d, model, rng);
    }
    const Point2 observed = trilaterate(anchors, ranges).position;
    const double dev = distance(observed, ref->second);
    if (dev > epsilon) out.push_back({a, failed_group_id, verifier_group_id, observed, ref->second, dev});
  }
  return out;
}

/// Stage two using the nearest neighbor group outside `excluded`.
inline std::vector<SuspectRecord> isolate_suspects(const Network& net, GroupId failed_group_id, double epsilon,
                                                   const RangingModel& model, Rng& rng,
                                                   const std::set<GroupId>& excluded = {}) {
  const auto verifier = choose_verifier(net, failed_group_id, excluded);
  if (!verifier) throw NoNeighborGroup(failed_group_id);
  return isolate_suspects_via(net, failed_group_id, *verifier, epsilon, model, rng);
}

/// Both stages over every active group, in group-id order.
inline DetectionReport run_detection(const Network& net, double epsilon, const RangingModel& model, Rng& rng) {
  const auto start = std::chrono::steady_clock::now();
  DetectionReport report;
  for (const AnchorGroup& g : net.groups) {
    if (!g.active) continue;
    report.checks.push_back(group_check(net, g.group_id, epsilon, model, rng));
    if (!report.checks.back().passed) report.groups_failed.insert(g.group_id);
  }
  for (GroupId gid : report.groups_failed) {
    const auto verifier = choose_verifier(net, gid, report.groups_failed);
    if (!verifier) {
      for (NodeId a : net.group(gid).member_ids) report.indeterminate_ids.insert(a);
      continue;
    }
    for (SuspectRecord& s : isolate_suspects_via(net, gid, *verifier, epsilon, model, rng)) {
      report.flagged_ids.insert(s.anchor_id);
      report.suspects.push_back(s);
    }
  }
  report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

/// Mahalanobis confirmation of each suspect against the calibration samples
/// of its (anchor, verifier) reference, in suspect order.
inline std::vector<MahalanobisScore> confirm_suspects(const Network& net, const DetectionReport& report,
                                                      double cutoff, double variance_floor) {
  std::vector<MahalanobisScore> out;
  out.reserve(report.suspects.size());
  for (const SuspectRecord& s : report.suspects) {
    const auto samples = net.references.m_cross_samples.find({s.anchor_id, s.verifier_group_id});
    if (samples == net.references.m_cross_samples.end())
      throw InsufficientData("confirm_suspects: no calibration samples for anchor " + std::to_string(s.anchor_id));
    const auto scores = confirm_outliers(std::span<const SuspectRecord>(&s, 1),
                                         std::span<const Point2>(samples->second), s.reference_pos, cutoff,
                                         variance_floor);
    out.push_back(scores.front());
  }
  return out;
}

/// Copy of `net` with flagged anchors removed from every group and reference
/// table. Groups left with fewer than three members become inactive.
inline Network quarantine(const Network& net, const DetectionReport& report) {
  if (report.flagged_ids.empty()) return net;
  Network out = net;
  for (NodeId id : report.flagged_ids) out.nodes.at(static_cast<std::size_t>(id)).quarantined = true;
  for (AnchorGroup& g : out.groups) {
    std::erase_if(g.member_ids, [&](NodeId id) { return report.flagged_ids.contains(id); });
    if (g.member_ids.size() < 3) g.active = false;
  }
  ReferenceTable& refs = out.references;
  auto dropped = [&](NodeId a, GroupId h) { return report.flagged_ids.contains(a) || !out.groups[h].active; };
  std::erase_if(refs.m_cross, [&](const auto& e) { return dropped(e.first.first, e.first.second); });
  std::erase_if(refs.m_cross_samples, [&](const auto& e) { return dropped(e.first.first, e.first.second); });
  std::erase_if(refs.m1, [&](const auto& e) { return !out.groups[e.first].active; });
  std::erase_if(refs.m1_samples, [&](const auto& e) { return !out.groups[e.first].active; });
  link_neighbors(out);
  return out;
}

}  // namespace anchorguard
