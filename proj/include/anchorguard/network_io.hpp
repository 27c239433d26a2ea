#pragma once

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "anchorguard/deployment.hpp"
#include "anchorguard/harness.hpp"

namespace anchorguard {

// Network fixture:
//
//   # anchorguard network
//   area_w=600
//   area_h=600
//   comm_radius=150
//   seed=42
//   n_nodes=122
//   n_groups=40
//   0,312.5,280.1,312.5,280.1,0,0          id,true_x,true_y,reported_x,reported_y,group_id,compromised
//   ...
//   0,0 1 2 3;315.2,281.7                  group_id,member_ids;t_x,t_y
//
// Header lines contain '=', group lines contain ';', everything else is a node.
// References are not stored; they are rebuilt from true positions on load.

struct NetworkFixture {
  Network network;
  std::uint64_t seed = 0;
};

namespace detail {
inline std::string r17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto at = s.find(sep, pos);
    out.push_back(s.substr(pos, at == std::string_view::npos ? std::string_view::npos : at - pos));
    if (at == std::string_view::npos) break;
    pos = at + 1;
  }
  return out;
}
}  // namespace detail

inline std::string write_network(const Network& net, std::uint64_t seed) {
  std::ostringstream os;
  os << "# anchorguard network\n"
     << "area_w=" << detail::r17(net.area.width) << '\n'
     << "area_h=" << detail::r17(net.area.height) << '\n'
     << "comm_radius=" << detail::r17(net.comm_radius) << '\n'
     << "seed=" << seed << '\n'
     << "n_nodes=" << net.nodes.size() << '\n'
     << "n_groups=" << net.groups.size() << '\n';
  for (const AnchorNode& n : net.nodes)
    os << n.id << ',' << detail::r17(n.true_pos.x) << ',' << detail::r17(n.true_pos.y) << ','
       << detail::r17(n.reported_pos.x) << ',' << detail::r17(n.reported_pos.y) << ',' << n.group_id << ','
       << (n.compromised ? 1 : 0) << '\n';
  for (const AnchorGroup& g : net.groups) {
    os << g.group_id << ',';
    for (std::size_t k = 0; k < g.member_ids.size(); ++k) os << (k ? " " : "") << g.member_ids[k];
    os << ';' << detail::r17(g.trilateration_point.x) << ',' << detail::r17(g.trilateration_point.y) << '\n';
  }
  return os.str();
}

inline NetworkFixture read_network(std::string_view text) {
  NetworkFixture fx;
  Network& net = fx.network;
  long long want_nodes = -1, want_groups = -1;
  int line_no = 0;
  for (std::string_view raw : detail::split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (const auto eq = line.find('='); eq != std::string_view::npos) {
      const std::string key(detail::trim(line.substr(0, eq)));
      const auto value = line.substr(eq + 1);
      if (key == "area_w") net.area.width = detail::parse_number<double>(value, line_no, key);
      else if (key == "area_h") net.area.height = detail::parse_number<double>(value, line_no, key);
      else if (key == "comm_radius") net.comm_radius = detail::parse_number<double>(value, line_no, key);
      else if (key == "seed") fx.seed = detail::parse_number<std::uint64_t>(value, line_no, key);
      else if (key == "n_nodes") want_nodes = detail::parse_number<long long>(value, line_no, key);
      else if (key == "n_groups") want_groups = detail::parse_number<long long>(value, line_no, key);
      else throw ParseError(line_no, key, "unknown header key");
      continue;
    }

    if (const auto semi = line.find(';'); semi != std::string_view::npos) {
      const auto head = detail::split(line.substr(0, semi), ',');
      const auto tail = detail::split(line.substr(semi + 1), ',');
      if (head.size() != 2 || tail.size() != 2) throw ParseError(line_no, "group", "expected group_id,members;t_x,t_y");
      AnchorGroup g;
      g.group_id = detail::parse_number<int>(head[0], line_no, "group_id");
      for (auto m : detail::split(detail::trim(head[1]), ' '))
        if (!m.empty()) g.member_ids.push_back(detail::parse_number<int>(m, line_no, "member_ids"));
      g.trilateration_point = {detail::parse_number<double>(tail[0], line_no, "t_x"),
                               detail::parse_number<double>(tail[1], line_no, "t_y")};
      if (g.group_id != static_cast<int>(net.groups.size())) throw ParseError(line_no, "group_id", "groups out of order");
      net.groups.push_back(std::move(g));
      continue;
    }

    const auto f = detail::split(line, ',');
    if (f.size() != 7) throw ParseError(line_no, "node", "expected 7 comma-separated fields");
    AnchorNode n;
    n.id = detail::parse_number<int>(f[0], line_no, "id");
    n.true_pos = {detail::parse_number<double>(f[1], line_no, "true_x"),
                  detail::parse_number<double>(f[2], line_no, "true_y")};
    n.reported_pos = {detail::parse_number<double>(f[3], line_no, "reported_x"),
                      detail::parse_number<double>(f[4], line_no, "reported_y")};
    n.group_id = detail::parse_number<int>(f[5], line_no, "group_id");
    const int flag = detail::parse_number<int>(f[6], line_no, "compromised");
    if (flag != 0 && flag != 1) throw ParseError(line_no, "compromised", "expected 0 or 1");
    n.compromised = flag == 1;
    if (n.id != static_cast<int>(net.nodes.size())) throw ParseError(line_no, "id", "nodes out of order");
    net.nodes.push_back(n);
  }

  if (want_nodes >= 0 && want_nodes != static_cast<long long>(net.nodes.size()))
    throw ParseError(line_no, "n_nodes", "node count does not match header");
  if (want_groups >= 0 && want_groups != static_cast<long long>(net.groups.size()))
    throw ParseError(line_no, "n_groups", "group count does not match header");
  for (const AnchorGroup& g : net.groups)
    for (NodeId id : g.member_ids)
      if (id < 0 || id >= static_cast<int>(net.nodes.size()) || net.nodes[static_cast<std::size_t>(id)].group_id != g.group_id)
        throw ParseError(line_no, "member_ids", "group " + std::to_string(g.group_id) + " lists a foreign node");
  link_neighbors(net);
  return fx;
}

/// The network as it stood before any compromise: reported = true positions.
inline Network pre_attack(const Network& net) {
  Network clean = net;
  for (AnchorNode& n : clean.nodes) {
    n.reported_pos = n.true_pos;
    n.compromised = false;
  }
  return clean;
}

}  // namespace anchorguard
