#pragma once

// Offline pre-routing: k loop-free shortest routes (hop count) per pair of
// end systems, computed with Yen's algorithm. Ties are broken by the
// lexicographic order of the link sequence.
//
// End systems never forward: they appear only as the first and last node.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tsnac/expected.hpp"
#include "tsnac/model.hpp"

namespace tsnac {

struct Route {
  std::vector<LinkId> links;

  std::size_t length() const noexcept { return links.size(); }
  NodeId source() const { return links.front().from; }
  NodeId destination() const { return links.back().to; }

  friend bool operator==(const Route&, const Route&) = default;
};

struct RoutingError {
  enum class Kind { InvalidEndpoints, NoPath };
  Kind kind = Kind::NoPath;
};

namespace detail {

using NodePath = std::vector<NodeId>;

// Orders paths by hop count, then lexicographically by node sequence. For
// paths sharing their first node this equals the link-sequence order.
struct PathOrder {
  bool operator()(const NodePath& a, const NodePath& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

class PathFinder {
 public:
  explicit PathFinder(const NetworkGraph& g) : g_(g), in_links_(g.node_count()) {
    for (std::size_t l = 0; l < g.link_count(); ++l) in_links_[to_index(g.link(l).id.to)].push_back(l);
  }

  // Lexicographically smallest shortest path from `from` to `to` that avoids
  // blocked nodes and links and transits only switches.
  std::optional<NodePath> shortest(NodeId from, NodeId to, const std::vector<char>& blocked_node,
                                   const std::vector<char>& blocked_link) const {
    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<int> dist(g_.node_count(), kInf);
    std::deque<NodeId> queue;
    dist[to_index(to)] = 0;
    queue.push_back(to);
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop_front();
      if (v == from) break;
      // Only the destination and switches may be reached through.
      if (v != to && g_.node(v).kind != NodeKind::Switch) continue;
      for (std::size_t l : in_links_[to_index(v)]) {
        if (blocked_link[l]) continue;
        const NodeId u = g_.link(l).id.from;
        if (blocked_node[to_index(u)] || dist[to_index(u)] != kInf) continue;
        if (u != from && g_.node(u).kind != NodeKind::Switch) continue;
        dist[to_index(u)] = dist[to_index(v)] + 1;
        queue.push_back(u);
      }
    }
    if (dist[to_index(from)] == kInf) return std::nullopt;

    NodePath path{from};
    NodeId cur = from;
    while (cur != to) {
      const int want = dist[to_index(cur)] - 1;
      std::optional<NodeId> next;
      for (std::size_t l : g_.out_links(cur)) {  // sorted by head node
        const NodeId v = g_.link(l).id.to;
        if (blocked_link[l] || blocked_node[to_index(v)] || dist[to_index(v)] != want) continue;
        if (v != to && g_.node(v).kind != NodeKind::Switch) continue;
        next = v;
        break;
      }
      if (!next) return std::nullopt;  // unreachable by construction
      path.push_back(*next);
      cur = *next;
    }
    return path;
  }

  const NetworkGraph& graph() const noexcept { return g_; }

 private:
  const NetworkGraph& g_;
  std::vector<std::vector<std::size_t>> in_links_;
};

inline Route to_route(const NodePath& p) {
  Route r;
  r.links.reserve(p.size() - 1);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) r.links.push_back(LinkId{p[i], p[i + 1]});
  return r;
}

inline Expected<std::vector<Route>, RoutingError> yen(const PathFinder& pf, NodeId s, NodeId d, std::size_t k) {
  const NetworkGraph& g = pf.graph();
  if (s == d || !g.is_end_system(s) || !g.is_end_system(d))
    return unexpected(RoutingError{RoutingError::Kind::InvalidEndpoints});

  std::vector<char> blocked_node(g.node_count(), 0);
  std::vector<char> blocked_link(g.link_count(), 0);
  auto first = pf.shortest(s, d, blocked_node, blocked_link);
  if (!first) return unexpected(RoutingError{RoutingError::Kind::NoPath});

  std::vector<NodePath> accepted{std::move(*first)};
  std::set<NodePath, PathOrder> candidates;
  while (accepted.size() < k) {
    const NodePath& last = accepted.back();
    for (std::size_t i = 0; i + 1 < last.size(); ++i) {
      const NodeId spur = last[i];
      std::fill(blocked_node.begin(), blocked_node.end(), 0);
      std::fill(blocked_link.begin(), blocked_link.end(), 0);
      for (const auto& p : accepted) {
        if (p.size() > i + 1 && std::equal(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(i) + 1, last.begin()))
          blocked_link[g.require_link(LinkId{p[i], p[i + 1]})] = 1;
      }
      for (std::size_t r = 0; r < i; ++r) blocked_node[to_index(last[r])] = 1;

      auto spur_path = pf.shortest(spur, d, blocked_node, blocked_link);
      if (!spur_path) continue;
      NodePath total(last.begin(), last.begin() + static_cast<std::ptrdiff_t>(i));
      total.insert(total.end(), spur_path->begin(), spur_path->end());
      candidates.insert(std::move(total));
    }
    if (candidates.empty()) break;
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }

  std::vector<Route> out;
  out.reserve(accepted.size());
  for (const auto& p : accepted) out.push_back(to_route(p));
  return out;
}

}  // namespace detail

/// Up to k loop-free shortest routes from s to d, ordered by hop count then
/// link sequence.
inline Expected<std::vector<Route>, RoutingError> k_shortest(const NetworkGraph& g, NodeId s, NodeId d,
                                                             std::size_t k) {
  if (k == 0) return std::vector<Route>{};
  return detail::yen(detail::PathFinder(g), s, d, k);
}

/// Candidate route sets R(s, d), built offline; online lookup is retrieval only.
class CandidateRouteTable {
 public:
  using Pair = std::pair<NodeId, NodeId>;

  CandidateRouteTable() = default;
  explicit CandidateRouteTable(std::size_t k) : k_(k) {}

  std::size_t k() const noexcept { return k_; }

  const std::vector<Route>& lookup(NodeId s, NodeId d) const {
    static const std::vector<Route> kEmpty;
    auto it = routes_.find({s, d});
    return it == routes_.end() ? kEmpty : it->second;
  }

  bool contains(NodeId s, NodeId d) const { return routes_.contains({s, d}); }

  void set(NodeId s, NodeId d, std::vector<Route> routes) { routes_[{s, d}] = std::move(routes); }

  const std::map<Pair, std::vector<Route>>& entries() const noexcept { return routes_; }
  std::size_t size() const noexcept { return routes_.size(); }

  friend bool operator==(const CandidateRouteTable&, const CandidateRouteTable&) = default;

 private:
  std::size_t k_ = 3;
  std::map<Pair, std::vector<Route>> routes_;
};

/// Builds the table for `pairs`, or for every ordered pair of distinct end
/// systems when `pairs` is empty. Unreachable pairs map to an empty list.
inline CandidateRouteTable build_candidate_table(const NetworkGraph& g, std::size_t k,
                                                 std::span<const CandidateRouteTable::Pair> pairs = {}) {
  CandidateRouteTable table(k);
  const detail::PathFinder pf(g);
  auto add = [&](NodeId s, NodeId d) {
    if (table.contains(s, d)) return;
    auto routes = k == 0 ? Expected<std::vector<Route>, RoutingError>(std::vector<Route>{}) : detail::yen(pf, s, d, k);
    table.set(s, d, routes ? std::move(*routes) : std::vector<Route>{});
  };
  if (pairs.empty()) {
    const auto es = g.end_systems();
    for (NodeId s : es)
      for (NodeId d : es)
        if (s != d) add(s, d);
  } else {
    for (const auto& [s, d] : pairs) add(s, d);
  }
  return table;
}

}  // namespace tsnac
