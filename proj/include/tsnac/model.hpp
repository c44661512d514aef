#pragma once

// Domain model shared by every layer: topology, flows, per-port class state
// and the mutable network configuration held by the admission controller.
//
// All quantities are SI base units: bits, seconds, bits/second.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tsnac {

enum class NodeId : std::uint32_t {};
enum class FlowId : std::uint64_t {};

constexpr std::uint32_t to_index(NodeId n) noexcept { return static_cast<std::uint32_t>(n); }
constexpr std::uint64_t to_integer(FlowId f) noexcept { return static_cast<std::uint64_t>(f); }

/// Directed link (u, v); doubles as the egress port of u towards v.
struct LinkId {
  NodeId from{};
  NodeId to{};

  friend constexpr auto operator<=>(const LinkId&, const LinkId&) = default;
};

struct LinkIdHash {
  std::size_t operator()(const LinkId& l) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{to_index(l.from)} << 32) | to_index(l.to));
  }
};

enum class NodeKind { EndSystem, Switch };

struct Node {
  std::string name;
  NodeKind kind = NodeKind::EndSystem;
};

struct Link {
  LinkId id;
  double rate = 0.0;  // C, bits/s
};

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NetworkGraph {
 public:
  NodeId add_node(std::string name, NodeKind kind) {
    if (name_index_.contains(name)) throw GraphError("duplicate node name: " + name);
    const auto id = static_cast<NodeId>(nodes_.size());
    name_index_.emplace(name, id);
    nodes_.push_back(Node{std::move(name), kind});
    out_links_.emplace_back();
    return id;
  }

  std::size_t add_link(NodeId from, NodeId to, double rate) {
    if (to_index(from) >= nodes_.size() || to_index(to) >= nodes_.size())
      throw GraphError("link endpoint is not a node");
    if (from == to) throw GraphError("self-loop link");
    if (!(rate > 0.0)) throw GraphError("link rate must be positive");
    const LinkId id{from, to};
    if (link_index_.contains(id)) throw GraphError("duplicate link");
    const std::size_t idx = links_.size();
    links_.push_back(Link{id, rate});
    link_index_.emplace(id, idx);
    auto& out = out_links_[to_index(from)];
    auto pos = std::lower_bound(out.begin(), out.end(), to, [this](std::size_t l, NodeId n) {
      return links_[l].id.to < n;
    });
    out.insert(pos, idx);
    return idx;
  }

  /// One physical connection, i.e. two directed links at the same rate.
  void connect(NodeId a, NodeId b, double rate) {
    add_link(a, b, rate);
    add_link(b, a, rate);
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Link>& links() const noexcept { return links_; }
  const Node& node(NodeId id) const { return nodes_.at(to_index(id)); }
  const Link& link(std::size_t idx) const { return links_.at(idx); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t link_count() const noexcept { return links_.size(); }

  bool is_end_system(NodeId id) const {
    return to_index(id) < nodes_.size() && nodes_[to_index(id)].kind == NodeKind::EndSystem;
  }

  std::optional<std::size_t> link_index(LinkId id) const {
    auto it = link_index_.find(id);
    if (it == link_index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require_link(LinkId id) const {
    auto idx = link_index(id);
    if (!idx) throw GraphError("unknown link");
    return *idx;
  }

  std::optional<NodeId> find_node(std::string_view name) const {
    auto it = name_index_.find(std::string(name));
    if (it == name_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Outgoing link indices, sorted by destination node id.
  const std::vector<std::size_t>& out_links(NodeId id) const { return out_links_.at(to_index(id)); }

  std::vector<NodeId> end_systems() const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].kind == NodeKind::EndSystem) out.push_back(static_cast<NodeId>(i));
    return out;
  }

  std::vector<NodeId> switches() const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].kind == NodeKind::Switch) out.push_back(static_cast<NodeId>(i));
    return out;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<std::size_t>> out_links_;
  std::unordered_map<std::string, NodeId> name_index_;
  std::unordered_map<LinkId, std::size_t, LinkIdHash> link_index_;
};

/// An AVB flow request <s, d, l, p, D_E2E> plus its traffic class (1 = highest priority).
struct Flow {
  FlowId id{};
  NodeId src{};
  NodeId dst{};
  double frame_bits = 0.0;
  double period = 0.0;
  double deadline = 0.0;  // end-to-end, seconds
  int cls = 1;

  /// Committed burst enforced by the per-flow reshaper.
  double burst() const noexcept { return frame_bits; }
  /// Committed information rate enforced by the per-flow reshaper.
  double rate() const noexcept { return frame_bits / period; }

  friend bool operator==(const Flow&, const Flow&) = default;
};

struct ClassConfig {
  int n_classes = 1;                 // N_AVB, 1..8
  double idle_slope_fraction = 0.75;  // idSl_max / C
  double max_frame_bits = 12144.0;    // l_max, network wide
  double max_be_frame_bits = 12144.0;

  double idle_slope_max(double link_rate) const noexcept { return idle_slope_fraction * link_rate; }

  void validate() const {
    if (n_classes < 1 || n_classes > 8) throw std::invalid_argument("n_classes must be in [1, 8]");
    if (!(idle_slope_fraction > 0.0) || idle_slope_fraction > 1.0)
      throw std::invalid_argument("idle slope fraction must be in (0, 1]");
    if (!(max_frame_bits > 0.0) || max_frame_bits < max_be_frame_bits)
      throw std::invalid_argument("max frame size must be positive and cover best-effort frames");
  }

  friend bool operator==(const ClassConfig&, const ClassConfig&) = default;
};

/// Per (egress port, class) configuration.
struct PortClassState {
  double deadline = 0.0;          // D_i
  double idle_slope = 0.0;        // idSl_i
  std::vector<FlowId> flows;      // resident flows, insertion order
  double initial_deadline = 0.0;  // D_init, restored when the class empties
  double burst_sum = 0.0;         // cached sum of b_f over flows
  double rate_sum = 0.0;          // cached sum of rho_f over flows

  bool empty() const noexcept { return flows.empty(); }
};

struct FlowRecord {
  Flow flow;
  std::vector<LinkId> route;
  std::vector<double> per_hop_deadline;  // aligned with route

  std::optional<double> deadline_at(LinkId link) const {
    for (std::size_t h = 0; h < route.size(); ++h)
      if (route[h] == link) return per_hop_deadline[h];
    return std::nullopt;
  }
};

/// Whole-network mutable state. Single owner; not synchronized.
struct NetworkConfig {
  NetworkGraph graph;
  ClassConfig classes;
  std::vector<std::vector<PortClassState>> ports;  // [link index][class - 1]
  std::map<FlowId, FlowRecord> admitted;

  PortClassState& port(std::size_t link, int cls) { return ports.at(link).at(static_cast<std::size_t>(cls - 1)); }
  const PortClassState& port(std::size_t link, int cls) const {
    return ports.at(link).at(static_cast<std::size_t>(cls - 1));
  }

  double idle_slope_max(std::size_t link) const { return classes.idle_slope_max(graph.link(link).rate); }

  double total_idle_slope(std::size_t link) const {
    double s = 0.0;
    for (const auto& pc : ports.at(link)) s += pc.idle_slope;
    return s;
  }

  std::vector<double> idle_slopes(std::size_t link) const {
    std::vector<double> out;
    out.reserve(ports.at(link).size());
    for (const auto& pc : ports.at(link)) out.push_back(pc.idle_slope);
    return out;
  }
};

/// A configuration with no admitted flows; every (port, class) starts at the
/// given initial deadline (one per class) with zero reserved bandwidth.
inline NetworkConfig make_empty_config(NetworkGraph graph, ClassConfig classes,
                                       const std::vector<double>& initial_deadlines) {
  classes.validate();
  if (initial_deadlines.size() != static_cast<std::size_t>(classes.n_classes))
    throw std::invalid_argument("one initial deadline per class is required");
  for (double d : initial_deadlines)
    if (!(d > 0.0)) throw std::invalid_argument("initial deadlines must be positive");

  NetworkConfig cfg{std::move(graph), classes, {}, {}};
  cfg.ports.assign(cfg.graph.link_count(), std::vector<PortClassState>(initial_deadlines.size()));
  for (auto& per_class : cfg.ports)
    for (std::size_t c = 0; c < per_class.size(); ++c) {
      per_class[c].deadline = initial_deadlines[c];
      per_class[c].initial_deadline = initial_deadlines[c];
    }
  return cfg;
}

}  // namespace tsnac
