#pragma once

// Experiment inputs: Erdos-Renyi switch topologies with attached end
// systems, random flow sets, deadline-ordered class assignment and the
// event sequences that drive the engine.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tsnac/engine.hpp"
#include "tsnac/model.hpp"
#include "tsnac/rng.hpp"
#include "tsnac/routing.hpp"

namespace tsnac {

struct SyntheticSpec {
  std::size_t n_sw = 22;
  std::size_t n_es = 110;
  double p = 0.6;
  std::size_t n_flows = 800;
  std::uint32_t size_min_bytes = 64;
  std::uint32_t size_max_bytes = 1518;
  double period_min = 2e-3;
  double period_max = 9e-3;
  double deadline_min = 2e-3;
  double deadline_max = 9e-3;
  int n_classes = 1;
  double idle_slope_fraction = 0.75;
  double link_rate = 1e8;
  std::size_t k = 3;
  std::uint64_t seed = 1;
  int max_retries = 10000;

  void validate() const {
    if (n_sw < 2) throw std::invalid_argument("at least two switches are required");
    if (n_es < 2) throw std::invalid_argument("at least two end systems are required");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("link probability must be in [0, 1]");
    if (size_min_bytes == 0 || size_min_bytes > size_max_bytes) throw std::invalid_argument("bad size range");
    if (!(period_min > 0.0) || period_min > period_max) throw std::invalid_argument("bad period range");
    if (!(deadline_min > 0.0) || deadline_min > deadline_max) throw std::invalid_argument("bad deadline range");
    if (n_classes < 1 || n_classes > 8) throw std::invalid_argument("n_classes must be in [1, 8]");
    if (!(link_rate > 0.0)) throw std::invalid_argument("link rate must be positive");
  }
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The switch an end system is wired to (its first neighbour).
inline std::optional<NodeId> attached_switch(const NetworkGraph& g, NodeId es) {
  for (std::size_t l : g.out_links(es)) {
    const NodeId v = g.link(l).id.to;
    if (g.node(v).kind == NodeKind::Switch) return v;
  }
  return std::nullopt;
}

namespace detail {

inline bool connected(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (auto [a, b] : edges) {
    const auto ra = find(a);
    const auto rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

}  // namespace detail

/// Switches SW1..SWn (node ids 0..n_sw-1) then end systems ES1..ESm.
inline NetworkGraph gen_er_topology(const SyntheticSpec& spec) {
  spec.validate();
  Rng topo(spec.seed, Stream::Topology);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  bool ok = false;
  for (int attempt = 0; attempt < spec.max_retries && !ok; ++attempt) {
    edges.clear();
    for (std::size_t a = 0; a < spec.n_sw; ++a)
      for (std::size_t b = a + 1; b < spec.n_sw; ++b)
        if (topo.bernoulli(spec.p)) edges.emplace_back(a, b);
    ok = detail::connected(spec.n_sw, edges);
  }
  if (!ok) throw GenerationError("no connected switch graph within the retry bound; p is too small");

  NetworkGraph g;
  std::vector<NodeId> sw;
  for (std::size_t i = 0; i < spec.n_sw; ++i) sw.push_back(g.add_node("SW" + std::to_string(i + 1), NodeKind::Switch));
  for (auto [a, b] : edges) g.connect(sw[a], sw[b], spec.link_rate);

  Rng attach(spec.seed, Stream::Attachment);
  std::vector<NodeId> order = sw;
  attach.shuffle(order);
  for (std::size_t i = 0; i < spec.n_es; ++i) {
    const NodeId es = g.add_node("ES" + std::to_string(i + 1), NodeKind::EndSystem);
    g.connect(es, order[i % order.size()], spec.link_rate);
  }
  return g;
}

/// Flow ids 1..n_flows, all class 1. Source and destination are distinct end
/// systems on different switches.
inline std::vector<Flow> gen_flows(const SyntheticSpec& spec, const NetworkGraph& g) {
  spec.validate();
  const auto es = g.end_systems();
  std::vector<NodeId> home;
  home.reserve(es.size());
  for (NodeId e : es) home.push_back(attached_switch(g, e).value_or(e));
  const bool any_pair = std::any_of(home.begin(), home.end(), [&](NodeId h) { return h != home.front(); });
  if (spec.n_flows > 0 && !any_pair) throw GenerationError("all end systems share one switch");

  Rng rng(spec.seed, Stream::Flows);
  std::vector<Flow> flows;
  flows.reserve(spec.n_flows);
  for (std::size_t i = 0; i < spec.n_flows; ++i) {
    std::size_t s = 0;
    std::size_t d = 0;
    do {
      s = rng.uniform_int(0, es.size() - 1);
      d = rng.uniform_int(0, es.size() - 1);
    } while (home[s] == home[d]);
    Flow f;
    f.id = static_cast<FlowId>(i + 1);
    f.src = es[s];
    f.dst = es[d];
    f.frame_bits = 8.0 * static_cast<double>(rng.uniform_int(spec.size_min_bytes, spec.size_max_bytes));
    f.period = rng.uniform(spec.period_min, spec.period_max);
    f.deadline = rng.uniform(spec.deadline_min, spec.deadline_max);
    f.cls = 1;
    flows.push_back(f);
  }
  return flows;
}

/// Sorts by end-to-end deadline (ties by id) and cuts into n_classes groups
/// of equal size (differing by at most one); tightest group becomes class 1.
inline void assign_classes(std::vector<Flow>& flows, int n_classes) {
  if (n_classes < 1) throw std::invalid_argument("n_classes must be positive");
  std::vector<std::size_t> order(flows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (flows[a].deadline != flows[b].deadline) return flows[a].deadline < flows[b].deadline;
    return to_integer(flows[a].id) < to_integer(flows[b].id);
  });
  const std::size_t n = flows.size();
  for (std::size_t rank = 0; rank < n; ++rank)
    flows[order[rank]].cls = static_cast<int>(rank * static_cast<std::size_t>(n_classes) / n) + 1;
}

struct AddEvent {
  Flow flow;
  friend bool operator==(const AddEvent&, const AddEvent&) = default;
};

struct RemoveEvent {
  FlowId id{};
  friend bool operator==(const RemoveEvent&, const RemoveEvent&) = default;
};

using Event = std::variant<AddEvent, RemoveEvent>;

struct Scenario {
  std::string name;
  NetworkGraph graph;
  ClassConfig classes;
  std::size_t k = 3;
  std::optional<std::vector<double>> initial_deadlines;
  std::vector<Event> events;
};

/// Checks that removals reference ids added earlier and not yet removed.
inline void validate_events(const std::vector<Event>& events) {
  std::vector<FlowId> live;
  std::vector<FlowId> seen;
  for (const auto& e : events) {
    if (const auto* add = std::get_if<AddEvent>(&e)) {
      seen.push_back(add->flow.id);
      live.push_back(add->flow.id);
    } else {
      const FlowId id = std::get<RemoveEvent>(e).id;
      auto it = std::find(live.begin(), live.end(), id);
      if (it == live.end()) throw std::invalid_argument("remove of unknown flow id " + std::to_string(to_integer(id)));
      live.erase(it);
    }
  }
}

inline std::vector<Event> add_events(const std::vector<Flow>& flows) {
  std::vector<Event> out;
  out.reserve(flows.size());
  for (const auto& f : flows) out.emplace_back(AddEvent{f});
  return out;
}

inline Scenario make_synthetic_scenario(const SyntheticSpec& spec) {
  Scenario sc;
  sc.name = "er-sw" + std::to_string(spec.n_sw) + "-es" + std::to_string(spec.n_es) + "-seed" + std::to_string(spec.seed);
  sc.graph = gen_er_topology(spec);
  sc.classes.n_classes = spec.n_classes;
  sc.classes.idle_slope_fraction = spec.idle_slope_fraction;
  sc.classes.max_frame_bits = 8.0 * spec.size_max_bytes > 12144.0 ? 8.0 * spec.size_max_bytes : 12144.0;
  sc.k = spec.k;
  auto flows = gen_flows(spec, sc.graph);
  assign_classes(flows, spec.n_classes);
  sc.events = add_events(flows);
  return sc;
}

/// Candidate table restricted to the (s, d) pairs requested by `events`.
inline CandidateRouteTable build_table_for(const NetworkGraph& g, std::size_t k, const std::vector<Event>& events) {
  std::vector<CandidateRouteTable::Pair> pairs;
  for (const auto& e : events)
    if (const auto* add = std::get_if<AddEvent>(&e)) pairs.emplace_back(add->flow.src, add->flow.dst);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return build_candidate_table(g, k, pairs);
}

/// Per class: largest requested end-to-end deadline and shortest candidate
/// route. A class without requests takes the figures of all requests; with
/// no requests at all both default to 1 s and one hop.
inline DeadlineStats deadline_stats(const std::vector<Event>& events, const CandidateRouteTable& table, int n_classes) {
  const auto n = static_cast<std::size_t>(n_classes);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  DeadlineStats st{std::vector<double>(n, 0.0), std::vector<std::size_t>(n, kNone)};
  double all_max = 0.0;
  std::size_t all_min = kNone;
  for (const auto& e : events) {
    const auto* add = std::get_if<AddEvent>(&e);
    if (!add || add->flow.cls < 1 || add->flow.cls > n_classes) continue;
    const auto c = static_cast<std::size_t>(add->flow.cls - 1);
    st.max_deadline[c] = std::max(st.max_deadline[c], add->flow.deadline);
    all_max = std::max(all_max, add->flow.deadline);
    const auto& routes = table.lookup(add->flow.src, add->flow.dst);
    if (!routes.empty()) {
      st.min_route_length[c] = std::min(st.min_route_length[c], routes.front().length());
      all_min = std::min(all_min, routes.front().length());
    }
  }
  if (all_max == 0.0) all_max = 1.0;
  if (all_min == kNone) all_min = 1;
  for (std::size_t c = 0; c < n; ++c) {
    if (st.max_deadline[c] == 0.0) st.max_deadline[c] = all_max;
    if (st.min_route_length[c] == kNone) st.min_route_length[c] = all_min;
  }
  return st;
}

/// Initial configuration of a scenario: explicit initial deadlines when
/// given, otherwise derived from the requested flows.
inline NetworkConfig scenario_config(const Scenario& sc, const CandidateRouteTable& table) {
  if (sc.initial_deadlines) return make_empty_config(sc.graph, sc.classes, *sc.initial_deadlines);
  return initial_config(sc.graph, sc.classes, deadline_stats(sc.events, table, sc.classes.n_classes));
}

}  // namespace tsnac
