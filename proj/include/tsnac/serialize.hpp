#pragma once

// JSON forms of scenarios and network configurations. Every document starts
// with {"format": ..., "version": 1}. Nodes are referenced by name; links are
// directed and listed once per direction.

#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tsnac/model.hpp"
#include "tsnac/scenario.hpp"

namespace tsnac {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kScenarioFormat = "tsnac-scenario";
inline constexpr const char* kConfigFormat = "tsnac-config";
inline constexpr const char* kRoutesFormat = "tsnac-routes";

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_header(const Json& j, const char* format) {
  if (!j.is_object() || !j.contains("format") || j.at("format") != format)
    throw SchemaError(std::string("expected a ") + format + " document");
  if (!j.contains("version") || j.at("version") != kSchemaVersion)
    throw SchemaError("unsupported schema version");
}

inline NodeId node_by_name(const NetworkGraph& g, const Json& name) {
  auto id = g.find_node(name.get<std::string>());
  if (!id) throw SchemaError("unknown node " + name.dump());
  return *id;
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw SchemaError(e.what());
  } catch (const GraphError& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace detail

inline Json to_json(const NetworkGraph& g) {
  Json nodes = Json::array();
  for (const auto& n : g.nodes()) nodes.push_back({{"name", n.name}, {"kind", n.kind == NodeKind::Switch ? "switch" : "end-system"}});
  Json links = Json::array();
  for (const auto& l : g.links())
    links.push_back({{"from", g.node(l.id.from).name}, {"to", g.node(l.id.to).name}, {"rate", l.rate}});
  return {{"nodes", std::move(nodes)}, {"links", std::move(links)}};
}

inline NetworkGraph graph_from_json(const Json& j) {
  return detail::guarded([&] {
    NetworkGraph g;
    for (const auto& n : j.at("nodes")) {
      const auto kind = n.at("kind").get<std::string>();
      if (kind != "switch" && kind != "end-system") throw SchemaError("bad node kind " + kind);
      g.add_node(n.at("name").get<std::string>(), kind == "switch" ? NodeKind::Switch : NodeKind::EndSystem);
    }
    for (const auto& l : j.at("links"))
      g.add_link(detail::node_by_name(g, l.at("from")), detail::node_by_name(g, l.at("to")), l.at("rate").get<double>());
    return g;
  });
}

inline Json to_json(const ClassConfig& c) {
  return {{"n_classes", c.n_classes},
          {"idle_slope_fraction", c.idle_slope_fraction},
          {"max_frame_bits", c.max_frame_bits},
          {"max_be_frame_bits", c.max_be_frame_bits}};
}

inline ClassConfig class_config_from_json(const Json& j) {
  return detail::guarded([&] {
    ClassConfig c;
    c.n_classes = j.at("n_classes").get<int>();
    c.idle_slope_fraction = j.value("idle_slope_fraction", c.idle_slope_fraction);
    c.max_frame_bits = j.value("max_frame_bits", c.max_frame_bits);
    c.max_be_frame_bits = j.value("max_be_frame_bits", c.max_be_frame_bits);
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw SchemaError(e.what());
    }
    return c;
  });
}

inline Json to_json(const Flow& f, const NetworkGraph& g) {
  return {{"id", to_integer(f.id)},         {"src", g.node(f.src).name},  {"dst", g.node(f.dst).name},
          {"frame_bits", f.frame_bits},     {"period", f.period},         {"deadline", f.deadline},
          {"class", f.cls}};
}

inline Flow flow_from_json(const Json& j, const NetworkGraph& g) {
  return detail::guarded([&] {
    Flow f;
    f.id = static_cast<FlowId>(j.at("id").get<std::uint64_t>());
    f.src = detail::node_by_name(g, j.at("src"));
    f.dst = detail::node_by_name(g, j.at("dst"));
    f.frame_bits = j.at("frame_bits").get<double>();
    f.period = j.at("period").get<double>();
    f.deadline = j.at("deadline").get<double>();
    f.cls = j.at("class").get<int>();
    return f;
  });
}

inline Json link_to_json(const LinkId& l, const NetworkGraph& g) {
  return Json::array({g.node(l.from).name, g.node(l.to).name});
}

inline LinkId link_from_json(const Json& j, const NetworkGraph& g) {
  if (!j.is_array() || j.size() != 2) throw SchemaError("link must be [from, to]");
  return LinkId{detail::node_by_name(g, j[0]), detail::node_by_name(g, j[1])};
}

inline Json to_json(const Scenario& sc) {
  Json events = Json::array();
  for (const auto& e : sc.events) {
    if (const auto* add = std::get_if<AddEvent>(&e))
      events.push_back({{"op", "add"}, {"flow", to_json(add->flow, sc.graph)}});
    else
      events.push_back({{"op", "remove"}, {"id", to_integer(std::get<RemoveEvent>(e).id)}});
  }
  Json j{{"format", kScenarioFormat},
         {"version", kSchemaVersion},
         {"name", sc.name},
         {"topology", to_json(sc.graph)},
         {"class_config", to_json(sc.classes)},
         {"k", sc.k}};
  if (sc.initial_deadlines) j["initial_deadlines"] = *sc.initial_deadlines;
  j["events"] = std::move(events);
  return j;
}

inline Scenario scenario_from_json(const Json& j) {
  detail::check_header(j, kScenarioFormat);
  return detail::guarded([&] {
    Scenario sc;
    sc.name = j.value("name", std::string{});
    sc.graph = graph_from_json(j.at("topology"));
    sc.classes = class_config_from_json(j.at("class_config"));
    sc.k = j.value("k", std::size_t{3});
    if (j.contains("initial_deadlines")) sc.initial_deadlines = j.at("initial_deadlines").get<std::vector<double>>();
    for (const auto& e : j.at("events")) {
      const auto op = e.at("op").get<std::string>();
      if (op == "add")
        sc.events.emplace_back(AddEvent{flow_from_json(e.at("flow"), sc.graph)});
      else if (op == "remove")
        sc.events.emplace_back(RemoveEvent{static_cast<FlowId>(e.at("id").get<std::uint64_t>())});
      else
        throw SchemaError("unknown event op " + op);
    }
    try {
      validate_events(sc.events);
    } catch (const std::invalid_argument& e) {
      throw SchemaError(e.what());
    }
    return sc;
  });
}

inline Json to_json(const NetworkConfig& cfg) {
  const auto& g = cfg.graph;
  Json ports = Json::array();
  for (std::size_t l = 0; l < cfg.ports.size(); ++l) {
    Json classes = Json::array();
    for (const auto& pc : cfg.ports[l]) {
      Json flows = Json::array();
      for (FlowId id : pc.flows) flows.push_back(to_integer(id));
      classes.push_back({{"deadline", pc.deadline},
                         {"idle_slope", pc.idle_slope},
                         {"initial_deadline", pc.initial_deadline},
                         {"burst_sum", pc.burst_sum},
                         {"rate_sum", pc.rate_sum},
                         {"flows", std::move(flows)}});
    }
    ports.push_back({{"link", link_to_json(g.link(l).id, g)}, {"classes", std::move(classes)}});
  }
  Json admitted = Json::array();
  for (const auto& [id, rec] : cfg.admitted) {
    Json route = Json::array();
    for (const auto& l : rec.route) route.push_back(link_to_json(l, g));
    admitted.push_back({{"flow", to_json(rec.flow, g)}, {"route", std::move(route)}, {"per_hop_deadline", rec.per_hop_deadline}});
  }
  return {{"format", kConfigFormat},   {"version", kSchemaVersion}, {"topology", to_json(g)},
          {"class_config", to_json(cfg.classes)}, {"ports", std::move(ports)}, {"admitted", std::move(admitted)}};
}

inline NetworkConfig config_from_json(const Json& j) {
  detail::check_header(j, kConfigFormat);
  return detail::guarded([&] {
    NetworkConfig cfg;
    cfg.graph = graph_from_json(j.at("topology"));
    cfg.classes = class_config_from_json(j.at("class_config"));
    const auto n = static_cast<std::size_t>(cfg.classes.n_classes);
    cfg.ports.assign(cfg.graph.link_count(), std::vector<PortClassState>(n));
    const auto& ports = j.at("ports");
    if (ports.size() != cfg.graph.link_count()) throw SchemaError("one port entry per link is required");
    for (const auto& p : ports) {
      const std::size_t l = cfg.graph.require_link(link_from_json(p.at("link"), cfg.graph));
      const auto& classes = p.at("classes");
      if (classes.size() != n) throw SchemaError("one class entry per class is required");
      for (std::size_t c = 0; c < n; ++c) {
        auto& pc = cfg.ports[l][c];
        const auto& jc = classes[c];
        pc.deadline = jc.at("deadline").get<double>();
        pc.idle_slope = jc.at("idle_slope").get<double>();
        pc.initial_deadline = jc.at("initial_deadline").get<double>();
        pc.burst_sum = jc.at("burst_sum").get<double>();
        pc.rate_sum = jc.at("rate_sum").get<double>();
        for (const auto& id : jc.at("flows")) pc.flows.push_back(static_cast<FlowId>(id.get<std::uint64_t>()));
      }
    }
    for (const auto& a : j.at("admitted")) {
      FlowRecord rec;
      rec.flow = flow_from_json(a.at("flow"), cfg.graph);
      for (const auto& l : a.at("route")) rec.route.push_back(link_from_json(l, cfg.graph));
      rec.per_hop_deadline = a.at("per_hop_deadline").get<std::vector<double>>();
      if (!cfg.admitted.emplace(rec.flow.id, rec).second) throw SchemaError("duplicate admitted flow");
    }
    return cfg;
  });
}

/// Candidate routes as node-name sequences, one entry per (src, dst) pair.
/// The graph itself is not stored.
inline Json to_json(const CandidateRouteTable& t, const NetworkGraph& g) {
  Json entries = Json::array();
  for (const auto& [pair, routes] : t.entries()) {
    Json rs = Json::array();
    for (const auto& r : routes) {
      Json nodes = Json::array({g.node(r.source()).name});
      for (const auto& l : r.links) nodes.push_back(g.node(l.to).name);
      rs.push_back(std::move(nodes));
    }
    entries.push_back({{"src", g.node(pair.first).name}, {"dst", g.node(pair.second).name}, {"routes", std::move(rs)}});
  }
  return {{"format", kRoutesFormat}, {"version", kSchemaVersion}, {"k", t.k()}, {"entries", std::move(entries)}};
}

inline CandidateRouteTable route_table_from_json(const Json& j, const NetworkGraph& g) {
  detail::check_header(j, kRoutesFormat);
  return detail::guarded([&] {
    CandidateRouteTable t(j.at("k").get<std::size_t>());
    for (const auto& e : j.at("entries")) {
      const NodeId s = detail::node_by_name(g, e.at("src"));
      const NodeId d = detail::node_by_name(g, e.at("dst"));
      std::vector<Route> routes;
      for (const auto& nodes : e.at("routes")) {
        if (!nodes.is_array() || nodes.size() < 2) throw SchemaError("route needs at least two nodes");
        Route r;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
          const LinkId l{detail::node_by_name(g, nodes[i]), detail::node_by_name(g, nodes[i + 1])};
          if (!g.link_index(l)) throw SchemaError("route uses a missing link");
          r.links.push_back(l);
        }
        if (r.source() != s || r.destination() != d) throw SchemaError("route endpoints do not match its entry");
        routes.push_back(std::move(r));
      }
      if (routes.size() > t.k()) throw SchemaError("more routes than k");
      t.set(s, d, std::move(routes));
    }
    return t;
  });
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace tsnac
