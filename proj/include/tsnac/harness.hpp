#pragma once

// Experiment driver: replays a scenario's events through the engine, times
// each admission, tracks bottleneck ports per group of requests and writes
// CSV/JSON results.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tsnac/baselines.hpp"
#include "tsnac/engine.hpp"
#include "tsnac/realistic.hpp"
#include "tsnac/routing.hpp"
#include "tsnac/scenario.hpp"
#include "tsnac/serialize.hpp"
#include "tsnac/verify.hpp"

namespace tsnac {

struct RunOptions {
  StrategyKind strategy = StrategyKind::Adaptive;
  double bottleneck_threshold = 0.10;
  std::size_t group_size = 50;
  std::size_t warmup = 10;
  bool verify_each_event = false;
  bool gamma_trace = false;
};

struct EventRecord {
  std::size_t event_index = 0;  // 1-based
  std::string op;               // add | remove
  std::uint64_t flow_id = 0;
  int cls = 0;
  std::string decision;  // accepted | rejected | removed
  std::string reason;
  std::string route;  // node names joined by '>'
  double gamma = 1.0;
  double cost = 0.0;
  std::int64_t elapsed_ns = 0;
  std::size_t bottleneck_count_after = 0;
};

struct GroupRecord {
  std::size_t group_index = 0;  // 1-based
  std::size_t requests = 0;
  std::size_t admitted = 0;
  std::size_t bottleneck_port_count = 0;
};

struct TraceRecord {
  std::size_t event_index = 0;
  GammaIteration it;
};

struct TimingStats {
  std::size_t samples = 0;
  double mean_s = 0.0;
  double p50_s = 0.0;
  double p90_s = 0.0;
  double p99_s = 0.0;
  double max_s = 0.0;
};

struct RunMetrics {
  std::size_t requests = 0;
  std::size_t admitted_total = 0;
  std::size_t removed_total = 0;
  std::optional<std::size_t> first_rejection_index;  // event index
  std::optional<std::size_t> first_bottleneck_group;
  std::map<std::string, std::size_t> rejections;  // by reason
  std::size_t invariant_violations = 0;
  TimingStats admission_time;
  std::vector<GroupRecord> groups;
  std::vector<EventRecord> events;
  std::vector<TraceRecord> trace;
};

inline std::size_t bottleneck_count(const NetworkConfig& cfg, double threshold) {
  std::size_t n = 0;
  for (std::size_t l = 0; l < cfg.graph.link_count(); ++l) {
    const double cap = cfg.idle_slope_max(l);
    if (cap - cfg.total_idle_slope(l) < threshold * cap) ++n;
  }
  return n;
}

inline std::string route_string(const Route& r, const NetworkGraph& g) {
  if (r.links.empty()) return {};
  std::string s = g.node(r.source()).name;
  for (const auto& l : r.links) s += ">" + g.node(l.to).name;
  return s;
}

inline TimingStats timing_stats(std::vector<double> samples) {
  TimingStats t;
  t.samples = samples.size();
  if (samples.empty()) return t;
  std::sort(samples.begin(), samples.end());
  double sum = 0.0;
  for (double s : samples) sum += s;
  t.mean_s = sum / static_cast<double>(samples.size());
  auto pct = [&](double q) {
    const auto idx = static_cast<std::size_t>(q * static_cast<double>(samples.size() - 1) + 0.5);
    return samples[std::min(idx, samples.size() - 1)];
  };
  t.p50_s = pct(0.50);
  t.p90_s = pct(0.90);
  t.p99_s = pct(0.99);
  t.max_s = samples.back();
  return t;
}

/// Replays `sc` on `cfg` with a prebuilt candidate table.
inline RunMetrics run(const Scenario& sc, NetworkConfig& cfg, const CandidateRouteTable& table, const RunOptions& opts) {
  if (opts.group_size == 0) throw std::invalid_argument("group size must be positive");
  RunMetrics m;
  std::vector<double> times;
  std::size_t admit_calls = 0;
  GroupRecord group{1, 0, 0, 0};
  std::vector<GammaIteration> trace;
  AdmitOptions ao{opts.strategy, opts.gamma_trace ? &trace : nullptr};

  for (std::size_t e = 0; e < sc.events.size(); ++e) {
    EventRecord rec;
    rec.event_index = e + 1;
    if (const auto* add = std::get_if<AddEvent>(&sc.events[e])) {
      const Flow& f = add->flow;
      rec.op = "add";
      rec.flow_id = to_integer(f.id);
      rec.cls = f.cls;
      trace.clear();
      const auto t0 = std::chrono::steady_clock::now();
      const AdmissionDecision d = admit(f, cfg, table, ao);
      const auto t1 = std::chrono::steady_clock::now();
      rec.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
      if (admit_calls++ >= opts.warmup) times.push_back(static_cast<double>(rec.elapsed_ns) * 1e-9);
      for (const auto& it : trace) m.trace.push_back({rec.event_index, it});

      ++m.requests;
      ++group.requests;
      if (d.accepted) {
        rec.decision = "accepted";
        rec.route = route_string(d.route, cfg.graph);
        rec.gamma = d.gamma;
        rec.cost = d.cost;
        ++m.admitted_total;
        ++group.admitted;
      } else {
        rec.decision = "rejected";
        rec.reason = std::string(to_string(*d.reason));
        ++m.rejections[rec.reason];
        if (!m.first_rejection_index) m.first_rejection_index = rec.event_index;
      }
    } else {
      const FlowId id = std::get<RemoveEvent>(sc.events[e]).id;
      rec.op = "remove";
      rec.flow_id = to_integer(id);
      auto it = cfg.admitted.find(id);
      if (it == cfg.admitted.end()) {
        // The flow was rejected on arrival; nothing to reclaim.
        rec.decision = "ignored";
        rec.reason = "not-admitted";
      } else {
        rec.cls = it->second.flow.cls;
        Route r{it->second.route};
        const auto t0 = std::chrono::steady_clock::now();
        remove(id, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        rec.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
        rec.decision = "removed";
        rec.route = route_string(r, cfg.graph);
        ++m.removed_total;
      }
    }
    rec.bottleneck_count_after = bottleneck_count(cfg, opts.bottleneck_threshold);
    if (opts.verify_each_event) m.invariant_violations += verify_config(cfg).size();

    if (rec.op == "add" && group.requests == opts.group_size) {
      group.bottleneck_port_count = rec.bottleneck_count_after;
      if (group.bottleneck_port_count > 0 && !m.first_bottleneck_group) m.first_bottleneck_group = group.group_index;
      m.groups.push_back(group);
      group = GroupRecord{group.group_index + 1, 0, 0, 0};
    }
    m.events.push_back(std::move(rec));
  }
  if (group.requests > 0) {
    group.bottleneck_port_count = bottleneck_count(cfg, opts.bottleneck_threshold);
    if (group.bottleneck_port_count > 0 && !m.first_bottleneck_group) m.first_bottleneck_group = group.group_index;
    m.groups.push_back(group);
  }
  m.admission_time = timing_stats(std::move(times));
  return m;
}

/// Builds the candidate table and initial configuration, then replays.
inline RunMetrics run(const Scenario& sc, const RunOptions& opts) {
  const auto table = build_table_for(sc.graph, sc.k, sc.events);
  auto cfg = scenario_config(sc, table);
  return run(sc, cfg, table, opts);
}

// ---------------------------------------------------------------- output

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline void write_events_csv(std::ostream& os, const RunMetrics& m) {
  os << "event_index,op,flow_id,class,decision,reason,route,gamma,cost,elapsed_ns,bottleneck_count_after\r\n";
  for (const auto& e : m.events) {
    os << e.event_index << ',' << e.op << ',' << e.flow_id << ',' << e.cls << ',' << e.decision << ','
       << csv_field(e.reason) << ',' << csv_field(e.route) << ',' << fmt_double(e.gamma) << ',' << fmt_double(e.cost)
       << ',' << e.elapsed_ns << ',' << e.bottleneck_count_after << "\r\n";
  }
}

inline void write_groups_csv(std::ostream& os, const RunMetrics& m) {
  os << "group_index,requests,admitted,bottleneck_port_count\r\n";
  for (const auto& g : m.groups)
    os << g.group_index << ',' << g.requests << ',' << g.admitted << ',' << g.bottleneck_port_count << "\r\n";
}

inline void write_trace_csv(std::ostream& os, const RunMetrics& m) {
  os << "event_index,iteration,gamma,slack\r\n";
  for (const auto& t : m.trace)
    os << t.event_index << ',' << t.it.iteration << ',' << fmt_double(t.it.gamma) << ',' << fmt_double(t.it.slack) << "\r\n";
}

inline Json summary_json(const RunMetrics& m, const Scenario& sc, const RunOptions& opts) {
  Json rej = Json::object();
  for (const auto& [k, v] : m.rejections) rej[k] = v;
  auto opt = [](const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); };
  return {{"format", "tsnac-run-summary"},
          {"version", kSchemaVersion},
          {"scenario", sc.name},
          {"strategy", to_string(opts.strategy)},
          {"bottleneck_threshold", opts.bottleneck_threshold},
          {"group_size", opts.group_size},
          {"requests", m.requests},
          {"admitted_total", m.admitted_total},
          {"removed_total", m.removed_total},
          {"first_rejection_index", opt(m.first_rejection_index)},
          {"first_bottleneck_group", opt(m.first_bottleneck_group)},
          {"rejections", std::move(rej)},
          {"invariant_violations", m.invariant_violations},
          {"admission_time",
           {{"warmup_discarded", opts.warmup},
            {"samples", m.admission_time.samples},
            {"mean_s", m.admission_time.mean_s},
            {"p50_s", m.admission_time.p50_s},
            {"p90_s", m.admission_time.p90_s},
            {"p99_s", m.admission_time.p99_s},
            {"max_s", m.admission_time.max_s}}}};
}

namespace detail {

template <typename Writer>
void write_file(const std::filesystem::path& p, Writer&& w) {
  std::ofstream out(p, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  w(out);
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace detail

inline void write_run_outputs(const std::filesystem::path& dir, const RunMetrics& m, const Scenario& sc,
                              const RunOptions& opts) {
  std::filesystem::create_directories(dir);
  detail::write_file(dir / "events.csv", [&](std::ostream& os) { write_events_csv(os, m); });
  detail::write_file(dir / "groups.csv", [&](std::ostream& os) { write_groups_csv(os, m); });
  if (opts.gamma_trace) detail::write_file(dir / "gamma_trace.csv", [&](std::ostream& os) { write_trace_csv(os, m); });
  write_json_file((dir / "summary.json").string(), summary_json(m, sc, opts));
}

// ---------------------------------------------------------------- specs

/// Parses "sw=22,es=110,p=0.6,flows=800,seed=S[,classes=N][,k=K]".
inline SyntheticSpec parse_er_spec(std::string_view text) {
  SyntheticSpec s;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("expected key=value, got " + std::string(item));
    const std::string key(item.substr(0, eq));
    const std::string val(item.substr(eq + 1));
    std::size_t used = 0;
    try {
      if (key == "sw") s.n_sw = std::stoul(val, &used);
      else if (key == "es") s.n_es = std::stoul(val, &used);
      else if (key == "p") s.p = std::stod(val, &used);
      else if (key == "flows") s.n_flows = std::stoul(val, &used);
      else if (key == "seed") s.seed = std::stoull(val, &used);
      else if (key == "classes") s.n_classes = std::stoi(val, &used);
      else if (key == "k") s.k = std::stoul(val, &used);
      else throw std::invalid_argument("unknown key " + key);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad value for " + key + ": " + val);
    }
    if (used != val.size()) throw std::invalid_argument("bad value for " + key + ": " + val);
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------- compare

struct MatrixCell {
  std::string label;
  std::uint64_t seed = 0;
  Scenario scenario;
};

struct CompareRow {
  std::string cell;
  std::uint64_t seed = 0;
  StrategyKind strategy = StrategyKind::Adaptive;
  RunMetrics metrics;
};

struct Matrix {
  std::vector<StrategyKind> strategies;
  std::vector<MatrixCell> cells;
  RunOptions options;
};

/// Matrix file:
///   {"format": "tsnac-matrix", "version": 1,
///    "strategies": ["adaptive", "ep", ...],
///    "group_size": 50, "bottleneck_threshold": 0.1,
///    "cells": [{"label": ..., "seeds": [..],
///               "er": {"sw":..,"es":..,"p":..,"flows":..,"classes":..,"k":..}}
///            | {"label": ..., "seeds": [..], "realistic": "orion", "flows": N}
///            | {"label": ..., "scenario": "path.json"}]}
inline Matrix matrix_from_json(const Json& j, const std::filesystem::path& base = {}) {
  detail::check_header(j, "tsnac-matrix");
  return detail::guarded([&] {
    Matrix m;
    for (const auto& s : j.at("strategies")) {
      auto k = parse_strategy(s.get<std::string>());
      if (!k) throw SchemaError("unknown strategy " + s.dump());
      m.strategies.push_back(*k);
    }
    m.options.group_size = j.value("group_size", m.options.group_size);
    m.options.bottleneck_threshold = j.value("bottleneck_threshold", m.options.bottleneck_threshold);
    m.options.verify_each_event = j.value("verify", false);
    for (const auto& c : j.at("cells")) {
      const std::string label = c.value("label", std::string("cell"));
      if (c.contains("scenario")) {
        std::filesystem::path p = c.at("scenario").get<std::string>();
        if (p.is_relative()) p = base / p;
        m.cells.push_back({label, 0, scenario_from_json(read_json_file(p.string()))});
        continue;
      }
      const auto seeds = c.at("seeds").get<std::vector<std::uint64_t>>();
      for (std::uint64_t seed : seeds) {
        if (c.contains("er")) {
          const auto& e = c.at("er");
          SyntheticSpec s;
          s.n_sw = e.value("sw", s.n_sw);
          s.n_es = e.value("es", s.n_es);
          s.p = e.value("p", s.p);
          s.n_flows = e.value("flows", s.n_flows);
          s.n_classes = e.value("classes", s.n_classes);
          s.k = e.value("k", s.k);
          s.seed = seed;
          m.cells.push_back({label, seed, make_synthetic_scenario(s)});
        } else if (c.contains("realistic")) {
          auto rc = parse_realistic(c.at("realistic").get<std::string>());
          if (!rc) throw SchemaError("unknown realistic case");
          m.cells.push_back({label, seed, make_realistic_scenario(*rc, c.at("flows").get<std::size_t>(), seed)});
        } else {
          throw SchemaError("cell needs er, realistic or scenario");
        }
      }
    }
    return m;
  });
}

inline std::vector<CompareRow> compare(const Matrix& m) {
  std::vector<CompareRow> rows;
  for (const auto& cell : m.cells) {
    const auto table = build_table_for(cell.scenario.graph, cell.scenario.k, cell.scenario.events);
    for (StrategyKind k : m.strategies) {
      auto cfg = scenario_config(cell.scenario, table);
      RunOptions o = m.options;
      o.strategy = k;
      rows.push_back({cell.label, cell.seed, k, run(cell.scenario, cfg, table, o)});
    }
  }
  return rows;
}

inline void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
  os << "cell,seed,strategy,requests,admitted,first_rejection_index,first_bottleneck_group,mean_admission_time_s,"
        "invariant_violations\r\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    os << csv_field(r.cell) << ',' << r.seed << ',' << to_string(r.strategy) << ',' << m.requests << ','
       << m.admitted_total << ',' << (m.first_rejection_index ? std::to_string(*m.first_rejection_index) : "") << ','
       << (m.first_bottleneck_group ? std::to_string(*m.first_bottleneck_group) : "") << ','
       << fmt_double(m.admission_time.mean_s) << ',' << m.invariant_violations << "\r\n";
  }
}

}  // namespace tsnac
