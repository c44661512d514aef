#pragma once

// Embedded realistic cases: an automotive backbone, a space launcher and a
// crew vehicle network, each with its flow mix.
//
// Wiring is reconstructed from node, switch and link counts:
//   automotive  14 ES, 5 SW, 18 links, tree; DM3-SW3 at 1 Gbit/s, rest 100 Mbit/s
//   space       18 ES, 18 SW, one ES per SW; 24 SW-SW links (ring + 6 chords)
//   orion       31 ES, 15 SW, 55 links (31 access + ring of 15 + 9 chords)
//
// Request classes are drawn in blocks of 1000: each block holds every table
// row exactly share * 1000 times in seeded random order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsnac/model.hpp"
#include "tsnac/rng.hpp"
#include "tsnac/scenario.hpp"

namespace tsnac {

enum class RealisticCase { Automotive, SpaceLauncher, OrionCEV };

inline std::string_view to_string(RealisticCase c) {
  switch (c) {
    case RealisticCase::Automotive: return "automotive";
    case RealisticCase::SpaceLauncher: return "space";
    case RealisticCase::OrionCEV: return "orion";
  }
  return "unknown";
}

inline std::optional<RealisticCase> parse_realistic(std::string_view s) {
  if (s == "automotive") return RealisticCase::Automotive;
  if (s == "space") return RealisticCase::SpaceLauncher;
  if (s == "orion") return RealisticCase::OrionCEV;
  return std::nullopt;
}

/// One row of a flow table. Sizes in bytes, times in microseconds.
struct FlowRow {
  int cls = 1;
  std::uint32_t size_lo = 0;
  std::uint32_t size_hi = 0;
  bool size_either = false;  // exactly size_lo or size_hi
  std::uint32_t period_us = 0;
  std::uint32_t deadline_lo_us = 0;
  std::uint32_t deadline_hi_us = 0;
  std::vector<std::string> src;  // empty: any end system
  std::vector<std::string> dst;
  int permille = 0;  // share of requests, per 1000
};

struct RealisticSpec {
  RealisticCase kind;
  int n_classes;
  std::vector<FlowRow> rows;
};

inline RealisticSpec realistic_spec(RealisticCase c) {
  const std::vector<std::string> ecu{"ECU1", "ECU2", "ECU3", "ECU4", "ECU5"};
  const std::vector<std::string> cam{"CAM1", "CAM2", "CAM3", "CAM4"};
  const std::vector<std::string> dm{"DM1", "DM2", "DM3"};
  switch (c) {
    case RealisticCase::Automotive:
      return {c,
              4,
              {
                  {1, 256, 1024, false, 10000, 10000, 10000, ecu, dm, 408},
                  {2, 128, 256, true, 10000, 10000, 10000, cam, dm, 296},
                  {3, 1446, 1446, false, 1100, 30000, 30000, {"CAM1"}, {"DM1"}, 37},
                  {3, 1446, 1446, false, 1100, 30000, 30000, {"CAM2"}, {"DM1"}, 37},
                  {3, 1446, 1446, false, 1100, 30000, 30000, {"CAM3"}, {"DM2"}, 37},
                  {3, 1446, 1446, false, 1100, 30000, 30000, {"CAM4"}, {"DM2"}, 37},
                  {3, 1446, 1446, false, 1100, 30000, 30000, {"CAM4"}, {"Display1"}, 37},
                  {3, 1446, 1446, false, 1100, 30000, 30000, {"CAM4"}, {"Display2"}, 37},
                  {4, 1446, 1446, false, 1100, 30000, 30000, {"CAM4"}, {"DM3"}, 74},
              }};
    case RealisticCase::SpaceLauncher:
      return {c,
              3,
              {
                  {1, 256, 1024, false, 10000, 10000, 10000, {}, {}, 210},
                  {2, 128, 256, true, 10000, 10000, 10000, {}, {}, 780},
                  {3, 1446, 1446, false, 1100, 30000, 30000, {}, {}, 10},
              }};
    case RealisticCase::OrionCEV:
      return {c,
              4,
              {
                  {1, 64, 1518, false, 4000, 6800, 7300, {}, {}, 60},
                  {1, 64, 1518, false, 8000, 8700, 15000, {}, {}, 140},
                  {1, 64, 1518, false, 16000, 16000, 30000, {}, {}, 90},
                  {2, 64, 1518, false, 16000, 17000, 32000, {}, {}, 130},
                  {2, 64, 1518, false, 32000, 34000, 62000, {}, {}, 140},
                  {2, 64, 1518, false, 64000, 67000, 68000, {}, {}, 20},
                  {3, 64, 1518, false, 64000, 70000, 130000, {}, {}, 240},
                  {3, 64, 1518, false, 128000, 170000, 190000, {}, {}, 30},
                  {4, 64, 1518, false, 128000, 170000, 370000, {}, {}, 150},
              }};
  }
  throw std::invalid_argument("unknown realistic case");
}

inline NetworkGraph realistic_topology(RealisticCase c) {
  NetworkGraph g;
  auto sw = [&](int n) {
    std::vector<NodeId> out;
    for (int i = 1; i <= n; ++i) out.push_back(g.add_node("SW" + std::to_string(i), NodeKind::Switch));
    return out;
  };
  switch (c) {
    case RealisticCase::Automotive: {
      constexpr double kFast = 1e9;
      constexpr double kSlow = 1e8;
      const auto s = sw(5);
      g.connect(s[0], s[1], kSlow);
      g.connect(s[1], s[2], kSlow);
      g.connect(s[2], s[3], kSlow);
      g.connect(s[2], s[4], kSlow);
      const std::array<std::pair<const char*, int>, 14> attach{{
          {"ECU1", 0}, {"ECU2", 0}, {"CAM1", 0},
          {"ECU3", 1}, {"CAM2", 1}, {"DM1", 1},
          {"DM3", 2}, {"Display1", 2}, {"DM2", 2},
          {"ECU4", 3}, {"CAM3", 3}, {"Display2", 3},
          {"ECU5", 4}, {"CAM4", 4},
      }};
      for (const auto& [name, at] : attach) {
        const NodeId es = g.add_node(name, NodeKind::EndSystem);
        g.connect(es, s[static_cast<std::size_t>(at)], std::string_view(name) == "DM3" ? kFast : kSlow);
      }
      return g;
    }
    case RealisticCase::SpaceLauncher: {
      constexpr double kRate = 1e8;
      const auto s = sw(18);
      for (std::size_t i = 0; i < 18; ++i) g.connect(s[i], s[(i + 1) % 18], kRate);
      for (std::size_t i = 0; i < 6; ++i) g.connect(s[i], s[i + 9], kRate);
      for (std::size_t i = 0; i < 18; ++i)
        g.connect(g.add_node("ES" + std::to_string(i + 1), NodeKind::EndSystem), s[i], kRate);
      return g;
    }
    case RealisticCase::OrionCEV: {
      constexpr double kRate = 1e9;
      const auto s = sw(15);
      for (std::size_t i = 0; i < 15; ++i) g.connect(s[i], s[(i + 1) % 15], kRate);
      for (std::size_t i = 0; i < 9; ++i) g.connect(s[i], s[i + 5], kRate);
      for (std::size_t i = 0; i < 31; ++i)
        g.connect(g.add_node("ES" + std::to_string(i + 1), NodeKind::EndSystem), s[i % 15], kRate);
      return g;
    }
  }
  throw std::invalid_argument("unknown realistic case");
}

/// Seeded request stream for a realistic case.
class RealisticGenerator {
 public:
  RealisticGenerator(RealisticCase c, std::uint64_t seed)
      : spec_(realistic_spec(c)), graph_(realistic_topology(c)), rng_(seed, Stream::Flows) {
    for (const auto& row : spec_.rows) {
      src_.push_back(resolve(row.src));
      dst_.push_back(resolve(row.dst));
    }
    for (NodeId e : graph_.end_systems()) home_.emplace_back(e, attached_switch(graph_, e).value_or(e));
  }

  const RealisticSpec& spec() const noexcept { return spec_; }
  const NetworkGraph& graph() const noexcept { return graph_; }

  /// Row index of the next request.
  std::size_t next_row() {
    if (pos_ == block_.size()) refill();
    return block_[pos_++];
  }

  Flow next() {
    const std::size_t r = next_row();
    const FlowRow& row = spec_.rows[r];
    Flow f;
    f.id = static_cast<FlowId>(++count_);
    auto [s, d] = endpoints(r);
    f.src = s;
    f.dst = d;
    const std::uint32_t bytes =
        row.size_either ? (rng_.bernoulli(0.5) ? row.size_lo : row.size_hi)
                        : static_cast<std::uint32_t>(rng_.uniform_int(row.size_lo, row.size_hi));
    f.frame_bits = 8.0 * bytes;
    f.period = row.period_us / 1e6;
    f.deadline = row.deadline_lo_us == row.deadline_hi_us
                     ? row.deadline_lo_us / 1e6
                     : rng_.uniform(row.deadline_lo_us / 1e6, row.deadline_hi_us / 1e6);
    f.cls = row.cls;
    return f;
  }

 private:
  std::vector<NodeId> resolve(const std::vector<std::string>& names) const {
    std::vector<NodeId> out;
    for (const auto& n : names) {
      auto id = graph_.find_node(n);
      if (!id) throw std::logic_error("unknown node in flow table: " + n);
      out.push_back(*id);
    }
    return out;
  }

  std::pair<NodeId, NodeId> endpoints(std::size_t r) {
    const auto& s = src_[r];
    const auto& d = dst_[r];
    if (!s.empty()) {
      return {s[rng_.uniform_int(0, s.size() - 1)], d[rng_.uniform_int(0, d.size() - 1)]};
    }
    std::size_t a = 0;
    std::size_t b = 0;
    do {
      a = rng_.uniform_int(0, home_.size() - 1);
      b = rng_.uniform_int(0, home_.size() - 1);
    } while (home_[a].second == home_[b].second);
    return {home_[a].first, home_[b].first};
  }

  void refill() {
    block_.clear();
    for (std::size_t r = 0; r < spec_.rows.size(); ++r) block_.insert(block_.end(), spec_.rows[r].permille, r);
    rng_.shuffle(block_);
    pos_ = 0;
  }

  RealisticSpec spec_;
  NetworkGraph graph_;
  Rng rng_;
  std::vector<std::vector<NodeId>> src_;
  std::vector<std::vector<NodeId>> dst_;
  std::vector<std::pair<NodeId, NodeId>> home_;  // (end system, its switch)
  std::vector<std::size_t> block_;
  std::size_t pos_ = 0;
  std::uint64_t count_ = 0;
};

inline Scenario make_realistic_scenario(RealisticCase c, std::size_t n_flows, std::uint64_t seed, std::size_t k = 3) {
  RealisticGenerator gen(c, seed);
  Scenario sc;
  sc.name = std::string(to_string(c)) + "-seed" + std::to_string(seed);
  sc.graph = gen.graph();
  sc.classes.n_classes = gen.spec().n_classes;
  sc.k = k;
  sc.events.reserve(n_flows);
  for (std::size_t i = 0; i < n_flows; ++i) sc.events.emplace_back(AddEvent{gen.next()});
  return sc;
}

}  // namespace tsnac
