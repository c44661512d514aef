#pragma once

// Invariant checker for NetworkConfig. Violations are returned as data.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tsnac/model.hpp"
#include "tsnac/netcalc.hpp"

namespace tsnac {

enum class ViolationKind {
  BandwidthCap,        // sum idSl > idSl_max
  DelayBound,          // worst-case delay > D_i
  Stability,           // idSl_i < sum rho
  DeadlineNotMin,      // D_i != min over resident flows' D_f
  EmptyClassState,     // empty class with idSl != 0 or D_i != D_init
  NonPositiveDeadline,
  RouteShape,          // route not a simple s -> d path over existing links
  EndToEndBudget,      // sum of per-hop D_f > D_E2E
  Residency,           // route port does not list the flow, or lists an unknown one
  CachedSums,          // burst/rate sums disagree with resident flows
};

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::BandwidthCap: return "bandwidth-cap";
    case ViolationKind::DelayBound: return "delay-bound";
    case ViolationKind::Stability: return "stability";
    case ViolationKind::DeadlineNotMin: return "deadline-not-min";
    case ViolationKind::EmptyClassState: return "empty-class-state";
    case ViolationKind::NonPositiveDeadline: return "non-positive-deadline";
    case ViolationKind::RouteShape: return "route-shape";
    case ViolationKind::EndToEndBudget: return "end-to-end-budget";
    case ViolationKind::Residency: return "residency";
    case ViolationKind::CachedSums: return "cached-sums";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::optional<std::size_t> link;
  std::optional<int> cls;
  std::optional<FlowId> flow;
  double magnitude = 0.0;  // amount by which the bound is exceeded

  friend bool operator==(const Violation&, const Violation&) = default;
};

using InvariantReport = std::vector<Violation>;

namespace detail {

// x exceeds bound beyond a relative tolerance.
inline bool exceeds(double x, double bound, double rel) { return x > bound + rel * std::max(std::abs(bound), 1e-300); }

inline bool differs(double a, double b, double rel) {
  return std::abs(a - b) > rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace detail

inline InvariantReport verify_config(const NetworkConfig& cfg, double tolerance = 1e-9) {
  InvariantReport out;
  const auto& g = cfg.graph;
  auto report = [&](ViolationKind k, std::optional<std::size_t> link, std::optional<int> cls,
                    std::optional<FlowId> flow, double mag) { out.push_back({k, link, cls, flow, mag}); };

  for (std::size_t l = 0; l < cfg.ports.size(); ++l) {
    const auto& per_class = cfg.ports[l];
    const double cap = cfg.idle_slope_max(l);
    const double total = cfg.total_idle_slope(l);
    if (detail::exceeds(total, cap, tolerance)) report(ViolationKind::BandwidthCap, l, {}, {}, total - cap);
    const auto slopes = cfg.idle_slopes(l);
    const PortParams pp = port_params(cfg, l);

    for (std::size_t k = 0; k < per_class.size(); ++k) {
      const int cls = static_cast<int>(k) + 1;
      const auto& pc = per_class[k];
      if (!(pc.deadline > 0.0)) report(ViolationKind::NonPositiveDeadline, l, cls, {}, pc.deadline);

      if (pc.empty()) {
        if (pc.idle_slope != 0.0 || pc.deadline != pc.initial_deadline || pc.burst_sum != 0.0 || pc.rate_sum != 0.0)
          report(ViolationKind::EmptyClassState, l, cls, {}, std::abs(pc.idle_slope));
        continue;
      }

      double burst = 0.0;
      double rate = 0.0;
      double dmin = std::numeric_limits<double>::infinity();
      std::set<FlowId> seen;
      for (FlowId id : pc.flows) {
        auto it = cfg.admitted.find(id);
        if (it == cfg.admitted.end() || !seen.insert(id).second || it->second.flow.cls != cls) {
          report(ViolationKind::Residency, l, cls, id, 0.0);
          continue;
        }
        const auto d = it->second.deadline_at(g.link(l).id);
        if (!d) {
          report(ViolationKind::Residency, l, cls, id, 0.0);
          continue;
        }
        burst += it->second.flow.burst();
        rate += it->second.flow.rate();
        dmin = std::min(dmin, *d);
      }
      if (detail::differs(burst, pc.burst_sum, tolerance) || detail::differs(rate, pc.rate_sum, tolerance))
        report(ViolationKind::CachedSums, l, cls, {}, std::abs(burst - pc.burst_sum));
      if (detail::exceeds(rate, pc.idle_slope, tolerance)) report(ViolationKind::Stability, l, cls, {}, rate - pc.idle_slope);
      if (std::isfinite(dmin) && detail::differs(dmin, pc.deadline, tolerance))
        report(ViolationKind::DeadlineNotMin, l, cls, {}, std::abs(dmin - pc.deadline));

      auto delay = worst_case_delay(cls, burst, slopes, pp);
      if (!delay) {
        report(ViolationKind::DelayBound, l, cls, {}, std::numeric_limits<double>::infinity());
      } else if (detail::exceeds(*delay, pc.deadline, tolerance)) {
        report(ViolationKind::DelayBound, l, cls, {}, *delay - pc.deadline);
      }
    }
  }

  for (const auto& [id, rec] : cfg.admitted) {
    const Flow& f = rec.flow;
    bool shape_ok = !rec.route.empty() && rec.route.size() == rec.per_hop_deadline.size() &&
                    rec.route.front().from == f.src && rec.route.back().to == f.dst;
    std::set<NodeId> visited{f.src};
    for (std::size_t h = 0; shape_ok && h < rec.route.size(); ++h) {
      const LinkId& lk = rec.route[h];
      if (!g.link_index(lk) || (h > 0 && rec.route[h - 1].to != lk.from) || !visited.insert(lk.to).second)
        shape_ok = false;
    }
    if (!shape_ok) {
      report(ViolationKind::RouteShape, {}, f.cls, id, 0.0);
      continue;
    }
    double sum = 0.0;
    for (double d : rec.per_hop_deadline) sum += d;
    if (detail::exceeds(sum, f.deadline, tolerance)) report(ViolationKind::EndToEndBudget, {}, f.cls, id, sum - f.deadline);
    for (const auto& lk : rec.route) {
      const std::size_t l = *g.link_index(lk);
      const auto& flows = cfg.port(l, f.cls).flows;
      if (std::find(flows.begin(), flows.end(), id) == flows.end()) report(ViolationKind::Residency, l, f.cls, id, 0.0);
    }
  }
  return out;
}

}  // namespace tsnac
