#pragma once

// Online admission control: flow addition over pre-computed candidate routes
// and flow removal with bandwidth reclamation. Only the ports on the affected
// route, and within them only classes at or below the flow's priority, are
// ever touched.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tsnac/baselines.hpp"
#include "tsnac/deadline_adjust.hpp"
#include "tsnac/model.hpp"
#include "tsnac/netcalc.hpp"
#include "tsnac/routing.hpp"

namespace tsnac {

class AdmissionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class RejectReason { NoCandidateRoute, DeadlineInfeasible, BandwidthExceeded };

inline std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::NoCandidateRoute: return "no-candidate-route";
    case RejectReason::DeadlineInfeasible: return "deadline-infeasible";
    case RejectReason::BandwidthExceeded: return "bandwidth-exceeded";
  }
  return "unknown";
}

/// State change of one port for one admission or removal.
struct PortDelta {
  std::size_t link = 0;
  int cls = 1;
  double old_deadline = 0.0;
  double new_deadline = 0.0;
  std::vector<double> old_slopes;
  std::vector<double> new_slopes;
};

struct RouteEvaluation {
  std::size_t candidate_index = 0;
  Route route;
  std::vector<std::size_t> links;
  double existing_sum = 0.0;  // sum of the class's current local deadlines along the route
  bool adjusted = false;      // existing deadlines did not fit; a strategy reduced them
  double gamma = 1.0;
  int iterations = 0;
  // Sum of adjusted deadlines with all residual bandwidth granted (adaptive
  // strategy); +inf when the class cannot meet any deadline at some port.
  double full_grant_sum = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> adjusted_deadlines;   // per hop
  std::vector<double> class_deadlines;      // D_i per hop after admission
  std::vector<std::vector<double>> slopes;  // tentative idSl per hop, all classes
  bool feasible = false;
  std::optional<RejectReason> failure;
  std::string detail;
  double cost_delta = 0.0;  // change of the network cost over route ports
};

struct AdmissionDecision {
  FlowId flow{};
  bool accepted = false;
  std::optional<RejectReason> reason;
  std::size_t route_index = 0;
  Route route;
  double gamma = 1.0;
  double cost = 0.0;
  std::vector<PortDelta> deltas;
  std::vector<RouteEvaluation> evaluations;
};

struct AdmitOptions {
  StrategyKind strategy = StrategyKind::Adaptive;
  std::vector<GammaIteration>* trace = nullptr;
};

struct RemovalDelta {
  FlowRecord record;
  std::vector<PortDelta> deltas;
};

/// Per-port term (1/(idSl_max - sum idSl) - 1/idSl_max)^2; +inf at or past
/// saturation.
inline double port_cost(double total_slope, double idle_slope_max) {
  const double residual = idle_slope_max - total_slope;
  if (!(residual > 0.0)) return std::numeric_limits<double>::infinity();
  const double d = 1.0 / residual - 1.0 / idle_slope_max;
  return d * d;
}

inline double network_cost(const NetworkConfig& cfg) {
  double sum = 0.0;
  for (std::size_t l = 0; l < cfg.graph.link_count(); ++l) sum += port_cost(cfg.total_idle_slope(l), cfg.idle_slope_max(l));
  return sum;
}

inline double slope_total(std::span<const double> s) {
  double t = 0.0;
  for (double x : s) t += x;
  return t;
}

/// Network cost with the tentative allocation of `eval` in place, summed
/// over every port.
inline double route_cost(const NetworkConfig& cfg, const RouteEvaluation& eval) {
  double sum = 0.0;
  for (std::size_t l = 0; l < cfg.graph.link_count(); ++l) {
    double total = cfg.total_idle_slope(l);
    auto it = std::find(eval.links.begin(), eval.links.end(), l);
    if (it != eval.links.end()) total = slope_total(eval.slopes[static_cast<std::size_t>(it - eval.links.begin())]);
    sum += port_cost(total, cfg.idle_slope_max(l));
  }
  return sum;
}

inline void validate_flow(const Flow& f, const NetworkConfig& cfg) {
  const auto& g = cfg.graph;
  if (to_index(f.src) >= g.node_count() || to_index(f.dst) >= g.node_count())
    throw AdmissionError("flow endpoint is not a node");
  if (!g.is_end_system(f.src) || !g.is_end_system(f.dst)) throw AdmissionError("flow endpoints must be end systems");
  if (f.src == f.dst) throw AdmissionError("flow source equals destination");
  if (!(f.frame_bits > 0.0) || !std::isfinite(f.frame_bits)) throw AdmissionError("frame size must be positive");
  if (f.frame_bits > cfg.classes.max_frame_bits) throw AdmissionError("frame size exceeds the network maximum");
  if (!(f.period > 0.0) || !std::isfinite(f.period)) throw AdmissionError("period must be positive");
  if (!(f.deadline > 0.0) || !std::isfinite(f.deadline)) throw AdmissionError("deadline must be positive");
  if (f.cls < 1 || f.cls > cfg.classes.n_classes) throw AdmissionError("class out of range");
}

namespace detail {

inline RouteEvaluation fail(RouteEvaluation eval, RejectReason r, std::string detail) {
  eval.feasible = false;
  eval.failure = r;
  eval.detail = std::move(detail);
  return eval;
}

// A route is deadline-infeasible only when granting every port its whole
// residual bandwidth still misses the end-to-end deadline.
inline RouteEvaluation fail_by_full_grant(RouteEvaluation eval, const Flow& f, const NetworkConfig& cfg,
                                          std::string detail) {
  eval.full_grant_sum = full_grant_deadline_sum(f, eval.links, cfg);
  const RejectReason r =
      eval.full_grant_sum > f.deadline ? RejectReason::DeadlineInfeasible : RejectReason::BandwidthExceeded;
  return fail(std::move(eval), r, std::move(detail));
}

}  // namespace detail

/// Evaluates one candidate route for `f` without touching the configuration.
inline RouteEvaluation evaluate_route(const Flow& f, std::size_t candidate_index, const Route& route,
                                      const NetworkConfig& cfg, const AdmitOptions& opts = {}) {
  RouteEvaluation eval;
  eval.candidate_index = candidate_index;
  eval.route = route;
  eval.links.reserve(route.length());
  for (const auto& l : route.links) eval.links.push_back(cfg.graph.require_link(l));

  const int cls = f.cls;
  const auto k = static_cast<std::size_t>(cls - 1);
  for (std::size_t link : eval.links) eval.existing_sum += cfg.port(link, cls).deadline;

  if (eval.existing_sum <= f.deadline) {
    for (std::size_t link : eval.links) eval.adjusted_deadlines.push_back(cfg.port(link, cls).deadline);
  } else {
    eval.adjusted = true;
    if (opts.strategy == StrategyKind::Adaptive) {
      AdjustOptions ao;
      ao.trace = opts.trace;
      auto adj = adjust_local_deadlines(f, eval.links, cfg, ao);
      if (!adj) {
        const auto& e = adj.error();
        switch (e.reason) {
          case AdjustFailure::Reason::DeadlineUnreachable:
            eval.full_grant_sum = e.sum_at_full > 0.0 ? e.sum_at_full : std::numeric_limits<double>::infinity();
            return detail::fail(std::move(eval), RejectReason::DeadlineInfeasible, "deadline unreachable at gamma = 1");
          case AdjustFailure::Reason::ResidualExhausted:
            return detail::fail(std::move(eval), RejectReason::BandwidthExceeded, "no residual bandwidth on route port");
          case AdjustFailure::Reason::Numeric:
            return detail::fail(std::move(eval), RejectReason::BandwidthExceeded, "numeric failure in bandwidth mapping");
        }
      }
      eval.gamma = adj->gamma;
      eval.iterations = adj->iterations;
      eval.adjusted_deadlines = std::move(adj->deadlines);
    } else {
      auto adj = baseline_adjust(opts.strategy, f, eval.links, cfg);
      if (!adj) {
        if (adj.error().reason == BaselineFailure::Reason::NoResidual)
          return detail::fail(std::move(eval), RejectReason::BandwidthExceeded, "no residual bandwidth on route");
        return detail::fail_by_full_grant(std::move(eval), f, cfg, "reduced deadline at or below latency floor");
      }
      eval.adjusted_deadlines = std::move(*adj);
    }
  }

  for (std::size_t h = 0; h < eval.links.size(); ++h) {
    const std::size_t link = eval.links[h];
    const auto& pc = cfg.port(link, cls);
    const double d_new = pc.empty() ? eval.adjusted_deadlines[h] : std::min(pc.deadline, eval.adjusted_deadlines[h]);
    eval.class_deadlines.push_back(d_new);

    auto loads = port_loads(cfg, link);
    loads[k].burst += f.burst();
    loads[k].rate += f.rate();
    auto deadlines = port_deadlines(cfg, link);
    deadlines[k] = d_new;
    auto slopes = allocate_from(cls, loads, deadlines, cfg.idle_slopes(link), port_params(cfg, link));
    if (!slopes) {
      std::string why = "class " + std::to_string(slopes.error().cls) + " " + to_string(slopes.error().kind);
      if (slopes.error().cls != cls) return detail::fail(std::move(eval), RejectReason::BandwidthExceeded, std::move(why));
      return detail::fail_by_full_grant(std::move(eval), f, cfg, std::move(why));
    }
    const double total = slope_total(*slopes);
    const double cap = cfg.idle_slope_max(link);
    if (total > cap) return detail::fail(std::move(eval), RejectReason::BandwidthExceeded, "idle slope limit exceeded");
    eval.cost_delta += port_cost(total, cap) - port_cost(cfg.total_idle_slope(link), cap);
    eval.slopes.push_back(std::move(*slopes));
  }
  eval.feasible = true;
  return eval;
}

/// Decides on `f` and, when admitted, applies the chosen configuration.
inline AdmissionDecision admit(const Flow& f, NetworkConfig& cfg, const CandidateRouteTable& table,
                               const AdmitOptions& opts = {}) {
  validate_flow(f, cfg);
  if (cfg.admitted.contains(f.id)) throw AdmissionError("duplicate flow id " + std::to_string(to_integer(f.id)));

  AdmissionDecision decision;
  decision.flow = f.id;
  const auto& candidates = table.lookup(f.src, f.dst);
  if (candidates.empty()) {
    decision.reason = RejectReason::NoCandidateRoute;
    return decision;
  }

  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < candidates.size(); ++r) {
    decision.evaluations.push_back(evaluate_route(f, r, candidates[r], cfg, opts));
    const auto& ev = decision.evaluations.back();
    if (ev.feasible && (!best || ev.cost_delta < decision.evaluations[*best].cost_delta)) best = r;
  }

  if (!best) {
    const bool all_deadline = std::all_of(decision.evaluations.begin(), decision.evaluations.end(), [](const auto& e) {
      return e.failure == RejectReason::DeadlineInfeasible;
    });
    decision.reason = all_deadline ? RejectReason::DeadlineInfeasible : RejectReason::BandwidthExceeded;
    return decision;
  }

  const RouteEvaluation& chosen = decision.evaluations[*best];
  decision.accepted = true;
  decision.route_index = *best;
  decision.route = chosen.route;
  decision.gamma = chosen.gamma;
  decision.cost = network_cost(cfg) + chosen.cost_delta;

  FlowRecord record{f, chosen.route.links, chosen.adjusted_deadlines};
  const auto k = static_cast<std::size_t>(f.cls - 1);
  for (std::size_t h = 0; h < chosen.links.size(); ++h) {
    const std::size_t link = chosen.links[h];
    PortDelta delta{link, f.cls, cfg.port(link, f.cls).deadline, chosen.class_deadlines[h], cfg.idle_slopes(link),
                    chosen.slopes[h]};
    auto& per_class = cfg.ports[link];
    auto& pc = per_class[k];
    pc.flows.push_back(f.id);
    pc.burst_sum += f.burst();
    pc.rate_sum += f.rate();
    pc.deadline = chosen.class_deadlines[h];
    for (std::size_t c = k; c < per_class.size(); ++c) per_class[c].idle_slope = chosen.slopes[h][c];
    decision.deltas.push_back(std::move(delta));
  }
  cfg.admitted.emplace(f.id, std::move(record));
  return decision;
}

/// Removes an admitted flow and reclaims bandwidth along its route.
inline RemovalDelta remove(FlowId id, NetworkConfig& cfg) {
  auto it = cfg.admitted.find(id);
  if (it == cfg.admitted.end()) throw AdmissionError("unknown flow id " + std::to_string(to_integer(id)));
  RemovalDelta out;
  out.record = std::move(it->second);
  cfg.admitted.erase(it);

  const Flow& f = out.record.flow;
  const auto k = static_cast<std::size_t>(f.cls - 1);
  for (const auto& link_id : out.record.route) {
    const std::size_t link = cfg.graph.require_link(link_id);
    auto& per_class = cfg.ports[link];
    auto& pc = per_class[k];
    PortDelta delta{link, f.cls, pc.deadline, pc.deadline, cfg.idle_slopes(link), {}};

    pc.flows.erase(std::remove(pc.flows.begin(), pc.flows.end(), id), pc.flows.end());
    if (pc.flows.empty()) {
      pc.burst_sum = 0.0;
      pc.rate_sum = 0.0;
      pc.deadline = pc.initial_deadline;
    } else {
      pc.burst_sum -= f.burst();
      pc.rate_sum -= f.rate();
      double d = std::numeric_limits<double>::infinity();
      for (FlowId other : pc.flows) d = std::min(d, *cfg.admitted.at(other).deadline_at(link_id));
      pc.deadline = d;
    }

    auto slopes = allocate_from(f.cls, port_loads(cfg, link), port_deadlines(cfg, link), cfg.idle_slopes(link),
                                port_params(cfg, link));
    // Cannot fail on a configuration that was valid before the removal.
    if (!slopes) throw std::logic_error("reallocation failed after removal");
    for (std::size_t c = k; c < per_class.size(); ++c) per_class[c].idle_slope = (*slopes)[c];
    delta.new_deadline = pc.deadline;
    delta.new_slopes = std::move(*slopes);
    out.deltas.push_back(std::move(delta));
  }
  return out;
}

/// Per-class figures used to seed the initial local deadlines.
struct DeadlineStats {
  std::vector<double> max_deadline;            // largest D_E2E per class
  std::vector<std::size_t> min_route_length;  // shortest route (hops) per class
};

/// Empty configuration with D_init = max D_E2E / min route length per class.
inline NetworkConfig initial_config(NetworkGraph graph, const ClassConfig& classes, const DeadlineStats& stats) {
  const auto n = static_cast<std::size_t>(classes.n_classes);
  if (stats.max_deadline.size() != n || stats.min_route_length.size() != n)
    throw std::invalid_argument("deadline statistics must cover every class");
  std::vector<double> init(n);
  for (std::size_t c = 0; c < n; ++c) {
    if (stats.min_route_length[c] == 0) throw std::invalid_argument("route length must be positive");
    init[c] = stats.max_deadline[c] / static_cast<double>(stats.min_route_length[c]);
  }
  return make_empty_config(std::move(graph), classes, init);
}

}  // namespace tsnac
