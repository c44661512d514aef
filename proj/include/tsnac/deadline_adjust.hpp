#pragma once

// Deadline-adaptive local deadline adjustment.
//
// Every port on the candidate route grants the same fraction gamma of its
// residual bandwidth as extra bandwidth. At each port the extra bandwidth is
// split among the flow's class and all lower-priority classes so that the
// lower classes keep meeting their existing local deadlines exactly; what is
// left for the flow's class determines its adjusted local deadline. A
// bisection on gamma then finds the smallest ratio whose adjusted deadlines
// fit the flow's end-to-end deadline.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "tsnac/expected.hpp"
#include "tsnac/model.hpp"
#include "tsnac/netcalc.hpp"

namespace tsnac {

/// Snapshot of one route port with the candidate flow tentatively added.
struct PortAdjustContext {
  std::size_t link = 0;  // link index
  int cls = 1;           // class of the candidate flow
  PortParams port;
  double idle_slope_max = 0.0;
  std::vector<double> bursts;     // sum b_f per class, candidate included
  std::vector<double> deadlines;  // existing D_j per class
  std::vector<double> allocated;  // deadline-term allocation per class (bar idSl)
  double residual = 0.0;          // R = idSl_max - sum bar idSl

  int n_classes() const noexcept { return static_cast<int>(bursts.size()); }
};

inline double residual_bandwidth(double idle_slope_max, std::span<const double> allocated) {
  double s = 0.0;
  for (double a : allocated) s += a;
  return idle_slope_max - s;
}

/// Builds the adjustment context of `link` for `candidate`. Fails when the
/// existing deadlines cannot be met even before any extra bandwidth.
inline NcResult<PortAdjustContext> make_port_context(const NetworkConfig& cfg, std::size_t link,
                                                     const Flow& candidate) {
  PortAdjustContext ctx;
  ctx.link = link;
  ctx.cls = candidate.cls;
  ctx.port = port_params(cfg, link);
  ctx.idle_slope_max = cfg.idle_slope_max(link);
  auto loads = port_loads(cfg, link);
  loads[static_cast<std::size_t>(candidate.cls - 1)].burst += candidate.burst();
  loads[static_cast<std::size_t>(candidate.cls - 1)].rate += candidate.rate();
  ctx.deadlines = port_deadlines(cfg, link);
  ctx.bursts.reserve(loads.size());
  for (const auto& l : loads) ctx.bursts.push_back(l.burst);
  auto bar = already_allocated_bandwidth(loads, ctx.deadlines, ctx.port);
  if (!bar) return unexpected(bar.error());
  ctx.allocated = std::move(*bar);
  ctx.residual = residual_bandwidth(ctx.idle_slope_max, ctx.allocated);
  return ctx;
}

/// Coefficients of eta x^2 + xi x + zeta = 0 whose root in [0, total] is the
/// share of `total` left to the classes above `j` once class j has been
/// topped up to keep its deadline.
struct LemmaQuadratic {
  double eta = 0.0;
  double xi = 0.0;
  double zeta = 0.0;

  double operator()(double x) const noexcept { return (eta * x + xi) * x + zeta; }
};

inline LemmaQuadratic lemma1_coefficients(double total, int j, const PortAdjustContext& ctx) {
  const auto k = static_cast<std::size_t>(j - 1);
  const double headroom = ctx.port.link_rate - sum_higher(ctx.allocated, j);  // C - sum_{k<j} bar idSl_k
  const double coupling = headroom * ctx.bursts[k] / ((j - 1) * ctx.port.max_frame * ctx.allocated[k]);
  LemmaQuadratic q;
  q.eta = 1.0 + coupling;
  q.xi = -q.eta * total - coupling * headroom - ctx.allocated[k];
  q.zeta = coupling * headroom * total;
  return q;
}

struct LemmaRoot {
  double value = 0.0;
  bool bisected = false;  // closed form rejected, bracketed bisection used
};

/// Given the total extra bandwidth of classes cls..j, returns the part that
/// goes to classes cls..j-1. An empty class j takes nothing.
inline NcResult<LemmaRoot> lemma1_step(double total, int j, const PortAdjustContext& ctx) {
  const auto k = static_cast<std::size_t>(j - 1);
  if (total <= 0.0) return LemmaRoot{0.0, false};
  if (ctx.bursts[k] == 0.0) return LemmaRoot{total, false};
  if (!(ctx.allocated[k] > 0.0)) return unexpected(NcError{NcError::Kind::NoBandwidth, j});

  const LemmaQuadratic q = lemma1_coefficients(total, j, ctx);
  double disc = q.xi * q.xi - 4.0 * q.eta * q.zeta;
  if (disc < 0.0) {
    if (disc < -1e-12 * q.xi * q.xi) return unexpected(NcError{NcError::Kind::Numeric, j});
    disc = 0.0;
  }
  // Smaller root of the quadratic, cancellation-free form for xi < 0.
  const double root = q.zeta == 0.0 ? 0.0 : 2.0 * q.zeta / (-q.xi + std::sqrt(disc));

  const double tol = 1e-9 * total;
  if (root >= -tol && root <= total + tol) return LemmaRoot{std::clamp(root, 0.0, total), false};

  // f(0) = zeta >= 0 and f(total) = -bar idSl_j * total <= 0 bracket the root.
  double lo = 0.0;
  double hi = total;
  if (q(lo) < 0.0 || q(hi) > 0.0) return unexpected(NcError{NcError::Kind::Numeric, j});
  for (int it = 0; it < 200 && hi - lo > 1e-15 * total; ++it) {
    const double mid = 0.5 * (lo + hi);
    (q(mid) > 0.0 ? lo : hi) = mid;
  }
  return LemmaRoot{0.5 * (lo + hi), true};
}

struct BandMapping {
  double deadline = 0.0;      // adjusted local deadline of the candidate's class
  std::vector<double> extra;  // Phi per class; zero above the candidate's class
  int bisections = 0;
};

/// Splits `extra` among classes cls..N (lowest class first) and returns the
/// resulting adjusted local deadline of class cls.
inline NcResult<BandMapping> map_band_to_deadline(double extra, const PortAdjustContext& ctx) {
  const int n = ctx.n_classes();
  const int i = ctx.cls;
  BandMapping out;
  out.extra.assign(static_cast<std::size_t>(n), 0.0);

  double remaining = extra;
  for (int j = n; j > i; --j) {
    auto step = lemma1_step(remaining, j, ctx);
    if (!step) return unexpected(step.error());
    out.extra[static_cast<std::size_t>(j - 1)] = remaining - step->value;
    out.bisections += step->bisected ? 1 : 0;
    remaining = step->value;
  }
  const auto ki = static_cast<std::size_t>(i - 1);
  out.extra[ki] = remaining;

  if (remaining == 0.0) {
    out.deadline = ctx.deadlines[ki];
    return out;
  }
  auto floor = interference_latency(i, sum_higher(ctx.allocated, i), ctx.port);
  if (!floor) return unexpected(floor.error());
  out.deadline = ctx.bursts[ki] / (ctx.allocated[ki] + remaining) + *floor;
  if (!(out.deadline > *floor)) return unexpected(NcError{NcError::Kind::InfeasibleDeadline, i});
  return out;
}

struct GammaIteration {
  int iteration = 0;
  double gamma = 0.0;
  double slack = 0.0;
};

struct AdjustmentOutcome {
  double gamma = 1.0;
  std::vector<double> deadlines;           // adjusted local deadline per route hop
  std::vector<std::vector<double>> extra;  // Phi per route hop, per class
  std::vector<double> residual;            // R per route hop
  double slack = 0.0;                      // D_E2E - sum of adjusted deadlines
  int iterations = 0;
  bool converged = true;
};

struct AdjustFailure {
  enum class Reason {
    ResidualExhausted,    // some route port has R <= 0
    DeadlineUnreachable,  // even gamma = 1 misses the end-to-end deadline
    Numeric,
  };
  Reason reason = Reason::DeadlineUnreachable;
  std::size_t hop = 0;
  double sum_at_full = 0.0;  // sum of adjusted deadlines at gamma = 1, when computed
  NcError nc{};
};

struct AdjustOptions {
  double tolerance = 1e-9;  // on |slack| relative to D_E2E
  int max_iterations = 64;
  std::vector<GammaIteration>* trace = nullptr;
};

namespace detail {

struct RouteMapping {
  std::vector<BandMapping> ports;
  double sum = 0.0;
};

inline NcResult<RouteMapping> map_route(double gamma, std::span<const PortAdjustContext> ctxs) {
  RouteMapping out;
  out.ports.reserve(ctxs.size());
  for (const auto& ctx : ctxs) {
    auto m = map_band_to_deadline(gamma * ctx.residual, ctx);
    if (!m) return unexpected(m.error());
    out.sum += m->deadline;
    out.ports.push_back(std::move(*m));
  }
  return out;
}

}  // namespace detail

/// Sum of the adjusted local deadlines along the route when every port grants
/// its whole residual bandwidth. +inf when the flow's own class cannot meet
/// any deadline at some port; NaN when a port has no residual bandwidth or
/// another class is infeasible.
inline double full_grant_deadline_sum(const Flow& candidate, std::span<const std::size_t> route,
                                      const NetworkConfig& cfg) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (std::size_t link : route) {
    auto ctx = make_port_context(cfg, link, candidate);
    if (!ctx) return ctx.error().cls == candidate.cls ? std::numeric_limits<double>::infinity() : kNaN;
    if (!(ctx->residual > 0.0)) return kNaN;
    auto m = map_band_to_deadline(ctx->residual, *ctx);
    if (!m) return kNaN;
    sum += m->deadline;
  }
  return sum;
}

/// Finds the minimum consistent ratio gamma for `candidate` on the route given
/// by link indices. Only valid when the route's existing class deadlines sum
/// above the flow's end-to-end deadline.
inline Expected<AdjustmentOutcome, AdjustFailure> adjust_local_deadlines(const Flow& candidate,
                                                                        std::span<const std::size_t> route,
                                                                        const NetworkConfig& cfg,
                                                                        const AdjustOptions& opts = {}) {
  std::vector<PortAdjustContext> ctxs;
  ctxs.reserve(route.size());
  for (std::size_t h = 0; h < route.size(); ++h) {
    auto ctx = make_port_context(cfg, route[h], candidate);
    if (!ctx) {
      const bool own = ctx.error().cls == candidate.cls;
      return unexpected(AdjustFailure{own ? AdjustFailure::Reason::DeadlineUnreachable
                                          : AdjustFailure::Reason::ResidualExhausted,
                                      h, 0.0, ctx.error()});
    }
    if (!(ctx->residual > 0.0))
      return unexpected(AdjustFailure{AdjustFailure::Reason::ResidualExhausted, h, 0.0, {}});
    ctxs.push_back(std::move(*ctx));
  }

  const double budget = candidate.deadline;
  const double eps = opts.tolerance * budget;

  auto full = detail::map_route(1.0, ctxs);
  if (!full) return unexpected(AdjustFailure{AdjustFailure::Reason::Numeric, 0, 0.0, full.error()});
  if (full->sum > budget)
    return unexpected(AdjustFailure{AdjustFailure::Reason::DeadlineUnreachable, 0, full->sum, {}});

  auto finish = [&](double gamma, detail::RouteMapping m, int iterations, bool converged) {
    AdjustmentOutcome out;
    out.gamma = gamma;
    out.slack = budget - m.sum;
    out.iterations = iterations;
    out.converged = converged;
    for (std::size_t h = 0; h < ctxs.size(); ++h) {
      out.deadlines.push_back(m.ports[h].deadline);
      out.extra.push_back(std::move(m.ports[h].extra));
      out.residual.push_back(ctxs[h].residual);
    }
    return out;
  };

  if (opts.trace) opts.trace->push_back({0, 1.0, budget - full->sum});

  // slack(gamma) increases strictly with gamma; slack(0) < 0 <= slack(1).
  // Keep the smallest gamma seen with slack >= 0 and stop once its slack is
  // within tolerance and the bracket is resolved to 1e-9 of gamma.
  double lo = 0.0;
  double hi = 1.0;
  detail::RouteMapping best = std::move(*full);
  int it = 0;
  while (it < opts.max_iterations) {
    ++it;
    const double mid = 0.5 * (lo + hi);
    auto m = detail::map_route(mid, ctxs);
    if (!m) return unexpected(AdjustFailure{AdjustFailure::Reason::Numeric, 0, 0.0, m.error()});
    const double slack = budget - m->sum;
    if (opts.trace) opts.trace->push_back({it, mid, slack});
    if (slack >= 0.0) {
      hi = mid;
      best = std::move(*m);
    } else {
      lo = mid;
    }
    if (budget - best.sum <= eps && hi - lo <= 1e-9 * hi) break;
  }
  const bool converged = budget - best.sum <= eps;
  return finish(hi, std::move(best), it, converged);
}

}  // namespace tsnac
