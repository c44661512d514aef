#pragma once

// Reference deadline-reduction strategies. Each cuts the overshoot
// (sum of existing deadlines - D_E2E) from the route's local deadlines in
// fixed proportions kappa:
//   EP   equal split,              kappa = 1 / |r|
//   LP   load-based split,         kappa = (sum B - B) / ((|r| - 1) sum B)
//   ABP  residual-bandwidth split, kappa = R / sum R
// where B is the total committed rate at the port (candidate included) and R
// the residual bandwidth used by the adaptive strategy.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tsnac/deadline_adjust.hpp"
#include "tsnac/expected.hpp"
#include "tsnac/model.hpp"
#include "tsnac/netcalc.hpp"

namespace tsnac {

enum class StrategyKind { Adaptive, EP, LP, ABP };

inline std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::Adaptive: return "adaptive";
    case StrategyKind::EP: return "ep";
    case StrategyKind::LP: return "lp";
    case StrategyKind::ABP: return "abp";
  }
  return "unknown";
}

inline std::optional<StrategyKind> parse_strategy(std::string_view s) {
  if (s == "adaptive") return StrategyKind::Adaptive;
  if (s == "ep") return StrategyKind::EP;
  if (s == "lp") return StrategyKind::LP;
  if (s == "abp") return StrategyKind::ABP;
  return std::nullopt;
}

struct BaselineFailure {
  enum class Reason {
    DegenerateRoute,    // LP on a single-hop route
    NoResidual,         // ABP with sum R <= 0, or R undefined
    BelowLatencyFloor,  // reduced deadline at or below the port's latency floor
  };
  Reason reason = Reason::BelowLatencyFloor;
  std::size_t hop = 0;
};

/// Total committed rate at a port, all classes, candidate included.
inline double port_load(const NetworkConfig& cfg, std::size_t link, const Flow& candidate) {
  double b = candidate.rate();
  for (const auto& pc : cfg.ports.at(link)) b += pc.rate_sum;
  return b;
}

inline Expected<std::vector<double>, BaselineFailure> baseline_coefficients(StrategyKind kind, const Flow& candidate,
                                                                           std::span<const std::size_t> route,
                                                                           const NetworkConfig& cfg) {
  const std::size_t n = route.size();
  std::vector<double> kappa(n, 0.0);
  switch (kind) {
    case StrategyKind::EP:
      for (auto& k : kappa) k = 1.0 / static_cast<double>(n);
      break;
    case StrategyKind::LP: {
      if (n < 2) return unexpected(BaselineFailure{BaselineFailure::Reason::DegenerateRoute, 0});
      std::vector<double> load(n);
      double total = 0.0;
      for (std::size_t h = 0; h < n; ++h) total += load[h] = port_load(cfg, route[h], candidate);
      for (std::size_t h = 0; h < n; ++h) kappa[h] = (total - load[h]) / ((static_cast<double>(n) - 1.0) * total);
      break;
    }
    case StrategyKind::ABP: {
      std::vector<double> residual(n);
      double total = 0.0;
      for (std::size_t h = 0; h < n; ++h) {
        auto ctx = make_port_context(cfg, route[h], candidate);
        if (!ctx) return unexpected(BaselineFailure{BaselineFailure::Reason::NoResidual, h});
        total += residual[h] = ctx->residual;
      }
      if (!(total > 0.0)) return unexpected(BaselineFailure{BaselineFailure::Reason::NoResidual, 0});
      for (std::size_t h = 0; h < n; ++h) kappa[h] = residual[h] / total;
      break;
    }
    case StrategyKind::Adaptive:
      throw std::invalid_argument("adaptive strategy has no fixed coefficients");
  }
  return kappa;
}

/// Reduced local deadlines D - (sum D - D_E2E) * kappa for the candidate's
/// class along the route.
inline Expected<std::vector<double>, BaselineFailure> baseline_adjust(StrategyKind kind, const Flow& candidate,
                                                                     std::span<const std::size_t> route,
                                                                     const NetworkConfig& cfg) {
  auto kappa = baseline_coefficients(kind, candidate, route, cfg);
  if (!kappa) return unexpected(kappa.error());

  double sum = 0.0;
  for (std::size_t link : route) sum += cfg.port(link, candidate.cls).deadline;
  const double overshoot = sum - candidate.deadline;

  std::vector<double> out(route.size());
  for (std::size_t h = 0; h < route.size(); ++h) {
    const std::size_t link = route[h];
    out[h] = cfg.port(link, candidate.cls).deadline - overshoot * (*kappa)[h];
    const auto slopes = cfg.idle_slopes(link);
    auto floor = interference_latency(candidate.cls, sum_higher(slopes, candidate.cls), port_params(cfg, link));
    if (!floor || !(out[h] > *floor))
      return unexpected(BaselineFailure{BaselineFailure::Reason::BelowLatencyFloor, h});
  }
  return out;
}

}  // namespace tsnac
