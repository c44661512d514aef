#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <optional>
#include <random>

#include "oracles.hpp"
#include "tsnac/tsnac.hpp"

namespace fx {

inline constexpr double kC = 1e8;
inline constexpr double kLmax = 12144.0;

/// ES1 - SW1 - SW2 - ... - SWn - ES2, all links at `rate`.
struct Line {
  tsnac::NetworkGraph g;
  tsnac::NodeId a{};
  tsnac::NodeId b{};
  std::vector<tsnac::NodeId> sw;
};

inline Line line(int n_sw, double rate = kC) {
  Line l;
  for (int i = 1; i <= n_sw; ++i) l.sw.push_back(l.g.add_node("SW" + std::to_string(i), tsnac::NodeKind::Switch));
  l.a = l.g.add_node("ES1", tsnac::NodeKind::EndSystem);
  l.b = l.g.add_node("ES2", tsnac::NodeKind::EndSystem);
  l.g.connect(l.a, l.sw.front(), rate);
  for (int i = 0; i + 1 < n_sw; ++i) l.g.connect(l.sw[i], l.sw[i + 1], rate);
  l.g.connect(l.sw.back(), l.b, rate);
  return l;
}

inline tsnac::Flow flow(std::uint64_t id, tsnac::NodeId s, tsnac::NodeId d, double bits, double period, double deadline,
                        int cls = 1) {
  return tsnac::Flow{static_cast<tsnac::FlowId>(id), s, d, bits, period, deadline, cls};
}

inline tsnac::ClassConfig classes(int n) {
  tsnac::ClassConfig c;
  c.n_classes = n;
  return c;
}

/// Field-by-field comparison of two configurations, relative tolerance.
inline bool same_config(const tsnac::NetworkConfig& x, const tsnac::NetworkConfig& y, double rel) {
  auto close = [&](double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel * m;
  };
  if (x.ports.size() != y.ports.size() || x.admitted.size() != y.admitted.size()) return false;
  for (std::size_t l = 0; l < x.ports.size(); ++l) {
    if (x.ports[l].size() != y.ports[l].size()) return false;
    for (std::size_t c = 0; c < x.ports[l].size(); ++c) {
      const auto& p = x.ports[l][c];
      const auto& q = y.ports[l][c];
      if (!close(p.deadline, q.deadline) || !close(p.idle_slope, q.idle_slope) ||
          !close(p.initial_deadline, q.initial_deadline) || !close(p.burst_sum, q.burst_sum) ||
          !close(p.rate_sum, q.rate_sum) || p.flows != q.flows)
        return false;
    }
  }
  for (const auto& [id, rec] : x.admitted) {
    auto it = y.admitted.find(id);
    if (it == y.admitted.end() || !(it->second.flow == rec.flow) || it->second.route != rec.route ||
        it->second.per_hop_deadline != rec.per_hop_deadline)
      return false;
  }
  return true;
}

}  // namespace fx

namespace fx {

/// Random single-port adjustment context with consistent deadline-term
/// allocations; nullopt when the draw is infeasible.
template <typename Gen>
std::optional<tsnac::PortAdjustContext> random_context(Gen& gen, double rate = kC) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 1 + static_cast<int>(u(gen) * 8);
  const int cls = 1 + static_cast<int>(u(gen) * n);
  tsnac::PortAdjustContext ctx;
  ctx.link = 0;
  ctx.cls = cls;
  ctx.port = tsnac::PortParams{rate, kLmax};
  ctx.idle_slope_max = 0.75 * rate;
  for (int k = 1; k <= n; ++k) {
    const bool empty = k != cls && u(gen) < 0.2;
    ctx.bursts.push_back(empty ? 0.0 : 512.0 + u(gen) * 60000.0);
    ctx.deadlines.push_back(1e-3 + u(gen) * 9e-3 * k);
  }
  std::sort(ctx.deadlines.begin(), ctx.deadlines.end());
  ctx.allocated = oracle::deadline_allocation(ctx.bursts, ctx.deadlines, rate, kLmax);
  double higher = 0.0;
  for (std::size_t k = 0; k < ctx.allocated.size(); ++k) {
    if (ctx.bursts[k] > 0.0) {
      const double floor = kLmax / rate + static_cast<double>(k) * kLmax / (rate - higher);
      if (!(ctx.deadlines[k] > floor) || !(ctx.allocated[k] > 0.0)) return std::nullopt;
    }
    higher += ctx.allocated[k];
  }
  ctx.residual = tsnac::residual_bandwidth(ctx.idle_slope_max, ctx.allocated);
  if (!(ctx.residual > 0.0)) return std::nullopt;
  return ctx;
}

}  // namespace fx
