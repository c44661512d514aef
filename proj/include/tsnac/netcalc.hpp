#pragma once

// Network-calculus layer for ATS+CBS egress ports: affine arrival curves,
// the CBS rate-latency service curve, the closed-form per-class delay bound
// and its inverse (minimum idle slope for a local deadline).
//
// Classes are 1-based (1 = highest priority). Arrays indexed by class hold
// class c at position c - 1.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tsnac/expected.hpp"
#include "tsnac/model.hpp"

namespace tsnac {

struct AffineArrivalCurve {
  double rate = 0.0;   // sum of rho_f
  double burst = 0.0;  // sum of b_f

  double operator()(double t) const noexcept { return t > 0.0 ? rate * t + burst : 0.0; }
};

struct RateLatencyServiceCurve {
  double rate = 0.0;
  double latency = 0.0;

  double operator()(double t) const noexcept { return t > latency ? rate * (t - latency) : 0.0; }
};

/// Link rate C and network-wide maximum frame size l_max of one egress port.
struct PortParams {
  double link_rate = 0.0;
  double max_frame = 0.0;
};

struct NcError {
  enum class Kind {
    InfeasibleDeadline,  // deadline at or below the interference latency
    Saturated,           // higher classes reserve the whole link
    NoBandwidth,         // class with traffic but zero idle slope
    Numeric,             // quadratic without a real root in its bracket
  };
  Kind kind = Kind::InfeasibleDeadline;
  int cls = 0;
};

inline std::string to_string(NcError::Kind k) {
  switch (k) {
    case NcError::Kind::InfeasibleDeadline: return "infeasible-deadline";
    case NcError::Kind::Saturated: return "saturated";
    case NcError::Kind::NoBandwidth: return "no-bandwidth";
    case NcError::Kind::Numeric: return "numeric";
  }
  return "unknown";
}

template <typename T>
using NcResult = Expected<T, NcError>;

inline AffineArrivalCurve aggregate_arrival(std::span<const Flow> flows) {
  AffineArrivalCurve a;
  for (const auto& f : flows) {
    a.rate += f.rate();
    a.burst += f.burst();
  }
  return a;
}

/// CBS service curve of class `cls` given the idle slopes of classes 1..cls.
/// Frame-size terms use the network-wide l_max for every class.
inline NcResult<RateLatencyServiceCurve> cbs_service_curve(int cls, std::span<const double> idle_slopes,
                                                          const PortParams& port) {
  const double c = port.link_rate;
  const double l = port.max_frame;
  double higher_idle = 0.0;
  double higher_send_terms = 0.0;
  for (int j = 1; j < cls; ++j) {
    const double idsl = idle_slopes[static_cast<std::size_t>(j - 1)];
    higher_idle += idsl;
    higher_send_terms += (idsl - c) * l / c;  // sdSl_j * l_j^max / C
  }
  if (higher_idle >= c) return unexpected(NcError{NcError::Kind::Saturated, cls});
  const double idsl = idle_slopes[static_cast<std::size_t>(cls - 1)];
  if (!(idsl > 0.0)) return unexpected(NcError{NcError::Kind::NoBandwidth, cls});
  double latency = (higher_send_terms - l) / (higher_idle - c);
  if (latency < 0.0) latency = 0.0;
  return RateLatencyServiceCurve{idsl, latency};
}

/// l_max/C + (i-1) l_max / (C - sum_{j<i} idSl_j): the part of the delay
/// bound that does not depend on the class's own reservation.
inline NcResult<double> interference_latency(int cls, double higher_idle_sum, const PortParams& port) {
  const double c = port.link_rate;
  const double l = port.max_frame;
  if (cls == 1) return l / c;
  if (higher_idle_sum >= c) return unexpected(NcError{NcError::Kind::Saturated, cls});
  return l / c + (cls - 1) * l / (c - higher_idle_sum);
}

inline double sum_higher(std::span<const double> idle_slopes, int cls) {
  double s = 0.0;
  for (int j = 1; j < cls; ++j) s += idle_slopes[static_cast<std::size_t>(j - 1)];
  return s;
}

/// Worst-case delay bound of class `cls`:
///   sum b_f / idSl_i + l_max/C + (i-1) l_max / (C - sum_{j<i} idSl_j).
/// `idle_slopes` must cover classes 1..cls.
inline NcResult<double> worst_case_delay(int cls, double burst_sum, std::span<const double> idle_slopes,
                                         const PortParams& port) {
  const double idsl = idle_slopes[static_cast<std::size_t>(cls - 1)];
  auto floor = interference_latency(cls, sum_higher(idle_slopes, cls), port);
  if (!floor) return floor;
  if (burst_sum == 0.0) return *floor;
  if (!(idsl > 0.0)) return unexpected(NcError{NcError::Kind::NoBandwidth, cls});
  return burst_sum / idsl + *floor;
}

inline NcResult<double> worst_case_delay(int cls, std::span<const Flow> flows, std::span<const double> idle_slopes,
                                         const PortParams& port) {
  return worst_case_delay(cls, aggregate_arrival(flows).burst, idle_slopes, port);
}

/// Deadline-driven reservation sum b_f / (D_i - interference latency) alone.
inline NcResult<double> deadline_bandwidth(int cls, double burst_sum, double deadline, double higher_idle_sum,
                                           const PortParams& port) {
  if (burst_sum == 0.0) return 0.0;
  auto floor = interference_latency(cls, higher_idle_sum, port);
  if (!floor) return floor;
  const double margin = deadline - *floor;
  if (!(margin > 0.0)) return unexpected(NcError{NcError::Kind::InfeasibleDeadline, cls});
  return burst_sum / margin;
}

/// Minimum idle slope meeting `deadline` while keeping the class stable.
/// `higher_slopes` holds idSl of classes 1..cls-1 (extra entries are ignored).
inline NcResult<double> min_bandwidth(int cls, const AffineArrivalCurve& load, double deadline,
                                      std::span<const double> higher_slopes, const PortParams& port) {
  if (load.burst == 0.0) return 0.0;
  auto first = deadline_bandwidth(cls, load.burst, deadline, sum_higher(higher_slopes, cls), port);
  if (!first) return first;
  return *first > load.rate ? *first : load.rate;
}

inline NcResult<double> min_bandwidth(int cls, std::span<const Flow> flows, double deadline,
                                      std::span<const double> higher_slopes, const PortParams& port) {
  return min_bandwidth(cls, aggregate_arrival(flows), deadline, higher_slopes, port);
}

/// Re-solves classes from_cls..N in priority order, threading the running sum
/// of higher-priority reservations. Entries of `slopes` below from_cls are
/// taken as given; entries from from_cls on are overwritten.
inline NcResult<std::vector<double>> allocate_from(int from_cls, std::span<const AffineArrivalCurve> loads,
                                                   std::span<const double> deadlines, std::vector<double> slopes,
                                                   const PortParams& port) {
  const int n = static_cast<int>(loads.size());
  slopes.resize(loads.size(), 0.0);
  for (int cls = from_cls; cls <= n; ++cls) {
    const auto k = static_cast<std::size_t>(cls - 1);
    auto bw = min_bandwidth(cls, loads[k], deadlines[k], slopes, port);
    if (!bw) return unexpected(bw.error());
    slopes[k] = *bw;
  }
  return slopes;
}

/// Minimum per-class bandwidth of a whole port, classes 1..N.
inline NcResult<std::vector<double>> allocate_port(std::span<const AffineArrivalCurve> loads,
                                                   std::span<const double> deadlines, const PortParams& port) {
  return allocate_from(1, loads, deadlines, std::vector<double>(loads.size(), 0.0), port);
}

/// Deadline-term-only allocation of every class, threading the deadline-term
/// allocations of higher classes. `loads` must already include the candidate
/// flow in its class.
inline NcResult<std::vector<double>> already_allocated_bandwidth(std::span<const AffineArrivalCurve> loads,
                                                                 std::span<const double> deadlines,
                                                                 const PortParams& port) {
  std::vector<double> bar(loads.size(), 0.0);
  double higher = 0.0;
  for (std::size_t k = 0; k < loads.size(); ++k) {
    const int cls = static_cast<int>(k) + 1;
    auto bw = deadline_bandwidth(cls, loads[k].burst, deadlines[k], higher, port);
    if (!bw) return unexpected(bw.error());
    bar[k] = *bw;
    higher += *bw;
  }
  return bar;
}

/// Per-class arrival curves currently resident at a port.
inline std::vector<AffineArrivalCurve> port_loads(const NetworkConfig& cfg, std::size_t link) {
  std::vector<AffineArrivalCurve> out;
  out.reserve(cfg.ports.at(link).size());
  for (const auto& pc : cfg.ports.at(link)) out.push_back({pc.rate_sum, pc.burst_sum});
  return out;
}

inline std::vector<double> port_deadlines(const NetworkConfig& cfg, std::size_t link) {
  std::vector<double> out;
  out.reserve(cfg.ports.at(link).size());
  for (const auto& pc : cfg.ports.at(link)) out.push_back(pc.deadline);
  return out;
}

inline PortParams port_params(const NetworkConfig& cfg, std::size_t link) {
  return PortParams{cfg.graph.link(link).rate, cfg.classes.max_frame_bits};
}

}  // namespace tsnac
