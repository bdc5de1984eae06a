#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "benchnoc/engine.hpp"
#include "benchnoc/refmodel.hpp"
#include "benchnoc/routegen.hpp"
#include "benchnoc/topology.hpp"
#include "benchnoc/traffic.hpp"

namespace benchnoc {

// ---------------------------------------------------------------------------
// Anchor probes: small isolated runs shared by calibration and acceptance
// ---------------------------------------------------------------------------

namespace probes {

struct SinglePair {
  ConnectionSet conns;
  RouteTable table;
  TransactionSchedule sched;
};

inline SinglePair single_pair(const NocGraph& g, NodeRef src, NodeRef dst,
                              RowChoice rc = RowChoice::NearestRow, int txns = 16,
                              std::int64_t txn_size = 4096) {
  SinglePair sp;
  Connection c;
  c.src_ref = src;
  c.dst_ref = dst;
  c.src = g.endpoint(src);
  c.dst = g.endpoint(dst);
  c.qos_gbps = 8.0;
  sp.conns.connections.push_back(c);
  sp.table.routes.push_back(default_path(g, src, dst, rc));
  sp.sched.n_sources = 1;
  sp.sched.txn_size = txn_size;
  TransactionSchedule::Phase ph;
  ph.per_source.push_back({{0, txns}});
  sp.sched.phases.push_back(ph);
  return sp;
}

/// Isolated single-pair throughput (GB/s) under a protocol.
inline double pair_throughput(const NocGraph& g, const SimConfig& cfg, NodeRef src, NodeRef dst,
                              ProtocolKind kind, RowChoice rc = RowChoice::NearestRow) {
  SinglePair sp = single_pair(g, src, dst, rc);
  Protocol p;
  p.kind = kind;
  return simulate(g, sp.table, sp.conns, sp.sched, p, cfg).per_connection[0].throughput_gbps;
}

/// Isolated single-flit probe latency (ns).
inline double pair_latency(const NocGraph& g, const SimConfig& cfg, NodeRef src, NodeRef dst,
                           RowChoice rc = RowChoice::NearestRow) {
  SinglePair sp = single_pair(g, src, dst, rc);
  return measure_latency(g, sp.table, sp.conns, cfg, 0);
}

/// Read throughput from the bottom-left corner to the co-column endpoint of
/// each SLR (index 0), i.e. 0..slr_count-1 die crossings.
inline std::vector<double> read_by_crossings(const NocGraph& g, const SimConfig& cfg) {
  std::vector<double> out;
  for (int s = 0; s < g.spec().slr_count; ++s)
    out.push_back(
        pair_throughput(g, cfg, {0, 0, 0, Role::Source}, {0, s, 0, Role::Sink}, ProtocolKind::ReadOnly));
  return out;
}

/// Read throughput from the bottom-left corner along the memory row.
inline std::vector<double> read_by_columns(const NocGraph& g, const SimConfig& cfg) {
  std::vector<double> out;
  for (int c = 0; c < g.spec().vnoc_columns; ++c)
    out.push_back(
        pair_throughput(g, cfg, {0, 0, 0, Role::Source}, {c, 0, 0, Role::Sink}, ProtocolKind::ReadOnly));
  return out;
}

/// Mean latency increment per SLR step and per column step from the
/// bottom-left corner, measured on the latency map's routes.
inline std::pair<double, double> latency_increments(const NocGraph& g, const SimConfig& cfg) {
  const int top = g.spec().slr_count - 1;
  const int right = g.spec().vnoc_columns - 1;
  const double base = pair_latency(g, cfg, {0, 0, 0, Role::Source}, {0, 0, 0, Role::Sink});
  const double vert = pair_latency(g, cfg, {0, 0, 0, Role::Source}, {0, top, 0, Role::Sink});
  const double horiz = pair_latency(g, cfg, {0, 0, 0, Role::Source}, {right, 0, 0, Role::Sink});
  return {(vert - base) / top, (horiz - base) / right};
}

}  // namespace probes

// ---------------------------------------------------------------------------
// Calibration targets and search
// ---------------------------------------------------------------------------

enum class AnchorMetric : std::uint8_t {
  LocalReadGbps,          // isolated co-located read pair
  LocalStreamGbps,        // isolated co-located stream pair
  IntraSlrLatencyNs,      // adjacent-pair one-way probe
  VerticalReadRatio,      // full-traverse read / local read
  SlrReadLossGbps,        // mean loss per die crossing
  HnocReadLossGbps,       // mean loss per memory-row column step
  LatencyIncrementRatio,  // per-SLR-step / per-column-step latency increment
};

inline std::string_view to_string(AnchorMetric m) {
  switch (m) {
    case AnchorMetric::LocalReadGbps: return "local_read_gbps";
    case AnchorMetric::LocalStreamGbps: return "local_stream_gbps";
    case AnchorMetric::IntraSlrLatencyNs: return "intra_slr_latency_ns";
    case AnchorMetric::VerticalReadRatio: return "vertical_read_ratio";
    case AnchorMetric::SlrReadLossGbps: return "slr_read_loss_gbps";
    case AnchorMetric::HnocReadLossGbps: return "hnoc_read_loss_gbps";
    case AnchorMetric::LatencyIncrementRatio: return "latency_increment_ratio";
  }
  return "?";
}

struct CalibrationTarget {
  AnchorMetric metric;
  double anchor = 0;
  double tolerance = 0.10;  // relative
};

/// Reported hardware anchors for the four-die part.
inline std::vector<CalibrationTarget> default_targets() {
  return {
      {AnchorMetric::LocalReadGbps, 8.0, 0.15},
      {AnchorMetric::LocalStreamGbps, 16.0, 0.05},
      {AnchorMetric::IntraSlrLatencyNs, 40.0, 0.20},
      {AnchorMetric::VerticalReadRatio, 0.50, 0.20},
      {AnchorMetric::SlrReadLossGbps, 1.5, 0.34},
      {AnchorMetric::HnocReadLossGbps, 0.5, 0.61},
      {AnchorMetric::LatencyIncrementRatio, 2.5, 0.20},
  };
}

struct CalibrationResidual {
  AnchorMetric metric;
  double anchor = 0;
  double measured = 0;
  double relative_error = 0;
  double tolerance = 0;
};

struct CalibrationResult {
  bool ok = false;
  SimConfig config;
  std::vector<CalibrationResidual> residuals;
  double worst_error = 0;
  int evaluations = 0;
};

inline double eval_metric(const NocGraph& g, const SimConfig& cfg, AnchorMetric m) {
  switch (m) {
    case AnchorMetric::LocalReadGbps:
      return probes::pair_throughput(g, cfg, {0, 0, 0, Role::Source}, {0, 0, 0, Role::Sink},
                                     ProtocolKind::ReadOnly);
    case AnchorMetric::LocalStreamGbps:
      return probes::pair_throughput(g, cfg, {0, 0, 0, Role::Source}, {0, 0, 0, Role::Sink},
                                     ProtocolKind::Stream);
    case AnchorMetric::IntraSlrLatencyNs:
      return probes::pair_latency(g, cfg, {0, 0, 0, Role::Source}, {0, 0, 1, Role::Sink});
    case AnchorMetric::VerticalReadRatio: {
      auto v = probes::read_by_crossings(g, cfg);
      return v.back() / v.front();
    }
    case AnchorMetric::SlrReadLossGbps: {
      auto v = probes::read_by_crossings(g, cfg);
      return (v.front() - v.back()) / static_cast<double>(v.size() - 1);
    }
    case AnchorMetric::HnocReadLossGbps: {
      auto v = probes::read_by_columns(g, cfg);
      return (v.front() - v.back()) / static_cast<double>(v.size() - 1);
    }
    case AnchorMetric::LatencyIncrementRatio: {
      auto [dv, dh] = probes::latency_increments(g, cfg);
      return dv / dh;
    }
  }
  return 0;
}

/// The committed fit (output of calibrate() over default_targets on the
/// four-die device). Latencies are exact NoC-cycle multiples so the
/// event-driven engine and the analytic path sums agree.
inline SimConfig calibrated_config() {
  SimConfig cfg;
  const double cyc = 1000.0 / 1080.0;
  cfg.read_window = 3;
  cfg.ncrb_effective_capacity = 13.0;
  cfg.endpoint_overhead_ns = 3 * cyc;
  cfg.has_latency_override = true;
  cfg.link_latency_override.local = 19 * cyc;
  cfg.link_latency_override.vnoc_hop = 1 * cyc;
  cfg.link_latency_override.hnoc_hop = 5 * cyc;
  cfg.link_latency_override.nidb_crossing = 9 * cyc;
  cfg.link_latency_override.ncrb_crossing = 5 * cyc;
  cfg.link_latency_override.mem_port = 2 * cyc;
  return cfg;
}

/// Grid/coordinate search over {read_window, per-kind latencies,
/// ncrb_effective_capacity} minimizing the worst relative anchor error.
inline CalibrationResult calibrate(const std::vector<CalibrationTarget>& targets,
                                   const NocGraph& g, SimConfig start = SimConfig{}) {
  CalibrationResult res;
  if (targets.empty()) {
    res.ok = true;
    res.config = start;
    return res;
  }

  const double cyc = 1000.0 / g.spec().noc_clock;
  struct Dim {
    int lo, hi;
    int* value;
  };
  // Search in integer cycle units.
  struct Point {
    int local = 19, vnoc = 1, hnoc = 5, nidb = 10, ncrb = 5, overhead = 2, window = 3;
    int ncrb_cap_halves = 26;  // 13.0 GB/s
  } pt;
  if (start.has_latency_override) {
    pt.local = std::max(1, static_cast<int>(llround(start.link_latency_override.local / cyc)));
    pt.vnoc = std::max(1, static_cast<int>(llround(start.link_latency_override.vnoc_hop / cyc)));
    pt.hnoc = std::max(1, static_cast<int>(llround(start.link_latency_override.hnoc_hop / cyc)));
    pt.nidb = std::max(1, static_cast<int>(llround(start.link_latency_override.nidb_crossing / cyc)));
    pt.ncrb = std::max(1, static_cast<int>(llround(start.link_latency_override.ncrb_crossing / cyc)));
  }
  pt.window = std::clamp(start.read_window, 1, 6);
  pt.overhead = std::clamp(static_cast<int>(llround(start.endpoint_overhead_ns / cyc)), 1, 5);
  pt.ncrb_cap_halves =
      std::clamp(static_cast<int>(llround(start.ncrb_effective_capacity * 2)), 24, 28);

  auto make_cfg = [&](const Point& p) {
    SimConfig cfg = start;
    cfg.read_window = p.window;
    cfg.ncrb_effective_capacity = p.ncrb_cap_halves / 2.0;
    cfg.endpoint_overhead_ns = p.overhead * cyc;
    cfg.has_latency_override = true;
    cfg.link_latency_override.local = p.local * cyc;
    cfg.link_latency_override.vnoc_hop = p.vnoc * cyc;
    cfg.link_latency_override.hnoc_hop = p.hnoc * cyc;
    cfg.link_latency_override.nidb_crossing = std::max(p.nidb, p.vnoc) * cyc;
    cfg.link_latency_override.ncrb_crossing = p.ncrb * cyc;
    cfg.link_latency_override.mem_port = 2 * cyc;
    return cfg;
  };

  auto score = [&](const Point& p) {
    const SimConfig cfg = make_cfg(p);
    double worst = 0;
    for (const auto& t : targets) {
      const double v = eval_metric(g, cfg, t.metric);
      const double err = std::abs(v - t.anchor) / std::max(1e-12, std::abs(t.anchor));
      // Normalize by tolerance so tight anchors dominate the fit.
      worst = std::max(worst, err / t.tolerance);
    }
    ++res.evaluations;
    return worst;
  };

  double best = score(pt);
  bool improved = true;
  int rounds = 0;
  while (improved && rounds < 8) {
    improved = false;
    ++rounds;
    struct Axis {
      int Point::* field;
      int lo, hi;
    };
    const Axis axes[] = {
        {&Point::window, 1, 6},   {&Point::local, 8, 26},  {&Point::vnoc, 1, 4},
        {&Point::hnoc, 2, 10},    {&Point::nidb, 4, 20},   {&Point::ncrb, 2, 12},
        {&Point::overhead, 1, 5}, {&Point::ncrb_cap_halves, 24, 28},
    };
    for (const auto& ax : axes) {
      const int cur = pt.*(ax.field);
      for (int delta : {-2, -1, 1, 2}) {
        const int cand = cur + delta;
        if (cand < ax.lo || cand > ax.hi) continue;
        Point trial = pt;
        trial.*(ax.field) = cand;
        const double s = score(trial);
        if (s + 1e-12 < best) {
          best = s;
          pt = trial;
          improved = true;
        }
      }
    }
  }

  res.config = make_cfg(pt);
  res.worst_error = 0;
  for (const auto& t : targets) {
    CalibrationResidual r;
    r.metric = t.metric;
    r.anchor = t.anchor;
    r.measured = eval_metric(g, res.config, t.metric);
    r.relative_error = std::abs(r.measured - t.anchor) / std::max(1e-12, std::abs(t.anchor));
    r.tolerance = t.tolerance;
    res.residuals.push_back(r);
    res.worst_error = std::max(res.worst_error, r.relative_error);
  }
  res.ok = true;
  for (const auto& r : res.residuals) res.ok = res.ok && r.relative_error <= r.tolerance;
  return res;
}

}  // namespace benchnoc
