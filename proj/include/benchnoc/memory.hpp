#pragma once

#include <string>
#include <vector>

#include "benchnoc/core.hpp"
#include "benchnoc/engine.hpp"
#include "benchnoc/topology.hpp"
#include "benchnoc/traffic.hpp"

namespace benchnoc {

// ---------------------------------------------------------------------------
// Controller attachment
// ---------------------------------------------------------------------------
//
// Memory controllers hang off the memory HNoC row. MemPort link capacities
// are payload-visible service rates (the paper reports end-to-end NoC-visible
// bandwidth); the engine converts them back to raw flit rates.

/// Appends controller nodes for the spec'd memory to a copy of the graph.
/// DRAM exposes noc_links_to_dram equal-rate ports spread across the
/// columns; HBM adds per-column stack switches carrying co-located HBM NMUs
/// and efficiency-derated channel ports.
inline NocGraph attach_memory(const NocGraph& base, const MemorySpec& mem) {
  NocGraph g = base;
  if (mem.kind == MemoryKind::None) return g;
  if (g.memory_row() < 0)
    throw Error(ErrorKind::Validation, "memory", "device declares no memory row");
  const int cols = g.spec().vnoc_columns;
  const int row = g.memory_row();

  if (mem.kind == MemoryKind::Dram) {
    const DramSpec& d = mem.dram;
    if (d.noc_links_to_dram < 1)
      throw Error(ErrorKind::Validation, "noc_links_to_dram", "must be >= 1");
    const double per_port = d.aggregate_practical_bw / d.noc_links_to_dram;
    for (int p = 0; p < d.noc_links_to_dram; ++p) {
      const int c = p % cols;
      NodeId port = g.add_node({NodeKind::NSU, static_cast<std::int16_t>(c), 0, -1, true});
      g.add_channel(g.row_switch(row, c), port, LinkKind::MemPort, per_port, d.port_latency_ns);
      g.dram_ports_.push_back(port);
    }
    return g;
  }

  const HbmSpec& h = mem.hbm;
  for (int stack = 0; stack < h.stacks; ++stack) {
    const double ch_rate = h.channel_rate_gbps();
    const double ch_service = h.controller_efficiency * ch_rate;
    const int per_col = (h.hbm_nmus_per_stack + cols - 1) / cols;
    std::vector<NodeId> sw(static_cast<std::size_t>(cols), kInvalidNode);
    for (int c = 0; c < cols; ++c) {
      sw[static_cast<std::size_t>(c)] =
          g.add_node({NodeKind::NPS, static_cast<std::int16_t>(c), 0, -1, true});
      g.add_channel(g.row_switch(row, c), sw[static_cast<std::size_t>(c)], LinkKind::MemPort,
                    h.stack_row_trunk, h.port_latency_ns);
    }
    for (int j = 0; j < h.hbm_nmus_per_stack; ++j) {
      const int c = j / per_col;
      NodeId channel = g.add_node({NodeKind::NSU, static_cast<std::int16_t>(c), 0, -1, true});
      g.add_channel(sw[static_cast<std::size_t>(c)], channel, LinkKind::MemPort, ch_service,
                    h.port_latency_ns);
      g.hbm_channels_.push_back(channel);
      NodeId nmu = g.add_node({NodeKind::NMU, static_cast<std::int16_t>(c), 0, -1, true});
      g.add_channel(nmu, sw[static_cast<std::size_t>(c)], LinkKind::MemPort, ch_rate,
                    h.port_latency_ns);
      g.hbm_nmus_.push_back(nmu);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

enum class MemPattern : std::uint8_t { NearestNeighbor, Uniform, Random };

inline std::string_view to_string(MemPattern p) {
  switch (p) {
    case MemPattern::NearestNeighbor: return "nearest_neighbor";
    case MemPattern::Uniform: return "uniform";
    case MemPattern::Random: return "random";
  }
  return "?";
}

struct MemoryExperiment {
  MemPattern pattern = MemPattern::NearestNeighbor;
  int n_sources = 8;
  /// Source placement: >= 0 selects one SLR's horizontal row of endpoints,
  /// kVnoc a single column, kNearestFill the endpoints closest to memory.
  int slr = 0;
  static constexpr int kVnoc = -1;
  static constexpr int kNearestFill = -2;
  bool use_hbm_nmus = false;
  ProtocolKind protocol = ProtocolKind::WriteOnly;
  std::int64_t txn_size = 4096;
  std::int64_t total_bytes_per_target = 65536;
  std::uint64_t seed = 1;
};

struct MemoryRun {
  SimMetrics metrics;
  double aggregate_gbps = 0;  // sum of steady per-connection throughput
  int n_sources = 0;
  int n_targets = 0;
};

namespace detail {

/// Route from a fabric endpoint down its column, along the memory row, and
/// into a controller port (one or two MemPort hops).
inline Path path_to_port(const NocGraph& g, const NodeRef& src, NodeId port) {
  Path p;
  p.links.push_back(g.find_link(g.endpoint(src), g.tap(src.column, src.slr, src.index)));
  const int row = g.memory_row();
  vertical_walk(g, src.column, src.slr, src.index, 0, 0, p.links);
  p.links.push_back(g.find_link(g.tap(src.column, 0, 0), g.row_switch(row, src.column)));
  // Walk the row toward the port's column; the port hangs off a row switch
  // either directly (DRAM) or behind a stack switch (HBM).
  const int pc = g.node(port).column;
  row_walk(g, row, src.column, pc, p.links);
  const NodeId row_sw = g.row_switch(row, pc);
  bool direct = false;
  for (LinkId l : g.out_links(row_sw))
    if (g.link(l).dst == port) direct = true;
  if (direct) {
    p.links.push_back(g.find_link(row_sw, port));
  } else {
    // Through the stack switch.
    NodeId sw = kInvalidNode;
    for (LinkId l : g.out_links(row_sw)) {
      const NodeId cand = g.link(l).dst;
      if (!g.node(cand).memory) continue;
      for (LinkId l2 : g.out_links(cand))
        if (g.link(l2).dst == port) sw = cand;
    }
    if (sw == kInvalidNode) throw Error(ErrorKind::Routing, "memory", "port unreachable from row");
    p.links.push_back(g.find_link(row_sw, sw));
    p.links.push_back(g.find_link(sw, port));
  }
  return p;
}

inline Path hbm_nmu_path(const NocGraph& g, NodeId nmu, NodeId channel) {
  // NMU -> stack switch -> channel.
  for (LinkId l : g.out_links(nmu)) {
    const NodeId sw = g.link(l).dst;
    for (LinkId l2 : g.out_links(sw))
      if (g.link(l2).dst == channel) return Path{{l, l2}};
  }
  throw Error(ErrorKind::Routing, "memory", "HBM NMU cannot reach the channel");
}

inline std::vector<NodeRef> place_memory_sources(const NocGraph& g, const MemoryExperiment& ex) {
  const DeviceSpec& d = g.spec();
  std::vector<NodeRef> out;
  if (ex.slr >= 0) {
    if (ex.slr >= d.slr_count) throw Error(ErrorKind::Placement, "slr", "outside device");
    const int per_col = (ex.n_sources + d.vnoc_columns - 1) / d.vnoc_columns;
    if (per_col > d.endpoints_in_slr(ex.slr))
      throw Error(ErrorKind::Placement, "n_sources", "exceeds the SLR's endpoint capacity");
    for (int i = 0; i < ex.n_sources; ++i)
      out.push_back({i % d.vnoc_columns, ex.slr, i / d.vnoc_columns, Role::Source});
  } else if (ex.slr == MemoryExperiment::kVnoc) {
    int cap = 0;
    for (int s = 0; s < d.slr_count; ++s) cap += d.endpoints_in_slr(s);
    if (ex.n_sources > cap) throw Error(ErrorKind::Placement, "n_sources", "exceeds one column");
    int s = 0, idx = 0;
    for (int i = 0; i < ex.n_sources; ++i) {
      while (idx >= d.endpoints_in_slr(s)) {
        ++s;
        idx = 0;
      }
      out.push_back({0, s, idx++, Role::Source});
    }
  } else {
    // Nearest-fill: bottom SLR first, then upward, round-robin over columns.
    int needed = ex.n_sources;
    for (int s = 0; s < d.slr_count && needed > 0; ++s) {
      const int here = std::min(needed, d.vnoc_columns * d.endpoints_in_slr(s));
      for (int i = 0; i < here; ++i)
        out.push_back({i % d.vnoc_columns, s, i / d.vnoc_columns, Role::Source});
      needed -= here;
    }
    if (needed > 0) throw Error(ErrorKind::Placement, "n_sources", "exceeds device endpoints");
  }
  return out;
}

}  // namespace detail

/// Runs one external-memory benchmark: sources stream transactions at the
/// controllers (write) or pull responses through them (read).
inline MemoryRun memory_experiment(const NocGraph& g, const MemoryExperiment& ex,
                                   const SimConfig& cfg) {
  if (ex.protocol == ProtocolKind::Stream)
    throw Error(ErrorKind::Config, "protocol", "memory experiments use AXI-MM read or write");
  const std::vector<NodeId>& targets = ex.use_hbm_nmus || !g.hbm_channels().empty()
                                           ? g.hbm_channels()
                                           : g.dram_ports();
  if (targets.empty())
    throw Error(ErrorKind::Config, "memory", "attach_memory must run before memory_experiment");

  const int P = static_cast<int>(targets.size());
  ConnectionSet conns;
  RouteTable table;
  TransactionSchedule sched;
  sched.txn_size = ex.txn_size;
  const int txns = static_cast<int>(ex.total_bytes_per_target / ex.txn_size);
  const double qos = qos_rule(ex.n_sources);

  std::vector<NodeId> src_nodes;
  std::vector<NodeRef> src_refs;
  if (ex.use_hbm_nmus) {
    if (ex.n_sources > static_cast<int>(g.hbm_nmus().size()))
      throw Error(ErrorKind::Placement, "n_sources", "exceeds HBM NMU count");
    for (int i = 0; i < ex.n_sources; ++i) src_nodes.push_back(g.hbm_nmus()[static_cast<std::size_t>(i)]);
  } else {
    src_refs = detail::place_memory_sources(g, ex);
    for (const auto& r : src_refs) src_nodes.push_back(g.endpoint(r));
  }
  sched.n_sources = ex.n_sources;

  auto add_conn = [&](int i, int t) -> ConnId {
    Connection c;
    c.src = src_nodes[static_cast<std::size_t>(i)];
    c.dst = targets[static_cast<std::size_t>(t)];
    c.has_refs = false;
    c.qos_gbps = qos;
    conns.connections.push_back(c);
    if (ex.use_hbm_nmus)
      table.routes.push_back(detail::hbm_nmu_path(g, c.src, c.dst));
    else
      table.routes.push_back(detail::path_to_port(g, src_refs[static_cast<std::size_t>(i)], c.dst));
    return static_cast<ConnId>(conns.size() - 1);
  };

  // Nearest controller: column-aligned strided assignment.
  auto nearest_target = [&](int i) {
    if (ex.use_hbm_nmus) return i % P;
    const int cols = g.spec().vnoc_columns;
    const int per_col = std::max(1, P / cols);
    const int c = src_refs[static_cast<std::size_t>(i)].column % cols;
    return (c * per_col + (i / cols) % per_col) % P;
  };

  switch (ex.pattern) {
    case MemPattern::NearestNeighbor: {
      TransactionSchedule::Phase ph;
      ph.per_source.resize(static_cast<std::size_t>(ex.n_sources));
      for (int i = 0; i < ex.n_sources; ++i)
        ph.per_source[static_cast<std::size_t>(i)].push_back({add_conn(i, nearest_target(i)), txns});
      sched.phases.push_back(std::move(ph));
      break;
    }
    case MemPattern::Uniform: {
      std::vector<std::vector<ConnId>> conn_of(static_cast<std::size_t>(ex.n_sources));
      for (int i = 0; i < ex.n_sources; ++i)
        for (int t = 0; t < P; ++t) conn_of[static_cast<std::size_t>(i)].push_back(add_conn(i, t));
      for (int k = 0; k < P; ++k) {
        TransactionSchedule::Phase ph;
        ph.per_source.resize(static_cast<std::size_t>(ex.n_sources));
        for (int i = 0; i < ex.n_sources; ++i)
          ph.per_source[static_cast<std::size_t>(i)].push_back(
              {conn_of[static_cast<std::size_t>(i)][static_cast<std::size_t>((i + k) % P)], txns});
        sched.phases.push_back(std::move(ph));
      }
      break;
    }
    case MemPattern::Random: {
      std::vector<std::vector<ConnId>> conn_of(static_cast<std::size_t>(ex.n_sources));
      for (int i = 0; i < ex.n_sources; ++i)
        for (int t = 0; t < P; ++t) conn_of[static_cast<std::size_t>(i)].push_back(add_conn(i, t));
      TransactionSchedule::Phase ph;
      ph.per_source.resize(static_cast<std::size_t>(ex.n_sources));
      Rng rng(ex.seed);
      for (int i = 0; i < ex.n_sources; ++i)
        for (int t = 0; t < txns * P; ++t)
          ph.per_source[static_cast<std::size_t>(i)].push_back(
              {conn_of[static_cast<std::size_t>(i)][rng.below(static_cast<std::uint64_t>(P))], 1});
      sched.phases.push_back(std::move(ph));
      break;
    }
  }

  Protocol proto;
  proto.kind = ex.protocol;
  if (ex.use_hbm_nmus) {
    proto.data_width = g.spec().memory.hbm.hbm_nmu_width;
    proto.user_clock = g.spec().memory.hbm.hbm_nmu_clock;
  }

  MemoryRun run;
  run.metrics = simulate(g, table, conns, sched, proto, cfg);
  run.n_sources = ex.n_sources;
  run.n_targets = P;
  if (ex.pattern == MemPattern::NearestNeighbor) {
    // One steady connection per source: warmup-excluded rates add up.
    for (const auto& cm : run.metrics.per_connection) run.aggregate_gbps += cm.throughput_gbps;
  } else {
    run.aggregate_gbps =
        static_cast<double>(run.metrics.total_payload_bytes) / run.metrics.duration_ns;
  }
  return run;
}

}  // namespace benchnoc
