#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "benchnoc/core.hpp"
#include "benchnoc/topology.hpp"

namespace benchnoc {

// ---------------------------------------------------------------------------
// Placements and protocols
// ---------------------------------------------------------------------------

enum class PlacementKind : std::uint8_t { Local, HNoC, VNoC, Spread };

inline std::string_view to_string(PlacementKind k) {
  switch (k) {
    case PlacementKind::Local: return "local";
    case PlacementKind::HNoC: return "hnoc";
    case PlacementKind::VNoC: return "vnoc";
    case PlacementKind::Spread: return "spread";
  }
  return "?";
}

struct Placement {
  PlacementKind kind = PlacementKind::Local;
  int n_pairs = 4;
  int column = 0;  // binding for Local / VNoC
  int slr = 0;     // binding for Local / HNoC
};

enum class ProtocolKind : std::uint8_t { ReadOnly, WriteOnly, Stream };

inline std::string_view to_string(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::ReadOnly: return "read";
    case ProtocolKind::WriteOnly: return "write";
    case ProtocolKind::Stream: return "stream";
  }
  return "?";
}

struct Protocol {
  ProtocolKind kind = ProtocolKind::Stream;
  int data_width = 512;      // bits on the user side
  double user_clock = 250.0; // MHz

  double user_rate_gbps() const { return data_width / 8.0 * user_clock * 1e6 / kBytesPerGb; }
};

enum class PatternKind : std::uint8_t {
  NearestNeighbor,
  Shift,
  Tornado,
  Reverse,
  Uniform,
  Hotspot,
  Random,
};

inline std::string_view to_string(PatternKind k) {
  switch (k) {
    case PatternKind::NearestNeighbor: return "nearest_neighbor";
    case PatternKind::Shift: return "shift";
    case PatternKind::Tornado: return "tornado";
    case PatternKind::Reverse: return "reverse";
    case PatternKind::Uniform: return "uniform";
    case PatternKind::Hotspot: return "hotspot";
    case PatternKind::Random: return "random";
  }
  return "?";
}

struct Workload {
  PatternKind pattern = PatternKind::NearestNeighbor;
  Placement placement;
  Protocol protocol;
  std::int64_t txn_size = 4096;
  std::int64_t total_bytes_per_pair = 65536;
  double qos_per_connection = 0;  // GB/s; 0 selects the size-based rule
  std::uint64_t rng_seed = 1;
};

/// Per-connection QoS: maximize throughput for small networks (port rate
/// divided among sources), a 5 MB/s routability floor for larger ones.
inline double qos_rule(int n_pairs, double port_rate_gbps = 16.0) {
  return n_pairs < 4 ? port_rate_gbps / n_pairs : 0.005;
}

// ---------------------------------------------------------------------------
// Connections
// ---------------------------------------------------------------------------

struct Connection {
  NodeId src = kInvalidNode;
  NodeId dst = kInvalidNode;
  NodeRef src_ref;  // endpoint handles when the connection maps fabric endpoints
  NodeRef dst_ref;
  bool has_refs = true;
  double qos_gbps = 0.005;
  int phase = 0;
};

struct ConnectionSet {
  std::vector<Connection> connections;

  std::size_t size() const { return connections.size(); }
  const Connection& operator[](std::size_t i) const { return connections[i]; }
};

// ---------------------------------------------------------------------------
// Placement resolution
// ---------------------------------------------------------------------------

/// Deterministic endpoint assignment for a placement; returns co-indexed
/// source (NMU) and sink (NSU) handles. Index order follows the physical
/// axis the placement stresses, so mirrored patterns mirror the device.
inline std::pair<std::vector<NodeRef>, std::vector<NodeRef>> place_nodes(const Placement& pl,
                                                                         const NocGraph& graph) {
  const DeviceSpec& d = graph.spec();
  const int n = pl.n_pairs;
  if (n < 1) throw Error(ErrorKind::Placement, "n_pairs", "must be >= 1");

  std::vector<NodeRef> pos;
  switch (pl.kind) {
    case PlacementKind::Local: {
      if (pl.column < 0 || pl.column >= d.vnoc_columns)
        throw Error(ErrorKind::Placement, "column", "outside device");
      if (pl.slr < 0 || pl.slr >= d.slr_count)
        throw Error(ErrorKind::Placement, "slr", "outside device");
      if (n > d.endpoints_in_slr(pl.slr))
        throw Error(ErrorKind::Placement, "n_pairs",
                    "exceeds one VNoC group (max " + std::to_string(d.endpoints_in_slr(pl.slr)) + ")");
      for (int i = 0; i < n; ++i) pos.push_back({pl.column, pl.slr, i, Role::Source});
      break;
    }
    case PlacementKind::HNoC: {
      if (pl.slr < 0 || pl.slr >= d.slr_count)
        throw Error(ErrorKind::Placement, "slr", "outside device");
      const int per_col = (n + d.vnoc_columns - 1) / d.vnoc_columns;
      if (per_col > d.endpoints_in_slr(pl.slr))
        throw Error(ErrorKind::Placement, "n_pairs", "exceeds one SLR's horizontal capacity");
      for (int i = 0; i < n; ++i)
        pos.push_back({i / per_col, pl.slr, i % per_col, Role::Source});
      break;
    }
    case PlacementKind::VNoC: {
      if (pl.column < 0 || pl.column >= d.vnoc_columns)
        throw Error(ErrorKind::Placement, "column", "outside device");
      int column_cap = 0;
      for (int s = 0; s < d.slr_count; ++s) column_cap += d.endpoints_in_slr(s);
      if (n > column_cap)
        throw Error(ErrorKind::Placement, "n_pairs", "exceeds one column's capacity");
      // Spread pairs over SLRs bottom-up, extras to the lower dies.
      const int base = n / d.slr_count;
      const int extra = n % d.slr_count;
      for (int s = 0; s < d.slr_count; ++s) {
        int here = base + (s < extra ? 1 : 0);
        if (here > d.endpoints_in_slr(s))
          throw Error(ErrorKind::Placement, "n_pairs", "SLR group overflow in column placement");
        for (int i = 0; i < here; ++i) pos.push_back({pl.column, s, i, Role::Source});
      }
      break;
    }
    case PlacementKind::Spread: {
      const int top = d.slr_count - 1;
      if (n == d.vnoc_columns * d.slr_count) {
        // Full grid: one pair per (column, SLR) cell, bottom-up row-major.
        for (int s = 0; s < d.slr_count; ++s)
          for (int c = 0; c < d.vnoc_columns; ++c) pos.push_back({c, s, 0, Role::Source});
        break;
      }
      // Corner-cyclic: a pair of each lands on a different corner of the NoC.
      const std::array<std::pair<int, int>, 4> corners = {
          std::pair{0, 0}, {d.vnoc_columns - 1, 0}, {0, top}, {d.vnoc_columns - 1, top}};
      for (int i = 0; i < n; ++i) {
        auto [c, s] = corners[static_cast<std::size_t>(i % 4)];
        const int slot = i / 4;
        if (slot >= d.endpoints_in_slr(s))
          throw Error(ErrorKind::Placement, "n_pairs", "corner group overflow");
        const int idx = (s == 0) ? slot : d.endpoints_in_slr(s) - 1 - slot;
        pos.push_back({c, s, idx, Role::Source});
      }
      break;
    }
  }

  std::vector<NodeRef> sinks = pos;
  for (auto& r : sinks) r.role = Role::Sink;
  for (const auto& r : pos) graph.endpoint(r);  // bounds check against the device
  return {pos, sinks};
}

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

/// One phase maps source index -> destination index.
struct PatternSchedule {
  std::vector<std::vector<int>> phases;
  bool random = false;       // per-transaction destination draw
  bool barriered = false;    // all sources finish a phase before the next
};

inline PatternSchedule gen_pattern(PatternKind kind, int n) {
  if (n < 2) throw Error(ErrorKind::Pattern, "n", "patterns require n >= 2");
  PatternSchedule ps;
  auto phase_from = [&](auto&& f) {
    std::vector<int> m(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = f(i);
    return m;
  };
  switch (kind) {
    case PatternKind::NearestNeighbor:
      ps.phases.push_back(phase_from([](int i) { return i; }));
      break;
    case PatternKind::Shift:
      ps.phases.push_back(phase_from([n](int i) { return (i + 1) % n; }));
      break;
    case PatternKind::Tornado:
      ps.phases.push_back(phase_from([n](int i) { return (i + n / 2) % n; }));
      break;
    case PatternKind::Reverse:
      ps.phases.push_back(phase_from([n](int i) { return n - 1 - i; }));
      break;
    case PatternKind::Uniform:
      for (int k = 0; k < n; ++k)
        ps.phases.push_back(phase_from([n, k](int i) { return (i + k) % n; }));
      break;
    case PatternKind::Hotspot:
      for (int k = 0; k < n; ++k) ps.phases.push_back(phase_from([k](int) { return k; }));
      ps.barriered = true;
      break;
    case PatternKind::Random:
      ps.random = true;
      break;
  }
  return ps;
}

// ---------------------------------------------------------------------------
// Transaction schedules
// ---------------------------------------------------------------------------

/// Issue program per source: (connection, transaction count) entries executed
/// in order. Barriered phases require global completion before advancing;
/// otherwise each source progresses on its own.
struct TransactionSchedule {
  struct Phase {
    bool barrier = false;
    std::vector<std::vector<std::pair<ConnId, int>>> per_source;
  };
  std::vector<Phase> phases;
  int n_sources = 0;
  std::int64_t txn_size = 4096;

  std::int64_t total_bytes() const {
    std::int64_t b = 0;
    for (const auto& ph : phases)
      for (const auto& seq : ph.per_source)
        for (auto [c, t] : seq) b += static_cast<std::int64_t>(t) * txn_size;
    return b;
  }
};

struct BuiltWorkload {
  ConnectionSet connections;
  TransactionSchedule schedule;
  std::vector<NodeRef> sources;
  std::vector<NodeRef> sinks;
};

inline BuiltWorkload build_workload(const Workload& w, const NocGraph& graph) {
  if (w.txn_size <= 0) throw Error(ErrorKind::Validation, "txn_size", "must be > 0");
  if (w.total_bytes_per_pair % w.txn_size != 0)
    throw Error(ErrorKind::Validation, "txn_size", "must divide total_bytes_per_pair");
  if (w.pattern == PatternKind::Random && w.protocol.kind == ProtocolKind::Stream)
    throw Error(ErrorKind::Config, "pattern", "random pattern excludes AXI-S");

  auto [sources, sinks] = place_nodes(w.placement, graph);
  const int n = w.placement.n_pairs;
  const double qos = w.qos_per_connection > 0 ? w.qos_per_connection
                                              : qos_rule(n, w.protocol.user_rate_gbps());
  const int txns = static_cast<int>(w.total_bytes_per_pair / w.txn_size);

  BuiltWorkload out;
  out.sources = sources;
  out.sinks = sinks;
  out.schedule.n_sources = n;
  out.schedule.txn_size = w.txn_size;

  auto add_conn = [&](int si, int di, int phase) -> ConnId {
    Connection c;
    c.src_ref = sources[static_cast<std::size_t>(si)];
    c.dst_ref = sinks[static_cast<std::size_t>(di)];
    c.src = graph.endpoint(c.src_ref);
    c.dst = graph.endpoint(c.dst_ref);
    c.qos_gbps = qos;
    c.phase = phase;
    out.connections.connections.push_back(c);
    return static_cast<ConnId>(out.connections.size() - 1);
  };

  if (w.pattern == PatternKind::Random) {
    // One connection per (source, destination); transactions draw the
    // destination uniformly, one transaction at a time.
    std::vector<std::vector<ConnId>> conn_of(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) conn_of[static_cast<std::size_t>(i)].push_back(add_conn(i, j, 0));
    TransactionSchedule::Phase ph;
    ph.per_source.resize(static_cast<std::size_t>(n));
    Rng rng(w.rng_seed);
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < txns; ++t) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        ph.per_source[static_cast<std::size_t>(i)].push_back(
            {conn_of[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 1});
      }
    out.schedule.phases.push_back(std::move(ph));
    return out;
  }

  PatternSchedule ps = gen_pattern(w.pattern, n);
  for (int k = 0; k < static_cast<int>(ps.phases.size()); ++k) {
    TransactionSchedule::Phase ph;
    ph.barrier = ps.barriered;
    ph.per_source.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int j = ps.phases[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
      ph.per_source[static_cast<std::size_t>(i)].push_back({add_conn(i, j, k), txns});
    }
    out.schedule.phases.push_back(std::move(ph));
  }
  return out;
}

}  // namespace benchnoc
