#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "benchnoc/calibrate.hpp"
#include "benchnoc/engine.hpp"
#include "benchnoc/memory.hpp"
#include "benchnoc/refmodel.hpp"
#include "benchnoc/routegen.hpp"
#include "benchnoc/topology.hpp"
#include "benchnoc/traffic.hpp"

namespace benchnoc {

// ---------------------------------------------------------------------------
// Result rows
// ---------------------------------------------------------------------------

struct ResultRow {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> params;  // ordered key/value
  std::string metric;
  double value = 0;
  std::string unit;  // GB/s | ns | s | count | fraction
};

/// Stable, locale-independent number formatting for reproducible files.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "experiment,params,metric,value,unit\n";
  for (const auto& r : rows) {
    std::string params;
    for (const auto& [k, v] : r.params) {
      if (!params.empty()) params += ';';
      params += k + "=" + v;
    }
    out << r.experiment << ',' << params << ',' << r.metric << ',' << format_number(r.value) << ','
        << r.unit << '\n';
  }
}

enum class ReportFormat : std::uint8_t { Csv, Json };

inline void emit_report(const std::vector<ResultRow>& rows, ReportFormat format,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "path", "cannot write " + path);
  if (format == ReportFormat::Csv) {
    emit_csv(rows, out);
    return;
  }
  out << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << "  {\"experiment\":\"" << r.experiment << "\",\"params\":{";
    for (std::size_t p = 0; p < r.params.size(); ++p) {
      out << "\"" << r.params[p].first << "\":\"" << r.params[p].second << "\"";
      if (p + 1 < r.params.size()) out << ',';
    }
    out << "},\"metric\":\"" << r.metric << "\",\"value\":" << format_number(r.value)
        << ",\"unit\":\"" << r.unit << "\"}";
    out << (i + 1 < rows.size() ? ",\n" : "\n");
  }
  out << "]\n";
}

// ---------------------------------------------------------------------------
// Point-to-point heat maps
// ---------------------------------------------------------------------------

enum class Corner : std::uint8_t { BL, BR, TL, TR };

inline std::string_view to_string(Corner c) {
  switch (c) {
    case Corner::BL: return "BL";
    case Corner::BR: return "BR";
    case Corner::TL: return "TL";
    case Corner::TR: return "TR";
  }
  return "?";
}

inline Corner corner_from_string(const std::string& s) {
  for (Corner c : {Corner::BL, Corner::BR, Corner::TL, Corner::TR})
    if (s == to_string(c)) return c;
  throw Error(ErrorKind::Validation, "corner", "unknown corner '" + s + "'");
}

inline NodeRef corner_source(const NocGraph& g, Corner c) {
  const DeviceSpec& d = g.spec();
  const int right = d.vnoc_columns - 1;
  const int top = d.slr_count - 1;
  switch (c) {
    case Corner::BL: return {0, 0, 0, Role::Source};
    case Corner::BR: return {right, 0, 0, Role::Source};
    case Corner::TL: return {0, top, d.endpoints_in_slr(top) - 1, Role::Source};
    case Corner::TR: return {right, top, d.endpoints_in_slr(top) - 1, Role::Source};
  }
  return {0, 0, 0, Role::Source};
}

struct HeatmapCell {
  int dst_column = 0;
  int dst_slr = 0;
  int dst_index = 0;
  int hops_h = 0;
  int hops_v = 0;
  int slr_crossings = 0;
  double throughput_gbps = 0;
  double latency_ns = 0;
};

/// One isolated run per destination, best of the two row policies for
/// throughput; latency and hop geometry come from the nearest-row route
/// (the latency-optimal one).
inline std::vector<HeatmapCell> run_heatmap(const NocGraph& g, Corner corner, ProtocolKind proto,
                                            const SimConfig& cfg) {
  const DeviceSpec& d = g.spec();
  const NodeRef src = corner_source(g, corner);
  std::vector<HeatmapCell> cells;
  for (int c = 0; c < d.vnoc_columns; ++c)
    for (int s = 0; s < d.slr_count; ++s)
      for (int i = 0; i < d.endpoints_in_slr(s); ++i) {
        const NodeRef dst{c, s, i, Role::Sink};
        HeatmapCell cell;
        cell.dst_column = c;
        cell.dst_slr = s;
        cell.dst_index = i;
        const Path near = default_path(g, src, dst, RowChoice::NearestRow);
        cell.hops_h = count_links(g, near, LinkKind::HnocHop);
        cell.hops_v = count_links(g, near, LinkKind::VnocHop);
        cell.slr_crossings = slr_crossings(g, near);
        cell.latency_ns = probes::pair_latency(g, cfg, src, dst, RowChoice::NearestRow);
        double best = probes::pair_throughput(g, cfg, src, dst, proto, RowChoice::NearestRow);
        if (src.column != dst.column)
          best = std::max(best,
                          probes::pair_throughput(g, cfg, src, dst, proto, RowChoice::MemoryRow));
        cell.throughput_gbps = best;
        cells.push_back(cell);
      }
  return cells;
}

inline void write_heatmap_csv(const std::vector<HeatmapCell>& cells, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "path", "cannot write " + path);
  out << "dst_column,dst_slr,dst_index,hops_h,hops_v,slr_crossings,throughput_gbps,latency_ns\n";
  for (const auto& c : cells)
    out << c.dst_column << ',' << c.dst_slr << ',' << c.dst_index << ',' << c.hops_h << ','
        << c.hops_v << ',' << c.slr_crossings << ',' << format_number(c.throughput_gbps) << ','
        << format_number(c.latency_ns) << '\n';
}

// ---------------------------------------------------------------------------
// Pattern sweeps
// ---------------------------------------------------------------------------

struct SweepCell {
  PatternKind pattern = PatternKind::NearestNeighbor;
  PlacementKind placement = PlacementKind::Local;
  int size = 4;
  ProtocolKind protocol = ProtocolKind::Stream;
  bool skipped = false;
  std::string skip_reason;
  double avg_source_gbps = 0;
  double ideal_gbps = 0;  // ideal-crossbar reference for the same pattern
  double sink_eject_rate = 0;
  double solve_time_s = 0;
};

/// Ideal-crossbar reference: per-source max-min allocation averaged over the
/// pattern's phases, saturating sources against 16 GB/s ports.
inline double ideal_reference(PatternKind pattern, int n, double port_rate = 16.0) {
  if (pattern == PatternKind::Random) return port_rate;  // collision-free ceiling
  PatternSchedule ps = gen_pattern(pattern, n);
  double sum = 0;
  for (const auto& phase : ps.phases) {
    std::vector<EndpointDemand> flows;
    for (int i = 0; i < n; ++i)
      flows.push_back({static_cast<std::uint32_t>(i),
                       static_cast<std::uint32_t>(phase[static_cast<std::size_t>(i)])});
    auto alloc = ideal_crossbar(flows, port_rate);
    double mean = 0;
    for (double a : alloc) mean += a;
    sum += mean / n;
  }
  return sum / static_cast<double>(ps.phases.size());
}

inline SweepCell run_sweep_cell(const NocGraph& g, PatternKind pattern, PlacementKind placement,
                                int size, ProtocolKind proto, const SimConfig& cfg,
                                std::uint64_t seed = 1, double budget_s = 30.0) {
  SweepCell cell;
  cell.pattern = pattern;
  cell.placement = placement;
  cell.size = size;
  cell.protocol = proto;

  Workload w;
  w.pattern = pattern;
  w.placement = {placement, size, 0, 0};
  w.protocol.kind = proto;
  w.rng_seed = seed;
  BuiltWorkload built;
  try {
    built = build_workload(w, g);
  } catch (const Error& e) {
    cell.skipped = true;
    cell.skip_reason = e.what();
    return cell;
  }

  RouteRequest req;
  req.connections = built.connections;
  req.time_budget_s = budget_s;
  req.seed = seed;
  CompileResult cr = compile(req, g);
  cell.solve_time_s = cr.solve_time_s;
  if (cr.status != CompileStatus::Feasible) {
    cell.skipped = true;
    cell.skip_reason = std::string(to_string(cr.status));
    return cell;
  }

  SimMetrics m = simulate(g, *cr.table, built.connections, built.schedule, w.protocol, cfg);
  cell.sink_eject_rate = m.sink_eject_rate;

  // Average source throughput: one connection per source for the
  // single-phase patterns; otherwise total source bytes over its own window.
  const auto& sched = built.schedule;
  std::vector<std::int64_t> bytes(static_cast<std::size_t>(size), 0);
  std::vector<std::uint64_t> t0(static_cast<std::size_t>(size), ~0ull), t1(static_cast<std::size_t>(size), 0);
  std::vector<int> src_of(built.connections.size(), 0);
  for (const auto& ph : sched.phases)
    for (std::size_t s = 0; s < ph.per_source.size(); ++s)
      for (auto [conn, txns] : ph.per_source[s]) src_of[conn] = static_cast<int>(s);
  const bool single_phase = sched.phases.size() == 1 && !sched.phases[0].barrier;
  if (single_phase && pattern != PatternKind::Random) {
    double sum = 0;
    for (ConnId c = 0; c < built.connections.size(); ++c)
      sum += m.per_connection[c].throughput_gbps;
    cell.avg_source_gbps = sum / size;
  } else {
    for (ConnId c = 0; c < built.connections.size(); ++c) {
      const auto& cm = m.per_connection[c];
      if (cm.data_packets == 0) continue;
      const auto s = static_cast<std::size_t>(src_of[c]);
      bytes[s] += cm.payload_bytes;
      t0[s] = std::min(t0[s], cm.first_inject_cycle);
      t1[s] = std::max(t1[s], cm.last_eject_cycle);
    }
    const double cycle_ns = 1e3 / (cfg.noc_clock > 0 ? cfg.noc_clock : g.spec().noc_clock);
    double sum = 0;
    for (int s = 0; s < size; ++s) {
      const double dt = static_cast<double>(t1[static_cast<std::size_t>(s)] -
                                            t0[static_cast<std::size_t>(s)]) * cycle_ns;
      if (dt > 0) sum += static_cast<double>(bytes[static_cast<std::size_t>(s)]) / dt;
    }
    cell.avg_source_gbps = sum / size;
  }
  cell.ideal_gbps = ideal_reference(pattern, size);
  return cell;
}

inline std::vector<ResultRow> run_pattern_sweep(const NocGraph& g,
                                                const std::vector<PatternKind>& patterns,
                                                const std::vector<PlacementKind>& placements,
                                                const std::vector<int>& sizes,
                                                const std::vector<ProtocolKind>& protocols,
                                                const SimConfig& cfg, std::uint64_t seed,
                                                std::vector<SweepCell>* cells_out = nullptr) {
  std::vector<ResultRow> rows;
  for (PatternKind pat : patterns)
    for (PlacementKind pl : placements)
      for (int size : sizes)
        for (ProtocolKind proto : protocols) {
          if (pat == PatternKind::Random && proto == ProtocolKind::Stream) continue;
          SweepCell cell = run_sweep_cell(g, pat, pl, size, proto, cfg, seed);
          if (cells_out) cells_out->push_back(cell);
          ResultRow base;
          base.experiment = "pattern_sweep";
          base.params = {{"pattern", std::string(to_string(pat))},
                         {"placement", std::string(to_string(pl))},
                         {"size", std::to_string(size)},
                         {"protocol", std::string(to_string(proto))}};
          if (cell.skipped) {
            ResultRow r = base;
            r.metric = "skipped";
            r.value = 1;
            r.unit = "count";
            rows.push_back(r);
            continue;
          }
          ResultRow thr = base;
          thr.metric = "avg_source_throughput";
          thr.value = cell.avg_source_gbps;
          thr.unit = "GB/s";
          rows.push_back(thr);
          ResultRow ideal = base;
          ideal.metric = "ideal_crossbar";
          ideal.value = cell.ideal_gbps;
          ideal.unit = "GB/s";
          rows.push_back(ideal);
        }
  return rows;
}

// ---------------------------------------------------------------------------
// Compiler sweeps
// ---------------------------------------------------------------------------

struct CompileCell {
  PlacementKind placement = PlacementKind::HNoC;
  int nmu = 0;
  int nsu = 0;
  std::string status;  // feasible | infeasible | timeout | not_enough
  double solve_time_s = 0;
};

/// All-to-all crossbar at the routability-floor QoS, vendor-style: NMUs and
/// NSUs drawn from the placement's endpoint order.
inline CompileCell run_compile_cell(const NocGraph& g, PlacementKind placement, int nmu, int nsu,
                                    double qos, double budget_s, std::uint64_t seed) {
  CompileCell cell;
  cell.placement = placement;
  cell.nmu = nmu;
  cell.nsu = nsu;
  std::vector<NodeRef> sources, sinks;
  try {
    auto [src, dst] = place_nodes({placement, std::max(nmu, nsu), 0, 0}, g);
    sources.assign(src.begin(), src.begin() + nmu);
    sinks.assign(dst.begin(), dst.begin() + nsu);
  } catch (const Error&) {
    cell.status = nmu >= nsu ? "not_enough_nmu" : "not_enough_nsu";
    return cell;
  }
  RouteRequest req;
  req.time_budget_s = budget_s;
  req.seed = seed;
  for (int i = 0; i < nmu; ++i)
    for (int j = 0; j < nsu; ++j) {
      Connection c;
      c.src_ref = sources[static_cast<std::size_t>(i)];
      c.dst_ref = sinks[static_cast<std::size_t>(j)];
      c.src = g.endpoint(c.src_ref);
      c.dst = g.endpoint(c.dst_ref);
      c.qos_gbps = qos;
      req.connections.connections.push_back(c);
    }
  CompileResult r = compile(req, g);
  cell.status = std::string(to_string(r.status));
  cell.solve_time_s = r.solve_time_s;
  return cell;
}

inline std::vector<ResultRow> run_compile_sweep(const NocGraph& g, const std::vector<int>& nmus,
                                                const std::vector<int>& nsus,
                                                const std::vector<PlacementKind>& placements,
                                                double qos, double budget_s, std::uint64_t seed,
                                                std::vector<CompileCell>* cells_out = nullptr) {
  std::vector<ResultRow> rows;
  for (PlacementKind pl : placements)
    for (int m : nmus)
      for (int s : nsus) {
        CompileCell cell = run_compile_cell(g, pl, m, s, qos, budget_s, seed);
        if (cells_out) cells_out->push_back(cell);
        ResultRow r;
        r.experiment = "compile_sweep";
        r.params = {{"placement", std::string(to_string(pl))},
                    {"nmu", std::to_string(m)},
                    {"nsu", std::to_string(s)},
                    {"status", cell.status}};
        r.metric = "solve_time";
        r.value = cell.solve_time_s;
        r.unit = "s";
        rows.push_back(r);
      }
  return rows;
}

// ---------------------------------------------------------------------------
// Memory sweeps
// ---------------------------------------------------------------------------

inline std::vector<ResultRow> run_memory_sweep(const NocGraph& g_mem, MemoryKind kind,
                                               const SimConfig& cfg, std::uint64_t seed) {
  std::vector<ResultRow> rows;
  auto add = [&](const MemoryExperiment& ex, const MemoryRun& run, const std::string& place) {
    ResultRow r;
    r.experiment = "memory_sweep";
    r.params = {{"kind", kind == MemoryKind::Dram ? "dram" : "hbm"},
                {"pattern", std::string(to_string(ex.pattern))},
                {"sources", std::to_string(ex.n_sources)},
                {"placement", place},
                {"protocol", std::string(to_string(ex.protocol))}};
    r.metric = "aggregate_throughput";
    r.value = run.aggregate_gbps;
    r.unit = "GB/s";
    rows.push_back(r);
  };
  if (kind == MemoryKind::Dram) {
    for (int n : {4, 8})
      for (int slr = 0; slr < g_mem.spec().slr_count; ++slr)
        for (ProtocolKind proto : {ProtocolKind::ReadOnly, ProtocolKind::WriteOnly}) {
          MemoryExperiment ex;
          ex.n_sources = n;
          ex.slr = slr;
          ex.protocol = proto;
          ex.seed = seed;
          add(ex, memory_experiment(g_mem, ex, cfg), "slr" + std::to_string(slr));
        }
    for (int n : {4, 8})
      for (ProtocolKind proto : {ProtocolKind::ReadOnly, ProtocolKind::WriteOnly}) {
        MemoryExperiment ex;
        ex.n_sources = n;
        ex.slr = MemoryExperiment::kVnoc;
        ex.protocol = proto;
        ex.seed = seed;
        add(ex, memory_experiment(g_mem, ex, cfg), "vnoc");
      }
  } else {
    for (int n : {8, 16, 32})
      for (bool hbm_nmu : {true, false})
        for (ProtocolKind proto : {ProtocolKind::ReadOnly, ProtocolKind::WriteOnly}) {
          MemoryExperiment ex;
          ex.n_sources = n;
          ex.use_hbm_nmus = hbm_nmu;
          ex.slr = MemoryExperiment::kNearestFill;
          ex.protocol = proto;
          ex.seed = seed;
          add(ex, memory_experiment(g_mem, ex, cfg), hbm_nmu ? "hbm_nmu" : "pl_nmu");
        }
  }
  return rows;
}

}  // namespace benchnoc
