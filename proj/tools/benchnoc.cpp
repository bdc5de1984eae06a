// benchnoc: device model, route compiler, flit-level simulator and benchmark
// harness for chiplet-partitioned hard FPGA NoCs.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "benchnoc/bench.hpp"
#include "benchnoc/calibrate.hpp"
#include "benchnoc/engine.hpp"
#include "benchnoc/json_io.hpp"
#include "benchnoc/memory.hpp"
#include "benchnoc/refmodel.hpp"
#include "benchnoc/routegen.hpp"

namespace bn = benchnoc;

namespace {

bn::DeviceSpec resolve_device(const std::string& spec) {
  if (spec == "vp1802") return bn::DeviceSpec::vp1802();
  if (spec == "vh1782") return bn::DeviceSpec::vh1782();
  if (std::filesystem::exists(spec)) return bn::load_device(spec);
  const std::string shipped = std::string(BENCHNOC_DATA_DIR) + "/" + spec + ".json";
  if (std::filesystem::exists(shipped)) return bn::load_device(shipped);
  throw bn::Error(bn::ErrorKind::Io, "device", "no such device file or name: " + spec);
}

bn::SimConfig resolve_config(const std::string& path) {
  if (path.empty()) return bn::calibrated_config();
  return bn::load_simconfig(path);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void write_or_print(const bn::json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(2) << "\n";
  else
    bn::save_json(out, j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchnoc: hard-NoC performance model and benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string device_arg = "vp1802";
  std::string config_arg;
  std::string out_arg;
  std::uint64_t seed = 1;
  app.add_option("--device", device_arg, "device JSON file or builtin name (vp1802, vh1782)");
  app.add_option("--config", config_arg, "simulator config JSON (default: committed calibration)");
  app.add_option("--out", out_arg, "output file (default: stdout where applicable)");
  app.add_option("--seed", seed, "global RNG seed");

  // device ------------------------------------------------------------------
  auto* cmd_device = app.add_subcommand("device", "build and summarize a device model");
  bool device_emit = false;
  cmd_device->add_flag("--emit", device_emit, "emit the normalized device JSON");

  // compile -----------------------------------------------------------------
  auto* cmd_compile = app.add_subcommand("compile", "compile a connection set into static routes");
  std::string connections_file;
  double budget = 60.0;
  cmd_compile->add_option("--connections", connections_file, "connection set JSON")->required();
  cmd_compile->add_option("--budget", budget, "time budget in seconds");

  // sim ---------------------------------------------------------------------
  auto* cmd_sim = app.add_subcommand("sim", "simulate a workload over compiled routes");
  std::string workload_file, routes_file;
  cmd_sim->add_option("--workload", workload_file, "workload JSON")->required();
  cmd_sim->add_option("--routes", routes_file, "route table JSON (default: compile on the fly)");

  // oracle ------------------------------------------------------------------
  auto* cmd_oracle = app.add_subcommand("oracle", "analytic allocations for a workload");
  std::string oracle_workload;
  double port_rate = 16.0;
  cmd_oracle->add_option("--workload", oracle_workload, "workload JSON")->required();
  cmd_oracle->add_option("--port-rate", port_rate, "ideal crossbar port rate (GB/s)");

  // heatmap -----------------------------------------------------------------
  auto* cmd_heatmap = app.add_subcommand("heatmap", "corner-source point-to-point heat map");
  std::string corner_arg = "BL", protocol_arg = "stream";
  cmd_heatmap->add_option("--corner", corner_arg, "BL, BR, TL or TR");
  cmd_heatmap->add_option("--protocol", protocol_arg, "read, write or stream");

  // sweep -------------------------------------------------------------------
  auto* cmd_sweep = app.add_subcommand("sweep", "pattern or compiler sweeps");
  std::string sweep_kind = "pattern";
  std::string patterns_arg = "nearest_neighbor,shift,tornado,reverse,uniform,hotspot,random";
  std::string placements_arg = "local,hnoc,vnoc,spread";
  std::string sizes_arg = "4,7,8,16";
  std::string protocols_arg = "read,write,stream";
  std::string nmus_arg = "1,2,4,8,12,16,20,24,28";
  std::string nsus_arg = "1,2,4,8,12,16,20,24,28";
  double sweep_qos = 0.005;
  std::string format_arg = "csv";
  cmd_sweep->add_option("--kind", sweep_kind, "pattern | compile");
  cmd_sweep->add_option("--patterns", patterns_arg, "comma-separated patterns");
  cmd_sweep->add_option("--placements", placements_arg, "comma-separated placements");
  cmd_sweep->add_option("--sizes", sizes_arg, "comma-separated crossbar sizes");
  cmd_sweep->add_option("--protocols", protocols_arg, "comma-separated protocols");
  cmd_sweep->add_option("--nmus", nmus_arg, "comma-separated NMU counts (compile sweep)");
  cmd_sweep->add_option("--nsus", nsus_arg, "comma-separated NSU counts (compile sweep)");
  cmd_sweep->add_option("--qos", sweep_qos, "per-connection QoS for the compile sweep (GB/s)");
  cmd_sweep->add_option("--budget", budget, "compile time budget per cell (s)");
  cmd_sweep->add_option("--format", format_arg, "csv | json");

  // mem ---------------------------------------------------------------------
  auto* cmd_mem = app.add_subcommand("mem", "external memory bandwidth experiments");
  std::string mem_kind = "dram", mem_pattern = "nearest_neighbor", mem_protocol = "write";
  int mem_sources = 8, mem_slr = 0;
  bool mem_vnoc = false, mem_hbm_nmus = false, mem_sweep = false;
  cmd_mem->add_option("--kind", mem_kind, "dram | hbm");
  cmd_mem->add_option("--sources", mem_sources, "number of source endpoints");
  cmd_mem->add_option("--slr", mem_slr, "source SLR for horizontal placement");
  cmd_mem->add_flag("--vnoc", mem_vnoc, "place sources along one column");
  cmd_mem->add_flag("--hbm-nmus", mem_hbm_nmus, "use HBM NMUs instead of PL NMUs");
  cmd_mem->add_option("--pattern", mem_pattern, "nearest_neighbor | uniform | random");
  cmd_mem->add_option("--protocol", mem_protocol, "read | write");
  cmd_mem->add_flag("--sweep", mem_sweep, "run the full memory sweep grid");

  // calibrate ---------------------------------------------------------------
  auto* cmd_cal = app.add_subcommand("calibrate", "fit the simulator against reported anchors");
  std::string targets_file;
  cmd_cal->add_option("--targets", targets_file, "targets JSON (default: built-in anchor set)");

  CLI11_PARSE(app, argc, argv);

  try {
    bn::DeviceSpec dev = resolve_device(device_arg);
    bn::NocGraph graph = bn::build_device(dev);
    bn::SimConfig cfg = resolve_config(config_arg);
    cfg.seed = seed;

    if (*cmd_device) {
      if (device_emit) {
        write_or_print(bn::to_json(dev), out_arg);
        return 0;
      }
      std::printf("device %s: %d SLRs x %d columns, %d NMUs / %d NSUs\n", dev.name.c_str(),
                  dev.slr_count, dev.vnoc_columns, dev.total_endpoints(), dev.total_endpoints());
      std::printf("  nodes %zu, links %zu, channel %.2f GB/s raw\n", graph.nodes().size(),
                  graph.links().size(), dev.channel_capacity_gbps());
      return 0;
    }

    if (*cmd_compile) {
      bn::RouteRequest req;
      req.connections = bn::connections_from_json(bn::load_json(connections_file), graph);
      req.time_budget_s = budget;
      req.seed = seed;
      bn::CompileResult res = bn::compile(req, graph);
      write_or_print(bn::to_json(res), out_arg);
      return res.status == bn::CompileStatus::Feasible ? 0 : 2;
    }

    if (*cmd_sim) {
      bn::Workload w = bn::load_workload(workload_file);
      w.rng_seed = seed;
      bn::BuiltWorkload built = bn::build_workload(w, graph);
      bn::RouteTable table;
      if (!routes_file.empty()) {
        table = bn::routetable_from_json(bn::load_json(routes_file), graph);
      } else {
        bn::RouteRequest req;
        req.connections = built.connections;
        req.time_budget_s = budget;
        req.seed = seed;
        bn::CompileResult res = bn::compile(req, graph);
        if (res.status != bn::CompileStatus::Feasible)
          throw bn::Error(bn::ErrorKind::Routing, "routes",
                          "workload does not compile: " + std::string(to_string(res.status)));
        table = *res.table;
      }
      bn::SimMetrics m = bn::simulate(graph, table, built, w.protocol, cfg);
      write_or_print(bn::to_json(m), out_arg);
      return 0;
    }

    if (*cmd_oracle) {
      bn::Workload w = bn::load_workload(oracle_workload);
      bn::BuiltWorkload built = bn::build_workload(w, graph);
      bn::json out;
      // Ideal crossbar per phase.
      bn::PatternSchedule ps = bn::gen_pattern(w.pattern, w.placement.n_pairs);
      bn::json phases = bn::json::array();
      if (!ps.random) {
        for (const auto& phase : ps.phases) {
          std::vector<bn::EndpointDemand> flows;
          for (int i = 0; i < w.placement.n_pairs; ++i)
            flows.push_back({static_cast<std::uint32_t>(i),
                             static_cast<std::uint32_t>(phase[static_cast<std::size_t>(i)])});
          phases.push_back(bn::ideal_crossbar(flows, port_rate));
        }
      }
      out["ideal_crossbar"] = phases;
      // Max-min over default routes.
      std::vector<bn::Path> routes;
      std::vector<double> capacity(graph.links().size()), demands;
      for (bn::LinkId l = 0; l < capacity.size(); ++l)
        capacity[l] = bn::payload_capacity(graph, cfg, l);
      for (const auto& c : built.connections.connections) {
        routes.push_back(bn::default_path(graph, c.src_ref, c.dst_ref));
        demands.push_back(bn::open_loop_demand(graph, cfg, routes.back(),
                                               w.protocol.user_rate_gbps()));
      }
      out["maxmin_flow"] = bn::maxmin_flow(routes, capacity, demands);
      write_or_print(out, out_arg);
      return 0;
    }

    if (*cmd_heatmap) {
      auto cells = bn::run_heatmap(graph, bn::corner_from_string(corner_arg),
                                   bn::protocol_from_string(protocol_arg), cfg);
      if (out_arg.empty()) throw bn::Error(bn::ErrorKind::Io, "out", "--out is required");
      bn::write_heatmap_csv(cells, out_arg);
      std::printf("heatmap: %zu destinations -> %s\n", cells.size(), out_arg.c_str());
      return 0;
    }

    if (*cmd_sweep) {
      if (out_arg.empty()) throw bn::Error(bn::ErrorKind::Io, "out", "--out is required");
      const bn::ReportFormat fmt =
          format_arg == "json" ? bn::ReportFormat::Json : bn::ReportFormat::Csv;
      std::vector<bn::ResultRow> rows;
      if (sweep_kind == "pattern") {
        std::vector<bn::PatternKind> pats;
        for (const auto& s : split_csv(patterns_arg)) pats.push_back(bn::pattern_from_string(s));
        std::vector<bn::PlacementKind> pls;
        for (const auto& s : split_csv(placements_arg)) pls.push_back(bn::placement_from_string(s));
        std::vector<int> sizes;
        for (const auto& s : split_csv(sizes_arg)) sizes.push_back(std::stoi(s));
        std::vector<bn::ProtocolKind> protos;
        for (const auto& s : split_csv(protocols_arg)) protos.push_back(bn::protocol_from_string(s));
        rows = bn::run_pattern_sweep(graph, pats, pls, sizes, protos, cfg, seed);
      } else if (sweep_kind == "compile") {
        std::vector<int> nmus, nsus;
        for (const auto& s : split_csv(nmus_arg)) nmus.push_back(std::stoi(s));
        for (const auto& s : split_csv(nsus_arg)) nsus.push_back(std::stoi(s));
        std::vector<bn::PlacementKind> pls;
        for (const auto& s : split_csv(placements_arg)) {
          if (s == "local" || s == "vnoc") continue;  // vendor sweep covers hnoc and spread
          pls.push_back(bn::placement_from_string(s));
        }
        if (pls.empty()) pls = {bn::PlacementKind::HNoC, bn::PlacementKind::Spread};
        rows = bn::run_compile_sweep(graph, nmus, nsus, pls, sweep_qos, budget, seed);
      } else {
        throw bn::Error(bn::ErrorKind::Validation, "kind", "sweep kind must be pattern or compile");
      }
      bn::emit_report(rows, fmt, out_arg);
      std::printf("sweep: %zu rows -> %s\n", rows.size(), out_arg.c_str());
      return 0;
    }

    if (*cmd_mem) {
      bn::MemorySpec mem = dev.memory;
      if (mem_kind == "dram") mem.kind = bn::MemoryKind::Dram;
      if (mem_kind == "hbm") mem.kind = bn::MemoryKind::Hbm;
      bn::NocGraph g_mem = bn::attach_memory(graph, mem);
      if (mem_sweep) {
        if (out_arg.empty()) throw bn::Error(bn::ErrorKind::Io, "out", "--out is required");
        auto rows = bn::run_memory_sweep(g_mem, mem.kind, cfg, seed);
        bn::emit_report(rows, bn::ReportFormat::Csv, out_arg);
        std::printf("memory sweep: %zu rows -> %s\n", rows.size(), out_arg.c_str());
        return 0;
      }
      bn::MemoryExperiment ex;
      ex.n_sources = mem_sources;
      ex.slr = mem_vnoc ? bn::MemoryExperiment::kVnoc : mem_slr;
      ex.use_hbm_nmus = mem_hbm_nmus;
      ex.protocol = mem_protocol == "read" ? bn::ProtocolKind::ReadOnly : bn::ProtocolKind::WriteOnly;
      ex.seed = seed;
      if (mem_pattern == "uniform") ex.pattern = bn::MemPattern::Uniform;
      if (mem_pattern == "random") ex.pattern = bn::MemPattern::Random;
      bn::MemoryRun run = bn::memory_experiment(g_mem, ex, cfg);
      std::printf("%s %s %d sources: aggregate %.2f GB/s over %d targets\n", mem_kind.c_str(),
                  mem_protocol.c_str(), ex.n_sources, run.aggregate_gbps, run.n_targets);
      if (!out_arg.empty()) bn::save_json(out_arg, bn::to_json(run.metrics));
      return 0;
    }

    if (*cmd_cal) {
      std::vector<bn::CalibrationTarget> targets = bn::default_targets();
      if (!targets_file.empty()) {
        targets.clear();
        for (const auto& t : bn::load_json(targets_file)) {
          bn::CalibrationTarget ct;
          const std::string name = t.at("metric").get<std::string>();
          bool found = false;
          for (auto m : {bn::AnchorMetric::LocalReadGbps, bn::AnchorMetric::LocalStreamGbps,
                         bn::AnchorMetric::IntraSlrLatencyNs, bn::AnchorMetric::VerticalReadRatio,
                         bn::AnchorMetric::SlrReadLossGbps, bn::AnchorMetric::HnocReadLossGbps,
                         bn::AnchorMetric::LatencyIncrementRatio})
            if (name == bn::to_string(m)) {
              ct.metric = m;
              found = true;
            }
          if (!found)
            throw bn::Error(bn::ErrorKind::Validation, "metric", "unknown anchor " + name);
          ct.anchor = t.at("anchor").get<double>();
          ct.tolerance = t.value("tolerance", 0.10);
          targets.push_back(ct);
        }
      }
      bn::CalibrationResult res = bn::calibrate(targets, graph, cfg);
      for (const auto& r : res.residuals)
        std::printf("  %-26s anchor %9.3f  measured %9.3f  error %5.1f%%  (tol %.0f%%)\n",
                    std::string(to_string(r.metric)).c_str(), r.anchor, r.measured,
                    100 * r.relative_error, 100 * r.tolerance);
      std::printf("calibration %s after %d evaluations (worst residual %.1f%%)\n",
                  res.ok ? "converged" : "FAILED", res.evaluations, 100 * res.worst_error);
      if (!out_arg.empty()) bn::save_json(out_arg, bn::to_json(res.config));
      return res.ok ? 0 : 3;
    }
  } catch (const bn::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
