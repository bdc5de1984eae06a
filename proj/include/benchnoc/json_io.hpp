#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "benchnoc/engine.hpp"
#include "benchnoc/routegen.hpp"
#include "benchnoc/topology.hpp"
#include "benchnoc/traffic.hpp"

namespace benchnoc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Enum names (also used by the CLI)
// ---------------------------------------------------------------------------

inline PatternKind pattern_from_string(const std::string& s) {
  for (PatternKind k : {PatternKind::NearestNeighbor, PatternKind::Shift, PatternKind::Tornado,
                        PatternKind::Reverse, PatternKind::Uniform, PatternKind::Hotspot,
                        PatternKind::Random})
    if (s == to_string(k)) return k;
  throw Error(ErrorKind::Validation, "pattern", "unknown pattern '" + s + "'");
}

inline PlacementKind placement_from_string(const std::string& s) {
  for (PlacementKind k :
       {PlacementKind::Local, PlacementKind::HNoC, PlacementKind::VNoC, PlacementKind::Spread})
    if (s == to_string(k)) return k;
  throw Error(ErrorKind::Validation, "placement", "unknown placement '" + s + "'");
}

inline ProtocolKind protocol_from_string(const std::string& s) {
  for (ProtocolKind k : {ProtocolKind::ReadOnly, ProtocolKind::WriteOnly, ProtocolKind::Stream})
    if (s == to_string(k)) return k;
  throw Error(ErrorKind::Validation, "protocol", "unknown protocol '" + s + "'");
}

// ---------------------------------------------------------------------------
// Device spec
// ---------------------------------------------------------------------------

inline json to_json(const LinkKindTable& t) {
  return json{{"local", t.local},
              {"vnoc_hop", t.vnoc_hop},
              {"hnoc_hop", t.hnoc_hop},
              {"nidb_crossing", t.nidb_crossing},
              {"ncrb_crossing", t.ncrb_crossing},
              {"mem_port", t.mem_port}};
}

inline LinkKindTable link_table_from_json(const json& j, const LinkKindTable& defaults) {
  LinkKindTable t = defaults;
  if (j.contains("local")) t.local = j.at("local").get<double>();
  if (j.contains("vnoc_hop")) t.vnoc_hop = j.at("vnoc_hop").get<double>();
  if (j.contains("hnoc_hop")) t.hnoc_hop = j.at("hnoc_hop").get<double>();
  if (j.contains("nidb_crossing")) t.nidb_crossing = j.at("nidb_crossing").get<double>();
  if (j.contains("ncrb_crossing")) t.ncrb_crossing = j.at("ncrb_crossing").get<double>();
  if (j.contains("mem_port")) t.mem_port = j.at("mem_port").get<double>();
  return t;
}

inline json to_json(const MemorySpec& m) {
  json j;
  switch (m.kind) {
    case MemoryKind::None: j["kind"] = "none"; break;
    case MemoryKind::Dram: j["kind"] = "dram"; break;
    case MemoryKind::Hbm: j["kind"] = "hbm"; break;
  }
  j["dram"] = {{"noc_links_to_dram", m.dram.noc_links_to_dram},
               {"aggregate_practical_bw", m.dram.aggregate_practical_bw},
               {"port_latency_ns", m.dram.port_latency_ns}};
  j["hbm"] = {{"stacks", m.hbm.stacks},
              {"hbm_nmus_per_stack", m.hbm.hbm_nmus_per_stack},
              {"hbm_nmu_width", m.hbm.hbm_nmu_width},
              {"hbm_nmu_clock", m.hbm.hbm_nmu_clock},
              {"controller_efficiency", m.hbm.controller_efficiency},
              {"stack_row_trunk", m.hbm.stack_row_trunk},
              {"port_latency_ns", m.hbm.port_latency_ns}};
  return j;
}

inline MemorySpec memory_from_json(const json& j) {
  MemorySpec m;
  const std::string kind = j.value("kind", "none");
  if (kind == "dram")
    m.kind = MemoryKind::Dram;
  else if (kind == "hbm")
    m.kind = MemoryKind::Hbm;
  else if (kind == "none")
    m.kind = MemoryKind::None;
  else
    throw Error(ErrorKind::Validation, "memory.kind", "unknown memory kind '" + kind + "'");
  if (j.contains("dram")) {
    const json& d = j.at("dram");
    m.dram.noc_links_to_dram = d.value("noc_links_to_dram", m.dram.noc_links_to_dram);
    m.dram.aggregate_practical_bw = d.value("aggregate_practical_bw", m.dram.aggregate_practical_bw);
    m.dram.port_latency_ns = d.value("port_latency_ns", m.dram.port_latency_ns);
  }
  if (j.contains("hbm")) {
    const json& h = j.at("hbm");
    m.hbm.stacks = h.value("stacks", m.hbm.stacks);
    m.hbm.hbm_nmus_per_stack = h.value("hbm_nmus_per_stack", m.hbm.hbm_nmus_per_stack);
    m.hbm.hbm_nmu_width = h.value("hbm_nmu_width", m.hbm.hbm_nmu_width);
    m.hbm.hbm_nmu_clock = h.value("hbm_nmu_clock", m.hbm.hbm_nmu_clock);
    m.hbm.controller_efficiency = h.value("controller_efficiency", m.hbm.controller_efficiency);
    m.hbm.stack_row_trunk = h.value("stack_row_trunk", m.hbm.stack_row_trunk);
    m.hbm.port_latency_ns = h.value("port_latency_ns", m.hbm.port_latency_ns);
  }
  return m;
}

inline json to_json(const DeviceSpec& d) {
  json rows = json::array();
  for (const auto& r : d.hnoc_rows)
    rows.push_back({{"slr_index", r.slr_index},
                    {"has_ncrb", r.has_ncrb},
                    {"is_memory_row", r.is_memory_row}});
  return json{{"name", d.name},
              {"slr_count", d.slr_count},
              {"vnoc_columns", d.vnoc_columns},
              {"nmu_per_column_bottom_slr", d.nmu_per_column_bottom_slr},
              {"nmu_per_column_other_slr", d.nmu_per_column_other_slr},
              {"noc_clock", d.noc_clock},
              {"flit_width", d.flit_width},
              {"hnoc_rows", rows},
              {"link_latency", to_json(d.link_latency)},
              {"link_capacity", to_json(d.link_capacity)},
              {"memory", to_json(d.memory)}};
}

inline DeviceSpec device_from_json(const json& j) {
  DeviceSpec d;
  d.name = j.value("name", d.name);
  d.slr_count = j.value("slr_count", d.slr_count);
  d.vnoc_columns = j.value("vnoc_columns", d.vnoc_columns);
  d.nmu_per_column_bottom_slr = j.value("nmu_per_column_bottom_slr", d.nmu_per_column_bottom_slr);
  d.nmu_per_column_other_slr = j.value("nmu_per_column_other_slr", d.nmu_per_column_other_slr);
  d.noc_clock = j.value("noc_clock", d.noc_clock);
  d.flit_width = j.value("flit_width", d.flit_width);
  if (j.contains("hnoc_rows")) {
    d.hnoc_rows.clear();
    for (const auto& r : j.at("hnoc_rows"))
      d.hnoc_rows.push_back({r.value("slr_index", 0), r.value("has_ncrb", true),
                             r.value("is_memory_row", false)});
  } else {
    d.hnoc_rows = DeviceSpec::rows_one_per_slr(d.slr_count);
  }
  if (j.contains("link_latency")) d.link_latency = link_table_from_json(j.at("link_latency"), d.link_latency);
  if (j.contains("link_capacity"))
    d.link_capacity = link_table_from_json(j.at("link_capacity"), d.link_capacity);
  if (j.contains("memory")) d.memory = memory_from_json(j.at("memory"));
  d.validate();
  return d;
}

// ---------------------------------------------------------------------------
// Workloads and connections
// ---------------------------------------------------------------------------

inline json to_json(const Workload& w) {
  return json{{"pattern", std::string(to_string(w.pattern))},
              {"placement",
               {{"kind", std::string(to_string(w.placement.kind))},
                {"n_pairs", w.placement.n_pairs},
                {"column", w.placement.column},
                {"slr", w.placement.slr}}},
              {"protocol",
               {{"kind", std::string(to_string(w.protocol.kind))},
                {"data_width", w.protocol.data_width},
                {"user_clock", w.protocol.user_clock}}},
              {"txn_size", w.txn_size},
              {"total_bytes_per_pair", w.total_bytes_per_pair},
              {"qos_per_connection", w.qos_per_connection},
              {"rng_seed", w.rng_seed}};
}

inline Workload workload_from_json(const json& j) {
  Workload w;
  if (j.contains("pattern")) w.pattern = pattern_from_string(j.at("pattern").get<std::string>());
  if (j.contains("placement")) {
    const json& p = j.at("placement");
    if (p.contains("kind")) w.placement.kind = placement_from_string(p.at("kind").get<std::string>());
    w.placement.n_pairs = p.value("n_pairs", w.placement.n_pairs);
    w.placement.column = p.value("column", w.placement.column);
    w.placement.slr = p.value("slr", w.placement.slr);
  }
  if (j.contains("protocol")) {
    const json& p = j.at("protocol");
    if (p.contains("kind")) w.protocol.kind = protocol_from_string(p.at("kind").get<std::string>());
    w.protocol.data_width = p.value("data_width", w.protocol.data_width);
    w.protocol.user_clock = p.value("user_clock", w.protocol.user_clock);
  }
  w.txn_size = j.value("txn_size", w.txn_size);
  w.total_bytes_per_pair = j.value("total_bytes_per_pair", w.total_bytes_per_pair);
  w.qos_per_connection = j.value("qos_per_connection", w.qos_per_connection);
  w.rng_seed = j.value("rng_seed", w.rng_seed);
  return w;
}

inline json to_json(const NodeRef& r) {
  return json{{"column", r.column},
              {"slr", r.slr},
              {"index", r.index},
              {"role", r.role == Role::Source ? "source" : "sink"}};
}

inline NodeRef noderef_from_json(const json& j) {
  NodeRef r;
  r.column = j.value("column", 0);
  r.slr = j.value("slr", 0);
  r.index = j.value("index", 0);
  r.role = j.value("role", std::string("source")) == "sink" ? Role::Sink : Role::Source;
  return r;
}

inline json to_json(const ConnectionSet& cs) {
  json arr = json::array();
  for (const auto& c : cs.connections)
    arr.push_back(
        {{"src", to_json(c.src_ref)}, {"dst", to_json(c.dst_ref)}, {"qos_gbps", c.qos_gbps},
         {"phase", c.phase}});
  return json{{"connections", arr}};
}

inline ConnectionSet connections_from_json(const json& j, const NocGraph& g) {
  ConnectionSet cs;
  for (const auto& e : j.at("connections")) {
    Connection c;
    c.src_ref = noderef_from_json(e.at("src"));
    c.dst_ref = noderef_from_json(e.at("dst"));
    c.src_ref.role = Role::Source;
    c.dst_ref.role = Role::Sink;
    c.src = g.endpoint(c.src_ref);
    c.dst = g.endpoint(c.dst_ref);
    c.qos_gbps = e.value("qos_gbps", 0.005);
    c.phase = e.value("phase", 0);
    cs.connections.push_back(c);
  }
  return cs;
}

// ---------------------------------------------------------------------------
// Sim config, compile results, metrics
// ---------------------------------------------------------------------------

inline json to_json(const SimConfig& c) {
  json j{{"flit_width", c.flit_width},
         {"noc_clock", c.noc_clock},
         {"packet_payload", c.packet_payload},
         {"header_flits_per_packet", c.header_flits_per_packet},
         {"read_window", c.read_window},
         {"ncrb_effective_capacity", c.ncrb_effective_capacity},
         {"endpoint_overhead_ns", c.endpoint_overhead_ns},
         {"warmup_bytes", c.warmup_bytes},
         {"seed", c.seed}};
  if (c.has_latency_override) j["link_latency_override"] = to_json(c.link_latency_override);
  return j;
}

inline SimConfig simconfig_from_json(const json& j) {
  SimConfig c;
  c.flit_width = j.value("flit_width", c.flit_width);
  c.noc_clock = j.value("noc_clock", c.noc_clock);
  c.packet_payload = j.value("packet_payload", c.packet_payload);
  c.header_flits_per_packet = j.value("header_flits_per_packet", c.header_flits_per_packet);
  c.read_window = j.value("read_window", c.read_window);
  c.ncrb_effective_capacity = j.value("ncrb_effective_capacity", c.ncrb_effective_capacity);
  c.endpoint_overhead_ns = j.value("endpoint_overhead_ns", c.endpoint_overhead_ns);
  c.warmup_bytes = j.value("warmup_bytes", c.warmup_bytes);
  c.seed = j.value("seed", c.seed);
  if (j.contains("link_latency_override")) {
    c.has_latency_override = true;
    c.link_latency_override =
        link_table_from_json(j.at("link_latency_override"), LinkKindTable{});
  }
  return c;
}

inline json to_json(const CompileResult& r) {
  json j{{"status", std::string(to_string(r.status))},
         {"solve_time_s", r.solve_time_s},
         {"decisions", r.decisions},
         {"backtracks", r.backtracks}};
  if (!r.witness.empty()) j["witness"] = r.witness;
  if (r.witness_link) j["witness_link"] = *r.witness_link;
  if (r.table) {
    json routes = json::array();
    for (const auto& p : r.table->routes) routes.push_back(p.links);
    j["routes"] = routes;
  }
  return j;
}

inline RouteTable routetable_from_json(const json& j, const NocGraph& g) {
  RouteTable t;
  for (const auto& r : j.at("routes")) {
    Path p;
    for (const auto& l : r) p.links.push_back(l.get<LinkId>());
    t.routes.push_back(std::move(p));
  }
  t.reserved_per_link.assign(g.links().size(), 0.0);
  return t;
}

inline json to_json(const SimMetrics& m) {
  json conns = json::array();
  for (std::size_t i = 0; i < m.per_connection.size(); ++i) {
    const auto& c = m.per_connection[i];
    conns.push_back({{"id", i},
                     {"throughput_gbps", c.throughput_gbps},
                     {"mean_latency_ns", c.mean_latency_ns},
                     {"payload_bytes", c.payload_bytes},
                     {"data_packets", c.data_packets}});
  }
  json links = json::array();
  for (const auto& u : m.per_link)
    links.push_back({{"link", u.link}, {"utilization", u.utilization}});
  return json{{"per_connection", conns},
              {"per_link", links},
              {"aggregate",
               {{"cycles", m.cycles},
                {"duration_ns", m.duration_ns},
                {"total_payload_bytes", m.total_payload_bytes},
                {"throughput_gbps", m.aggregate_throughput_gbps},
                {"flits_injected", m.flits_injected},
                {"flits_ejected", m.flits_ejected},
                {"sink_eject_rate", m.sink_eject_rate}}}};
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "path", "cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "path", "cannot write " + path);
  out << j.dump(2) << "\n";
}

inline DeviceSpec load_device(const std::string& path) { return device_from_json(load_json(path)); }
inline Workload load_workload(const std::string& path) { return workload_from_json(load_json(path)); }
inline SimConfig load_simconfig(const std::string& path) { return simconfig_from_json(load_json(path)); }

}  // namespace benchnoc
