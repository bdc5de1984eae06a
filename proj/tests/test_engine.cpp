#include <catch2/catch_amalgamated.hpp>

#include "benchnoc/calibrate.hpp"
#include "benchnoc/engine.hpp"
#include "benchnoc/refmodel.hpp"

using namespace benchnoc;

namespace {

NocGraph& vp1802() {
  static NocGraph g = build_device(DeviceSpec::vp1802());
  return g;
}

SimConfig cal() { return calibrated_config(); }

struct SimSetup {
  ConnectionSet conns;
  RouteTable table;
  TransactionSchedule sched;
  Protocol protocol;
  BuiltWorkload built;
};

SimSetup workload_setup(const NocGraph& g, PatternKind pattern, Placement pl, ProtocolKind proto,
                        std::uint64_t seed = 1) {
  Workload w;
  w.pattern = pattern;
  w.placement = pl;
  w.protocol.kind = proto;
  w.rng_seed = seed;
  SimSetup s;
  s.built = build_workload(w, g);
  s.conns = s.built.connections;
  s.sched = s.built.schedule;
  s.protocol = w.protocol;
  for (const auto& c : s.conns.connections)
    s.table.routes.push_back(default_path(g, c.src_ref, c.dst_ref));
  return s;
}

}  // namespace

TEST_CASE("stream at the link ceiling: four local nearest-neighbor pairs") {
  auto& g = vp1802();
  auto s = workload_setup(g, PatternKind::NearestNeighbor, {PlacementKind::Local, 4, 0, 0},
                          ProtocolKind::Stream);
  auto m = simulate(g, s.table, s.conns, s.sched, s.protocol, cal());
  for (const auto& cm : m.per_connection)
    CHECK_THAT(cm.throughput_gbps, Catch::Matchers::WithinRel(16.0, 0.02));
}

TEST_CASE("NCRB clamp: one hop costs three GB/s, further hops are free") {
  auto& g = vp1802();
  // SLR1's own row carries NCRBs; horizontal neighbours use it.
  std::vector<double> write_thr, stream_thr;
  for (int col = 1; col < 4; ++col) {
    write_thr.push_back(probes::pair_throughput(g, cal(), {0, 1, 0, Role::Source},
                                                {col, 1, 0, Role::Sink}, ProtocolKind::WriteOnly));
    stream_thr.push_back(probes::pair_throughput(g, cal(), {0, 1, 0, Role::Source},
                                                 {col, 1, 0, Role::Sink}, ProtocolKind::Stream));
  }
  for (double t : write_thr) CHECK_THAT(t, Catch::Matchers::WithinAbs(13.0, 1.0));
  for (double t : stream_thr) CHECK_THAT(t, Catch::Matchers::WithinAbs(13.0, 1.0));
  // No additional drop for hops 2..max.
  for (std::size_t h = 1; h < write_thr.size(); ++h) {
    CHECK_THAT(write_thr[h], Catch::Matchers::WithinRel(write_thr[0], 0.02));
    CHECK_THAT(stream_thr[h], Catch::Matchers::WithinRel(stream_thr[0], 0.02));
  }
}

TEST_CASE("closed-loop reads: local pair lands near eight GB/s") {
  auto& g = vp1802();
  const double t = probes::pair_throughput(g, cal(), {0, 0, 0, Role::Source},
                                           {0, 0, 0, Role::Sink}, ProtocolKind::ReadOnly);
  CHECK_THAT(t, Catch::Matchers::WithinRel(8.0, 0.15));
}

TEST_CASE("read throughput decays with die crossings into the reported band") {
  auto& g = vp1802();
  auto v = probes::read_by_crossings(g, cal());
  REQUIRE(v.size() == 4);
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] < v[i - 1]);
  const double ratio = v.back() / v.front();
  CHECK(ratio >= 0.40);
  CHECK(ratio <= 0.60);
  const double slr_loss = (v.front() - v.back()) / 3.0;
  CHECK(slr_loss >= 1.0);
  CHECK(slr_loss <= 2.0);
}

TEST_CASE("read loss per memory-row column step stays sub-GB/s") {
  auto& g = vp1802();
  auto v = probes::read_by_columns(g, cal());
  const double loss = (v.front() - v.back()) / 3.0;
  CHECK(loss >= 0.2);
  CHECK(loss <= 0.8);
}

TEST_CASE("probe latency equals path latency plus overheads") {
  auto& g = vp1802();
  const SimConfig cfg = cal();
  // Analytic: per-link fitted latency (rounded to cycles) + one overhead per
  // endpoint touched; a single-flit probe adds no serialization tail.
  auto analytic = [&](NodeRef src, NodeRef dst) {
    Path p = default_path(g, src, dst);
    const double cyc = 1000.0 / g.spec().noc_clock;
    double cycles = 0;
    for (LinkId l : p.links) {
      double ns = cfg.effective_latency_ns(g.spec(), g.link(l).kind);
      const auto& lk = g.link(l);
      if (g.node(lk.src).kind == NodeKind::NMU || g.node(lk.src).kind == NodeKind::NSU)
        ns += cfg.endpoint_overhead_ns;
      if (g.node(lk.dst).kind == NodeKind::NMU || g.node(lk.dst).kind == NodeKind::NSU)
        ns += cfg.endpoint_overhead_ns;
      cycles += std::max(1.0, std::round(ns / cyc));
    }
    return cycles * cyc;
  };
  for (NodeRef dst : {NodeRef{0, 0, 0, Role::Sink}, NodeRef{0, 0, 1, Role::Sink},
                      NodeRef{2, 1, 3, Role::Sink}, NodeRef{3, 3, 5, Role::Sink}}) {
    const double sim_ns = probes::pair_latency(g, cal(), {0, 0, 0, Role::Source}, dst);
    CHECK_THAT(sim_ns, Catch::Matchers::WithinRel(analytic({0, 0, 0, Role::Source}, dst), 1e-9));
  }
  // Anchor: intra-SLR latency sits at the ten-cycles-at-250MHz mark.
  const double adj =
      probes::pair_latency(g, cal(), {0, 0, 0, Role::Source}, {0, 0, 1, Role::Sink});
  CHECK_THAT(adj, Catch::Matchers::WithinRel(40.0, 0.20));
}

TEST_CASE("vertical latency increments dominate horizontal ones by 2-3x") {
  auto& g = vp1802();
  auto [dv, dh] = probes::latency_increments(g, cal());
  CHECK(dv / dh >= 2.0);
  CHECK(dv / dh <= 3.0);
}

TEST_CASE("closed-loop read law matches the analytic window bound") {
  auto& g = vp1802();
  const SimConfig cfg = cal();
  for (NodeRef dst : {NodeRef{0, 0, 0, Role::Sink}, NodeRef{0, 2, 3, Role::Sink},
                      NodeRef{3, 0, 0, Role::Sink}}) {
    const NodeRef src{0, 0, 0, Role::Source};
    const double measured = probes::pair_throughput(g, cfg, src, dst, ProtocolKind::ReadOnly);
    // Round trip: request probe one way, response the other, plus the
    // response serialization tail.
    const double fwd = probes::pair_latency(g, cfg, src, dst);
    const double cyc = 1000.0 / g.spec().noc_clock;
    const double packet_flits = cfg.packet_payload / g.spec().flit_bytes() + 1;
    const double rtt = 2 * fwd + (packet_flits - 1) * cyc;
    Path route = default_path(g, src, dst);
    const double cap = open_loop_demand(g, cfg, route, 1e9);
    const double law = std::min(cap, cfg.read_window * cfg.packet_payload / rtt);
    CHECK_THAT(measured, Catch::Matchers::WithinRel(law, 0.10));
  }
}

TEST_CASE("open-loop streams are distance insensitive") {
  auto& g = vp1802();
  const double near = probes::pair_throughput(g, cal(), {0, 0, 0, Role::Source},
                                              {0, 0, 1, Role::Sink}, ProtocolKind::Stream);
  const double far = probes::pair_throughput(g, cal(), {0, 0, 0, Role::Source},
                                             {0, 3, 5, Role::Sink}, ProtocolKind::Stream);
  CHECK_THAT(far, Catch::Matchers::WithinRel(near, 0.01));
}

TEST_CASE("flit conservation and capacity respect") {
  auto& g = vp1802();
  auto s = workload_setup(g, PatternKind::Reverse, {PlacementKind::VNoC, 8, 0, 0},
                          ProtocolKind::WriteOnly);
  auto m = simulate(g, s.table, s.conns, s.sched, s.protocol, cal());
  CHECK(m.flits_injected == m.flits_ejected);
  for (const auto& u : m.per_link) CHECK(u.utilization <= 1.0 + 1e-6);
  for (ConnId c = 0; c < s.conns.size(); ++c) {
    double cap = open_loop_demand(g, cal(), s.table.routes[c], 1e9);
    CHECK(m.per_connection[c].throughput_gbps <= cap * 1.01);
  }
}

TEST_CASE("identical inputs give bit-identical metrics") {
  auto& g = vp1802();
  auto s = workload_setup(g, PatternKind::Random, {PlacementKind::HNoC, 4, 0, 0},
                          ProtocolKind::WriteOnly, 7);
  auto a = simulate(g, s.table, s.conns, s.sched, s.protocol, cal());
  auto b = simulate(g, s.table, s.conns, s.sched, s.protocol, cal());
  REQUIRE(a.per_connection.size() == b.per_connection.size());
  CHECK(a.cycles == b.cycles);
  for (std::size_t i = 0; i < a.per_connection.size(); ++i) {
    CHECK(a.per_connection[i].throughput_gbps == b.per_connection[i].throughput_gbps);
    CHECK(a.per_connection[i].mean_latency_ns == b.per_connection[i].mean_latency_ns);
  }
}

TEST_CASE("steady-state shares match max-min fair water-filling") {
  auto& g = vp1802();
  for (PatternKind pat : {PatternKind::Reverse, PatternKind::Tornado, PatternKind::Shift}) {
    auto s = workload_setup(g, pat, {PlacementKind::VNoC, 8, 0, 0}, ProtocolKind::Stream);
    auto m = simulate(g, s.table, s.conns, s.sched, s.protocol, cal());
    std::vector<double> capacity(g.links().size());
    for (LinkId l = 0; l < capacity.size(); ++l) capacity[l] = payload_capacity(g, cal(), l);
    std::vector<double> demands;
    for (ConnId c = 0; c < s.conns.size(); ++c)
      demands.push_back(open_loop_demand(g, cal(), s.table.routes[c], s.protocol.user_rate_gbps()));
    auto ref = maxmin_flow(s.table.routes, capacity, demands);
    for (ConnId c = 0; c < s.conns.size(); ++c)
      CHECK_THAT(m.per_connection[c].throughput_gbps, Catch::Matchers::WithinRel(ref[c], 0.05));
  }
}

TEST_CASE("arbitration weights follow QoS") {
  auto& g = vp1802();
  // Two streams force-merged onto one channel chain by hand-built routes.
  ConnectionSet conns;
  RouteTable table;
  for (int i : {1, 2}) {
    Connection c;
    c.src_ref = {0, 0, i, Role::Source};
    c.dst_ref = {0, 0, 0, Role::Sink};
    c.src = g.endpoint(c.src_ref);
    c.dst = g.endpoint(c.dst_ref);
    c.qos_gbps = (i == 1) ? 10.0 : 5.0;
    conns.connections.push_back(c);
    table.routes.push_back(default_path(g, c.src_ref, c.dst_ref));
  }
  TransactionSchedule sched;
  sched.n_sources = 2;
  sched.txn_size = 4096;
  TransactionSchedule::Phase ph;
  ph.per_source = {{{0, 64}}, {{1, 64}}};
  sched.phases.push_back(ph);
  Protocol proto;
  proto.kind = ProtocolKind::Stream;
  auto m = simulate(g, table, conns, sched, proto, cal());
  // The heavier reservation holds a 2:1 share of the ejection channel while
  // both streams contend (the lighter one finishes solo afterwards, so only
  // its rival's share is clean to assert).
  const double channel_payload = 17.28 * 16.0 / 17.0;
  CHECK_THAT(m.per_connection[0].throughput_gbps,
             Catch::Matchers::WithinRel(channel_payload * 2.0 / 3.0, 0.08));
  CHECK(m.per_connection[1].throughput_gbps < m.per_connection[0].throughput_gbps);
}

TEST_CASE("hotspot saturates the destination port") {
  auto& g = vp1802();
  auto s = workload_setup(g, PatternKind::Hotspot, {PlacementKind::Local, 4, 0, 0},
                          ProtocolKind::Stream);
  auto m = simulate(g, s.table, s.conns, s.sched, s.protocol, cal());
  // Per-source average across the barriered phases approximates port/n.
  double per_source = 0;
  for (const auto& cm : m.per_connection) per_source += cm.payload_bytes;
  per_source = per_source / 4 / m.duration_ns;  // GB/s per source over the run
  CHECK_THAT(per_source, Catch::Matchers::WithinRel(16.0 / 4, 0.10));
  CHECK(m.sink_eject_rate >= 0.90);
}

TEST_CASE("unroutable scheduled connection is rejected up front") {
  auto& g = vp1802();
  auto s = workload_setup(g, PatternKind::NearestNeighbor, {PlacementKind::Local, 2, 0, 0},
                          ProtocolKind::Stream);
  s.table.routes.pop_back();
  CHECK_THROWS_AS(simulate(g, s.table, s.conns, s.sched, s.protocol, cal()), Error);
}
