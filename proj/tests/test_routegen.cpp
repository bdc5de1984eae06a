#include <catch2/catch_amalgamated.hpp>

#include "benchnoc/routegen.hpp"

using namespace benchnoc;

namespace {

Connection make_conn(const NocGraph& g, NodeRef src, NodeRef dst, double qos) {
  Connection c;
  c.src_ref = src;
  c.dst_ref = dst;
  c.src = g.endpoint(src);
  c.dst = g.endpoint(dst);
  c.qos_gbps = qos;
  return c;
}

/// Single-column device where every trunk is one raw channel wide; the only
/// way between endpoint groups is one shared 17.28 GB/s chain.
DeviceSpec narrow_device() {
  DeviceSpec d;
  d.name = "narrow";
  d.slr_count = 2;
  d.vnoc_columns = 1;
  d.nmu_per_column_bottom_slr = 4;
  d.nmu_per_column_other_slr = 4;
  d.hnoc_rows = DeviceSpec::rows_one_per_slr(2);
  d.link_capacity = DeviceSpec::default_capacity();
  d.link_capacity.vnoc_hop = 17.28;
  d.link_capacity.nidb_crossing = 17.28;
  d.link_capacity.hnoc_hop = 17.28;
  d.link_capacity.ncrb_crossing = 17.28;
  return d;
}

RouteRequest random_request(const NocGraph& g, Rng& rng, int max_conns = 8) {
  const DeviceSpec& d = g.spec();
  RouteRequest req;
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_conns)));
  // Cluster endpoints into few columns and crank QoS so instances straddle
  // the feasibility boundary.
  const double qos_menu[] = {0.005, 4.0, 6.0, 8.0, 12.0, 16.0};
  const std::uint64_t max_col = std::min<std::uint64_t>(2, static_cast<std::uint64_t>(d.vnoc_columns));
  for (int i = 0; i < n; ++i) {
    NodeRef src{static_cast<int>(rng.below(max_col)), static_cast<int>(rng.below(static_cast<std::uint64_t>(d.slr_count))), 0,
                Role::Source};
    NodeRef dst{static_cast<int>(rng.below(max_col)), static_cast<int>(rng.below(static_cast<std::uint64_t>(d.slr_count))), 0,
                Role::Sink};
    src.index = static_cast<int>(rng.below(3));
    dst.index = static_cast<int>(rng.below(3));
    req.connections.connections.push_back(
        make_conn(g, src, dst, qos_menu[rng.below(6)]));
  }
  req.seed = rng.next();
  return req;
}

}  // namespace

TEST_CASE("single adjacent connection routes without backtracking") {
  auto g = build_device(DeviceSpec::vp1802());
  RouteRequest req;
  req.connections.connections.push_back(
      make_conn(g, {0, 0, 0, Role::Source}, {0, 0, 1, Role::Sink}, 0.005));
  auto res = compile(req, g);
  REQUIRE(res.status == CompileStatus::Feasible);
  CHECK(res.backtracks == 0);
  CHECK(validate(*res.table, g, req).ok());
}

TEST_CASE("three 16 GB/s demands through one channel are infeasible with a witness") {
  auto g = build_device(narrow_device());
  RouteRequest req;
  for (int i = 1; i <= 3; ++i)
    req.connections.connections.push_back(
        make_conn(g, {0, 0, i, Role::Source}, {0, 0, 0, Role::Sink}, 16.0));
  auto res = compile(req, g);
  REQUIRE(res.status == CompileStatus::Infeasible);
  REQUIRE(res.witness_link.has_value());
  // The witness is the ejection channel into the shared sink.
  const Link& lk = g.link(*res.witness_link);
  const NodeId nsu = g.endpoint({0, 0, 0, Role::Sink});
  CHECK((lk.dst == nsu || lk.src == nsu));

  CHECK_FALSE(oracle_feasibility(req, g));
}

TEST_CASE("spread placement at the routability floor compiles and validates") {
  auto g = build_device(DeviceSpec::vp1802());
  auto [src, dst] = place_nodes({PlacementKind::Spread, 8}, g);
  RouteRequest req;
  for (std::size_t i = 0; i < src.size(); ++i)
    req.connections.connections.push_back(make_conn(g, src[i], dst[(i + 3) % 8], 0.005));
  auto res = compile(req, g);
  REQUIRE(res.status == CompileStatus::Feasible);
  CHECK(res.solve_time_s >= 0.0);
  CHECK(validate(*res.table, g, req).ok());
  CHECK(oracle_feasibility(req, g));
}

TEST_CASE("validator flags a capacity overflow exactly once") {
  auto g = build_device(narrow_device());
  RouteRequest req;
  // Sources on both sides of the sink share only its ejection channel.
  for (int i : {0, 2})
    req.connections.connections.push_back(
        make_conn(g, {0, 0, i, Role::Source}, {0, 0, 1, Role::Sink}, 16.0));
  RouteTable table;
  for (const auto& c : req.connections.connections)
    table.routes.push_back(default_path(g, c.src_ref, c.dst_ref));
  auto rep = validate(table, g, req);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].find("link") != std::string::npos);
  CHECK(rep.violations[0].find("exceeds capacity") != std::string::npos);
}

TEST_CASE("validator rejects a route with a cycle") {
  auto g = build_device(DeviceSpec::vp1802());
  RouteRequest req;
  req.connections.connections.push_back(
      make_conn(g, {0, 0, 0, Role::Source}, {0, 0, 2, Role::Sink}, 0.005));
  Path p = default_path(g, {0, 0, 0, Role::Source}, {0, 0, 2, Role::Sink});
  // Inject a there-and-back detour before the final hop.
  Path cyclic;
  cyclic.links = {p.links[0], p.links[1], g.link(p.links[1]).reverse, p.links[1], p.links[2]};
  RouteTable table;
  table.routes.push_back(cyclic);
  auto rep = validate(table, g, req);
  bool found = false;
  for (const auto& v : rep.violations) found = found || v.find("non-simple path") != std::string::npos;
  CHECK(found);
}

TEST_CASE("empty connection set is trivially feasible") {
  auto g = build_device(DeviceSpec::vp1802());
  RouteRequest req;
  CHECK(oracle_feasibility(req, g));
  auto res = compile(req, g);
  CHECK(res.status == CompileStatus::Feasible);
}

TEST_CASE("oracle enforces its enumeration bound") {
  auto g = build_device(DeviceSpec::vp1802());
  RouteRequest req;
  for (int i = 0; i < 9; ++i)
    req.connections.connections.push_back(
        make_conn(g, {0, 0, 0, Role::Source}, {1, 0, 0, Role::Sink}, 0.005));
  CHECK_THROWS_AS(oracle_feasibility(req, g), Error);
}

TEST_CASE("compile agrees with the oracle on random small instances", "[property]") {
  auto g = build_device(narrow_device());
  auto vp = build_device(DeviceSpec::vp1802());
  Rng rng(1234);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const NocGraph& dev = (trial % 2 == 0) ? g : vp;
    RouteRequest req = random_request(dev, rng);
    const bool truth = oracle_feasibility(req, dev);
    auto res = compile(req, dev);
    REQUIRE(res.status != CompileStatus::Timeout);
    CHECK((res.status == CompileStatus::Feasible) == truth);
    if (truth) {
      ++feasible;
      CHECK(validate(*res.table, dev, req).ok());
    } else {
      ++infeasible;
    }
  }
  // The generator must exercise both verdicts for this check to mean much.
  CHECK(feasible > 10);
  CHECK(infeasible > 10);
}

TEST_CASE("identical request and seed give identical tables") {
  auto g = build_device(DeviceSpec::vp1802());
  auto [src, dst] = place_nodes({PlacementKind::Spread, 8}, g);
  RouteRequest req;
  for (std::size_t i = 0; i < src.size(); ++i)
    req.connections.connections.push_back(make_conn(g, src[i], dst[7 - i], 0.005));
  req.seed = 99;
  auto a = compile(req, g);
  auto b = compile(req, g);
  REQUIRE(a.status == CompileStatus::Feasible);
  REQUIRE(b.status == CompileStatus::Feasible);
  for (std::size_t i = 0; i < a.table->routes.size(); ++i)
    CHECK(a.table->routes[i].links == b.table->routes[i].links);
}

TEST_CASE("lowering demands never breaks feasibility", "[property]") {
  auto g = build_device(narrow_device());
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    RouteRequest req = random_request(g, rng, 6);
    auto res = compile(req, g);
    if (res.status != CompileStatus::Feasible) continue;
    RouteRequest lowered = req;
    for (auto& c : lowered.connections.connections) c.qos_gbps *= 0.5;
    auto res2 = compile(lowered, g);
    CHECK(res2.status == CompileStatus::Feasible);
  }
}

TEST_CASE("candidate universe stays within the documented bound") {
  auto g = build_device(DeviceSpec::vp1802());
  Connection c = make_conn(g, {0, 0, 0, Role::Source}, {3, 3, 5, Role::Sink}, 0.005);
  auto cands = candidate_paths(g, c);
  CHECK(cands.size() >= 2);
  CHECK(cands.size() <= 6);
  for (std::size_t i = 1; i < cands.size(); ++i)
    CHECK(cands[i - 1].links.size() <= cands[i].links.size());
}
