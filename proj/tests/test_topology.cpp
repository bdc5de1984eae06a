#include <catch2/catch_amalgamated.hpp>

#include "benchnoc/topology.hpp"

using namespace benchnoc;

namespace {

DeviceSpec minimal_spec() {
  DeviceSpec d;
  d.name = "minimal";
  d.slr_count = 1;
  d.vnoc_columns = 1;
  d.nmu_per_column_bottom_slr = 1;
  d.hnoc_rows = DeviceSpec::rows_one_per_slr(1);
  return d;
}

// Independent latency oracle: count links per kind, multiply by the table.
double latency_by_counting(const NocGraph& g, const Path& p) {
  double ns = 0;
  for (LinkKind k : kAllLinkKinds)
    ns += count_links(g, p, k) * g.spec().link_latency.get(k);
  return ns;
}

}  // namespace

TEST_CASE("endpoint totals match the shipped parts") {
  auto vp = build_device(DeviceSpec::vp1802());
  CHECK(vp.count_nodes(NodeKind::NMU) == 100);
  CHECK(vp.count_nodes(NodeKind::NSU) == 100);

  auto vh = build_device(DeviceSpec::vh1782());
  CHECK(vh.count_nodes(NodeKind::NMU) == 76);
  CHECK(vh.count_nodes(NodeKind::NSU) == 76);
}

TEST_CASE("minimal device has no die bridges") {
  auto g = build_device(minimal_spec());
  CHECK(g.count_nodes(NodeKind::NMU) == 1);
  CHECK(g.count_nodes(NodeKind::NSU) == 1);
  CHECK(g.count_nodes(NodeKind::NIDB) == 0);
}

TEST_CASE("raw channel capacity is flit width times clock") {
  DeviceSpec d = DeviceSpec::vp1802();
  CHECK_THAT(d.channel_capacity_gbps(), Catch::Matchers::WithinRel(17.28, 1e-12));
}

TEST_CASE("endpoint count formula matches enumeration", "[property]") {
  Rng rng(2026);
  for (int trial = 0; trial < 50; ++trial) {
    DeviceSpec d;
    d.slr_count = 1 + static_cast<int>(rng.below(4));
    d.vnoc_columns = 1 + static_cast<int>(rng.below(4));
    d.nmu_per_column_bottom_slr = 1 + static_cast<int>(rng.below(7));
    d.nmu_per_column_other_slr = 1 + static_cast<int>(rng.below(7));
    d.hnoc_rows = DeviceSpec::rows_one_per_slr(d.slr_count);
    auto g = build_device(d);
    CHECK(g.count_nodes(NodeKind::NMU) == static_cast<std::size_t>(d.total_endpoints()));
    CHECK(g.count_nodes(NodeKind::NSU) == static_cast<std::size_t>(d.total_endpoints()));
  }
}

TEST_CASE("spec validation names the offending field") {
  DeviceSpec d = DeviceSpec::vp1802();
  d.slr_count = 0;
  try {
    build_device(d);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    CHECK(e.field() == "slr_count");
  }

  DeviceSpec bad_lat = DeviceSpec::vp1802();
  bad_lat.link_latency.nidb_crossing = bad_lat.link_latency.vnoc_hop / 2;
  CHECK_THROWS_AS(build_device(bad_lat), Error);

  DeviceSpec no_mem_row = DeviceSpec::vp1802();
  no_mem_row.hnoc_rows[0].is_memory_row = false;
  CHECK_THROWS_AS(build_device(no_mem_row), Error);
}

TEST_CASE("every channel is an opposed unidirectional pair") {
  auto g = build_device(DeviceSpec::vp1802());
  for (LinkId l = 0; l < g.links().size(); ++l) {
    const Link& lk = g.link(l);
    const Link& rev = g.link(lk.reverse);
    CHECK(rev.src == lk.dst);
    CHECK(rev.dst == lk.src);
    CHECK(rev.reverse == l);
  }
}

TEST_CASE("graph construction is deterministic") {
  auto a = build_device(DeviceSpec::vp1802());
  auto b = build_device(DeviceSpec::vp1802());
  REQUIRE(a.nodes().size() == b.nodes().size());
  REQUIRE(a.links().size() == b.links().size());
  for (std::size_t i = 0; i < a.links().size(); ++i) {
    CHECK(a.link(static_cast<LinkId>(i)).src == b.link(static_cast<LinkId>(i)).src);
    CHECK(a.link(static_cast<LinkId>(i)).dst == b.link(static_cast<LinkId>(i)).dst);
    CHECK(a.link(static_cast<LinkId>(i)).kind == b.link(static_cast<LinkId>(i)).kind);
  }
}

TEST_CASE("rows carry NCRBs except the memory row") {
  auto g = build_device(DeviceSpec::vp1802());
  const int cols = g.spec().vnoc_columns;
  std::vector<int> ncrb_per_row(4, 0);
  for (const auto& n : g.nodes())
    if (n.kind == NodeKind::NCRB) ++ncrb_per_row[static_cast<std::size_t>(n.slr)];
  CHECK(ncrb_per_row[0] == 0);  // memory row
  for (int s = 1; s < 4; ++s) CHECK(ncrb_per_row[static_cast<std::size_t>(s)] == cols - 1);
}

TEST_CASE("default path: local pair has no crossings") {
  auto g = build_device(DeviceSpec::vp1802());
  Path p = default_path(g, {0, 0, 0, Role::Source}, {0, 0, 1, Role::Sink});
  CHECK(slr_crossings(g, p) == 0);
  CHECK(ncrb_crossings(g, p) == 0);
}

TEST_CASE("default path: full vertical traverse crosses three bridges") {
  auto g = build_device(DeviceSpec::vp1802());
  Path p = default_path(g, {0, 0, 0, Role::Source}, {0, 3, 5, Role::Sink});
  CHECK(slr_crossings(g, p) == 3);
}

TEST_CASE("default path: memory row avoids NCRBs") {
  auto g = build_device(DeviceSpec::vp1802());
  Path p = default_path(g, {0, 0, 0, Role::Source}, {3, 0, 0, Role::Sink}, RowChoice::MemoryRow);
  CHECK(ncrb_crossings(g, p) == 0);
  // The bottom SLR's own row is the memory row, so nearest-row matches.
  Path q = default_path(g, {0, 0, 0, Role::Source}, {3, 0, 0, Role::Sink}, RowChoice::NearestRow);
  CHECK(ncrb_crossings(g, q) == 0);
}

TEST_CASE("default path: top-SLR horizontal route passes NCRBs") {
  auto g = build_device(DeviceSpec::vp1802());
  Path p = default_path(g, {0, 3, 5, Role::Source}, {3, 3, 5, Role::Sink}, RowChoice::NearestRow);
  CHECK(ncrb_crossings(g, p) == 3);
  CHECK(slr_crossings(g, p) == 0);
}

TEST_CASE("die-bridge count equals SLR distance", "[property]") {
  auto g = build_device(DeviceSpec::vp1802());
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    NodeRef src{static_cast<int>(rng.below(4)), static_cast<int>(rng.below(4)), 0, Role::Source};
    NodeRef dst{static_cast<int>(rng.below(4)), static_cast<int>(rng.below(4)), 0, Role::Sink};
    src.index = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.spec().endpoints_in_slr(src.slr))));
    dst.index = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.spec().endpoints_in_slr(dst.slr))));
    for (RowChoice rc : {RowChoice::NearestRow, RowChoice::MemoryRow}) {
      Path p = default_path(g, src, dst, rc);
      const int expect =
          (src.column == dst.column)
              ? std::abs(src.slr - dst.slr)
              : std::abs(src.slr - dst.slr) + (rc == RowChoice::MemoryRow && std::min(src.slr, dst.slr) != 0
                                                   ? 2 * std::min(src.slr, dst.slr)
                                                   : 0);
      CHECK(slr_crossings(g, p) == expect);
    }
  }
}

TEST_CASE("path latency is additive and matches the counting oracle") {
  auto g = build_device(DeviceSpec::vp1802());
  Path p1 = default_path(g, {0, 0, 0, Role::Source}, {2, 1, 3, Role::Sink});
  Path p2 = default_path(g, {1, 2, 0, Role::Source}, {3, 3, 5, Role::Sink});
  CHECK_THAT(path_latency(g, p1), Catch::Matchers::WithinRel(latency_by_counting(g, p1), 1e-12));
  CHECK_THAT(path_latency(g, p2), Catch::Matchers::WithinRel(latency_by_counting(g, p2), 1e-12));

  Path joined;
  joined.links = p1.links;
  joined.links.insert(joined.links.end(), p2.links.begin(), p2.links.end());
  CHECK_THAT(path_latency(g, joined),
             Catch::Matchers::WithinRel(path_latency(g, p1) + path_latency(g, p2), 1e-12));
}

TEST_CASE("corner-to-corner dwarfs a same-row horizontal path") {
  auto g = build_device(DeviceSpec::vp1802());
  Path diag = default_path(g, {0, 0, 0, Role::Source}, {3, 3, 5, Role::Sink});
  Path flat = default_path(g, {0, 0, 0, Role::Source}, {3, 0, 0, Role::Sink});
  CHECK(path_latency(g, diag) > 2.0 * path_latency(g, flat));
}

TEST_CASE("empty vertical span resolves to endpoint taps only") {
  auto g = build_device(DeviceSpec::vp1802());
  Path p = default_path(g, {1, 2, 4, Role::Source}, {1, 2, 4, Role::Sink});
  // Co-located pair: NMU -> tap -> NSU.
  CHECK(p.links.size() == 2);
  CHECK_THAT(path_latency(g, p),
             Catch::Matchers::WithinRel(2 * g.spec().link_latency.local, 1e-12));
}

TEST_CASE("node references validate their bounds") {
  auto g = build_device(DeviceSpec::vp1802());
  CHECK_THROWS_AS(g.endpoint({0, 1, 6, Role::Source}), Error);  // non-bottom SLR holds 6
  CHECK_NOTHROW(g.endpoint({0, 0, 6, Role::Source}));
  CHECK_THROWS_AS(g.endpoint({4, 0, 0, Role::Sink}), Error);
}
