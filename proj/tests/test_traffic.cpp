#include <catch2/catch_amalgamated.hpp>
#include <set>

#include "benchnoc/traffic.hpp"

using namespace benchnoc;

TEST_CASE("shift sends to the next indexed destination") {
  auto ps = gen_pattern(PatternKind::Shift, 4);
  REQUIRE(ps.phases.size() == 1);
  CHECK(ps.phases[0] == std::vector<int>{1, 2, 3, 0});
}

TEST_CASE("reverse mirrors across the network center") {
  auto ps = gen_pattern(PatternKind::Reverse, 4);
  CHECK(ps.phases[0] == std::vector<int>{3, 2, 1, 0});
}

TEST_CASE("tornado with two nodes degenerates to reverse") {
  auto ps = gen_pattern(PatternKind::Tornado, 2);
  CHECK(ps.phases[0] == std::vector<int>{1, 0});
}

TEST_CASE("patterns reject tiny networks") {
  CHECK_THROWS_AS(gen_pattern(PatternKind::Shift, 1), Error);
}

TEST_CASE("every non-hotspot, non-random phase is a bijection", "[property]") {
  for (PatternKind k : {PatternKind::NearestNeighbor, PatternKind::Shift, PatternKind::Tornado,
                        PatternKind::Reverse, PatternKind::Uniform}) {
    for (int n = 2; n <= 64; ++n) {
      auto ps = gen_pattern(k, n);
      for (const auto& phase : ps.phases) {
        std::set<int> seen(phase.begin(), phase.end());
        REQUIRE(seen.size() == static_cast<std::size_t>(n));
        REQUIRE(*seen.begin() == 0);
        REQUIRE(*seen.rbegin() == n - 1);
      }
    }
  }
}

TEST_CASE("local placement fills one VNoC group") {
  auto g = build_device(DeviceSpec::vp1802());
  auto [src, dst] = place_nodes({PlacementKind::Local, 7, 0, 0}, g);
  REQUIRE(src.size() == 7);
  for (const auto& r : src) {
    CHECK(r.column == 0);
    CHECK(r.slr == 0);
    CHECK(r.role == Role::Source);
  }
  for (const auto& r : dst) CHECK(r.role == Role::Sink);

  CHECK_THROWS_AS(place_nodes({PlacementKind::Local, 8, 0, 0}, g), Error);
}

TEST_CASE("spread of four pairs lands on four distinct corners") {
  auto g = build_device(DeviceSpec::vp1802());
  auto [src, dst] = place_nodes({PlacementKind::Spread, 4}, g);
  std::set<std::pair<int, int>> corners;
  for (const auto& r : src) corners.insert({r.column, r.slr});
  CHECK(corners.size() == 4);
  CHECK(corners.count({0, 0}) == 1);
  CHECK(corners.count({3, 0}) == 1);
  CHECK(corners.count({0, 3}) == 1);
  CHECK(corners.count({3, 3}) == 1);
}

TEST_CASE("sixteen-pair HNoC uses four endpoints per column") {
  auto g = build_device(DeviceSpec::vp1802());
  auto [src, dst] = place_nodes({PlacementKind::HNoC, 16, 0, 0}, g);
  std::array<int, 4> per_col{};
  for (const auto& r : src) ++per_col[static_cast<std::size_t>(r.column)];
  for (int c : per_col) CHECK(c == 4);
}

TEST_CASE("placements stay within device bounds for shipped defaults", "[property]") {
  for (const DeviceSpec& spec : {DeviceSpec::vp1802(), DeviceSpec::vh1782()}) {
    auto g = build_device(spec);
    for (PlacementKind k :
         {PlacementKind::Local, PlacementKind::HNoC, PlacementKind::VNoC, PlacementKind::Spread}) {
      for (int n : {2, 4, 7, 8, 16}) {
        Placement pl{k, n};
        if (k == PlacementKind::Local && n > spec.endpoints_in_slr(0)) {
          CHECK_THROWS_AS(place_nodes(pl, g), Error);
          continue;
        }
        auto [src, dst] = place_nodes(pl, g);
        REQUIRE(src.size() == static_cast<std::size_t>(n));
        std::set<std::tuple<int, int, int>> distinct;
        for (std::size_t i = 0; i < src.size(); ++i) {
          CHECK_NOTHROW(g.endpoint(src[i]));
          CHECK_NOTHROW(g.endpoint(dst[i]));
          distinct.insert({src[i].column, src[i].slr, src[i].index});
        }
        CHECK(distinct.size() == static_cast<std::size_t>(n));
      }
    }
  }
}

TEST_CASE("workload schedule carries sixteen transactions per connection") {
  auto g = build_device(DeviceSpec::vp1802());
  Workload w;
  w.pattern = PatternKind::NearestNeighbor;
  w.placement = {PlacementKind::Local, 4, 0, 0};
  auto built = build_workload(w, g);
  REQUIRE(built.connections.size() == 4);
  for (const auto& seq : built.schedule.phases[0].per_source) {
    REQUIRE(seq.size() == 1);
    CHECK(seq[0].second == 16);
  }
}

TEST_CASE("qos follows the size rule") {
  auto g = build_device(DeviceSpec::vp1802());
  Workload w;
  w.pattern = PatternKind::NearestNeighbor;
  w.protocol.kind = ProtocolKind::ReadOnly;
  w.placement = {PlacementKind::Local, 2, 0, 0};
  auto small = build_workload(w, g);
  CHECK_THAT(small.connections[0].qos_gbps, Catch::Matchers::WithinRel(8.0, 1e-12));

  w.placement = {PlacementKind::HNoC, 16, 0, 0};
  auto large = build_workload(w, g);
  CHECK_THAT(large.connections[0].qos_gbps, Catch::Matchers::WithinRel(0.005, 1e-12));
}

TEST_CASE("random traffic is deterministic per seed and rejects streams") {
  auto g = build_device(DeviceSpec::vp1802());
  Workload w;
  w.pattern = PatternKind::Random;
  w.protocol.kind = ProtocolKind::WriteOnly;
  w.placement = {PlacementKind::HNoC, 8, 0, 0};
  w.rng_seed = 42;
  auto a = build_workload(w, g);
  auto b = build_workload(w, g);
  REQUIRE(a.schedule.phases.size() == 1);
  CHECK(a.schedule.phases[0].per_source == b.schedule.phases[0].per_source);

  w.rng_seed = 43;
  auto c = build_workload(w, g);
  CHECK(a.schedule.phases[0].per_source != c.schedule.phases[0].per_source);

  w.protocol.kind = ProtocolKind::Stream;
  CHECK_THROWS_AS(build_workload(w, g), Error);
}

TEST_CASE("hotspot phases are barriered, uniform phases are not") {
  auto g = build_device(DeviceSpec::vp1802());
  Workload w;
  w.placement = {PlacementKind::Local, 4, 0, 0};
  w.pattern = PatternKind::Hotspot;
  auto hot = build_workload(w, g);
  REQUIRE(hot.schedule.phases.size() == 4);
  for (const auto& ph : hot.schedule.phases) CHECK(ph.barrier);

  w.pattern = PatternKind::Uniform;
  auto uni = build_workload(w, g);
  REQUIRE(uni.schedule.phases.size() == 4);
  for (const auto& ph : uni.schedule.phases) CHECK(!ph.barrier);
}

TEST_CASE("transaction size must divide the per-pair total") {
  auto g = build_device(DeviceSpec::vp1802());
  Workload w;
  w.txn_size = 5000;
  CHECK_THROWS_AS(build_workload(w, g), Error);
}
