#include <catch2/catch_amalgamated.hpp>

#include "benchnoc/refmodel.hpp"
#include "benchnoc/traffic.hpp"

using namespace benchnoc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Max-min certificate: no flow can grow without shrinking an equal-or-smaller
/// one, i.e. every unbounded flow sits on a saturated resource where it is
/// among the largest allocations.
bool is_maxmin(const DemandSet& ds, const std::vector<double>& capacity,
               const std::vector<double>& alloc) {
  std::vector<double> used(capacity.size(), 0.0);
  for (std::size_t i = 0; i < alloc.size(); ++i)
    for (auto r : ds.demands[i].resources) used[r] += alloc[i];
  for (std::size_t r = 0; r < capacity.size(); ++r)
    if (used[r] > capacity[r] + 1e-6) return false;

  for (std::size_t i = 0; i < alloc.size(); ++i) {
    if (alloc[i] + 1e-6 >= ds.demands[i].demand_gbps) continue;  // demand-bound
    bool certified = false;
    for (auto r : ds.demands[i].resources) {
      if (used[r] + 1e-6 < capacity[r]) continue;  // not saturated
      bool largest = true;
      for (std::size_t j = 0; j < alloc.size(); ++j) {
        if (j == i) continue;
        bool shares = false;
        for (auto rj : ds.demands[j].resources) shares = shares || rj == r;
        if (shares && alloc[j] > alloc[i] + 1e-6) largest = false;
      }
      if (largest) certified = true;
    }
    if (!certified) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("nearest neighbor gets the full port on an ideal crossbar") {
  std::vector<EndpointDemand> flows;
  for (std::uint32_t i = 0; i < 4; ++i) flows.push_back({i, i, kInf});
  auto alloc = ideal_crossbar(flows, 16.0);
  for (double a : alloc) CHECK_THAT(a, Catch::Matchers::WithinAbs(16.0, 1e-9));
}

TEST_CASE("hotspot phase splits one destination port") {
  // Hand water-filled: four sources share a single 16 GB/s sink port.
  std::vector<EndpointDemand> flows;
  for (std::uint32_t i = 0; i < 4; ++i) flows.push_back({i, 9, kInf});
  auto alloc = ideal_crossbar(flows, 16.0);
  for (double a : alloc) CHECK_THAT(a, Catch::Matchers::WithinAbs(4.0, 1e-9));
}

TEST_CASE("reverse is a bijection and never shares ports") {
  std::vector<EndpointDemand> flows;
  for (std::uint32_t i = 0; i < 4; ++i) flows.push_back({i, 3 - i, kInf});
  auto alloc = ideal_crossbar(flows, 16.0);
  for (double a : alloc) CHECK_THAT(a, Catch::Matchers::WithinAbs(16.0, 1e-9));
}

TEST_CASE("two saturating flows split a bottleneck") {
  std::vector<Path> routes(2);
  routes[0].links = {0};
  routes[1].links = {0};
  auto alloc = maxmin_flow(routes, {16.26}, {kInf, kInf});
  CHECK_THAT(alloc[0], Catch::Matchers::WithinAbs(8.13, 1e-9));
  CHECK_THAT(alloc[1], Catch::Matchers::WithinAbs(8.13, 1e-9));
}

TEST_CASE("bounded demand leaves the rest to the saturating flow") {
  std::vector<Path> routes(2);
  routes[0].links = {0};
  routes[1].links = {0};
  auto alloc = maxmin_flow(routes, {16.26}, {2.0, kInf});
  CHECK_THAT(alloc[0], Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK_THAT(alloc[1], Catch::Matchers::WithinAbs(14.26, 1e-9));
}

TEST_CASE("allocation is max-min on random small instances", "[property]") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n_links = 2 + rng.below(4);
    const std::size_t n_flows = 1 + rng.below(6);
    std::vector<double> capacity(n_links);
    for (auto& c : capacity) c = 1.0 + static_cast<double>(rng.below(32));
    DemandSet ds;
    std::vector<Path> routes(n_flows);
    std::vector<double> demands(n_flows, kInf);
    for (std::size_t f = 0; f < n_flows; ++f) {
      const std::size_t len = 1 + rng.below(n_links);
      for (std::size_t l = 0; l < len; ++l)
        routes[f].links.push_back(static_cast<LinkId>(rng.below(n_links)));
      std::sort(routes[f].links.begin(), routes[f].links.end());
      routes[f].links.erase(std::unique(routes[f].links.begin(), routes[f].links.end()),
                            routes[f].links.end());
      if (rng.below(3) == 0) demands[f] = 1.0 + static_cast<double>(rng.below(8));
      Demand d;
      d.resources.assign(routes[f].links.begin(), routes[f].links.end());
      d.demand_gbps = demands[f];
      ds.demands.push_back(d);
    }
    auto alloc = maxmin_flow(routes, capacity, demands);
    REQUIRE(is_maxmin(ds, capacity, alloc));
  }
}

TEST_CASE("link sums never exceed capacity on device routes") {
  auto g = build_device(DeviceSpec::vp1802());
  Workload w;
  w.pattern = PatternKind::Shift;
  w.placement = {PlacementKind::VNoC, 8, 0, 0};
  auto built = build_workload(w, g);
  std::vector<Path> routes;
  std::vector<double> demands;
  for (const auto& c : built.connections.connections) {
    routes.push_back(default_path(g, c.src_ref, c.dst_ref));
    demands.push_back(kInf);
  }
  auto alloc = maxmin_flow(g, routes, demands);
  std::vector<double> used(g.links().size(), 0.0);
  for (std::size_t i = 0; i < routes.size(); ++i)
    for (LinkId l : routes[i].links) used[l] += alloc[i];
  for (std::size_t l = 0; l < used.size(); ++l)
    CHECK(used[l] <= g.link(static_cast<LinkId>(l)).capacity_gbps + 1e-9);
}
