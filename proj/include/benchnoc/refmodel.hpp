#pragma once

#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

#include "benchnoc/core.hpp"
#include "benchnoc/topology.hpp"

namespace benchnoc {

/// A flow competing for bandwidth: a set of resource ids (links or ports)
/// plus an upper demand bound (infinity for saturating sources).
struct Demand {
  std::vector<std::uint32_t> resources;
  double demand_gbps = std::numeric_limits<double>::infinity();
};

struct DemandSet {
  std::vector<Demand> demands;
};

/// Progressive water-filling with bounded demands: all unfrozen flows grow at
/// the same rate; the tightest link (or the smallest remaining demand)
/// freezes each round. Yields the unique max-min fair allocation.
inline std::vector<double> waterfill(const DemandSet& ds, const std::vector<double>& capacity) {
  const std::size_t n = ds.demands.size();
  std::vector<double> alloc(n, 0.0);
  std::vector<bool> frozen(n, false);
  std::vector<double> used(capacity.size(), 0.0);
  std::vector<int> active_on(capacity.size(), 0);

  for (std::size_t i = 0; i < n; ++i) {
    if (ds.demands[i].demand_gbps <= 0) {
      frozen[i] = true;
      continue;
    }
    for (auto r : ds.demands[i].resources) ++active_on[r];
  }

  constexpr double kEps = 1e-9;
  std::size_t remaining = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!frozen[i]) ++remaining;

  while (remaining > 0) {
    double step = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < capacity.size(); ++r)
      if (active_on[r] > 0)
        step = std::min(step, (capacity[r] - used[r]) / active_on[r]);
    for (std::size_t i = 0; i < n; ++i)
      if (!frozen[i]) step = std::min(step, ds.demands[i].demand_gbps - alloc[i]);
    step = std::max(step, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
      if (frozen[i]) continue;
      alloc[i] += step;
      for (auto r : ds.demands[i].resources) used[r] += step;
    }

    // Freeze flows that hit their demand or sit on a saturated link.
    std::vector<std::size_t> newly;
    for (std::size_t i = 0; i < n; ++i) {
      if (frozen[i]) continue;
      bool stop = alloc[i] + kEps >= ds.demands[i].demand_gbps;
      for (auto r : ds.demands[i].resources)
        stop = stop || used[r] + kEps * std::max(1.0, capacity[r]) >= capacity[r];
      if (stop) newly.push_back(i);
    }
    if (newly.empty()) break;  // no binding constraint left (all demands infinite?)
    for (auto i : newly) {
      frozen[i] = true;
      --remaining;
      for (auto r : ds.demands[i].resources) --active_on[r];
    }
  }
  return alloc;
}

/// Ideal crossbar baseline: max-min fair allocation subject only to
/// per-source and per-destination port rates.
struct EndpointDemand {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  double demand_gbps = std::numeric_limits<double>::infinity();
};

inline std::vector<double> ideal_crossbar(const std::vector<EndpointDemand>& flows,
                                          double port_rate_gbps = 16.0) {
  std::unordered_map<std::uint64_t, std::uint32_t> port_index;
  auto port = [&](std::uint64_t key) {
    auto [it, fresh] = port_index.try_emplace(key, static_cast<std::uint32_t>(port_index.size()));
    return it->second;
  };
  DemandSet ds;
  for (const auto& f : flows) {
    Demand d;
    d.resources = {port((std::uint64_t{0} << 32) | f.src), port((std::uint64_t{1} << 32) | f.dst)};
    d.demand_gbps = f.demand_gbps;
    ds.demands.push_back(std::move(d));
  }
  std::vector<double> capacity(port_index.size(), port_rate_gbps);
  return waterfill(ds, capacity);
}

/// Max-min fair steady-state throughput over fixed routes. `capacity` is the
/// effective per-link rate in the same units as the demands (callers pass
/// payload-effective capacities when comparing against measured payload
/// throughput).
inline std::vector<double> maxmin_flow(const std::vector<Path>& routes,
                                       const std::vector<double>& capacity,
                                       const std::vector<double>& demands) {
  DemandSet ds;
  for (std::size_t i = 0; i < routes.size(); ++i) {
    Demand d;
    d.resources.assign(routes[i].links.begin(), routes[i].links.end());
    d.demand_gbps = i < demands.size() ? demands[i] : std::numeric_limits<double>::infinity();
    ds.demands.push_back(std::move(d));
  }
  return waterfill(ds, capacity);
}

/// Raw-capacity convenience overload over the device graph.
inline std::vector<double> maxmin_flow(const NocGraph& g, const std::vector<Path>& routes,
                                       const std::vector<double>& demands) {
  std::vector<double> capacity(g.links().size());
  for (std::size_t l = 0; l < capacity.size(); ++l)
    capacity[l] = g.link(static_cast<LinkId>(l)).capacity_gbps;
  return maxmin_flow(routes, capacity, demands);
}

}  // namespace benchnoc
