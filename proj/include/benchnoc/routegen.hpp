#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "benchnoc/core.hpp"
#include "benchnoc/topology.hpp"
#include "benchnoc/traffic.hpp"

namespace benchnoc {

// ---------------------------------------------------------------------------
// Requests and results
// ---------------------------------------------------------------------------

struct RouteRequest {
  ConnectionSet connections;
  double time_budget_s = 60.0;
  std::uint64_t seed = 1;
  /// Derates die-bridge capacity during reservation, emulating tighter
  /// microarchitecture constraints than raw bandwidth suggests.
  double nidb_capacity_multiplier = 1.0;

  void validate() const {
    if (time_budget_s <= 0) throw Error(ErrorKind::Validation, "time_budget", "must be > 0");
    for (const auto& c : connections.connections)
      if (c.qos_gbps <= 0) throw Error(ErrorKind::Validation, "qos", "QoS values must be > 0");
  }
};

/// Reserved bandwidth never drops below one flit stream; avoids
/// zero-reservation degeneracy at the 5 MB/s floor.
inline double reserved_gbps(const Connection& c) { return std::max(c.qos_gbps, 0.001); }

struct RouteTable {
  std::vector<Path> routes;              // forward (request-direction) path per connection
  std::vector<double> reserved_per_link; // GB/s ledger, both directions of each route

  Path response_path(const NocGraph& g, ConnId c) const { return reverse_path(g, routes[c]); }
};

enum class CompileStatus : std::uint8_t { Feasible, Infeasible, Timeout };

inline std::string_view to_string(CompileStatus s) {
  switch (s) {
    case CompileStatus::Feasible: return "feasible";
    case CompileStatus::Infeasible: return "infeasible";
    case CompileStatus::Timeout: return "timeout";
  }
  return "?";
}

struct CompileResult {
  CompileStatus status = CompileStatus::Infeasible;
  std::optional<RouteTable> table;
  std::optional<LinkId> witness_link;  // saturated cut for small infeasible instances
  std::string witness;
  double solve_time_s = 0;
  std::uint64_t decisions = 0;
  std::uint64_t backtracks = 0;
};

// ---------------------------------------------------------------------------
// Candidate universe: dimension-order routes plus memory-row detours
// ---------------------------------------------------------------------------

namespace detail {

inline Path dimension_order_path(const NocGraph& g, const NodeRef& src, const NodeRef& dst,
                                 int row_ordinal) {
  Path p;
  p.links.push_back(g.find_link(g.endpoint(src), g.tap(src.column, src.slr, src.index)));
  int row_slr = -1;
  for (int s = 0; s < g.spec().slr_count; ++s)
    if (g.row_for_slr(s) == row_ordinal) row_slr = s;
  if (row_slr < 0) throw Error(ErrorKind::Routing, "row", "row ordinal not declared");
  vertical_walk(g, src.column, src.slr, src.index, row_slr, 0, p.links);
  p.links.push_back(g.find_link(g.tap(src.column, row_slr, 0), g.row_switch(row_ordinal, src.column)));
  row_walk(g, row_ordinal, src.column, dst.column, p.links);
  p.links.push_back(g.find_link(g.row_switch(row_ordinal, dst.column), g.tap(dst.column, row_slr, 0)));
  vertical_walk(g, dst.column, row_slr, 0, dst.slr, dst.index, p.links);
  p.links.push_back(g.find_link(g.tap(dst.column, dst.slr, dst.index), g.endpoint(dst)));
  return p;
}

}  // namespace detail

/// Candidate routes for one connection, ordered by (hop count, link id
/// sequence). At most `max_candidates` survive.
inline std::vector<Path> candidate_paths(const NocGraph& g, const Connection& c,
                                         int max_candidates = 6) {
  if (!c.has_refs)
    throw Error(ErrorKind::Routing, "connection", "compiler requires endpoint handles");
  std::vector<Path> cands;
  if (c.src_ref.column == c.dst_ref.column) {
    cands.push_back(default_path(g, c.src_ref, c.dst_ref));
  } else {
    std::set<std::vector<LinkId>> seen;
    for (int s = 0; s < g.spec().slr_count; ++s) {
      const int row = g.row_for_slr(s);
      if (row < 0) continue;
      Path p = detail::dimension_order_path(g, c.src_ref, c.dst_ref, row);
      if (seen.insert(p.links).second) cands.push_back(std::move(p));
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Path& a, const Path& b) {
    if (a.links.size() != b.links.size()) return a.links.size() < b.links.size();
    return a.links < b.links;
  });
  if (static_cast<int>(cands.size()) > max_candidates)
    cands.resize(static_cast<std::size_t>(max_candidates));
  return cands;
}

// ---------------------------------------------------------------------------
// Compiler
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> link_budget(const NocGraph& g, double nidb_multiplier) {
  std::vector<double> cap(g.links().size());
  for (std::size_t l = 0; l < cap.size(); ++l) {
    const Link& lk = g.link(static_cast<LinkId>(l));
    cap[l] = lk.capacity_gbps * (lk.kind == LinkKind::NidbCrossing ? nidb_multiplier : 1.0);
  }
  return cap;
}

/// QoS is honored on every link of the forward route; the response channel
/// rides the opposed links and carries minimal traffic.
inline void apply_reservation(const NocGraph&, const Path& p, double gbps,
                              std::vector<double>& ledger) {
  for (LinkId l : p.links) ledger[l] += gbps;
}

}  // namespace detail

/// Systematic search over per-connection candidate routes with residual
/// capacity propagation and conflict-directed backjumping. Deterministic for
/// a fixed (request, seed); honors the time budget.
inline CompileResult compile(const RouteRequest& req, const NocGraph& g) {
  req.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  CompileResult res;
  const std::size_t n = req.connections.size();
  std::vector<std::vector<Path>> cands(n);
  Rng rng(req.seed);
  for (std::size_t i = 0; i < n; ++i) {
    cands[i] = candidate_paths(g, req.connections[static_cast<ConnId>(i)]);
    if (cands[i].empty()) {
      res.status = CompileStatus::Infeasible;
      res.witness = "no candidate route for connection " + std::to_string(i);
      res.solve_time_s = elapsed();
      return res;
    }
    // Value order is (hop count, lexicographic); the seed only rotates
    // within groups of equal hop count.
    std::size_t lo = 0;
    while (lo < cands[i].size()) {
      std::size_t hi = lo + 1;
      while (hi < cands[i].size() && cands[i][hi].links.size() == cands[i][lo].links.size()) ++hi;
      if (hi - lo > 1) {
        const std::size_t rot = rng.below(hi - lo);
        std::rotate(cands[i].begin() + static_cast<std::ptrdiff_t>(lo),
                    cands[i].begin() + static_cast<std::ptrdiff_t>(lo + rot),
                    cands[i].begin() + static_cast<std::ptrdiff_t>(hi));
      }
      lo = hi;
    }
  }

  std::vector<double> budget = detail::link_budget(g, req.nidb_capacity_multiplier);

  // Quick saturated-cut witness: demand that must cross a link no matter
  // which candidates are chosen.
  {
    std::vector<double> forced(budget.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = reserved_gbps(req.connections[static_cast<ConnId>(i)]);
      std::vector<std::uint32_t> counts;  // link -> candidates of i using it
      std::vector<LinkId> touched;
      counts.assign(budget.size(), 0);
      for (const Path& p : cands[i])
        for (LinkId l : p.links)
          if (counts[l]++ == 0) touched.push_back(l);
      for (LinkId l : touched)
        if (counts[l] == cands[i].size()) forced[l] += r;
    }
    for (std::size_t l = 0; l < forced.size(); ++l) {
      if (forced[l] > budget[l] + 1e-9) {
        res.status = CompileStatus::Infeasible;
        res.witness_link = static_cast<LinkId>(l);
        res.witness = "saturated link " + std::to_string(l);
        res.solve_time_s = elapsed();
        return res;
      }
    }
  }

  std::vector<double> used(budget.size(), 0.0);
  std::vector<int> choice(n, -1);
  std::vector<std::set<int>> conf(n);            // conflict sets per level
  std::vector<std::vector<int>> owners(budget.size());  // levels reserving each link

  // A candidate fails on its first over-subscribed link; every level holding
  // capacity there joins the conflict set (any of them could free it).
  auto fits = [&](const Path& p, double r, std::set<int>* blame) {
    for (LinkId l : p.links) {
      if (used[l] + r > budget[l] + 1e-9) {
        if (blame) blame->insert(owners[l].begin(), owners[l].end());
        return false;
      }
    }
    return true;
  };
  int level = 0;
  std::uint64_t steps = 0;
  while (true) {
    if (level == static_cast<int>(n)) {
      RouteTable table;
      table.routes.reserve(n);
      table.reserved_per_link.assign(budget.size(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        table.routes.push_back(cands[i][static_cast<std::size_t>(choice[i])]);
        detail::apply_reservation(g, table.routes.back(),
                                  reserved_gbps(req.connections[static_cast<ConnId>(i)]),
                                  table.reserved_per_link);
      }
      res.status = CompileStatus::Feasible;
      res.table = std::move(table);
      res.solve_time_s = elapsed();
      return res;
    }
    if ((++steps & 0x3ff) == 0 && elapsed() > req.time_budget_s) {
      res.status = CompileStatus::Timeout;
      res.solve_time_s = elapsed();
      return res;
    }

    const double r = reserved_gbps(req.connections[static_cast<ConnId>(level)]);
    bool placed = false;
    for (int k = choice[static_cast<std::size_t>(level)] + 1;
         k < static_cast<int>(cands[static_cast<std::size_t>(level)].size()); ++k) {
      const Path& p = cands[static_cast<std::size_t>(level)][static_cast<std::size_t>(k)];
      ++res.decisions;
      if (fits(p, r, &conf[static_cast<std::size_t>(level)])) {
        choice[static_cast<std::size_t>(level)] = k;
        for (LinkId l : p.links) {
          used[l] += r;
          owners[l].push_back(level);
        }
        placed = true;
        break;
      }
    }
    if (placed) {
      ++level;
      continue;
    }

    // Wipeout: jump to the deepest conflicting level, merging conflict sets.
    choice[static_cast<std::size_t>(level)] = -1;
    auto& cs = conf[static_cast<std::size_t>(level)];
    if (cs.empty()) {
      res.status = CompileStatus::Infeasible;
      res.witness = "exhausted search";
      res.solve_time_s = elapsed();
      return res;
    }
    const int target = *cs.rbegin();
    cs.erase(std::prev(cs.end()));
    conf[static_cast<std::size_t>(target)].insert(cs.begin(), cs.end());
    cs.clear();
    while (level > target) {
      --level;
      if (choice[static_cast<std::size_t>(level)] >= 0 && level > target) {
        // Undo levels strictly between target and the wipeout; they restart
        // with a clean slate when re-descended.
        const Path& p = cands[static_cast<std::size_t>(level)]
                             [static_cast<std::size_t>(choice[static_cast<std::size_t>(level)])];
        const double rr = reserved_gbps(req.connections[static_cast<ConnId>(level)]);
        for (LinkId l : p.links) {
          used[l] -= rr;
          owners[l].pop_back();
        }
        choice[static_cast<std::size_t>(level)] = -1;
        conf[static_cast<std::size_t>(level)].clear();
      }
    }
    // Undo the target level's own reservation but keep its choice index so
    // the loop resumes with its next candidate.
    if (choice[static_cast<std::size_t>(target)] >= 0) {
      const Path& p = cands[static_cast<std::size_t>(target)]
                           [static_cast<std::size_t>(choice[static_cast<std::size_t>(target)])];
      const double rr = reserved_gbps(req.connections[static_cast<ConnId>(target)]);
      for (LinkId l : p.links) {
        used[l] -= rr;
        owners[l].pop_back();
      }
    }
    ++res.backtracks;
  }
}

// ---------------------------------------------------------------------------
// Validation (independent of the solver)
// ---------------------------------------------------------------------------

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate(const RouteTable& table, const NocGraph& g,
                                 const RouteRequest& req) {
  ValidationReport rep;
  const std::size_t n = table.routes.size();
  if (n != req.connections.size())
    rep.violations.push_back("route count does not match connection count");

  std::vector<double> used(g.links().size(), 0.0);
  for (std::size_t i = 0; i < n && i < req.connections.size(); ++i) {
    const Path& p = table.routes[i];
    const Connection& c = req.connections[static_cast<ConnId>(i)];
    if (p.links.empty()) {
      rep.violations.push_back("connection " + std::to_string(i) + ": empty route");
      continue;
    }
    if (g.link(p.links.front()).src != c.src)
      rep.violations.push_back("connection " + std::to_string(i) + ": route does not start at src");
    if (g.link(p.links.back()).dst != c.dst)
      rep.violations.push_back("connection " + std::to_string(i) + ": route does not end at dst");
    std::set<NodeId> visited{g.link(p.links.front()).src};
    for (std::size_t h = 0; h < p.links.size(); ++h) {
      const Link& lk = g.link(p.links[h]);
      if (h > 0 && g.link(p.links[h - 1]).dst != lk.src) {
        rep.violations.push_back("connection " + std::to_string(i) + ": disconnected route");
        break;
      }
      if (!visited.insert(lk.dst).second) {
        rep.violations.push_back("connection " + std::to_string(i) + ": non-simple path");
        break;
      }
      if (g.link(p.links[h]).reverse == kInvalidLink)
        rep.violations.push_back("connection " + std::to_string(i) + ": missing opposed channel");
    }
    detail::apply_reservation(g, p, reserved_gbps(c), used);
  }
  const auto budget = detail::link_budget(g, req.nidb_capacity_multiplier);
  for (std::size_t l = 0; l < used.size(); ++l)
    if (used[l] > budget[l] + 1e-9)
      rep.violations.push_back("link " + std::to_string(l) + ": reserved " + std::to_string(used[l]) +
                               " GB/s exceeds capacity " + std::to_string(budget[l]));
  return rep;
}

// ---------------------------------------------------------------------------
// Brute-force feasibility oracle for small instances
// ---------------------------------------------------------------------------

/// Exhaustive enumeration over the candidate-path cross-product; ground truth
/// for compile's verdict within the candidate universe.
inline bool oracle_feasibility(const RouteRequest& req, const NocGraph& g) {
  req.validate();
  const std::size_t n = req.connections.size();
  if (n > 8)
    throw Error(ErrorKind::Validation, "connections", "oracle bound: at most 8 connections");
  std::vector<std::vector<Path>> cands(n);
  for (std::size_t i = 0; i < n; ++i) {
    cands[i] = candidate_paths(g, req.connections[static_cast<ConnId>(i)]);
    if (cands[i].size() > 6)
      throw Error(ErrorKind::Validation, "candidates", "oracle bound: at most 6 per connection");
    if (cands[i].empty()) return false;
  }
  if (n == 0) return true;

  const auto budget = detail::link_budget(g, req.nidb_capacity_multiplier);
  std::vector<double> used(budget.size(), 0.0);
  auto overflows = [&] {
    for (std::size_t l = 0; l < used.size(); ++l)
      if (used[l] > budget[l] + 1e-9) return true;
    return false;
  };

  std::vector<std::size_t> pick(n, 0);
  std::size_t depth = 0;
  while (true) {
    if (depth == n) return true;
    if (pick[depth] == cands[depth].size()) {
      if (depth == 0) return false;
      pick[depth] = 0;
      --depth;
      detail::apply_reservation(g, cands[depth][pick[depth]],
                                -reserved_gbps(req.connections[static_cast<ConnId>(depth)]), used);
      ++pick[depth];
      continue;
    }
    detail::apply_reservation(g, cands[depth][pick[depth]],
                              reserved_gbps(req.connections[static_cast<ConnId>(depth)]), used);
    if (overflows()) {
      detail::apply_reservation(g, cands[depth][pick[depth]],
                                -reserved_gbps(req.connections[static_cast<ConnId>(depth)]), used);
      ++pick[depth];
    } else {
      ++depth;
    }
  }
}

}  // namespace benchnoc
