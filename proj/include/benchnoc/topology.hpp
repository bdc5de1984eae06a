#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "benchnoc/core.hpp"

namespace benchnoc {

// ---------------------------------------------------------------------------
// Device description
// ---------------------------------------------------------------------------

enum class LinkKind : std::uint8_t {
  Local,         // endpoint tap <-> switch
  VnocHop,       // vertical switch-to-switch inside a column
  HnocHop,       // horizontal row segment
  NidbCrossing,  // die-bridge entry; one per SLR boundary crossed
  NcrbCrossing,  // clock re-convergent buffer exit on PL HNoC rows
  MemPort,       // controller channel attach (DRAM/HBM)
};

inline constexpr std::array<LinkKind, 6> kAllLinkKinds = {
    LinkKind::Local,        LinkKind::VnocHop,      LinkKind::HnocHop,
    LinkKind::NidbCrossing, LinkKind::NcrbCrossing, LinkKind::MemPort};

inline std::string_view to_string(LinkKind k) {
  switch (k) {
    case LinkKind::Local: return "local";
    case LinkKind::VnocHop: return "vnoc_hop";
    case LinkKind::HnocHop: return "hnoc_hop";
    case LinkKind::NidbCrossing: return "nidb_crossing";
    case LinkKind::NcrbCrossing: return "ncrb_crossing";
    case LinkKind::MemPort: return "mem_port";
  }
  return "?";
}

enum class NodeKind : std::uint8_t { NMU, NSU, NPS, NIDB, NCRB };

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::NMU: return "NMU";
    case NodeKind::NSU: return "NSU";
    case NodeKind::NPS: return "NPS";
    case NodeKind::NIDB: return "NIDB";
    case NodeKind::NCRB: return "NCRB";
  }
  return "?";
}

/// Per-kind scalar table (latency or capacity).
struct LinkKindTable {
  double local = 0;
  double vnoc_hop = 0;
  double hnoc_hop = 0;
  double nidb_crossing = 0;
  double ncrb_crossing = 0;
  double mem_port = 0;

  double get(LinkKind k) const {
    switch (k) {
      case LinkKind::Local: return local;
      case LinkKind::VnocHop: return vnoc_hop;
      case LinkKind::HnocHop: return hnoc_hop;
      case LinkKind::NidbCrossing: return nidb_crossing;
      case LinkKind::NcrbCrossing: return ncrb_crossing;
      case LinkKind::MemPort: return mem_port;
    }
    return 0;
  }
  void set(LinkKind k, double v) {
    switch (k) {
      case LinkKind::Local: local = v; break;
      case LinkKind::VnocHop: vnoc_hop = v; break;
      case LinkKind::HnocHop: hnoc_hop = v; break;
      case LinkKind::NidbCrossing: nidb_crossing = v; break;
      case LinkKind::NcrbCrossing: ncrb_crossing = v; break;
      case LinkKind::MemPort: mem_port = v; break;
    }
  }
};

struct HnocRowDesc {
  int slr_index = 0;
  bool has_ncrb = true;
  bool is_memory_row = false;
};

struct DramSpec {
  int noc_links_to_dram = 8;
  double aggregate_practical_bw = 70.0;  // GB/s, payload-visible
  double port_latency_ns = 1.852;        // 2 NoC cycles
};

struct HbmSpec {
  int stacks = 1;
  int hbm_nmus_per_stack = 32;
  int hbm_nmu_width = 256;       // bits
  double hbm_nmu_clock = 400.0;  // MHz
  double controller_efficiency = 0.86;
  double stack_row_trunk = 40.0;  // GB/s, per-column entry into the stack region
  double port_latency_ns = 1.852;

  double channel_rate_gbps() const { return hbm_nmu_width / 8.0 * hbm_nmu_clock * 1e6 / kBytesPerGb; }
  double theoretical_stack_bw() const { return hbm_nmus_per_stack * channel_rate_gbps(); }
};

enum class MemoryKind : std::uint8_t { None, Dram, Hbm };

struct MemorySpec {
  MemoryKind kind = MemoryKind::None;
  DramSpec dram;
  HbmSpec hbm;
};

/// Chiplet-partitioned device model. Column geometry (four VNoC columns,
/// seven endpoints per column on the bottom SLR, six elsewhere) reproduces
/// the shipped parts' endpoint totals and is overridable here.
struct DeviceSpec {
  std::string name = "device";
  int slr_count = 4;
  int vnoc_columns = 4;
  int nmu_per_column_bottom_slr = 7;
  int nmu_per_column_other_slr = 6;  // NSU counts mirror NMU counts
  double noc_clock = 1080.0;         // MHz
  int flit_width = 128;              // bits
  std::vector<HnocRowDesc> hnoc_rows;
  LinkKindTable link_latency;   // ns per hop
  LinkKindTable link_capacity;  // GB/s raw trunk rate per hop
  MemorySpec memory;

  DeviceSpec() {
    link_latency = default_latency();
    link_capacity = default_capacity();
  }

  static LinkKindTable default_latency() {
    LinkKindTable t;
    t.local = 5.0;
    t.vnoc_hop = 8.0;
    t.hnoc_hop = 4.0;
    t.nidb_crossing = 25.0;
    t.ncrb_crossing = 10.0;
    t.mem_port = 1.852;
    return t;
  }

  /// Endpoint taps expose a single 128-bit channel; column spines and rows
  /// are multi-channel trunks. Trunk widths are not published for the
  /// modeled parts; the defaults are fitted against the reported
  /// contention envelopes.
  static LinkKindTable default_capacity() {
    LinkKindTable t;
    t.local = 17.28;
    t.vnoc_hop = 62.0;
    t.hnoc_hop = 138.24;
    t.nidb_crossing = 62.0;
    t.ncrb_crossing = 138.24;
    t.mem_port = 17.28;
    return t;
  }

  double channel_capacity_gbps() const { return flit_width / 8.0 * noc_clock * 1e6 / kBytesPerGb; }
  double flit_bytes() const { return flit_width / 8.0; }
  double cycle_ns() const { return mhz_to_cycle_ns(noc_clock); }

  int endpoints_in_slr(int slr) const {
    return slr == 0 ? nmu_per_column_bottom_slr : nmu_per_column_other_slr;
  }
  int total_endpoints() const {
    return vnoc_columns * (nmu_per_column_bottom_slr + (slr_count - 1) * nmu_per_column_other_slr);
  }

  void validate() const {
    if (slr_count < 1) throw Error(ErrorKind::Validation, "slr_count", "must be >= 1");
    if (vnoc_columns < 1) throw Error(ErrorKind::Validation, "vnoc_columns", "must be >= 1");
    if (nmu_per_column_bottom_slr < 1)
      throw Error(ErrorKind::Validation, "nmu_per_column_bottom_slr", "must be >= 1");
    if (slr_count > 1 && nmu_per_column_other_slr < 1)
      throw Error(ErrorKind::Validation, "nmu_per_column_other_slr", "must be >= 1");
    if (noc_clock <= 0) throw Error(ErrorKind::Validation, "noc_clock", "must be > 0");
    if (flit_width <= 0 || flit_width % 8 != 0)
      throw Error(ErrorKind::Validation, "flit_width", "must be a positive multiple of 8");
    for (LinkKind k : kAllLinkKinds) {
      if (link_latency.get(k) <= 0)
        throw Error(ErrorKind::Validation, "link_latency", std::string(to_string(k)) + " must be > 0");
      if (link_capacity.get(k) <= 0)
        throw Error(ErrorKind::Validation, "link_capacity", std::string(to_string(k)) + " must be > 0");
    }
    if (link_latency.nidb_crossing < link_latency.vnoc_hop)
      throw Error(ErrorKind::Validation, "link_latency",
                  "nidb_crossing must be >= vnoc_hop (SLR crossings dominate)");
    std::vector<bool> seen(static_cast<std::size_t>(slr_count), false);
    int memory_rows = 0;
    for (const auto& row : hnoc_rows) {
      if (row.slr_index < 0 || row.slr_index >= slr_count)
        throw Error(ErrorKind::Validation, "hnoc_rows", "slr_index out of range");
      if (seen[static_cast<std::size_t>(row.slr_index)])
        throw Error(ErrorKind::Validation, "hnoc_rows", "duplicate row for one SLR");
      seen[static_cast<std::size_t>(row.slr_index)] = true;
      if (row.is_memory_row) {
        ++memory_rows;
        if (row.slr_index != 0)
          throw Error(ErrorKind::Validation, "hnoc_rows", "memory row must sit on the bottom SLR");
      }
    }
    if (memory_rows > 1)
      throw Error(ErrorKind::Validation, "hnoc_rows", "at most one memory row");
    if (memory.kind != MemoryKind::None && memory_rows != 1)
      throw Error(ErrorKind::Validation, "memory", "DRAM/HBM requires exactly one memory row");
    if (memory.kind == MemoryKind::Dram && memory.dram.noc_links_to_dram < 1)
      throw Error(ErrorKind::Validation, "noc_links_to_dram", "must be >= 1");
    if (memory.kind == MemoryKind::Hbm && memory.hbm.stacks < 0)
      throw Error(ErrorKind::Validation, "stacks", "must be >= 0");
  }

  /// One HNoC row per SLR; only the bottom (memory) row lacks an NCRB.
  static std::vector<HnocRowDesc> rows_one_per_slr(int slr_count) {
    std::vector<HnocRowDesc> rows;
    for (int s = 0; s < slr_count; ++s)
      rows.push_back({s, /*has_ncrb=*/s != 0, /*is_memory_row=*/s == 0});
    return rows;
  }

  static DeviceSpec vp1802() {
    DeviceSpec d;
    d.name = "vp1802";
    d.slr_count = 4;
    d.hnoc_rows = rows_one_per_slr(4);
    d.memory.kind = MemoryKind::Dram;
    return d;
  }

  static DeviceSpec vh1782() {
    DeviceSpec d;
    d.name = "vh1782";
    d.slr_count = 3;
    d.hnoc_rows = rows_one_per_slr(3);
    d.memory.kind = MemoryKind::Hbm;
    return d;
  }
};

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

struct Node {
  NodeKind kind;
  std::int16_t column = -1;
  std::int16_t slr = -1;
  std::int16_t index = -1;   // tap index within (column, slr); -1 for fabric nodes
  bool memory = false;       // controller-side endpoint added by attach_memory
};

struct Link {
  NodeId src = kInvalidNode;
  NodeId dst = kInvalidNode;
  LinkKind kind = LinkKind::Local;
  double capacity_gbps = 0;  // raw trunk rate
  double latency_ns = 0;
  LinkId reverse = kInvalidLink;  // opposed direction of the same channel pair
};

enum class Role : std::uint8_t { Source, Sink };  // Source = NMU, Sink = NSU

/// Endpoint handle: (column, slr, index-within-group, role).
struct NodeRef {
  int column = 0;
  int slr = 0;
  int index = 0;
  Role role = Role::Source;

  bool operator==(const NodeRef&) const = default;
};

struct Path {
  std::vector<LinkId> links;
  bool empty() const { return links.empty(); }
};

class NocGraph {
 public:
  const DeviceSpec& spec() const { return spec_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  const Link& link(LinkId id) const { return links_[id]; }
  const std::vector<LinkId>& out_links(NodeId id) const { return out_adj_[id]; }

  NodeId endpoint(const NodeRef& ref) const {
    check_ref(ref);
    const auto& per_col = (ref.role == Role::Source ? nmu_ : nsu_);
    return per_col[idx3(ref.column, ref.slr, ref.index)];
  }
  NodeId tap(int column, int slr, int index) const { return nps_[idx3(column, slr, index)]; }
  NodeId row_switch(int row_ordinal, int column) const {
    return row_nodes_[static_cast<std::size_t>(row_ordinal) * spec_.vnoc_columns + column];
  }
  /// Row ordinal for an SLR, or -1 when that SLR declares no row.
  int row_for_slr(int slr) const { return row_of_slr_[static_cast<std::size_t>(slr)]; }
  int memory_row() const { return memory_row_; }

  std::size_t count_nodes(NodeKind k) const {
    std::size_t n = 0;
    for (const auto& nd : nodes_)
      if (nd.kind == k && !nd.memory) ++n;
    return n;
  }

  LinkId find_link(NodeId from, NodeId to) const {
    for (LinkId l : out_adj_[from])
      if (links_[l].dst == to) return l;
    throw Error(ErrorKind::Routing, "link", "no link between requested nodes");
  }

  // Memory endpoints appended by attach_memory (empty otherwise).
  const std::vector<NodeId>& dram_ports() const { return dram_ports_; }
  const std::vector<NodeId>& hbm_channels() const { return hbm_channels_; }
  const std::vector<NodeId>& hbm_nmus() const { return hbm_nmus_; }

  // --- construction (used by build_device / attach_memory) ---
  NodeId add_node(const Node& n) {
    nodes_.push_back(n);
    out_adj_.emplace_back();
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  /// Adds the opposed unidirectional pair a->b, b->a and returns the a->b id.
  LinkId add_channel(NodeId a, NodeId b, LinkKind ab_kind, LinkKind ba_kind, double ab_cap,
                     double ba_cap, double ab_lat, double ba_lat) {
    const LinkId fwd = static_cast<LinkId>(links_.size());
    links_.push_back({a, b, ab_kind, ab_cap, ab_lat, fwd + 1});
    links_.push_back({b, a, ba_kind, ba_cap, ba_lat, fwd});
    out_adj_[a].push_back(fwd);
    out_adj_[b].push_back(fwd + 1);
    return fwd;
  }
  LinkId add_channel(NodeId a, NodeId b, LinkKind kind, double cap, double lat) {
    return add_channel(a, b, kind, kind, cap, cap, lat, lat);
  }

 private:
  friend NocGraph build_device(const DeviceSpec&);
  friend NocGraph attach_memory(const NocGraph&, const MemorySpec&);

  std::size_t idx3(int column, int slr, int index) const {
    std::size_t off = endpoint_offset_[static_cast<std::size_t>(slr)];
    return (static_cast<std::size_t>(column) * per_column_) + off + static_cast<std::size_t>(index);
  }
  void check_ref(const NodeRef& ref) const {
    if (ref.column < 0 || ref.column >= spec_.vnoc_columns)
      throw Error(ErrorKind::Validation, "column", "endpoint column out of range");
    if (ref.slr < 0 || ref.slr >= spec_.slr_count)
      throw Error(ErrorKind::Validation, "slr", "endpoint slr out of range");
    if (ref.index < 0 || ref.index >= spec_.endpoints_in_slr(ref.slr))
      throw Error(ErrorKind::Validation, "index",
                  "index-within-group exceeds per-column capacity of that SLR");
  }

  DeviceSpec spec_;
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> out_adj_;
  std::vector<NodeId> nmu_, nsu_, nps_;
  std::vector<std::size_t> endpoint_offset_;  // per slr, into a column's tap array
  std::size_t per_column_ = 0;
  std::vector<NodeId> row_nodes_;  // [row_ordinal * columns + column]
  std::vector<int> row_of_slr_;
  int memory_row_ = -1;
  std::vector<NodeId> dram_ports_, hbm_channels_, hbm_nmus_;
};

/// Builds the device graph: per-column vertical switch chains with one switch
/// per endpoint tap, NIDB bridges at every SLR boundary, one horizontal row
/// per declared HNoC row (NCRB nodes on flagged rows). Node and link ids are
/// deterministic: column-major, bottom-up, rows last.
inline NocGraph build_device(const DeviceSpec& spec) {
  spec.validate();
  NocGraph g;
  g.spec_ = spec;

  const auto& lat = spec.link_latency;
  const auto& cap = spec.link_capacity;

  g.endpoint_offset_.resize(static_cast<std::size_t>(spec.slr_count));
  std::size_t off = 0;
  for (int s = 0; s < spec.slr_count; ++s) {
    g.endpoint_offset_[static_cast<std::size_t>(s)] = off;
    off += static_cast<std::size_t>(spec.endpoints_in_slr(s));
  }
  g.per_column_ = off;

  const std::size_t total = static_cast<std::size_t>(spec.vnoc_columns) * g.per_column_;
  g.nmu_.resize(total);
  g.nsu_.resize(total);
  g.nps_.resize(total);

  for (int c = 0; c < spec.vnoc_columns; ++c) {
    NodeId prev_top = kInvalidNode;
    for (int s = 0; s < spec.slr_count; ++s) {
      const int n_ep = spec.endpoints_in_slr(s);
      NodeId first_tap = kInvalidNode, last_tap = kInvalidNode;
      for (int i = 0; i < n_ep; ++i) {
        const auto c16 = static_cast<std::int16_t>(c);
        const auto s16 = static_cast<std::int16_t>(s);
        const auto i16 = static_cast<std::int16_t>(i);
        NodeId tap = g.add_node({NodeKind::NPS, c16, s16, i16});
        NodeId nmu = g.add_node({NodeKind::NMU, c16, s16, i16});
        NodeId nsu = g.add_node({NodeKind::NSU, c16, s16, i16});
        const std::size_t at = g.idx3(c, s, i);
        g.nps_[at] = tap;
        g.nmu_[at] = nmu;
        g.nsu_[at] = nsu;
        g.add_channel(nmu, tap, LinkKind::Local, cap.local, lat.local);
        g.add_channel(tap, nsu, LinkKind::Local, cap.local, lat.local);
        if (i > 0) g.add_channel(last_tap, tap, LinkKind::VnocHop, cap.vnoc_hop, lat.vnoc_hop);
        if (i == 0) first_tap = tap;
        last_tap = tap;
      }
      if (s > 0) {
        // Die bridge between prev_top and first_tap. The entering direction
        // carries the crossing latency (kind nidb); the exit is a plain
        // vertical hop, so any crossing traverses exactly one NIDB link.
        NodeId nidb = g.add_node({NodeKind::NIDB, static_cast<std::int16_t>(c),
                                  static_cast<std::int16_t>(s), -1});
        g.add_channel(prev_top, nidb, LinkKind::NidbCrossing, LinkKind::VnocHop,
                      cap.nidb_crossing, cap.vnoc_hop, lat.nidb_crossing, lat.vnoc_hop);
        g.add_channel(first_tap, nidb, LinkKind::NidbCrossing, LinkKind::VnocHop,
                      cap.nidb_crossing, cap.vnoc_hop, lat.nidb_crossing, lat.vnoc_hop);
      }
      prev_top = last_tap;
    }
  }

  g.row_of_slr_.assign(static_cast<std::size_t>(spec.slr_count), -1);
  std::vector<HnocRowDesc> rows = spec.hnoc_rows;
  std::sort(rows.begin(), rows.end(),
            [](const HnocRowDesc& a, const HnocRowDesc& b) { return a.slr_index < b.slr_index; });
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const HnocRowDesc& row = rows[r];
    g.row_of_slr_[static_cast<std::size_t>(row.slr_index)] = static_cast<int>(r);
    if (row.is_memory_row) g.memory_row_ = static_cast<int>(r);
    NodeId prev = kInvalidNode;
    for (int c = 0; c < spec.vnoc_columns; ++c) {
      NodeId rn = g.add_node({NodeKind::NPS, static_cast<std::int16_t>(c),
                              static_cast<std::int16_t>(row.slr_index), -1});
      g.row_nodes_.push_back(rn);
      g.add_channel(rn, g.tap(c, row.slr_index, 0), LinkKind::VnocHop, cap.vnoc_hop, lat.vnoc_hop);
      if (c > 0) {
        if (row.has_ncrb) {
          // Segment with a re-timing buffer: enter on a plain horizontal hop,
          // exit through the NCRB link (one NCRB crossing per segment).
          NodeId ncrb = g.add_node({NodeKind::NCRB, static_cast<std::int16_t>(c - 1),
                                    static_cast<std::int16_t>(row.slr_index), -1});
          g.add_channel(prev, ncrb, LinkKind::HnocHop, LinkKind::NcrbCrossing, cap.hnoc_hop,
                        cap.ncrb_crossing, lat.hnoc_hop, lat.ncrb_crossing);
          g.add_channel(rn, ncrb, LinkKind::HnocHop, LinkKind::NcrbCrossing, cap.hnoc_hop,
                        cap.ncrb_crossing, lat.hnoc_hop, lat.ncrb_crossing);
        } else {
          g.add_channel(prev, rn, LinkKind::HnocHop, cap.hnoc_hop, lat.hnoc_hop);
        }
      }
      prev = rn;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Default (dimension-order) paths
// ---------------------------------------------------------------------------

enum class RowChoice : std::uint8_t { NearestRow, MemoryRow };

namespace detail {

/// Appends the vertical walk between two taps of one column, crossing die
/// bridges as needed.
inline void vertical_walk(const NocGraph& g, int column, int slr_a, int idx_a, int slr_b, int idx_b,
                          std::vector<LinkId>& out) {
  int s = slr_a, i = idx_a;
  const int dir = (slr_b > slr_a || (slr_b == slr_a && idx_b > idx_a)) ? 1 : -1;
  while (s != slr_b || i != idx_b) {
    NodeId here = g.tap(column, s, i);
    if (s != slr_b) {
      const int top = g.spec().endpoints_in_slr(s) - 1;
      if (dir > 0) {
        if (i < top) {
          out.push_back(g.find_link(here, g.tap(column, s, i + 1)));
          ++i;
        } else {
          // Through the bridge: tap -> NIDB -> bottom tap of the next SLR.
          NodeId next = g.tap(column, s + 1, 0);
          NodeId nidb = kInvalidNode;
          for (LinkId l : g.out_links(here))
            if (g.link(l).kind == LinkKind::NidbCrossing && g.node(g.link(l).dst).slr == s + 1)
              nidb = g.link(l).dst;
          if (nidb == kInvalidNode)
            throw Error(ErrorKind::Routing, "nidb", "missing die bridge above SLR");
          out.push_back(g.find_link(here, nidb));
          out.push_back(g.find_link(nidb, next));
          ++s;
          i = 0;
        }
      } else {
        if (i > 0) {
          out.push_back(g.find_link(here, g.tap(column, s, i - 1)));
          --i;
        } else {
          NodeId next = g.tap(column, s - 1, g.spec().endpoints_in_slr(s - 1) - 1);
          NodeId nidb = kInvalidNode;
          for (LinkId l : g.out_links(here))
            if (g.link(l).kind == LinkKind::NidbCrossing && g.node(g.link(l).dst).slr == s)
              nidb = g.link(l).dst;
          if (nidb == kInvalidNode)
            throw Error(ErrorKind::Routing, "nidb", "missing die bridge below SLR");
          out.push_back(g.find_link(here, nidb));
          out.push_back(g.find_link(nidb, next));
          --s;
          i = g.spec().endpoints_in_slr(s) - 1;
        }
      }
    } else {
      const int step = (idx_b > i) ? 1 : -1;
      out.push_back(g.find_link(here, g.tap(column, s, i + step)));
      i += step;
    }
  }
}

/// Horizontal walk along a row, through NCRB nodes where present.
inline void row_walk(const NocGraph& g, int row_ordinal, int col_a, int col_b,
                     std::vector<LinkId>& out) {
  const int step = (col_b > col_a) ? 1 : -1;
  for (int c = col_a; c != col_b; c += step) {
    NodeId here = g.row_switch(row_ordinal, c);
    NodeId there = g.row_switch(row_ordinal, c + step);
    // Either a direct segment or one passing through an NCRB node.
    for (LinkId l : g.out_links(here)) {
      const Link& lk = g.link(l);
      if (lk.dst == there) {
        out.push_back(l);
        goto advanced;
      }
      if (g.node(lk.dst).kind == NodeKind::NCRB) {
        for (LinkId l2 : g.out_links(lk.dst)) {
          if (g.link(l2).dst == there) {
            out.push_back(l);
            out.push_back(l2);
            goto advanced;
          }
        }
      }
    }
    throw Error(ErrorKind::Routing, "row", "broken horizontal row segment");
  advanced:;
  }
}

}  // namespace detail

/// Row picked by a dimension-order route between two SLRs: the memory row
/// when it lies inside the vertical span (no extra crossings, no NCRBs),
/// otherwise the lower endpoint's own row.
inline int pick_row(const NocGraph& g, int slr_src, int slr_dst, RowChoice choice) {
  if (choice == RowChoice::MemoryRow) {
    if (g.memory_row() < 0)
      throw Error(ErrorKind::Routing, "row_choice", "device declares no memory row");
    return g.memory_row();
  }
  const int lo = std::min(slr_src, slr_dst);
  const int hi = std::max(slr_src, slr_dst);
  // Memory row sits on SLR 0; inside the span it costs nothing extra and
  // avoids NCRBs, so prefer it there.
  if (lo == 0 && g.memory_row() >= 0) return g.memory_row();
  for (int s = lo; s <= hi; ++s)
    if (g.row_for_slr(s) >= 0) return g.row_for_slr(s);
  // No row inside the vertical span: take the closest declared row below,
  // then the closest above.
  for (int s = lo - 1; s >= 0; --s)
    if (g.row_for_slr(s) >= 0) return g.row_for_slr(s);
  for (int s = hi + 1; s < g.spec().slr_count; ++s)
    if (g.row_for_slr(s) >= 0) return g.row_for_slr(s);
  throw Error(ErrorKind::Routing, "hnoc_rows", "device declares no horizontal rows");
}

/// Dimension-order default route (vertical, then horizontal along the chosen
/// row, then vertical), used when the compiler is bypassed.
inline Path default_path(const NocGraph& g, const NodeRef& src, const NodeRef& dst,
                         RowChoice row_choice = RowChoice::NearestRow) {
  if (src.role != Role::Source) throw Error(ErrorKind::Routing, "src", "src must be an NMU");
  if (dst.role != Role::Sink) throw Error(ErrorKind::Routing, "dst", "dst must be an NSU");
  const NodeId s_id = g.endpoint(src);
  const NodeId d_id = g.endpoint(dst);

  Path p;
  p.links.push_back(g.find_link(s_id, g.tap(src.column, src.slr, src.index)));
  if (src.column == dst.column) {
    // One column: pure vertical; a memory-row detour would be degenerate.
    detail::vertical_walk(g, src.column, src.slr, src.index, dst.slr, dst.index, p.links);
  } else {
    const int row = pick_row(g, src.slr, dst.slr, row_choice);
    int row_slr = -1;
    for (int s = 0; s < g.spec().slr_count; ++s)
      if (g.row_for_slr(s) == row) row_slr = s;
    detail::vertical_walk(g, src.column, src.slr, src.index, row_slr, 0, p.links);
    p.links.push_back(g.find_link(g.tap(src.column, row_slr, 0), g.row_switch(row, src.column)));
    detail::row_walk(g, row, src.column, dst.column, p.links);
    p.links.push_back(g.find_link(g.row_switch(row, dst.column), g.tap(dst.column, row_slr, 0)));
    detail::vertical_walk(g, dst.column, row_slr, 0, dst.slr, dst.index, p.links);
  }
  p.links.push_back(g.find_link(g.tap(dst.column, dst.slr, dst.index), d_id));
  return p;
}

inline double path_latency(const NocGraph& g, const Path& p) {
  double ns = 0;
  for (LinkId l : p.links) ns += g.link(l).latency_ns;
  return ns;
}

inline int count_links(const NocGraph& g, const Path& p, LinkKind kind) {
  int n = 0;
  for (LinkId l : p.links)
    if (g.link(l).kind == kind) ++n;
  return n;
}

inline int slr_crossings(const NocGraph& g, const Path& p) {
  return count_links(g, p, LinkKind::NidbCrossing);
}
inline int ncrb_crossings(const NocGraph& g, const Path& p) {
  return count_links(g, p, LinkKind::NcrbCrossing);
}

/// Bottleneck raw capacity along a path.
inline double path_capacity(const NocGraph& g, const Path& p) {
  double cap = std::numeric_limits<double>::infinity();
  for (LinkId l : p.links) cap = std::min(cap, g.link(l).capacity_gbps);
  return cap;
}

/// Reverse direction of a path using the opposed link of every channel pair.
inline Path reverse_path(const NocGraph& g, const Path& p) {
  Path r;
  r.links.reserve(p.links.size());
  for (auto it = p.links.rbegin(); it != p.links.rend(); ++it)
    r.links.push_back(g.link(*it).reverse);
  return r;
}

}  // namespace benchnoc
