#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "benchnoc/core.hpp"
#include "benchnoc/routegen.hpp"
#include "benchnoc/topology.hpp"
#include "benchnoc/traffic.hpp"

namespace benchnoc {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct SimConfig {
  int flit_width = 0;     // bits; 0 inherits the device
  double noc_clock = 0;   // MHz; 0 inherits the device
  int packet_payload = 256;  // bytes per NoC packet (one chopped burst)
  int header_flits_per_packet = 1;
  int read_window = 3;    // max outstanding read packets per NMU (closed loop)
  double ncrb_effective_capacity = 13.0;  // payload-visible GB/s per connection
  double endpoint_overhead_ns = 1.852;    // per endpoint side
  std::int64_t warmup_bytes = 0;          // 0 selects 10% of each connection's bytes
  std::uint64_t seed = 1;
  bool has_latency_override = false;
  LinkKindTable link_latency_override;  // fitted by calibrate(); ns per hop

  double effective_latency_ns(const DeviceSpec& d, LinkKind k) const {
    return has_latency_override ? link_latency_override.get(k) : d.link_latency.get(k);
  }
};

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct ConnMetrics {
  double throughput_gbps = 0;   // payload bytes per active second, warmup excluded
  double mean_latency_ns = 0;   // inject -> eject of data packets
  std::int64_t payload_bytes = 0;
  std::int64_t data_packets = 0;
  std::uint64_t first_inject_cycle = 0;
  std::uint64_t last_eject_cycle = 0;
};

struct LinkUtil {
  LinkId link = kInvalidLink;
  double utilization = 0;  // fraction of the trunk's raw rate
};

struct SimMetrics {
  std::vector<ConnMetrics> per_connection;
  std::vector<LinkUtil> per_link;
  std::uint64_t cycles = 0;
  double duration_ns = 0;
  std::int64_t total_payload_bytes = 0;
  double aggregate_throughput_gbps = 0;
  std::uint64_t flits_injected = 0;
  std::uint64_t flits_ejected = 0;
  /// Ejected flits per run cycle (1.0 == one continuously busy sink port).
  double sink_eject_rate = 0;
};

// ---------------------------------------------------------------------------
// Effective (payload-visible) capacities, shared with the analytic oracle
// ---------------------------------------------------------------------------

/// Payload fraction of a data packet: data flits / (data + header) flits.
inline double payload_fraction(const DeviceSpec& d, const SimConfig& cfg) {
  const double data_flits = cfg.packet_payload / d.flit_bytes();
  return data_flits / (data_flits + cfg.header_flits_per_packet);
}

/// Payload-visible trunk capacity of one link. Memory ports store their
/// (already derated) service rate in payload units.
inline double payload_capacity(const NocGraph& g, const SimConfig& cfg, LinkId l) {
  const Link& lk = g.link(l);
  if (lk.kind == LinkKind::MemPort) return lk.capacity_gbps;
  return lk.capacity_gbps * payload_fraction(g.spec(), cfg);
}

/// Per-connection payload ceiling on one link: a static route rides a single
/// 128-bit channel, and NCRB segments clamp each stream further.
inline double per_connection_payload_cap(const NocGraph& g, const SimConfig& cfg, LinkId l) {
  const Link& lk = g.link(l);
  if (lk.kind == LinkKind::MemPort) return lk.capacity_gbps;
  double cap = std::min(lk.capacity_gbps, g.spec().channel_capacity_gbps()) *
               payload_fraction(g.spec(), cfg);
  if (lk.kind == LinkKind::NcrbCrossing) cap = std::min(cap, cfg.ncrb_effective_capacity);
  return cap;
}

/// Saturating-source demand bound for the max-min comparison: user port rate
/// capped by every channel along the forward route.
inline double open_loop_demand(const NocGraph& g, const SimConfig& cfg, const Path& route,
                               double user_rate_gbps) {
  double d = user_rate_gbps;
  for (LinkId l : route.links) d = std::min(d, per_connection_payload_cap(g, cfg, l));
  return d;
}

// ---------------------------------------------------------------------------
// Simulator
// ---------------------------------------------------------------------------

namespace sim_detail {

enum class PacketKind : std::uint8_t { StreamData, WriteData, WriteResp, ReadReq, ReadResp, Probe };

inline bool is_data(PacketKind k) {
  return k == PacketKind::StreamData || k == PacketKind::WriteData || k == PacketKind::ReadResp;
}

/// Deterministic token bucket. `num` accrues per cycle, one unit costs `den`.
struct Bucket {
  std::int64_t acc = 0;
  std::int64_t num = 0;
  std::int64_t den = 1;
  std::int64_t cap = 0;
  std::uint64_t seen = 0;

  void accrue(std::uint64_t now) {
    if (now <= seen) return;
    const std::uint64_t dt = now - seen;
    seen = now;
    if (num > 0 && dt > static_cast<std::uint64_t>((cap / num) + 1)) {
      acc = cap;
    } else {
      acc = std::min(cap, acc + static_cast<std::int64_t>(dt) * num);
    }
  }
  bool ready() const { return acc >= den; }
  void spend() { acc -= den; }
};

struct PacketMeta {
  ConnId conn = 0;
  PacketKind kind = PacketKind::StreamData;
  std::int32_t flits = 0;
  std::int32_t payload = 0;
  std::int32_t phase = 0;
  bool txn_tail = false;
  std::uint64_t inject_cycle = 0;
};

struct QueueEntry {
  std::uint32_t meta = 0;
  std::int32_t avail = 0;  // flits present at this hop
  std::int32_t sent = 0;   // flits forwarded onward
};

struct Slot {
  ConnId conn = 0;
  std::int32_t next_slot = -1;      // -1: terminal hop, flits eject into the sink
  std::int32_t upstream_slot = -1;  // credits return here
  std::uint32_t sim_link = 0;
  Bucket rate;                // per-connection channel ceiling on this link
  std::int32_t quantum = 17;  // DRR flits per turn, proportional to QoS
  std::int32_t credits = 0;   // free flit space downstream
  std::deque<QueueEntry> q;
};

struct SimLink {
  LinkId link = kInvalidLink;
  std::uint32_t delay_cycles = 1;
  Bucket trunk;
  std::vector<std::uint32_t> slots;
  std::uint32_t rr = 0;
  std::int32_t deficit = 0;
  std::uint32_t backlog = 0;  // slots with queued packets
  std::uint64_t flits_sent = 0;
};

struct Arrival {
  std::uint32_t slot;  // top bit set: terminal delivery for slot & ~kSinkBit
  std::uint32_t meta;
};

inline constexpr std::uint32_t kSinkBit = 0x80000000u;

}  // namespace sim_detail

/// Event-driven wormhole simulation: one flit per channel per NoC cycle,
/// weighted round-robin among contending connections at every output port,
/// credit-based backpressure, open-loop write/stream sources and
/// window-limited closed-loop read sources. Deterministic for fixed inputs.
class Simulator {
 public:
  Simulator(const NocGraph& g, const RouteTable& table, const ConnectionSet& conns,
            const TransactionSchedule& sched, const Protocol& protocol, const SimConfig& cfg,
            bool probe_mode = false)
      : g_(g), table_(table), conns_(conns), sched_(sched), protocol_(protocol), cfg_(cfg),
        probe_mode_(probe_mode) {
    build();
  }

  SimMetrics run() {
    while (!finished()) step();
    return collect();
  }

 private:
  using PacketKind = sim_detail::PacketKind;
  using PacketMeta = sim_detail::PacketMeta;
  using Slot = sim_detail::Slot;
  using SimLink = sim_detail::SimLink;
  static constexpr std::uint32_t kSinkBit = sim_detail::kSinkBit;
  static constexpr std::int32_t kBufferFlits = 64;
  static constexpr std::int32_t kInjectQueuePackets = 4;

  struct ProgramEntry {
    ConnId conn;
    std::int32_t txns;
    std::int32_t phase;
  };
  struct SourceState {
    std::vector<ProgramEntry> program;
    std::size_t entry = 0;
    std::int32_t txn_in_entry = 0;
    std::int32_t pkt_in_txn = 0;
    std::int32_t outstanding = 0;
    sim_detail::Bucket user;
    bool done = false;
  };
  struct SinkProgress {
    std::uint32_t meta = 0;
    std::int32_t avail = 0;
  };

  // -- construction ---------------------------------------------------------

  std::int64_t rate_num(double gbps) const { return llround(gbps * 1e6); }  // KB/s
  std::int64_t flit_den() const { return llround(flit_bytes_ * clock_mhz_ * 1e3); }

  std::uint32_t sim_link_for(LinkId l) {
    if (link2sim_[l] >= 0) return static_cast<std::uint32_t>(link2sim_[l]);
    SimLink sl;
    sl.link = l;
    const Link& lk = g_.link(l);
    double lat = (lk.kind == LinkKind::MemPort) ? lk.latency_ns
                                                : cfg_.effective_latency_ns(g_.spec(), lk.kind);
    // Endpoint overhead folds into the hop that touches the endpoint.
    if (g_.node(lk.src).kind == NodeKind::NMU || g_.node(lk.src).kind == NodeKind::NSU)
      lat += cfg_.endpoint_overhead_ns;
    if (g_.node(lk.dst).kind == NodeKind::NMU || g_.node(lk.dst).kind == NodeKind::NSU)
      lat += cfg_.endpoint_overhead_ns;
    sl.delay_cycles =
        std::max<std::uint32_t>(1, static_cast<std::uint32_t>(llround(lat * clock_mhz_ / 1e3)));
    double raw = lk.capacity_gbps;
    if (lk.kind == LinkKind::MemPort) raw /= payload_fraction(g_.spec(), cfg_);
    sl.trunk.num = rate_num(raw);
    sl.trunk.den = flit_den();
    sl.trunk.cap = sl.trunk.num + sl.trunk.den;
    links_.push_back(sl);
    link2sim_[l] = static_cast<std::int32_t>(links_.size() - 1);
    return static_cast<std::uint32_t>(links_.size() - 1);
  }

  std::vector<std::int32_t> build_chain(ConnId c, const Path& path, std::int32_t quantum) {
    std::vector<std::int32_t> chain;
    chain.reserve(path.links.size());
    for (LinkId l : path.links) {
      const std::uint32_t sli = sim_link_for(l);
      Slot s;
      s.conn = c;
      s.sim_link = sli;
      const Link& lk = g_.link(l);
      double cap = std::min(lk.capacity_gbps, channel_gbps_);
      if (lk.kind == LinkKind::NcrbCrossing)
        cap = std::min(cap, cfg_.ncrb_effective_capacity / payload_fraction(g_.spec(), cfg_));
      if (lk.kind == LinkKind::MemPort) cap = lk.capacity_gbps / payload_fraction(g_.spec(), cfg_);
      s.rate.num = rate_num(cap);
      s.rate.den = flit_den();
      s.rate.cap = std::max(s.rate.num, s.rate.den) + s.rate.den;
      s.quantum = quantum;
      s.credits = kBufferFlits;
      slots_.push_back(s);
      const std::int32_t idx = static_cast<std::int32_t>(slots_.size() - 1);
      links_[sli].slots.push_back(static_cast<std::uint32_t>(idx));
      if (!chain.empty()) {
        slots_[static_cast<std::size_t>(chain.back())].next_slot = idx;
        slots_[static_cast<std::size_t>(idx)].upstream_slot = chain.back();
      }
      chain.push_back(idx);
    }
    return chain;
  }

  void build() {
    const DeviceSpec& d = g_.spec();
    flit_bytes_ = cfg_.flit_width > 0 ? cfg_.flit_width / 8.0 : d.flit_bytes();
    clock_mhz_ = cfg_.noc_clock > 0 ? cfg_.noc_clock : d.noc_clock;
    channel_gbps_ = flit_bytes_ * clock_mhz_ * 1e6 / kBytesPerGb;

    if (cfg_.packet_payload <= 0 ||
        llround(cfg_.packet_payload / flit_bytes_) * llround(flit_bytes_) != cfg_.packet_payload)
      throw Error(ErrorKind::Config, "packet_payload", "must be a multiple of the flit size");
    if (sched_.txn_size % cfg_.packet_payload != 0)
      throw Error(ErrorKind::Config, "packet_payload", "must divide txn_size");
    if (cfg_.read_window < 1) throw Error(ErrorKind::Config, "read_window", "must be >= 1");
    if (cfg_.ncrb_effective_capacity > channel_gbps_ + 1e-9)
      throw Error(ErrorKind::Config, "ncrb_effective_capacity", "exceeds raw link capacity");
    if (table_.routes.size() < conns_.size())
      throw Error(ErrorKind::Config, "routes", "scheduled connection without a route");

    data_flits_ = static_cast<std::int32_t>(llround(cfg_.packet_payload / flit_bytes_));
    packet_flits_ = data_flits_ + cfg_.header_flits_per_packet;
    packets_per_txn_ = probe_mode_ ? 1 : static_cast<std::int32_t>(sched_.txn_size / cfg_.packet_payload);

    link2sim_.assign(g_.links().size(), -1);

    double min_qos = std::numeric_limits<double>::infinity();
    for (const auto& c : conns_.connections)
      if (c.qos_gbps > 0) min_qos = std::min(min_qos, c.qos_gbps);
    if (!std::isfinite(min_qos)) min_qos = 1;
    fwd_chain_.resize(conns_.size());
    rev_chain_.resize(conns_.size());
    for (ConnId c = 0; c < conns_.size(); ++c) {
      // Weighted round-robin: one packet per turn at the smallest QoS,
      // proportionally more for heavier reservations, bounded for sanity.
      const double w = conns_[c].qos_gbps > 0 ? conns_[c].qos_gbps / min_qos : 1.0;
      const auto quantum = static_cast<std::int32_t>(
          std::clamp(std::round(packet_flits_ * w), 1.0, 8.0 * packet_flits_));
      fwd_chain_[c] = build_chain(c, table_.routes[c], quantum);
      if (protocol_.kind != ProtocolKind::Stream && !probe_mode_)
        rev_chain_[c] = build_chain(c, reverse_path(g_, table_.routes[c]), quantum);
    }
    sink_progress_.assign(slots_.size(), SinkProgress{});

    // Flatten per-phase issue sequences into per-source programs.
    src_of_conn_.assign(conns_.size(), 0);
    const std::size_t n_sources = probe_mode_ ? 1 : static_cast<std::size_t>(sched_.n_sources);
    src_state_.assign(n_sources, SourceState{});
    phase_expected_.assign(std::max<std::size_t>(1, sched_.phases.size()), 0);
    phase_ejected_.assign(phase_expected_.size(), 0);
    phase_barrier_.assign(phase_expected_.size(), false);
    if (probe_mode_) {
      src_state_[0].program.push_back({0, 1, 0});
      phase_expected_[0] = 1;
    } else {
      for (std::size_t p = 0; p < sched_.phases.size(); ++p) {
        const auto& ph = sched_.phases[p];
        phase_barrier_[p] = ph.barrier;
        for (std::size_t s = 0; s < ph.per_source.size(); ++s)
          for (auto [conn, txns] : ph.per_source[s]) {
            src_state_[s].program.push_back({conn, txns, static_cast<std::int32_t>(p)});
            src_of_conn_[conn] = static_cast<int>(s);
            phase_expected_[p] += static_cast<std::int64_t>(txns) * packets_per_txn_;
          }
      }
    }
    // User-side port pacing: tokens in KB/s, one packet payload per spend.
    for (auto& st : src_state_) {
      st.user.num = rate_num(protocol_.user_rate_gbps());
      st.user.den = static_cast<std::int64_t>(cfg_.packet_payload) * llround(clock_mhz_ * 1e3);
      st.user.cap = 2 * st.user.den;
      st.user.acc = st.user.den;
    }
    advance_gate();

    metrics_.per_connection.assign(conns_.size(), ConnMetrics{});
    conn_seen_.assign(conns_.size(), false);
    eject_events_.assign(conns_.size(), {});
    latency_sum_.assign(conns_.size(), 0.0);

    std::uint32_t max_delay = 1;
    for (const auto& sl : links_) max_delay = std::max(max_delay, sl.delay_cycles);
    std::uint32_t size = 2;
    while (size < max_delay + 2) size <<= 1;
    wheel_.assign(size, {});
    wheel_mask_ = size - 1;
  }

  // -- packet plumbing ------------------------------------------------------

  std::uint32_t new_meta(ConnId c, PacketKind kind, std::int32_t phase, bool txn_tail) {
    PacketMeta m;
    m.conn = c;
    m.kind = kind;
    m.flits = sim_detail::is_data(kind) ? packet_flits_ : 1;
    m.payload = sim_detail::is_data(kind) ? cfg_.packet_payload : 0;
    m.phase = phase;
    m.txn_tail = txn_tail;
    m.inject_cycle = now_;
    meta_.push_back(m);
    return static_cast<std::uint32_t>(meta_.size() - 1);
  }

  void mark_busy(Slot& s) {
    if (s.q.empty()) {
      // Re-activation: idle time banks nothing, but the head flit may leave
      // at wire speed (cut-through), so stock one service unit.
      s.rate.seen = now_;
      s.rate.acc = std::max(s.rate.acc, s.rate.den);
      SimLink& sl = links_[s.sim_link];
      if (sl.backlog++ == 0) {
        sl.trunk.seen = now_;
        sl.trunk.acc = std::max(sl.trunk.acc, sl.trunk.den);
      }
    }
  }

  void push_packet(std::int32_t slot_idx, std::uint32_t meta) {
    Slot& s = slots_[static_cast<std::size_t>(slot_idx)];
    mark_busy(s);
    s.q.push_back({meta, meta_[meta].flits, 0});
    in_network_ += meta_[meta].flits;
    metrics_.flits_injected += static_cast<std::uint64_t>(meta_[meta].flits);
    if (!conn_seen_[meta_[meta].conn]) {
      conn_seen_[meta_[meta].conn] = true;
      metrics_.per_connection[meta_[meta].conn].first_inject_cycle = now_;
    }
  }

  // -- main loop ------------------------------------------------------------

  bool finished() const {
    if (in_network_ != 0 || pending_arrivals_ != 0) return false;
    for (const auto& st : src_state_)
      if (!st.done || st.outstanding != 0) return false;
    return true;
  }

  void step() {
    std::uint64_t next = now_ + 1;
    bool backlog = false;
    for (const auto& sl : links_)
      if (sl.backlog > 0) {
        backlog = true;
        break;
      }
    if (!backlog) {
      // Idle network: hop to the next arrival or source-ready time.
      std::uint64_t t = next_arrival_cycle();
      for (const auto& st : src_state_) {
        if (st.done) continue;
        if (st.entry >= st.program.size()) continue;
        const ProgramEntry& pe = st.program[st.entry];
        if (pe.phase > gate_) continue;        // waits on arrivals
        if (protocol_.kind == ProtocolKind::ReadOnly) {
          if (st.outstanding < cfg_.read_window) t = std::min(t, now_ + 1);
          continue;  // otherwise waits on a response arrival
        }
        if (st.user.ready()) {
          t = std::min(t, now_ + 1);
        } else {
          const std::int64_t need = st.user.den - st.user.acc;
          const std::uint64_t dt = st.user.num > 0
                                       ? static_cast<std::uint64_t>((need + st.user.num - 1) / st.user.num)
                                       : 1;
          t = std::min(t, st.user.seen + dt);
        }
      }
      if (t != std::numeric_limits<std::uint64_t>::max()) next = std::max(next, t);
    }
    now_ = next;
    deliver_arrivals();
    inject();
    for (auto& sl : links_) serve(sl);
  }

  std::uint64_t next_arrival_cycle() const {
    if (pending_arrivals_ == 0) return std::numeric_limits<std::uint64_t>::max();
    for (std::uint32_t d = 1; d <= wheel_mask_; ++d)
      if (!wheel_[(now_ + d) & wheel_mask_].empty()) return now_ + d;
    return now_ + 1;
  }

  void schedule_arrival(std::uint64_t at, sim_detail::Arrival a) {
    wheel_[at & wheel_mask_].push_back(a);
    ++pending_arrivals_;
  }

  void deliver_arrivals() {
    auto& bucket = wheel_[now_ & wheel_mask_];
    if (bucket.empty()) return;
    pending_arrivals_ -= bucket.size();
    for (const auto& a : bucket) {
      if (a.slot & kSinkBit) {
        eject_flit(a.slot & ~kSinkBit, a.meta);
      } else {
        Slot& s = slots_[a.slot];
        mark_busy(s);
        bool appended = false;
        for (auto& e : s.q)
          if (e.meta == a.meta) {
            ++e.avail;
            appended = true;
            break;
          }
        if (!appended) s.q.push_back({a.meta, 1, 0});
      }
    }
    bucket.clear();
  }

  void eject_flit(std::uint32_t terminal_slot, std::uint32_t meta) {
    auto& sp = sink_progress_[terminal_slot];
    if (sp.meta != meta) {
      sp.meta = meta;
      sp.avail = 0;
    }
    ++sp.avail;
    --in_network_;
    ++metrics_.flits_ejected;
    const PacketMeta m = meta_[meta];  // by value: new_meta may reallocate
    if (sp.avail < m.flits) return;
    sp.avail = 0;
    sp.meta = 0;
    packet_complete(m);
  }

  void packet_complete(const PacketMeta m) {
    switch (m.kind) {
      case PacketKind::StreamData:
      case PacketKind::WriteData:
      case PacketKind::ReadResp:
      case PacketKind::Probe:
        record_data_eject(m);
        if (m.kind == PacketKind::WriteData && m.txn_tail)
          push_packet(rev_chain_[m.conn].front(),
                      new_meta(m.conn, PacketKind::WriteResp, m.phase, false));
        if (m.kind == PacketKind::ReadResp)
          --src_state_[static_cast<std::size_t>(src_of_conn_[m.conn])].outstanding;
        break;
      case PacketKind::ReadReq:
        push_packet(rev_chain_[m.conn].front(),
                    new_meta(m.conn, PacketKind::ReadResp, m.phase, m.txn_tail));
        break;
      case PacketKind::WriteResp:
        break;
    }
  }

  void record_data_eject(const PacketMeta& m) {
    auto& cm = metrics_.per_connection[m.conn];
    cm.payload_bytes += m.payload;
    ++cm.data_packets;
    cm.last_eject_cycle = now_;
    latency_sum_[m.conn] += static_cast<double>(now_ - m.inject_cycle);
    eject_events_[m.conn].push_back(now_);
    ++eject_data_flits_;
    auto& done = phase_ejected_[static_cast<std::size_t>(m.phase)];
    ++done;
    if (done == phase_expected_[static_cast<std::size_t>(m.phase)]) advance_gate();
  }

  /// Entries of phase p may issue once every barriered phase before p has
  /// fully ejected.
  void advance_gate() {
    std::size_t p = 0;
    while (p < phase_expected_.size() &&
           (!phase_barrier_[p] || phase_ejected_[p] == phase_expected_[p]))
      ++p;
    gate_ = static_cast<std::int32_t>(p);
  }

  void inject() {
    for (std::size_t s = 0; s < src_state_.size(); ++s) {
      SourceState& st = src_state_[s];
      if (st.done) continue;
      st.user.accrue(now_);
      while (true) {
        if (st.entry == st.program.size()) {
          st.done = true;
          break;
        }
        ProgramEntry& pe = st.program[st.entry];
        if (pe.phase > gate_) break;
        const ConnId c = pe.conn;
        const bool txn_tail = (st.pkt_in_txn == packets_per_txn_ - 1);
        if (probe_mode_) {
          push_packet(fwd_chain_[c].front(), new_meta(c, PacketKind::Probe, pe.phase, txn_tail));
          advance_program(st);
          continue;
        }
        if (protocol_.kind == ProtocolKind::ReadOnly) {
          if (st.outstanding >= cfg_.read_window) break;
          push_packet(fwd_chain_[c].front(), new_meta(c, PacketKind::ReadReq, pe.phase, txn_tail));
          ++st.outstanding;
          advance_program(st);
          continue;
        }
        Slot& first = slots_[static_cast<std::size_t>(fwd_chain_[c].front())];
        if (!st.user.ready()) break;
        if (static_cast<std::int32_t>(first.q.size()) >= kInjectQueuePackets) break;
        st.user.spend();
        const PacketKind kind = protocol_.kind == ProtocolKind::WriteOnly ? PacketKind::WriteData
                                                                          : PacketKind::StreamData;
        push_packet(fwd_chain_[c].front(), new_meta(c, kind, pe.phase, txn_tail));
        advance_program(st);
      }
    }
  }

  void advance_program(SourceState& st) {
    ProgramEntry& pe = st.program[st.entry];
    if (++st.pkt_in_txn == packets_per_txn_) {
      st.pkt_in_txn = 0;
      if (++st.txn_in_entry == pe.txns) {
        st.txn_in_entry = 0;
        ++st.entry;
      }
    }
  }

  void serve(SimLink& sl) {
    if (sl.backlog == 0) return;
    sl.trunk.accrue(now_);
    const std::uint32_t n = static_cast<std::uint32_t>(sl.slots.size());
    if (sl.deficit <= 0) sl.deficit = slots_[sl.slots[sl.rr]].quantum;
    std::uint32_t misses = 0;
    while (sl.trunk.ready() && misses < n) {
      Slot& s = slots_[sl.slots[sl.rr]];
      bool sent = false;
      if (!s.q.empty()) {
        auto& e = s.q.front();
        if (e.sent < e.avail) {
          s.rate.accrue(now_);
          if (s.rate.ready() && (s.next_slot < 0 || s.credits > 0)) {
            s.rate.spend();
            sl.trunk.spend();
            ++e.sent;
            ++sl.flits_sent;
            if (s.next_slot >= 0) {
              --s.credits;
              schedule_arrival(now_ + sl.delay_cycles, {static_cast<std::uint32_t>(s.next_slot), e.meta});
            } else {
              schedule_arrival(now_ + sl.delay_cycles, {kSinkBit | sl.slots[sl.rr], e.meta});
            }
            if (s.upstream_slot >= 0) ++slots_[static_cast<std::size_t>(s.upstream_slot)].credits;
            if (e.sent == meta_[e.meta].flits) {
              s.q.pop_front();
              if (s.q.empty()) --sl.backlog;
            }
            sent = true;
            misses = 0;
            if (--sl.deficit <= 0) {
              sl.rr = (sl.rr + 1) % n;
              sl.deficit = slots_[sl.slots[sl.rr]].quantum;
            }
          }
        }
      }
      if (!sent) {
        ++misses;
        sl.rr = (sl.rr + 1) % n;
        sl.deficit = slots_[sl.slots[sl.rr]].quantum;
      }
    }
  }

  // -- wrap-up --------------------------------------------------------------

  SimMetrics collect() {
    metrics_.cycles = now_;
    const double cycle_ns = 1e3 / clock_mhz_;
    metrics_.duration_ns = static_cast<double>(now_) * cycle_ns;
    std::int64_t total_payload = 0;
    double agg = 0;
    for (ConnId c = 0; c < conns_.size(); ++c) {
      auto& cm = metrics_.per_connection[c];
      total_payload += cm.payload_bytes;
      if (cm.data_packets == 0) continue;
      cm.mean_latency_ns = latency_sum_[c] / static_cast<double>(cm.data_packets) * cycle_ns;
      const auto& ev = eject_events_[c];
      const std::int64_t per_pkt = cm.payload_bytes / cm.data_packets;
      const std::int64_t warm = cfg_.warmup_bytes > 0 ? cfg_.warmup_bytes : cm.payload_bytes / 10;
      std::size_t k = 0;
      std::int64_t cum = 0;
      while (k < ev.size() && cum < warm) {
        cum += per_pkt;
        ++k;
      }
      // Packet k marks the window start; count strictly later ejections.
      if (k < ev.size() && ev.back() > ev[k]) {
        const double dt = static_cast<double>(ev.back() - ev[k]) * cycle_ns;
        const auto after = static_cast<double>(ev.size() - 1 - k) * static_cast<double>(per_pkt);
        cm.throughput_gbps = after / dt;
      } else {
        const double dt =
            static_cast<double>(cm.last_eject_cycle - cm.first_inject_cycle) * cycle_ns;
        cm.throughput_gbps = dt > 0 ? static_cast<double>(cm.payload_bytes) / dt : 0;
      }
      agg += cm.throughput_gbps;
    }
    metrics_.total_payload_bytes = total_payload;
    metrics_.aggregate_throughput_gbps = agg;
    metrics_.sink_eject_rate =
        now_ > 0 ? static_cast<double>(eject_data_flits_) * packet_flits_ / static_cast<double>(now_)
                 : 0;
    metrics_.per_link.reserve(links_.size());
    for (const auto& sl : links_) {
      LinkUtil u;
      u.link = sl.link;
      const double rate_flits =
          static_cast<double>(sl.trunk.num) / static_cast<double>(sl.trunk.den);
      u.utilization =
          now_ > 0 ? static_cast<double>(sl.flits_sent) / (static_cast<double>(now_) * rate_flits)
                   : 0;
      metrics_.per_link.push_back(u);
    }
    std::sort(metrics_.per_link.begin(), metrics_.per_link.end(),
              [](const LinkUtil& a, const LinkUtil& b) { return a.link < b.link; });
    return metrics_;
  }

  const NocGraph& g_;
  const RouteTable& table_;
  const ConnectionSet& conns_;
  const TransactionSchedule& sched_;
  Protocol protocol_;
  SimConfig cfg_;
  bool probe_mode_ = false;

  double flit_bytes_ = 16, clock_mhz_ = 1080, channel_gbps_ = 17.28;
  std::int32_t data_flits_ = 16, packet_flits_ = 17, packets_per_txn_ = 16;

  std::vector<SimLink> links_;
  std::vector<std::int32_t> link2sim_;
  std::vector<Slot> slots_;
  std::vector<std::vector<std::int32_t>> fwd_chain_, rev_chain_;
  std::vector<SinkProgress> sink_progress_;
  std::vector<int> src_of_conn_;
  std::vector<SourceState> src_state_;
  std::vector<PacketMeta> meta_;
  // Calendar wheel of in-flight flits; link delays are small and bounded.
  std::vector<std::vector<sim_detail::Arrival>> wheel_;
  std::uint64_t pending_arrivals_ = 0;
  std::uint32_t wheel_mask_ = 0;
  std::vector<std::int64_t> phase_expected_, phase_ejected_;
  std::vector<bool> phase_barrier_;
  std::int32_t gate_ = 0;
  std::uint64_t now_ = 0;
  std::int64_t in_network_ = 0;
  std::uint64_t eject_data_flits_ = 0;

  SimMetrics metrics_;
  std::vector<bool> conn_seen_;
  std::vector<std::vector<std::uint64_t>> eject_events_;
  std::vector<double> latency_sum_;
};

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

inline SimMetrics simulate(const NocGraph& g, const RouteTable& routes, const ConnectionSet& conns,
                           const TransactionSchedule& schedule, const Protocol& protocol,
                           const SimConfig& cfg) {
  Simulator sim(g, routes, conns, schedule, protocol, cfg);
  return sim.run();
}

inline SimMetrics simulate(const NocGraph& g, const RouteTable& routes, const BuiltWorkload& built,
                           const Protocol& protocol, const SimConfig& cfg) {
  return simulate(g, routes, built.connections, built.schedule, protocol, cfg);
}

/// One-way inject-to-eject latency of an isolated single-flit probe along a
/// routed connection: per-hop latencies plus serialization plus endpoint
/// overheads, with no contention.
inline double measure_latency(const NocGraph& g, const RouteTable& routes,
                              const ConnectionSet& conns, const SimConfig& cfg, ConnId probe) {
  if (probe >= conns.size()) throw Error(ErrorKind::Config, "probe", "no such connection");
  ConnectionSet one;
  one.connections.push_back(conns[probe]);
  RouteTable table;
  table.routes.push_back(routes.routes[probe]);
  TransactionSchedule sched;
  sched.n_sources = 1;
  sched.txn_size = cfg.packet_payload;
  Protocol protocol;
  protocol.kind = ProtocolKind::Stream;
  Simulator sim(g, table, one, sched, protocol, cfg, /*probe_mode=*/true);
  SimMetrics m = sim.run();
  return m.per_connection[0].mean_latency_ns;
}

}  // namespace benchnoc
