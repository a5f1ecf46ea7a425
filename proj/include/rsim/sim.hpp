#pragma once
// Slotted protocol engine: the coded two-hop relay scheme (generations of
// m packets spread as n single-emission versions, decodable from any m)
// and the uncoded two-hop relay baseline, both on the torus random walk,
// plus runtime probes of version spread.

#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rsim/mobility.hpp"
#include "rsim/rs.hpp"
#include "rsim/scheduler.hpp"

namespace rsim::sim {

enum class Scheme { kCoded, kUncoded };

const char* scheme_name(Scheme s);          // "2hrrsc" / "2hop"
Scheme parse_scheme(const std::string& s);  // throws std::invalid_argument

struct Config {
  std::uint32_t n = 225;       // node count; perfect square
  double delta = -1.0;         // Protocol-model guard; < 0 = default below
  double p_s = 0.5;            // source-role probability, (0, 1]
  double delta_ratio = 0.0;    // generation ratio; m = max(1, round(delta_ratio * n))
  Scheme scheme = Scheme::kCoded;
  std::uint64_t horizon = 0;   // total slots simulated
  std::uint64_t warmup = 0;    // slots excluded from steady-state metrics
  std::uint64_t seed = 1;
  double c0 = 3.0;             // mixing-interval constant for the eta probe
  bool strict_hol = false;     // relay offers only the literal head of the
                               // earliest undecoded generation
  std::uint32_t probe_samples = 0;        // tagged generations (0 = probes off)
  std::uint32_t probe_eta_window = 1000;  // slots of sender sampling per tag
  std::string event_log_path;             // empty = no event log

  // Fills delta / delta_ratio / horizon / warmup defaults where still at
  // their zero sentinels: delta = sqrt(2) - 1, delta_ratio = 1/9,
  // horizon = 400 n, warmup = 40 n.
  Config& with_defaults();
};

struct DelayRecord {
  std::uint32_t pair = 0;
  std::uint32_t gen = 0;     // packet index itself for the uncoded scheme
  std::uint32_t packet = 0;  // index within the generation
  std::uint64_t start_slot = 0;
  std::uint64_t decode_slot = 0;
};

inline constexpr std::uint64_t kNoSlot = ~std::uint64_t{0};

// Per-generation timestamps feeding the delay decomposition.
struct GenSpans {
  std::uint32_t pair = 0;
  std::uint32_t gen = 0;
  std::uint64_t first_emit = kNoSlot;
  std::uint64_t last_emit = kNoSlot;  // kNoSlot until all n versions sent
  std::uint64_t first_arrival = kNoSlot;
  std::uint64_t decode_slot = kNoSlot;
};

struct ProbeSample {
  std::uint32_t pair = 0;
  std::uint32_t gen = 0;
  std::uint64_t t1 = 0;                   // slot of the first version emission
  std::uint32_t holders_with_dest = 0;    // nodes holding a version at t1 + t_s
  std::uint32_t holders_excl_dest = 0;
  double phi = 0.0;                       // holders_with_dest / n
  double eta = 0.0;                       // scheduled-sender holding frequency
  std::uint64_t eta_observations = 0;
  bool decoded_before_probe = false;
  bool decoded_before_eta_end = false;
};

struct Counters {
  std::uint64_t source_tx = 0;
  std::uint64_t relay_tx = 0;
  std::uint64_t direct_to_dest = 0;
  std::uint64_t handshake_no_send = 0;
  std::uint64_t relay_stored = 0;
  std::uint64_t discarded_versions = 0;
  std::uint64_t dropped_post_decode = 0;
  std::uint64_t decodes = 0;
};

struct Result {
  Config config;            // resolved configuration
  std::uint32_t m = 0;      // generation size (1 for the uncoded scheme)
  double theta_eff = 0.0;   // active cells / n; theta' exactly when spacing | L
  bool ragged_lattice = false;
  std::vector<DelayRecord> records;  // every decode/delivery, warmup included
  std::vector<GenSpans> spans;       // coded scheme only
  std::vector<ProbeSample> probes;
  std::uint32_t probes_skipped = 0;
  bool unstable = false;
  std::vector<std::uint64_t> buffered_samples;
  std::uint64_t buffered_final = 0;
  Counters counters;
};

class Engine {
 public:
  explicit Engine(Config cfg);

  void step();          // one slot: schedule, transmit, probe, move
  std::uint64_t slot() const { return slot_; }

  const Config& config() const { return cfg_; }
  std::uint32_t generation_size() const { return m_; }
  double theta_eff() const { return theta_eff_; }
  bool ragged_lattice() const { return ragged_; }
  const std::vector<std::uint32_t>& pairing() const { return dest_; }
  const mobility::Walkers& walkers() const { return walkers_; }
  const Counters& counters() const { return counters_; }
  std::uint64_t buffered_total() const { return buffered_total_; }

  Result finish();      // extract metrics; engine is spent afterwards

 private:
  struct SourceState {
    std::uint32_t gen = 1;
    std::uint32_t next_k = 1;
    std::vector<gf::Element> codeword;
  };
  struct VersionEntry {
    std::uint32_t k;
    gf::Element symbol;
  };
  using GenQueue = std::map<std::uint32_t, std::vector<VersionEntry>>;
  struct GenRecv {
    std::vector<VersionEntry> got;
    std::uint64_t first_slot = 0;
  };
  struct DestState {
    std::map<std::uint32_t, GenRecv> pending;
    std::unordered_set<std::uint32_t> decoded;
  };
  struct GenLog {
    std::uint64_t first_emit = kNoSlot;
    std::uint64_t last_emit = kNoSlot;
    std::uint64_t first_arrival = kNoSlot;
    std::uint64_t decode = kNoSlot;
  };
  struct Packet {
    std::uint64_t index;
    std::uint64_t start_slot;
  };
  struct ProbeTag {
    ProbeSample sample;
    std::uint64_t probe_slot = 0;
    std::uint64_t eta_start = 0;
    std::uint64_t eta_end = 0;
    std::uint64_t eta_hold = 0;
    bool probed = false;
  };

  std::vector<gf::Element> payload_symbols(std::uint32_t pair, std::uint32_t gen) const;
  std::vector<gf::Element> make_codeword(std::uint32_t pair, std::uint32_t gen) const;
  void execute(const scheduler::Assignment& a);
  void source_action_coded(const scheduler::Assignment& a);
  void relay_action_coded(const scheduler::Assignment& a);
  void source_action_uncoded(const scheduler::Assignment& a);
  void relay_action_uncoded(const scheduler::Assignment& a);
  bool dest_receive(std::uint32_t v, std::uint32_t pair, std::uint32_t gen,
                    std::uint32_t k, gf::Element symbol);
  bool dest_has(const DestState& ds, std::uint32_t gen, std::uint32_t k) const;
  bool node_holds(std::uint32_t w, std::uint32_t pair, std::uint32_t gen) const;
  void maybe_tag_probe(std::uint32_t pair, std::uint32_t gen);
  void probe_step(const scheduler::SlotSchedule& sched);
  void log_line(std::uint32_t cell, std::uint32_t sender, std::uint32_t receiver,
                char role, std::uint32_t pair, std::uint32_t gen, std::uint32_t k,
                bool decoded);

  Config cfg_;
  std::uint32_t n_ = 0;
  int side_ = 0;
  std::uint32_t m_ = 1;
  rs::Code code_;
  scheduler::Lattice lattice_;
  std::vector<std::uint32_t> active_;
  double theta_eff_ = 0.0;
  bool ragged_ = false;
  double t_s_eff_ = 0.0;
  std::uint64_t eta_delay_ = 0;

  mobility::Walkers walkers_;
  std::vector<std::uint32_t> dest_;          // destination per pair id
  std::vector<std::uint32_t> pair_of_dest_;  // inverse permutation
  scheduler::Occupancy occ_;
  std::uint64_t slot_ = 0;

  std::vector<SourceState> src_;
  std::vector<std::uint64_t> next_packet_;
  std::vector<std::unordered_map<std::uint32_t, GenQueue>> relay_;
  std::vector<std::unordered_map<std::uint32_t, std::deque<Packet>>> relay2h_;
  std::vector<DestState> dst_;
  std::vector<std::map<std::uint32_t, GenLog>> genlog_;

  std::vector<ProbeTag> tags_;
  bool tagging_closed_ = false;
  std::uint32_t probes_skipped_ = 0;

  std::vector<DelayRecord> records_;
  std::uint64_t buffered_total_ = 0;
  std::vector<std::uint64_t> buffered_samples_;
  std::uint64_t sample_every_ = 1;
  Counters counters_;
  std::ofstream log_;
};

// Construct, run to the horizon, extract.
Result run(const Config& cfg);

}  // namespace rsim::sim
