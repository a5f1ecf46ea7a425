#include "rsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace rsim::sim {

const char* scheme_name(Scheme s) {
  return s == Scheme::kCoded ? "2hrrsc" : "2hop";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "2hrrsc") return Scheme::kCoded;
  if (s == "2hop") return Scheme::kUncoded;
  throw std::invalid_argument("sim: unknown scheme '" + s + "' (use 2hrrsc or 2hop)");
}

Config& Config::with_defaults() {
  if (delta < 0.0) delta = std::numbers::sqrt2 - 1.0;
  if (delta_ratio == 0.0) delta_ratio = 1.0 / 9.0;
  if (horizon == 0) horizon = 400ull * n;
  if (warmup == 0) warmup = 40ull * n;
  return *this;
}

namespace {

std::vector<std::uint32_t> uniform_derangement(std::uint32_t n, std::uint64_t seed) {
  std::vector<std::uint32_t> perm(n);
  for (std::uint64_t attempt = 0;; ++attempt) {
    rng::Stream st(seed, rng::Tag::kPairing, attempt, 0);
    for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
    for (std::uint32_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::uint32_t>(st.bounded(i + 1));
      std::swap(perm[i], perm[j]);
    }
    bool fixed_point = false;
    for (std::uint32_t i = 0; i < n; ++i)
      if (perm[i] == i) {
        fixed_point = true;
        break;
      }
    if (!fixed_point) return perm;
  }
}

}  // namespace

Engine::Engine(Config cfg) : cfg_(std::move(cfg)) {
  n_ = cfg_.n;
  const auto side = static_cast<std::uint32_t>(std::lround(std::sqrt(double(n_))));
  if (side * side != n_)
    throw std::invalid_argument("sim: n must be a perfect square");
  side_ = static_cast<int>(side);
  if (n_ < 9) throw std::invalid_argument("sim: need n >= 9");
  if (!(cfg_.p_s > 0.0 && cfg_.p_s <= 1.0))
    throw std::invalid_argument("sim: p_s must be in (0, 1]");
  if (!(cfg_.delta_ratio > 0.0 && cfg_.delta_ratio <= 1.0))
    throw std::invalid_argument("sim: delta_ratio must be in (0, 1]");
  if (cfg_.horizon < cfg_.warmup)
    throw std::invalid_argument("sim: horizon must be >= warmup");
  if (!(cfg_.c0 > 0.0)) throw std::invalid_argument("sim: c0 must be positive");

  lattice_ = scheduler::make_lattice(cfg_.delta);
  if (side_ % lattice_.spacing == 0) {
    active_ = scheduler::active_cells(side_, lattice_);
  } else {
    active_ = scheduler::active_cells_ragged(side_, lattice_);
    ragged_ = true;
  }
  theta_eff_ = static_cast<double>(active_.size()) / static_cast<double>(n_);

  if (cfg_.scheme == Scheme::kCoded) {
    m_ = static_cast<std::uint32_t>(
        std::max<long long>(1, std::llround(cfg_.delta_ratio * n_)));
    if (m_ > n_) m_ = n_;
    code_ = rs::make_code(m_, n_);
  } else {
    m_ = 1;
  }

  // Probe timing: the emission span estimate uses the effective active
  // fraction so ragged grids are probed at the matching horizon.
  t_s_eff_ = static_cast<double>(n_) / (cfg_.p_s * theta_eff_ * scheduler::p1(n_));
  eta_delay_ = static_cast<std::uint64_t>(
      std::ceil(cfg_.c0 * std::log(static_cast<double>(n_))));

  walkers_ = mobility::init_uniform(n_, cfg_.seed);
  dest_ = uniform_derangement(n_, cfg_.seed);
  pair_of_dest_.resize(n_);
  for (std::uint32_t u = 0; u < n_; ++u) pair_of_dest_[dest_[u]] = u;

  if (cfg_.scheme == Scheme::kCoded) {
    src_.resize(n_);
    for (std::uint32_t u = 0; u < n_; ++u) src_[u].codeword = make_codeword(u, 1);
    relay_.resize(n_);
    genlog_.resize(n_);
  } else {
    next_packet_.assign(n_, 0);
    relay2h_.resize(n_);
  }
  dst_.resize(n_);

  sample_every_ = std::max<std::uint64_t>(1, n_ / 4);
  if (!cfg_.event_log_path.empty()) {
    log_.open(cfg_.event_log_path, std::ios::binary | std::ios::trunc);
    if (!log_) throw std::runtime_error("sim: cannot open event log " + cfg_.event_log_path);
  }
}

std::vector<gf::Element> Engine::payload_symbols(std::uint32_t pair,
                                                 std::uint32_t gen) const {
  rng::Stream st(cfg_.seed, rng::Tag::kPayload, pair, gen);
  std::vector<gf::Element> out(m_);
  const std::uint32_t mask = code_.field.q - 1;  // q is a power of two
  for (auto& sym : out) sym = static_cast<gf::Element>(st.next() & mask);
  return out;
}

std::vector<gf::Element> Engine::make_codeword(std::uint32_t pair,
                                               std::uint32_t gen) const {
  const auto payload = payload_symbols(pair, gen);
  return rs::encode(code_, payload);
}

void Engine::log_line(std::uint32_t cell, std::uint32_t sender, std::uint32_t receiver,
                      char role, std::uint32_t pair, std::uint32_t gen, std::uint32_t k,
                      bool decoded) {
  if (!log_.is_open()) return;
  char buf[96];
  const int len = std::snprintf(buf, sizeof buf, "%llu,%u,%u,%u,%c,%u,%u,%u,%d\n",
                                static_cast<unsigned long long>(slot_), cell, sender,
                                receiver, role, pair, gen, k, decoded ? 1 : 0);
  log_.write(buf, len);
}

bool Engine::dest_has(const DestState& ds, std::uint32_t gen, std::uint32_t k) const {
  const auto it = ds.pending.find(gen);
  if (it == ds.pending.end()) return false;
  for (const auto& e : it->second.got)
    if (e.k == k) return true;
  return false;
}

bool Engine::dest_receive(std::uint32_t v, std::uint32_t pair, std::uint32_t gen,
                          std::uint32_t k, gf::Element symbol) {
  auto& ds = dst_[v];
  if (ds.decoded.count(gen)) {
    ++counters_.dropped_post_decode;
    return false;
  }
  auto [it, fresh] = ds.pending.try_emplace(gen);
  auto& gr = it->second;
  auto& gl = genlog_[pair][gen];
  if (fresh) {
    gr.first_slot = slot_;
    gl.first_arrival = slot_;
  }
  for (const auto& e : gr.got)
    if (e.k == k)
      throw std::logic_error("sim: duplicate version at destination");
  gr.got.push_back({k, symbol});
  ++buffered_total_;
  if (gr.got.size() < m_) return false;

  // m distinct versions collected: decode and verify against the source.
  std::vector<rs::Received> received;
  received.reserve(m_);
  for (const auto& e : gr.got) received.push_back({e.k, e.symbol});
  const auto payload = rs::decode(code_, received);
  if (payload != payload_symbols(pair, gen))
    throw std::logic_error("sim: decoded payload differs from the source payload");
  ds.decoded.insert(gen);
  buffered_total_ -= gr.got.size();
  ds.pending.erase(it);
  gl.decode = slot_;
  for (std::uint32_t idx = 0; idx < m_; ++idx)
    records_.push_back({pair, gen, idx, gl.first_emit, slot_});
  ++counters_.decodes;
  return true;
}

void Engine::maybe_tag_probe(std::uint32_t pair, std::uint32_t gen) {
  if (cfg_.probe_samples == 0 || tagging_closed_) return;
  if (tags_.size() >= cfg_.probe_samples) return;
  const auto offset = static_cast<std::uint64_t>(std::llround(t_s_eff_));
  const std::uint64_t probe_slot = slot_ + offset;
  const std::uint64_t eta_start = probe_slot + eta_delay_;
  const std::uint64_t eta_end = eta_start + cfg_.probe_eta_window;
  if (eta_end > cfg_.horizon) {
    // Later generations start later still, so tagging is over for this run.
    ++probes_skipped_;
    tagging_closed_ = true;
    return;
  }
  ProbeTag tag;
  tag.sample.pair = pair;
  tag.sample.gen = gen;
  tag.sample.t1 = slot_;
  tag.probe_slot = probe_slot;
  tag.eta_start = eta_start;
  tag.eta_end = eta_end;
  tags_.push_back(tag);
}

bool Engine::node_holds(std::uint32_t w, std::uint32_t pair, std::uint32_t gen) const {
  if (w == pair) return false;  // the source itself is not counted
  if (w == dest_[pair]) {
    const auto& ds = dst_[w];
    const auto it = ds.pending.find(gen);
    return it != ds.pending.end() && !it->second.got.empty();
  }
  const auto pit = relay_[w].find(pair);
  if (pit == relay_[w].end()) return false;
  const auto git = pit->second.find(gen);
  return git != pit->second.end() && !git->second.empty();
}

void Engine::probe_step(const scheduler::SlotSchedule& sched) {
  for (auto& tag : tags_) {
    auto& s = tag.sample;
    if (!tag.probed && slot_ == tag.probe_slot) {
      tag.probed = true;
      s.decoded_before_probe = dst_[dest_[s.pair]].decoded.count(s.gen) > 0;
      for (std::uint32_t w = 0; w < n_; ++w) {
        if (!node_holds(w, s.pair, s.gen)) continue;
        ++s.holders_with_dest;
        if (w != dest_[s.pair]) ++s.holders_excl_dest;
      }
      s.phi = static_cast<double>(s.holders_with_dest) / static_cast<double>(n_);
    }
    if (slot_ >= tag.eta_start && slot_ < tag.eta_end) {
      for (const auto& a : sched.assignments) {
        if (a.sender == s.pair) continue;
        ++s.eta_observations;
        if (node_holds(a.sender, s.pair, s.gen)) ++tag.eta_hold;
      }
    }
    if (slot_ + 1 == tag.eta_end)
      s.decoded_before_eta_end = dst_[dest_[s.pair]].decoded.count(s.gen) > 0;
  }
}

void Engine::source_action_coded(const scheduler::Assignment& a) {
  const std::uint32_t u = a.sender, v = a.receiver, pair = u;
  auto& st = src_[u];
  const std::uint32_t gen = st.gen, k = st.next_k;
  const gf::Element sym = st.codeword[k - 1];
  auto& gl = genlog_[pair][gen];
  if (k == 1) {
    gl.first_emit = slot_;
    maybe_tag_probe(pair, gen);
  }
  if (k == n_) gl.last_emit = slot_;

  bool decoded = false;
  if (v == dest_[u]) {
    decoded = dest_receive(v, pair, gen, k, sym);
    ++counters_.direct_to_dest;
  } else {
    auto& vec = relay_[v][pair][gen];
    vec.push_back({k, sym});
    ++buffered_total_;
    ++counters_.relay_stored;
  }
  ++counters_.source_tx;
  log_line(a.cell, u, v, 'S', pair, gen, k, decoded);

  if (k == n_) {
    st.gen = gen + 1;
    st.next_k = 1;
    st.codeword = make_codeword(pair, st.gen);
  } else {
    st.next_k = k + 1;
  }
}

void Engine::relay_action_coded(const scheduler::Assignment& a) {
  const std::uint32_t u = a.sender, v = a.receiver;
  const std::uint32_t pair = pair_of_dest_[v];
  auto& ds = dst_[v];
  const auto relay_it = relay_[u].find(pair);
  if (relay_it != relay_[u].end()) {
    auto& gq = relay_it->second;
    // Handshake: drop everything the destination has already decoded.
    for (auto git = gq.begin(); git != gq.end();) {
      if (ds.decoded.count(git->first)) {
        buffered_total_ -= git->second.size();
        counters_.discarded_versions += git->second.size();
        git = gq.erase(git);
      } else {
        ++git;
      }
    }
    // Offer the first innovative version, generations ascending.
    for (auto& [gen, vec] : gq) {
      const VersionEntry* chosen = nullptr;
      if (cfg_.strict_hol) {
        if (!vec.empty() && !dest_has(ds, gen, vec.front().k)) chosen = &vec.front();
        if (chosen == nullptr) break;  // strict reading: head of line or nothing
      } else {
        for (const auto& e : vec)
          if (!dest_has(ds, gen, e.k)) {
            chosen = &e;
            break;
          }
      }
      if (chosen != nullptr) {
        const std::uint32_t k = chosen->k;
        const gf::Element sym = chosen->symbol;
        const bool decoded = dest_receive(v, pair, gen, k, sym);
        ++counters_.relay_tx;
        log_line(a.cell, u, v, 'R', pair, gen, k, decoded);
        if (gq.empty()) relay_[u].erase(relay_it);
        return;
      }
    }
    if (gq.empty()) relay_[u].erase(relay_it);
  }
  ++counters_.handshake_no_send;
}

void Engine::source_action_uncoded(const scheduler::Assignment& a) {
  const std::uint32_t u = a.sender, v = a.receiver, pair = u;
  const std::uint64_t idx = next_packet_[u]++;
  ++counters_.source_tx;
  if (v == dest_[u]) {
    records_.push_back({pair, static_cast<std::uint32_t>(idx), 0, slot_, slot_});
    ++counters_.direct_to_dest;
    ++counters_.decodes;
    log_line(a.cell, u, v, 'S', pair, static_cast<std::uint32_t>(idx), 0, true);
  } else {
    relay2h_[v][pair].push_back({idx, slot_});
    ++buffered_total_;
    ++counters_.relay_stored;
    log_line(a.cell, u, v, 'S', pair, static_cast<std::uint32_t>(idx), 0, false);
  }
}

void Engine::relay_action_uncoded(const scheduler::Assignment& a) {
  const std::uint32_t u = a.sender, v = a.receiver;
  const std::uint32_t pair = pair_of_dest_[v];
  const auto it = relay2h_[u].find(pair);
  if (it == relay2h_[u].end() || it->second.empty()) {
    ++counters_.handshake_no_send;
    return;
  }
  const Packet pkt = it->second.front();
  it->second.pop_front();
  --buffered_total_;
  records_.push_back(
      {pair, static_cast<std::uint32_t>(pkt.index), 0, pkt.start_slot, slot_});
  ++counters_.relay_tx;
  ++counters_.decodes;
  log_line(a.cell, u, v, 'R', pair, static_cast<std::uint32_t>(pkt.index), 0, true);
}

void Engine::execute(const scheduler::Assignment& a) {
  if (cfg_.scheme == Scheme::kCoded) {
    if (a.source_role)
      source_action_coded(a);
    else
      relay_action_coded(a);
  } else {
    if (a.source_role)
      source_action_uncoded(a);
    else
      relay_action_uncoded(a);
  }
}

void Engine::step() {
  occ_.build(walkers_.cells, n_);
  const auto sched =
      scheduler::select_transmissions(occ_, active_, cfg_.p_s, cfg_.seed, slot_);
  for (const auto& a : sched.assignments) execute(a);
  if (!tags_.empty()) probe_step(sched);
  mobility::advance(walkers_);
  ++slot_;
  if (slot_ > cfg_.warmup && slot_ % sample_every_ == 0)
    buffered_samples_.push_back(buffered_total_);
}

namespace {

bool detect_instability(const std::vector<std::uint64_t>& samples, std::uint32_t n) {
  if (samples.size() < 8) return false;
  const std::size_t quarter = samples.size() / 4;
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < quarter; ++i) head += static_cast<double>(samples[i]);
  for (std::size_t i = samples.size() - quarter; i < samples.size(); ++i)
    tail += static_cast<double>(samples[i]);
  head /= static_cast<double>(quarter);
  tail /= static_cast<double>(quarter);
  return tail > 2.0 * head + 2.0 * n;
}

}  // namespace

Result Engine::finish() {
  Result r;
  r.config = cfg_;
  r.m = m_;
  r.theta_eff = theta_eff_;
  r.ragged_lattice = ragged_;
  r.records = std::move(records_);
  if (cfg_.scheme == Scheme::kCoded) {
    for (std::uint32_t pair = 0; pair < n_; ++pair)
      for (const auto& [gen, gl] : genlog_[pair]) {
        if (gl.decode == kNoSlot) continue;
        GenSpans gs;
        gs.pair = pair;
        gs.gen = gen;
        gs.first_emit = gl.first_emit;
        gs.last_emit = gl.last_emit;
        gs.first_arrival = gl.first_arrival;
        gs.decode_slot = gl.decode;
        r.spans.push_back(gs);
      }
  }
  for (auto& tag : tags_) {
    if (!tag.probed) continue;  // horizon guard makes this unreachable
    auto s = tag.sample;
    s.eta = s.eta_observations > 0
                ? static_cast<double>(tag.eta_hold) / static_cast<double>(s.eta_observations)
                : 0.0;
    r.probes.push_back(s);
  }
  r.probes_skipped = probes_skipped_;
  r.unstable = detect_instability(buffered_samples_, n_);
  r.buffered_samples = std::move(buffered_samples_);
  r.buffered_final = buffered_total_;
  r.counters = counters_;
  return r;
}

Result run(const Config& cfg) {
  Engine engine(cfg);
  while (engine.slot() < cfg.horizon) engine.step();
  return engine.finish();
}

}  // namespace rsim::sim
