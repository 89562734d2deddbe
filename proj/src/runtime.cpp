#include "ppkg/runtime.hpp"

#include <algorithm>

namespace ppkg {

Runtime::Runtime(const RunOptions& opt)
    : opt_(opt),
      dealer_(opt.seed, opt.n, opt.fx),
      slots_(size_t(opt.n)),
      inboxes_(size_t(opt.n)),
      active_(size_t(opt.n), true) {
  opt_.fx.validate();
  if (opt.triple_budget) dealer_.set_triple_budget(*opt.triple_budget);
  if (opt.dealer_mode == DealerMode::Replay)
    dealer_.load_replay_files(opt.dealer_files);
  barrier_ = std::make_unique<std::barrier<RoundFlush>>(opt.n, RoundFlush{this});
}

Runtime::~Runtime() = default;

void Runtime::flush_round() noexcept {
  std::lock_guard<std::mutex> lk(mu_);
  std::vector<Message> round_msgs;
  for (int i = 0; i < opt_.n; ++i) {
    if (!active_[size_t(i)]) continue;
    if (!slots_[size_t(i)].has_value()) continue;  // leaving party this phase
    for (auto& m : *slots_[size_t(i)]) {
      if (m.to < 0 || m.to >= opt_.n || !active_[size_t(m.to)]) {
        desync_ = true;
        desync_what_ = "message addressed to absent party " + std::to_string(m.to);
        continue;
      }
      m.round = round_;
      round_msgs.push_back(std::move(m));
    }
    slots_[size_t(i)].reset();
  }
  // Canonical per-round order: per-sender submission order is deterministic,
  // so a stable sort on (from, to, tag) fixes the transcript bytes.
  std::stable_sort(round_msgs.begin(), round_msgs.end(),
                   [](const Message& a, const Message& b) {
                     if (a.from != b.from) return a.from < b.from;
                     if (a.to != b.to) return a.to < b.to;
                     return a.tag < b.tag;
                   });
  for (auto& in : inboxes_) in.clear();
  for (auto& m : round_msgs) {
    inboxes_[size_t(m.to)].push_back(m);
    transcript_.append(std::move(m));
  }
  ++round_;
}

std::vector<Message> Runtime::exchange(int party, std::vector<Message> out) {
  {
    std::lock_guard<std::mutex> lk(mu_);
    for (const auto& m : out) {
      if (m.from != party)
        throw RoundDesyncError("message sender does not match calling party");
      if (m.to == party) throw RoundDesyncError("message addressed to self");
    }
    slots_[size_t(party)] = std::move(out);
  }
  barrier_->arrive_and_wait();
  std::lock_guard<std::mutex> lk(mu_);
  if (desync_) throw RoundDesyncError(desync_what_);
  return inboxes_[size_t(party)];
}

void Runtime::leave(int party) {
  {
    std::lock_guard<std::mutex> lk(mu_);
    active_[size_t(party)] = false;
  }
  barrier_->arrive_and_drop();
}

void Runtime::record_open(OpenEvent e) {
  std::lock_guard<std::mutex> lk(mu_);
  e.round = round_;
  transcript_.record_open(std::move(e));
}

Transcript Runtime::finish() {
  std::lock_guard<std::mutex> lk(mu_);
  auto deliveries = dealer_.take_deliveries();
  for (auto& d : deliveries) {
    Message m;
    m.from = -1;
    m.to = d.to;
    m.round = d.seq;  // dealer messages ordered by issue sequence
    m.tag = d.tag;
    m.payload = pack_rings(d.words);
    m.from_dealer = true;
    transcript_.append(std::move(m));
  }
  transcript_.set_rounds(round_);
  return std::move(transcript_);
}

const Message& require_msg(const std::vector<Message>& inbox, int from,
                           const std::string& tag) {
  for (const auto& m : inbox)
    if (m.from == from && m.tag == tag) return m;
  throw DeadlockError("expected message '" + tag + "' from party " +
                      std::to_string(from) + " never arrived");
}

std::vector<std::vector<RingValue>> PartyCtx::open_batch(
    OpenKind kind, const std::string& label,
    const std::vector<std::vector<RingValue>>& my_shares) {
  std::vector<Message> out;
  out.reserve(size_t(n() - 1) * my_shares.size());
  for (size_t k = 0; k < my_shares.size(); ++k) {
    auto payload = pack_rings(my_shares[k]);
    std::string tag = "open." + label + "." + std::to_string(k);
    for (int p = 0; p < n(); ++p) {
      if (p == id_) continue;
      out.push_back(make(p, tag, payload));
    }
  }
  auto inbox = exchange(std::move(out));
  std::vector<std::vector<RingValue>> opened(my_shares.size());
  for (size_t k = 0; k < my_shares.size(); ++k) {
    opened[k] = my_shares[k];
    std::string tag = "open." + label + "." + std::to_string(k);
    for (int p = 0; p < n(); ++p) {
      if (p == id_) continue;
      auto theirs = unpack_rings(require_msg(inbox, p, tag).payload);
      if (theirs.size() != opened[k].size())
        throw DimensionMismatchError("opened share length mismatch");
      for (size_t i = 0; i < theirs.size(); ++i) opened[k][i] += theirs[i];
    }
  }
  record_open(kind, label);
  return opened;
}

}  // namespace ppkg
