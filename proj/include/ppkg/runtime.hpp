#pragma once

#include <barrier>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

#include "ppkg/dealer.hpp"
#include "ppkg/errors.hpp"
#include "ppkg/rng.hpp"
#include "ppkg/transcript.hpp"

namespace ppkg {

struct RunOptions {
  int n = 2;
  uint64_t seed = 1;
  FixedPointConfig fx;
  DealerMode dealer_mode = DealerMode::Online;
  std::vector<std::string> dealer_files;  // replay inputs, one per party
  std::optional<uint64_t> triple_budget;
  int compare_mask_bits = 20;  // s: comparison masks uniform in [1, 2^s]
  int div_exp_min = -8;        // configured limits for DIV's public bound
  int div_exp_max = 24;
};

class PartyCtx;

// In-process synchronous-round engine. Parties run on their own threads and
// meet at a barrier once per round; the round flush orders messages
// canonically so reruns with the same seed produce byte-identical
// transcripts.
class Runtime {
 public:
  explicit Runtime(const RunOptions& opt);
  ~Runtime();

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  std::vector<Message> exchange(int party, std::vector<Message> out);
  void leave(int party);
  void record_open(OpenEvent e);

  Dealer& dealer() { return dealer_; }
  const RunOptions& options() const { return opt_; }
  uint64_t round() const { return round_; }

  // Merges dealer deliveries and finalizes the record. Call after all
  // parties have left.
  Transcript finish();

 private:
  void flush_round() noexcept;

  struct RoundFlush {
    Runtime* rt;
    void operator()() const noexcept { rt->flush_round(); }
  };

  RunOptions opt_;
  Dealer dealer_;
  Transcript transcript_;
  std::mutex mu_;
  std::vector<std::optional<std::vector<Message>>> slots_;
  std::vector<std::vector<Message>> inboxes_;
  std::vector<bool> active_;
  uint64_t round_ = 0;
  bool desync_ = false;
  std::string desync_what_;
  std::unique_ptr<std::barrier<RoundFlush>> barrier_;
};

// One party's handle onto the runtime: its id, its private randomness, the
// dealer, and the round channel.
class PartyCtx {
 public:
  PartyCtx(Runtime& rt, int id)
      : rt_(rt), id_(id), rng_(derive_seed(rt.options().seed, "party", uint64_t(id))) {}

  int id() const { return id_; }
  int n() const { return rt_.options().n; }
  bool leader() const { return id_ == 0; }
  Prg& rng() { return rng_; }
  Dealer& dealer() { return rt_.dealer(); }
  const RunOptions& options() const { return rt_.options(); }
  const FixedPointConfig& fx() const { return rt_.options().fx; }

  Message make(int to, std::string tag, std::vector<uint8_t> payload) const {
    return Message{id_, to, 0, std::move(tag), std::move(payload), false};
  }

  std::vector<Message> exchange(std::vector<Message> out) {
    return rt_.exchange(id_, std::move(out));
  }

  // Broadcast my shares of each vector, add everyone's, record the opening.
  std::vector<std::vector<RingValue>> open_batch(
      OpenKind kind, const std::string& label,
      const std::vector<std::vector<RingValue>>& my_shares);

  std::vector<RingValue> open(OpenKind kind, const std::string& label,
                              const std::vector<RingValue>& my_share) {
    return open_batch(kind, label, {my_share})[0];
  }

  void record_open(OpenKind kind, const std::string& label) {
    if (leader()) rt_.record_open(OpenEvent{kind, label, rt_.round()});
  }

 private:
  Runtime& rt_;
  int id_;
  Prg rng_;
};

// Find the unique message from `from` with tag `tag`; DeadlockError if the
// expected message never arrived.
const Message& require_msg(const std::vector<Message>& inbox, int from,
                           const std::string& tag);

struct RunSummary {
  Transcript transcript;
  DealerStats dealer_stats;
};

template <typename T>
struct RunResult {
  std::vector<T> outputs;
  Transcript transcript;
  DealerStats dealer_stats;
};

// Spin up n party threads running the same program and collect their outputs.
template <typename F>
auto run_parties(const RunOptions& opt, F&& fn)
    -> RunResult<std::invoke_result_t<F&, PartyCtx&>> {
  using T = std::invoke_result_t<F&, PartyCtx&>;
  if (opt.n < 2) throw InvalidPartyCountError("need at least 2 parties");
  Runtime rt(opt);
  std::vector<std::optional<T>> outs(static_cast<size_t>(opt.n));
  std::vector<std::exception_ptr> errs(static_cast<size_t>(opt.n));
  {
    std::vector<std::jthread> threads;
    threads.reserve(size_t(opt.n));
    for (int i = 0; i < opt.n; ++i) {
      threads.emplace_back([&, i] {
        PartyCtx ctx(rt, i);
        try {
          outs[size_t(i)].emplace(fn(ctx));
        } catch (...) {
          errs[size_t(i)] = std::current_exception();
        }
        rt.leave(i);
      });
    }
  }
  // Prefer a root-cause error over secondary deadlocks it triggered.
  std::exception_ptr first, first_deadlock;
  for (auto& e : errs) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const DeadlockError&) {
      if (!first_deadlock) first_deadlock = e;
    } catch (...) {
      if (!first) first = e;
    }
  }
  if (first) std::rethrow_exception(first);
  if (first_deadlock) std::rethrow_exception(first_deadlock);

  RunResult<T> res;
  res.outputs.reserve(size_t(opt.n));
  for (auto& o : outs) res.outputs.push_back(std::move(*o));
  res.dealer_stats = rt.dealer().stats();
  res.transcript = rt.finish();
  return res;
}

}  // namespace ppkg
