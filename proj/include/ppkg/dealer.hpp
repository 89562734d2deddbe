#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ppkg/errors.hpp"
#include "ppkg/fixed_point.hpp"
#include "ppkg/rng.hpp"

namespace ppkg {

struct TripleShare {
  RingValue a, b, c;
};

// Dealt share blob for one party of one issue event.
struct DealtMaterial {
  std::vector<RingValue> words;
};

enum class DealerMode { Online, Replay };

struct DealerStats {
  uint64_t scalar_triples = 0;       // n-party elementwise triples
  uint64_t pair_matrix_batches = 0;  // 2-party matrix triples (one per batch)
  uint64_t pair_vector_batches = 0;  // 2-party elementwise triple batches
  uint64_t compare_masks = 0;
  uint64_t dealt_values = 0;
};

// Semi-honest trusted dealer. Issues correlated randomness as a deterministic
// sequence of events; parties request events in identical order (the SPMD
// discipline), so lazily generating under a lock stays reproducible no matter
// how threads interleave. The dealer never sees a protocol message, only
// issue requests carrying shapes.
class Dealer {
 public:
  Dealer(uint64_t seed, int n_parties, const FixedPointConfig& fx);

  // Optional cap on scalar triples; exceeding it throws TripleExhaustedError.
  void set_triple_budget(uint64_t budget) { triple_budget_ = budget; }

  // n-party Beaver triples with c = a*b exact in the ring.
  std::vector<TripleShare> triples(int party, size_t count);

  // 2-party triples between pa and pb, elementwise batch of `count`.
  // Non-members receive an empty vector but still advance their cursor.
  std::vector<TripleShare> pair_triples(int party, int pa, int pb, size_t count);

  // 2-party matrix triple (A:m*p, B:p*d, C=A*B) between pa and pb.
  // Returned words: my halves of A,B,C concatenated (empty for non-members).
  std::vector<RingValue> pair_matrix_triple(int party, int pa, int pb,
                                            size_t m, size_t p, size_t d);

  // Shares of random r uniform in [1, 2^mask_bits], for sign-test comparison.
  std::vector<RingValue> compare_masks(int party, size_t count, int mask_bits);

  // Shares of a dealer-sampled plaintext matrix, uniform in [lo, hi],
  // reproducible from (seed, label). Used for model weights.
  std::vector<RingValue> deal_uniform_matrix(int party, const std::string& label,
                                             size_t rows, size_t cols,
                                             double lo, double hi);

  DealerStats stats() const;
  int parties() const { return n_; }

  // Record/replay of dealer material through per-party files
  // (lines: triple/ptriple/mtriple/cmpmask/value).
  void write_party_file(int party, const std::string& path) const;
  void load_replay_files(const std::vector<std::string>& per_party_paths);
  void set_mode(DealerMode m) { mode_ = m; }
  DealerMode mode() const { return mode_; }

  // Dealer->party deliveries for the transcript, keyed by event sequence.
  struct Delivery {
    uint64_t seq;
    int to;
    std::string tag;
    std::vector<RingValue> words;
  };
  std::vector<Delivery> take_deliveries();

  // The plaintext sampler behind deal_uniform_matrix, shared with oracles.
  static std::vector<RingValue> sample_uniform(uint64_t seed, const std::string& label,
                                               size_t count, double lo, double hi,
                                               const FixedPointConfig& fx);

 private:
  struct Event {
    std::string kind;                 // "triple", "ptriple", "mtriple", "cmpmask", "value"
    std::vector<uint64_t> params;     // shape / pair info
    std::string label;
    std::vector<std::vector<RingValue>> per_party;  // material per party
  };

  std::vector<RingValue> fetch(int party, const std::string& kind,
                               const std::vector<uint64_t>& params,
                               const std::string& label);
  std::vector<RingValue> replay_fetch(int party, const std::string& kind,
                                      const std::vector<uint64_t>& params);
  void generate(Event& ev);
  std::vector<RingValue> split(RingValue secret, int n);

  mutable std::mutex mu_;
  Prg rng_;
  uint64_t seed_;
  int n_;
  FixedPointConfig fx_;
  DealerMode mode_ = DealerMode::Online;
  std::vector<Event> events_;
  std::vector<size_t> cursor_;  // per party
  std::vector<std::vector<std::string>> replay_streams_;
  std::vector<size_t> replay_cursor_;
  std::vector<Delivery> deliveries_;
  DealerStats stats_;
  std::optional<uint64_t> triple_budget_;
};

}  // namespace ppkg
