#include "ppkg/dealer.hpp"

#include <fstream>
#include <sstream>

#include "ppkg/errors.hpp"

namespace ppkg {

Dealer::Dealer(uint64_t seed, int n_parties, const FixedPointConfig& fx)
    : rng_(derive_seed(seed, "dealer")),
      seed_(seed),
      n_(n_parties),
      fx_(fx),
      cursor_(size_t(n_parties), 0),
      replay_cursor_(size_t(n_parties), 0) {}

std::vector<RingValue> Dealer::split(RingValue secret, int n) {
  std::vector<RingValue> shares(static_cast<size_t>(n));
  RingValue acc{0};
  for (int i = 1; i < n; ++i) {
    shares[size_t(i)] = rng_.next_ring();
    acc += shares[size_t(i)];
  }
  shares[0] = secret - acc;
  return shares;
}

void Dealer::generate(Event& ev) {
  ev.per_party.assign(size_t(n_), {});
  if (ev.kind == "triple") {
    size_t count = ev.params[0];
    for (auto& p : ev.per_party) p.reserve(count * 3);
    for (size_t k = 0; k < count; ++k) {
      RingValue a = rng_.next_ring(), b = rng_.next_ring();
      RingValue c = a * b;
      auto sa = split(a, n_), sb = split(b, n_), sc = split(c, n_);
      for (int i = 0; i < n_; ++i) {
        ev.per_party[size_t(i)].push_back(sa[size_t(i)]);
        ev.per_party[size_t(i)].push_back(sb[size_t(i)]);
        ev.per_party[size_t(i)].push_back(sc[size_t(i)]);
      }
    }
  } else if (ev.kind == "ptriple") {
    int pa = int(ev.params[0]), pb = int(ev.params[1]);
    size_t count = ev.params[2];
    for (size_t k = 0; k < count; ++k) {
      RingValue a = rng_.next_ring(), b = rng_.next_ring();
      RingValue c = a * b;
      RingValue a0 = rng_.next_ring(), b0 = rng_.next_ring(), c0 = rng_.next_ring();
      ev.per_party[size_t(pa)].insert(ev.per_party[size_t(pa)].end(), {a0, b0, c0});
      ev.per_party[size_t(pb)].insert(ev.per_party[size_t(pb)].end(),
                                      {a - a0, b - b0, c - c0});
    }
  } else if (ev.kind == "mtriple") {
    int pa = int(ev.params[0]), pb = int(ev.params[1]);
    size_t m = ev.params[2], p = ev.params[3], d = ev.params[4];
    std::vector<RingValue> A(m * p), B(p * d), C(m * d, RingValue{0});
    for (auto& v : A) v = rng_.next_ring();
    for (auto& v : B) v = rng_.next_ring();
    for (size_t r = 0; r < m; ++r)
      for (size_t k = 0; k < p; ++k) {
        RingValue ark = A[r * p + k];
        for (size_t c = 0; c < d; ++c) C[r * d + c] += ark * B[k * d + c];
      }
    auto& half_a = ev.per_party[size_t(pa)];
    auto& half_b = ev.per_party[size_t(pb)];
    auto deal = [&](const std::vector<RingValue>& full) {
      for (RingValue v : full) {
        RingValue s0 = rng_.next_ring();
        half_a.push_back(s0);
        half_b.push_back(v - s0);
      }
    };
    deal(A);
    deal(B);
    deal(C);
  } else if (ev.kind == "cmpmask") {
    size_t count = ev.params[0];
    int bits = int(ev.params[1]);
    for (size_t k = 0; k < count; ++k) {
      RingValue r{rng_.next_range(1, uint64_t(1) << bits)};
      auto sr = split(r, n_);
      for (int i = 0; i < n_; ++i) ev.per_party[size_t(i)].push_back(sr[size_t(i)]);
    }
  } else if (ev.kind == "value") {
    size_t rows = ev.params[0], cols = ev.params[1];
    double lo = decode(RingValue{ev.params[2]}, fx_);
    double hi = decode(RingValue{ev.params[3]}, fx_);
    auto plain = sample_uniform(seed_, ev.label, rows * cols, lo, hi, fx_);
    for (auto& p : ev.per_party) p.reserve(plain.size());
    for (RingValue v : plain) {
      auto sv = split(v, n_);
      for (int i = 0; i < n_; ++i) ev.per_party[size_t(i)].push_back(sv[size_t(i)]);
    }
  } else {
    throw ConfigError("unknown dealer event kind: " + ev.kind);
  }
}

std::vector<RingValue> Dealer::fetch(int party, const std::string& kind,
                                     const std::vector<uint64_t>& params,
                                     const std::string& label) {
  std::lock_guard<std::mutex> lk(mu_);
  if (mode_ == DealerMode::Replay) return replay_fetch(party, kind, params);

  size_t& cur = cursor_[size_t(party)];
  if (cur == events_.size()) {
    Event ev;
    ev.kind = kind;
    ev.params = params;
    ev.label = label;
    generate(ev);
    if (kind == "triple" || kind == "ptriple") {
      stats_.scalar_triples += kind == "triple" ? params[0] : params[2];
      if (kind == "ptriple") stats_.pair_vector_batches += 1;
      if (triple_budget_ && stats_.scalar_triples > *triple_budget_)
        throw TripleExhaustedError("dealer triple budget exhausted");
    } else if (kind == "mtriple") {
      stats_.pair_matrix_batches += 1;
    } else if (kind == "cmpmask") {
      stats_.compare_masks += params[0];
    } else if (kind == "value") {
      stats_.dealt_values += params[0] * params[1];
    }
    uint64_t seq = events_.size();
    for (int i = 0; i < n_; ++i) {
      if (ev.per_party[size_t(i)].empty()) continue;
      deliveries_.push_back(Delivery{seq, i, "dealer." + kind, ev.per_party[size_t(i)]});
    }
    events_.push_back(std::move(ev));
  }
  const Event& ev = events_[cur];
  if (ev.kind != kind || ev.params != params || ev.label != label)
    throw RoundDesyncError("party " + std::to_string(party) +
                           " requested dealer material out of order");
  ++cur;
  return ev.per_party[size_t(party)];
}

std::vector<RingValue> Dealer::replay_fetch(int party, const std::string& kind,
                                            const std::vector<uint64_t>& params) {
  auto& stream = replay_streams_[size_t(party)];
  size_t& cur = replay_cursor_[size_t(party)];
  auto next_line = [&]() -> std::istringstream {
    if (cur >= stream.size())
      throw ConfigError("dealer replay file exhausted for party " +
                        std::to_string(party));
    return std::istringstream(stream[cur++]);
  };
  auto expect_kind = [&](std::istringstream& is) {
    std::string k;
    is >> k;
    if (k != kind)
      throw ConfigError("dealer replay mismatch: wanted " + kind + ", file has " + k);
  };

  std::vector<RingValue> out;
  if (kind == "triple" || kind == "ptriple") {
    bool member = kind == "triple" ||
                  party == int(params[0]) || party == int(params[1]);
    if (!member) return out;
    size_t count = kind == "triple" ? params[0] : params[2];
    for (size_t k = 0; k < count; ++k) {
      auto is = next_line();
      expect_kind(is);
      std::string a, b, c;
      is >> a >> b >> c;
      out.push_back(from_hex(a));
      out.push_back(from_hex(b));
      out.push_back(from_hex(c));
    }
  } else if (kind == "cmpmask") {
    for (size_t k = 0; k < params[0]; ++k) {
      auto is = next_line();
      expect_kind(is);
      std::string r;
      is >> r;
      out.push_back(from_hex(r));
    }
  } else {  // mtriple / value: one line with params then hex words
    if (kind == "mtriple" && party != int(params[0]) && party != int(params[1]))
      return out;
    auto is = next_line();
    expect_kind(is);
    for (size_t i = 0; i < params.size(); ++i) {
      uint64_t p;
      is >> p;
      if (p != params[i]) throw ConfigError("dealer replay shape mismatch");
    }
    std::string word;
    while (is >> word) {
      if (word.rfind("label=", 0) == 0) continue;
      out.push_back(from_hex(word));
    }
  }
  return out;
}

std::vector<TripleShare> Dealer::triples(int party, size_t count) {
  auto w = fetch(party, "triple", {count}, "");
  std::vector<TripleShare> out(count);
  for (size_t k = 0; k < count; ++k)
    out[k] = TripleShare{w[3 * k], w[3 * k + 1], w[3 * k + 2]};
  return out;
}

std::vector<TripleShare> Dealer::pair_triples(int party, int pa, int pb, size_t count) {
  auto w = fetch(party, "ptriple", {uint64_t(pa), uint64_t(pb), count}, "");
  std::vector<TripleShare> out(w.size() / 3);
  for (size_t k = 0; k < out.size(); ++k)
    out[k] = TripleShare{w[3 * k], w[3 * k + 1], w[3 * k + 2]};
  return out;
}

std::vector<RingValue> Dealer::pair_matrix_triple(int party, int pa, int pb,
                                                  size_t m, size_t p, size_t d) {
  return fetch(party, "mtriple", {uint64_t(pa), uint64_t(pb), m, p, d}, "");
}

std::vector<RingValue> Dealer::compare_masks(int party, size_t count, int mask_bits) {
  return fetch(party, "cmpmask", {count, uint64_t(mask_bits)}, "");
}

std::vector<RingValue> Dealer::deal_uniform_matrix(int party, const std::string& label,
                                                   size_t rows, size_t cols,
                                                   double lo, double hi) {
  return fetch(party, "value",
               {rows, cols, encode(lo, fx_).raw, encode(hi, fx_).raw}, label);
}

DealerStats Dealer::stats() const {
  std::lock_guard<std::mutex> lk(mu_);
  return stats_;
}

std::vector<Dealer::Delivery> Dealer::take_deliveries() {
  std::lock_guard<std::mutex> lk(mu_);
  return std::move(deliveries_);
}

std::vector<RingValue> Dealer::sample_uniform(uint64_t seed, const std::string& label,
                                              size_t count, double lo, double hi,
                                              const FixedPointConfig& fx) {
  Prg prg(derive_seed(seed, "deal." + label));
  std::vector<RingValue> out(count);
  for (auto& v : out) v = encode(prg.next_real(lo, hi), fx);
  return out;
}

void Dealer::write_party_file(int party, const std::string& path) const {
  std::lock_guard<std::mutex> lk(mu_);
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write dealer file " + path);
  for (const auto& ev : events_) {
    const auto& w = ev.per_party[size_t(party)];
    if (w.empty()) continue;
    if (ev.kind == "triple" || ev.kind == "ptriple") {
      for (size_t k = 0; 3 * k + 2 < w.size(); ++k)
        f << ev.kind << ' ' << to_hex(w[3 * k]) << ' ' << to_hex(w[3 * k + 1])
          << ' ' << to_hex(w[3 * k + 2]) << '\n';
    } else if (ev.kind == "cmpmask") {
      for (RingValue v : w) f << "cmpmask " << to_hex(v) << '\n';
    } else {
      f << ev.kind;
      for (uint64_t p : ev.params) f << ' ' << p;
      if (!ev.label.empty()) f << " label=" << ev.label;
      for (RingValue v : w) f << ' ' << to_hex(v);
      f << '\n';
    }
  }
}

void Dealer::load_replay_files(const std::vector<std::string>& paths) {
  std::lock_guard<std::mutex> lk(mu_);
  if (int(paths.size()) != n_) throw ConfigError("need one dealer file per party");
  mode_ = DealerMode::Replay;
  replay_streams_.assign(size_t(n_), {});
  replay_cursor_.assign(size_t(n_), 0);
  for (int i = 0; i < n_; ++i) {
    std::ifstream f(paths[size_t(i)]);
    if (!f) throw ConfigError("cannot read dealer file " + paths[size_t(i)]);
    std::string line;
    while (std::getline(f, line))
      if (!line.empty()) replay_streams_[size_t(i)].push_back(line);
  }
}

}  // namespace ppkg
