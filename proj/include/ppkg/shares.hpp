#pragma once

#include <cstdint>
#include <vector>

#include "ppkg/errors.hpp"
#include "ppkg/fixed_point.hpp"
#include "ppkg/rng.hpp"

namespace ppkg {

// One party's additive share of a secret ring value.
struct Share {
  int owner = 0;
  RingValue value;
};

struct ShareVector {
  int owner = 0;
  std::vector<RingValue> v;

  size_t size() const { return v.size(); }
  static ShareVector zeros(int owner, size_t len) {
    return ShareVector{owner, std::vector<RingValue>(len)};
  }
};

struct ShareMatrix {
  int owner = 0;
  size_t rows = 0, cols = 0;
  std::vector<RingValue> m;

  static ShareMatrix zeros(int owner, size_t rows, size_t cols) {
    return ShareMatrix{owner, rows, cols, std::vector<RingValue>(rows * cols)};
  }
  RingValue& at(size_t r, size_t c) { return m[r * cols + c]; }
  RingValue at(size_t r, size_t c) const { return m[r * cols + c]; }
  ShareVector row(size_t r) const {
    return ShareVector{owner,
                       {m.begin() + long(r * cols), m.begin() + long((r + 1) * cols)}};
  }
};

// Plaintext ring matrix; the oracles and party-local graph data use this.
struct RingMatrix {
  size_t rows = 0, cols = 0;
  std::vector<RingValue> m;

  RingMatrix() = default;
  RingMatrix(size_t r, size_t c) : rows(r), cols(c), m(r * c) {}
  RingValue& at(size_t r, size_t c) { return m[r * cols + c]; }
  RingValue at(size_t r, size_t c) const { return m[r * cols + c]; }
};

// Shr: split x into n uniformly random shares summing to x.
inline std::vector<Share> share_value(RingValue x, int n, Prg& rng) {
  if (n < 2) throw InvalidPartyCountError("share: need n >= 2");
  std::vector<Share> shares(static_cast<size_t>(n));
  RingValue acc{0};
  for (int i = 1; i < n; ++i) {
    shares[size_t(i)] = Share{i, rng.next_ring()};
    acc += shares[size_t(i)].value;
  }
  shares[0] = Share{0, x - acc};
  return shares;
}

// Rec: modular sum, requiring exactly one share per party index.
inline RingValue reconstruct(const std::vector<Share>& shares) {
  if (shares.empty()) throw MissingShareError("reconstruct: no shares");
  size_t n = shares.size();
  std::vector<bool> seen(n, false);
  RingValue acc{0};
  for (const auto& s : shares) {
    if (s.owner < 0 || size_t(s.owner) >= n || seen[size_t(s.owner)])
      throw MissingShareError("reconstruct: party index missing or duplicated");
    seen[size_t(s.owner)] = true;
    acc += s.value;
  }
  return acc;
}

inline std::vector<ShareVector> share_vector(const std::vector<RingValue>& xs,
                                             int n, Prg& rng) {
  if (n < 2) throw InvalidPartyCountError("share: need n >= 2");
  std::vector<ShareVector> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[size_t(i)] = ShareVector::zeros(i, xs.size());
  for (size_t k = 0; k < xs.size(); ++k) {
    RingValue acc{0};
    for (int i = 1; i < n; ++i) {
      RingValue r = rng.next_ring();
      out[size_t(i)].v[k] = r;
      acc += r;
    }
    out[0].v[k] = xs[k] - acc;
  }
  return out;
}

inline std::vector<RingValue> reconstruct_vector(const std::vector<ShareVector>& shares) {
  if (shares.empty()) throw MissingShareError("reconstruct: no shares");
  size_t n = shares.size(), len = shares[0].size();
  std::vector<bool> seen(n, false);
  std::vector<RingValue> acc(len);
  for (const auto& s : shares) {
    if (s.owner < 0 || size_t(s.owner) >= n || seen[size_t(s.owner)])
      throw MissingShareError("reconstruct: party index missing or duplicated");
    if (s.size() != len) throw DimensionMismatchError("share vector length mismatch");
    seen[size_t(s.owner)] = true;
    for (size_t k = 0; k < len; ++k) acc[k] += s.v[k];
  }
  return acc;
}

inline std::vector<RingValue> reconstruct_matrix(const std::vector<ShareMatrix>& shares) {
  std::vector<ShareVector> flat;
  flat.reserve(shares.size());
  for (const auto& s : shares) flat.push_back(ShareVector{s.owner, s.m});
  return reconstruct_vector(flat);
}

// A publicly known vector held as a valid sharing: the leader keeps the
// value, everyone else holds zero. No communication needed.
inline ShareVector share_of_public(int me, const std::vector<RingValue>& pub) {
  ShareVector out = ShareVector::zeros(me, pub.size());
  if (me == 0) out.v = pub;
  return out;
}

// A private vector entering share arithmetic without communication: the
// holder keeps its plaintext, everyone else holds zero.
inline ShareVector share_of_private(int me, int holder, size_t len,
                                    const std::vector<RingValue>* values) {
  ShareVector out = ShareVector::zeros(me, len);
  if (me == holder) {
    if (!values || values->size() != len)
      throw DimensionMismatchError("share_of_private: holder must supply values");
    out.v = *values;
  }
  return out;
}

}  // namespace ppkg
