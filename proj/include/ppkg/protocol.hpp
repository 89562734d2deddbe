#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ppkg/runtime.hpp"
#include "ppkg/shares.hpp"

namespace ppkg {

// ---- local primitives (zero communication rounds) ----

// Per-share truncation by `shift` bits. The leading share is rounded to
// nearest, the rest are floored; the reconstructed value then matches the
// plaintext rounded truncation up to one ulp (plus the standard rare
// wraparound of local truncation).
RingValue trunc_share(RingValue v, int shift, bool leader);
ShareVector trunc_shares(ShareVector s, int shift);

// LINEAR: alpha*a + b + beta with public alpha, beta. Integral alpha stays
// exact; fractional alpha costs one truncation.
ShareVector linear(const FixedPointConfig& fx, double alpha, const ShareVector& a,
                   const ShareVector& b, double beta);

ShareVector add(const ShareVector& a, const ShareVector& b);
ShareVector sub(const ShareVector& a, const ShareVector& b);
ShareVector scale_int(const ShareVector& a, int64_t k);
ShareVector scale_real(const FixedPointConfig& fx, const ShareVector& a, double alpha);
ShareVector add_public(const FixedPointConfig& fx, const ShareVector& a, double beta);

// Division of a sharing by a public positive integer; exact whenever the
// divisor divides the raw sum (true for all even fixed-point sums with m=2).
ShareVector divide_public_int(PartyCtx& ctx, const ShareVector& s, uint64_t m,
                              const std::string& label);

// ---- interactive primitives ----

// Elementwise Beaver multiplication; consumes one triple per element and
// opens exactly the two masked difference vectors.
ShareVector mul(PartyCtx& ctx, const ShareVector& a, const ShareVector& b,
                bool truncate = true);

// Shared-by-shared matrix product via the local + pairwise cross-share
// decomposition; consumes n(n-1) pair matrix triples in one open round.
ShareMatrix matmul(PartyCtx& ctx, const ShareMatrix& x, const ShareMatrix& w,
                   bool truncate = true);

// Elementwise square of a shared matrix: local squares plus the doubled
// cross products, n(n-1)/2 pair batches in one round.
ShareMatrix square_elems(PartyCtx& ctx, const ShareMatrix& z, bool truncate = true);

// Product of a plaintext m-row matrix held by `owner` with a shared matrix.
// Exact (no truncation) when the plain matrix holds raw integers, e.g.
// adjacency. All parties pass the public shape m.
ShareMatrix private_matmul(PartyCtx& ctx, int owner, const RingMatrix* mine,
                           const ShareMatrix& h, size_t m, bool truncate = false);

// Elementwise product with a plaintext vector held by `owner`.
ShareVector private_mul(PartyCtx& ctx, int owner, const std::vector<RingValue>* mine,
                        const ShareVector& h, size_t len, bool truncate = false);

// Goldschmidt division a/b given a public bound 2^e with b in [2^(e-1), 2^e).
// Newton iterations on the reciprocal of the normalized divisor, then a
// compensated rescale of a*w. `debug_divisors`, when given, lets the
// plaintext oracle veto an inconsistent declared bound.
ShareVector goldschmidt_div(PartyCtx& ctx, const ShareVector& a, const ShareVector& b,
                            int e, int iters = 15,
                            const std::vector<double>* debug_divisors = nullptr);

// Public comparison bits: bit_k = 1 iff Rec(a_k) >= Rec(b_k). Masked sign
// test: open r*(a-b) for dealer-issued random positive r. The bit (and the
// masked magnitude) become public by design.
std::vector<uint8_t> secure_compare(PartyCtx& ctx, const ShareVector& a,
                                    const ShareVector& b);

// Tournament argmax/argmin: public winner index, shared extreme value.
// Ties break toward the lowest index.
std::pair<size_t, ShareVector> argmax(PartyCtx& ctx, const ShareVector& v);
std::pair<size_t, ShareVector> argmin(PartyCtx& ctx, const ShareVector& v);

// ---- plaintext fixed-point kernels (oracle side) ----

RingMatrix plain_matmul(const RingMatrix& a, const RingMatrix& b, int trunc_shift);
RingMatrix plain_square_elems(const RingMatrix& z, int trunc_shift);

}  // namespace ppkg
