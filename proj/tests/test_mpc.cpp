#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ppkg/protocol.hpp"
#include "ppkg/runtime.hpp"
#include "ppkg/shares.hpp"
#include "test_util.hpp"

using namespace ppkg;

namespace {

const FixedPointConfig kFx;

RunOptions opts(int n, uint64_t seed) {
  RunOptions o;
  o.n = n;
  o.seed = seed;
  return o;
}

// Test-side sharing: every party derives the same sharing deterministically
// and keeps its slice, so unit tests of the arithmetic need no input rounds.
ShareVector deal(PartyCtx& ctx, const std::vector<RingValue>& xs, uint64_t tag) {
  Prg srng(derive_seed(0x5eed, "deal", tag));
  return share_vector(xs, ctx.n(), srng)[size_t(ctx.id())];
}

ShareMatrix deal_matrix(PartyCtx& ctx, const RingMatrix& x, uint64_t tag) {
  Prg srng(derive_seed(0x5eed, "dealm", tag));
  auto flat = share_vector(x.m, ctx.n(), srng)[size_t(ctx.id())];
  return ShareMatrix{ctx.id(), x.rows, x.cols, std::move(flat.v)};
}

std::vector<RingValue> rec(const std::vector<ShareVector>& sv) {
  return reconstruct_vector(sv);
}

}  // namespace

TEST_CASE("Shr then Rec is the identity, including boundary values") {
  Prg prg(41);
  std::vector<RingValue> vals{RingValue{0}, RingValue{1}, RingValue{uint64_t(-1)},
                              RingValue{uint64_t(1) << 63}};
  for (int i = 0; i < 10000; ++i) vals.push_back(prg.next_ring());
  Prg srng(42);
  for (RingValue v : vals) {
    for (int n : {2, 3, 4}) {
      auto shares = share_value(v, n, srng);
      CHECK(reconstruct(shares).raw == v.raw);
    }
  }
}

TEST_CASE("sharing a known value reconstructs exactly") {
  Prg srng(1);
  auto shares = share_value(encode(5.0, kFx), 2, srng);
  CHECK(decode(reconstruct(shares), kFx) == 5.0);

  auto zeros = share_value(RingValue{0}, 3, srng);
  RingValue sum{0};
  for (const auto& s : zeros) sum += s.value;
  CHECK(sum.raw == 0);
}

TEST_CASE("individual shares of a constant are uniform (chi-square)") {
  Prg srng(77);
  RingValue secret = encode(123.0, kFx);
  std::vector<uint64_t> hist0(64, 0), hist1(64, 0);
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    auto sh = share_value(secret, 2, srng);
    hist0[sh[0].value.raw >> 58]++;
    hist1[sh[1].value.raw >> 58]++;
  }
  CHECK(chi_square_stat(hist0, trials) < chi_square_q99(63));
  CHECK(chi_square_stat(hist1, trials) < chi_square_q99(63));
}

TEST_CASE("reconstruct rejects missing or duplicated parties") {
  Prg srng(2);
  auto shares = share_value(RingValue{99}, 3, srng);
  shares.pop_back();
  CHECK_THROWS_AS(reconstruct(shares), MissingShareError);
  shares.push_back(shares[0]);
  CHECK_THROWS_AS(reconstruct(shares), MissingShareError);
  CHECK_THROWS_AS(reconstruct({}), MissingShareError);
  CHECK_THROWS_AS(share_value(RingValue{1}, 1, srng), InvalidPartyCountError);
}

TEST_CASE("linear: identities and the plaintext oracle") {
  auto res = run_parties(opts(2, 11), [](PartyCtx& ctx) {
    std::vector<ShareVector> results;
    auto a = deal(ctx, {encode(1.25, kFx), encode(-3.0, kFx)}, 1);
    auto b = deal(ctx, {encode(0.5, kFx), encode(7.0, kFx)}, 2);
    results.push_back(linear(ctx.fx(), 1.0, a, b, 0.0));  // a + b
    auto zero = ShareVector::zeros(ctx.id(), 2);
    results.push_back(linear(ctx.fx(), 0.0, a, zero, 7.0));  // just beta
    results.push_back(linear(ctx.fx(), 2.5, a, b, 0.125));
    return results;
  });
  CHECK(res.transcript.party_message_count() == 0);

  auto get = [&](size_t idx) {
    std::vector<ShareVector> sv{res.outputs[0][idx], res.outputs[1][idx]};
    return rec(sv);
  };
  auto sum = get(0);
  CHECK(decode(sum[0], kFx) == doctest::Approx(1.75).epsilon(0));
  CHECK(decode(sum[1], kFx) == doctest::Approx(4.0).epsilon(0));
  auto beta = get(1);
  CHECK(decode(beta[0], kFx) == 7.0);
  CHECK(decode(beta[1], kFx) == 7.0);
  auto full = get(2);
  double tol = std::ldexp(1.0, 1 - kFx.frac_bits);
  CHECK(std::abs(decode(full[0], kFx) - (2.5 * 1.25 + 0.5 + 0.125)) <= tol);
  CHECK(std::abs(decode(full[1], kFx) - (2.5 * -3.0 + 7.0 + 0.125)) <= tol);
}

TEST_CASE("mul: small integers, the zero annihilator, and the oracle") {
  Prg vals(55);
  std::vector<RingValue> xs{encode(3.0, kFx), encode(0.0, kFx)};
  std::vector<RingValue> ys{encode(4.0, kFx), encode(251.5, kFx)};
  std::vector<double> px, py;
  for (int i = 0; i < 200; ++i) {
    px.push_back(vals.next_real(-256, 256));
    py.push_back(vals.next_real(-256, 256));
    xs.push_back(encode(px.back(), kFx));
    ys.push_back(encode(py.back(), kFx));
  }
  auto res = run_parties(opts(2, 12), [&](PartyCtx& ctx) {
    return mul(ctx, deal(ctx, xs, 1), deal(ctx, ys, 2));
  });
  auto prod = rec({res.outputs[0], res.outputs[1]});
  double tol = std::ldexp(1.0, 1 - kFx.frac_bits);
  CHECK(std::abs(decode(prod[0], kFx) - 12.0) <= tol);
  CHECK(std::abs(decode(prod[1], kFx)) <= tol);
  for (size_t i = 0; i < px.size(); ++i) {
    double want = decode(xs[i + 2], kFx) * decode(ys[i + 2], kFx);
    CHECK(std::abs(decode(prod[i + 2], kFx) - want) <= tol);
  }
  // exactly one triple consumed per element
  CHECK(res.dealer_stats.scalar_triples == xs.size());
}

TEST_CASE("mul respects the dealer triple budget") {
  RunOptions o = opts(2, 13);
  o.triple_budget = 4;
  CHECK_THROWS_AS(run_parties(o,
                              [](PartyCtx& ctx) {
                                std::vector<RingValue> xs(8, encode(1.0, kFx));
                                return mul(ctx, deal(ctx, xs, 1), deal(ctx, xs, 2));
                              }),
                  TripleExhaustedError);
}

TEST_CASE("mul mismatched lengths") {
  CHECK_THROWS_AS(run_parties(opts(2, 14),
                              [](PartyCtx& ctx) {
                                auto a = deal(ctx, {RingValue{1}}, 1);
                                auto b = deal(ctx, {RingValue{1}, RingValue{2}}, 2);
                                return mul(ctx, a, b);
                              }),
                  DimensionMismatchError);
}

TEST_CASE("opened Beaver masks are uniform given a fixed secret") {
  std::vector<RingValue> xs(2000, encode(7.0, kFx));
  std::vector<RingValue> ys(2000, encode(-3.0, kFx));
  auto res = run_parties(opts(2, 15), [&](PartyCtx& ctx) {
    return mul(ctx, deal(ctx, xs, 1), deal(ctx, ys, 2));
  });
  // reconstruct the opened e-vector from the two transcript halves
  std::vector<RingValue> p0, p1;
  for (const auto& m : res.transcript.messages()) {
    if (m.from_dealer || m.tag != "open.mul.0") continue;
    auto vals = unpack_rings(m.payload);
    auto& dst = m.from == 0 ? p0 : p1;
    dst.insert(dst.end(), vals.begin(), vals.end());
  }
  REQUIRE(p0.size() == xs.size());
  std::vector<uint64_t> hist(64, 0);
  for (size_t i = 0; i < p0.size(); ++i) hist[(p0[i] + p1[i]).raw >> 58]++;
  CHECK(chi_square_stat(hist, double(p0.size())) < chi_square_q99(63));
}

TEST_CASE("goldschmidt division: identities and accuracy") {
  std::vector<RingValue> as{encode(5.5, kFx), encode(0.0, kFx), encode(7.0, kFx)};
  std::vector<RingValue> bs{encode(5.5, kFx), encode(3.0, kFx), encode(2.0, kFx)};
  std::vector<double> bplain{5.5, 3.0, 2.0};
  auto res = run_parties(opts(2, 16), [&](PartyCtx& ctx) {
    std::vector<ShareVector> out;
    // one call per divisor bucket so each carries a tight public bound
    for (size_t i = 0; i < as.size(); ++i) {
      int e = int(std::floor(std::log2(bplain[i]))) + 1;
      ShareVector a = deal(ctx, {as[i]}, 100 + i);
      ShareVector b = deal(ctx, {bs[i]}, 200 + i);
      std::vector<double> dbg{bplain[i]};
      out.push_back(goldschmidt_div(ctx, a, b, e, 15, &dbg));
    }
    return out;
  });
  auto get = [&](size_t i) {
    return decode(rec({res.outputs[0][i], res.outputs[1][i]})[0], kFx);
  };
  CHECK(std::abs(get(0) - 1.0) <= std::ldexp(1.0, -14));
  CHECK(std::abs(get(1) - 0.0) <= std::ldexp(1.0, -14));
  CHECK(std::abs(get(2) - 3.5) <= 3.5 * std::ldexp(1.0, -14));
}

TEST_CASE("division accuracy over random declared-range inputs") {
  Prg vals(57);
  const int count = 300;
  std::vector<RingValue> as, bs;
  std::vector<double> bplain;
  std::vector<int> es;
  for (int i = 0; i < count; ++i) {
    double b = vals.next_real(0.5, 512.0);
    double q = vals.next_real(0.5, 32.0) * (vals.next_range(0, 1) ? 1 : -1);
    int e = int(std::floor(std::log2(b))) + 1;
    as.push_back(encode(q * b, kFx));
    bs.push_back(encode(b, kFx));
    bplain.push_back(decode(bs.back(), kFx));
    es.push_back(e);
  }
  // group by exponent so each call has a consistent public bound
  auto res = run_parties(opts(2, 17), [&](PartyCtx& ctx) {
    std::vector<ShareVector> outs;
    for (int e = -8; e <= 24; ++e) {
      std::vector<RingValue> ga, gb;
      std::vector<double> gdbg;
      for (int i = 0; i < count; ++i) {
        if (es[size_t(i)] != e) continue;
        ga.push_back(as[size_t(i)]);
        gb.push_back(bs[size_t(i)]);
        gdbg.push_back(bplain[size_t(i)]);
      }
      if (ga.empty()) continue;
      auto qa = deal(ctx, ga, 300 + uint64_t(e + 8));
      auto qb = deal(ctx, gb, 400 + uint64_t(e + 8));
      outs.push_back(goldschmidt_div(ctx, qa, qb, e, 15, &gdbg));
    }
    return outs;
  });
  size_t g = 0;
  for (int e = -8; e <= 24; ++e) {
    std::vector<size_t> members;
    for (int i = 0; i < count; ++i)
      if (es[size_t(i)] == e) members.push_back(size_t(i));
    if (members.empty()) continue;
    auto q = rec({res.outputs[0][g], res.outputs[1][g]});
    for (size_t k = 0; k < members.size(); ++k) {
      double want = decode(as[members[k]], kFx) / decode(bs[members[k]], kFx);
      double got = decode(q[k], kFx);
      CHECK(std::abs(got - want) <= std::abs(want) * std::ldexp(1.0, -14));
    }
    ++g;
  }
}

TEST_CASE("division guards: exponent limits and oracle veto") {
  CHECK_THROWS_AS(run_parties(opts(2, 18),
                              [](PartyCtx& ctx) {
                                auto a = deal(ctx, {encode(1.0, kFx)}, 1);
                                auto b = deal(ctx, {encode(1.0, kFx)}, 2);
                                return goldschmidt_div(ctx, a, b, 30);
                              }),
                  DivisorRangeError);
  CHECK_THROWS_AS(run_parties(opts(2, 19),
                              [](PartyCtx& ctx) {
                                auto a = deal(ctx, {encode(1.0, kFx)}, 1);
                                auto b = deal(ctx, {encode(3.0, kFx)}, 2);
                                std::vector<double> dbg{3.0};  // not in [1,2)
                                return goldschmidt_div(ctx, a, b, 1, 15, &dbg);
                              }),
                  BadNormalizationError);
}

TEST_CASE("secure comparison: ties, basics, exhaustive oracle") {
  std::vector<RingValue> av, bv;
  std::vector<uint8_t> want;
  av.push_back(encode(2.5, kFx));
  bv.push_back(encode(2.5, kFx));
  want.push_back(1);  // d = 0 counts as >=
  av.push_back(encode(5.0, kFx));
  bv.push_back(encode(3.0, kFx));
  want.push_back(1);
  for (int x = -2; x <= 2; ++x)
    for (int y = -2; y <= 2; ++y) {
      av.push_back(encode(double(x), kFx));
      bv.push_back(encode(double(y), kFx));
      want.push_back(x >= y ? 1 : 0);
    }
  auto res = run_parties(opts(2, 20), [&](PartyCtx& ctx) {
    return secure_compare(ctx, deal(ctx, av, 1), deal(ctx, bv, 2));
  });
  for (size_t i = 0; i < want.size(); ++i) {
    CHECK(res.outputs[0][i] == want[i]);
    CHECK(res.outputs[1][i] == want[i]);  // the bit is public: both agree
  }
}

TEST_CASE("comparison rejects configurations that could overflow") {
  RunOptions o = opts(2, 21);
  o.compare_mask_bits = 30;  // 1 + 20 + 16 + 30 >= 63
  CHECK_THROWS_AS(run_parties(o,
                              [](PartyCtx& ctx) {
                                auto a = deal(ctx, {encode(1.0, kFx)}, 1);
                                auto b = deal(ctx, {encode(2.0, kFx)}, 2);
                                return secure_compare(ctx, a, b);
                              }),
                  MagnitudeOverflowError);
}

TEST_CASE("argmax: singleton, basic, exhaustive with lowest-index ties") {
  auto res = run_parties(opts(2, 22), [](PartyCtx& ctx) {
    std::vector<std::pair<size_t, ShareVector>> out;
    out.push_back(argmax(ctx, deal(ctx, {encode(-1.5, kFx)}, 1)));
    out.push_back(argmax(ctx, deal(ctx, {encode(1.0, kFx), encode(5.0, kFx),
                                         encode(3.0, kFx)}, 2)));
    return out;
  });
  CHECK(res.outputs[0][0].first == 0);
  CHECK(decode(rec({res.outputs[0][0].second, res.outputs[1][0].second})[0], kFx) ==
        -1.5);
  CHECK(res.outputs[0][1].first == 1);
  CHECK(decode(rec({res.outputs[0][1].second, res.outputs[1][1].second})[0], kFx) ==
        5.0);

  // every vector of length <= 4 over {0,1,2}
  std::vector<std::vector<double>> cases;
  for (int len = 1; len <= 4; ++len) {
    size_t total = 1;
    for (int i = 0; i < len; ++i) total *= 3;
    for (size_t code = 0; code < total; ++code) {
      std::vector<double> v;
      size_t c = code;
      for (int i = 0; i < len; ++i) {
        v.push_back(double(c % 3));
        c /= 3;
      }
      cases.push_back(std::move(v));
    }
  }
  auto res2 = run_parties(opts(2, 23), [&](PartyCtx& ctx) {
    std::vector<size_t> idx;
    uint64_t tag = 1000;
    for (const auto& v : cases) {
      std::vector<RingValue> enc;
      for (double x : v) enc.push_back(encode(x, kFx));
      idx.push_back(argmax(ctx, deal(ctx, enc, tag++)).first);
    }
    return idx;
  });
  for (size_t i = 0; i < cases.size(); ++i) {
    size_t want = 0;
    for (size_t k = 1; k < cases[i].size(); ++k)
      if (cases[i][k] > cases[i][want]) want = k;
    CHECK(res2.outputs[0][i] == want);
  }
}

TEST_CASE("argmax on an empty vector") {
  CHECK_THROWS_AS(run_parties(opts(2, 24),
                              [](PartyCtx& ctx) {
                                return argmax(ctx, ShareVector::zeros(ctx.id(), 0));
                              }),
                  EmptyVectorError);
}

TEST_CASE("shared matrix product against the plaintext kernel") {
  Prg vals(60);
  RingMatrix x(3, 2), w(2, 4);
  for (auto& v : x.m) v = encode(vals.next_real(-2, 2), kFx);
  for (auto& v : w.m) v = encode(vals.next_real(-2, 2), kFx);
  auto res = run_parties(opts(2, 25), [&](PartyCtx& ctx) {
    return matmul(ctx, deal_matrix(ctx, x, 1), deal_matrix(ctx, w, 2));
  });
  auto want = plain_matmul(x, w, kFx.frac_bits);
  auto got = reconstruct_matrix({res.outputs[0], res.outputs[1]});
  for (size_t k = 0; k < want.m.size(); ++k)
    CHECK(std::abs(decode(got[k], kFx) - decode(want.m[k], kFx)) <=
          std::ldexp(1.0, 2 - kFx.frac_bits));
  // local + n(n-1) pairwise cross batches
  CHECK(res.dealer_stats.pair_matrix_batches == 2);
}

TEST_CASE("elementwise square with cross terms") {
  Prg vals(61);
  RingMatrix z(2, 3);
  for (auto& v : z.m) v = encode(vals.next_real(-3, 3), kFx);
  auto res = run_parties(opts(2, 26), [&](PartyCtx& ctx) {
    return square_elems(ctx, deal_matrix(ctx, z, 1));
  });
  auto got = reconstruct_matrix({res.outputs[0], res.outputs[1]});
  for (size_t k = 0; k < z.m.size(); ++k) {
    double zv = decode(z.m[k], kFx);
    CHECK(std::abs(decode(got[k], kFx) - zv * zv) <= std::ldexp(1.0, 2 - kFx.frac_bits));
  }
  CHECK(res.dealer_stats.pair_vector_batches == 1);  // n(n-1)/2 for n=2
}

TEST_CASE("private integer matrix times shared matrix is exact") {
  Prg vals(62);
  RingMatrix adj(4, 4);  // 0/1 integers in raw form
  for (auto& v : adj.m) v = RingValue{vals.next_range(0, 1)};
  RingMatrix h(4, 2);
  for (auto& v : h.m) v = encode(vals.next_real(-2, 2), kFx);
  auto res = run_parties(opts(2, 27), [&](PartyCtx& ctx) {
    const RingMatrix* mine = ctx.id() == 1 ? &adj : nullptr;
    return private_matmul(ctx, 1, mine, deal_matrix(ctx, h, 1), adj.rows);
  });
  auto want = plain_matmul(adj, h, 0);  // integer weights: no truncation at all
  auto got = reconstruct_matrix({res.outputs[0], res.outputs[1]});
  for (size_t k = 0; k < want.m.size(); ++k) CHECK(got[k].raw == want.m[k].raw);
}

TEST_CASE("public integer division of a sharing is exact when it divides") {
  auto res = run_parties(opts(2, 28), [](PartyCtx& ctx) {
    auto s = deal(ctx, {encode(38.0, kFx), encode(-12.0, kFx)}, 1);
    return divide_public_int(ctx, s, 2, "avg");
  });
  auto got = rec({res.outputs[0], res.outputs[1]});
  CHECK(decode(got[0], kFx) == 19.0);
  CHECK(decode(got[1], kFx) == -6.0);
}

TEST_CASE("three-party multiplication also tracks the oracle") {
  Prg vals(63);
  std::vector<RingValue> xs, ys;
  for (int i = 0; i < 50; ++i) {
    xs.push_back(encode(vals.next_real(-8, 8), kFx));
    ys.push_back(encode(vals.next_real(-8, 8), kFx));
  }
  auto res = run_parties(opts(3, 29), [&](PartyCtx& ctx) {
    return mul(ctx, deal(ctx, xs, 1), deal(ctx, ys, 2));
  });
  auto got = rec({res.outputs[0], res.outputs[1], res.outputs[2]});
  for (size_t i = 0; i < xs.size(); ++i) {
    double want = decode(xs[i], kFx) * decode(ys[i], kFx);
    // n-party local truncation: up to n-1 dropped fractional carries
    CHECK(std::abs(decode(got[i], kFx) - want) <= std::ldexp(1.0, 2 - kFx.frac_bits));
  }
}
