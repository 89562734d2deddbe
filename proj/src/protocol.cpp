#include "ppkg/protocol.hpp"

#include <cmath>

namespace ppkg {

RingValue trunc_share(RingValue v, int shift, bool leader) {
  if (shift <= 0) return arith_shift(v, shift);
  if (leader) return truncate_rounded(v, shift);
  return arith_shift(v, shift);
}

ShareVector trunc_shares(ShareVector s, int shift) {
  bool leader = s.owner == 0;
  for (auto& v : s.v) v = trunc_share(v, shift, leader);
  return s;
}

static bool integral(double x) { return x == std::floor(x) && std::abs(x) < 1e15; }

ShareVector linear(const FixedPointConfig& fx, double alpha, const ShareVector& a,
                   const ShareVector& b, double beta) {
  if (a.size() != b.size() || a.owner != b.owner)
    throw DimensionMismatchError("linear: operand mismatch");
  ShareVector out = ShareVector::zeros(a.owner, a.size());
  if (integral(alpha)) {
    for (size_t k = 0; k < a.size(); ++k)
      out.v[k] = ppkg::scale_int(a.v[k], int64_t(alpha)) + b.v[k];
  } else {
    RingValue ar = encode(alpha, fx);
    bool leader = a.owner == 0;
    for (size_t k = 0; k < a.size(); ++k)
      out.v[k] = trunc_share(ar * a.v[k], fx.frac_bits, leader) + b.v[k];
  }
  if (a.owner == 0 && beta != 0.0) {
    RingValue br = encode(beta, fx);
    for (auto& v : out.v) v += br;
  }
  return out;
}

ShareVector add(const ShareVector& a, const ShareVector& b) {
  if (a.size() != b.size() || a.owner != b.owner)
    throw DimensionMismatchError("add: operand mismatch");
  ShareVector out = a;
  for (size_t k = 0; k < a.size(); ++k) out.v[k] += b.v[k];
  return out;
}

ShareVector sub(const ShareVector& a, const ShareVector& b) {
  if (a.size() != b.size() || a.owner != b.owner)
    throw DimensionMismatchError("sub: operand mismatch");
  ShareVector out = a;
  for (size_t k = 0; k < a.size(); ++k) out.v[k] -= b.v[k];
  return out;
}

ShareVector scale_int(const ShareVector& a, int64_t k) {
  ShareVector out = a;
  for (auto& v : out.v) v = ppkg::scale_int(v, k);
  return out;
}

ShareVector scale_real(const FixedPointConfig& fx, const ShareVector& a, double alpha) {
  if (integral(alpha)) return scale_int(a, int64_t(alpha));
  ShareVector out = a;
  RingValue ar = encode(alpha, fx);
  bool leader = a.owner == 0;
  for (auto& v : out.v) v = trunc_share(ar * v, fx.frac_bits, leader);
  return out;
}

ShareVector add_public(const FixedPointConfig& fx, const ShareVector& a, double beta) {
  ShareVector out = a;
  if (a.owner == 0) {
    RingValue br = encode(beta, fx);
    for (auto& v : out.v) v += br;
  }
  return out;
}

static RingValue floor_div_signed(RingValue v, uint64_t m) {
  __int128 x = v.as_signed();
  __int128 d = __int128(m);
  __int128 q = x / d;
  if (x % d != 0 && x < 0) --q;
  return RingValue{uint64_t(int64_t(q))};
}

ShareVector divide_public_int(PartyCtx& ctx, const ShareVector& s, uint64_t m,
                              const std::string& label) {
  if (m == 0) throw DivisorRangeError("public divisor is zero");
  ShareVector out = s;
  if (m == 1) return out;
  bool leader = s.owner == 0;
  for (auto& v : out.v) {
    if (leader) v += RingValue{m - 1};
    v = floor_div_signed(v, m);
  }
  ctx.record_open(OpenKind::PublicDivisor, label + "/" + std::to_string(m));
  return out;
}

ShareVector mul(PartyCtx& ctx, const ShareVector& a, const ShareVector& b,
                bool truncate) {
  if (a.size() != b.size())
    throw DimensionMismatchError("mul: length mismatch");
  size_t len = a.size();
  auto triples = ctx.dealer().triples(ctx.id(), len);
  std::vector<RingValue> e(len), d(len);
  for (size_t k = 0; k < len; ++k) {
    e[k] = a.v[k] - triples[k].a;
    d[k] = b.v[k] - triples[k].b;
  }
  auto opened = ctx.open_batch(OpenKind::BeaverMask, "mul", {e, d});
  const auto& eo = opened[0];
  const auto& do_ = opened[1];
  ShareVector c = ShareVector::zeros(ctx.id(), len);
  for (size_t k = 0; k < len; ++k) {
    c.v[k] = triples[k].c + eo[k] * triples[k].b + do_[k] * triples[k].a;
    if (ctx.leader()) c.v[k] += eo[k] * do_[k];
  }
  if (truncate) c = trunc_shares(std::move(c), ctx.fx().frac_bits);
  return c;
}

// ---- pairwise cross-share products, batched into one open round ----

namespace {

struct PairJob {
  bool is_matmul = false;
  int pa = 0, pb = 0;
  size_t m = 0, p = 0, d = 0, len = 0;
  const std::vector<RingValue>* a_plain = nullptr;  // set iff me == pa
  const std::vector<RingValue>* b_plain = nullptr;  // set iff me == pb
  std::vector<RingValue> tri;     // my dealer halves (empty for bystander)
  std::vector<RingValue> e_half;  // my half of A - TA
  std::vector<RingValue> d_half;  // my half of B - TB
};

// Raw m*p by p*d product of plain ring matrices.
std::vector<RingValue> raw_matmul(const std::vector<RingValue>& a,
                                  const std::vector<RingValue>& b, size_t m,
                                  size_t p, size_t d) {
  std::vector<RingValue> c(m * d, RingValue{0});
  for (size_t r = 0; r < m; ++r)
    for (size_t k = 0; k < p; ++k) {
      RingValue ark = a[r * p + k];
      if (ark.raw == 0) continue;
      for (size_t j = 0; j < d; ++j) c[r * d + j] += ark * b[k * d + j];
    }
  return c;
}

class PairOps {
 public:
  explicit PairOps(PartyCtx& ctx) : ctx_(ctx) {}

  size_t add_matmul(int pa, int pb, const std::vector<RingValue>* a_plain,
                    const std::vector<RingValue>* b_plain, size_t m, size_t p,
                    size_t d) {
    PairJob job;
    job.is_matmul = true;
    job.pa = pa;
    job.pb = pb;
    job.m = m;
    job.p = p;
    job.d = d;
    job.a_plain = a_plain;
    job.b_plain = b_plain;
    job.tri = ctx_.dealer().pair_matrix_triple(ctx_.id(), pa, pb, m, p, d);
    prepare(job, m * p, p * d);
    jobs_.push_back(std::move(job));
    return jobs_.size() - 1;
  }

  size_t add_elementwise(int pa, int pb, const std::vector<RingValue>* a_plain,
                         const std::vector<RingValue>* b_plain, size_t len) {
    PairJob job;
    job.pa = pa;
    job.pb = pb;
    job.len = len;
    job.a_plain = a_plain;
    job.b_plain = b_plain;
    auto ts = ctx_.dealer().pair_triples(ctx_.id(), pa, pb, len);
    job.tri.reserve(ts.size() * 3);
    // regroup as [A... B... C...] to share the matmul code path
    for (const auto& t : ts) job.tri.push_back(t.a);
    for (const auto& t : ts) job.tri.push_back(t.b);
    for (const auto& t : ts) job.tri.push_back(t.c);
    prepare(job, len, len);
    jobs_.push_back(std::move(job));
    return jobs_.size() - 1;
  }

  // One exchange round: swap masked halves within every pair I belong to.
  void run(const std::string& label) {
    std::vector<Message> out;
    for (size_t j = 0; j < jobs_.size(); ++j) {
      auto& job = jobs_[j];
      int me = ctx_.id();
      if (me != job.pa && me != job.pb) continue;
      int partner = me == job.pa ? job.pb : job.pa;
      out.push_back(ctx_.make(partner, tag(label, j, "e"), pack_rings(job.e_half)));
      out.push_back(ctx_.make(partner, tag(label, j, "d"), pack_rings(job.d_half)));
    }
    auto inbox = ctx_.exchange(std::move(out));
    ctx_.record_open(OpenKind::BeaverMask, label);
    results_.resize(jobs_.size());
    for (size_t j = 0; j < jobs_.size(); ++j) {
      auto& job = jobs_[j];
      int me = ctx_.id();
      size_t out_len = job.is_matmul ? job.m * job.d : job.len;
      if (me != job.pa && me != job.pb) {
        results_[j].assign(out_len, RingValue{0});
        continue;
      }
      int partner = me == job.pa ? job.pb : job.pa;
      auto e_other = unpack_rings(require_msg(inbox, partner, tag(label, j, "e")).payload);
      auto d_other = unpack_rings(require_msg(inbox, partner, tag(label, j, "d")).payload);
      std::vector<RingValue> e_open(job.e_half.size()), d_open(job.d_half.size());
      for (size_t k = 0; k < e_open.size(); ++k) e_open[k] = job.e_half[k] + e_other[k];
      for (size_t k = 0; k < d_open.size(); ++k) d_open[k] = job.d_half[k] + d_other[k];

      size_t na = e_open.size(), nb = d_open.size();
      std::vector<RingValue> ta(job.tri.begin(), job.tri.begin() + long(na));
      std::vector<RingValue> tb(job.tri.begin() + long(na),
                                job.tri.begin() + long(na + nb));
      std::vector<RingValue> tc(job.tri.begin() + long(na + nb), job.tri.end());
      std::vector<RingValue> res(out_len);
      if (job.is_matmul) {
        auto e_tb = raw_matmul(e_open, tb, job.m, job.p, job.d);
        auto ta_d = raw_matmul(ta, d_open, job.m, job.p, job.d);
        for (size_t k = 0; k < out_len; ++k) res[k] = tc[k] + e_tb[k] + ta_d[k];
        if (me == job.pa) {
          auto ed = raw_matmul(e_open, d_open, job.m, job.p, job.d);
          for (size_t k = 0; k < out_len; ++k) res[k] += ed[k];
        }
      } else {
        for (size_t k = 0; k < out_len; ++k) {
          res[k] = tc[k] + e_open[k] * tb[k] + ta[k] * d_open[k];
          if (me == job.pa) res[k] += e_open[k] * d_open[k];
        }
      }
      results_[j] = std::move(res);
    }
  }

  const std::vector<RingValue>& result(size_t idx) const { return results_[idx]; }

 private:
  static std::string tag(const std::string& label, size_t j, const char* part) {
    return label + "." + std::to_string(j) + "." + part;
  }

  void prepare(PairJob& job, size_t na, size_t nb) {
    int me = ctx_.id();
    if (me != job.pa && me != job.pb) return;
    job.e_half.assign(na, RingValue{0});
    job.d_half.assign(nb, RingValue{0});
    for (size_t k = 0; k < na; ++k) job.e_half[k] = -job.tri[k];
    for (size_t k = 0; k < nb; ++k) job.d_half[k] = -job.tri[na + k];
    if (me == job.pa) {
      if (!job.a_plain || job.a_plain->size() != na)
        throw DimensionMismatchError("pair product: bad left operand");
      for (size_t k = 0; k < na; ++k) job.e_half[k] += (*job.a_plain)[k];
    } else {
      if (!job.b_plain || job.b_plain->size() != nb)
        throw DimensionMismatchError("pair product: bad right operand");
      for (size_t k = 0; k < nb; ++k) job.d_half[k] += (*job.b_plain)[k];
    }
  }

  PartyCtx& ctx_;
  std::vector<PairJob> jobs_;
  std::vector<std::vector<RingValue>> results_;
};

}  // namespace

ShareMatrix matmul(PartyCtx& ctx, const ShareMatrix& x, const ShareMatrix& w,
                   bool truncate) {
  if (x.cols != w.rows) throw DimensionMismatchError("matmul: inner dims differ");
  int me = ctx.id(), n = ctx.n();
  PairOps po(ctx);
  std::vector<size_t> jobs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      jobs.push_back(po.add_matmul(i, j, i == me ? &x.m : nullptr,
                                   j == me ? &w.m : nullptr, x.rows, x.cols, w.cols));
    }
  po.run("xw");
  ShareMatrix z = ShareMatrix::zeros(me, x.rows, w.cols);
  z.m = raw_matmul(x.m, w.m, x.rows, x.cols, w.cols);  // my local term
  for (size_t j : jobs) {
    const auto& r = po.result(j);
    for (size_t k = 0; k < z.m.size(); ++k) z.m[k] += r[k];
  }
  if (truncate) {
    bool leader = me == 0;
    for (auto& v : z.m) v = trunc_share(v, ctx.fx().frac_bits, leader);
  }
  return z;
}

ShareMatrix square_elems(PartyCtx& ctx, const ShareMatrix& z, bool truncate) {
  int me = ctx.id(), n = ctx.n();
  size_t len = z.m.size();
  PairOps po(ctx);
  std::vector<size_t> jobs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      jobs.push_back(po.add_elementwise(i, j, i == me ? &z.m : nullptr,
                                        j == me ? &z.m : nullptr, len));
  po.run("zsq");
  ShareMatrix out = ShareMatrix::zeros(me, z.rows, z.cols);
  for (size_t k = 0; k < len; ++k) out.m[k] = z.m[k] * z.m[k];  // local square
  for (size_t j : jobs) {
    const auto& r = po.result(j);
    for (size_t k = 0; k < len; ++k) out.m[k] += ppkg::scale_int(r[k], 2);
  }
  if (truncate) {
    bool leader = me == 0;
    for (auto& v : out.m) v = trunc_share(v, ctx.fx().frac_bits, leader);
  }
  return out;
}

ShareMatrix private_matmul(PartyCtx& ctx, int owner, const RingMatrix* mine,
                           const ShareMatrix& h, size_t m, bool truncate) {
  int me = ctx.id(), n = ctx.n();
  size_t p = h.rows;
  if (me == owner &&
      (!mine || mine->rows != m || mine->cols != p))
    throw DimensionMismatchError("private_matmul: owner matrix shape mismatch");

  PairOps po(ctx);
  std::vector<size_t> jobs;
  for (int j = 0; j < n; ++j) {
    if (j == owner) continue;
    jobs.push_back(po.add_matmul(owner, j, me == owner ? &mine->m : nullptr,
                                 j == me ? &h.m : nullptr, m, p, h.cols));
  }
  po.run("pmm");
  ShareMatrix z = ShareMatrix::zeros(me, m, h.cols);
  if (me == owner) z.m = raw_matmul(mine->m, h.m, m, p, h.cols);
  for (size_t j : jobs) {
    const auto& r = po.result(j);
    for (size_t k = 0; k < z.m.size(); ++k) z.m[k] += r[k];
  }
  if (truncate) {
    bool leader = me == 0;
    for (auto& v : z.m) v = trunc_share(v, ctx.fx().frac_bits, leader);
  }
  return z;
}

ShareVector private_mul(PartyCtx& ctx, int owner, const std::vector<RingValue>* mine,
                        const ShareVector& h, size_t len, bool truncate) {
  if (h.size() != len) throw DimensionMismatchError("private_mul: length mismatch");
  int me = ctx.id(), n = ctx.n();
  PairOps po(ctx);
  std::vector<size_t> jobs;
  for (int j = 0; j < n; ++j) {
    if (j == owner) continue;
    jobs.push_back(po.add_elementwise(owner, j, me == owner ? mine : nullptr,
                                      j == me ? &h.v : nullptr, len));
  }
  po.run("pmul");
  ShareVector out = ShareVector::zeros(me, len);
  if (me == owner)
    for (size_t k = 0; k < len; ++k) out.v[k] = (*mine)[k] * h.v[k];
  for (size_t j : jobs) {
    const auto& r = po.result(j);
    for (size_t k = 0; k < len; ++k) out.v[k] += r[k];
  }
  if (truncate) out = trunc_shares(std::move(out), ctx.fx().frac_bits);
  return out;
}

static ShareVector mul_shift(PartyCtx& ctx, const ShareVector& a, const ShareVector& b,
                             int shift) {
  ShareVector c = mul(ctx, a, b, /*truncate=*/false);
  if (shift != 0) c = trunc_shares(std::move(c), shift);
  return c;
}

ShareVector goldschmidt_div(PartyCtx& ctx, const ShareVector& a, const ShareVector& b,
                            int e, int iters,
                            const std::vector<double>* debug_divisors) {
  if (a.size() != b.size()) throw DimensionMismatchError("div: length mismatch");
  const auto& opt = ctx.options();
  if (e < opt.div_exp_min || e > opt.div_exp_max)
    throw DivisorRangeError("div: exponent outside configured limits");
  if (debug_divisors) {
    for (double bv : *debug_divisors)
      if (!(bv >= std::ldexp(1.0, e - 1) && bv < std::ldexp(1.0, e)))
        throw BadNormalizationError("div: divisor outside declared bound");
  }
  const auto& fx = ctx.fx();
  int f = fx.frac_bits;

  ShareVector bhat = trunc_shares(b, e);
  // w0 = 2.9142 - 2*bhat, then Newton: w <- w*(2 - bhat*w)
  ShareVector w = linear(fx, -2.0, bhat, ShareVector::zeros(ctx.id(), b.size()), 2.9142);
  for (int it = 0; it < iters; ++it) {
    ShareVector t = mul_shift(ctx, bhat, w, f);
    ShareVector y = add_public(fx, scale_int(t, -1), 2.0);
    w = mul_shift(ctx, w, y, f);
  }
  // q = (a*w) / 2^e, then one compensated correction q += (a - q*b)*w / 2^e
  ShareVector q = mul_shift(ctx, a, w, f + e);
  ShareVector p = mul_shift(ctx, q, b, f);
  ShareVector r = sub(a, p);
  ShareVector c = mul_shift(ctx, r, w, f + e);
  return add(q, c);
}

std::vector<uint8_t> secure_compare(PartyCtx& ctx, const ShareVector& a,
                                    const ShareVector& b) {
  if (a.size() != b.size()) throw DimensionMismatchError("compare: length mismatch");
  const auto& fx = ctx.fx();
  int s = ctx.options().compare_mask_bits;
  double max_bits = 1.0 + std::log2(fx.magnitude_bound) + fx.frac_bits + s;
  if (max_bits >= 63.0)
    throw MagnitudeOverflowError("compare: |d|*r may exceed the signed range");

  ShareVector d = sub(a, b);
  auto masks = ctx.dealer().compare_masks(ctx.id(), d.size(), s);
  ShareVector r{ctx.id(), std::move(masks)};
  ShareVector rd = mul(ctx, d, r, /*truncate=*/false);
  auto opened = ctx.open(OpenKind::ComparisonBit, "cmp", rd.v);
  std::vector<uint8_t> bits(d.size());
  for (size_t k = 0; k < bits.size(); ++k)
    bits[k] = opened[k].as_signed() >= 0 ? 1 : 0;
  return bits;
}

static std::pair<size_t, ShareVector> tournament(PartyCtx& ctx, const ShareVector& v,
                                                 bool want_max) {
  if (v.size() == 0) throw EmptyVectorError("argmax/argmin on empty vector");
  std::vector<size_t> active(v.size());
  for (size_t i = 0; i < v.size(); ++i) active[i] = i;
  std::vector<RingValue> vals = v.v;

  while (active.size() > 1) {
    size_t pairs = active.size() / 2;
    ShareVector lo = ShareVector::zeros(v.owner, pairs);
    ShareVector hi = ShareVector::zeros(v.owner, pairs);
    for (size_t k = 0; k < pairs; ++k) {
      lo.v[k] = vals[active[2 * k]];
      hi.v[k] = vals[active[2 * k + 1]];
    }
    // keep-low iff low >= high (max) / high >= low (min); ties keep the
    // lower index either way
    auto bits = want_max ? secure_compare(ctx, lo, hi) : secure_compare(ctx, hi, lo);
    std::vector<size_t> next;
    std::vector<RingValue> next_vals;
    next.reserve(pairs + 1);
    for (size_t k = 0; k < pairs; ++k) {
      size_t win = bits[k] ? active[2 * k] : active[2 * k + 1];
      next.push_back(win);
      next_vals.push_back(bits[k] ? lo.v[k] : hi.v[k]);
    }
    if (active.size() % 2 == 1) {
      next.push_back(active.back());
      next_vals.push_back(vals[active.back()]);
    }
    // reindex winner values by position in `next`
    std::vector<RingValue> compact(vals.size());
    for (size_t k = 0; k < next.size(); ++k) compact[next[k]] = next_vals[k];
    vals = std::move(compact);
    active = std::move(next);
  }
  return {active[0], ShareVector{v.owner, {vals[active[0]]}}};
}

std::pair<size_t, ShareVector> argmax(PartyCtx& ctx, const ShareVector& v) {
  return tournament(ctx, v, true);
}

std::pair<size_t, ShareVector> argmin(PartyCtx& ctx, const ShareVector& v) {
  return tournament(ctx, v, false);
}

RingMatrix plain_matmul(const RingMatrix& a, const RingMatrix& b, int trunc_shift) {
  if (a.cols != b.rows) throw DimensionMismatchError("plain_matmul: dims");
  RingMatrix c(a.rows, b.cols);
  for (size_t r = 0; r < a.rows; ++r)
    for (size_t k = 0; k < a.cols; ++k) {
      RingValue ark = a.at(r, k);
      if (ark.raw == 0) continue;
      for (size_t j = 0; j < b.cols; ++j) c.at(r, j) += ark * b.at(k, j);
    }
  if (trunc_shift != 0)
    for (auto& v : c.m) v = truncate_rounded(v, trunc_shift);
  return c;
}

RingMatrix plain_square_elems(const RingMatrix& z, int trunc_shift) {
  RingMatrix c(z.rows, z.cols);
  for (size_t k = 0; k < z.m.size(); ++k) c.m[k] = z.m[k] * z.m[k];
  if (trunc_shift != 0)
    for (auto& v : c.m) v = truncate_rounded(v, trunc_shift);
  return c;
}

}  // namespace ppkg
