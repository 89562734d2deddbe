#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "ppkg/errors.hpp"

namespace ppkg {

// Fixed-point parameters for values embedded in Z_2^64. All secure and
// plaintext arithmetic in this project runs through these encodings so both
// paths share bit-identical kernels.
struct FixedPointConfig {
  int total_bits = 64;       // ring width, fixed
  int frac_bits = 16;        // f
  double magnitude_bound = double(1 << 20);  // B

  void validate() const {
    if (total_bits != 64) throw ConfigError("total_bits must be 64");
    if (frac_bits <= 0 || frac_bits >= total_bits)
      throw ConfigError("frac_bits out of range");
    // B * 2^f must stay below the signed half of the ring.
    if (std::ldexp(magnitude_bound, frac_bits) >= std::ldexp(1.0, 63))
      throw ConfigError("magnitude bound too large for ring");
  }

  double scale() const { return std::ldexp(1.0, frac_bits); }
};

// One element of Z_2^64. Signed interpretation is two's complement.
struct RingValue {
  uint64_t raw = 0;

  constexpr RingValue() = default;
  constexpr explicit RingValue(uint64_t r) : raw(r) {}

  friend constexpr RingValue operator+(RingValue a, RingValue b) {
    return RingValue{a.raw + b.raw};
  }
  friend constexpr RingValue operator-(RingValue a, RingValue b) {
    return RingValue{a.raw - b.raw};
  }
  friend constexpr RingValue operator*(RingValue a, RingValue b) {
    return RingValue{a.raw * b.raw};  // raw ring product, no rescaling
  }
  constexpr RingValue operator-() const { return RingValue{~raw + 1}; }
  RingValue& operator+=(RingValue o) { raw += o.raw; return *this; }
  RingValue& operator-=(RingValue o) { raw -= o.raw; return *this; }
  friend constexpr bool operator==(RingValue a, RingValue b) { return a.raw == b.raw; }

  constexpr int64_t as_signed() const { return static_cast<int64_t>(raw); }
};

inline RingValue encode(double x, const FixedPointConfig& cfg) {
  if (!(std::abs(x) <= cfg.magnitude_bound))
    throw OutOfRangeError("encode: |x| exceeds magnitude bound");
  return RingValue{static_cast<uint64_t>(std::llround(x * cfg.scale()))};
}

inline double decode(RingValue v, const FixedPointConfig& cfg) {
  return double(v.as_signed()) / cfg.scale();
}

// Multiply a ring value by a plain integer (exact, no rescale).
inline RingValue scale_int(RingValue v, int64_t k) {
  return RingValue{v.raw * static_cast<uint64_t>(k)};
}

// Arithmetic shift that also accepts negative shifts (exact left shift).
inline RingValue arith_shift(RingValue v, int shift) {
  if (shift <= 0) return RingValue{v.raw << (-shift)};
  return RingValue{static_cast<uint64_t>(v.as_signed() >> shift)};
}

// Round-to-nearest truncation of a raw 2^(f+shift)-scaled value back by
// `shift` bits. Used on plaintext values and on the leading party's share.
inline RingValue truncate_rounded(RingValue v, int shift) {
  if (shift <= 0) return arith_shift(v, shift);
  return arith_shift(RingValue{v.raw + (uint64_t(1) << (shift - 1))}, shift);
}

// Plaintext fixed-point product: raw ring product followed by one rounded
// truncation step. The secure path performs the same product with the
// truncation applied per share.
inline RingValue ring_mul_truncate(RingValue a, RingValue b,
                                   const FixedPointConfig& cfg) {
  double prod = decode(a, cfg) * decode(b, cfg);
  if (std::abs(prod) > cfg.magnitude_bound)
    throw OutOfRangeError("ring_mul_truncate: product exceeds bound");
  return truncate_rounded(a * b, cfg.frac_bits);
}

inline std::string to_hex(RingValue v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  uint64_t r = v.raw;
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[r & 0xf];
    r >>= 4;
  }
  return out;
}

inline RingValue from_hex(const std::string& s) {
  if (s.size() != 16) throw ParseError("ring value hex must be 16 chars");
  uint64_t r = 0;
  for (char c : s) {
    r <<= 4;
    if (c >= '0' && c <= '9') r |= uint64_t(c - '0');
    else if (c >= 'a' && c <= 'f') r |= uint64_t(c - 'a' + 10);
    else throw ParseError("bad hex digit in ring value");
  }
  return RingValue{r};
}

}  // namespace ppkg
