#include "ppkg/transcript.hpp"

#include <algorithm>
#include <sstream>

namespace ppkg {

const char* open_kind_name(OpenKind k) {
  switch (k) {
    case OpenKind::PsiIntersection: return "psi_intersection";
    case OpenKind::ComparisonBit: return "comparison_bit";
    case OpenKind::BeaverMask: return "beaver_mask";
    case OpenKind::PublicDivisor: return "public_divisor";
    case OpenKind::FinalOutput: return "final_output";
    case OpenKind::Debug: return "debug";
  }
  return "unknown";
}

size_t Transcript::party_message_count() const {
  size_t c = 0;
  for (const auto& m : messages_)
    if (!m.from_dealer) ++c;
  return c;
}

size_t Transcript::dealer_message_count() const {
  return messages_.size() - party_message_count();
}

size_t Transcript::bytes_sent_by(int party) const {
  size_t c = 0;
  for (const auto& m : messages_)
    if (!m.from_dealer && m.from == party) c += m.payload.size();
  return c;
}

static void hex_append(std::string& out, const std::vector<uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  for (uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const auto& m : messages_) {
    out += "{\"from\":" + std::to_string(m.from) +
           ",\"to\":" + std::to_string(m.to) +
           ",\"round\":" + std::to_string(m.round) +
           ",\"dealer\":" + (m.from_dealer ? "true" : "false") +
           ",\"tag\":\"" + m.tag + "\",\"payload\":\"";
    hex_append(out, m.payload);
    out += "\"}\n";
  }
  return out;
}

bool assert_no_plaintext_leak(const Transcript& t,
                              const std::vector<std::vector<uint8_t>>& secrets) {
  for (const auto& m : t.messages()) {
    for (const auto& s : secrets) {
      if (s.empty()) continue;
      auto it = std::search(m.payload.begin(), m.payload.end(), s.begin(), s.end());
      if (it != m.payload.end()) return false;
    }
  }
  return true;
}

std::vector<uint8_t> pack_rings(std::span<const RingValue> vals) {
  std::vector<uint8_t> out;
  out.reserve(vals.size() * 8);
  for (RingValue v : vals) {
    uint64_t r = v.raw;
    for (int i = 0; i < 8; ++i) {
      out.push_back(uint8_t(r & 0xff));
      r >>= 8;
    }
  }
  return out;
}

std::vector<RingValue> unpack_rings(const std::vector<uint8_t>& bytes) {
  std::vector<RingValue> out(bytes.size() / 8);
  for (size_t i = 0; i < out.size(); ++i) {
    uint64_t r = 0;
    for (int j = 7; j >= 0; --j) r = (r << 8) | bytes[i * 8 + size_t(j)];
    out[i] = RingValue{r};
  }
  return out;
}

std::vector<uint8_t> ring_pattern(RingValue v) {
  return pack_rings(std::span<const RingValue>(&v, 1));
}

}  // namespace ppkg
