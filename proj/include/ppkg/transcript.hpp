#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppkg/fixed_point.hpp"

namespace ppkg {

// Every value made public during a protocol run is tagged with the reason it
// was allowed to become public. The leakage-budget audit checks that no other
// kind of opening ever happens.
enum class OpenKind {
  PsiIntersection,
  ComparisonBit,
  BeaverMask,
  PublicDivisor,
  FinalOutput,
  Debug,  // never allowed in a production run; exists for negative tests
};

const char* open_kind_name(OpenKind k);

struct Message {
  int from = 0;  // -1 means dealer
  int to = 0;
  uint64_t round = 0;
  std::string tag;
  std::vector<uint8_t> payload;
  bool from_dealer = false;
};

struct OpenEvent {
  OpenKind kind;
  std::string label;
  uint64_t round = 0;
};

// Ordered record of everything that crossed a channel, plus the list of
// openings. Appending is externally synchronized by the round scheduler so
// the record is identical across reruns with the same seed.
class Transcript {
 public:
  void append(Message m) { messages_.push_back(std::move(m)); }
  void record_open(OpenEvent e) { opens_.push_back(std::move(e)); }
  void set_rounds(uint64_t r) { rounds_ = r; }

  const std::vector<Message>& messages() const { return messages_; }
  const std::vector<OpenEvent>& opens() const { return opens_; }
  uint64_t rounds() const { return rounds_; }

  size_t party_message_count() const;
  size_t dealer_message_count() const;
  size_t bytes_sent_by(int party) const;

  // JSON-lines dump, one message per line with hex payload.
  std::string to_jsonl() const;

 private:
  std::vector<Message> messages_;
  std::vector<OpenEvent> opens_;
  uint64_t rounds_ = 0;
};

// True iff no payload in the transcript contains any of the byte patterns.
bool assert_no_plaintext_leak(const Transcript& t,
                              const std::vector<std::vector<uint8_t>>& secrets);

std::vector<uint8_t> pack_rings(std::span<const RingValue> vals);
std::vector<RingValue> unpack_rings(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> ring_pattern(RingValue v);

}  // namespace ppkg
