#pragma once

#include <string>
#include <vector>

#include "lutfilt/compact.hpp"
#include "lutfilt/core.hpp"

namespace lutfilt {

// LUTF container, little-endian:
//   "LUTF" | version u16 (=1) | kind u8 | signedness u8 | n u8 | V u8 |
//   q u8 | dw u8 | Q u8 | p u8 | n x (dy i8, dx i8) | payload
// kind 0 = clipped spatial, 1 = compacted spatial, 2 = channel-wise.
// dw/Q/p are zero for uncompacted kinds; pattern offsets are zero for
// channel tables. Readers reject unknown magic or versions outright.
enum class LutKind : uint8_t { Clipped = 0, Compacted = 1, Channel = 2 };

constexpr uint16_t kLutfVersion = 1;

inline size_t lutf_header_bytes(int n) { return 14 + 2 * static_cast<size_t>(n); }

struct LutFile {
    LutKind kind = LutKind::Clipped;
    Pattern pattern;  // empty offsets for channel tables
    ClippedLut clipped;      // valid when kind != Compacted
    CompactedLut compacted;  // valid when kind == Compacted

    int n() const { return kind == LutKind::Compacted ? compacted.n : clipped.n; }
    uint64_t payload_bytes() const;
};

std::vector<uint8_t> serialize_lutf(const LutFile& f);
LutFile parse_lutf(const std::vector<uint8_t>& bytes);

// File variants (atomic write / whole-file read).
void save_lutf(const std::string& path, const LutFile& f);
LutFile load_lutf(const std::string& path);

}  // namespace lutfilt
