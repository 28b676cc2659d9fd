#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace lutfilt {

inline uint8_t clip_u8(int v) {
    return static_cast<uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
}

// What the 8-bit cells of a LUT mean.
enum class Signedness : uint8_t {
    UnsignedPixel = 0,  // [0, 255]
    SignedOffset = 1,   // [-128, 127], stored as int8 bit pattern
};

// 8-bit grayscale plane, row-major.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    Plane() = default;
    Plane(int w, int h, uint8_t fill = 0);

    bool empty() const { return width == 0 || height == 0; }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }

    uint8_t at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
};

// Out-of-range coordinates replicate the nearest edge pixel.
uint8_t pad_fetch(const Plane& p, int y, int x);

// 90-degree counter-clockwise rotation (the right column becomes the top row).
Plane rot90(const Plane& p);

bool operator==(const Plane& a, const Plane& b);
inline bool operator!=(const Plane& a, const Plane& b) { return !(a == b); }

enum class ChromaFormat : uint8_t { GrayOnly = 0, Yuv420 = 1 };

// A picture: luma only, or luma plus half-resolution chroma (ceil halves for
// odd luma dimensions).
struct Frame {
    ChromaFormat format = ChromaFormat::GrayOnly;
    Plane y, u, v;

    static Frame gray(Plane luma);
    static Frame yuv420(Plane luma, Plane cb, Plane cr);  // throws on dim mismatch
};

struct PatternOffset {
    int8_t dy = 0;
    int8_t dx = 0;
};

inline bool operator==(PatternOffset a, PatternOffset b) { return a.dy == b.dy && a.dx == b.dx; }

// An indexing pattern: the target pixel plus the reference pixels it is
// filtered with, as (dy,dx) offsets. First offset is always the target (0,0).
struct Pattern {
    int id = 0;
    std::vector<PatternOffset> offsets;

    // Throws std::invalid_argument on duplicate offsets, a non-(0,0) first
    // entry, or an offset outside the +/-half_window box.
    void validate(int half_window = 2) const;
};

// One 90-degree counter-clockwise step, matching rot90() on planes.
PatternOffset rotate_offset(PatternOffset o);
Pattern rotate_pattern(const Pattern& p);

// The eight stock 4-pixel patterns (ids 1..8), target first.
Pattern default_pattern(int id);

// Node grid geometry: q low bits are dropped, leaving 2^(8-q)+1 nodes per
// dimension at values 0, W, 2W, ..., 255 (the top node is clipped to 255, so
// the last interval is W-1 wide).
struct Sampling {
    int q = 4;

    int interval() const { return 1 << q; }            // W
    int node_count() const { return (1 << (8 - q)) + 1; }  // L
    int node_value(int i) const { return std::min(i << q, 255); }
    void validate() const;
};

inline bool operator==(Sampling a, Sampling b) { return a.q == b.q; }

// Dense n-dimensional table over the clipped node grid with V cached 8-bit
// values per entry. Storage is raw bytes; SignedOffset cells are int8 bit
// patterns. Entry order: ((i0*L + i1)*L + ...)*V + ch. Tables are built once
// (lutgen/compact) and read-only afterwards.
struct ClippedLut {
    Sampling sampling;
    int n = 0;
    int V = 1;
    Signedness signedness = Signedness::UnsignedPixel;
    std::vector<uint8_t> values;

    ClippedLut() = default;
    ClippedLut(Sampling s, int n_, int V_, Signedness sg);

    size_t entry_count() const;  // L^n
    size_t index(const int* nodes) const;

    int raw_to_value(uint8_t raw) const {
        return signedness == Signedness::SignedOffset ? static_cast<int>(static_cast<int8_t>(raw))
                                                      : static_cast<int>(raw);
    }
    int value_at(const int* nodes, int ch) const {
        return raw_to_value(values[index(nodes) * V + ch]);
    }
    void set_value(const int* nodes, int ch, int v);
};

// Diagonally compacted table: the first p dimensions are restricted to the
// near-diagonal band |I_k - I_0| <= dw and kept at full sampling; everything
// outside the band falls back to a 2^Q-times coarser clipped table.
struct CompactedLut {
    Sampling sampling;  // base sampling of the diagonal part
    int n = 0;
    int V = 1;
    Signedness signedness = Signedness::UnsignedPixel;
    int p = 2;   // leading dimensions under the diagonal constraint (2..n)
    int dw = 1;  // diagonal half-width (1..L-1)
    int Q = 1;   // extra subsampling bits of the fallback table (1..8-q)

    // Rectangular diagonal storage, branch-free addressing. p==2: row index is
    // the diagonal address I1*(2dw+1) + (I0-I1+dw) - 1; p>2: anchor layout
    // I0, then p-1 offsets r_k = I_k - I_0 + dw in [0,2dw]. Either way
    // followed by the free dimensions (L each) and V channels.
    std::vector<uint8_t> diag;
    ClippedLut nondiag;  // sampling q+Q, full n-dimensional grid

    size_t diag_rows() const;      // leading-dimension slots
    size_t diag_byte_count() const { return diag.size(); }
    int raw_to_value(uint8_t raw) const {
        return signedness == Signedness::SignedOffset ? static_cast<int>(static_cast<int8_t>(raw))
                                                      : static_cast<int>(raw);
    }
    void validate() const;
};

// Q8 pattern-aggregation weights; always sums to exactly 256.
struct StageWeights {
    std::vector<int> w;

    static StageWeights uniform(int count);
    static StageWeights from_real(const std::vector<double>& r);
    void validate() const;
};

// Worker cap for row-parallel loops; LUTFILT_THREADS overrides the hardware
// count. Always >= 1.
int worker_count();

// Runs fn(worker, y0, y1) over disjoint row ranges of [0, height). Rows are
// partitioned deterministically, so results never depend on the worker count.
void parallel_rows(int height, const std::function<void(int, int, int)>& fn);

}  // namespace lutfilt
