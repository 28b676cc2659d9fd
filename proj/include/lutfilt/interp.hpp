#pragma once

#include <array>
#include <cstdint>

#include "lutfilt/core.hpp"
#include "lutfilt/metrics.hpp"

namespace lutfilt {

struct MsbLsb {
    int msb = 0;
    int lsb = 0;
};

// x = msb*2^q + lsb. msb stays <= 2^(8-q)-1, so the upper neighbor node
// always exists.
MsbLsb split_msb_lsb(uint8_t x, int q);

// A resolved interpolation kernel: corner node coordinates plus integer
// weights summing to 1<<shift. Large enough for the 8-corner cube.
struct InterpCorners {
    int count = 0;
    int ndim = 0;
    int shift = 0;
    std::array<std::array<int, 4>, 8> nodes{};
    std::array<int, 8> weights{};
};

// Simplex kernel for 1..4 dimensions: n+1 vertices ordered by descending
// effective LSB (ties resolved last-dimension-first, so an all-tie lands on
// the final rule row). weights sum to W, shift = q.
InterpCorners simplex_corners(const int* msb, const int* lsb, int ndim, Sampling s, OpCounter* c);

// Full 2^3-corner cube for 3-D retrieval; weights are per-axis products, sum
// W^3, shift = 3q.
InterpCorners cube_corners(const int* msb, const int* lsb, Sampling s, OpCounter* c);

// Vertex-selection summary of the 4-D simplex rule for one LSB tuple, for
// inspecting the rule table directly. order[] holds dimension indices
// (0=x..3=t) most-significant first; codes are the P_xyzt bit patterns
// (x=bit3..t=bit0) of the five vertices.
struct SimplexRule {
    std::array<int, 4> order{};
    std::array<int, 5> weights{};
    std::array<uint8_t, 5> vertex_codes{};
};

SimplexRule simplex_rule4(const std::array<int, 4>& lsb, int W);

// Weighted sum of cached corner values with round-half-up at the final
// shift; out receives all V channels.
void interp_eval(const ClippedLut& lut, const InterpCorners& k, int* out, OpCounter* c);

// Full retrievals from a clipped table. The kernel is picked by n:
// 4 -> simplex, 3 -> cube, 2 -> triangle, 1 -> linear.
void retrieve_clipped(const ClippedLut& lut, const uint8_t* in, int* out, OpCounter* c = nullptr);

// Single-channel conveniences.
int trilinear(const ClippedLut& lut, uint8_t x, uint8_t y, uint8_t z, OpCounter* c = nullptr);
int simplex4(const ClippedLut& lut, uint8_t x, uint8_t y, uint8_t z, uint8_t t, OpCounter* c = nullptr);

}  // namespace lutfilt
