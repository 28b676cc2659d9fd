#pragma once

#include "lutfilt/core.hpp"
#include "lutfilt/interp.hpp"
#include "lutfilt/lutgen.hpp"
#include "lutfilt/metrics.hpp"

namespace lutfilt {

// True when the leading p node indices sit inside the diagonal band:
// |nodes[k] - nodes[0]| <= dw for k = 1..p-1. Pure predicate, dw=0 allowed.
bool is_diagonal(const int* nodes, int p, int dw);

// Compacted address of a diagonal (i0,i1) pair: i1*(2dw+1) + (i0-i1+dw) - 1,
// kept verbatim including the -1 offset (which makes (0,0) at dw=0 address
// -1; any dw >= 1 stays non-negative). Throws if the pair is off-diagonal.
int diag_address_2d(int i0, int i1, int dw);

// Builds the two-level table: full-resolution diagonal band over the first p
// dimensions plus a 2^Q-times subsampled full grid for everything else.
CompactedLut compact_lut(const ClippedLut& src, int p, int dw, int Q);

// Retrieval with separable indexing: if every corner of the kernel support
// (positive weight) lies on the diagonal, interpolate from the diagonal
// table — bit-exact with the source table — otherwise re-split at q+Q and
// interpolate from the coarse fallback.
void retrieve_separable(const CompactedLut& lut, const uint8_t* in, int* out, OpCounter* c = nullptr);

// Serialized diagonal payload: packed (exactly diag_count entries per
// leading pair) when p == 2, the rectangular anchor block otherwise.
// Matches storage_size_compacted by construction.
std::vector<uint8_t> pack_diag(const CompactedLut& lut);
void unpack_diag(CompactedLut& lut, const std::vector<uint8_t>& packed);

}  // namespace lutfilt
