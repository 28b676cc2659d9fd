#pragma once

#include <string>
#include <vector>

#include "lutfilt/core.hpp"
#include "lutfilt/pipeline.hpp"

namespace lutfilt {

// Exact non-negative rational, so RD comparisons never depend on float
// rounding. Accepts "3", "3/2" and plain decimals like "0.25".
struct Rational {
    int64_t num = 0;
    int64_t den = 1;
};

Rational parse_rational(const std::string& s);

// Per-block filter on/off decisions: J_on = SSD(orig,filt) + lambda*bits vs
// J_off = SSD(orig,recon), filtered wins strictly. Joint mode spends one
// flag per block covering Y+U+V with summed SSDs (chroma blocks co-located
// at half size); otherwise each component decides and pays for its own flag.
struct RdResult {
    Frame merged;
    int blocks_x = 0, blocks_y = 0;
    // one byte per block, 1 = filtered; u/v empty in joint mode or for gray
    std::vector<uint8_t> flags_y, flags_u, flags_v;
    uint64_t flag_bits = 0;     // total signalled bits
    uint64_t ssd_before = 0;    // SSD(orig, recon), all decided components
    uint64_t ssd_after = 0;     // SSD(orig, merged)
};

RdResult rd_decide(const Frame& orig, const Frame& recon, const Frame& filt, const RdParams& params);

}  // namespace lutfilt
