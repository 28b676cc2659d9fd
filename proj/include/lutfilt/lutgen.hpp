#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lutfilt/core.hpp"

namespace lutfilt {

// Ground-truth filter: maps `arity` raw pixels to `values` outputs. The
// function must be pure — caching assumes it.
struct Oracle {
    std::string name;
    int arity = 0;
    int values = 1;
    Signedness signedness = Signedness::UnsignedPixel;
    std::function<void(const uint8_t* in, int* out)> fn;

    void eval(const uint8_t* in, int* out) const { fn(in, out); }
};

namespace oracles {

// out = in[0] replicated over all cached slots.
Oracle identity(int arity, int values = 1);

// Rounded mean of all inputs.
Oracle box_average(int arity);

// floor((sum coeff_q8[i]*in[i] + 128)/256) + bias, clipped to [0,255].
Oracle weighted_average(std::vector<int> coeff_q8, int bias);

// Mean of the target plus every reference within `threshold` of it.
Oracle edge_preserve(int arity, int threshold);

// round((in[1]-in[0])*num/den), clipped to [-128,127]. num=0 gives the
// zero-offset oracle.
Oracle offset(int arity, int num, int den);

// Channel-wise shapes (arity == values == k).
Oracle channel_identity(int k);
Oracle channel_swap();
// out0 = (self*in0 + (256-self)*in1)/256 rounded, out1 mirrored.
Oracle channel_mix(int self_q8);

// Ignores its inputs.
Oracle constant(int arity, int value, int values = 1);

// Textual form used by the CLI, e.g. "box:n=4", "edge:n=4,t=32",
// "weighted:c=128/64/32/32,b=0", "offset:n=3,num=1,den=4",
// "identity:n=4,v=2", "chan-identity:k=2", "chan-swap", "chan-mix:m=192",
// "constant:n=4,val=0". Throws std::invalid_argument on malformed specs.
Oracle parse(const std::string& spec);

}  // namespace oracles

// Evaluates the oracle at every node-grid point and stores the clipped
// results. V is taken from the oracle; out-of-range oracle outputs are
// clipped to the signedness range rather than rejected.
ClippedLut cache_clipped(const Oracle& o, Sampling s);

// Closed-form table storage accounting, in bytes (V 8-bit values
// per entry). Optional multipliers: R same-shape pattern tables, P
// progressive stages, K channels. With K set the channel-framework formula
// K*L^K + K*R*L^n applies; otherwise plain (P*)(R*)L^n.
struct StorageQuery {
    Sampling sampling;
    int n = 4;
    int V = 1;
    int patterns = 0;  // R; 0 = single table
    int stages = 0;    // P; 0 = not staged
    int channels = 0;  // K; 0 = no channel framework
};

uint64_t storage_size_clipped(const StorageQuery& q);

// Diagonal entry count for one compacted leading pair: (2dw+1)*L - dw*(dw+1).
uint64_t diag_count(int dw, int L);

// Exact serialized payload of a compacted table: the p==2 diagonal block
// packs only the diag_count valid entries; p>2 stores the rectangular anchor
// block. The fallback table is a full grid at q+Q.
struct CompactedSizes {
    uint64_t diag = 0;
    uint64_t nondiag = 0;
    uint64_t total() const { return diag + nondiag; }
};

CompactedSizes storage_size_compacted(Sampling s, int n, int V, int p, int dw, int Q);

}  // namespace lutfilt
