#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "lutfilt/compact.hpp"
#include "lutfilt/core.hpp"
#include "lutfilt/interp.hpp"
#include "lutfilt/lutgen.hpp"
#include "lutfilt/metrics.hpp"

namespace lutfilt {

using AnyLut = std::variant<ClippedLut, CompactedLut>;

int lut_arity(const AnyLut& lut);
int lut_values(const AnyLut& lut);
Sampling lut_sampling(const AnyLut& lut);
uint64_t lut_payload_bytes(const AnyLut& lut);  // serialized payload size

// Kernel dispatch: clipped tables straight, compacted via separable routing.
void retrieve(const AnyLut& lut, const uint8_t* in, int* out, OpCounter* c = nullptr);

struct PatternSlot {
    Pattern pattern;
    int lut = -1;  // index into Pipeline::luts
};

// One reference-indexing stage: R patterns, each with its own table, blended
// with Q8 weights after the optional 4-rotation ensemble. Channel widths:
// 1->V (split), 2->2 (per-channel slots of a shared V=2 table), or 2->1
// (per-channel V=1 retrieval, rounded mean).
struct SpatialStage {
    std::vector<PatternSlot> patterns;
    StageWeights weights;
    bool rotation_ensemble = true;
    int v_in = 1;
    int v_out = 1;
};

// Pointwise many-to-many mapping of co-located channel samples through one
// K-dimensional table (V == K), or a K->1 merge (V == 1).
struct ChannelStage {
    int k = 2;
    int lut = -1;
};

using Stage = std::variant<SpatialStage, ChannelStage>;

struct CrossComponent {
    int lut_u = -1;
    int lut_v = -1;
};

struct RdParams {
    int64_t lambda_num = 0;
    int64_t lambda_den = 1;
    int block = 128;
    int flag_bits = 1;
    bool joint = true;  // one flag covers Y+U+V; else per component
};

struct Pipeline {
    Sampling sampling;
    std::vector<AnyLut> luts;
    std::vector<Stage> luma;
    std::vector<Stage> chroma;
    std::optional<CrossComponent> cross;
    RdParams rd;

    void validate() const;  // throws on width-chain or table mismatches
};

uint64_t total_lut_payload_bytes(const Pipeline& p);

// --- per-pixel operations ---

// One pattern at one position, no ensemble. out receives the table's V values.
void retrieve_pattern(const AnyLut& lut, const Pattern& pat, const Plane& plane, int y, int x,
                      int* out, OpCounter* c = nullptr);

// Mean of the four 90-degree pattern rotations, round-half-up.
void rotation_ensemble(const AnyLut& lut, const Pattern& pat, const Plane& plane, int y, int x,
                       int* out, OpCounter* c = nullptr);

// --- stage / chain operations ---

std::vector<Plane> reference_indexing(const SpatialStage& stage, const std::vector<AnyLut>& luts,
                                      const std::vector<Plane>& in, OpCounter* c = nullptr);

std::vector<Plane> channel_indexing(const ChannelStage& stage, const std::vector<AnyLut>& luts,
                                    const std::vector<Plane>& in, OpCounter* c = nullptr);

// Runs a whole stage chain 1 -> ... -> 1 on a single plane.
Plane progressive_indexing(const std::vector<Stage>& stages, const std::vector<AnyLut>& luts,
                           const Plane& in, OpCounter* c = nullptr);

// Signed chroma offsets indexed by [co-located 2x2 luma mean, own, other].
struct OffsetPlanes {
    int width = 0, height = 0;
    std::vector<int8_t> u, v;
};

OffsetPlanes cross_component_offsets(const AnyLut& lut_u, const AnyLut& lut_v, const Plane& y,
                                     const Plane& u, const Plane& v, OpCounter* c = nullptr);

// Full frame: luma chain on Y; chroma chain on U and V plus the
// cross-component offsets (from the unfiltered input planes), clipped.
Frame run_pipeline(const Pipeline& p, const Frame& in, OpCounter* c = nullptr);

// --- default chains ---

// Oracles for the stock 4-stage luma chain (reference ranges 5/9/13/17),
// its K=2 interaction stage, and the chroma offset tables.
struct StageOracles {
    Oracle spatial1, spatial2, spatial3, spatial4;
    Oracle interaction;
    Oracle cross_u, cross_v;
};

StageOracles identity_oracles();   // end-to-end no-op
StageOracles smoothing_oracles();  // affine averaging family

struct CompactionParams {
    int p = 4;
    int Q = 1;
    std::vector<int> luma_dw{2, 2, 3, 3};  // per spatial stage, chain order
    std::vector<int> chroma_dw{2, 2, 2};
};

// Builds tables and wiring for the default chains. Every pattern slot gets
// its own table entry (they are independent artifacts even when built from
// one oracle), so storage accounting reflects the R-fold pattern cost.
Pipeline make_default_pipeline(Sampling s, const StageOracles& o, bool with_chroma,
                               const std::optional<CompactionParams>& compaction = std::nullopt);

}  // namespace lutfilt
