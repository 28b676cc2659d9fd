#include "lutfilt/pipeline.hpp"

#include <cstring>

namespace lutfilt {

int lut_arity(const AnyLut& lut) {
    return std::visit([](const auto& t) { return t.n; }, lut);
}

int lut_values(const AnyLut& lut) {
    return std::visit([](const auto& t) { return t.V; }, lut);
}

Sampling lut_sampling(const AnyLut& lut) {
    return std::visit([](const auto& t) { return t.sampling; }, lut);
}

Signedness lut_signedness(const AnyLut& lut) {
    return std::visit([](const auto& t) { return t.signedness; }, lut);
}

uint64_t lut_payload_bytes(const AnyLut& lut) {
    if (const ClippedLut* cl = std::get_if<ClippedLut>(&lut))
        return cl->values.size();
    const CompactedLut& co = std::get<CompactedLut>(lut);
    return storage_size_compacted(co.sampling, co.n, co.V, co.p, co.dw, co.Q).total();
}

void retrieve(const AnyLut& lut, const uint8_t* in, int* out, OpCounter* c) {
    if (const ClippedLut* cl = std::get_if<ClippedLut>(&lut))
        retrieve_clipped(*cl, in, out, c);
    else
        retrieve_separable(std::get<CompactedLut>(lut), in, out, c);
}

uint64_t total_lut_payload_bytes(const Pipeline& p) {
    uint64_t total = 0;
    for (const AnyLut& l : p.luts)
        total += lut_payload_bytes(l);
    return total;
}

void retrieve_pattern(const AnyLut& lut, const Pattern& pat, const Plane& plane, int y, int x,
                      int* out, OpCounter* c) {
    const int n = lut_arity(lut);
    if (static_cast<int>(pat.offsets.size()) != n)
        throw std::invalid_argument("retrieve_pattern: pattern arity does not match table");
    uint8_t in[4];
    for (int i = 0; i < n; ++i)
        in[i] = pad_fetch(plane, y + pat.offsets[i].dy, x + pat.offsets[i].dx);
    retrieve(lut, in, out, c);
}

void rotation_ensemble(const AnyLut& lut, const Pattern& pat, const Plane& plane, int y, int x,
                       int* out, OpCounter* c) {
    const int V = lut_values(lut);
    int sum[4] = {0, 0, 0, 0};
    int vals[4];
    Pattern rot = pat;
    for (int k = 0; k < 4; ++k) {
        retrieve_pattern(lut, rot, plane, y, x, vals, c);
        for (int ch = 0; ch < V; ++ch)
            sum[ch] += vals[ch];
        if (k < 3)
            rot = rotate_pattern(rot);
    }
    for (int ch = 0; ch < V; ++ch)
        out[ch] = (sum[ch] + 2) >> 2;
    if (c)
        c->add(OpWidth::Int16, 4 * static_cast<uint64_t>(V));  // three accumulates + rounding
}

namespace {

// Pattern geometry with its four rotations resolved once per stage.
struct SlotGeom {
    const AnyLut* lut = nullptr;
    int nrot = 1;
    int arity = 0;
    std::array<std::vector<PatternOffset>, 4> rots;
};

void ensemble_eval(const SlotGeom& g, const Plane& plane, int y, int x, int* out, OpCounter* c) {
    const ClippedLut* cl = std::get_if<ClippedLut>(g.lut);
    const CompactedLut* co = cl ? nullptr : &std::get<CompactedLut>(*g.lut);
    const int V = cl ? cl->V : co->V;
    uint8_t in[4];
    int sum[4] = {0, 0, 0, 0};
    int vals[4];
    for (int k = 0; k < g.nrot; ++k) {
        for (int i = 0; i < g.arity; ++i)
            in[i] = pad_fetch(plane, y + g.rots[k][i].dy, x + g.rots[k][i].dx);
        if (cl)
            retrieve_clipped(*cl, in, vals, c);
        else
            retrieve_separable(*co, in, vals, c);
        for (int ch = 0; ch < V; ++ch)
            sum[ch] += vals[ch];
    }
    if (g.nrot == 1) {
        for (int ch = 0; ch < V; ++ch)
            out[ch] = sum[ch];
        return;
    }
    for (int ch = 0; ch < V; ++ch)
        out[ch] = (sum[ch] + 2) >> 2;
    if (c)
        c->add(OpWidth::Int16, 4 * static_cast<uint64_t>(V));
}

void check_stage_shape(const SpatialStage& stage, int lut_v) {
    const bool ok = (stage.v_in == 1 && lut_v == stage.v_out) ||
                    (stage.v_in == 2 && stage.v_out == 2 && lut_v == 2) ||
                    (stage.v_in == 2 && stage.v_out == 1 && lut_v == 1);
    if (!ok)
        throw std::invalid_argument("spatial stage: unsupported channel shape (v_in " +
                                    std::to_string(stage.v_in) + ", v_out " + std::to_string(stage.v_out) +
                                    ", table V " + std::to_string(lut_v) + ")");
}

}  // namespace

std::vector<Plane> reference_indexing(const SpatialStage& stage, const std::vector<AnyLut>& luts,
                                      const std::vector<Plane>& in, OpCounter* c) {
    if (static_cast<int>(in.size()) != stage.v_in)
        throw std::invalid_argument("reference_indexing: input width mismatch");
    if (stage.patterns.empty())
        throw std::invalid_argument("reference_indexing: no patterns");
    if (stage.weights.w.size() != stage.patterns.size())
        throw std::invalid_argument("reference_indexing: weight count mismatch");
    stage.weights.validate();
    const Plane& ref = in[0];
    for (const Plane& p : in)
        if (p.width != ref.width || p.height != ref.height)
            throw std::invalid_argument("reference_indexing: plane size mismatch");

    const size_t R = stage.patterns.size();
    std::vector<SlotGeom> geom(R);
    for (size_t r = 0; r < R; ++r) {
        const PatternSlot& slot = stage.patterns[r];
        if (slot.lut < 0 || slot.lut >= static_cast<int>(luts.size()))
            throw std::invalid_argument("reference_indexing: table reference out of range");
        const AnyLut& lut = luts[slot.lut];
        slot.pattern.validate();
        if (lut_arity(lut) != static_cast<int>(slot.pattern.offsets.size()))
            throw std::invalid_argument("reference_indexing: pattern arity does not match table");
        check_stage_shape(stage, lut_values(lut));
        geom[r].lut = &lut;
        geom[r].arity = lut_arity(lut);
        geom[r].nrot = stage.rotation_ensemble ? 4 : 1;
        Pattern rot = slot.pattern;
        for (int k = 0; k < geom[r].nrot; ++k) {
            geom[r].rots[k] = rot.offsets;
            rot = rotate_pattern(rot);
        }
    }

    std::vector<Plane> out(stage.v_out, Plane(ref.width, ref.height));
    const int workers = worker_count();
    std::vector<OpCounter> wc(c ? workers : 0);

    parallel_rows(ref.height, [&](int worker, int y0, int y1) {
        OpCounter* ctr = c ? &wc[worker] : nullptr;
        int vals[4];
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < ref.width; ++x) {
                int acc[2] = {0, 0};
                for (size_t r = 0; r < R; ++r) {
                    const int w = stage.weights.w[r];
                    if (stage.v_in == 1) {
                        ensemble_eval(geom[r], in[0], y, x, vals, ctr);
                        for (int ch = 0; ch < stage.v_out; ++ch)
                            acc[ch] += w * vals[ch];
                        if (ctr) {
                            ctr->mul(OpWidth::Int32, stage.v_out);
                            ctr->add(OpWidth::Int32, stage.v_out);
                        }
                    } else if (stage.v_out == 2) {
                        // shared table, each channel reads its own cached slot
                        for (int ch = 0; ch < 2; ++ch) {
                            ensemble_eval(geom[r], in[ch], y, x, vals, ctr);
                            acc[ch] += w * vals[ch];
                        }
                        if (ctr) {
                            ctr->mul(OpWidth::Int32, 2);
                            ctr->add(OpWidth::Int32, 2);
                        }
                    } else {
                        // 2 -> 1 merge: per-channel retrieval, rounded mean
                        ensemble_eval(geom[r], in[0], y, x, vals, ctr);
                        const int a = vals[0];
                        ensemble_eval(geom[r], in[1], y, x, vals, ctr);
                        const int merged = (a + vals[0] + 1) >> 1;
                        if (ctr) {
                            ctr->add(OpWidth::Int16, 2);
                            ctr->mul(OpWidth::Int32, 1);
                            ctr->add(OpWidth::Int32, 1);
                        }
                        acc[0] += w * merged;
                    }
                }
                for (int ch = 0; ch < stage.v_out; ++ch)
                    out[ch].at(y, x) = clip_u8((acc[ch] + 128) >> 8);
            }
        }
    });
    for (OpCounter& w : wc)
        c->merge(w);
    return out;
}

std::vector<Plane> channel_indexing(const ChannelStage& stage, const std::vector<AnyLut>& luts,
                                    const std::vector<Plane>& in, OpCounter* c) {
    if (static_cast<int>(in.size()) != stage.k)
        throw std::invalid_argument("channel_indexing: need one plane per channel");
    if (stage.lut < 0 || stage.lut >= static_cast<int>(luts.size()))
        throw std::invalid_argument("channel_indexing: table reference out of range");
    const AnyLut& lut = luts[stage.lut];
    if (lut_arity(lut) != stage.k)
        throw std::invalid_argument("channel_indexing: table dimensionality != K");
    const int V = lut_values(lut);
    if (V != stage.k && V != 1)
        throw std::invalid_argument("channel_indexing: table must cache K values (or 1 for a merge)");
    const Plane& ref = in[0];
    for (const Plane& p : in)
        if (p.width != ref.width || p.height != ref.height)
            throw std::invalid_argument("channel_indexing: plane size mismatch");

    const int v_out = V == stage.k ? stage.k : 1;
    std::vector<Plane> out(v_out, Plane(ref.width, ref.height));
    const int workers = worker_count();
    std::vector<OpCounter> wc(c ? workers : 0);
    parallel_rows(ref.height, [&](int worker, int y0, int y1) {
        OpCounter* ctr = c ? &wc[worker] : nullptr;
        uint8_t px[4];
        int vals[4];
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < ref.width; ++x) {
                for (int ch = 0; ch < stage.k; ++ch)
                    px[ch] = in[ch].at(y, x);
                retrieve(lut, px, vals, ctr);
                for (int ch = 0; ch < v_out; ++ch)
                    out[ch].at(y, x) = clip_u8(vals[ch]);
            }
        }
    });
    for (OpCounter& w : wc)
        c->merge(w);
    return out;
}

Plane progressive_indexing(const std::vector<Stage>& stages, const std::vector<AnyLut>& luts,
                           const Plane& in, OpCounter* c) {
    std::vector<Plane> planes{in};
    for (const Stage& st : stages) {
        if (const SpatialStage* sp = std::get_if<SpatialStage>(&st)) {
            if (static_cast<int>(planes.size()) != sp->v_in)
                throw std::invalid_argument("progressive_indexing: stage width chain broken");
            planes = reference_indexing(*sp, luts, planes, c);
        } else {
            const ChannelStage& ch = std::get<ChannelStage>(st);
            planes = channel_indexing(ch, luts, planes, c);
        }
    }
    if (planes.size() != 1)
        throw std::invalid_argument("progressive_indexing: chain must end single-channel");
    return std::move(planes[0]);
}

OffsetPlanes cross_component_offsets(const AnyLut& lut_u, const AnyLut& lut_v, const Plane& y,
                                     const Plane& u, const Plane& v, OpCounter* c) {
    for (const AnyLut* l : {&lut_u, &lut_v}) {
        if (lut_arity(*l) != 3 || lut_values(*l) != 1 || lut_signedness(*l) != Signedness::SignedOffset)
            throw std::invalid_argument("cross_component_offsets: need 3-D single-value signed tables");
    }
    if (u.width != v.width || u.height != v.height)
        throw std::invalid_argument("cross_component_offsets: chroma plane size mismatch");
    if (y.empty() || u.empty())
        throw std::invalid_argument("cross_component_offsets: empty plane");

    OffsetPlanes out;
    out.width = u.width;
    out.height = u.height;
    out.u.assign(u.pixel_count(), 0);
    out.v.assign(u.pixel_count(), 0);

    const int workers = worker_count();
    std::vector<OpCounter> wc(c ? workers : 0);
    parallel_rows(u.height, [&](int worker, int y0, int y1) {
        OpCounter* ctr = c ? &wc[worker] : nullptr;
        int vals[4];
        for (int cy = y0; cy < y1; ++cy) {
            for (int cx = 0; cx < u.width; ++cx) {
                // co-located 2x2 luma mean (edge rows/columns replicate)
                const int yco = (pad_fetch(y, 2 * cy, 2 * cx) + pad_fetch(y, 2 * cy, 2 * cx + 1) +
                                 pad_fetch(y, 2 * cy + 1, 2 * cx) + pad_fetch(y, 2 * cy + 1, 2 * cx + 1) +
                                 2) >> 2;
                if (ctr)
                    ctr->add(OpWidth::Int16, 4);
                const size_t i = static_cast<size_t>(cy) * u.width + cx;
                uint8_t in_u[3] = {static_cast<uint8_t>(yco), u.data[i], v.data[i]};
                retrieve(lut_u, in_u, vals, ctr);
                out.u[i] = static_cast<int8_t>(vals[0]);
                uint8_t in_v[3] = {static_cast<uint8_t>(yco), v.data[i], u.data[i]};
                retrieve(lut_v, in_v, vals, ctr);
                out.v[i] = static_cast<int8_t>(vals[0]);
            }
        }
    });
    for (OpCounter& w : wc)
        c->merge(w);
    return out;
}

void Pipeline::validate() const {
    sampling.validate();
    for (const AnyLut& l : luts) {
        if (lut_sampling(l).q != sampling.q)
            throw std::invalid_argument("pipeline: table sampling differs from pipeline sampling");
        if (const CompactedLut* co = std::get_if<CompactedLut>(&l))
            co->validate();
    }
    auto walk = [&](const std::vector<Stage>& stages, const char* which) {
        int width = 1;
        for (const Stage& st : stages) {
            if (const SpatialStage* sp = std::get_if<SpatialStage>(&st)) {
                if (sp->v_in != width)
                    throw std::invalid_argument(std::string("pipeline: ") + which +
                                                " chain width mismatch at a spatial stage");
                if (sp->patterns.empty())
                    throw std::invalid_argument("pipeline: spatial stage with no patterns");
                if (sp->weights.w.size() != sp->patterns.size())
                    throw std::invalid_argument("pipeline: stage weight count mismatch");
                sp->weights.validate();
                for (const PatternSlot& slot : sp->patterns) {
                    if (slot.lut < 0 || slot.lut >= static_cast<int>(luts.size()))
                        throw std::invalid_argument("pipeline: table reference out of range");
                    slot.pattern.validate();
                    if (lut_arity(luts[slot.lut]) != static_cast<int>(slot.pattern.offsets.size()))
                        throw std::invalid_argument("pipeline: pattern arity does not match table");
                    check_stage_shape(*sp, lut_values(luts[slot.lut]));
                }
                width = sp->v_out;
            } else {
                const ChannelStage& ch = std::get<ChannelStage>(st);
                if (ch.k != width)
                    throw std::invalid_argument(std::string("pipeline: ") + which +
                                                " chain width mismatch at a channel stage");
                if (ch.lut < 0 || ch.lut >= static_cast<int>(luts.size()))
                    throw std::invalid_argument("pipeline: table reference out of range");
                if (lut_arity(luts[ch.lut]) != ch.k)
                    throw std::invalid_argument("pipeline: channel table dimensionality != K");
                const int V = lut_values(luts[ch.lut]);
                if (V != ch.k && V != 1)
                    throw std::invalid_argument("pipeline: channel table must cache K values or 1");
                width = V == ch.k ? ch.k : 1;
            }
        }
        if (!stages.empty() && width != 1)
            throw std::invalid_argument(std::string("pipeline: ") + which + " chain must end single-channel");
    };
    walk(luma, "luma");
    walk(chroma, "chroma");
    if (cross) {
        for (int idx : {cross->lut_u, cross->lut_v}) {
            if (idx < 0 || idx >= static_cast<int>(luts.size()))
                throw std::invalid_argument("pipeline: cross-component table reference out of range");
            const AnyLut& l = luts[idx];
            if (lut_arity(l) != 3 || lut_values(l) != 1 || lut_signedness(l) != Signedness::SignedOffset)
                throw std::invalid_argument("pipeline: cross-component tables must be 3-D signed, V=1");
        }
    }
    if (rd.block < 1 || rd.flag_bits < 0 || rd.lambda_den < 1 || rd.lambda_num < 0)
        throw std::invalid_argument("pipeline: bad RD parameters");
}

Frame run_pipeline(const Pipeline& p, const Frame& in, OpCounter* c) {
    p.validate();
    Frame out = in;
    if (!p.luma.empty())
        out.y = progressive_indexing(p.luma, p.luts, in.y, c);
    if (in.format != ChromaFormat::Yuv420)
        return out;

    Plane fu = in.u, fv = in.v;
    if (!p.chroma.empty()) {
        fu = progressive_indexing(p.chroma, p.luts, in.u, c);
        fv = progressive_indexing(p.chroma, p.luts, in.v, c);
    }
    if (p.cross) {
        // offsets are indexed from the unfiltered input planes
        const OffsetPlanes off =
            cross_component_offsets(p.luts[p.cross->lut_u], p.luts[p.cross->lut_v], in.y, in.u, in.v, c);
        for (size_t i = 0; i < fu.data.size(); ++i) {
            fu.data[i] = clip_u8(fu.data[i] + off.u[i]);
            fv.data[i] = clip_u8(fv.data[i] + off.v[i]);
        }
        if (c)
            c->add(OpWidth::Int8, 2 * static_cast<uint64_t>(fu.data.size()));
    }
    out.u = std::move(fu);
    out.v = std::move(fv);
    return out;
}

namespace {

// Glues two single-output oracles into one V=2 table source.
Oracle pair_oracle(const Oracle& a, const Oracle& b) {
    if (a.arity != b.arity || a.values != 1 || b.values != 1 || a.signedness != b.signedness)
        throw std::invalid_argument("pair_oracle: incompatible halves");
    Oracle o;
    o.name = a.name + "+" + b.name;
    o.arity = a.arity;
    o.values = 2;
    o.signedness = a.signedness;
    o.fn = [fa = a.fn, fb = b.fn](const uint8_t* in, int* out) {
        int tmp[4];
        fa(in, tmp);
        out[0] = tmp[0];
        fb(in, tmp);
        out[1] = tmp[0];
    };
    return o;
}

}  // namespace

StageOracles identity_oracles() {
    StageOracles so;
    so.spatial1 = oracles::identity(4, 2);
    so.spatial2 = oracles::identity(4, 2);
    so.spatial3 = oracles::identity(4, 2);
    so.spatial4 = oracles::identity(4, 1);
    so.interaction = oracles::channel_identity(2);
    so.cross_u = oracles::offset(3, 0, 1);
    so.cross_v = oracles::offset(3, 0, 1);
    return so;
}

StageOracles smoothing_oracles() {
    StageOracles so;
    so.spatial1 = pair_oracle(oracles::box_average(4), oracles::weighted_average({128, 64, 32, 32}, 0));
    so.spatial2 = pair_oracle(oracles::box_average(4), oracles::weighted_average({96, 64, 48, 48}, 0));
    so.spatial3 = pair_oracle(oracles::weighted_average({80, 80, 48, 48}, 0), oracles::box_average(4));
    so.spatial4 = oracles::box_average(4);
    so.interaction = oracles::channel_mix(192);
    so.cross_u = oracles::offset(3, 1, 4);
    so.cross_v = oracles::offset(3, 1, 4);
    return so;
}

Pipeline make_default_pipeline(Sampling s, const StageOracles& o, bool with_chroma,
                               const std::optional<CompactionParams>& compaction) {
    Pipeline pl;
    pl.sampling = s;

    const ClippedLut lut_s1 = cache_clipped(o.spatial1, s);
    const ClippedLut lut_s2 = cache_clipped(o.spatial2, s);
    const ClippedLut lut_s3 = cache_clipped(o.spatial3, s);
    const ClippedLut lut_s4 = cache_clipped(o.spatial4, s);
    const ClippedLut lut_ch = cache_clipped(o.interaction, s);

    // Every slot gets its own table entry: pattern tables are independent
    // artifacts, so storage scales with R by design.
    auto add_spatial = [&](const ClippedLut& base, int dw) {
        if (compaction && base.n == 4)
            pl.luts.emplace_back(compact_lut(base, compaction->p, dw, compaction->Q));
        else
            pl.luts.emplace_back(base);
        return static_cast<int>(pl.luts.size()) - 1;
    };
    auto spatial_stage = [&](const ClippedLut& base, int first_id, int last_id, int dw, int v_in,
                             int v_out) {
        SpatialStage st;
        st.v_in = v_in;
        st.v_out = v_out;
        for (int id = first_id; id <= last_id; ++id)
            st.patterns.push_back(PatternSlot{default_pattern(id), add_spatial(base, dw)});
        st.weights = StageWeights::uniform(last_id - first_id + 1);
        return st;
    };

    const std::vector<int> ldw = compaction ? compaction->luma_dw : std::vector<int>{0, 0, 0, 0};
    if (compaction && ldw.size() != 4)
        throw std::invalid_argument("make_default_pipeline: need 4 luma dw values");
    pl.luma.emplace_back(spatial_stage(lut_s1, 1, 8, compaction ? ldw[0] : 0, 1, 2));  // 5x5
    pl.luma.emplace_back(spatial_stage(lut_s2, 1, 3, compaction ? ldw[1] : 0, 2, 2));  // 9x9
    pl.luts.emplace_back(lut_ch);
    pl.luma.emplace_back(ChannelStage{2, static_cast<int>(pl.luts.size()) - 1});
    pl.luma.emplace_back(spatial_stage(lut_s3, 1, 3, compaction ? ldw[2] : 0, 2, 2));  // 13x13
    pl.luma.emplace_back(spatial_stage(lut_s4, 1, 3, compaction ? ldw[3] : 0, 2, 1));  // 17x17

    if (with_chroma) {
        const std::vector<int> cdw = compaction ? compaction->chroma_dw : std::vector<int>{0, 0, 0};
        if (compaction && cdw.size() != 3)
            throw std::invalid_argument("make_default_pipeline: need 3 chroma dw values");
        pl.chroma.emplace_back(spatial_stage(lut_s1, 1, 8, compaction ? cdw[0] : 0, 1, 2));  // 5x5
        pl.luts.emplace_back(lut_ch);
        pl.chroma.emplace_back(ChannelStage{2, static_cast<int>(pl.luts.size()) - 1});
        pl.chroma.emplace_back(spatial_stage(lut_s2, 1, 3, compaction ? cdw[1] : 0, 2, 2));  // 9x9
        pl.chroma.emplace_back(spatial_stage(lut_s4, 1, 3, compaction ? cdw[2] : 0, 2, 1));  // 13x13

        pl.luts.emplace_back(cache_clipped(o.cross_u, s));
        const int xu = static_cast<int>(pl.luts.size()) - 1;
        pl.luts.emplace_back(cache_clipped(o.cross_v, s));
        pl.cross = CrossComponent{xu, static_cast<int>(pl.luts.size()) - 1};
    }

    pl.validate();
    return pl;
}

}  // namespace lutfilt
