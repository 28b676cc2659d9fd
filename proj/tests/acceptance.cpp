// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Tolerances are pinned here, not configurable — these are the contract.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>

#include "lutfilt/compact.hpp"
#include "lutfilt/config.hpp"
#include "lutfilt/interp.hpp"
#include "lutfilt/lutgen.hpp"
#include "lutfilt/metrics.hpp"
#include "lutfilt/pipeline.hpp"
#include "lutfilt/rd.hpp"
#include "oracle_chain.hpp"

using namespace lutfilt;

namespace {

Plane random_plane(int w, int h, uint32_t seed) {
    std::mt19937 rng(seed);
    Plane p(w, h);
    for (auto& px : p.data)
        px = static_cast<uint8_t>(rng() & 0xff);
    return p;
}

Frame random_yuv(int w, int h, uint32_t seed) {
    return Frame::yuv420(random_plane(w, h, seed), random_plane((w + 1) / 2, (h + 1) / 2, seed + 1),
                         random_plane((w + 1) / 2, (h + 1) / 2, seed + 2));
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// 1. Storage formula goldens.
bool crit_storage(std::string& why) {
    const uint64_t single = storage_size_clipped({Sampling{4}, 4, 1});
    if (single != 83521) {
        why = fmt("single 4-D table: %llu != 83521", (unsigned long long)single);
        return false;
    }
    if (storage_size_clipped({Sampling{8}, 4, 1}) != 16) {
        why = "q=8 table should be 2^4 entries";
        return false;
    }
    StorageQuery rq{Sampling{4}, 4, 1};
    rq.patterns = 3;
    if (storage_size_clipped(rq) != 3 * 83521) {
        why = "R=3 pattern multiplier broken";
        return false;
    }
    StorageQuery cq{Sampling{4}, 4, 1};
    cq.channels = 2;
    cq.patterns = 3;
    const uint64_t want = 2ull * 17 * 17 + 2ull * 3 * 83521;  // K*L^K + K*R*L^n
    if (storage_size_clipped(cq) != want) {
        why = "channel-framework formula broken";
        return false;
    }
    return true;
}

// 2. Diagonal count vs brute-force pair enumeration.
bool crit_diag_count(std::string& why) {
    for (int L : {5, 9, 17}) {
        for (int dw = 0; dw < L; ++dw) {
            uint64_t brute = 0;
            for (int i0 = 0; i0 < L; ++i0)
                for (int i1 = 0; i1 < L; ++i1)
                    if (std::abs(i0 - i1) <= dw)
                        ++brute;
            if (diag_count(dw, L) != brute) {
                why = fmt("diag_count(%d,%d) = %llu, brute force %llu", dw, L,
                          (unsigned long long)diag_count(dw, L), (unsigned long long)brute);
                return false;
            }
        }
    }
    if (diag_count(2, 17) != 79) {
        why = "known point (dw=2, L=17) != 79";
        return false;
    }
    return true;
}

// 3. Simplex weight conservation over every LSB tuple + node exactness.
bool crit_conservation(std::string& why) {
    const int W = 16;
    for (int l0 = 0; l0 < W; ++l0)
        for (int l1 = 0; l1 < W; ++l1)
            for (int l2 = 0; l2 < W; ++l2)
                for (int l3 = 0; l3 < W; ++l3) {
                    const SimplexRule r = simplex_rule4({l0, l1, l2, l3}, W);
                    int sum = 0;
                    for (int w : r.weights) {
                        if (w < 0) {
                            why = fmt("negative weight at lsb (%d,%d,%d,%d)", l0, l1, l2, l3);
                            return false;
                        }
                        sum += w;
                    }
                    if (sum != W) {
                        why = fmt("weights sum %d at lsb (%d,%d,%d,%d)", sum, l0, l1, l2, l3);
                        return false;
                    }
                }

    std::mt19937 rng(501);
    const Sampling s{4};
    for (int table = 0; table < 10; ++table) {
        const Signedness sg = table % 2 ? Signedness::SignedOffset : Signedness::UnsignedPixel;
        const int n = table % 3 ? 4 : 3;
        ClippedLut lut(s, n, 1, sg);
        for (auto& b : lut.values)
            b = static_cast<uint8_t>(rng() & 0xff);
        for (int i = 0; i < 1000; ++i) {
            int idx[4];
            uint8_t in[4];
            for (int d = 0; d < n; ++d) {
                idx[d] = static_cast<int>(rng() % s.node_count());
                in[d] = static_cast<uint8_t>(s.node_value(idx[d]));
            }
            int got = 0;
            retrieve_clipped(lut, in, &got);
            if (got != lut.value_at(idx, 0)) {
                why = fmt("node query %d != cell %d (table %d)", got, lut.value_at(idx, 0), table);
                return false;
            }
        }
    }
    return true;
}

// 4. Affine fidelity: cached averaging oracles stay within one code of the
// direct evaluation. Coefficients sum <= 240 with bias 0..8 so the output
// range never touches the clip (the bound is an affine-reproduction
// property; a clipped affine function is not affine).
bool crit_affine(std::string& why) {
    std::mt19937 rng(601);
    const Sampling s{4};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> coeff(4, 0);
        int rest = 128 + static_cast<int>(rng() % 113);
        for (int i = 0; i < 3; ++i) {
            const int c = static_cast<int>(rng() % (rest + 1));
            coeff[i] = c;
            rest -= c;
        }
        coeff[3] = rest;
        const int bias = static_cast<int>(rng() % 9);
        const Oracle o = oracles::weighted_average(coeff, bias);
        const ClippedLut lut = cache_clipped(o, s);
        for (int i = 0; i < 100000; ++i) {
            uint8_t in[4];
            for (uint8_t& v : in)
                v = static_cast<uint8_t>(rng() & 0xff);
            int want = 0;
            o.eval(in, &want);
            const int got = simplex4(lut, in[0], in[1], in[2], in[3]);
            if (std::abs(got - want) > 1) {
                why = fmt("oracle %d: |%d - %d| > 1 at (%d,%d,%d,%d)", trial, got, want, in[0],
                          in[1], in[2], in[3]);
                return false;
            }
        }
    }
    return true;
}

// 5. Compacted retrieval is bit-exact with the source wherever the kernel
// support lies on the diagonal band. n=3 exhaustively, n=4 randomized.
bool crit_compaction(std::string& why) {
    const Sampling s{4};
    {
        const ClippedLut lut = cache_clipped(oracles::edge_preserve(3, 48), s);
        for (int p : {2, 3}) {
            const int dw = 2;
            const CompactedLut com = compact_lut(lut, p, dw, 1);
            uint64_t hits = 0;
            for (int x = 0; x < 256; ++x)
                for (int y = 0; y < 256; ++y)
                    for (int z = 0; z < 256; ++z) {
                        const uint8_t in[3] = {static_cast<uint8_t>(x), static_cast<uint8_t>(y),
                                               static_cast<uint8_t>(z)};
                        int msb[3], lsb[3];
                        for (int d = 0; d < 3; ++d) {
                            const MsbLsb ml = split_msb_lsb(in[d], s.q);
                            msb[d] = ml.msb;
                            lsb[d] = ml.lsb;
                        }
                        const InterpCorners k = cube_corners(msb, lsb, s, nullptr);
                        bool on_band = true;
                        for (int ci = 0; ci < k.count && on_band; ++ci)
                            if (k.weights[ci] > 0 && !is_diagonal(k.nodes[ci].data(), p, dw))
                                on_band = false;
                        if (!on_band)
                            continue;
                        ++hits;
                        int a = 0, b = 0;
                        retrieve_clipped(lut, in, &a);
                        retrieve_separable(com, in, &b);
                        if (a != b) {
                            why = fmt("n=3 p=%d: %d != %d at (%d,%d,%d)", p, a, b, x, y, z);
                            return false;
                        }
                    }
            if (hits < 100000) {
                why = fmt("n=3 p=%d: only %llu diagonal inputs exercised", p,
                          (unsigned long long)hits);
                return false;
            }
        }
    }
    {
        const ClippedLut lut = cache_clipped(oracles::weighted_average({96, 72, 48, 40}, 2), s);
        std::mt19937 rng(701);
        for (int p : {2, 4}) {
            for (int dw : {1, 3}) {
                const CompactedLut com = compact_lut(lut, p, dw, 1);
                uint64_t hits = 0;
                for (int i = 0; i < 1000000; ++i) {
                    uint8_t in[4];
                    if (i % 2 == 0) {
                        for (uint8_t& v : in)
                            v = static_cast<uint8_t>(rng() & 0xff);
                    } else {
                        // near-diagonal jitter so the band route fires often
                        const int base = static_cast<int>(rng() & 0xff);
                        const int J = dw * 16;
                        for (uint8_t& v : in)
                            v = clip_u8(base + static_cast<int>(rng() % (2 * J + 1)) - J);
                    }
                    int msb[4], lsb[4];
                    for (int d = 0; d < 4; ++d) {
                        const MsbLsb ml = split_msb_lsb(in[d], s.q);
                        msb[d] = ml.msb;
                        lsb[d] = ml.lsb;
                    }
                    const InterpCorners k = simplex_corners(msb, lsb, 4, s, nullptr);
                    bool on_band = true;
                    for (int ci = 0; ci < k.count && on_band; ++ci)
                        if (k.weights[ci] > 0 && !is_diagonal(k.nodes[ci].data(), p, dw))
                            on_band = false;
                    if (!on_band)
                        continue;
                    ++hits;
                    int a = 0, b = 0;
                    retrieve_clipped(lut, in, &a);
                    retrieve_separable(com, in, &b);
                    if (a != b) {
                        why = fmt("n=4 p=%d dw=%d: %d != %d", p, dw, a, b);
                        return false;
                    }
                }
                if (hits < 50000) {
                    why = fmt("n=4 p=%d dw=%d: only %llu diagonal inputs exercised", p, dw,
                              (unsigned long long)hits);
                    return false;
                }
            }
        }
    }
    return true;
}

// 6. Compacting the default luma chain shrinks it, and every compacted
// payload matches the closed-form accounting.
bool crit_compression(std::string& why) {
    const StageOracles so = smoothing_oracles();
    const Pipeline plain = make_default_pipeline(Sampling{4}, so, true);
    const Pipeline packed = make_default_pipeline(Sampling{4}, so, true, CompactionParams{});

    auto luma_bytes = [](const Pipeline& pl) {
        uint64_t total = 0;
        for (const Stage& st : pl.luma) {
            if (const SpatialStage* sp = std::get_if<SpatialStage>(&st))
                for (const PatternSlot& slot : sp->patterns)
                    total += lut_payload_bytes(pl.luts[slot.lut]);
            else
                total += lut_payload_bytes(pl.luts[std::get<ChannelStage>(st).lut]);
        }
        return total;
    };
    const uint64_t before = luma_bytes(plain), after = luma_bytes(packed);
    if (after >= before) {
        why = fmt("luma chain: %llu B compacted vs %llu B clipped", (unsigned long long)after,
                  (unsigned long long)before);
        return false;
    }
    for (const AnyLut& l : packed.luts) {
        const CompactedLut* co = std::get_if<CompactedLut>(&l);
        if (!co)
            continue;
        const CompactedSizes want =
            storage_size_compacted(co->sampling, co->n, co->V, co->p, co->dw, co->Q);
        if (lut_payload_bytes(l) != want.total()) {
            why = fmt("compacted payload %llu != formula %llu (dw=%d)",
                      (unsigned long long)lut_payload_bytes(l), (unsigned long long)want.total(),
                      co->dw);
            return false;
        }
    }
    return true;
}

// 7. Identity-oracle pipeline is the identity map; single-stage filtering
// commutes with 90-degree rotation.
bool crit_identity(std::string& why) {
    const Pipeline ident = make_default_pipeline(Sampling{4}, identity_oracles(), true);
    for (int i = 0; i < 10; ++i) {
        const uint32_t seed = 801 + 7 * static_cast<uint32_t>(i);
        if (i % 2 == 0) {
            const Frame f = random_yuv(36 + i, 24 + i, seed);
            const Frame out = run_pipeline(ident, f);
            if (out.y != f.y || out.u != f.u || out.v != f.v) {
                why = fmt("yuv frame %d not preserved", i);
                return false;
            }
        } else {
            const Frame f = Frame::gray(random_plane(41 + i, 29 + i, seed));
            if (run_pipeline(ident, f).y != f.y) {
                why = fmt("gray frame %d not preserved", i);
                return false;
            }
        }
    }

    std::vector<AnyLut> luts;
    luts.emplace_back(cache_clipped(oracles::box_average(4), Sampling{4}));
    SpatialStage st;
    for (int id = 1; id <= 3; ++id)
        st.patterns.push_back(PatternSlot{default_pattern(id), 0});
    st.weights = StageWeights::uniform(3);
    for (int i = 0; i < 10; ++i) {
        const Plane p = random_plane(64, 64, 900 + static_cast<uint32_t>(i));
        const Plane a = reference_indexing(st, luts, {rot90(p)})[0];
        const Plane b = rot90(reference_indexing(st, luts, {p})[0]);
        if (a != b) {
            why = fmt("equivariance broken on plane %d", i);
            return false;
        }
    }
    return true;
}

// 8. Table chains track the direct oracle chains within two codes; the
// smoothing set denoises a known degradation; zero-lambda RD never loses.
bool crit_fidelity(std::string& why) {
    const StageOracles so = smoothing_oracles();
    const Pipeline pl = make_default_pipeline(Sampling{4}, so, true);
    for (int i = 0; i < 5; ++i) {
        const Frame f = random_yuv(64, 64, 1000 + 5 * static_cast<uint32_t>(i));
        const Frame got = run_pipeline(pl, f);
        const Frame want = chainref::run_frame(so, f);
        const Plane* gp[3] = {&got.y, &got.u, &got.v};
        const Plane* wp[3] = {&want.y, &want.u, &want.v};
        for (int c = 0; c < 3; ++c)
            for (size_t k = 0; k < gp[c]->data.size(); ++k) {
                const int d = std::abs(static_cast<int>(gp[c]->data[k]) -
                                       static_cast<int>(wp[c]->data[k]));
                if (d > 2) {
                    why = fmt("frame %d plane %d deviates by %d", i, c, d);
                    return false;
                }
            }
    }

    Plane clean(256, 256);
    for (int y = 0; y < 256; ++y)
        for (int x = 0; x < 256; ++x)
            clean.at(y, x) = static_cast<uint8_t>((x + y) / 2);
    std::mt19937 rng(1100);
    std::normal_distribution<double> noise(0.0, 5.0);
    Plane noisy = clean;
    for (auto& px : noisy.data)
        px = clip_u8(static_cast<int>(std::lround(px + noise(rng))));

    const Frame filtered = run_pipeline(pl, Frame::gray(noisy));
    const double before = psnr(clean, noisy), after = psnr(clean, filtered.y);
    if (!(after > before)) {
        why = fmt("PSNR %.4f -> %.4f dB", before, after);
        return false;
    }

    RdParams params;
    params.lambda_num = 0;
    params.block = 64;
    const RdResult res =
        rd_decide(Frame::gray(clean), Frame::gray(noisy), filtered, params);
    if (res.ssd_after > res.ssd_before) {
        why = "zero-lambda merge lost to the reconstruction";
        return false;
    }
    return true;
}

// 9. Counted ops are identical across repeats and worker counts; the energy
// table holds exactly the documented constants; nothing runs in float.
bool crit_determinism(std::string& why) {
    const Pipeline pl = make_default_pipeline(Sampling{4}, smoothing_oracles(), true);
    const Frame f = random_yuv(64, 64, 1200);

    OpCounter base;
    Frame out_base = run_pipeline(pl, f, &base);
    for (const char* threads : {"1", "4", "1"}) {
        ::setenv("LUTFILT_THREADS", threads, 1);
        OpCounter c;
        const Frame out = run_pipeline(pl, f, &c);
        ::unsetenv("LUTFILT_THREADS");
        if (!(c == base)) {
            why = fmt("op counts differ at LUTFILT_THREADS=%s", threads);
            return false;
        }
        if (out.y != out_base.y || out.u != out_base.u || out.v != out_base.v) {
            why = fmt("pixels differ at LUTFILT_THREADS=%s", threads);
            return false;
        }
    }
    if (base.get(OpKind::Add, OpWidth::Float32) != 0 ||
        base.get(OpKind::Mul, OpWidth::Float32) != 0) {
        why = "float ops counted on the integer path";
        return false;
    }

    const EnergyModel m;
    const std::array<double, 4> add{0.03, 0.05, 0.1, 0.9}, mul{0.2, 0.65, 3.1, 3.7};
    if (m.add_pj != add || m.mul_pj != mul) {
        why = "energy table drifted from the documented constants";
        return false;
    }
    return true;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        bool (*fn)(std::string&);
    };
    const Criterion criteria[] = {
        {1, "storage formulas", crit_storage},
        {2, "diagonal count", crit_diag_count},
        {3, "weight conservation + node exactness", crit_conservation},
        {4, "affine fidelity", crit_affine},
        {5, "compaction equivalence", crit_compaction},
        {6, "compression monotonicity", crit_compression},
        {7, "pipeline identity + equivariance", crit_identity},
        {8, "end-to-end oracle fidelity", crit_fidelity},
        {9, "ops/energy determinism", crit_determinism},
    };

    int rc = 0;
    for (const Criterion& c : criteria) {
        std::string why;
        bool ok = false;
        try {
            ok = c.fn(why);
        } catch (const std::exception& e) {
            ok = false;
            why = e.what();
        }
        std::printf("criterion %d (%s): %s%s%s\n", c.id, c.name, ok ? "PASS" : "FAIL",
                    why.empty() ? "" : " - ", why.c_str());
        if (!ok)
            rc = 1;
    }
    return rc;
}
