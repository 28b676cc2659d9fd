#include "lutfilt/interp.hpp"

namespace lutfilt {

MsbLsb split_msb_lsb(uint8_t x, int q) {
    if (q < 0 || q > 8)
        throw std::invalid_argument("split_msb_lsb: q must be 0..8");
    MsbLsb r;
    r.msb = x >> q;
    r.lsb = x & ((1 << q) - 1);
    return r;
}

namespace {

// The top cell spans W-1 values (..., 240, 255) but the weight scale is W.
// Rescale its LSB by W/(W-1) with nearest rounding — a bare +1 for the upper
// half — so node retrieval and affine maps stay exact up to 255. Identity
// would otherwise come back one low for the final few codes.
inline int effective_lsb(int msb, int lsb, const Sampling& s) {
    if (s.q >= 1 && msb == (1 << (8 - s.q)) - 1 && lsb >= (s.interval() >> 1))
        return lsb + 1;
    return lsb;
}

}  // namespace

InterpCorners simplex_corners(const int* msb, const int* lsb, int ndim, Sampling s, OpCounter* c) {
    const int W = s.interval();
    InterpCorners k;
    k.ndim = ndim;
    k.count = ndim + 1;
    k.shift = s.q;

    int le[4];
    for (int d = 0; d < ndim; ++d)
        le[d] = effective_lsb(msb[d], lsb[d], s);

    // Vertex order: dimensions sorted by descending effective LSB; ties go to
    // the later dimension, which routes an all-equal tuple to the last rule
    // row (the t-z-y-x chain).
    int order[4];
    for (int d = 0; d < ndim; ++d)
        order[d] = ndim - 1 - d;
    for (int i = 1; i < ndim; ++i) {  // insertion sort, stable over the reversed seed
        const int dim = order[i];
        int j = i;
        while (j > 0 && le[order[j - 1]] < le[dim]) {
            order[j] = order[j - 1];
            --j;
        }
        order[j] = dim;
    }

    // Cumulative vertices: start at the base corner, then raise one sorted
    // dimension per step. Telescoping weights W-l(1), l(1)-l(2), ..., l(n).
    int code = 0;
    for (int d = 0; d < ndim; ++d)
        k.nodes[0][d] = msb[d];
    k.weights[0] = W - le[order[0]];
    for (int v = 1; v <= ndim; ++v) {
        code |= 1 << (ndim - 1 - order[v - 1]);
        for (int d = 0; d < ndim; ++d)
            k.nodes[v][d] = msb[d] + ((code >> (ndim - 1 - d)) & 1);
        k.weights[v] = v < ndim ? le[order[v - 1]] - le[order[v]] : le[order[ndim - 1]];
    }
    if (c)
        c->add(OpWidth::Int8, ndim);  // weight-construction subtractions
    return k;
}

InterpCorners cube_corners(const int* msb, const int* lsb, Sampling s, OpCounter* c) {
    const int W = s.interval();
    InterpCorners k;
    k.ndim = 3;
    k.count = 8;
    k.shift = 3 * s.q;

    int hi[3], lo[3];
    for (int d = 0; d < 3; ++d) {
        hi[d] = effective_lsb(msb[d], lsb[d], s);
        lo[d] = W - hi[d];
    }
    if (c) {
        c->add(OpWidth::Int8, 3);   // the three complements
        c->mul(OpWidth::Int32, 16);  // 8 corner weights, two multiplies each
    }
    for (int corner = 0; corner < 8; ++corner) {
        int w = 1;
        for (int d = 0; d < 3; ++d) {
            const int bit = (corner >> (2 - d)) & 1;
            k.nodes[corner][d] = msb[d] + bit;
            w *= bit ? hi[d] : lo[d];
        }
        k.weights[corner] = w;
    }
    return k;
}

SimplexRule simplex_rule4(const std::array<int, 4>& lsb, int W) {
    int msb[4] = {0, 0, 0, 0};
    Sampling s;
    s.q = 0;
    while ((1 << s.q) != W) {
        if (++s.q > 8)
            throw std::invalid_argument("simplex_rule4: W must be a power of two <= 256");
    }
    // msb 0 everywhere: below the top cell, so the raw LSBs are used as-is.
    InterpCorners k = simplex_corners(msb, lsb.data(), 4, s, nullptr);
    SimplexRule r;
    for (int v = 0; v < 5; ++v) {
        r.weights[v] = k.weights[v];
        uint8_t code = 0;
        for (int d = 0; d < 4; ++d)
            code |= static_cast<uint8_t>((k.nodes[v][d] - msb[d]) << (3 - d));
        r.vertex_codes[v] = code;
    }
    // Recover the sorted order from the vertex chain.
    for (int v = 1; v <= 4; ++v) {
        const uint8_t gained = r.vertex_codes[v] ^ r.vertex_codes[v - 1];
        for (int d = 0; d < 4; ++d)
            if (gained & (1 << (3 - d)))
                r.order[v - 1] = d;
    }
    return r;
}

void interp_eval(const ClippedLut& lut, const InterpCorners& k, int* out, OpCounter* c) {
    const int half = k.shift > 0 ? 1 << (k.shift - 1) : 0;
    size_t idx[8];
    for (int v = 0; v < k.count; ++v)
        idx[v] = lut.index(k.nodes[v].data()) * lut.V;
    for (int ch = 0; ch < lut.V; ++ch) {
        int acc = 0;
        for (int v = 0; v < k.count; ++v)
            acc += k.weights[v] * lut.raw_to_value(lut.values[idx[v] + ch]);
        out[ch] = (acc + half) >> k.shift;  // arithmetic shift: round-half-up
    }
    if (c) {
        c->mul(OpWidth::Int32, static_cast<uint64_t>(k.count) * lut.V);
        c->add(OpWidth::Int32, static_cast<uint64_t>(k.count) * lut.V);  // n accumulates + rounding
    }
}

void retrieve_clipped(const ClippedLut& lut, const uint8_t* in, int* out, OpCounter* c) {
    int msb[4], lsb[4];
    for (int d = 0; d < lut.n; ++d) {
        const MsbLsb m = split_msb_lsb(in[d], lut.sampling.q);
        msb[d] = m.msb;
        lsb[d] = m.lsb;
    }
    const InterpCorners k = lut.n == 3 ? cube_corners(msb, lsb, lut.sampling, c)
                                       : simplex_corners(msb, lsb, lut.n, lut.sampling, c);
    interp_eval(lut, k, out, c);
}

int trilinear(const ClippedLut& lut, uint8_t x, uint8_t y, uint8_t z, OpCounter* c) {
    if (lut.n != 3)
        throw std::invalid_argument("trilinear: table is not 3-dimensional");
    const uint8_t in[3] = {x, y, z};
    int out[4];
    retrieve_clipped(lut, in, out, c);
    return out[0];
}

int simplex4(const ClippedLut& lut, uint8_t x, uint8_t y, uint8_t z, uint8_t t, OpCounter* c) {
    if (lut.n != 4)
        throw std::invalid_argument("simplex4: table is not 4-dimensional");
    const uint8_t in[4] = {x, y, z, t};
    int out[4];
    retrieve_clipped(lut, in, out, c);
    return out[0];
}

}  // namespace lutfilt
