#include "lutfilt/compact.hpp"

#include <cstring>

namespace lutfilt {

bool is_diagonal(const int* nodes, int p, int dw) {
    if (p < 2)
        throw std::invalid_argument("is_diagonal: p must be >= 2");
    if (dw < 0)
        throw std::invalid_argument("is_diagonal: dw must be >= 0");
    for (int k = 1; k < p; ++k) {
        const int d = nodes[k] - nodes[0];
        if (d > dw || d < -dw)
            return false;
    }
    return true;
}

int diag_address_2d(int i0, int i1, int dw) {
    const int r = i0 - i1 + dw;
    if (r < 0 || r > 2 * dw)
        throw std::invalid_argument("diag_address_2d: pair is off the diagonal");
    return i1 * (2 * dw + 1) + r - 1;
}

namespace {

size_t free_count(const CompactedLut& lut) {
    size_t cnt = 1;
    for (int k = lut.p; k < lut.n; ++k)
        cnt *= static_cast<size_t>(lut.sampling.node_count());
    return cnt;
}

// Row of the rectangular diagonal block for leading nodes known to be (or
// clamped onto) the band.
size_t diag_row(const CompactedLut& lut, const int* nodes) {
    const int band = 2 * lut.dw + 1;
    if (lut.p == 2)
        return static_cast<size_t>(diag_address_2d(nodes[0], nodes[1], lut.dw));
    size_t row = static_cast<size_t>(nodes[0]);
    for (int k = 1; k < lut.p; ++k)
        row = row * band + static_cast<size_t>(nodes[k] - nodes[0] + lut.dw);
    return row;
}

size_t free_index(const CompactedLut& lut, const int* nodes) {
    const int L = lut.sampling.node_count();
    size_t idx = 0;
    for (int k = lut.p; k < lut.n; ++k)
        idx = idx * L + static_cast<size_t>(nodes[k]);
    return idx;
}

}  // namespace

CompactedLut compact_lut(const ClippedLut& src, int p, int dw, int Q) {
    CompactedLut out;
    out.sampling = src.sampling;
    out.n = src.n;
    out.V = src.V;
    out.signedness = src.signedness;
    out.p = p;
    out.dw = dw;
    out.Q = Q;

    const int L = src.sampling.node_count();
    const int band = 2 * dw + 1;
    const size_t free_cnt = [&] {
        size_t cnt = 1;
        for (int k = p; k < src.n; ++k)
            cnt *= static_cast<size_t>(L);
        return cnt;
    }();
    const size_t block = free_cnt * src.V;

    // Sanity before any allocation; full validate() runs at the end.
    if (src.n < 2)
        throw std::invalid_argument("compact_lut: source must be at least 2-dimensional");
    if (p < 2 || p > src.n || dw < 1 || dw > L - 1 || Q < 1 || Q > 8 - src.sampling.q)
        throw std::invalid_argument("compact_lut: bad compaction parameters");

    out.diag.assign(out.diag_rows() * block, 0);

    // Diagonal band at full sampling. Leading combos walk (i0 or i1, r...)
    // with off-band neighbor indices clamped into range; each combo copies
    // the whole contiguous free-dimension slice from the source.
    if (p == 2) {
        for (int i1 = 0; i1 < L; ++i1) {
            for (int r = 0; r < band; ++r) {
                const long addr = static_cast<long>(i1) * band + r - 1;
                if (addr < 0)
                    continue;  // the (0,0,dw=...) phantom below address zero
                const int i0 = std::clamp(i1 + r - dw, 0, L - 1);
                const size_t lead = static_cast<size_t>(i0) * L + i1;
                std::memcpy(&out.diag[static_cast<size_t>(addr) * block],
                            &src.values[lead * block], block);
            }
        }
    } else {
        // odometer over (i0, r_1 .. r_{p-1})
        std::vector<int> cursor(p, 0);
        size_t row = 0;
        for (;;) {
            size_t lead = static_cast<size_t>(cursor[0]);
            for (int k = 1; k < p; ++k)
                lead = lead * L + static_cast<size_t>(std::clamp(cursor[0] + cursor[k] - dw, 0, L - 1));
            std::memcpy(&out.diag[row * block], &src.values[lead * block], block);
            ++row;
            int d = p - 1;
            while (d >= 0 && ++cursor[d] == (d == 0 ? L : band))
                cursor[d--] = 0;
            if (d < 0)
                break;
        }
    }

    // Coarse fallback: every 2^Q-th node of the source grid. The stride lands
    // exactly on the source's top node, so the 255 entry is preserved.
    Sampling coarse{src.sampling.q + Q};
    out.nondiag = ClippedLut(coarse, src.n, src.V, src.signedness);
    const int Lc = coarse.node_count();
    const int stride = 1 << Q;
    std::vector<int> cnode(src.n, 0);
    size_t centry = 0;
    for (;;) {
        size_t sidx = 0;
        for (int d = 0; d < src.n; ++d)
            sidx = sidx * L + static_cast<size_t>(cnode[d] * stride);
        std::memcpy(&out.nondiag.values[centry * src.V], &src.values[sidx * src.V],
                    static_cast<size_t>(src.V));
        ++centry;
        int d = src.n - 1;
        while (d >= 0 && ++cnode[d] == Lc)
            cnode[d--] = 0;
        if (d < 0)
            break;
    }

    out.validate();
    return out;
}

void retrieve_separable(const CompactedLut& lut, const uint8_t* in, int* out, OpCounter* c) {
    int msb[4], lsb[4];
    for (int d = 0; d < lut.n; ++d) {
        const MsbLsb m = split_msb_lsb(in[d], lut.sampling.q);
        msb[d] = m.msb;
        lsb[d] = m.lsb;
    }
    const InterpCorners k = lut.n == 3 ? cube_corners(msb, lsb, lut.sampling, c)
                                       : simplex_corners(msb, lsb, lut.n, lut.sampling, c);

    // Route through the diagonal table only if the entire positive-weight
    // support sits on the band.
    bool on_band = true;
    for (int v = 0; v < k.count && on_band; ++v) {
        if (k.weights[v] <= 0)
            continue;
        for (int kk = 1; kk < lut.p; ++kk) {
            if (c)
                c->add(OpWidth::Int8, 1);  // band-rule subtraction
            const int d = k.nodes[v][kk] - k.nodes[v][0];
            if (d > lut.dw || d < -lut.dw) {
                on_band = false;
                break;
            }
        }
    }

    if (!on_band) {
        retrieve_clipped(lut.nondiag, in, out, c);
        return;
    }

    const size_t fcnt = free_count(lut);
    const int half = k.shift > 0 ? 1 << (k.shift - 1) : 0;
    size_t idx[8];
    int active = 0;
    int weights[8];
    for (int v = 0; v < k.count; ++v) {
        if (k.weights[v] <= 0)
            continue;  // zero-weight corners may fall off the band; never read them
        idx[active] = (diag_row(lut, k.nodes[v].data()) * fcnt + free_index(lut, k.nodes[v].data())) * lut.V;
        weights[active] = k.weights[v];
        ++active;
    }
    for (int ch = 0; ch < lut.V; ++ch) {
        int acc = 0;
        for (int v = 0; v < active; ++v)
            acc += weights[v] * lut.raw_to_value(lut.diag[idx[v] + ch]);
        out[ch] = (acc + half) >> k.shift;
    }
    if (c) {
        c->mul(OpWidth::Int32, static_cast<uint64_t>(active) * lut.V);
        c->add(OpWidth::Int32, static_cast<uint64_t>(active) * lut.V);
    }
}

std::vector<uint8_t> pack_diag(const CompactedLut& lut) {
    if (lut.p != 2)
        return lut.diag;
    const int L = lut.sampling.node_count();
    const int band = 2 * lut.dw + 1;
    const size_t block = free_count(lut) * lut.V;
    std::vector<uint8_t> packed;
    packed.reserve(diag_count(lut.dw, L) * block);
    for (int i1 = 0; i1 < L; ++i1) {
        for (int r = 0; r < band; ++r) {
            const int i0 = i1 + r - lut.dw;
            if (i0 < 0 || i0 >= L)
                continue;  // trimmed band corner: not a stored entry
            const size_t row = static_cast<size_t>(i1) * band + r - 1;
            packed.insert(packed.end(), lut.diag.begin() + row * block,
                          lut.diag.begin() + (row + 1) * block);
        }
    }
    return packed;
}

void unpack_diag(CompactedLut& lut, const std::vector<uint8_t>& packed) {
    const size_t block = free_count(lut) * lut.V;
    if (lut.p != 2) {
        if (packed.size() != lut.diag_rows() * block)
            throw std::runtime_error("unpack_diag: diagonal payload size mismatch");
        lut.diag = packed;
        return;
    }
    const int L = lut.sampling.node_count();
    const int band = 2 * lut.dw + 1;
    if (packed.size() != diag_count(lut.dw, L) * block)
        throw std::runtime_error("unpack_diag: diagonal payload size mismatch");
    lut.diag.assign(lut.diag_rows() * block, 0);
    size_t cursor = 0;
    for (int i1 = 0; i1 < L; ++i1) {
        for (int r = 0; r < band; ++r) {
            const int i0 = i1 + r - lut.dw;
            if (i0 < 0 || i0 >= L)
                continue;
            const size_t row = static_cast<size_t>(i1) * band + r - 1;
            std::memcpy(&lut.diag[row * block], &packed[cursor], block);
            cursor += block;
        }
    }
    // Rebuild the clamped copies that pad the trimmed corners of the
    // rectangle (identical bytes by construction, so round trips are exact).
    for (int i1 = 0; i1 < L; ++i1) {
        for (int r = 0; r < band; ++r) {
            const int i0 = i1 + r - lut.dw;
            if (i0 >= 0 && i0 < L)
                continue;
            const long addr = static_cast<long>(i1) * band + r - 1;
            if (addr < 0)
                continue;
            const size_t src = static_cast<size_t>(diag_address_2d(std::clamp(i0, 0, L - 1), i1, lut.dw));
            std::memcpy(&lut.diag[static_cast<size_t>(addr) * block], &lut.diag[src * block], block);
        }
    }
}

}  // namespace lutfilt
