#include "lutfilt/core.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace lutfilt {

Plane::Plane(int w, int h, uint8_t fill) : width(w), height(h) {
    if (w < 0 || h < 0)
        throw std::invalid_argument("Plane: negative dimensions");
    data.assign(static_cast<size_t>(w) * h, fill);
}

uint8_t pad_fetch(const Plane& p, int y, int x) {
    if (p.empty())
        throw std::invalid_argument("pad_fetch: empty plane");
    const int cy = std::clamp(y, 0, p.height - 1);
    const int cx = std::clamp(x, 0, p.width - 1);
    return p.at(cy, cx);
}

Plane rot90(const Plane& p) {
    Plane out(p.height, p.width);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.at(y, x) = p.at(x, p.width - 1 - y);
    return out;
}

bool operator==(const Plane& a, const Plane& b) {
    return a.width == b.width && a.height == b.height && a.data == b.data;
}

Frame Frame::gray(Plane luma) {
    Frame f;
    f.format = ChromaFormat::GrayOnly;
    f.y = std::move(luma);
    return f;
}

Frame Frame::yuv420(Plane luma, Plane cb, Plane cr) {
    const int cw = (luma.width + 1) / 2;
    const int ch = (luma.height + 1) / 2;
    if (cb.width != cw || cb.height != ch || cr.width != cw || cr.height != ch)
        throw std::invalid_argument("Frame: chroma planes must be ceil(luma/2) sized");
    Frame f;
    f.format = ChromaFormat::Yuv420;
    f.y = std::move(luma);
    f.u = std::move(cb);
    f.v = std::move(cr);
    return f;
}

void Pattern::validate(int half_window) const {
    if (offsets.empty())
        throw std::invalid_argument("Pattern: no offsets");
    if (!(offsets[0] == PatternOffset{0, 0}))
        throw std::invalid_argument("Pattern: first offset must be the target (0,0)");
    for (size_t i = 0; i < offsets.size(); ++i) {
        const auto& o = offsets[i];
        if (std::abs(o.dy) > half_window || std::abs(o.dx) > half_window)
            throw std::invalid_argument("Pattern: offset outside the reference window");
        for (size_t j = i + 1; j < offsets.size(); ++j)
            if (offsets[j] == o)
                throw std::invalid_argument("Pattern: duplicate offset");
    }
}

PatternOffset rotate_offset(PatternOffset o) {
    // rot90() maps in(y,x) to out(W-1-x, y); a (dy,dx) step around a pixel
    // therefore becomes (-dx, dy) around its image.
    return PatternOffset{static_cast<int8_t>(-o.dx), static_cast<int8_t>(o.dy)};
}

Pattern rotate_pattern(const Pattern& p) {
    Pattern r;
    r.id = p.id;
    r.offsets.reserve(p.offsets.size());
    for (auto o : p.offsets)
        r.offsets.push_back(rotate_offset(o));
    return r;
}

Pattern default_pattern(int id) {
    static const int8_t table[8][4][2] = {
        {{0, 0}, {0, 1}, {1, 0}, {1, 1}},  // 1: immediate right/down block
        {{0, 0}, {0, 2}, {2, 0}, {2, 2}},  // 2: dilated block
        {{0, 0}, {1, 1}, {1, 2}, {2, 1}},  // 3
        {{0, 0}, {1, 1}, {2, 2}, {0, 2}},  // 4
        {{0, 0}, {1, 1}, {2, 2}, {2, 0}},  // 5
        {{0, 0}, {2, 0}, {2, 1}, {2, 2}},  // 6: bottom row
        {{0, 0}, {0, 2}, {1, 2}, {2, 2}},  // 7: right column
        {{0, 0}, {1, 0}, {0, 1}, {2, 2}},  // 8
    };
    if (id < 1 || id > 8)
        throw std::invalid_argument("default_pattern: id must be 1..8");
    Pattern p;
    p.id = id;
    for (const auto& o : table[id - 1])
        p.offsets.push_back(PatternOffset{o[0], o[1]});
    return p;
}

void Sampling::validate() const {
    if (q < 0 || q > 8)
        throw std::invalid_argument("Sampling: q must be 0..8");
}

ClippedLut::ClippedLut(Sampling s, int n_, int V_, Signedness sg)
    : sampling(s), n(n_), V(V_), signedness(sg) {
    sampling.validate();
    if (n < 1 || n > 4)
        throw std::invalid_argument("ClippedLut: n must be 1..4");
    if (V < 1 || V > 4)
        throw std::invalid_argument("ClippedLut: V must be 1..4");
    values.assign(entry_count() * V, 0);
}

size_t ClippedLut::entry_count() const {
    size_t c = 1;
    for (int i = 0; i < n; ++i)
        c *= static_cast<size_t>(sampling.node_count());
    return c;
}

size_t ClippedLut::index(const int* nodes) const {
    const int L = sampling.node_count();
    size_t idx = 0;
    for (int i = 0; i < n; ++i) {
        const int v = nodes[i];
        if (v < 0 || v >= L)
            throw std::out_of_range("ClippedLut: node index out of range");
        idx = idx * L + v;
    }
    return idx;
}

void ClippedLut::set_value(const int* nodes, int ch, int v) {
    const int lo = signedness == Signedness::SignedOffset ? -128 : 0;
    const int hi = signedness == Signedness::SignedOffset ? 127 : 255;
    if (v < lo || v > hi)
        throw std::invalid_argument("ClippedLut: value out of range for signedness");
    values[index(nodes) * V + ch] = static_cast<uint8_t>(v & 0xff);
}

size_t CompactedLut::diag_rows() const {
    const size_t L = sampling.node_count();
    const size_t band = 2 * static_cast<size_t>(dw) + 1;
    size_t rows = L;
    for (int k = 1; k < p; ++k)
        rows *= band;
    return rows;
}

void CompactedLut::validate() const {
    sampling.validate();
    const int L = sampling.node_count();
    if (n < 2 || n > 4)
        throw std::invalid_argument("CompactedLut: n must be 2..4");
    if (p < 2 || p > n)
        throw std::invalid_argument("CompactedLut: p must be 2..n");
    if (dw < 1 || dw > L - 1)
        throw std::invalid_argument("CompactedLut: dw must be 1..L-1");
    if (Q < 1 || Q > 8 - sampling.q)
        throw std::invalid_argument("CompactedLut: Q must be 1..8-q");
    size_t free_dims = 1;
    for (int k = p; k < n; ++k)
        free_dims *= static_cast<size_t>(L);
    if (diag.size() != diag_rows() * free_dims * V)
        throw std::invalid_argument("CompactedLut: diagonal table size mismatch");
    if (nondiag.sampling.q != sampling.q + Q || nondiag.n != n || nondiag.V != V)
        throw std::invalid_argument("CompactedLut: fallback table geometry mismatch");
}

StageWeights StageWeights::uniform(int count) {
    if (count < 1)
        throw std::invalid_argument("StageWeights: need at least one pattern");
    StageWeights s;
    s.w.assign(count, 256 / count);
    s.w.back() = 256 - (256 / count) * (count - 1);
    s.validate();
    return s;
}

StageWeights StageWeights::from_real(const std::vector<double>& r) {
    if (r.empty())
        throw std::invalid_argument("StageWeights: need at least one pattern");
    double sum = 0.0;
    for (double v : r) {
        if (v < 0.0)
            throw std::invalid_argument("StageWeights: negative weight");
        sum += v;
    }
    if (sum <= 0.0)
        throw std::invalid_argument("StageWeights: all weights zero");
    StageWeights s;
    s.w.resize(r.size());
    int acc = 0;
    for (size_t i = 0; i + 1 < r.size(); ++i) {
        s.w[i] = static_cast<int>(r[i] / sum * 256.0 + 0.5);
        acc += s.w[i];
    }
    s.w.back() = 256 - acc;
    s.validate();
    return s;
}

void StageWeights::validate() const {
    int sum = 0;
    for (int v : w) {
        if (v < 0 || v > 256)
            throw std::invalid_argument("StageWeights: weight outside [0,256]");
        sum += v;
    }
    if (sum != 256)
        throw std::invalid_argument("StageWeights: weights must sum to 256");
}

int worker_count() {
    if (const char* env = std::getenv("LUTFILT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1)
            return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void parallel_rows(int height, const std::function<void(int, int, int)>& fn) {
    if (height <= 0)
        return;
    const int workers = std::min(worker_count(), height);
    if (workers <= 1 || height <= 1) {
        fn(0, 0, height);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (height + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int y0 = w * chunk;
        const int y1 = std::min(height, y0 + chunk);
        if (y0 >= y1)
            break;
        pool.emplace_back([&fn, w, y0, y1] { fn(w, y0, y1); });
    }
    for (auto& t : pool)
        t.join();
}

}  // namespace lutfilt
