#include "lutfilt/lut_io.hpp"

#include <cstring>

#include "lutfilt/fsio.hpp"
#include "lutfilt/lutgen.hpp"

namespace lutfilt {

uint64_t LutFile::payload_bytes() const {
    if (kind == LutKind::Compacted) {
        const CompactedSizes sz = storage_size_compacted(compacted.sampling, compacted.n, compacted.V,
                                                         compacted.p, compacted.dw, compacted.Q);
        return sz.total();
    }
    return static_cast<uint64_t>(clipped.values.size());
}

std::vector<uint8_t> serialize_lutf(const LutFile& f) {
    const bool compacted = f.kind == LutKind::Compacted;
    const int n = f.n();
    const int V = compacted ? f.compacted.V : f.clipped.V;
    const Signedness sg = compacted ? f.compacted.signedness : f.clipped.signedness;
    const Sampling s = compacted ? f.compacted.sampling : f.clipped.sampling;

    std::vector<uint8_t> out;
    out.reserve(lutf_header_bytes(n) + f.payload_bytes());
    const char magic[4] = {'L', 'U', 'T', 'F'};
    out.insert(out.end(), magic, magic + 4);
    out.push_back(static_cast<uint8_t>(kLutfVersion & 0xff));
    out.push_back(static_cast<uint8_t>(kLutfVersion >> 8));
    out.push_back(static_cast<uint8_t>(f.kind));
    out.push_back(static_cast<uint8_t>(sg));
    out.push_back(static_cast<uint8_t>(n));
    out.push_back(static_cast<uint8_t>(V));
    out.push_back(static_cast<uint8_t>(s.q));
    out.push_back(static_cast<uint8_t>(compacted ? f.compacted.dw : 0));
    out.push_back(static_cast<uint8_t>(compacted ? f.compacted.Q : 0));
    out.push_back(static_cast<uint8_t>(compacted ? f.compacted.p : 0));

    if (!f.pattern.offsets.empty() && static_cast<int>(f.pattern.offsets.size()) != n)
        throw std::invalid_argument("serialize_lutf: pattern arity does not match table");
    for (int i = 0; i < n; ++i) {
        const PatternOffset o =
            i < static_cast<int>(f.pattern.offsets.size()) ? f.pattern.offsets[i] : PatternOffset{0, 0};
        out.push_back(static_cast<uint8_t>(o.dy));
        out.push_back(static_cast<uint8_t>(o.dx));
    }

    if (compacted) {
        const std::vector<uint8_t> diag = pack_diag(f.compacted);
        out.insert(out.end(), diag.begin(), diag.end());
        out.insert(out.end(), f.compacted.nondiag.values.begin(), f.compacted.nondiag.values.end());
    } else {
        out.insert(out.end(), f.clipped.values.begin(), f.clipped.values.end());
    }
    return out;
}

LutFile parse_lutf(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 14 || std::memcmp(bytes.data(), "LUTF", 4) != 0)
        throw std::runtime_error("lutf: not a LUTF file");
    const uint16_t version = static_cast<uint16_t>(bytes[4] | (bytes[5] << 8));
    if (version != kLutfVersion)
        throw std::runtime_error("lutf: unsupported version " + std::to_string(version));

    LutFile f;
    const uint8_t kind = bytes[6];
    if (kind > 2)
        throw std::runtime_error("lutf: unknown table kind");
    f.kind = static_cast<LutKind>(kind);
    const uint8_t sg = bytes[7];
    if (sg > 1)
        throw std::runtime_error("lutf: unknown signedness");
    const int n = bytes[8];
    const int V = bytes[9];
    Sampling s{bytes[10]};
    const int dw = bytes[11], Q = bytes[12], p = bytes[13];
    if (n < 1 || n > 4 || V < 1 || V > 4)
        throw std::runtime_error("lutf: bad table geometry");
    s.validate();

    if (bytes.size() < lutf_header_bytes(n))
        throw std::runtime_error("lutf: truncated header");
    bool any_offset = false;
    for (int i = 0; i < n; ++i) {
        PatternOffset o;
        o.dy = static_cast<int8_t>(bytes[14 + 2 * i]);
        o.dx = static_cast<int8_t>(bytes[14 + 2 * i + 1]);
        f.pattern.offsets.push_back(o);
        any_offset = any_offset || o.dy != 0 || o.dx != 0;
    }
    if (!any_offset)
        f.pattern.offsets.clear();  // no geometry recorded (channel tables etc.)

    const size_t payload_off = lutf_header_bytes(n);
    const size_t payload_len = bytes.size() - payload_off;
    const Signedness sgn = static_cast<Signedness>(sg);

    if (f.kind == LutKind::Compacted) {
        CompactedLut& cl = f.compacted;
        cl.sampling = s;
        cl.n = n;
        cl.V = V;
        cl.signedness = sgn;
        cl.p = p;
        cl.dw = dw;
        cl.Q = Q;
        const CompactedSizes sz = storage_size_compacted(s, n, V, p, dw, Q);
        if (payload_len != sz.total())
            throw std::runtime_error("lutf: compacted payload size mismatch");
        std::vector<uint8_t> diag(bytes.begin() + payload_off, bytes.begin() + payload_off + sz.diag);
        cl.diag.clear();
        unpack_diag(cl, diag);
        cl.nondiag = ClippedLut(Sampling{s.q + Q}, n, V, sgn);
        std::memcpy(cl.nondiag.values.data(), bytes.data() + payload_off + sz.diag, sz.nondiag);
        cl.validate();
    } else {
        f.clipped = ClippedLut(s, n, V, sgn);
        if (payload_len != f.clipped.values.size())
            throw std::runtime_error("lutf: payload size mismatch");
        std::memcpy(f.clipped.values.data(), bytes.data() + payload_off, payload_len);
    }
    return f;
}

void save_lutf(const std::string& path, const LutFile& f) {
    write_file_atomic(path, serialize_lutf(f));
}

LutFile load_lutf(const std::string& path) {
    try {
        return parse_lutf(read_file(path));
    } catch (const std::exception& e) {
        // geometry checks may surface as invalid_argument; either way the
        // file is bad, so report it under the path
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace lutfilt
