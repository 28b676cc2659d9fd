#include "lutfilt/lutgen.hpp"

#include <cmath>
#include <cstdlib>
#include <map>

namespace lutfilt {

namespace {

// floor division (C++ '/' truncates toward zero).
int div_floor(int a, int b) {
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

// round-half-up of a/b for b > 0
int round_half_up(int a, int b) {
    return div_floor(2 * a + b, 2 * b);
}

int clip_s8(int v) { return v < -128 ? -128 : (v > 127 ? 127 : v); }

}  // namespace

namespace oracles {

Oracle identity(int arity, int values) {
    Oracle o;
    o.name = "identity";
    o.arity = arity;
    o.values = values;
    o.fn = [values](const uint8_t* in, int* out) {
        for (int c = 0; c < values; ++c)
            out[c] = in[0];
    };
    return o;
}

Oracle box_average(int arity) {
    Oracle o;
    o.name = "box";
    o.arity = arity;
    o.fn = [arity](const uint8_t* in, int* out) {
        int sum = 0;
        for (int i = 0; i < arity; ++i)
            sum += in[i];
        out[0] = round_half_up(sum, arity);
    };
    return o;
}

Oracle weighted_average(std::vector<int> coeff_q8, int bias) {
    Oracle o;
    o.name = "weighted";
    o.arity = static_cast<int>(coeff_q8.size());
    o.fn = [coeff_q8, bias](const uint8_t* in, int* out) {
        int acc = 0;
        for (size_t i = 0; i < coeff_q8.size(); ++i)
            acc += coeff_q8[i] * in[i];
        out[0] = div_floor(acc + 128, 256) + bias;
    };
    return o;
}

Oracle edge_preserve(int arity, int threshold) {
    if (threshold < 0 || threshold > 255)
        throw std::invalid_argument("edge_preserve: threshold must be 0..255");
    Oracle o;
    o.name = "edge";
    o.arity = arity;
    o.fn = [arity, threshold](const uint8_t* in, int* out) {
        int sum = in[0], cnt = 1;
        for (int i = 1; i < arity; ++i) {
            if (std::abs(in[i] - in[0]) <= threshold) {
                sum += in[i];
                ++cnt;
            }
        }
        out[0] = round_half_up(sum, cnt);
    };
    return o;
}

Oracle offset(int arity, int num, int den) {
    if (arity < 2)
        throw std::invalid_argument("offset: needs at least 2 inputs");
    if (den <= 0)
        throw std::invalid_argument("offset: denominator must be positive");
    Oracle o;
    o.name = "offset";
    o.arity = arity;
    o.signedness = Signedness::SignedOffset;
    o.fn = [num, den](const uint8_t* in, int* out) {
        out[0] = clip_s8(round_half_up((in[1] - in[0]) * num, den));
    };
    return o;
}

Oracle channel_identity(int k) {
    Oracle o = identity(k, k);
    o.name = "chan-identity";
    o.fn = [k](const uint8_t* in, int* out) {
        for (int c = 0; c < k; ++c)
            out[c] = in[c];
    };
    return o;
}

Oracle channel_swap() {
    Oracle o;
    o.name = "chan-swap";
    o.arity = 2;
    o.values = 2;
    o.fn = [](const uint8_t* in, int* out) {
        out[0] = in[1];
        out[1] = in[0];
    };
    return o;
}

Oracle channel_mix(int self_q8) {
    if (self_q8 < 0 || self_q8 > 256)
        throw std::invalid_argument("channel_mix: mix factor must be 0..256");
    Oracle o;
    o.name = "chan-mix";
    o.arity = 2;
    o.values = 2;
    o.fn = [self_q8](const uint8_t* in, int* out) {
        out[0] = div_floor(self_q8 * in[0] + (256 - self_q8) * in[1] + 128, 256);
        out[1] = div_floor(self_q8 * in[1] + (256 - self_q8) * in[0] + 128, 256);
    };
    return o;
}

Oracle constant(int arity, int value, int values) {
    Oracle o;
    o.name = "constant";
    o.arity = arity;
    o.values = values;
    o.fn = [value, values](const uint8_t*, int* out) {
        for (int c = 0; c < values; ++c)
            out[c] = value;
    };
    return o;
}

namespace {

// "key=value" fields after the oracle name, comma separated; list values use
// '/' separators (e.g. c=128/64/32/32).
std::map<std::string, std::string> parse_fields(const std::string& s) {
    std::map<std::string, std::string> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t end = s.find(',', pos);
        if (end == std::string::npos)
            end = s.size();
        const std::string field = s.substr(pos, end - pos);
        const size_t eq = field.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("oracle spec: malformed field '" + field + "'");
        out[field.substr(0, eq)] = field.substr(eq + 1);
        pos = end + 1;
    }
    return out;
}

int to_int(const std::string& s) {
    size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size())
        throw std::invalid_argument("oracle spec: bad integer '" + s + "'");
    return v;
}

std::vector<int> to_int_list(const std::string& s) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t end = s.find('/', pos);
        if (end == std::string::npos)
            end = s.size();
        out.push_back(to_int(s.substr(pos, end - pos)));
        pos = end + 1;
    }
    return out;
}

int need_int(const std::map<std::string, std::string>& f, const std::string& key) {
    auto it = f.find(key);
    if (it == f.end())
        throw std::invalid_argument("oracle spec: missing field '" + key + "'");
    return to_int(it->second);
}

int opt_int(const std::map<std::string, std::string>& f, const std::string& key, int dflt) {
    auto it = f.find(key);
    return it == f.end() ? dflt : to_int(it->second);
}

void reject_unknown(const std::map<std::string, std::string>& f,
                    const std::vector<std::string>& allowed, const std::string& name) {
    for (const auto& [key, value] : f) {
        bool ok = false;
        for (const std::string& a : allowed)
            ok = ok || key == a;
        if (!ok)
            throw std::invalid_argument("oracle spec: unknown field '" + key + "' for " + name);
    }
}

}  // namespace

Oracle parse(const std::string& spec) {
    const size_t colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const auto fields =
        colon == std::string::npos ? std::map<std::string, std::string>{} : parse_fields(spec.substr(colon + 1));

    static const std::map<std::string, std::vector<std::string>> allowed = {
        {"identity", {"n", "v"}},     {"box", {"n"}},
        {"weighted", {"c", "b"}},     {"edge", {"n", "t"}},
        {"offset", {"n", "num", "den"}}, {"chan-identity", {"k"}},
        {"chan-swap", {}},            {"chan-mix", {"m"}},
        {"constant", {"n", "val", "v"}},
    };
    const auto ait = allowed.find(name);
    if (ait == allowed.end())
        throw std::invalid_argument("oracle spec: unknown oracle '" + name + "'");
    reject_unknown(fields, ait->second, name);

    if (name == "identity")
        return identity(need_int(fields, "n"), opt_int(fields, "v", 1));
    if (name == "box")
        return box_average(need_int(fields, "n"));
    if (name == "weighted") {
        auto it = fields.find("c");
        if (it == fields.end())
            throw std::invalid_argument("oracle spec: weighted needs c=<q8>/<q8>/...");
        return weighted_average(to_int_list(it->second), opt_int(fields, "b", 0));
    }
    if (name == "edge")
        return edge_preserve(need_int(fields, "n"), need_int(fields, "t"));
    if (name == "offset")
        return offset(need_int(fields, "n"), need_int(fields, "num"), need_int(fields, "den"));
    if (name == "chan-identity")
        return channel_identity(need_int(fields, "k"));
    if (name == "chan-swap")
        return channel_swap();
    if (name == "chan-mix")
        return channel_mix(need_int(fields, "m"));
    if (name == "constant")
        return constant(need_int(fields, "n"), need_int(fields, "val"), opt_int(fields, "v", 1));
    throw std::invalid_argument("oracle spec: unknown oracle '" + name + "'");
}

}  // namespace oracles

ClippedLut cache_clipped(const Oracle& o, Sampling s) {
    if (!o.fn)
        throw std::invalid_argument("cache_clipped: oracle has no function");
    ClippedLut lut(s, o.arity, o.values, o.signedness);
    const int L = s.node_count();
    const bool is_signed = o.signedness == Signedness::SignedOffset;

    int nodes[4] = {0, 0, 0, 0};
    uint8_t in[4] = {0, 0, 0, 0};
    int out[4];
    for (;;) {
        for (int d = 0; d < o.arity; ++d)
            in[d] = static_cast<uint8_t>(s.node_value(nodes[d]));
        o.eval(in, out);
        for (int c = 0; c < o.values; ++c) {
            const int v = is_signed ? clip_s8(out[c]) : clip_u8(out[c]);
            lut.set_value(nodes, c, v);
        }
        // odometer over the node grid, last dimension fastest
        int d = o.arity - 1;
        while (d >= 0 && ++nodes[d] == L)
            nodes[d--] = 0;
        if (d < 0)
            break;
    }
    return lut;
}

namespace {

uint64_t upow(uint64_t base, int exp) {
    uint64_t r = 1;
    for (int i = 0; i < exp; ++i)
        r *= base;
    return r;
}

}  // namespace

uint64_t storage_size_clipped(const StorageQuery& q) {
    q.sampling.validate();
    if (q.n < 1 || q.n > 4)
        throw std::invalid_argument("storage_size_clipped: n must be 1..4");
    if (q.V < 1)
        throw std::invalid_argument("storage_size_clipped: V must be >= 1");
    const uint64_t L = static_cast<uint64_t>(q.sampling.node_count());
    const uint64_t R = q.patterns > 0 ? q.patterns : 1;
    if (q.channels > 0) {
        const uint64_t K = q.channels;
        return (K * upow(L, q.channels) + K * R * upow(L, q.n)) * q.V;
    }
    const uint64_t P = q.stages > 0 ? q.stages : 1;
    return P * R * upow(L, q.n) * q.V;
}

uint64_t diag_count(int dw, int L) {
    if (L < 2)
        throw std::invalid_argument("diag_count: L must be >= 2");
    if (dw < 0 || dw >= L)
        throw std::invalid_argument("diag_count: dw must be 0..L-1");
    return static_cast<uint64_t>(2 * dw + 1) * L - static_cast<uint64_t>(dw) * (dw + 1);
}

CompactedSizes storage_size_compacted(Sampling s, int n, int V, int p, int dw, int Q) {
    s.validate();
    const int L = s.node_count();
    if (n < 2 || n > 4 || p < 2 || p > n)
        throw std::invalid_argument("storage_size_compacted: need 2 <= p <= n <= 4");
    if (dw < 1 || dw > L - 1)
        throw std::invalid_argument("storage_size_compacted: dw must be 1..L-1");
    if (Q < 1 || Q > 8 - s.q)
        throw std::invalid_argument("storage_size_compacted: Q must be 1..8-q");

    CompactedSizes sz;
    const uint64_t free_dims = upow(static_cast<uint64_t>(L), n - p);
    if (p == 2) {
        sz.diag = diag_count(dw, L) * free_dims * V;
    } else {
        sz.diag = static_cast<uint64_t>(L) * upow(2 * static_cast<uint64_t>(dw) + 1, p - 1) * free_dims * V;
    }
    Sampling coarse{s.q + Q};
    sz.nondiag = upow(static_cast<uint64_t>(coarse.node_count()), n) * V;
    return sz;
}

}  // namespace lutfilt
