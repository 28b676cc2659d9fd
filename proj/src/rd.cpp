#include "lutfilt/rd.hpp"

#include <numeric>

namespace lutfilt {

Rational parse_rational(const std::string& s) {
    if (s.empty())
        throw std::invalid_argument("rational: empty string");
    const size_t slash = s.find('/');
    auto to_i64 = [](const std::string& t) {
        size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(t, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("rational: bad number '" + t + "'");
        }
        if (used != t.size())
            throw std::invalid_argument("rational: bad number '" + t + "'");
        return static_cast<int64_t>(v);
    };

    Rational r;
    if (slash != std::string::npos) {
        r.num = to_i64(s.substr(0, slash));
        r.den = to_i64(s.substr(slash + 1));
    } else if (s.find('.') != std::string::npos) {
        const size_t dot = s.find('.');
        const std::string frac = s.substr(dot + 1);
        if (frac.empty() || frac.size() > 9)
            throw std::invalid_argument("rational: unsupported decimal '" + s + "'");
        int64_t scale = 1;
        for (size_t i = 0; i < frac.size(); ++i)
            scale *= 10;
        const std::string whole = s.substr(0, dot);
        r.num = (whole.empty() ? 0 : to_i64(whole)) * scale + to_i64(frac);
        r.den = scale;
    } else {
        r.num = to_i64(s);
        r.den = 1;
    }
    if (r.den <= 0 || r.num < 0)
        throw std::invalid_argument("rational: lambda must be non-negative with positive denominator");
    const int64_t g = std::gcd(r.num, r.den);
    if (g > 1) {
        r.num /= g;
        r.den /= g;
    }
    return r;
}

namespace {

uint64_t region_ssd(const Plane& a, const Plane& b, int y0, int y1, int x0, int x1) {
    uint64_t acc = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const int d = static_cast<int>(a.at(y, x)) - static_cast<int>(b.at(y, x));
            acc += static_cast<uint64_t>(d * d);
        }
    }
    return acc;
}

void copy_region(Plane& dst, const Plane& src, int y0, int y1, int x0, int x1) {
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            dst.at(y, x) = src.at(y, x);
}

struct Rect {
    int y0, y1, x0, x1;
};

Rect chroma_rect(const Rect& r) {
    return Rect{r.y0 / 2, (r.y1 + 1) / 2, r.x0 / 2, (r.x1 + 1) / 2};
}

}  // namespace

RdResult rd_decide(const Frame& orig, const Frame& recon, const Frame& filt, const RdParams& params) {
    if (orig.format != recon.format || orig.format != filt.format)
        throw std::invalid_argument("rd_decide: frame format mismatch");
    if (orig.y.width != recon.y.width || orig.y.height != recon.y.height ||
        orig.y.width != filt.y.width || orig.y.height != filt.y.height)
        throw std::invalid_argument("rd_decide: frame size mismatch");
    if (params.block < 1 || params.flag_bits < 0 || params.lambda_den < 1 || params.lambda_num < 0)
        throw std::invalid_argument("rd_decide: bad parameters");

    const bool has_chroma = orig.format == ChromaFormat::Yuv420;
    const int B = params.block;
    RdResult res;
    res.merged = recon;  // start from the no-filter hypothesis
    res.blocks_x = (orig.y.width + B - 1) / B;
    res.blocks_y = (orig.y.height + B - 1) / B;

    const bool joint = params.joint || !has_chroma;
    res.flags_y.assign(static_cast<size_t>(res.blocks_x) * res.blocks_y, 0);
    if (!joint) {
        res.flags_u.assign(res.flags_y.size(), 0);
        res.flags_v.assign(res.flags_y.size(), 0);
    }

    // filtered wins iff SSD_on*den + num*bits < SSD_off*den (exact in int64)
    auto filtered_wins = [&](uint64_t ssd_off, uint64_t ssd_on) {
        const __int128 on = static_cast<__int128>(ssd_on) * params.lambda_den +
                            static_cast<__int128>(params.lambda_num) * params.flag_bits;
        const __int128 off = static_cast<__int128>(ssd_off) * params.lambda_den;
        return on < off;
    };

    for (int by = 0; by < res.blocks_y; ++by) {
        for (int bx = 0; bx < res.blocks_x; ++bx) {
            const Rect ry{by * B, std::min(orig.y.height, (by + 1) * B), bx * B,
                          std::min(orig.y.width, (bx + 1) * B)};
            const Rect rc = chroma_rect(ry);
            const size_t bi = static_cast<size_t>(by) * res.blocks_x + bx;

            const uint64_t y_off = region_ssd(orig.y, recon.y, ry.y0, ry.y1, ry.x0, ry.x1);
            const uint64_t y_on = region_ssd(orig.y, filt.y, ry.y0, ry.y1, ry.x0, ry.x1);

            if (joint) {
                uint64_t off_sum = y_off, on_sum = y_on;
                if (has_chroma) {
                    off_sum += region_ssd(orig.u, recon.u, rc.y0, rc.y1, rc.x0, rc.x1) +
                               region_ssd(orig.v, recon.v, rc.y0, rc.y1, rc.x0, rc.x1);
                    on_sum += region_ssd(orig.u, filt.u, rc.y0, rc.y1, rc.x0, rc.x1) +
                              region_ssd(orig.v, filt.v, rc.y0, rc.y1, rc.x0, rc.x1);
                }
                res.ssd_before += off_sum;
                res.flag_bits += params.flag_bits;
                if (filtered_wins(off_sum, on_sum)) {
                    res.flags_y[bi] = 1;
                    copy_region(res.merged.y, filt.y, ry.y0, ry.y1, ry.x0, ry.x1);
                    if (has_chroma) {
                        copy_region(res.merged.u, filt.u, rc.y0, rc.y1, rc.x0, rc.x1);
                        copy_region(res.merged.v, filt.v, rc.y0, rc.y1, rc.x0, rc.x1);
                    }
                    res.ssd_after += on_sum;
                } else {
                    res.ssd_after += off_sum;
                }
            } else {
                res.ssd_before += y_off;
                res.flag_bits += params.flag_bits;
                if (filtered_wins(y_off, y_on)) {
                    res.flags_y[bi] = 1;
                    copy_region(res.merged.y, filt.y, ry.y0, ry.y1, ry.x0, ry.x1);
                    res.ssd_after += y_on;
                } else {
                    res.ssd_after += y_off;
                }
                const uint64_t u_off = region_ssd(orig.u, recon.u, rc.y0, rc.y1, rc.x0, rc.x1);
                const uint64_t u_on = region_ssd(orig.u, filt.u, rc.y0, rc.y1, rc.x0, rc.x1);
                res.ssd_before += u_off;
                res.flag_bits += params.flag_bits;
                if (filtered_wins(u_off, u_on)) {
                    res.flags_u[bi] = 1;
                    copy_region(res.merged.u, filt.u, rc.y0, rc.y1, rc.x0, rc.x1);
                    res.ssd_after += u_on;
                } else {
                    res.ssd_after += u_off;
                }
                const uint64_t v_off = region_ssd(orig.v, recon.v, rc.y0, rc.y1, rc.x0, rc.x1);
                const uint64_t v_on = region_ssd(orig.v, filt.v, rc.y0, rc.y1, rc.x0, rc.x1);
                res.ssd_before += v_off;
                res.flag_bits += params.flag_bits;
                if (filtered_wins(v_off, v_on)) {
                    res.flags_v[bi] = 1;
                    copy_region(res.merged.v, filt.v, rc.y0, rc.y1, rc.x0, rc.x1);
                    res.ssd_after += v_on;
                } else {
                    res.ssd_after += v_off;
                }
            }
        }
    }
    return res;
}

}  // namespace lutfilt
