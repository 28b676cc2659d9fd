#include "lutfilt/metrics.hpp"

#include <cmath>
#include <limits>

namespace lutfilt {

uint64_t OpCounter::total() const {
    uint64_t t = 0;
    for (const auto& row : counts)
        for (uint64_t v : row)
            t += v;
    return t;
}

void OpCounter::merge(const OpCounter& other) {
    for (int k = 0; k < 2; ++k)
        for (int w = 0; w < 4; ++w)
            counts[k][w] += other.counts[k][w];
}

double EnergyModel::cost_pj(const OpCounter& c) const {
    double pj = 0.0;
    for (int w = 0; w < 4; ++w) {
        pj += add_pj[w] * static_cast<double>(c.counts[0][w]);
        pj += mul_pj[w] * static_cast<double>(c.counts[1][w]);
    }
    return pj;
}

double energy_per_pixel(const OpCounter& c, const EnergyModel& m, uint64_t pixels) {
    if (pixels == 0)
        throw std::invalid_argument("energy_per_pixel: zero pixels");
    return m.cost_pj(c) / static_cast<double>(pixels);
}

uint64_t ssd(const Plane& a, const Plane& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("ssd: dimension mismatch");
    uint64_t acc = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const int d = static_cast<int>(a.data[i]) - static_cast<int>(b.data[i]);
        acc += static_cast<uint64_t>(d * d);
    }
    return acc;
}

double psnr(const Plane& a, const Plane& b) {
    if (a.empty())
        throw std::invalid_argument("psnr: empty plane");
    const uint64_t e = ssd(a, b);
    if (e == 0)
        return std::numeric_limits<double>::infinity();
    const double mse = static_cast<double>(e) / static_cast<double>(a.pixel_count());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace lutfilt
