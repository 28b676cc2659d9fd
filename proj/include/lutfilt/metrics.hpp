#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "lutfilt/core.hpp"

namespace lutfilt {

enum class OpWidth : int { Int8 = 0, Int16 = 1, Int32 = 2, Float32 = 3 };
enum class OpKind : int { Add = 0, Mul = 1 };

inline const char* op_width_name(OpWidth w) {
    switch (w) {
        case OpWidth::Int8: return "int8";
        case OpWidth::Int16: return "int16";
        case OpWidth::Int32: return "int32";
        default: return "float32";
    }
}

// Arithmetic-op tally for the retrieval/aggregation paths. Only adds and
// multiplies are counted, at the width of their operands; shifts, compares,
// clips and address arithmetic are free (see README for the full taxonomy).
// Counting is off whenever the hot path is handed a null counter.
struct OpCounter {
    std::array<std::array<uint64_t, 4>, 2> counts{};  // [kind][width]

    void add(OpWidth w, uint64_t k = 1) { counts[0][static_cast<int>(w)] += k; }
    void mul(OpWidth w, uint64_t k = 1) { counts[1][static_cast<int>(w)] += k; }
    uint64_t get(OpKind kind, OpWidth w) const {
        return counts[static_cast<int>(kind)][static_cast<int>(w)];
    }
    uint64_t total() const;
    void merge(const OpCounter& other);
    bool operator==(const OpCounter& other) const { return counts == other.counts; }
};

// Energy per operation in picojoules (45 nm estimates commonly used for
// accelerator back-of-envelope numbers).
struct EnergyModel {
    // indexed by OpWidth: int8, int16, int32, float32
    std::array<double, 4> add_pj{0.03, 0.05, 0.1, 0.9};
    std::array<double, 4> mul_pj{0.2, 0.65, 3.1, 3.7};

    double cost_pj(const OpCounter& c) const;
};

// Energy of a counted run divided by the pixel count.
double energy_per_pixel(const OpCounter& c, const EnergyModel& m, uint64_t pixels);

// Peak PSNR in dB between two equally sized planes (8-bit peak 255).
// Identical inputs return +infinity.
double psnr(const Plane& a, const Plane& b);

// Sum of squared differences; the workhorse behind psnr and RD decisions.
uint64_t ssd(const Plane& a, const Plane& b);

}  // namespace lutfilt
