#include <doctest.h>

#include <cmath>
#include <random>

#include "lutfilt/metrics.hpp"

using namespace lutfilt;

TEST_CASE("op counter tallies and merges") {
    OpCounter c;
    CHECK(c.total() == 0);
    c.add(OpWidth::Int8, 10);
    c.add(OpWidth::Int32);
    c.mul(OpWidth::Int16, 5);
    CHECK(c.get(OpKind::Add, OpWidth::Int8) == 10);
    CHECK(c.get(OpKind::Add, OpWidth::Int32) == 1);
    CHECK(c.get(OpKind::Mul, OpWidth::Int16) == 5);
    CHECK(c.get(OpKind::Mul, OpWidth::Float32) == 0);
    CHECK(c.total() == 16);

    OpCounter d;
    d.add(OpWidth::Int8, 2);
    d.mul(OpWidth::Int16, 1);
    c.merge(d);
    CHECK(c.get(OpKind::Add, OpWidth::Int8) == 12);
    CHECK(c.get(OpKind::Mul, OpWidth::Int16) == 6);
    CHECK(c.total() == 19);

    OpCounter e = c;
    CHECK(e == c);
    e.add(OpWidth::Int8);
    CHECK(!(e == c));
}

TEST_CASE("energy model pins the per-op costs") {
    EnergyModel m;
    // the 45 nm constants, verbatim
    CHECK(m.add_pj[0] == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(m.add_pj[1] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(m.add_pj[2] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(m.add_pj[3] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(m.mul_pj[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(m.mul_pj[1] == doctest::Approx(0.65).epsilon(1e-12));
    CHECK(m.mul_pj[2] == doctest::Approx(3.1).epsilon(1e-12));
    CHECK(m.mul_pj[3] == doctest::Approx(3.7).epsilon(1e-12));

    OpCounter c;
    CHECK(m.cost_pj(c) == 0.0);

    c.add(OpWidth::Int8, 100);
    CHECK(m.cost_pj(c) == doctest::Approx(3.0));
    c.mul(OpWidth::Int32, 10);
    CHECK(m.cost_pj(c) == doctest::Approx(3.0 + 31.0));

    // one int32 multiply per pixel over 100 pixels
    OpCounter per_px;
    per_px.mul(OpWidth::Int32, 100);
    CHECK(energy_per_pixel(per_px, m, 100) == doctest::Approx(3.1));
    CHECK_THROWS_AS(energy_per_pixel(per_px, m, 0), std::invalid_argument);
}

TEST_CASE("energy cost is linear in the counts") {
    EnergyModel m;
    std::mt19937 rng(13);
    OpCounter a, b;
    for (int k = 0; k < 2; ++k)
        for (int w = 0; w < 4; ++w) {
            a.counts[k][w] = rng() % 1000;
            b.counts[k][w] = rng() % 1000;
        }
    OpCounter sum = a;
    sum.merge(b);
    CHECK(m.cost_pj(sum) == doctest::Approx(m.cost_pj(a) + m.cost_pj(b)).epsilon(1e-9));
}

TEST_CASE("ssd and psnr ground truth") {
    Plane a(4, 4, 100);
    Plane b(4, 4, 100);
    CHECK(ssd(a, b) == 0);
    CHECK(std::isinf(psnr(a, b)));

    b.at(0, 0) = 110;  // one pixel off by 10
    CHECK(ssd(a, b) == 100);
    // mse = 100/16, psnr = 10*log10(65025*16/100)
    CHECK(psnr(a, b) == doctest::Approx(10.0 * std::log10(65025.0 * 16.0 / 100.0)).epsilon(1e-9));

    // uniform +1 error: mse = 1, psnr = 48.1308 dB
    Plane c(16, 16, 100);
    Plane d(16, 16, 101);
    CHECK(psnr(c, d) == doctest::Approx(48.1308).epsilon(1e-4));

    // full-scale error: psnr = 0 exactly
    Plane black(1, 1, 0);
    Plane white(1, 1, 255);
    CHECK(psnr(black, white) == doctest::Approx(0.0).epsilon(1e-12));

    Plane wrong(3, 4, 0);
    CHECK_THROWS_AS(ssd(a, wrong), std::invalid_argument);
    Plane empty;
    CHECK_THROWS_AS(psnr(empty, empty), std::invalid_argument);
}

TEST_CASE("psnr is symmetric") {
    std::mt19937 rng(17);
    Plane a(9, 7), b(9, 7);
    for (auto& v : a.data) v = static_cast<uint8_t>(rng() & 0xff);
    for (auto& v : b.data) v = static_cast<uint8_t>(rng() & 0xff);
    CHECK(ssd(a, b) == ssd(b, a));
    CHECK(psnr(a, b) == doctest::Approx(psnr(b, a)).epsilon(1e-12));
}
