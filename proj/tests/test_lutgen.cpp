#include <doctest.h>

#include <cstdlib>
#include <random>

#include "lutfilt/lutgen.hpp"

using namespace lutfilt;

TEST_CASE("box average rounds half up") {
    Oracle box = oracles::box_average(4);
    uint8_t in[4] = {16, 16, 16, 16};
    int out[1];
    box.eval(in, out);
    CHECK(out[0] == 16);

    uint8_t in2[4] = {0, 16, 16, 16};  // 48/4
    box.eval(in2, out);
    CHECK(out[0] == 12);

    uint8_t in3[4] = {0, 0, 1, 1};  // 2/4 = 0.5 rounds up
    box.eval(in3, out);
    CHECK(out[0] == 1);

    uint8_t in4[4] = {0, 0, 0, 1};  // 0.25 rounds down
    box.eval(in4, out);
    CHECK(out[0] == 0);
}

TEST_CASE("uniform weighted average equals the box oracle") {
    Oracle box = oracles::box_average(4);
    Oracle w = oracles::weighted_average({64, 64, 64, 64}, 0);
    std::mt19937 rng(23);
    for (int trial = 0; trial < 2000; ++trial) {
        uint8_t in[4];
        for (auto& v : in)
            v = static_cast<uint8_t>(rng() & 0xff);
        int a[1], b[1];
        box.eval(in, a);
        w.eval(in, b);
        CHECK(a[0] == b[0]);
    }
}

TEST_CASE("weighted average with a unit coefficient is the identity") {
    Oracle w = oracles::weighted_average({256, 0, 0, 0}, 0);
    for (int x = 0; x < 256; ++x) {
        uint8_t in[4] = {static_cast<uint8_t>(x), 9, 200, 77};
        int out[1];
        w.eval(in, out);
        CHECK(out[0] == x);
    }

    Oracle biased = oracles::weighted_average({256, 0, 0, 0}, 5);
    uint8_t in[4] = {100, 0, 0, 0};
    int out[1];
    biased.eval(in, out);
    CHECK(out[0] == 105);
}

TEST_CASE("edge preserve averages only the inliers") {
    Oracle e = oracles::edge_preserve(3, 10);
    uint8_t in[3] = {100, 104, 200};  // 200 is past the threshold
    int out[1];
    e.eval(in, out);
    CHECK(out[0] == 102);

    uint8_t lone[3] = {100, 150, 50};  // nothing qualifies
    e.eval(lone, out);
    CHECK(out[0] == 100);

    // with the widest threshold it degenerates to the box average
    Oracle wide = oracles::edge_preserve(4, 255);
    Oracle box = oracles::box_average(4);
    std::mt19937 rng(29);
    for (int trial = 0; trial < 500; ++trial) {
        uint8_t r[4];
        for (auto& v : r)
            v = static_cast<uint8_t>(rng() & 0xff);
        int a[1], b[1];
        wide.eval(r, a);
        box.eval(r, b);
        CHECK(a[0] == b[0]);
    }

    CHECK_THROWS_AS(oracles::edge_preserve(4, -1), std::invalid_argument);
    CHECK_THROWS_AS(oracles::edge_preserve(4, 256), std::invalid_argument);
}

TEST_CASE("offset oracle scales the first-reference difference") {
    Oracle o = oracles::offset(3, 1, 4);
    CHECK(o.signedness == Signedness::SignedOffset);
    uint8_t in[3] = {100, 120, 60};
    int out[1];
    o.eval(in, out);
    CHECK(out[0] == 5);  // (120-100)/4

    uint8_t neg[3] = {120, 100, 0};
    o.eval(neg, out);
    CHECK(out[0] == -5);

    uint8_t extreme[3] = {0, 255, 0};  // 63.75 rounds to 64
    o.eval(extreme, out);
    CHECK(out[0] == 64);

    Oracle big = oracles::offset(2, 1, 1);
    uint8_t wide[2] = {0, 255};
    big.eval(wide, out);
    CHECK(out[0] == 127);  // clipped into int8
    uint8_t wide2[2] = {255, 0};
    big.eval(wide2, out);
    CHECK(out[0] == -128);

    Oracle zero = oracles::offset(3, 0, 1);
    uint8_t any[3] = {13, 240, 99};
    zero.eval(any, out);
    CHECK(out[0] == 0);

    CHECK_THROWS_AS(oracles::offset(1, 1, 4), std::invalid_argument);
    CHECK_THROWS_AS(oracles::offset(3, 1, 0), std::invalid_argument);
}

TEST_CASE("channel oracles") {
    Oracle id = oracles::channel_identity(2);
    uint8_t in[2] = {40, 200};
    int out[2];
    id.eval(in, out);
    CHECK(out[0] == 40);
    CHECK(out[1] == 200);

    Oracle swap = oracles::channel_swap();
    swap.eval(in, out);
    CHECK(out[0] == 200);
    CHECK(out[1] == 40);

    Oracle mix = oracles::channel_mix(192);
    uint8_t uv[2] = {0, 255};
    mix.eval(uv, out);
    CHECK(out[0] == 64);   // (192*0 + 64*255 + 128) >> 8
    CHECK(out[1] == 191);  // (192*255 + 64*0 + 128) >> 8

    Oracle full = oracles::channel_mix(256);  // no crosstalk left
    full.eval(in, out);
    CHECK(out[0] == 40);
    CHECK(out[1] == 200);
    CHECK_THROWS_AS(oracles::channel_mix(-1), std::invalid_argument);
    CHECK_THROWS_AS(oracles::channel_mix(257), std::invalid_argument);
}

TEST_CASE("oracle spec parsing") {
    Oracle box = oracles::parse("box:n=4");
    CHECK(box.arity == 4);
    CHECK(box.values == 1);

    Oracle id2 = oracles::parse("identity:n=4,v=2");
    CHECK(id2.arity == 4);
    CHECK(id2.values == 2);

    Oracle w = oracles::parse("weighted:c=128/64/32/32,b=0");
    CHECK(w.arity == 4);
    uint8_t in[4] = {100, 100, 100, 100};
    int out[1];
    w.eval(in, out);
    CHECK(out[0] == 100);  // coefficients sum to 256

    Oracle off = oracles::parse("offset:n=3,num=1,den=4");
    CHECK(off.signedness == Signedness::SignedOffset);
    CHECK(off.arity == 3);

    CHECK(oracles::parse("edge:n=4,t=32").arity == 4);
    CHECK(oracles::parse("chan-identity:k=2").values == 2);
    CHECK(oracles::parse("chan-swap").arity == 2);
    CHECK(oracles::parse("chan-mix:m=192").values == 2);
    CHECK(oracles::parse("constant:n=4,val=0").arity == 4);

    CHECK_THROWS_AS(oracles::parse("bogus:n=4"), std::invalid_argument);
    CHECK_THROWS_AS(oracles::parse("box"), std::invalid_argument);          // missing n
    CHECK_THROWS_AS(oracles::parse("box:n=x"), std::invalid_argument);      // bad integer
    CHECK_THROWS_AS(oracles::parse("box:n=4,zz=1"), std::invalid_argument); // unknown field
    CHECK_THROWS_AS(oracles::parse("box:=4"), std::invalid_argument);       // empty key
    CHECK_THROWS_AS(oracles::parse("weighted:b=0"), std::invalid_argument); // missing c
}

TEST_CASE("caching evaluates the oracle at every grid node") {
    Sampling s{4};
    Oracle id = oracles::identity(2);
    ClippedLut lut = cache_clipped(id, s);
    REQUIRE(lut.entry_count() == 17u * 17u);
    for (int i = 0; i < 17; ++i)
        for (int j = 0; j < 17; ++j) {
            int n[2] = {i, j};
            CHECK(lut.value_at(n, 0) == s.node_value(i));
        }

    // 4-D spot checks
    Oracle id4 = oracles::identity(4);
    ClippedLut lut4 = cache_clipped(id4, s);
    int n3000[4] = {3, 0, 0, 0};
    CHECK(lut4.value_at(n3000, 0) == 48);
    int ntop[4] = {16, 16, 16, 16};
    CHECK(lut4.value_at(ntop, 0) == 255);

    Oracle box = oracles::box_average(4);
    ClippedLut blut = cache_clipped(box, s);
    int ones[4] = {1, 1, 1, 1};
    CHECK(blut.value_at(ones, 0) == 16);
    int mix[4] = {0, 1, 1, 1};
    CHECK(blut.value_at(mix, 0) == 12);
}

TEST_CASE("caching a signed oracle stores int8 patterns") {
    Sampling s{4};
    Oracle o = oracles::offset(3, 1, 4);
    ClippedLut lut = cache_clipped(o, s);
    CHECK(lut.signedness == Signedness::SignedOffset);
    int n[3] = {16, 0, 0};  // in = (255, 0, 0) -> round(-255/4) = -64
    CHECK(lut.value_at(n, 0) == -64);
    int n2[3] = {0, 16, 5};  // (0, 255, .) -> 63.75 -> 64
    CHECK(lut.value_at(n2, 0) == 64);
}

TEST_CASE("caching clips out-of-range oracle outputs") {
    Sampling s{8};
    Oracle hot = oracles::constant(1, 300);
    ClippedLut lut = cache_clipped(hot, s);
    int n[1] = {0};
    CHECK(lut.value_at(n, 0) == 255);

    Oracle broken;
    CHECK_THROWS_AS(cache_clipped(broken, s), std::invalid_argument);
}

TEST_CASE("clipped storage arithmetic") {
    StorageQuery q;
    q.sampling = Sampling{4};
    q.n = 4;
    q.V = 1;
    CHECK(storage_size_clipped(q) == 83521u);  // 17^4

    q.sampling = Sampling{8};
    CHECK(storage_size_clipped(q) == 16u);  // 2^4

    q.sampling = Sampling{0};
    CHECK(storage_size_clipped(q) == 257ull * 257 * 257 * 257);

    q.sampling = Sampling{4};
    q.patterns = 3;
    CHECK(storage_size_clipped(q) == 250563u);  // 3 * 17^4

    q.patterns = 8;
    q.stages = 4;
    CHECK(storage_size_clipped(q) == 4u * 8u * 83521u);

    // channel framework: K*L^K + K*R*L^n, times V
    StorageQuery c;
    c.sampling = Sampling{4};
    c.n = 4;
    c.V = 2;
    c.patterns = 3;
    c.channels = 2;
    CHECK(storage_size_clipped(c) == (2u * 289u + 2u * 3u * 83521u) * 2u);

    StorageQuery bad;
    bad.n = 5;
    CHECK_THROWS_AS(storage_size_clipped(bad), std::invalid_argument);
}

TEST_CASE("diagonal entry count matches a brute-force scan") {
    CHECK(diag_count(2, 17) == 79u);
    CHECK(diag_count(0, 17) == 17u);
    CHECK(diag_count(16, 17) == 289u);  // full square

    for (int L : {5, 9, 17}) {
        for (int dw = 0; dw < L; ++dw) {
            uint64_t brute = 0;
            for (int i0 = 0; i0 < L; ++i0)
                for (int i1 = 0; i1 < L; ++i1)
                    if (std::abs(i0 - i1) <= dw)
                        ++brute;
            CHECK(diag_count(dw, L) == brute);
        }
    }

    CHECK_THROWS_AS(diag_count(-1, 17), std::invalid_argument);
    CHECK_THROWS_AS(diag_count(17, 17), std::invalid_argument);
    CHECK_THROWS_AS(diag_count(0, 1), std::invalid_argument);
}

TEST_CASE("compacted storage arithmetic") {
    // pairwise band at q=4: 79 diagonal pairs over L=17, free dims 17^2
    CompactedSizes sz = storage_size_compacted(Sampling{4}, 4, 1, 2, 2, 1);
    CHECK(sz.diag == 79u * 289u);
    CHECK(sz.nondiag == 6561u);  // 9^4 at q=5
    CHECK(sz.total() == sz.diag + sz.nondiag);

    // anchor layout over all four dimensions
    CompactedSizes sz4 = storage_size_compacted(Sampling{4}, 4, 1, 4, 2, 1);
    CHECK(sz4.diag == 17u * 125u);  // L * (2dw+1)^3
    CHECK(sz4.nondiag == 6561u);

    // V scales everything
    CompactedSizes sz2 = storage_size_compacted(Sampling{4}, 2, 2, 2, 3, 2);
    CHECK(sz2.diag == diag_count(3, 17) * 2u);
    CHECK(sz2.nondiag == 5u * 5u * 2u);  // q=6 -> L=5

    CHECK_THROWS_AS(storage_size_compacted(Sampling{4}, 4, 1, 2, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(storage_size_compacted(Sampling{4}, 4, 1, 2, 17, 1), std::invalid_argument);
    CHECK_THROWS_AS(storage_size_compacted(Sampling{4}, 4, 1, 2, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(storage_size_compacted(Sampling{4}, 4, 1, 2, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(storage_size_compacted(Sampling{4}, 4, 1, 5, 2, 1), std::invalid_argument);
}
