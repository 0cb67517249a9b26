#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "fno/fft.hpp"
#include "fno/modes.hpp"
#include "test_support.hpp"

using namespace fno;
using namespace fno::test;

namespace {

// Brute-force oracle: enumerate the retained-set definition directly.
std::set<std::vector<int64_t>> brute_force_logical(const Shape& res, const Shape& kmax) {
    std::set<std::vector<int64_t>> keep;
    int64_t n = shape_size(res);
    for (int64_t flat = 0; flat < n; ++flat) {
        int64_t rem = flat;
        std::vector<int64_t> idx(res.size());
        for (int a = static_cast<int>(res.size()) - 1; a >= 0; --a) {
            idx[static_cast<size_t>(a)] = rem % res[static_cast<size_t>(a)];
            rem /= res[static_cast<size_t>(a)];
        }
        bool ok = true;
        for (size_t a = 0; a < res.size(); ++a) {
            int64_t k = idx[a];
            if (!(k <= kmax[a] || res[a] - k <= kmax[a])) ok = false;
        }
        if (ok) keep.insert(idx);
    }
    return keep;
}

void quiet_warn(const std::string&) {}

} // namespace

TEST_CASE("mode_set d=1 s=8 kmax=2 retains {0,1,2,6,7}") {
    ModeSet ms = mode_set({8}, {2});
    auto logical = ms.logical_indices();
    std::vector<int64_t> flat;
    for (auto& idx : logical) flat.push_back(idx[0]);
    CHECK(flat == std::vector<int64_t>{0, 1, 2, 6, 7});
}

TEST_CASE("mode_set kmax=0 retains only DC") {
    ModeSet ms = mode_set({8}, {0});
    auto logical = ms.logical_indices();
    REQUIRE(logical.size() == 1);
    CHECK(logical[0][0] == 0);
}

TEST_CASE("mode_set d=2 (16,16) kmax (2,2) has 5x3 stored indices") {
    ModeSet ms = mode_set({16, 16}, {2, 2});
    CHECK(ms.total() == 15);
    auto stored = ms.stored_indices();
    REQUIRE(stored.size() == 15);

    // brute force over the stored layout: full first axis, half last axis
    std::set<std::vector<int64_t>> want;
    for (int64_t k1 = 0; k1 < 16; ++k1)
        for (int64_t k2 = 0; k2 <= 8; ++k2)
            if ((k1 <= 2 || 16 - k1 <= 2) && k2 <= 2) want.insert({k1, k2});
    std::set<std::vector<int64_t>> got(stored.begin(), stored.end());
    CHECK(got == want);
}

TEST_CASE("mode_set logical enumeration matches the brute-force definition") {
    for (auto [res, kmax] : std::vector<std::pair<Shape, Shape>>{
             {{8}, {3}}, {{9}, {4}}, {{12, 8}, {2, 3}}, {{7, 6}, {3, 1}}, {{6, 6, 8}, {1, 2, 2}}}) {
        ModeSet ms = mode_set(res, kmax, quiet_warn);
        auto logical = ms.logical_indices();
        std::set<std::vector<int64_t>> got(logical.begin(), logical.end());
        CHECK(got == brute_force_logical(res, kmax));
    }
}

TEST_CASE("mode_set cardinality per full axis is min(2k+1, s)") {
    for (int64_t s : {5, 6, 8, 11}) {
        for (int64_t k : {0, 1, 2, 3, 5, 7}) {
            ModeSet ms = mode_set({s, 9}, {k, 2}, quiet_warn);
            CHECK(ms.block[0] == std::min<int64_t>(2 * k + 1, s));
        }
    }
}

TEST_CASE("mode_set rejects zero extents") {
    CHECK_THROWS_AS(mode_set({0, 4}, {1, 1}, quiet_warn), DataError);
}

TEST_CASE("truncate then embed at the same resolution is an idempotent low-pass") {
    Field f = random_field({16, 16}, 7);
    Field lp = lowpass(f, 2, {3, 3});
    Field lp2 = lowpass(lp, 2, {3, 3});
    CHECK(rel_l2(lp2, lp) < 1e-12);
    // it must remove energy from a generic field
    CHECK(rel_l2(lp, f) > 1e-3);
}

TEST_CASE("band-limited fields round-trip truncate/embed exactly") {
    // build a field supported on modes below the cutoff
    Shape res{16, 16};
    SpectralField spec(Shape{16, 9}, 2, 16);
    RngStream rng(11);
    ModeSet ms = mode_set(res, {3, 3});
    for (auto& idx : ms.stored_indices()) {
        auto [a, b] = rng.next_gauss2();
        spec.at(idx) = {a, b};
    }
    fft::symmetrize_planes(spec);
    Field f = fft::idft(spec);

    Field lp = lowpass(f, 2, {3, 3});
    CHECK(rel_l2(lp, f) < 1e-12);
}

TEST_CASE("embed into a finer grid preserves values at shared grid points") {
    Field f = random_field({32}, 13);
    SpectralField spec = fft::dft(f, 1);
    SpectralField fine = embed(spec, {128});
    Field g = fft::idft(fine);
    for (int64_t j = 0; j < 32; ++j)
        CHECK(std::abs(g[j * 4] - f[j]) < 1e-10 * std::max(1.0, std::abs(f[j])));
}

TEST_CASE("embed into a finer 2-d grid preserves shared points (even extents, Nyquist split)") {
    Field f = random_field({8, 8}, 29);
    SpectralField spec = fft::dft(f, 2);
    SpectralField fine = embed(spec, {16, 24});
    Field g = fft::idft(fine);
    for (int64_t i = 0; i < 8; ++i)
        for (int64_t j = 0; j < 8; ++j)
            CHECK(std::abs(g.at({i * 2, j * 3}) - f.at({i, j})) < 1e-10);
}

TEST_CASE("embed rejects a target resolution smaller than the source") {
    Field f = random_field({16}, 17);
    SpectralField spec = fft::dft(f, 1);
    ModeSet ms = mode_set({16}, {3});
    SpectralField small = truncate(spec, ms);
    CHECK_THROWS_AS(embed(small, {5}), DataError);
    CHECK_NOTHROW(embed(small, {7}));
}

TEST_CASE("truncate keeps exactly the retained modes, function-normalized") {
    Shape res{12, 10};
    Field f = random_field(res, 19);
    SpectralField spec = fft::dft(f, 2);
    ModeSet ms = mode_set(res, {2, 2});
    SpectralField small = truncate(spec, ms);
    CHECK(small.shape() == Shape{5, 3});
    CHECK(small.last_logical_extent() == 5);
    double scale = 25.0 / 120.0;
    for (int64_t c1 = 0; c1 < 5; ++c1)
        for (int64_t c2 = 0; c2 < 3; ++c2) {
            auto want = scale * spec.at({ms.stored_index(0, c1), c2});
            CHECK(std::abs(small.at({c1, c2}) - want) < 1e-14);
        }
}

TEST_CASE("truncated-block coefficients are resolution independent on band-limited fields") {
    // the same band-limited function sampled at two resolutions must truncate
    // to identical blocks; this is what makes the spectral weights mesh-free
    SpectralField coarse_spec(Shape{16, 9}, 2, 16);
    RngStream rng(77);
    ModeSet ms16 = mode_set({16, 16}, {3, 3});
    for (auto& idx : ms16.stored_indices()) {
        auto [a, b] = rng.next_gauss2();
        coarse_spec.at(idx) = {a, b};
    }
    fft::symmetrize_planes(coarse_spec);
    Field f16 = fft::idft(coarse_spec);
    Field f32 = fft::idft(embed(fft::dft(f16, 2), {32, 32}));

    SpectralField t16 = truncate(fft::dft(f16, 2), ms16);
    SpectralField t32 = truncate(fft::dft(f32, 2), mode_set({32, 32}, {3, 3}));
    REQUIRE(t16.size() == t32.size());
    for (int64_t i = 0; i < t16.size(); ++i) CHECK(std::abs(t16[i] - t32[i]) < 1e-10);
}

TEST_CASE("truncate with channels applies per channel") {
    Field f = random_field({8, 8, 3}, 23);
    SpectralField spec = fft::dft(f, 2);
    ModeSet ms = mode_set({8, 8}, {2, 2});
    SpectralField small = truncate(spec, ms);
    CHECK(small.shape() == Shape{5, 3, 3});
    SpectralField back = embed(small, {8, 8});
    Field lp = fft::idft(back);

    Field ch(Shape{8, 8});
    for (int64_t i = 0; i < 64; ++i) ch[i] = f[i * 3 + 2];
    Field lp_ch = lowpass(ch, 2, {2, 2});
    for (int64_t i = 0; i < 64; ++i) CHECK(lp.at({i / 8, i % 8, 2}) == doctest::Approx(lp_ch[i]).epsilon(1e-12));
}
