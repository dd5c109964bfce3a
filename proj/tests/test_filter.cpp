#include "oracles.hpp"
#include "testutil.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace gridsort;

namespace {

MapState random_map(int w, int h, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    MapState m(w, h, d);
    for (double& v : m.raw()) v = uni(gen);
    return m;
}

double max_abs_diff(const MapState& a, const MapState& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.raw().size(); ++i)
        m = std::max(m, std::fabs(a.raw()[i] - b.raw()[i]));
    return m;
}

} // namespace

TEST_CASE("box_filter leaves a constant map unchanged") {
    MapState m(9, 7, 2);
    std::fill(m.raw().begin(), m.raw().end(), 0.75);
    for (const WrapMode border : {WrapMode::clamp, WrapMode::torus}) {
        const MapState out = box_filter(m, {3, 2, border});
        for (const double v : out.raw()) CHECK(v == Catch::Approx(0.75).epsilon(1e-14));
    }
}

TEST_CASE("box_filter impulse response") {
    MapState m(9, 9, 1);
    m.vec(4, 4)[0] = 1.0;
    const MapState out = box_filter(m, {1, 1, WrapMode::clamp});
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x) {
            const bool in_block = std::abs(x - 4) <= 1 && std::abs(y - 4) <= 1;
            CHECK(out.vec(x, y)[0] ==
                  Catch::Approx(in_block ? 1.0 / 9.0 : 0.0).margin(1e-15));
        }
}

TEST_CASE("box_filter matches the naive reference") {
    std::uint64_t seed = 0;
    for (const WrapMode border : {WrapMode::clamp, WrapMode::torus}) {
        for (int w = 1; w <= 12; w += 3) {
            for (int h = 2; h <= 12; h += 5) {
                for (int r = 0; r <= 5; ++r) {
                    if (border == WrapMode::torus && (r >= w || r >= h)) continue;
                    const MapState m = random_map(w, h, 3, ++seed);
                    const FilterSpec fs{r, r, border};
                    const MapState fast = box_filter(m, fs);
                    const MapState ref = oracle::naive_box_filter(m, fs, false);
                    REQUIRE(max_abs_diff(fast, ref) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("box_filter anisotropic radii match the naive reference") {
    for (const WrapMode border : {WrapMode::clamp, WrapMode::torus}) {
        const MapState m = random_map(11, 7, 2, 99);
        const FilterSpec fs{4, 1, border};
        CHECK(max_abs_diff(box_filter(m, fs),
                           oracle::naive_box_filter(m, fs, false)) < 1e-12);
    }
}

TEST_CASE("box_filter preserves the mean under torus wrap") {
    const MapState m = random_map(16, 13, 3, 5);
    const MapState out = box_filter(m, {5, 3, WrapMode::torus});
    for (std::size_t c = 0; c < 3; ++c) {
        double before = 0.0, after = 0.0;
        for (std::size_t cell = 0; cell < 16 * 13; ++cell) {
            before += m.raw()[cell * 3 + c];
            after += out.raw()[cell * 3 + c];
        }
        CHECK(after == Catch::Approx(before).epsilon(1e-10));
    }
}

TEST_CASE("repeated large-radius clamp filtering converges to the mean") {
    MapState m = random_map(8, 6, 1, 11);
    double mean = 0.0;
    for (const double v : m.raw()) mean += v;
    mean /= m.raw().size();
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 5; ++it) {
        m = box_filter(m, {8, 8, WrapMode::clamp});
        double dev = 0.0;
        for (const double v : m.raw()) dev = std::max(dev, std::fabs(v - mean));
        CHECK(dev <= prev + 1e-15);
        prev = dev;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("separability: x then y equals the 2D window mean") {
    const MapState m = random_map(10, 9, 2, 21);
    for (const WrapMode border : {WrapMode::clamp, WrapMode::torus}) {
        const MapState xy = box_filter(box_filter(m, {3, 0, border}), {0, 2, border});
        const MapState full = box_filter(m, {3, 2, border});
        CHECK(max_abs_diff(xy, full) < 1e-12);
    }
}

TEST_CASE("box_filter torus radius validation") {
    const MapState m = random_map(6, 6, 1, 1);
    CHECK_THROWS_AS(box_filter(m, {6, 0, WrapMode::torus}), invalid_input);
    CHECK_THROWS_AS(box_filter(m, {0, -1, WrapMode::clamp}), invalid_input);
    CHECK_NOTHROW(box_filter(m, {7, 7, WrapMode::clamp}));
}

TEST_CASE("weighted_box_filter with unit weights equals box_filter exactly") {
    MapState m = random_map(9, 8, 3, 31);
    m.weights(); // materializes all-ones weights
    for (const WrapMode border : {WrapMode::clamp, WrapMode::torus}) {
        const FilterSpec fs{2, 3, border, true};
        const MapState plain = box_filter(m, fs);
        const MapState weighted = weighted_box_filter(m, fs);
        CHECK(max_abs_diff(plain, weighted) == 0.0);
    }
}

TEST_CASE("weighted_box_filter matches the naive weighted reference") {
    std::mt19937_64 gen(47);
    std::uniform_real_distribution<double> uni(0.1, 4.0);
    MapState m = random_map(10, 10, 2, 53);
    for (double& w : m.weights()) w = uni(gen);
    for (const WrapMode border : {WrapMode::clamp, WrapMode::torus}) {
        const FilterSpec fs{3, 2, border, true};
        CHECK(max_abs_diff(weighted_box_filter(m, fs),
                           oracle::naive_box_filter(m, fs, true)) < 1e-12);
    }
}

TEST_CASE("weighted_box_filter pinned cell dominates its window") {
    MapState m(3, 3, 1);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) m.vec(x, y)[0] = 1.0;
    m.vec(1, 1)[0] = 10.0; // the pinned vector
    m.weights()[4] = 16.0;
    const MapState out = weighted_box_filter(m, {1, 1, WrapMode::clamp, true});
    // direct weighted-mean arithmetic at a neighboring cell (0,0):
    // window = 4 cells, pinned cell weight 16: (16*10 + 3*1) / (16 + 3)
    CHECK(out.vec(0, 0)[0] == Catch::Approx((16.0 * 10.0 + 3.0) / 19.0));
}

TEST_CASE("weighted_box_filter zero-weight window is an error") {
    MapState m = random_map(5, 1, 1, 3);
    auto& w = m.weights();
    std::fill(w.begin(), w.end(), 0.0);
    w[4] = 1.0; // only the far end has weight; radius-1 windows at x=0..2 are empty
    CHECK_THROWS_AS(weighted_box_filter(m, {1, 0, WrapMode::clamp, true}),
                    invalid_input);
    CHECK_THROWS_AS(weighted_box_filter(m, {-2, 0, WrapMode::clamp, true}),
                    invalid_input);
    MapState no_weights = random_map(4, 4, 1, 9);
    CHECK_THROWS_AS(weighted_box_filter(no_weights, {1, 1, WrapMode::clamp, true}),
                    invalid_input);
}

TEST_CASE("weight-0 everywhere except one cell per window copies that cell") {
    MapState m = random_map(3, 1, 1, 13);
    auto& w = m.weights();
    w[0] = 0.0;
    w[1] = 1.0;
    w[2] = 0.0;
    const MapState out = weighted_box_filter(m, {1, 0, WrapMode::clamp, true});
    for (int x = 0; x < 3; ++x)
        CHECK(out.vec(x, 0)[0] == m.vec(1, 0)[0]);
}

TEST_CASE("fill_inactive") {
    SECTION("full mask leaves the map unchanged") {
        const MapState m = random_map(5, 4, 2, 17);
        GridSpec spec(5, 4);
        const MapState out = fill_inactive(m, spec);
        CHECK(max_abs_diff(m, out) == 0.0);
    }
    SECTION("single active cell floods everything") {
        std::vector<std::uint8_t> mask(12, 0);
        mask[7] = 1; // cell (3,1) on a 4x3 grid
        GridSpec spec(4, 3, mask);
        const MapState m = random_map(4, 3, 3, 19);
        const MapState out = fill_inactive(m, spec);
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 4; ++x)
                for (std::size_t c = 0; c < 3; ++c)
                    CHECK(out.vec(x, y)[c] == m.vec(3, 1)[c]);
    }
    SECTION("heart mask: every inactive cell copies its brute-force nearest") {
        const MaskSource heart = testutil::heart_mask(12, 12);
        GridSpec spec = grid_from_mask(heart);
        const MapState m = random_map(12, 12, 2, 23);
        const MapState out = fill_inactive(m, spec);
        const auto actives = spec.active_cells();
        for (int y = 0; y < 12; ++y) {
            for (int x = 0; x < 12; ++x) {
                if (spec.active({x, y})) {
                    for (std::size_t c = 0; c < 2; ++c)
                        CHECK(out.vec(x, y)[c] == m.vec(x, y)[c]);
                    continue;
                }
                // exhaustive nearest-active scan, row-major tie break
                double best = std::numeric_limits<double>::infinity();
                Cell bc{};
                for (const Cell a : actives) {
                    const double dx = a.col - x, dy = a.row - y;
                    const double d = dx * dx + dy * dy;
                    if (d < best) {
                        best = d;
                        bc = a;
                    }
                }
                for (std::size_t c = 0; c < 2; ++c)
                    CHECK(out.vec(x, y)[c] == m.vec(bc.col, bc.row)[c]);
            }
        }
    }
}

TEST_CASE("box_filter cost is independent of the radius", "[timing]") {
    const MapState m = random_map(512, 512, 3, 71);
    const auto time_radius = [&](int r) {
        double best = std::numeric_limits<double>::infinity();
        for (int rep = 0; rep < 5; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            const MapState out = box_filter(m, {r, r, WrapMode::clamp});
            const auto t1 = std::chrono::steady_clock::now();
            best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
            CHECK(out.raw()[0] >= 0.0);
        }
        return best;
    };
    const double t1 = time_radius(1);
    const double t5 = time_radius(5);
    CHECK(t5 < 2.0 * t1 + 1e-3);
}
