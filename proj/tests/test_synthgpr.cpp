#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gprdiag/rng.hpp"
#include "gprdiag/synthgpr.hpp"

using namespace gprdiag;
using namespace gprdiag::synthgpr;

TEST_SUITE("synthgpr") {

TEST_CASE("ricker wavelet shape") {
    CHECK(ricker(0.0, 0.1) == 1.0);
    CHECK(ricker(0.0, 3.7) == 1.0);

    rng::SplitMix64 g(1);
    for (int i = 0; i < 20; ++i) {
        const double t = g.uniform(-10.0, 10.0);
        const double f = g.uniform(0.05, 0.5);
        CHECK(ricker(t, f) == doctest::Approx(ricker(-t, f)).epsilon(1e-14));
    }

    // zeros of 1 - 2 pi^2 f^2 t^2
    for (double f : {0.08, 0.2, 1.0}) {
        const double t0 = 1.0 / (3.14159265358979323846 * f * std::sqrt(2.0));
        CHECK(std::abs(ricker(t0, f)) < 1e-12);
        CHECK(std::abs(ricker(-t0, f)) < 1e-12);
    }
    CHECK_THROWS_AS((void)ricker(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("empty noiseless scene renders to zero") {
    SceneSpec spec;
    spec.rows = 16;
    spec.cols = 40;
    spec.noise_sigma = 0.0;
    auto [img, truth] = generate_bscan(spec);
    CHECK(truth.empty());
    for (double v : img.data) CHECK(v == 0.0);
}

TEST_CASE("generation is deterministic per seed") {
    SceneSpec spec;
    spec.rows = 32;
    spec.cols = 200;
    spec.seed = 9;
    spec.noise_sigma = 0.05;
    spec.layers = {{8, 1.0}};
    spec.scatterers = {{100, 10.0, 2.0, 1.0}};
    spec.anomalies = {{AnomalyKind::loose_texture, 40, 90, 4, 28, 0.5}};
    auto [a, ta] = generate_bscan(spec);
    auto [b, tb] = generate_bscan(spec);
    CHECK(a.data == b.data);
    CHECK(ta.size() == tb.size());

    spec.seed = 10;
    auto [c, tc] = generate_bscan(spec);
    CHECK(a.data != c.data);
}

TEST_CASE("scatterer apex sits at the scatterer column") {
    SceneSpec spec;
    spec.rows = 48;
    spec.cols = 120;
    spec.noise_sigma = 0.0;
    spec.scatterers = {{60, 20.0, 2.0, 1.0}};
    auto [img, truth] = generate_bscan(spec);

    // the strongest sample of the whole response sits at the apex, and the
    // per-column peak row is minimal there (several neighboring columns can
    // quantize to the same row, so ties break by amplitude)
    std::size_t apex_col = 0, apex_row = 0;
    double apex_amp = 0.0;
    std::vector<std::size_t> peak_row(spec.cols, spec.rows);
    for (std::size_t c = 0; c < spec.cols; ++c) {
        double best = 0.0;
        for (std::size_t r = 0; r < spec.rows; ++r) {
            if (std::abs(img.at(r, c)) > best) {
                best = std::abs(img.at(r, c));
                peak_row[c] = r;
            }
        }
        if (best > apex_amp) {
            apex_amp = best;
            apex_col = c;
            apex_row = peak_row[c];
        }
    }
    CHECK(apex_col == 60);
    // two-way travel 2 * depth / velocity
    CHECK(apex_row == std::size_t(std::llround(2.0 * 20.0 / 2.0)));
    for (std::size_t c = 0; c < spec.cols; ++c)
        if (peak_row[c] < spec.rows) CHECK(peak_row[c] >= apex_row);
}

TEST_CASE("anomaly energy stays inside the ground-truth span") {
    for (AnomalyKind kind :
         {AnomalyKind::moisture_blob, AnomalyKind::loose_texture, AnomalyKind::cavity}) {
        SceneSpec with;
        with.rows = 32;
        with.cols = 300;
        with.seed = 77;
        with.noise_sigma = 0.02;
        with.layers = {{6, 1.0}};
        SceneSpec without = with;
        with.anomalies = {{kind, 100, 180, 8, 24, 0.7}};

        auto [img_with, truth] = generate_bscan(with);
        auto [img_without, none] = generate_bscan(without);
        REQUIRE(truth.size() == 1);
        CHECK(truth[0].col_begin == 100);
        CHECK(truth[0].col_end == 180);
        CHECK(truth[0].kind == kind);

        bool differs_inside = false;
        for (std::size_t r = 0; r < with.rows; ++r) {
            for (std::size_t c = 0; c < with.cols; ++c) {
                const double d = std::abs(img_with.at(r, c) - img_without.at(r, c));
                if (c < 100 || c >= 180) {
                    CHECK(d == 0.0);
                } else if (d > 0.0) {
                    differs_inside = true;
                }
            }
        }
        CHECK(differs_inside);
    }
}

TEST_CASE("noise sigma scales the flat-region deviation") {
    auto sample_std = [](double sigma, std::uint64_t seed) {
        SceneSpec spec;
        spec.rows = 64;
        spec.cols = 400;
        spec.seed = seed;
        spec.noise_sigma = sigma;
        auto [img, truth] = generate_bscan(spec);
        double mean = 0.0;
        for (double v : img.data) mean += v;
        mean /= double(img.size());
        double var = 0.0;
        for (double v : img.data) var += (v - mean) * (v - mean);
        return std::sqrt(var / double(img.size() - 1));
    };
    const std::size_t n = 64 * 400;
    for (double sigma : {0.05, 0.2}) {
        const double est = sample_std(sigma, 5);
        // sampling error of a std estimate is about sigma / sqrt(2n)
        const double band = 3.0 * sigma / std::sqrt(2.0 * double(n));
        CHECK(std::abs(est - sigma) < band);
    }
    CHECK(sample_std(0.2, 6) > sample_std(0.05, 6));
}

TEST_CASE("scene validation") {
    SceneSpec spec;
    spec.rows = 10;
    spec.cols = 20;
    spec.anomalies = {{AnomalyKind::cavity, 10, 25, 0, 5, 1.0}}; // col_end > cols
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.anomalies.clear();
    spec.layers = {{10, 1.0}}; // depth out of range
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.layers.clear();
    spec.noise_sigma = -1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    CHECK_THROWS_AS((void)anomaly_kind_from_string("bogus"), std::invalid_argument);
    CHECK(anomaly_kind_from_string(to_string(AnomalyKind::cavity)) == AnomalyKind::cavity);
}

} // TEST_SUITE
