#include <doctest.h>

#include <cmath>

#include "gprdiag/bscan.hpp"
#include "gprdiag/errors.hpp"
#include "gprdiag/preprocess.hpp"
#include "gprdiag/rng.hpp"

using namespace gprdiag;
using namespace gprdiag::preprocess;

namespace {

BScanImage random_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    rng::SplitMix64 g(seed);
    BScanImage img(rows, cols);
    for (double& v : img.data) v = g.uniform(-3.0, 5.0);
    img.update_range();
    return img;
}

} // namespace

TEST_SUITE("preprocess") {

TEST_CASE("remove_background zeroes row-constant images") {
    BScanImage img(3, 4);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 4; ++c) img.at(r, c) = 1.5 * static_cast<double>(r) - 2.0;
    const BScanImage out = remove_background(img);
    for (double v : out.data) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("remove_background 2x2 hand example") {
    BScanImage img(2, 2);
    img.at(0, 0) = 1; img.at(0, 1) = 3;
    img.at(1, 0) = 2; img.at(1, 1) = 2;
    const BScanImage out = remove_background(img);
    CHECK(out.at(0, 0) == doctest::Approx(-1.0));
    CHECK(out.at(0, 1) == doctest::Approx(1.0));
    CHECK(out.at(1, 0) == doctest::Approx(0.0));
    CHECK(out.at(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("remove_background is idempotent") {
    const BScanImage img = random_image(12, 30, 11);
    const BScanImage once = remove_background(img);
    const BScanImage twice = remove_background(once);
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(twice.data[i] == doctest::Approx(once.data[i]).epsilon(1e-12));
}

TEST_CASE("remove_background rejects non-finite input") {
    BScanImage img(2, 2, 1.0);
    img.at(1, 1) = std::nan("");
    CHECK_THROWS_AS((void)remove_background(img), DataError);
}

TEST_CASE("median_filter identity cases") {
    const BScanImage img = random_image(8, 9, 3);
    const BScanImage k1 = median_filter(img, 1);
    CHECK(k1.data == img.data);

    BScanImage flat(6, 6, 4.25);
    flat.update_range();
    const BScanImage out = median_filter(flat, 5);
    for (double v : out.data) CHECK(v == doctest::Approx(4.25));
}

TEST_CASE("median_filter removes an isolated spike") {
    BScanImage img(3, 3, 0.0);
    img.at(1, 1) = 9.0;
    img.update_range();
    const BScanImage out = median_filter(img, 3);
    for (double v : out.data) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("median_filter parameter errors") {
    const BScanImage img = random_image(6, 6, 5);
    CHECK_THROWS_AS((void)median_filter(img, 2), std::invalid_argument);
    CHECK_THROWS_AS((void)median_filter(img, 7), std::invalid_argument);
}

TEST_CASE("median_filter keeps dimensions and value bounds") {
    const BScanImage img = random_image(10, 14, 7);
    const BScanImage out = median_filter(img, 3);
    CHECK(out.rows == img.rows);
    CHECK(out.cols == img.cols);
    for (double v : out.data) {
        CHECK(v >= img.vmin);
        CHECK(v <= img.vmax);
    }
}

TEST_CASE("apply_gain identity forms") {
    const BScanImage img = random_image(9, 7, 13);
    const BScanImage zero_coeffs = apply_gain(img, GainParams{0.0, 0.0, 10.0});
    CHECK(zero_coeffs.data == img.data);
    // max_gain = 1 clamps every row back to 1
    const BScanImage clamped = apply_gain(img, GainParams{3.0, 2.0, 1.0});
    CHECK(clamped.data == img.data);
}

TEST_CASE("apply_gain leaves row zero untouched and doubles the last row") {
    BScanImage img(2, 3);
    for (std::size_t c = 0; c < 3; ++c) {
        img.at(0, c) = 1.0 + static_cast<double>(c);
        img.at(1, c) = 2.0 - static_cast<double>(c);
    }
    const BScanImage out = apply_gain(img, GainParams{1.0, 0.0, 10.0});
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(out.at(0, c) == doctest::Approx(img.at(0, c)));
        CHECK(out.at(1, c) == doctest::Approx(2.0 * img.at(1, c)));
    }
}

TEST_CASE("gain parameter validation") {
    const GainParams negative{-0.1, 0.0, 2.0};
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
    const GainParams small_clamp{0.0, 0.0, 0.5};
    CHECK_THROWS_AS(small_clamp.validate(), std::invalid_argument);
}

TEST_CASE("normalize endpoints and mid value") {
    BScanImage img(2, 3);
    img.at(0, 0) = 0; img.at(0, 1) = 128; img.at(0, 2) = 255;
    img.at(1, 0) = 0; img.at(1, 1) = 128; img.at(1, 2) = 255;
    const BScanImage out = normalize(img);
    CHECK(out.at(0, 0) == doctest::Approx(-1.0));
    CHECK(out.at(0, 2) == doctest::Approx(1.0));
    CHECK(out.at(0, 1) == doctest::Approx(2.0 * 128.0 / 255.0 - 1.0));
}

TEST_CASE("normalize leaves a [-1,1]-spanning image unchanged") {
    BScanImage img(2, 2);
    img.at(0, 0) = -1.0; img.at(0, 1) = 0.25;
    img.at(1, 0) = 0.5; img.at(1, 1) = 1.0;
    const BScanImage out = normalize(img);
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12));
}

TEST_CASE("normalize range, endpoints, constant image") {
    const BScanImage img = random_image(10, 11, 17);
    const BScanImage out = normalize(img);
    double lo = 1e300, hi = -1e300;
    for (double v : out.data) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo == doctest::Approx(-1.0));
    CHECK(hi == doctest::Approx(1.0));

    BScanImage flat(3, 3, 2.5);
    flat.update_range();
    const BScanImage z = normalize(flat);
    for (double v : z.data) CHECK(v == 0.0);
}

TEST_CASE("image invariants") {
    BScanImage img(1, 5, 0.0);
    CHECK_THROWS_AS(img.validate(), std::invalid_argument);
    BScanImage bad_spacing(2, 2, 0.0);
    bad_spacing.col_spacing_cm = 0.0;
    CHECK_THROWS_AS(bad_spacing.validate(), std::invalid_argument);
}

} // TEST_SUITE
