#include <doctest.h>

#include <set>
#include <stdexcept>

#include "gprdiag/rng.hpp"
#include "gprdiag/segmentation.hpp"

using namespace gprdiag;
using namespace gprdiag::segmentation;

namespace {

BScanImage image_of(std::size_t rows, std::size_t cols) {
    BScanImage img(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            img.at(r, c) = static_cast<double>(r * cols + c);
    img.update_range();
    return img;
}

} // namespace

TEST_SUITE("segmentation") {

TEST_CASE("window starts follow the stride") {
    const auto windows = slide_windows(image_of(4, 340), WindowSpec{300, 20});
    REQUIRE(windows.size() == 3);
    CHECK(windows[0].first == 0);
    CHECK(windows[1].first == 20);
    CHECK(windows[2].first == 40);
    for (const auto& [start, win] : windows) {
        CHECK(win.cols == 300);
        CHECK(win.rows == 4);
        CHECK(win.at(0, 0) == doctest::Approx(static_cast<double>(start)));
    }
}

TEST_CASE("exact-width image gives a single window") {
    const auto windows = slide_windows(image_of(3, 300), WindowSpec{300, 20});
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].first == 0);
}

TEST_CASE("tail window anchors to the right edge") {
    const auto windows = slide_windows(image_of(3, 310), WindowSpec{300, 20});
    REQUIRE(windows.size() == 2);
    CHECK(windows[0].first == 0);
    CHECK(windows[1].first == 10);
}

TEST_CASE("narrow image and bad specs are rejected") {
    const WindowSpec spec{300, 20};
    CHECK_THROWS_AS((void)slide_windows(image_of(3, 200), spec), std::invalid_argument);
    const WindowSpec zero_stride{300, 0};
    CHECK_THROWS_AS(zero_stride.validate(), std::invalid_argument);
    const WindowSpec over_stride{300, 400};
    CHECK_THROWS_AS(over_stride.validate(), std::invalid_argument);
}

TEST_CASE("every column is covered") {
    rng::SplitMix64 g(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t width = 50 + static_cast<std::size_t>(g.uniform01() * 100);
        const std::size_t stride = 1 + static_cast<std::size_t>(g.uniform01() * double(width - 1));
        const std::size_t cols = width + static_cast<std::size_t>(g.uniform01() * 400);
        const auto windows = slide_windows(image_of(2, cols), WindowSpec{width, stride});
        std::vector<bool> covered(cols, false);
        for (const auto& [start, win] : windows)
            for (std::size_t c = start; c < start + width; ++c) covered[c] = true;
        for (std::size_t c = 0; c < cols; ++c) CHECK(covered[c]);
    }
}

TEST_CASE("overlapping same-label windows merge") {
    const std::vector<LabeledWindow> labeled = {
        {0, 300, "A", -0.5},
        {20, 300, "A", -0.7},
    };
    const auto regions = merge_regions(labeled);
    REQUIRE(regions.size() == 1);
    CHECK(regions[0].start_col == 0);
    CHECK(regions[0].end_col == 320);
    CHECK(regions[0].support == 2);
    CHECK(regions[0].mean_score == doctest::Approx(-0.6));
}

TEST_CASE("normal label produces no region") {
    const std::vector<LabeledWindow> labeled = {
        {0, 300, kNormalLabel, 0.4},
        {20, 300, kNormalLabel, 0.2},
    };
    CHECK(merge_regions(labeled).empty());
}

TEST_CASE("disjoint same-label spans stay separate") {
    const std::vector<LabeledWindow> labeled = {
        {0, 100, "A", -1.0},
        {150, 100, kNormalLabel, 0.5},
        {400, 100, "A", -1.0},
    };
    const auto regions = merge_regions(labeled);
    REQUIRE(regions.size() == 2);
    CHECK(regions[0].end_col == 100);
    CHECK(regions[1].start_col == 400);
}

TEST_CASE("different labels never merge") {
    const std::vector<LabeledWindow> labeled = {
        {0, 300, "A", -1.0},
        {20, 300, "B", -1.0},
    };
    const auto regions = merge_regions(labeled);
    REQUIRE(regions.size() == 2);
    CHECK(regions[0].label == "A");
    CHECK(regions[1].label == "B");
}

TEST_CASE("abutting spans merge, gapped spans split, tolerance bridges") {
    const std::vector<LabeledWindow> abut = {{0, 100, "A", 0}, {100, 100, "A", 0}};
    CHECK(merge_regions(abut).size() == 1);
    const std::vector<LabeledWindow> gap = {{0, 100, "A", 0}, {101, 100, "A", 0}};
    CHECK(merge_regions(gap).size() == 2);
    CHECK(merge_regions(gap, kNormalLabel, 1).size() == 1);
}

TEST_CASE("unsorted input is rejected") {
    const std::vector<LabeledWindow> labeled = {{20, 300, "A", 0}, {0, 300, "A", 0}};
    CHECK_THROWS_AS((void)merge_regions(labeled), std::invalid_argument);
}

TEST_CASE("region bounds stay inside the union of member windows") {
    rng::SplitMix64 g(17);
    const char* labels[] = {kNormalLabel, "A", "B"};
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<LabeledWindow> labeled;
        std::size_t start = 0;
        std::size_t non_normal = 0;
        for (int i = 0; i < 40; ++i) {
            const char* label = labels[g.next() % 3];
            labeled.push_back({start, 30, label, -g.uniform01()});
            if (std::string(label) != kNormalLabel) ++non_normal;
            start += 1 + g.next() % 40;
        }
        const auto regions = merge_regions(labeled);
        CHECK(regions.size() <= non_normal);

        // every non-normal window is fully covered by a region of its label
        for (const auto& w : labeled) {
            if (w.label == kNormalLabel) continue;
            bool covered = false;
            for (const auto& r : regions)
                if (r.label == w.label && r.start_col <= w.start_col &&
                    w.start_col + w.width <= r.end_col)
                    covered = true;
            CHECK(covered);
        }
        // no region extends beyond the union of its label's windows
        for (const auto& r : regions) {
            std::size_t lo = SIZE_MAX, hi = 0;
            for (const auto& w : labeled) {
                if (w.label != r.label) continue;
                if (w.start_col >= r.start_col && w.start_col + w.width <= r.end_col) {
                    lo = std::min(lo, w.start_col);
                    hi = std::max(hi, w.start_col + w.width);
                }
            }
            CHECK(r.start_col == lo);
            CHECK(r.end_col == hi);
        }
    }
}

} // TEST_SUITE
