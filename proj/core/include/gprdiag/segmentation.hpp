#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gprdiag/bscan.hpp"

namespace gprdiag::segmentation {

inline constexpr const char* kNormalLabel = "normal";

struct WindowSpec {
    std::size_t width_cols = 300;
    std::size_t stride_cols = 20;

    void validate() const; // 1 <= stride <= width
};

// Half-open merged anomaly span in trace indices.
struct AnomalyRegion {
    std::size_t start_col = 0;
    std::size_t end_col = 0;
    std::string label;
    std::size_t support = 0; // contributing windows
    double mean_score = 0.0;
};

// One classified window, input to merge_regions.
struct LabeledWindow {
    std::size_t start_col = 0;
    std::size_t width = 0;
    std::string label;
    double score = 0.0;
};

// Full-depth windows at start columns 0, stride, 2*stride, ...; if the last
// stride leaves a remainder, one extra window is anchored at cols - width so
// the image end is always covered. Throws if the image is narrower than the
// window.
std::vector<std::pair<std::size_t, BScanImage>> slide_windows(const BScanImage& img,
                                                              const WindowSpec& spec);

// Merges same-label windows whose spans overlap or abut (within
// gap_tolerance columns) into regions. Windows labeled `normal_label`
// produce no region. Input must be sorted by start_col.
std::vector<AnomalyRegion> merge_regions(const std::vector<LabeledWindow>& labeled,
                                         const std::string& normal_label = kNormalLabel,
                                         std::size_t gap_tolerance = 0);

} // namespace gprdiag::segmentation
