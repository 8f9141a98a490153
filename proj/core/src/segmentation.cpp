#include "gprdiag/segmentation.hpp"

#include <algorithm>
#include <stdexcept>

namespace gprdiag::segmentation {

void WindowSpec::validate() const {
    if (stride_cols < 1 || stride_cols > width_cols)
        throw std::invalid_argument("WindowSpec: need 1 <= stride_cols <= width_cols");
}

std::vector<std::pair<std::size_t, BScanImage>> slide_windows(const BScanImage& img,
                                                              const WindowSpec& spec) {
    spec.validate();
    img.validate();
    if (img.cols < spec.width_cols)
        throw std::invalid_argument("slide_windows: image narrower than the window");

    std::vector<std::pair<std::size_t, BScanImage>> out;
    const std::size_t last_start = img.cols - spec.width_cols;
    std::size_t start = 0;
    for (;; start += spec.stride_cols) {
        if (start >= last_start) break;
        out.emplace_back(start, img.slice_cols(start, start + spec.width_cols));
    }
    // tail anchor: the final window is pinned to the right edge so the image
    // end is always diagnosed
    out.emplace_back(last_start, img.slice_cols(last_start, img.cols));
    return out;
}

std::vector<AnomalyRegion> merge_regions(const std::vector<LabeledWindow>& labeled,
                                         const std::string& normal_label,
                                         std::size_t gap_tolerance) {
    for (std::size_t i = 1; i < labeled.size(); ++i)
        if (labeled[i - 1].start_col > labeled[i].start_col)
            throw std::invalid_argument("merge_regions: input must be sorted by start_col");

    std::vector<AnomalyRegion> regions;
    std::vector<double> score_sums;
    for (const LabeledWindow& w : labeled) {
        if (w.label == normal_label) continue;
        const std::size_t end = w.start_col + w.width;
        // merge into the latest same-label region whose span overlaps or
        // abuts (within the gap tolerance)
        bool merged = false;
        for (std::size_t i = regions.size(); i-- > 0;) {
            AnomalyRegion& r = regions[i];
            if (r.label != w.label) continue;
            if (w.start_col <= r.end_col + gap_tolerance) {
                r.end_col = std::max(r.end_col, end);
                r.support += 1;
                score_sums[i] += w.score;
                merged = true;
            }
            break; // only the most recent region of that label can extend
        }
        if (!merged) {
            regions.push_back(AnomalyRegion{w.start_col, end, w.label, 1, 0.0});
            score_sums.push_back(w.score);
        }
    }
    for (std::size_t i = 0; i < regions.size(); ++i)
        regions[i].mean_score = score_sums[i] / static_cast<double>(regions[i].support);
    std::stable_sort(regions.begin(), regions.end(),
                     [](const AnomalyRegion& a, const AnomalyRegion& b) {
                         return a.start_col < b.start_col;
                     });
    return regions;
}

} // namespace gprdiag::segmentation
