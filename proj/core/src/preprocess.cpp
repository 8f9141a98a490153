#include "gprdiag/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gprdiag::preprocess {

void GainParams::validate() const {
    if (linear_coeff < 0.0 || exp_coeff < 0.0)
        throw std::invalid_argument("GainParams: coefficients must be >= 0");
    // max_gain == 1 clamps the whole profile to 1 and turns the gain off
    if (!(max_gain >= 1.0))
        throw std::invalid_argument("GainParams: max_gain must be >= 1");
}

double GainParams::gain_at(std::size_t row, std::size_t rows) const {
    // t runs over [0, 1] with the last row at 1, so gain(0) == 1 always.
    const double t = rows > 1 ? static_cast<double>(row) / static_cast<double>(rows - 1) : 0.0;
    const double g = (1.0 + linear_coeff * t) * std::exp(exp_coeff * t);
    return std::clamp(g, 1.0, max_gain);
}

BScanImage remove_background(const BScanImage& img) {
    img.validate();
    BScanImage out(img.rows, img.cols);
    out.col_spacing_cm = img.col_spacing_cm;
    for (std::size_t r = 0; r < img.rows; ++r) {
        double mean = 0.0;
        for (std::size_t c = 0; c < img.cols; ++c) mean += img.at(r, c);
        mean /= static_cast<double>(img.cols);
        for (std::size_t c = 0; c < img.cols; ++c) out.at(r, c) = img.at(r, c) - mean;
    }
    out.update_range();
    return out;
}

BScanImage median_filter(const BScanImage& img, std::size_t k) {
    img.validate();
    if (k % 2 == 0) throw std::invalid_argument("median_filter: k must be odd");
    if (k > std::min(img.rows, img.cols))
        throw std::invalid_argument("median_filter: k exceeds image dimensions");
    if (k == 1) return img;

    const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(k) / 2;
    const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(img.rows);
    const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(img.cols);
    BScanImage out(img.rows, img.cols);
    out.col_spacing_cm = img.col_spacing_cm;
    std::vector<double> window(k * k);
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        for (std::ptrdiff_t c = 0; c < cols; ++c) {
            std::size_t n = 0;
            for (std::ptrdiff_t dr = -h; dr <= h; ++dr) {
                // borders replicate the nearest edge pixel
                const std::ptrdiff_t rr = std::clamp(r + dr, std::ptrdiff_t{0}, rows - 1);
                for (std::ptrdiff_t dc = -h; dc <= h; ++dc) {
                    const std::ptrdiff_t cc = std::clamp(c + dc, std::ptrdiff_t{0}, cols - 1);
                    window[n++] = img.at(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
                }
            }
            auto mid = window.begin() + static_cast<std::ptrdiff_t>(n / 2);
            std::nth_element(window.begin(), mid, window.begin() + static_cast<std::ptrdiff_t>(n));
            out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = *mid;
        }
    }
    out.update_range();
    return out;
}

BScanImage apply_gain(const BScanImage& img, const GainParams& p) {
    img.validate();
    p.validate();
    BScanImage out(img.rows, img.cols);
    out.col_spacing_cm = img.col_spacing_cm;
    for (std::size_t r = 0; r < img.rows; ++r) {
        const double g = p.gain_at(r, img.rows);
        for (std::size_t c = 0; c < img.cols; ++c) out.at(r, c) = img.at(r, c) * g;
    }
    out.update_range();
    return out;
}

BScanImage normalize(const BScanImage& img) {
    img.validate();
    BScanImage out(img.rows, img.cols);
    out.col_spacing_cm = img.col_spacing_cm;
    const auto [lo, hi] = std::minmax_element(img.data.begin(), img.data.end());
    const double span = *hi - *lo;
    if (span <= 0.0) {
        // constant image: nothing to stretch
        out.vmin = -1.0;
        out.vmax = 1.0;
        return out;
    }
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = 2.0 * (img.data[i] - *lo) / span - 1.0;
    out.vmin = -1.0;
    out.vmax = 1.0;
    return out;
}

} // namespace gprdiag::preprocess
