#include "gprdiag/bscan.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gprdiag/errors.hpp"

namespace gprdiag {

void BScanImage::update_range() {
    if (data.empty()) {
        vmin = vmax = 0.0;
        return;
    }
    auto [lo, hi] = std::minmax_element(data.begin(), data.end());
    vmin = *lo;
    vmax = *hi;
}

void BScanImage::validate() const {
    if (rows < 2 || cols < 2)
        throw std::invalid_argument("BScanImage: rows and cols must both be >= 2");
    if (data.size() != rows * cols)
        throw std::invalid_argument("BScanImage: data length must equal rows * cols");
    if (!(col_spacing_cm > 0.0))
        throw std::invalid_argument("BScanImage: col_spacing_cm must be > 0");
    for (double v : data)
        if (!std::isfinite(v)) throw DataError("BScanImage: non-finite sample");
}

BScanImage BScanImage::slice_cols(std::size_t col_begin, std::size_t col_end) const {
    if (col_begin >= col_end || col_end > cols)
        throw std::invalid_argument("BScanImage::slice_cols: bad column span");
    BScanImage out(rows, col_end - col_begin);
    out.col_spacing_cm = col_spacing_cm;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = col_begin; c < col_end; ++c)
            out.at(r, c - col_begin) = at(r, c);
    out.update_range();
    return out;
}

} // namespace gprdiag
