#pragma once

#include <cstddef>
#include <vector>

namespace gprdiag {

// A B-scan radargram: rows are time/depth samples, columns are traces
// (antenna positions). Values are stored row-major as doubles.
struct BScanImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;      // rows * cols, row-major
    double col_spacing_cm = 0.141; // distance between adjacent traces
    double vmin = 0.0;             // declared value range of `data`
    double vmax = 0.0;

    BScanImage() = default;
    BScanImage(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::size_t size() const { return data.size(); }

    // Recomputes vmin/vmax from the stored samples.
    void update_range();

    // Enforces the type invariants: rows >= 2, cols >= 2, data length,
    // finite samples, positive trace spacing. Throws std::invalid_argument
    // on a shape/parameter violation and DataError on non-finite samples.
    void validate() const;

    // Copies the half-open column span [col_begin, col_end) at full depth.
    BScanImage slice_cols(std::size_t col_begin, std::size_t col_end) const;
};

} // namespace gprdiag
