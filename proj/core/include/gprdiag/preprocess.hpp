#pragma once

#include <cstddef>

#include "gprdiag/bscan.hpp"

namespace gprdiag::preprocess {

// Nonlinear time-varying gain, a clamped linear-times-exponential family:
//   gain(r) = (1 + linear_coeff * t) * exp(exp_coeff * t),  t = r / (rows - 1)
// clamped to [1, max_gain]. Row 0 is always left untouched.
struct GainParams {
    double linear_coeff = 0.0; // >= 0
    double exp_coeff = 0.0;    // >= 0
    double max_gain = 10.0;    // > 1

    void validate() const;
    double gain_at(std::size_t row, std::size_t rows) const;
};

// Surface-echo removal by mean-trace subtraction: every sample has the mean
// of its row subtracted. Idempotent.
BScanImage remove_background(const BScanImage& img);

// k x k median filter with edge replication at the borders. k must be odd
// and no larger than either image dimension.
BScanImage median_filter(const BScanImage& img, std::size_t k);

// Row-dependent amplitude gain compensating propagation losses.
BScanImage apply_gain(const BScanImage& img, const GainParams& p);

// Affine map of [min, max] onto [-1, 1]; a constant image maps to all-zero.
// Reservoir input is expected in this range so tanh stays responsive.
BScanImage normalize(const BScanImage& img);

} // namespace gprdiag::preprocess
