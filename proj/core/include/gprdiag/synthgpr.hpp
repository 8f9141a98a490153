#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gprdiag/bscan.hpp"

namespace gprdiag::synthgpr {

enum class AnomalyKind { moisture_blob, loose_texture, cavity };

std::string to_string(AnomalyKind kind);
AnomalyKind anomaly_kind_from_string(const std::string& s);

// Horizontal interface at a fixed depth.
struct Layer {
    std::size_t depth_row = 0;
    double reflect_amp = 1.0;
};

// Point reflector producing a diffraction hyperbola with apex at
// (col, 2 * depth_row / velocity_px).
struct Scatterer {
    std::size_t col = 0;
    double depth_row = 0.0;
    double velocity_px = 2.0;
    double amp = 1.0;
};

struct AnomalySpec {
    AnomalyKind kind = AnomalyKind::moisture_blob;
    std::size_t col_begin = 0, col_end = 0; // half-open
    std::size_t row_begin = 0, row_end = 0; // half-open
    double intensity = 1.0;
};

struct SceneSpec {
    std::size_t rows = 64;
    std::size_t cols = 1000;
    double wavelet_freq = 0.12; // Ricker center frequency per row sample
    std::vector<Layer> layers;
    std::vector<Scatterer> scatterers;
    std::vector<AnomalySpec> anomalies;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    double col_spacing_cm = 0.141;

    void validate() const; // spans within bounds, rows/cols >= 2, sigma >= 0
};

struct GroundTruth {
    std::size_t col_begin = 0;
    std::size_t col_end = 0;
    AnomalyKind kind = AnomalyKind::moisture_blob;
};

// (1 - 2 pi^2 f^2 t^2) exp(-pi^2 f^2 t^2)
double ricker(double t, double f);

// Builds a reflectivity grid (layers, hyperbolic scatterer responses,
// anomaly textures), convolves every column with the Ricker wavelet and adds
// Gaussian noise. Per-column RNG substreams are derived from (seed, col), so
// the output is deterministic and column generation can run in parallel.
std::pair<BScanImage, std::vector<GroundTruth>> generate_bscan(const SceneSpec& spec);

} // namespace gprdiag::synthgpr
