#include "gprdiag/synthgpr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gprdiag/rng.hpp"

namespace gprdiag::synthgpr {

namespace {

constexpr double kPi = 3.14159265358979323846;

// substream tags: noise per column, anomaly textures per (anomaly, column)
constexpr std::uint64_t kNoiseStream = 0x4E01;
constexpr std::uint64_t kAnomalyStream = 0xA701;

std::uint64_t column_seed(std::uint64_t seed, std::uint64_t tag, std::size_t col) {
    return rng::mix_seed(rng::mix_seed(seed, tag), col);
}

} // namespace

std::string to_string(AnomalyKind kind) {
    switch (kind) {
        case AnomalyKind::moisture_blob: return "moisture_blob";
        case AnomalyKind::loose_texture: return "loose_texture";
        case AnomalyKind::cavity: return "cavity";
    }
    return "unknown";
}

AnomalyKind anomaly_kind_from_string(const std::string& s) {
    if (s == "moisture_blob") return AnomalyKind::moisture_blob;
    if (s == "loose_texture") return AnomalyKind::loose_texture;
    if (s == "cavity") return AnomalyKind::cavity;
    throw std::invalid_argument("unknown anomaly kind: " + s);
}

void SceneSpec::validate() const {
    if (rows < 2 || cols < 2) throw std::invalid_argument("SceneSpec: rows and cols must be >= 2");
    if (!(wavelet_freq > 0.0)) throw std::invalid_argument("SceneSpec: wavelet_freq must be > 0");
    if (noise_sigma < 0.0) throw std::invalid_argument("SceneSpec: noise_sigma must be >= 0");
    if (!(col_spacing_cm > 0.0)) throw std::invalid_argument("SceneSpec: col_spacing_cm must be > 0");
    for (const Layer& l : layers)
        if (l.depth_row >= rows) throw std::invalid_argument("SceneSpec: layer depth out of bounds");
    for (const Scatterer& s : scatterers) {
        if (s.col >= cols || s.depth_row < 0.0 || s.depth_row >= static_cast<double>(rows))
            throw std::invalid_argument("SceneSpec: scatterer position out of bounds");
        if (!(s.velocity_px > 0.0)) throw std::invalid_argument("SceneSpec: velocity_px must be > 0");
    }
    for (const AnomalySpec& a : anomalies) {
        if (a.col_begin >= a.col_end || a.col_end > cols || a.row_begin >= a.row_end ||
            a.row_end > rows)
            throw std::invalid_argument("SceneSpec: anomaly span out of bounds");
    }
}

double ricker(double t, double f) {
    if (!(f > 0.0)) throw std::invalid_argument("ricker: f must be > 0");
    const double u = kPi * kPi * f * f * t * t;
    return (1.0 - 2.0 * u) * std::exp(-u);
}

std::pair<BScanImage, std::vector<GroundTruth>> generate_bscan(const SceneSpec& spec) {
    spec.validate();
    const std::size_t rows = spec.rows, cols = spec.cols;

    // 1) reflectivity grid
    std::vector<double> refl(rows * cols, 0.0);
    auto ref_at = [&](std::size_t r, std::size_t c) -> double& { return refl[r * cols + c]; };

    for (const Layer& l : spec.layers)
        for (std::size_t c = 0; c < cols; ++c) ref_at(l.depth_row, c) += l.reflect_amp;

    for (const Scatterer& s : spec.scatterers) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double dx = static_cast<double>(c) - static_cast<double>(s.col);
            const double travel = 2.0 * std::hypot(s.depth_row, dx) / s.velocity_px;
            const std::size_t r = static_cast<std::size_t>(std::llround(travel));
            if (r >= rows) continue;
            ref_at(r, c) += s.amp / std::max(travel, 1.0);
        }
    }

    for (std::size_t ai = 0; ai < spec.anomalies.size(); ++ai) {
        const AnomalySpec& a = spec.anomalies[ai];
        const double rc = 0.5 * static_cast<double>(a.row_begin + a.row_end - 1);
        const double sr = std::max(1.0, static_cast<double>(a.row_end - a.row_begin) / 4.0);
        // soft horizontal shoulders so the patch fades in and out over
        // ~1/8 of its span instead of starting with a hard edge
        const double ramp = std::max(1.0, static_cast<double>(a.col_end - a.col_begin) / 8.0);
        auto col_profile = [&](std::size_t c) {
            const double from_lo = static_cast<double>(c - a.col_begin);
            const double from_hi = static_cast<double>(a.col_end - 1 - c);
            const double edge = std::min(from_lo, from_hi);
            return edge >= ramp ? 1.0 : 0.5 - 0.5 * std::cos(kPi * edge / ramp);
        };
        switch (a.kind) {
            case AnomalyKind::moisture_blob:
                // smooth bright patch: gaussian depth profile, plateau along
                // the survey direction
                for (std::size_t c = a.col_begin; c < a.col_end; ++c) {
                    const double gc = col_profile(c);
                    for (std::size_t r = a.row_begin; r < a.row_end; ++r) {
                        const double gr = std::exp(-0.5 * (static_cast<double>(r) - rc) *
                                                   (static_cast<double>(r) - rc) / (sr * sr));
                        ref_at(r, c) += a.intensity * gc * gr;
                    }
                }
                break;
            case AnomalyKind::loose_texture:
                // high-variance speckle, per-column substream
                for (std::size_t c = a.col_begin; c < a.col_end; ++c) {
                    rng::SplitMix64 g(column_seed(spec.seed, kAnomalyStream + ai, c));
                    const double amp = a.intensity * col_profile(c);
                    for (std::size_t r = a.row_begin; r < a.row_end; ++r)
                        ref_at(r, c) += amp * g.uniform(-1.0, 1.0);
                }
                break;
            case AnomalyKind::cavity: {
                // bright top edge, alternating-polarity reverberation bands
                // below it (air gaps ring), shadowed interior
                const std::size_t edge =
                    std::max<std::size_t>(1, (a.row_end - a.row_begin) / 10);
                const std::size_t period = std::max<std::size_t>(3, edge + 2);
                for (std::size_t c = a.col_begin; c < a.col_end; ++c) {
                    const double amp = a.intensity * col_profile(c);
                    for (std::size_t r = a.row_begin; r < a.row_end; ++r) {
                        const std::size_t depth = r - a.row_begin;
                        if (depth < edge) {
                            ref_at(r, c) += amp;
                        } else {
                            const std::size_t k = (depth - edge) / period;
                            const double echo = (k % 2 == 0 ? -1.0 : 1.0) * std::pow(0.7, double(k));
                            ref_at(r, c) += amp * (0.8 * echo - 0.2);
                        }
                    }
                }
                break;
            }
        }
    }

    // 2) vertical convolution with the Ricker wavelet
    const double f = spec.wavelet_freq;
    const std::ptrdiff_t radius =
        std::max<std::ptrdiff_t>(1, static_cast<std::ptrdiff_t>(std::ceil(1.25 / f)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    for (std::ptrdiff_t i = -radius; i <= radius; ++i)
        kernel[static_cast<std::size_t>(i + radius)] = ricker(static_cast<double>(i), f);

    BScanImage img(rows, cols);
    img.col_spacing_cm = spec.col_spacing_cm;
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) {
            double acc = 0.0;
            for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
                const std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(r) - i;
                if (rr < 0 || rr >= static_cast<std::ptrdiff_t>(rows)) continue;
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       refl[static_cast<std::size_t>(rr) * cols + c];
            }
            img.at(r, c) = acc;
        }
    }

    // 3) measurement noise, per-column substream
    if (spec.noise_sigma > 0.0) {
        for (std::size_t c = 0; c < cols; ++c) {
            rng::SplitMix64 g(column_seed(spec.seed, kNoiseStream, c));
            for (std::size_t r = 0; r < rows; ++r)
                img.at(r, c) += spec.noise_sigma * g.gaussian();
        }
    }

    img.update_range();

    std::vector<GroundTruth> truth;
    truth.reserve(spec.anomalies.size());
    for (const AnomalySpec& a : spec.anomalies)
        truth.push_back(GroundTruth{a.col_begin, a.col_end, a.kind});
    return {std::move(img), std::move(truth)};
}

} // namespace gprdiag::synthgpr
