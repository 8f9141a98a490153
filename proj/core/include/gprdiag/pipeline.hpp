#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gprdiag/bscan.hpp"
#include "gprdiag/detectors.hpp"
#include "gprdiag/esn.hpp"
#include "gprdiag/model_space.hpp"
#include "gprdiag/preprocess.hpp"
#include "gprdiag/segmentation.hpp"

namespace gprdiag::pipeline {

struct PreprocessParams {
    bool remove_background = true;
    std::size_t median_k = 3; // 0 or 1 disables the filter
    bool apply_gain = false;
    preprocess::GainParams gain;
    bool normalize = true;
};

struct DetectorParams {
    double nu = 0.05;
    double gamma = 0.0;       // <= 0 selects the median heuristic
    double gamma_scale = 1.0;       // multiplies the heuristic width when gamma <= 0
    double spawn_gamma_scale = 1.0; // same, for classifiers spawned during discovery
    std::size_t min_pool = 15;
    std::size_t knn_k = 5;
    bool incremental = true; // off = plain base-classifier (normal/abnormal) labels
};

struct PipelineConfig {
    segmentation::WindowSpec window;
    esn::ReservoirConfig reservoir;
    PreprocessParams preprocess;
    DetectorParams detector;
    std::size_t threads = 0; // 0 = hardware concurrency
    std::size_t merge_gap_tolerance = 0;

    // CLI wiring; unused by the in-process entry points.
    std::string input_path;
    std::string base_model_path;
    std::string out_dir;
    std::optional<std::pair<std::size_t, std::size_t>> normal_span;
};

struct WindowResult {
    std::size_t start_col = 0;
    std::string label;
    double score = 0.0;      // base-classifier decision value
    double fit_seconds = 0.0;
    double classify_seconds = 0.0;
};

struct DiagnosisReport {
    std::vector<WindowResult> windows;
    std::vector<segmentation::AnomalyRegion> regions;
    std::size_t normal_count = 0;
    std::size_t anomaly_count = 0;
    std::size_t classes_discovered = 0;
    // fit + classify wall time per window
    double mean_window_seconds = 0.0;
    double p50_window_seconds = 0.0;
    double p90_window_seconds = 0.0;
    double max_window_seconds = 0.0;
    double total_seconds = 0.0;
};

BScanImage run_preprocess(const BScanImage& img, const PreprocessParams& p);

// Fits every sliding window of a preprocessed image and embeds the readouts.
// Windows are fitted by a pool of `threads` workers; results keep stream
// order. Optional per-window fit timings land in fit_seconds.
model_space::ModelSpace fit_image(const BScanImage& preprocessed,
                                  const esn::ReservoirWeights& weights,
                                  const segmentation::WindowSpec& spec,
                                  std::size_t threads = 0,
                                  std::vector<double>* fit_seconds = nullptr);

// Trains the base one-class classifier on the windows of a normal column
// span of the preprocessed image.
detectors::OcsvmModel train_base_from_span(const BScanImage& preprocessed,
                                           const esn::ReservoirWeights& weights,
                                           const PipelineConfig& cfg,
                                           std::size_t span_begin, std::size_t span_end);

// End-to-end diagnosis of a raw image: preprocess, slide, fit (parallel),
// embed, classify (incremental or plain), merge regions. When base is null a
// normal_span must be present in the config and the base classifier is
// trained from it first. Deterministic for fixed config and seeds,
// independent of the thread count.
DiagnosisReport diagnose(const BScanImage& raw, const PipelineConfig& cfg,
                         const detectors::OcsvmModel* base = nullptr,
                         detectors::IncrementalState* state = nullptr,
                         detectors::OcsvmModel* trained_base_out = nullptr);

} // namespace gprdiag::pipeline
