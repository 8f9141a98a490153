#pragma once

#include <string>
#include <vector>

#include "gprdiag/detectors.hpp"
#include "gprdiag/esn.hpp"
#include "gprdiag/model_space.hpp"
#include "gprdiag/pipeline.hpp"
#include "gprdiag/segmentation.hpp"
#include "gprdiag/synthgpr.hpp"

namespace gprdiag::io {

// Reservoir weights as JSON {"n_units", "alpha", "input_scale", "density",
// "ridge_lambda", "seed"}. With as_blob the three weight matrices are
// additionally stored as a raw little-endian float64 blob referenced from
// the JSON ("weights_blob"); otherwise they are regenerated from the seed on
// load.
void save_reservoir(const esn::ReservoirWeights& w, const std::string& path,
                    bool as_blob = false);
esn::ReservoirWeights load_reservoir(const std::string& path);

// Fitted readout as JSON {"n_units", "w_out_up", "w_out_left", "bias",
// "train_nrmse", "window_id", "reservoir_fingerprint"}.
void save_model(const esn::FittedModel& m, const std::string& path);
esn::FittedModel load_model(const std::string& path);

void save_ocsvm(const detectors::OcsvmModel& m, const std::string& path);
detectors::OcsvmModel load_ocsvm(const std::string& path);

void save_knn(const detectors::KnnModel& m, const std::string& path);
detectors::KnnModel load_knn(const std::string& path);

// Model space as CSV: phi components, then label, start_col, end_col.
// n_units and the reservoir fingerprint ride in a leading comment line.
void save_model_space_csv(const model_space::ModelSpace& s, const std::string& path);
model_space::ModelSpace load_model_space_csv(const std::string& path);

// PCA projection: dims coordinate columns + label.
void save_projection_csv(const model_space::PcaProjection& proj,
                         const std::vector<model_space::ModelVector>& points,
                         const std::string& path);

// Merged regions: start_col, end_col, start_cm, end_cm, label, support, mean_score.
void save_regions_csv(const std::vector<segmentation::AnomalyRegion>& regions,
                      double col_spacing_cm, const std::string& path);

// Synthetic ground truth: start_col, end_col, kind.
void save_ground_truth_csv(const std::vector<synthgpr::GroundTruth>& truth,
                           const std::string& path);
std::vector<synthgpr::GroundTruth> load_ground_truth_csv(const std::string& path);

// Scene description (JSON) for the synthetic generator.
synthgpr::SceneSpec load_scene_json(const std::string& path);
void save_scene_json(const synthgpr::SceneSpec& spec, const std::string& path);

// Per-window diagnosis rows: start_col, label, score.
void save_windows_csv(const pipeline::DiagnosisReport& report, const std::string& path);

// Counts and latency percentiles. Wall-clock times vary run to run, so this
// file is the one diagnosis output that is not byte-reproducible.
void save_summary_json(const pipeline::DiagnosisReport& report, const std::string& path);

// Pipeline configuration; flags win over file values in the CLI.
pipeline::PipelineConfig load_pipeline_config(const std::string& path);
void save_pipeline_config(const pipeline::PipelineConfig& cfg, const std::string& path);

} // namespace gprdiag::io
