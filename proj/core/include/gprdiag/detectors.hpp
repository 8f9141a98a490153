#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gprdiag/model_space.hpp"

namespace gprdiag::detectors {

// One-class SVM over the model space. The kernel is an RBF on the squared
// phi distance, i.e. exp(-gamma * model_distance), so the classifier
// operates directly on the model-space metric.
struct OcsvmModel {
    std::vector<Eigen::VectorXd> support_vectors; // phi vectors
    std::vector<double> alphas;                   // nonnegative duals, sum == 1
    double rho = 0.0;
    double nu = 0.0;
    double gamma = 0.0;
    bool degenerate = false; // rho taken from bound SVs (no margin SV found)
    std::uint64_t fingerprint = 0;

    // sum_i alpha_i exp(-gamma ||sv_i - x||^2) - rho
    double decision(const Eigen::VectorXd& phi) const;
};

// 1 / median of the pairwise squared phi distances (zero pairs skipped);
// falls back to 1 when every pair coincides.
double median_heuristic_gamma(const std::vector<model_space::ModelVector>& points);

// Solves the one-class dual
//   min 1/2 a^T K a   s.t.  0 <= a_i <= 1/(nu n),  sum a = 1
// by sequential minimal optimization over maximal-violating pairs
// (KKT tolerance 1e-4, iteration cap 1e4 * n). rho is averaged over margin
// support vectors. gamma <= 0 selects the median heuristic.
OcsvmModel train_ocsvm(const std::vector<model_space::ModelVector>& points,
                       double nu, double gamma);

// (is_inlier, score); is_inlier <=> score >= 0.
std::pair<bool, double> ocsvm_classify(const OcsvmModel& m, const model_space::ModelVector& p);

// Incremental one-class learning: every classifier represents one discovered
// class; points rejected by all of them accumulate in a pool that is
// promoted to a new classifier once it holds min_pool points.
struct IncrementalState {
    struct Classifier {
        std::string label;
        OcsvmModel model;
    };
    std::vector<Classifier> classifiers;              // creation order
    std::vector<model_space::ModelVector> pending_pool;
    std::vector<std::ptrdiff_t> pending_origin;       // stream index in the current call, -1 before it
    std::size_t min_pool = 15;
    std::size_t next_label = 1;
};

inline constexpr const char* kPendingLabel = "pending";

// Labels each stream point: accepted by the base classifier -> "normal";
// otherwise the first accepting anomaly classifier (creation order) wins;
// full rejection pools the point. When the pool reaches min_pool a new
// OCSVM is trained on it, registered under a fresh label, and the pool is
// re-filtered through it (claimed points from this call are relabeled
// retroactively). Points still pooled when the call returns carry
// kPendingLabel. Deterministic given stream order; permuting the stream may
// change the spawned classes.
//
// gamma <= 0 gives every spawned classifier its own median-heuristic width
// scaled by spawn_gamma_scale (a class's later windows must fall inside a
// ball fitted on its first min_pool points, so a wider-than-median kernel is
// usually wanted here).
std::vector<std::string> incremental_diagnose(
    const std::vector<model_space::ModelVector>& stream, const OcsvmModel& base,
    IncrementalState& state, double nu, double gamma, double spawn_gamma_scale = 1.0);

struct KnnModel {
    std::vector<model_space::ModelVector> train_points; // labeled
    std::size_t k = 5;

    void validate() const; // 1 <= k <= train size, labels non-empty
};

// Majority label among the k nearest training points under model_distance.
// Ties break toward the smaller mean distance, then the label appearing
// earliest in the training set.
std::string knn_classify(const KnnModel& m, const model_space::ModelVector& p);

} // namespace gprdiag::detectors
