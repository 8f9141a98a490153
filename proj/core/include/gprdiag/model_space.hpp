#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gprdiag/esn.hpp"

namespace gprdiag::model_space {

// Flat metric embedding of a fitted readout:
//   phi = [concat(w_out_up, w_out_left) / sqrt(3) | bias]
// so that the squared Euclidean distance between two phi vectors equals the
// closed-form model distance (1/3)||dW||^2 + ||da||^2.
struct ModelVector {
    Eigen::VectorXd phi; // 2N + 1
    std::string label;   // optional class tag, empty = unlabeled
    std::size_t start_col = 0;
    std::size_t end_col = 0;
    std::uint64_t fingerprint = 0;
};

ModelVector embed(const esn::FittedModel& m);

// Squared-form model distance (the canonical one consumed by the
// classifiers). Throws on length or reservoir-fingerprint mismatch.
double model_distance(const ModelVector& a, const ModelVector& b);

// Square root of the above; this one satisfies the triangle inequality.
double sqrt_model_distance(const ModelVector& a, const ModelVector& b);

// A set of model points sharing one reservoir.
struct ModelSpace {
    std::vector<ModelVector> points;
    std::size_t n_units = 0;                // N; phi length is 2N + 1
    std::uint64_t reservoir_fingerprint = 0;

    // Enforces uniform phi length and fingerprint across points.
    void add(ModelVector v);
    std::size_t size() const { return points.size(); }
};

// Full symmetric matrix of model distances; zero diagonal.
Eigen::MatrixXd pairwise_distances(const ModelSpace& s);

struct PcaProjection {
    std::vector<Eigen::VectorXd> coords; // one dims-vector per input point, input order
    Eigen::VectorXd axis_variance;       // variance captured per retained axis
    std::size_t informative_dims = 0;    // numerical rank of the centered data
    bool degenerate = false;             // informative_dims < dims; trailing coords zero-padded
};

// Mean-centered projection of the phi vectors onto the top principal axes.
// dims must be in [1, 3] and the space must hold at least dims points.
PcaProjection pca_project(const ModelSpace& s, std::size_t dims);

} // namespace gprdiag::model_space
