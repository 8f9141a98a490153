#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "gprdiag/bscan.hpp"

namespace gprdiag::esn {

struct ReservoirConfig {
    std::size_t n_units = 50;   // N
    double alpha = 0.1;         // spectral radius target, in (0, 1)
    double input_scale = 1.0;   // > 0
    double density = 0.1;       // fraction of nonzeros per reservoir matrix, in (0, 1]
    double ridge_lambda = 1e-6; // >= 0
    std::uint64_t seed = 0;

    void validate() const;
};

// Frozen random weights of one 2D-ESN instance. A deterministic function of
// the config: the same (config, seed) reproduces bit-identical matrices.
struct ReservoirWeights {
    Eigen::VectorXd w_in;       // N x 1, input weight
    Eigen::MatrixXd w_res_up;   // N x N, recurrence from the upper neighbor
    Eigen::MatrixXd w_res_left; // N x N, recurrence from the left neighbor
    ReservoirConfig config;

    // Hash over config and weight bytes; model-space points carry it so that
    // distances are only ever taken between models fitted on one reservoir.
    std::uint64_t fingerprint() const;
};

// Externally supplied virtual boundary states for the grid iteration.
// Column c of `top` stands in for h(0, c), column r of `left` for h(r, 0).
// The default boundary is the zero vector everywhere.
struct GridBoundary {
    Eigen::MatrixXd top;  // N x cols
    Eigen::MatrixXd left; // N x rows
};

// Hidden states h(r, c) of one window, stored as columns of an
// N x (rows * cols) matrix in row-major grid order.
struct HiddenGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Eigen::MatrixXd states;
    std::uint64_t reservoir_fingerprint = 0;

    Eigen::MatrixXd::ConstColXpr state(std::size_t r, std::size_t c) const {
        return states.col(static_cast<Eigen::Index>(r * cols + c));
    }
};

// The trained readout of one window: the point that gets embedded into the
// model space. 2N weights plus one bias regardless of window height.
struct FittedModel {
    Eigen::RowVectorXd w_out_up;   // 1 x N
    Eigen::RowVectorXd w_out_left; // 1 x N
    double bias = 0.0;
    double train_nrmse = 0.0;
    std::string window_id;
    std::uint64_t reservoir_fingerprint = 0;
};

// Minimal 1D ESN fitted column-to-next-column; kept only for the
// readout-size comparison against the 2D readout.
struct BaselineEsnModel {
    Eigen::MatrixXd w_out; // M x N
    Eigen::VectorXd bias;  // M
    double train_nrmse = 0.0;

    std::size_t parameter_count() const {
        return static_cast<std::size_t>(w_out.size() + bias.size());
    }
};

// Draws input and reservoir weights i.i.d. uniform on [-0.5, 0.5] from
// splitmix64 substreams of config.seed, sparsifies each reservoir matrix to
// `density` nonzeros and rescales it to spectral radius alpha.
ReservoirWeights init_reservoir(const ReservoirConfig& config);

// Largest |eigenvalue|, estimated by normalized power iteration tracking the
// geometric mean of per-step norm growth (handles complex dominant pairs).
// Iteration cap 1000, relative tolerance 1e-6, fixed seeded start vector.
// A zero (or nilpotent) matrix yields 0.
double spectral_radius(const Eigen::MatrixXd& m);

// Returns m * alpha / spectral_radius(m). Throws NumericError when the
// spectral radius is zero.
Eigen::MatrixXd scale_to_radius(const Eigen::MatrixXd& m, double alpha);

// Grid iteration h(r,c) = tanh(W_up h(r-1,c) + W_left h(r,c-1) + w_in x(r,c)),
// swept left-to-right, top-to-bottom. Missing neighbors take the boundary
// states (zero vectors unless a GridBoundary is given). Accepts any grid with
// rows >= 1 and cols >= 1; samples must be finite.
HiddenGrid run_grid(const ReservoirWeights& w, const BScanImage& window);
HiddenGrid run_grid(const ReservoirWeights& w, const BScanImage& window,
                    const GridBoundary& boundary);

// Ridge regression W = (H^T H + lambda^2 I)^-1 H^T Y. When
// unregularized_last is set the last column of H (the constant bias feature)
// is excluded from the penalty. Throws NumericError if lambda == 0 and the
// system is singular.
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
                            double lambda, bool unregularized_last = false);
Eigen::MatrixXd ridge_solve_multi(const Eigen::MatrixXd& H, const Eigen::MatrixXd& Y,
                                  double lambda, bool unregularized_last = false);

// Next-item prediction readout: for every (r, c) with both real neighbors,
// predict x(r, c) from [h(r-1,c) | h(r,c-1) | 1]. The trailing constant
// feature carries the bias and is not regularized.
FittedModel fit_readout(const HiddenGrid& grid, const BScanImage& window, double lambda);

// run_grid + fit_readout with the config's ridge lambda.
FittedModel fit_window(const ReservoirWeights& w, const BScanImage& window,
                       std::string window_id = {});

// Hidden states of the baseline 1D ESN run left-to-right over the columns
// (column n is the M-dimensional input at step n). Column n of the result
// is h(n).
Eigen::MatrixXd run_baseline_esn(const BScanImage& window, const ReservoirConfig& config);

// Baseline readout predicting column n+1 from h(n); M*N weights + M biases.
BaselineEsnModel fit_baseline_esn(const BScanImage& window, const ReservoirConfig& config);

// y = W h + b for the baseline model.
Eigen::VectorXd predict_next_column(const BaselineEsnModel& m, const Eigen::VectorXd& hidden);

} // namespace gprdiag::esn
