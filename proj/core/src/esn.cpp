#include "gprdiag/esn.hpp"

#include <cmath>
#include <cstring>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "gprdiag/errors.hpp"
#include "gprdiag/rng.hpp"

namespace gprdiag::esn {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv1a(std::uint64_t& h, const void* bytes, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
}

void fnv1a_matrix(std::uint64_t& h, const Eigen::MatrixXd& m) {
    fnv1a(h, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

// Uniform [-0.5, 0.5] entries, each kept with probability `density`.
Eigen::MatrixXd random_sparse(std::size_t rows, std::size_t cols, double density,
                              std::uint64_t seed) {
    rng::SplitMix64 g(seed);
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = g.uniform(-0.5, 0.5);
            const double keep = g.uniform01();
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                keep < density ? v : 0.0;
        }
    }
    return m;
}

double population_std(const Eigen::VectorXd& y) {
    const double mean = y.mean();
    return std::sqrt((y.array() - mean).square().mean());
}

} // namespace

void ReservoirConfig::validate() const {
    if (n_units < 1) throw std::invalid_argument("ReservoirConfig: n_units must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("ReservoirConfig: alpha must be in (0, 1)");
    if (!(input_scale > 0.0))
        throw std::invalid_argument("ReservoirConfig: input_scale must be > 0");
    if (!(density > 0.0 && density <= 1.0))
        throw std::invalid_argument("ReservoirConfig: density must be in (0, 1]");
    if (density * static_cast<double>(n_units) < 1.0)
        throw std::invalid_argument("ReservoirConfig: density * n_units must be >= 1");
    if (ridge_lambda < 0.0)
        throw std::invalid_argument("ReservoirConfig: ridge_lambda must be >= 0");
}

std::uint64_t ReservoirWeights::fingerprint() const {
    std::uint64_t h = kFnvOffset;
    fnv1a(h, &config.n_units, sizeof(config.n_units));
    fnv1a(h, &config.alpha, sizeof(config.alpha));
    fnv1a(h, &config.seed, sizeof(config.seed));
    fnv1a(h, w_in.data(), sizeof(double) * static_cast<std::size_t>(w_in.size()));
    fnv1a_matrix(h, w_res_up);
    fnv1a_matrix(h, w_res_left);
    return h;
}

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: matrix must be square");
    if (!m.allFinite()) throw std::invalid_argument("spectral_radius: matrix must be finite");
    const Eigen::Index n = m.rows();
    if (n == 0) return 0.0;

    constexpr int kMaxIter = 1000;
    constexpr double kRelTol = 1e-6;

    rng::SplitMix64 g(0x5EEDF00D5EEDF00DULL);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = g.uniform(-1.0, 1.0);
    const double nv = v.norm();
    if (nv == 0.0)
        v.setUnit(0);
    else
        v /= nv;

    // The estimate is the geometric mean of the per-step norm growth over the
    // trailing half of the iterations; the early transient drops out and a
    // complex dominant pair only makes the growth oscillate around |lambda|.
    std::vector<double> log_growth;
    log_growth.reserve(kMaxIter);
    std::vector<double> prefix{0.0};
    prefix.reserve(kMaxIter + 1);

    Eigen::VectorXd w(n);
    double est = 0.0;
    double prev = -1.0;
    int stable = 0;
    for (int k = 1; k <= kMaxIter; ++k) {
        w.noalias() = m * v;
        const double growth = w.norm();
        if (growth == 0.0) return 0.0; // iterate hit the kernel (zero or nilpotent matrix)
        if (!std::isfinite(growth)) throw NumericError("spectral_radius: norm overflow");
        v = w / growth;
        log_growth.push_back(std::log(growth));
        prefix.push_back(prefix.back() + log_growth.back());

        const int lo = k / 2;
        est = std::exp((prefix[static_cast<std::size_t>(k)] - prefix[static_cast<std::size_t>(lo)]) /
                       static_cast<double>(k - lo));
        if (prev >= 0.0 && std::abs(est - prev) <= kRelTol * std::max(est, 1e-300)) {
            if (++stable >= 3) return est;
        } else {
            stable = 0;
        }
        prev = est;
    }
    return est;
}

Eigen::MatrixXd scale_to_radius(const Eigen::MatrixXd& m, double alpha) {
    const double rho = spectral_radius(m);
    if (rho <= 0.0)
        throw NumericError("scale_to_radius: spectral radius is zero, cannot scale");
    return m * (alpha / rho);
}

ReservoirWeights init_reservoir(const ReservoirConfig& config) {
    config.validate();
    const std::size_t n = config.n_units;

    ReservoirWeights w;
    w.config = config;

    rng::SplitMix64 g_in(rng::mix_seed(config.seed, 0));
    w.w_in.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        w.w_in[static_cast<Eigen::Index>(i)] = g_in.uniform(-0.5, 0.5) * config.input_scale;

    // A sparse draw can come out nilpotent (spectral radius zero) at small N;
    // redraw from the next substream until it is scalable. The substream
    // sequence is fixed, so the result is still a pure function of the seed.
    auto draw_scaled = [&](std::uint64_t stream) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            Eigen::MatrixXd m = random_sparse(n, n, config.density,
                                              rng::mix_seed(config.seed, stream + 2 * std::uint64_t(attempt)));
            if (spectral_radius(m) > 0.0) return scale_to_radius(m, config.alpha);
        }
        throw NumericError("init_reservoir: could not draw a scalable reservoir matrix");
    };
    w.w_res_up = draw_scaled(1);
    w.w_res_left = draw_scaled(2);
    return w;
}

namespace {

HiddenGrid run_grid_impl(const ReservoirWeights& w, const BScanImage& window,
                         const GridBoundary* boundary) {
    const std::size_t rows = window.rows, cols = window.cols;
    if (rows == 0 || cols == 0 || window.data.size() != rows * cols)
        throw std::invalid_argument("run_grid: empty or inconsistent window");
    for (double v : window.data)
        if (!std::isfinite(v)) throw DataError("run_grid: non-finite input");

    const Eigen::Index n = w.w_in.size();
    if (boundary) {
        if (boundary->top.rows() != n || boundary->top.cols() < static_cast<Eigen::Index>(cols) ||
            boundary->left.rows() != n || boundary->left.cols() < static_cast<Eigen::Index>(rows))
            throw std::invalid_argument("run_grid: boundary dimensions do not match");
    }

    HiddenGrid grid;
    grid.rows = rows;
    grid.cols = cols;
    grid.reservoir_fingerprint = w.fingerprint();
    grid.states.resize(n, static_cast<Eigen::Index>(rows * cols));

    // Per row, the whole up-neighbor contribution W_up * h(r-1, :) is one
    // GEMM; only the left-neighbor chain is inherently sequential.
    Eigen::MatrixXd up_contrib(n, static_cast<Eigen::Index>(cols));
    Eigen::VectorXd pre(n);
    for (std::size_t r = 0; r < rows; ++r) {
        if (r == 0) {
            if (boundary)
                up_contrib.noalias() = w.w_res_up * boundary->top.leftCols(static_cast<Eigen::Index>(cols));
            else
                up_contrib.setZero();
        } else {
            up_contrib.noalias() =
                w.w_res_up * grid.states.middleCols(static_cast<Eigen::Index>((r - 1) * cols),
                                                    static_cast<Eigen::Index>(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            const Eigen::Index idx = static_cast<Eigen::Index>(r * cols + c);
            pre = up_contrib.col(static_cast<Eigen::Index>(c));
            if (c == 0) {
                if (boundary) pre.noalias() += w.w_res_left * boundary->left.col(static_cast<Eigen::Index>(r));
            } else {
                pre.noalias() += w.w_res_left * grid.states.col(idx - 1);
            }
            pre.noalias() += w.w_in * window.at(r, c);
            grid.states.col(idx) = pre.array().tanh();
        }
    }
    return grid;
}

} // namespace

HiddenGrid run_grid(const ReservoirWeights& w, const BScanImage& window) {
    return run_grid_impl(w, window, nullptr);
}

HiddenGrid run_grid(const ReservoirWeights& w, const BScanImage& window,
                    const GridBoundary& boundary) {
    return run_grid_impl(w, window, &boundary);
}

Eigen::MatrixXd ridge_solve_multi(const Eigen::MatrixXd& H, const Eigen::MatrixXd& Y,
                                  double lambda, bool unregularized_last) {
    if (H.rows() != Y.rows()) throw std::invalid_argument("ridge_solve: H and Y row mismatch");
    if (lambda < 0.0) throw std::invalid_argument("ridge_solve: lambda must be >= 0");
    const Eigen::Index d = H.cols();

    if (lambda == 0.0) {
        // without the ridge term the normal equations need full column rank
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(H);
        if (cod.rank() < d)
            throw NumericError("ridge_solve: singular system at lambda = 0; use lambda > 0");
    }

    Eigen::MatrixXd A = H.transpose() * H;
    const Eigen::Index reg_dims = unregularized_last ? d - 1 : d;
    for (Eigen::Index i = 0; i < reg_dims; ++i) A(i, i) += lambda * lambda;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    Eigen::MatrixXd B = H.transpose() * Y;
    Eigen::MatrixXd W = ldlt.solve(B);

    const double residual = (A * W - B).norm();
    const double scale = B.norm() + A.norm();
    if (ldlt.info() != Eigen::Success || !W.allFinite() || residual > 1e-8 * (scale + 1.0)) {
        if (lambda == 0.0)
            throw NumericError("ridge_solve: singular system at lambda = 0; use lambda > 0");
        throw NumericError("ridge_solve: factorization failed");
    }
    return W;
}

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
                            double lambda, bool unregularized_last) {
    return ridge_solve_multi(H, y, lambda, unregularized_last).col(0);
}

FittedModel fit_readout(const HiddenGrid& grid, const BScanImage& window, double lambda) {
    if (grid.rows != window.rows || grid.cols != window.cols)
        throw std::invalid_argument("fit_readout: grid does not match window");
    if (window.rows < 2 || window.cols < 2)
        throw std::invalid_argument("fit_readout: window must be at least 2x2");

    const Eigen::Index n = grid.states.rows();
    const std::size_t samples = (window.rows - 1) * (window.cols - 1);
    const Eigen::Index dim = 2 * n + 1;
    if (samples < static_cast<std::size_t>(dim))
        std::cerr << "fit_readout: under-determined (" << samples << " samples for " << dim
                  << " features); ridge keeps the solve stable\n";

    // Regression targets are the points with a real upper AND left neighbor.
    Eigen::MatrixXd H(static_cast<Eigen::Index>(samples), dim);
    Eigen::VectorXd y(static_cast<Eigen::Index>(samples));
    Eigen::Index s = 0;
    for (std::size_t r = 1; r < window.rows; ++r) {
        for (std::size_t c = 1; c < window.cols; ++c) {
            H.block(s, 0, 1, n) = grid.state(r - 1, c).transpose();
            H.block(s, n, 1, n) = grid.state(r, c - 1).transpose();
            H(s, 2 * n) = 1.0; // constant feature carries the bias
            y[s] = window.at(r, c);
            ++s;
        }
    }

    const Eigen::VectorXd wf = ridge_solve(H, y, lambda, /*unregularized_last=*/true);

    FittedModel m;
    m.w_out_up = wf.head(n).transpose();
    m.w_out_left = wf.segment(n, n).transpose();
    m.bias = wf[2 * n];
    m.reservoir_fingerprint = grid.reservoir_fingerprint;

    const Eigen::VectorXd pred = H * wf;
    const double rmse = std::sqrt((pred - y).squaredNorm() / static_cast<double>(samples));
    double denom = population_std(y);
    if (denom < 1e-12) denom = 1.0;
    m.train_nrmse = rmse / denom;
    return m;
}

FittedModel fit_window(const ReservoirWeights& w, const BScanImage& window,
                       std::string window_id) {
    FittedModel m = fit_readout(run_grid(w, window), window, w.config.ridge_lambda);
    m.window_id = std::move(window_id);
    return m;
}

namespace {

// Baseline weights live on their own substreams so they never collide with
// the 2D weights drawn from the same seed.
constexpr std::uint64_t kBaselineInputStream = 0x10001;
constexpr std::uint64_t kBaselineReservoirStream = 0x10003;

} // namespace

Eigen::MatrixXd run_baseline_esn(const BScanImage& window, const ReservoirConfig& config) {
    config.validate();
    window.validate();
    const std::size_t m_rows = window.rows, cols = window.cols;
    const std::size_t n = config.n_units;

    Eigen::MatrixXd w_in(n, m_rows);
    {
        rng::SplitMix64 g(rng::mix_seed(config.seed, kBaselineInputStream));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < m_rows; ++c)
                w_in(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    g.uniform(-0.5, 0.5) * config.input_scale;
    }
    const Eigen::MatrixXd w_res = scale_to_radius(
        random_sparse(n, n, config.density, rng::mix_seed(config.seed, kBaselineReservoirStream)),
        config.alpha);

    Eigen::MatrixXd states(n, static_cast<Eigen::Index>(cols));
    Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd x(static_cast<Eigen::Index>(m_rows));
    Eigen::VectorXd pre(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < m_rows; ++r) x[static_cast<Eigen::Index>(r)] = window.at(r, c);
        pre.noalias() = w_res * h;
        pre.noalias() += w_in * x;
        h = pre.array().tanh();
        states.col(static_cast<Eigen::Index>(c)) = h;
    }
    return states;
}

BaselineEsnModel fit_baseline_esn(const BScanImage& window, const ReservoirConfig& config) {
    if (window.cols < 2) throw std::invalid_argument("fit_baseline_esn: need at least 2 columns");
    const Eigen::MatrixXd states = run_baseline_esn(window, config);
    const std::size_t m_rows = window.rows, cols = window.cols;
    const Eigen::Index n = states.rows();

    // Predict column c+1 from h(c).
    Eigen::MatrixXd H(static_cast<Eigen::Index>(cols - 1), n + 1);
    Eigen::MatrixXd Y(static_cast<Eigen::Index>(cols - 1), static_cast<Eigen::Index>(m_rows));
    for (std::size_t c = 0; c + 1 < cols; ++c) {
        H.block(static_cast<Eigen::Index>(c), 0, 1, n) =
            states.col(static_cast<Eigen::Index>(c)).transpose();
        H(static_cast<Eigen::Index>(c), n) = 1.0;
        for (std::size_t r = 0; r < m_rows; ++r)
            Y(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = window.at(r, c + 1);
    }

    const Eigen::MatrixXd W = ridge_solve_multi(H, Y, config.ridge_lambda, /*unregularized_last=*/true);

    BaselineEsnModel model;
    model.w_out = W.topRows(n).transpose(); // M x N
    model.bias = W.row(n).transpose();      // M

    const Eigen::MatrixXd pred = H * W;
    const double rmse = std::sqrt((pred - Y).squaredNorm() / static_cast<double>(Y.size()));
    const double mean = Y.mean();
    double denom = std::sqrt((Y.array() - mean).square().mean());
    if (denom < 1e-12) denom = 1.0;
    model.train_nrmse = rmse / denom;
    return model;
}

Eigen::VectorXd predict_next_column(const BaselineEsnModel& m, const Eigen::VectorXd& hidden) {
    if (hidden.size() != m.w_out.cols())
        throw std::invalid_argument("predict_next_column: hidden-state size mismatch");
    return m.w_out * hidden + m.bias;
}

} // namespace gprdiag::esn
