#include "gprdiag/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gprdiag/errors.hpp"
#include "gprdiag/segmentation.hpp"

namespace gprdiag::detectors {

namespace {

constexpr double kKktTol = 1e-4;

double rbf(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double gamma) {
    return std::exp(-gamma * (u - v).squaredNorm());
}

} // namespace

double OcsvmModel::decision(const Eigen::VectorXd& phi) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < support_vectors.size(); ++i)
        acc += alphas[i] * rbf(support_vectors[i], phi, gamma);
    return acc - rho;
}

double median_heuristic_gamma(const std::vector<model_space::ModelVector>& points) {
    std::vector<double> d2;
    d2.reserve(points.size() * (points.size() - 1) / 2);
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double v = model_space::model_distance(points[i], points[j]);
            if (v > 0.0) d2.push_back(v);
        }
    if (d2.empty()) return 1.0;
    auto mid = d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2);
    std::nth_element(d2.begin(), mid, d2.end());
    return 1.0 / *mid;
}

OcsvmModel train_ocsvm(const std::vector<model_space::ModelVector>& points,
                       double nu, double gamma) {
    const std::size_t n = points.size();
    if (n < 2) throw std::invalid_argument("train_ocsvm: need at least 2 points");
    if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("train_ocsvm: nu must be in (0, 1]");
    for (std::size_t i = 1; i < n; ++i)
        if (points[i].phi.size() != points[0].phi.size() ||
            points[i].fingerprint != points[0].fingerprint)
            throw DataError("train_ocsvm: points from mismatched model spaces");
    if (gamma <= 0.0) gamma = median_heuristic_gamma(points);

    const double bound = 1.0 / (nu * static_cast<double>(n)); // upper box constraint

    Eigen::MatrixXd K(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = rbf(points[i].phi, points[j].phi, gamma);
            K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            K(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }

    // Feasible start: the first floor(nu*n) duals at the bound, the remainder
    // on the next one.
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    {
        double remaining = 1.0;
        for (std::size_t i = 0; i < n && remaining > 0.0; ++i) {
            const double a = std::min(bound, remaining);
            alpha[static_cast<Eigen::Index>(i)] = a;
            remaining -= a;
        }
    }

    // SMO over maximal-violating pairs: move mass from the highest gradient
    // with alpha > 0 to the lowest gradient with alpha < bound.
    Eigen::VectorXd grad = K * alpha;
    const std::size_t max_iter = 10000 * n;
    const double eps_active = 1e-12 * bound;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        std::ptrdiff_t hi = -1, lo = -1;
        double g_hi = -std::numeric_limits<double>::infinity();
        double g_lo = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double a = alpha[static_cast<Eigen::Index>(i)];
            const double g = grad[static_cast<Eigen::Index>(i)];
            if (a > eps_active && g > g_hi) {
                g_hi = g;
                hi = static_cast<std::ptrdiff_t>(i);
            }
            if (a < bound - eps_active && g < g_lo) {
                g_lo = g;
                lo = static_cast<std::ptrdiff_t>(i);
            }
        }
        if (hi < 0 || lo < 0 || g_hi - g_lo <= kKktTol) break;

        const Eigen::Index i = static_cast<Eigen::Index>(hi);
        const Eigen::Index j = static_cast<Eigen::Index>(lo);
        double eta = K(i, i) + K(j, j) - 2.0 * K(i, j);
        if (eta < 1e-12) eta = 1e-12;
        double step = (g_hi - g_lo) / eta;
        step = std::min(step, alpha[i]);
        step = std::min(step, bound - alpha[j]);
        alpha[i] -= step;
        alpha[j] += step;
        grad += step * (K.col(j) - K.col(i));
    }

    OcsvmModel m;
    m.nu = nu;
    m.gamma = gamma;
    m.fingerprint = points[0].fingerprint;

    const double eps_margin = 1e-8 * bound;
    std::vector<std::size_t> margin_set, bound_set;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = alpha[static_cast<Eigen::Index>(i)];
        if (a > eps_active) {
            m.support_vectors.push_back(points[i].phi);
            m.alphas.push_back(a);
        }
        if (a > eps_margin && a < bound - eps_margin)
            margin_set.push_back(i);
        else if (a >= bound - eps_margin)
            bound_set.push_back(i);
    }

    // rho averaged over the margin support vectors (0 < alpha < bound); when
    // none exist fall back to the largest value among bound vectors. The
    // values are recomputed against the stored support vectors so decision()
    // sees exactly the same sums, and rho is then backed off by the KKT
    // tolerance: points the solver cannot distinguish from the sphere
    // classify as inliers instead of flickering with the iteration count.
    auto kernel_sum = [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.support_vectors.size(); ++j)
            acc += m.alphas[j] * rbf(m.support_vectors[j], points[i].phi, gamma);
        return acc;
    };
    if (!margin_set.empty()) {
        double rho_sum = 0.0;
        for (std::size_t i : margin_set) rho_sum += kernel_sum(i);
        m.rho = rho_sum / static_cast<double>(margin_set.size()) - kKktTol;
    } else {
        double bound_max = -std::numeric_limits<double>::infinity();
        for (std::size_t i : bound_set) bound_max = std::max(bound_max, kernel_sum(i));
        m.rho = bound_max - kKktTol;
        m.degenerate = true;
    }
    return m;
}

std::pair<bool, double> ocsvm_classify(const OcsvmModel& m, const model_space::ModelVector& p) {
    if (m.support_vectors.empty()) throw std::invalid_argument("ocsvm_classify: untrained model");
    if (p.phi.size() != m.support_vectors.front().size())
        throw std::invalid_argument("ocsvm_classify: embedding length mismatch");
    if (m.fingerprint != 0 && p.fingerprint != 0 && m.fingerprint != p.fingerprint)
        throw DataError("ocsvm_classify: reservoir fingerprint mismatch");
    const double score = m.decision(p.phi);
    return {score >= 0.0, score};
}

std::vector<std::string> incremental_diagnose(
    const std::vector<model_space::ModelVector>& stream, const OcsvmModel& base,
    IncrementalState& state, double nu, double gamma, double spawn_gamma_scale) {
    if (!(spawn_gamma_scale > 0.0))
        throw std::invalid_argument("incremental_diagnose: spawn_gamma_scale must be > 0");
    if (state.pending_origin.size() != state.pending_pool.size())
        state.pending_origin.assign(state.pending_pool.size(), -1);
    // points left pooled by earlier calls cannot be relabeled in this one
    std::fill(state.pending_origin.begin(), state.pending_origin.end(), std::ptrdiff_t{-1});

    std::vector<std::string> labels(stream.size());
    for (std::size_t s = 0; s < stream.size(); ++s) {
        const model_space::ModelVector& p = stream[s];
        if (ocsvm_classify(base, p).first) {
            labels[s] = segmentation::kNormalLabel;
            continue;
        }
        bool claimed = false;
        for (const auto& cl : state.classifiers) {
            if (ocsvm_classify(cl.model, p).first) {
                labels[s] = cl.label;
                claimed = true;
                break;
            }
        }
        if (claimed) continue;

        labels[s] = kPendingLabel;
        state.pending_pool.push_back(p);
        state.pending_origin.push_back(static_cast<std::ptrdiff_t>(s));
        if (state.pending_pool.size() < state.min_pool) continue;

        // promote the pool to a new class
        double spawn_gamma = gamma;
        if (spawn_gamma <= 0.0)
            spawn_gamma = spawn_gamma_scale * median_heuristic_gamma(state.pending_pool);
        OcsvmModel fresh = train_ocsvm(state.pending_pool, nu, spawn_gamma);
        const std::string fresh_label = "anomaly_" + std::to_string(state.next_label++);
        state.classifiers.push_back(IncrementalState::Classifier{fresh_label, fresh});

        std::vector<model_space::ModelVector> keep;
        std::vector<std::ptrdiff_t> keep_origin;
        for (std::size_t i = 0; i < state.pending_pool.size(); ++i) {
            if (ocsvm_classify(fresh, state.pending_pool[i]).first) {
                const std::ptrdiff_t origin = state.pending_origin[i];
                if (origin >= 0) labels[static_cast<std::size_t>(origin)] = fresh_label;
            } else {
                keep.push_back(state.pending_pool[i]);
                keep_origin.push_back(state.pending_origin[i]);
            }
        }
        state.pending_pool = std::move(keep);
        state.pending_origin = std::move(keep_origin);
    }
    return labels;
}

void KnnModel::validate() const {
    if (train_points.empty()) throw std::invalid_argument("KnnModel: empty training set");
    if (k < 1 || k > train_points.size())
        throw std::invalid_argument("KnnModel: need 1 <= k <= train size");
    for (const auto& p : train_points)
        if (p.label.empty()) throw std::invalid_argument("KnnModel: unlabeled training point");
}

std::string knn_classify(const KnnModel& m, const model_space::ModelVector& p) {
    m.validate();
    const std::size_t n = m.train_points.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = model_space::model_distance(m.train_points[i], p);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

    struct Tally {
        std::size_t count = 0;
        double dist_sum = 0.0;
        std::size_t first_train_index = 0;
    };
    std::vector<std::pair<std::string, Tally>> tallies;
    for (std::size_t r = 0; r < m.k; ++r) {
        const std::size_t idx = order[r];
        const std::string& label = m.train_points[idx].label;
        auto it = std::find_if(tallies.begin(), tallies.end(),
                               [&](const auto& t) { return t.first == label; });
        if (it == tallies.end()) {
            // label index = first appearance in the training set
            std::size_t first = 0;
            while (m.train_points[first].label != label) ++first;
            tallies.push_back({label, Tally{1, dist[idx], first}});
        } else {
            it->second.count += 1;
            it->second.dist_sum += dist[idx];
        }
    }

    const auto best = std::min_element(
        tallies.begin(), tallies.end(), [](const auto& a, const auto& b) {
            if (a.second.count != b.second.count) return a.second.count > b.second.count;
            const double am = a.second.dist_sum / static_cast<double>(a.second.count);
            const double bm = b.second.dist_sum / static_cast<double>(b.second.count);
            if (am != bm) return am < bm;
            return a.second.first_train_index < b.second.first_train_index;
        });
    return best->first;
}

} // namespace gprdiag::detectors
