#include "gprdiag/model_space.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "gprdiag/errors.hpp"

namespace gprdiag::model_space {

ModelVector embed(const esn::FittedModel& m) {
    if (!m.w_out_up.allFinite() || !m.w_out_left.allFinite() || !std::isfinite(m.bias))
        throw DataError("embed: non-finite model");
    const Eigen::Index n = m.w_out_up.size();
    if (m.w_out_left.size() != n) throw std::invalid_argument("embed: readout halves differ in size");

    // E[h h^T] = (1/3) I for h uniform on [-1,1]^{2N}, hence the 1/sqrt(3):
    // squared Euclidean distance between embeddings reproduces the
    // closed-form model distance exactly.
    constexpr double kInvSqrt3 = 0.57735026918962576451;
    ModelVector v;
    v.phi.resize(2 * n + 1);
    v.phi.head(n) = m.w_out_up.transpose() * kInvSqrt3;
    v.phi.segment(n, n) = m.w_out_left.transpose() * kInvSqrt3;
    v.phi[2 * n] = m.bias;
    v.fingerprint = m.reservoir_fingerprint;
    return v;
}

double model_distance(const ModelVector& a, const ModelVector& b) {
    if (a.phi.size() != b.phi.size())
        throw std::invalid_argument("model_distance: embedding lengths differ");
    if (a.fingerprint != b.fingerprint)
        throw DataError("model_distance: reservoir fingerprints differ; "
                        "distances across reservoirs are meaningless");
    return (a.phi - b.phi).squaredNorm();
}

double sqrt_model_distance(const ModelVector& a, const ModelVector& b) {
    return std::sqrt(model_distance(a, b));
}

void ModelSpace::add(ModelVector v) {
    if (points.empty()) {
        const auto len = static_cast<std::size_t>(v.phi.size());
        if (len < 3 || len % 2 == 0)
            throw std::invalid_argument("ModelSpace: phi length must be 2N + 1");
        n_units = (len - 1) / 2;
        reservoir_fingerprint = v.fingerprint;
    } else {
        if (static_cast<std::size_t>(v.phi.size()) != 2 * n_units + 1)
            throw std::invalid_argument("ModelSpace: point length mismatch");
        if (v.fingerprint != reservoir_fingerprint)
            throw DataError("ModelSpace: reservoir fingerprint mismatch");
    }
    points.push_back(std::move(v));
}

Eigen::MatrixXd pairwise_distances(const ModelSpace& s) {
    const Eigen::Index n = static_cast<Eigen::Index>(s.points.size());
    if (n < 1) throw std::invalid_argument("pairwise_distances: empty model space");
    Eigen::MatrixXd d(n, n);
    d.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = model_distance(s.points[static_cast<std::size_t>(i)],
                                            s.points[static_cast<std::size_t>(j)]);
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

PcaProjection pca_project(const ModelSpace& s, std::size_t dims) {
    if (dims < 1 || dims > 3) throw std::invalid_argument("pca_project: dims must be in [1, 3]");
    if (s.points.size() < dims)
        throw std::invalid_argument("pca_project: need at least `dims` points");

    const Eigen::Index p = static_cast<Eigen::Index>(s.points.size());
    const Eigen::Index d = s.points.front().phi.size();
    Eigen::MatrixXd x(p, d);
    for (Eigen::Index i = 0; i < p; ++i)
        x.row(i) = s.points[static_cast<std::size_t>(i)].phi.transpose();
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol = std::max(p, d) * 1e-14 * (sv.size() > 0 ? sv[0] : 0.0);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol) ++rank;

    PcaProjection out;
    out.informative_dims = std::min<std::size_t>(rank, dims);
    out.degenerate = rank < dims;

    const Eigen::Index dd = static_cast<Eigen::Index>(dims);
    Eigen::MatrixXd coords = x * svd.matrixV().leftCols(std::min<Eigen::Index>(dd, sv.size()));
    out.coords.reserve(static_cast<std::size_t>(p));
    out.axis_variance = Eigen::VectorXd::Zero(dd);
    for (Eigen::Index a = 0; a < dd && a < sv.size(); ++a) {
        if (static_cast<std::size_t>(a) < out.informative_dims)
            out.axis_variance[a] = sv[a] * sv[a] / static_cast<double>(p - 1 > 0 ? p - 1 : 1);
    }
    for (Eigen::Index i = 0; i < p; ++i) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(dd);
        for (Eigen::Index a = 0; a < dd && a < coords.cols(); ++a)
            c[a] = static_cast<std::size_t>(a) < out.informative_dims ? coords(i, a) : 0.0;
        out.coords.push_back(std::move(c));
    }
    return out;
}

} // namespace gprdiag::model_space
