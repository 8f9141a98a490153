#include "gprdiag/serialize.hpp"

#include <cstring>
#include <filesystem>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "gprdiag/errors.hpp"
#include "io_util.hpp"

namespace gprdiag::io {

namespace {

using nlohmann::json;

json parse_json(const std::string& path) {
    json j = json::parse(detail::read_file(path), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw DataError("malformed JSON: " + path);
    return j;
}

json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json rowvec_to_json(const Eigen::RowVectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vec_from_json(const json& a, const std::string& what) {
    if (!a.is_array()) throw DataError("expected array for " + what);
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

void append_raw(std::string& out, const double* p, std::size_t n) {
    out.append(reinterpret_cast<const char*>(p), n * sizeof(double));
}

} // namespace

void save_reservoir(const esn::ReservoirWeights& w, const std::string& path, bool as_blob) {
    json j;
    j["n_units"] = w.config.n_units;
    j["alpha"] = w.config.alpha;
    j["input_scale"] = w.config.input_scale;
    j["density"] = w.config.density;
    j["ridge_lambda"] = w.config.ridge_lambda;
    j["seed"] = w.config.seed;
    j["fingerprint"] = w.fingerprint();
    if (as_blob) {
        // raw little-endian float64: w_in | w_res_up | w_res_left (column-major)
        const std::string blob_name = std::filesystem::path(path).filename().string() + ".bin";
        std::string blob;
        append_raw(blob, w.w_in.data(), static_cast<std::size_t>(w.w_in.size()));
        append_raw(blob, w.w_res_up.data(), static_cast<std::size_t>(w.w_res_up.size()));
        append_raw(blob, w.w_res_left.data(), static_cast<std::size_t>(w.w_res_left.size()));
        detail::write_file((std::filesystem::path(path).parent_path() / blob_name).string(), blob);
        j["weights_blob"] = blob_name;
    }
    detail::write_file(path, j.dump(2) + "\n");
}

esn::ReservoirWeights load_reservoir(const std::string& path) {
    const json j = parse_json(path);
    esn::ReservoirConfig cfg;
    cfg.n_units = j.at("n_units").get<std::size_t>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.input_scale = j.value("input_scale", 1.0);
    cfg.density = j.value("density", 0.1);
    cfg.ridge_lambda = j.value("ridge_lambda", 1e-6);
    cfg.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("weights_blob")) {
        const std::string blob_path =
            (std::filesystem::path(path).parent_path() / j["weights_blob"].get<std::string>())
                .string();
        const std::string blob = detail::read_file(blob_path);
        const std::size_t n = cfg.n_units;
        const std::size_t expect = (n + 2 * n * n) * sizeof(double);
        if (blob.size() != expect) throw DataError("weights blob has wrong size: " + blob_path);
        esn::ReservoirWeights w;
        w.config = cfg;
        w.w_in.resize(static_cast<Eigen::Index>(n));
        w.w_res_up.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        w.w_res_left.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        const char* p = blob.data();
        std::memcpy(w.w_in.data(), p, n * sizeof(double));
        p += n * sizeof(double);
        std::memcpy(w.w_res_up.data(), p, n * n * sizeof(double));
        p += n * n * sizeof(double);
        std::memcpy(w.w_res_left.data(), p, n * n * sizeof(double));
        return w;
    }
    // weights are a pure function of the config
    return esn::init_reservoir(cfg);
}

void save_model(const esn::FittedModel& m, const std::string& path) {
    json j;
    j["n_units"] = static_cast<std::size_t>(m.w_out_up.size());
    j["w_out_up"] = rowvec_to_json(m.w_out_up);
    j["w_out_left"] = rowvec_to_json(m.w_out_left);
    j["bias"] = m.bias;
    j["train_nrmse"] = m.train_nrmse;
    j["window_id"] = m.window_id;
    j["reservoir_fingerprint"] = m.reservoir_fingerprint;
    detail::write_file(path, j.dump(2) + "\n");
}

esn::FittedModel load_model(const std::string& path) {
    const json j = parse_json(path);
    esn::FittedModel m;
    m.w_out_up = vec_from_json(j.at("w_out_up"), "w_out_up").transpose();
    m.w_out_left = vec_from_json(j.at("w_out_left"), "w_out_left").transpose();
    m.bias = j.at("bias").get<double>();
    m.train_nrmse = j.value("train_nrmse", 0.0);
    m.window_id = j.value("window_id", std::string{});
    m.reservoir_fingerprint = j.value("reservoir_fingerprint", std::uint64_t{0});
    return m;
}

void save_ocsvm(const detectors::OcsvmModel& m, const std::string& path) {
    json j;
    j["nu"] = m.nu;
    j["gamma"] = m.gamma;
    j["rho"] = m.rho;
    j["degenerate"] = m.degenerate;
    j["fingerprint"] = m.fingerprint;
    j["alphas"] = m.alphas;
    json svs = json::array();
    for (const auto& sv : m.support_vectors) svs.push_back(vec_to_json(sv));
    j["support_vectors"] = svs;
    detail::write_file(path, j.dump(2) + "\n");
}

detectors::OcsvmModel load_ocsvm(const std::string& path) {
    const json j = parse_json(path);
    detectors::OcsvmModel m;
    m.nu = j.at("nu").get<double>();
    m.gamma = j.at("gamma").get<double>();
    m.rho = j.at("rho").get<double>();
    m.degenerate = j.value("degenerate", false);
    m.fingerprint = j.value("fingerprint", std::uint64_t{0});
    m.alphas = j.at("alphas").get<std::vector<double>>();
    for (const auto& sv : j.at("support_vectors")) m.support_vectors.push_back(vec_from_json(sv, "sv"));
    if (m.alphas.size() != m.support_vectors.size())
        throw DataError("OCSVM JSON: alphas and support_vectors differ in length");
    return m;
}

namespace {

json model_vector_to_json(const model_space::ModelVector& p) {
    json e;
    e["phi"] = vec_to_json(p.phi);
    e["label"] = p.label;
    e["start_col"] = p.start_col;
    e["end_col"] = p.end_col;
    e["fingerprint"] = p.fingerprint;
    return e;
}

model_space::ModelVector model_vector_from_json(const json& e) {
    model_space::ModelVector p;
    p.phi = vec_from_json(e.at("phi"), "phi");
    p.label = e.value("label", std::string{});
    p.start_col = e.value("start_col", std::size_t{0});
    p.end_col = e.value("end_col", std::size_t{0});
    p.fingerprint = e.value("fingerprint", std::uint64_t{0});
    return p;
}

} // namespace

void save_knn(const detectors::KnnModel& m, const std::string& path) {
    json j;
    j["k"] = m.k;
    json pts = json::array();
    for (const auto& p : m.train_points) pts.push_back(model_vector_to_json(p));
    j["train_points"] = pts;
    detail::write_file(path, j.dump(2) + "\n");
}

detectors::KnnModel load_knn(const std::string& path) {
    const json j = parse_json(path);
    detectors::KnnModel m;
    m.k = j.at("k").get<std::size_t>();
    for (const auto& e : j.at("train_points")) m.train_points.push_back(model_vector_from_json(e));
    m.validate();
    return m;
}

void save_model_space_csv(const model_space::ModelSpace& s, const std::string& path) {
    std::ostringstream out;
    out << "# gprdiag model space n_units=" << s.n_units
        << " fingerprint=" << s.reservoir_fingerprint << "\n";
    for (const auto& p : s.points) {
        for (Eigen::Index i = 0; i < p.phi.size(); ++i) out << detail::fmt_double(p.phi[i]) << ',';
        out << p.label << ',' << p.start_col << ',' << p.end_col << '\n';
    }
    detail::write_file(path, out.str());
}

model_space::ModelSpace load_model_space_csv(const std::string& path) {
    std::istringstream in(detail::read_file(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("# gprdiag model space", 0) != 0)
        throw DataError("not a model space CSV: " + path);
    std::uint64_t fingerprint = 0;
    std::size_t n_units = 0;
    {
        std::istringstream hs(line);
        std::string tok;
        while (hs >> tok) {
            if (tok.rfind("n_units=", 0) == 0) n_units = std::stoull(tok.substr(8));
            if (tok.rfind("fingerprint=", 0) == 0) fingerprint = std::stoull(tok.substr(12));
        }
    }
    if (n_units == 0) throw DataError("model space CSV header lacks n_units: " + path);

    model_space::ModelSpace s;
    const std::size_t dim = 2 * n_units + 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != dim + 3) throw DataError("bad model space CSV row in " + path);
        model_space::ModelVector p;
        p.phi.resize(static_cast<Eigen::Index>(dim));
        try {
            for (std::size_t i = 0; i < dim; ++i)
                p.phi[static_cast<Eigen::Index>(i)] = std::stod(cells[i]);
            p.label = cells[dim];
            p.start_col = std::stoull(cells[dim + 1]);
            p.end_col = std::stoull(cells[dim + 2]);
        } catch (const std::exception&) {
            throw DataError("bad model space CSV value in " + path);
        }
        p.fingerprint = fingerprint;
        s.add(std::move(p));
    }
    if (s.points.empty()) {
        s.n_units = n_units;
        s.reservoir_fingerprint = fingerprint;
    }
    return s;
}

void save_projection_csv(const model_space::PcaProjection& proj,
                         const std::vector<model_space::ModelVector>& points,
                         const std::string& path) {
    if (proj.coords.size() != points.size())
        throw std::invalid_argument("save_projection_csv: coords/points size mismatch");
    std::ostringstream out;
    for (std::size_t i = 0; i < proj.coords.size(); ++i) {
        const auto& c = proj.coords[i];
        for (Eigen::Index a = 0; a < c.size(); ++a) out << detail::fmt_double(c[a]) << ',';
        out << points[i].label << '\n';
    }
    detail::write_file(path, out.str());
}

void save_regions_csv(const std::vector<segmentation::AnomalyRegion>& regions,
                      double col_spacing_cm, const std::string& path) {
    std::ostringstream out;
    out << "start_col,end_col,start_cm,end_cm,label,support,mean_score\n";
    for (const auto& r : regions) {
        out << r.start_col << ',' << r.end_col << ','
            << detail::fmt_double(static_cast<double>(r.start_col) * col_spacing_cm) << ','
            << detail::fmt_double(static_cast<double>(r.end_col) * col_spacing_cm) << ','
            << r.label << ',' << r.support << ',' << detail::fmt_double(r.mean_score) << '\n';
    }
    detail::write_file(path, out.str());
}

void save_ground_truth_csv(const std::vector<synthgpr::GroundTruth>& truth,
                           const std::string& path) {
    std::ostringstream out;
    out << "start_col,end_col,kind\n";
    for (const auto& t : truth)
        out << t.col_begin << ',' << t.col_end << ',' << synthgpr::to_string(t.kind) << '\n';
    detail::write_file(path, out.str());
}

std::vector<synthgpr::GroundTruth> load_ground_truth_csv(const std::string& path) {
    std::istringstream in(detail::read_file(path));
    std::string line;
    std::getline(in, line); // header
    std::vector<synthgpr::GroundTruth> truth;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b, k;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, k))
            throw DataError("bad ground truth row in " + path);
        truth.push_back(synthgpr::GroundTruth{std::stoull(a), std::stoull(b),
                                              synthgpr::anomaly_kind_from_string(k)});
    }
    return truth;
}

synthgpr::SceneSpec load_scene_json(const std::string& path) {
    const json j = parse_json(path);
    synthgpr::SceneSpec s;
    s.rows = j.value("rows", std::size_t{64});
    s.cols = j.value("cols", std::size_t{1000});
    s.wavelet_freq = j.value("wavelet_freq", 0.12);
    s.noise_sigma = j.value("noise_sigma", 0.0);
    s.seed = j.value("seed", std::uint64_t{0});
    s.col_spacing_cm = j.value("col_spacing_cm", 0.141);
    for (const auto& l : j.value("layers", json::array()))
        s.layers.push_back(synthgpr::Layer{l.at("depth_row").get<std::size_t>(),
                                           l.value("reflect_amp", 1.0)});
    for (const auto& sc : j.value("scatterers", json::array()))
        s.scatterers.push_back(synthgpr::Scatterer{
            sc.at("col").get<std::size_t>(), sc.at("depth_row").get<double>(),
            sc.value("velocity_px", 2.0), sc.value("amp", 1.0)});
    for (const auto& a : j.value("anomalies", json::array()))
        s.anomalies.push_back(synthgpr::AnomalySpec{
            synthgpr::anomaly_kind_from_string(a.at("kind").get<std::string>()),
            a.at("col_begin").get<std::size_t>(), a.at("col_end").get<std::size_t>(),
            a.at("row_begin").get<std::size_t>(), a.at("row_end").get<std::size_t>(),
            a.value("intensity", 1.0)});
    s.validate();
    return s;
}

void save_scene_json(const synthgpr::SceneSpec& s, const std::string& path) {
    json j;
    j["rows"] = s.rows;
    j["cols"] = s.cols;
    j["wavelet_freq"] = s.wavelet_freq;
    j["noise_sigma"] = s.noise_sigma;
    j["seed"] = s.seed;
    j["col_spacing_cm"] = s.col_spacing_cm;
    j["layers"] = json::array();
    for (const auto& l : s.layers)
        j["layers"].push_back({{"depth_row", l.depth_row}, {"reflect_amp", l.reflect_amp}});
    j["scatterers"] = json::array();
    for (const auto& sc : s.scatterers)
        j["scatterers"].push_back({{"col", sc.col},
                                   {"depth_row", sc.depth_row},
                                   {"velocity_px", sc.velocity_px},
                                   {"amp", sc.amp}});
    j["anomalies"] = json::array();
    for (const auto& a : s.anomalies)
        j["anomalies"].push_back({{"kind", synthgpr::to_string(a.kind)},
                                  {"col_begin", a.col_begin},
                                  {"col_end", a.col_end},
                                  {"row_begin", a.row_begin},
                                  {"row_end", a.row_end},
                                  {"intensity", a.intensity}});
    detail::write_file(path, j.dump(2) + "\n");
}

void save_windows_csv(const pipeline::DiagnosisReport& report, const std::string& path) {
    std::ostringstream out;
    out << "start_col,label,score\n";
    for (const auto& w : report.windows)
        out << w.start_col << ',' << w.label << ',' << detail::fmt_double(w.score) << '\n';
    detail::write_file(path, out.str());
}

void save_summary_json(const pipeline::DiagnosisReport& report, const std::string& path) {
    json j;
    j["window_count"] = report.windows.size();
    j["normal_count"] = report.normal_count;
    j["anomaly_count"] = report.anomaly_count;
    j["classes_discovered"] = report.classes_discovered;
    j["region_count"] = report.regions.size();
    j["mean_window_seconds"] = report.mean_window_seconds;
    j["p50_window_seconds"] = report.p50_window_seconds;
    j["p90_window_seconds"] = report.p90_window_seconds;
    j["max_window_seconds"] = report.max_window_seconds;
    j["total_seconds"] = report.total_seconds;
    detail::write_file(path, j.dump(2) + "\n");
}

pipeline::PipelineConfig load_pipeline_config(const std::string& path) {
    const json j = parse_json(path);
    pipeline::PipelineConfig c;
    if (j.contains("window")) {
        const auto& w = j["window"];
        c.window.width_cols = w.value("width_cols", c.window.width_cols);
        c.window.stride_cols = w.value("stride_cols", c.window.stride_cols);
    }
    if (j.contains("reservoir")) {
        const auto& r = j["reservoir"];
        c.reservoir.n_units = r.value("n_units", c.reservoir.n_units);
        c.reservoir.alpha = r.value("alpha", c.reservoir.alpha);
        c.reservoir.input_scale = r.value("input_scale", c.reservoir.input_scale);
        c.reservoir.density = r.value("density", c.reservoir.density);
        c.reservoir.ridge_lambda = r.value("ridge_lambda", c.reservoir.ridge_lambda);
        c.reservoir.seed = r.value("seed", c.reservoir.seed);
    }
    if (j.contains("preprocess")) {
        const auto& p = j["preprocess"];
        c.preprocess.remove_background = p.value("remove_background", c.preprocess.remove_background);
        c.preprocess.median_k = p.value("median_k", c.preprocess.median_k);
        c.preprocess.apply_gain = p.value("apply_gain", c.preprocess.apply_gain);
        c.preprocess.normalize = p.value("normalize", c.preprocess.normalize);
        if (p.contains("gain")) {
            const auto& g = p["gain"];
            c.preprocess.gain.linear_coeff = g.value("linear_coeff", c.preprocess.gain.linear_coeff);
            c.preprocess.gain.exp_coeff = g.value("exp_coeff", c.preprocess.gain.exp_coeff);
            c.preprocess.gain.max_gain = g.value("max_gain", c.preprocess.gain.max_gain);
        }
    }
    if (j.contains("detector")) {
        const auto& d = j["detector"];
        c.detector.nu = d.value("nu", c.detector.nu);
        c.detector.gamma = d.value("gamma", c.detector.gamma);
        c.detector.gamma_scale = d.value("gamma_scale", c.detector.gamma_scale);
        c.detector.spawn_gamma_scale = d.value("spawn_gamma_scale", c.detector.spawn_gamma_scale);
        c.detector.min_pool = d.value("min_pool", c.detector.min_pool);
        c.detector.knn_k = d.value("knn_k", c.detector.knn_k);
        c.detector.incremental = d.value("incremental", c.detector.incremental);
    }
    c.threads = j.value("threads", c.threads);
    c.merge_gap_tolerance = j.value("merge_gap_tolerance", c.merge_gap_tolerance);
    c.input_path = j.value("input_path", c.input_path);
    c.base_model_path = j.value("base_model_path", c.base_model_path);
    c.out_dir = j.value("out_dir", c.out_dir);
    if (j.contains("normal_span")) {
        const auto& s = j["normal_span"];
        if (!s.is_array() || s.size() != 2)
            throw DataError("pipeline config: normal_span must be [begin, end]");
        c.normal_span = {s[0].get<std::size_t>(), s[1].get<std::size_t>()};
    }
    return c;
}

void save_pipeline_config(const pipeline::PipelineConfig& c, const std::string& path) {
    json j;
    j["window"] = {{"width_cols", c.window.width_cols}, {"stride_cols", c.window.stride_cols}};
    j["reservoir"] = {{"n_units", c.reservoir.n_units},   {"alpha", c.reservoir.alpha},
                      {"input_scale", c.reservoir.input_scale}, {"density", c.reservoir.density},
                      {"ridge_lambda", c.reservoir.ridge_lambda}, {"seed", c.reservoir.seed}};
    j["preprocess"] = {{"remove_background", c.preprocess.remove_background},
                       {"median_k", c.preprocess.median_k},
                       {"apply_gain", c.preprocess.apply_gain},
                       {"normalize", c.preprocess.normalize},
                       {"gain",
                        {{"linear_coeff", c.preprocess.gain.linear_coeff},
                         {"exp_coeff", c.preprocess.gain.exp_coeff},
                         {"max_gain", c.preprocess.gain.max_gain}}}};
    j["detector"] = {{"nu", c.detector.nu},
                     {"gamma", c.detector.gamma},
                     {"gamma_scale", c.detector.gamma_scale},
                     {"spawn_gamma_scale", c.detector.spawn_gamma_scale},
                     {"min_pool", c.detector.min_pool},
                     {"knn_k", c.detector.knn_k},
                     {"incremental", c.detector.incremental}};
    j["threads"] = c.threads;
    j["merge_gap_tolerance"] = c.merge_gap_tolerance;
    if (!c.input_path.empty()) j["input_path"] = c.input_path;
    if (!c.base_model_path.empty()) j["base_model_path"] = c.base_model_path;
    if (!c.out_dir.empty()) j["out_dir"] = c.out_dir;
    if (c.normal_span) j["normal_span"] = {c.normal_span->first, c.normal_span->second};
    detail::write_file(path, j.dump(2) + "\n");
}

} // namespace gprdiag::io
