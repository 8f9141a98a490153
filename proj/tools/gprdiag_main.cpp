// gprdiag: diagnose anomalies in GPR B-scan images by fitting 2D echo state
// networks to sliding windows and classifying the fitted readouts in a
// metric model space.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gprdiag/bscan_io.hpp"
#include "gprdiag/detectors.hpp"
#include "gprdiag/errors.hpp"
#include "gprdiag/esn.hpp"
#include "gprdiag/model_space.hpp"
#include "gprdiag/pipeline.hpp"
#include "gprdiag/serialize.hpp"
#include "gprdiag/synthgpr.hpp"

namespace {

using namespace gprdiag;

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::string out;
};

void add_common(CLI::App* sub, CommonOpts& c, bool out_required = true) {
    sub->add_option("--config", c.config_path, "pipeline config JSON; flags override file values");
    sub->add_option("--seed", c.seed, "reservoir / scene seed");
    sub->add_option("--threads", c.threads, "worker threads for window fitting (0 = all cores)");
    auto* out = sub->add_option("--out,-o", c.out, "output path");
    if (out_required) out->required();
}

pipeline::PipelineConfig load_config_or_default(const CLI::App* sub, const CommonOpts& c) {
    pipeline::PipelineConfig cfg;
    if (!c.config_path.empty()) cfg = io::load_pipeline_config(c.config_path);
    if (sub->count("--seed")) cfg.reservoir.seed = c.seed;
    if (sub->count("--threads")) cfg.threads = c.threads;
    return cfg;
}

std::pair<std::size_t, std::size_t> parse_span(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("span must be BEGIN:END, got: " + s);
    try {
        return {std::stoull(s.substr(0, colon)), std::stoull(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw std::invalid_argument("span must be BEGIN:END, got: " + s);
    }
}

synthgpr::SceneSpec preset_scene(const std::string& name, std::size_t rows, std::size_t cols,
                                 std::uint64_t seed) {
    synthgpr::SceneSpec s;
    s.rows = rows;
    s.cols = cols;
    s.seed = seed;
    s.noise_sigma = 0.01;
    s.layers = {{rows / 5, 1.0}, {rows / 2, 0.7}};
    // depth bands per kind: shallow moisture, mid-depth loosening, deep cavity
    const std::size_t m0 = rows / 8, m1 = (rows * 7) / 16;
    const std::size_t l0 = rows / 4, l1 = (rows * 3) / 4;
    const std::size_t c0 = (rows * 19) / 32, c1 = (rows * 29) / 32;
    if (name == "normal") return s;
    if (name == "one-moisture") {
        s.anomalies = {{synthgpr::AnomalyKind::moisture_blob, (cols * 11) / 20, (cols * 3) / 4,
                        m0, m1, 0.8}};
        return s;
    }
    if (name == "three-kinds") {
        const std::size_t w = cols / 10;
        s.anomalies = {
            {synthgpr::AnomalyKind::moisture_blob, (cols * 3) / 10, (cols * 3) / 10 + w, m0, m1, 0.8},
            {synthgpr::AnomalyKind::loose_texture, (cols * 5) / 10, (cols * 5) / 10 + w, l0, l1, 0.6},
            {synthgpr::AnomalyKind::cavity, (cols * 7) / 10, (cols * 7) / 10 + w, c0, c1, 0.8},
        };
        return s;
    }
    throw std::invalid_argument("unknown preset: " + name +
                                " (expected normal | one-moisture | three-kinds)");
}

int run(int argc, char** argv) {
    CLI::App app{"GPR B-scan anomaly diagnosis in 2D-ESN model space"};
    app.require_subcommand(1);

    // ---- generate ----------------------------------------------------
    auto* gen = app.add_subcommand("generate", "render a synthetic B-scan with ground truth");
    CommonOpts gen_c;
    std::string gen_scene, gen_preset = "normal";
    std::size_t gen_rows = 64, gen_cols = 4000;
    add_common(gen, gen_c);
    gen->add_option("--scene", gen_scene, "scene description JSON (overrides --preset)");
    gen->add_option("--preset", gen_preset, "normal | one-moisture | three-kinds");
    gen->add_option("--rows", gen_rows, "preset image depth");
    gen->add_option("--cols", gen_cols, "preset trace count");
    gen->callback([&] {
        synthgpr::SceneSpec spec = !gen_scene.empty()
                                       ? io::load_scene_json(gen_scene)
                                       : preset_scene(gen_preset, gen_rows, gen_cols, gen_c.seed);
        if (gen->count("--seed")) spec.seed = gen_c.seed;
        auto [img, truth] = synthgpr::generate_bscan(spec);
        io::write_image(img, gen_c.out);
        const std::string truth_path =
            std::filesystem::path(gen_c.out).replace_extension().string() + "_truth.csv";
        io::save_ground_truth_csv(truth, truth_path);
        std::cout << "wrote " << gen_c.out << " (" << img.rows << "x" << img.cols << ") and "
                  << truth_path << "\n";
    });

    // ---- preprocess --------------------------------------------------
    auto* pre = app.add_subcommand("preprocess", "clean a raw B-scan");
    CommonOpts pre_c;
    std::string pre_in;
    bool pre_no_bg = false, pre_no_norm = false;
    std::size_t pre_median = 3;
    double pre_gain_lin = 0.0, pre_gain_exp = 0.0, pre_gain_max = 10.0;
    add_common(pre, pre_c);
    pre->add_option("--in,-i", pre_in, "input image (.pgm or .csv)")->required();
    pre->add_flag("--no-remove-background", pre_no_bg, "skip mean-trace subtraction");
    pre->add_option("--median-k", pre_median, "median filter size (odd; 0/1 = off)");
    pre->add_option("--gain-linear", pre_gain_lin, "time-varying gain linear coefficient");
    pre->add_option("--gain-exp", pre_gain_exp, "time-varying gain exponential coefficient");
    pre->add_option("--gain-max", pre_gain_max, "gain clamp");
    pre->add_flag("--no-normalize", pre_no_norm, "skip [-1,1] normalization");
    pre->callback([&] {
        pipeline::PipelineConfig cfg = load_config_or_default(pre, pre_c);
        auto& p = cfg.preprocess;
        if (pre->count("--no-remove-background")) p.remove_background = false;
        if (pre->count("--median-k")) p.median_k = pre_median;
        if (pre->count("--gain-linear") || pre->count("--gain-exp")) {
            p.apply_gain = true;
            p.gain.linear_coeff = pre_gain_lin;
            p.gain.exp_coeff = pre_gain_exp;
            p.gain.max_gain = pre_gain_max;
        }
        if (pre->count("--no-normalize")) p.normalize = false;
        io::write_image(pipeline::run_preprocess(io::read_image(pre_in), p), pre_c.out);
        std::cout << "wrote " << pre_c.out << "\n";
    });

    // ---- fit ----------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "map sliding windows into the model space");
    CommonOpts fit_c;
    std::string fit_in, fit_weights_out;
    std::size_t fit_n_units = 0, fit_width = 0, fit_stride = 0;
    double fit_alpha = 0.0;
    bool fit_raw = false;
    add_common(fit, fit_c);
    fit->add_option("--in,-i", fit_in, "input image")->required();
    fit->add_option("--n-units", fit_n_units, "reservoir size N");
    fit->add_option("--alpha", fit_alpha, "spectral radius target");
    fit->add_option("--window-width", fit_width, "window width in columns");
    fit->add_option("--window-stride", fit_stride, "window stride in columns");
    fit->add_flag("--raw", fit_raw, "skip preprocessing (input already clean)");
    fit->add_option("--save-weights", fit_weights_out, "also dump the reservoir weights JSON");
    fit->callback([&] {
        pipeline::PipelineConfig cfg = load_config_or_default(fit, fit_c);
        if (fit->count("--n-units")) cfg.reservoir.n_units = fit_n_units;
        if (fit->count("--alpha")) cfg.reservoir.alpha = fit_alpha;
        if (fit->count("--window-width")) cfg.window.width_cols = fit_width;
        if (fit->count("--window-stride")) cfg.window.stride_cols = fit_stride;
        BScanImage img = io::read_image(fit_in);
        if (!fit_raw) img = pipeline::run_preprocess(img, cfg.preprocess);
        const esn::ReservoirWeights w = esn::init_reservoir(cfg.reservoir);
        const model_space::ModelSpace space =
            pipeline::fit_image(img, w, cfg.window, cfg.threads, nullptr);
        io::save_model_space_csv(space, fit_c.out);
        if (!fit_weights_out.empty()) io::save_reservoir(w, fit_weights_out);
        std::cout << "wrote " << fit_c.out << " (" << space.size() << " windows)\n";
    });

    // ---- train-ocsvm ---------------------------------------------------
    auto* tro = app.add_subcommand("train-ocsvm", "train the one-class classifier");
    CommonOpts tro_c;
    std::string tro_in;
    double tro_nu = 0.05, tro_gamma = 0.0;
    add_common(tro, tro_c);
    tro->add_option("--in,-i", tro_in, "model space CSV")->required();
    tro->add_option("--nu", tro_nu, "training outlier budget, in (0, 1]");
    tro->add_option("--gamma", tro_gamma, "RBF width (<= 0: median heuristic)");
    tro->callback([&] {
        const model_space::ModelSpace space = io::load_model_space_csv(tro_in);
        io::save_ocsvm(detectors::train_ocsvm(space.points, tro_nu, tro_gamma), tro_c.out);
        std::cout << "wrote " << tro_c.out << "\n";
    });

    // ---- train-knn ------------------------------------------------------
    auto* trk = app.add_subcommand("train-knn", "build the supervised KNN model");
    CommonOpts trk_c;
    std::string trk_in;
    std::size_t trk_k = 5;
    add_common(trk, trk_c);
    trk->add_option("--in,-i", trk_in, "labeled model space CSV")->required();
    trk->add_option("-k,--k", trk_k, "neighbor count");
    trk->callback([&] {
        const model_space::ModelSpace space = io::load_model_space_csv(trk_in);
        detectors::KnnModel m{space.points, trk_k};
        m.validate();
        io::save_knn(m, trk_c.out);
        std::cout << "wrote " << trk_c.out << "\n";
    });

    // ---- classify -------------------------------------------------------
    auto* cls = app.add_subcommand("classify", "label model-space points with a trained KNN");
    CommonOpts cls_c;
    std::string cls_in, cls_model;
    add_common(cls, cls_c);
    cls->add_option("--in,-i", cls_in, "model space CSV to label")->required();
    cls->add_option("--model,-m", cls_model, "trained KNN JSON")->required();
    cls->callback([&] {
        const detectors::KnnModel knn = io::load_knn(cls_model);
        const model_space::ModelSpace space = io::load_model_space_csv(cls_in);
        std::ofstream out(cls_c.out);
        if (!out) throw DataError("cannot write file: " + cls_c.out);
        out << "start_col,end_col,label\n";
        for (const auto& p : space.points)
            out << p.start_col << ',' << p.end_col << ',' << detectors::knn_classify(knn, p)
                << '\n';
        std::cout << "wrote " << cls_c.out << " (" << space.size() << " points)\n";
    });

    // ---- project ---------------------------------------------------------
    auto* prj = app.add_subcommand("project", "PCA projection of a model space for plotting");
    CommonOpts prj_c;
    std::string prj_in;
    std::size_t prj_dims = 2;
    add_common(prj, prj_c);
    prj->add_option("--in,-i", prj_in, "model space CSV")->required();
    prj->add_option("--dims", prj_dims, "projection dimensions (1-3)");
    prj->callback([&] {
        const model_space::ModelSpace space = io::load_model_space_csv(prj_in);
        const model_space::PcaProjection proj = model_space::pca_project(space, prj_dims);
        if (proj.degenerate)
            std::cerr << "warning: data rank " << proj.informative_dims << " < dims " << prj_dims
                      << "; trailing coordinates zero-padded\n";
        io::save_projection_csv(proj, space.points, prj_c.out);
        std::cout << "wrote " << prj_c.out << "\n";
    });

    // ---- diagnose ----------------------------------------------------------
    auto* dia = app.add_subcommand("diagnose", "end-to-end anomaly diagnosis of one image");
    CommonOpts dia_c;
    std::string dia_in, dia_model, dia_span;
    bool dia_no_incremental = false;
    add_common(dia, dia_c);
    dia->add_option("--in,-i", dia_in, "input image")->required();
    dia->add_option("--model,-m", dia_model, "trained base OCSVM JSON");
    dia->add_option("--normal-span", dia_span,
                    "BEGIN:END columns of known-normal road to train the base classifier");
    dia->add_flag("--no-incremental", dia_no_incremental,
                  "binary normal/abnormal labels only (no class discovery)");
    dia->callback([&] {
        pipeline::PipelineConfig cfg = load_config_or_default(dia, dia_c);
        if (dia->count("--normal-span")) cfg.normal_span = parse_span(dia_span);
        if (dia->count("--no-incremental")) cfg.detector.incremental = false;
        if (dia->count("--model")) cfg.base_model_path = dia_model;

        const BScanImage raw = io::read_image(dia_in);
        detectors::OcsvmModel base;
        const detectors::OcsvmModel* base_ptr = nullptr;
        if (!cfg.base_model_path.empty()) {
            base = io::load_ocsvm(cfg.base_model_path);
            base_ptr = &base;
        }

        std::filesystem::create_directories(dia_c.out);
        detectors::IncrementalState state;
        state.min_pool = cfg.detector.min_pool;
        detectors::OcsvmModel trained;
        const pipeline::DiagnosisReport report =
            pipeline::diagnose(raw, cfg, base_ptr, &state, &trained);

        const std::filesystem::path dir(dia_c.out);
        io::save_windows_csv(report, (dir / "windows.csv").string());
        io::save_regions_csv(report.regions, raw.col_spacing_cm, (dir / "regions.csv").string());
        io::save_summary_json(report, (dir / "summary.json").string());
        io::save_reservoir(esn::init_reservoir(cfg.reservoir), (dir / "weights.json").string());
        if (!base_ptr) io::save_ocsvm(trained, (dir / "base_ocsvm.json").string());

        std::cout << "windows=" << report.windows.size() << " normal=" << report.normal_count
                  << " abnormal=" << report.anomaly_count << " regions=" << report.regions.size()
                  << " classes=" << report.classes_discovered << "\n";
        std::cout << "mean per-window latency: " << report.mean_window_seconds << " s (p90 "
                  << report.p90_window_seconds << " s)\n";
        std::cout << "reports in " << dia_c.out << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        std::cerr << "E2: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const gprdiag::DataError& e) {
        std::cerr << "E3: " << e.what() << "\n";
        return 3;
    } catch (const gprdiag::NumericError& e) {
        std::cerr << "E4: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "E2: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "E4: unexpected error: " << e.what() << "\n";
        return 4;
    }
}
