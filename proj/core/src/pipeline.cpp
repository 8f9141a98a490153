#include "gprdiag/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gprdiag/errors.hpp"

namespace gprdiag::pipeline {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double percentile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double idx = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

} // namespace

BScanImage run_preprocess(const BScanImage& img, const PreprocessParams& p) {
    BScanImage out = img;
    out.update_range();
    if (p.remove_background) out = preprocess::remove_background(out);
    if (p.median_k > 1) out = preprocess::median_filter(out, p.median_k);
    if (p.apply_gain) out = preprocess::apply_gain(out, p.gain);
    if (p.normalize) out = preprocess::normalize(out);
    return out;
}

model_space::ModelSpace fit_image(const BScanImage& preprocessed,
                                  const esn::ReservoirWeights& weights,
                                  const segmentation::WindowSpec& spec,
                                  std::size_t threads,
                                  std::vector<double>* fit_seconds) {
    const auto windows = segmentation::slide_windows(preprocessed, spec);
    const std::size_t n = windows.size();

    std::vector<esn::FittedModel> fitted(n);
    std::vector<double> times(n, 0.0);

    std::size_t pool = threads > 0 ? threads : std::thread::hardware_concurrency();
    if (pool == 0) pool = 1;
    pool = std::min(pool, n);

    // Windows are independent; workers pull indices from a shared counter and
    // write into their own slot, so the result is identical for any pool size.
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n || failed.load()) break;
            try {
                const auto t0 = std::chrono::steady_clock::now();
                // Each window is rescaled to [-1, 1] on its own: the readout
                // then captures the window's dynamics rather than its
                // amplitude relative to the brightest structure in the image,
                // and distant anomalies cannot shift a normal window's scale.
                fitted[i] = esn::fit_window(weights, preprocess::normalize(windows[i].second),
                                            std::to_string(windows[i].first));
                times[i] = seconds_since(t0);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                break;
            }
        }
    };
    if (pool <= 1) {
        work();
    } else {
        std::vector<std::thread> workers;
        workers.reserve(pool);
        for (std::size_t t = 0; t < pool; ++t) workers.emplace_back(work);
        for (auto& t : workers) t.join();
    }
    if (error) std::rethrow_exception(error);

    model_space::ModelSpace space;
    for (std::size_t i = 0; i < n; ++i) {
        model_space::ModelVector v = model_space::embed(fitted[i]);
        v.start_col = windows[i].first;
        v.end_col = windows[i].first + spec.width_cols;
        space.add(std::move(v));
    }
    if (fit_seconds) *fit_seconds = std::move(times);
    return space;
}

detectors::OcsvmModel train_base_from_span(const BScanImage& preprocessed,
                                           const esn::ReservoirWeights& weights,
                                           const PipelineConfig& cfg,
                                           std::size_t span_begin, std::size_t span_end) {
    if (span_end > preprocessed.cols || span_begin >= span_end)
        throw std::invalid_argument("train_base_from_span: bad normal span");
    if (span_end - span_begin < cfg.window.width_cols)
        throw std::invalid_argument("train_base_from_span: normal span narrower than the window");
    const BScanImage normal = preprocessed.slice_cols(span_begin, span_end);
    const model_space::ModelSpace space =
        fit_image(normal, weights, cfg.window, cfg.threads, nullptr);
    double gamma = cfg.detector.gamma;
    if (gamma <= 0.0)
        gamma = cfg.detector.gamma_scale * detectors::median_heuristic_gamma(space.points);
    return detectors::train_ocsvm(space.points, cfg.detector.nu, gamma);
}

DiagnosisReport diagnose(const BScanImage& raw, const PipelineConfig& cfg,
                         const detectors::OcsvmModel* base,
                         detectors::IncrementalState* state,
                         detectors::OcsvmModel* trained_base_out) {
    cfg.window.validate();
    cfg.reservoir.validate();
    const auto t_total = std::chrono::steady_clock::now();

    const BScanImage img = run_preprocess(raw, cfg.preprocess);
    if (img.cols < cfg.window.width_cols)
        throw std::invalid_argument("diagnose: window wider than the image");

    const esn::ReservoirWeights weights = esn::init_reservoir(cfg.reservoir);

    detectors::OcsvmModel trained;
    if (!base) {
        if (!cfg.normal_span)
            throw std::invalid_argument(
                "diagnose: no trained model given and no normal span to train one from");
        trained = train_base_from_span(img, weights, cfg, cfg.normal_span->first,
                                       cfg.normal_span->second);
        base = &trained;
        if (trained_base_out) *trained_base_out = trained;
    }

    std::vector<double> fit_times;
    const model_space::ModelSpace space =
        fit_image(img, weights, cfg.window, cfg.threads, &fit_times);
    const std::size_t n = space.size();

    // classification is sequential by stream order
    std::vector<std::string> labels(n);
    std::vector<double> scores(n);
    std::vector<double> classify_times(n);
    detectors::IncrementalState local_state;
    local_state.min_pool = cfg.detector.min_pool;
    detectors::IncrementalState* st = state ? state : &local_state;

    if (cfg.detector.incremental) {
        const auto t0 = std::chrono::steady_clock::now();
        labels = detectors::incremental_diagnose(space.points, *base, *st, cfg.detector.nu,
                                                 cfg.detector.gamma, cfg.detector.spawn_gamma_scale);
        const double per = seconds_since(t0) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = detectors::ocsvm_classify(*base, space.points[i]).second;
            classify_times[i] = per;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto [inlier, score] = detectors::ocsvm_classify(*base, space.points[i]);
            classify_times[i] = seconds_since(t0);
            scores[i] = score;
            labels[i] = inlier ? segmentation::kNormalLabel : "abnormal";
        }
    }

    DiagnosisReport report;
    report.windows.reserve(n);
    std::vector<segmentation::LabeledWindow> labeled;
    labeled.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = space.points[i];
        report.windows.push_back(WindowResult{p.start_col, labels[i], scores[i], fit_times[i],
                                              classify_times[i]});
        labeled.push_back(segmentation::LabeledWindow{p.start_col, cfg.window.width_cols,
                                                      labels[i], scores[i]});
        if (labels[i] == segmentation::kNormalLabel)
            ++report.normal_count;
        else
            ++report.anomaly_count;
    }
    report.regions = segmentation::merge_regions(labeled, segmentation::kNormalLabel,
                                                 cfg.merge_gap_tolerance);
    report.classes_discovered = st->classifiers.size();

    std::vector<double> window_times(n);
    for (std::size_t i = 0; i < n; ++i) window_times[i] = fit_times[i] + classify_times[i];
    if (n > 0) {
        double sum = 0.0;
        for (double t : window_times) sum += t;
        report.mean_window_seconds = sum / static_cast<double>(n);
        report.p50_window_seconds = percentile(window_times, 0.50);
        report.p90_window_seconds = percentile(window_times, 0.90);
        report.max_window_seconds = *std::max_element(window_times.begin(), window_times.end());
    }
    report.total_seconds = seconds_since(t_total);
    return report;
}

} // namespace gprdiag::pipeline
