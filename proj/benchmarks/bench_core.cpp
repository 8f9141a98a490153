#include <benchmark/benchmark.h>

#include "gprdiag/detectors.hpp"
#include "gprdiag/esn.hpp"
#include "gprdiag/model_space.hpp"
#include "gprdiag/preprocess.hpp"
#include "gprdiag/rng.hpp"
#include "gprdiag/synthgpr.hpp"

using namespace gprdiag;

namespace {

BScanImage random_window(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    rng::SplitMix64 g(seed);
    BScanImage img(rows, cols);
    for (double& v : img.data) v = g.uniform(-1.0, 1.0);
    img.update_range();
    return img;
}

esn::ReservoirWeights survey_weights(std::size_t n_units) {
    esn::ReservoirConfig cfg;
    cfg.n_units = n_units;
    cfg.seed = 1;
    return esn::init_reservoir(cfg);
}

std::vector<model_space::ModelVector> random_points(std::size_t n, std::size_t dim,
                                                    std::uint64_t seed) {
    rng::SplitMix64 g(seed);
    std::vector<model_space::ModelVector> pts(n);
    for (auto& p : pts) {
        p.phi.resize(static_cast<Eigen::Index>(dim));
        for (Eigen::Index i = 0; i < p.phi.size(); ++i) p.phi[i] = g.gaussian();
    }
    return pts;
}

void BM_RunGrid(benchmark::State& state) {
    const auto w = survey_weights(std::size_t(state.range(0)));
    const BScanImage window = random_window(64, 300, 7);
    for (auto _ : state) benchmark::DoNotOptimize(esn::run_grid(w, window));
}
BENCHMARK(BM_RunGrid)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_FitWindow(benchmark::State& state) {
    const auto w = survey_weights(std::size_t(state.range(0)));
    const BScanImage window = random_window(64, 300, 7);
    for (auto _ : state) benchmark::DoNotOptimize(esn::fit_window(w, window));
}
BENCHMARK(BM_FitWindow)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_FitBaselineEsn(benchmark::State& state) {
    esn::ReservoirConfig cfg;
    cfg.n_units = 50;
    cfg.seed = 1;
    const BScanImage window = random_window(64, 300, 7);
    for (auto _ : state) benchmark::DoNotOptimize(esn::fit_baseline_esn(window, cfg));
}
BENCHMARK(BM_FitBaselineEsn)->Unit(benchmark::kMillisecond);

void BM_SpectralRadius(benchmark::State& state) {
    rng::SplitMix64 g(3);
    Eigen::MatrixXd m(state.range(0), state.range(0));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g.uniform(-0.5, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(esn::spectral_radius(m));
}
BENCHMARK(BM_SpectralRadius)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_ModelDistance(benchmark::State& state) {
    const auto pts = random_points(2, 101, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(model_space::model_distance(pts[0], pts[1]));
}
BENCHMARK(BM_ModelDistance);

void BM_PairwiseDistances(benchmark::State& state) {
    model_space::ModelSpace space;
    for (auto& p : random_points(std::size_t(state.range(0)), 101, 6)) space.add(p);
    for (auto _ : state) benchmark::DoNotOptimize(model_space::pairwise_distances(space));
}
BENCHMARK(BM_PairwiseDistances)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_TrainOcsvm(benchmark::State& state) {
    const auto pts = random_points(std::size_t(state.range(0)), 101, 8);
    for (auto _ : state) benchmark::DoNotOptimize(detectors::train_ocsvm(pts, 0.05, 0.0));
}
BENCHMARK(BM_TrainOcsvm)->Arg(40)->Arg(136)->Unit(benchmark::kMillisecond);

void BM_GenerateBscan(benchmark::State& state) {
    synthgpr::SceneSpec scene;
    scene.rows = 64;
    scene.cols = std::size_t(state.range(0));
    scene.seed = 9;
    scene.noise_sigma = 0.01;
    scene.layers = {{12, 1.0}, {32, 0.7}};
    scene.anomalies = {{synthgpr::AnomalyKind::loose_texture, scene.cols / 2,
                        scene.cols / 2 + 400, 16, 48, 0.6}};
    for (auto _ : state) benchmark::DoNotOptimize(synthgpr::generate_bscan(scene));
}
BENCHMARK(BM_GenerateBscan)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_MedianFilter(benchmark::State& state) {
    const BScanImage img = random_window(64, 2000, 11);
    for (auto _ : state) benchmark::DoNotOptimize(preprocess::median_filter(img, 3));
}
BENCHMARK(BM_MedianFilter)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
