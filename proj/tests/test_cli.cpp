#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#ifndef GPRDIAG_CLI_PATH
#error "GPRDIAG_CLI_PATH must be defined by the build"
#endif

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("gprdiag_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const TempDir& dir, const std::string& args) {
    const std::string out_file = dir.file("stdout.txt");
    const std::string err_file = dir.file("stderr.txt");
    const std::string cmd = std::string(GPRDIAG_CLI_PATH) + " " + args + " >" + out_file +
                            " 2>" + err_file;
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help exits cleanly") {
    TempDir dir;
    CHECK(run_cli(dir, "--help").exit_code == 0);
    CHECK(run_cli(dir, "generate --help").exit_code == 0);
}

TEST_CASE("bad arguments exit 2 with the E2 prefix") {
    TempDir dir;
    const CliResult missing = run_cli(dir, "fit");
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.rfind("E2:", 0) == 0);

    const CliResult unknown = run_cli(dir, "no-such-command");
    CHECK(unknown.exit_code == 2);
    CHECK(unknown.err.rfind("E2:", 0) == 0);

    const CliResult bad_preset =
        run_cli(dir, "generate --preset bogus --out " + dir.file("x.pgm"));
    CHECK(bad_preset.exit_code == 2);
    CHECK(bad_preset.err.rfind("E2:", 0) == 0);
}

TEST_CASE("missing input data exits 3 with the E3 prefix") {
    TempDir dir;
    const CliResult r =
        run_cli(dir, "fit --in " + dir.file("absent.pgm") + " --out " + dir.file("s.csv"));
    CHECK(r.exit_code == 3);
    CHECK(r.err.rfind("E3:", 0) == 0);
}

TEST_CASE("generate / fit / train / diagnose round trip") {
    TempDir dir;
    const CliResult gen = run_cli(dir, "generate --preset one-moisture --rows 48 --cols 2600 "
                                       "--seed 11 --out " + dir.file("road.pgm"));
    CAPTURE(gen.err);
    CHECK(gen.exit_code == 0);
    CHECK(fs::exists(dir.file("road.pgm")));
    CHECK(fs::exists(dir.file("road.pgm.json")));
    CHECK(fs::exists(dir.file("road_truth.csv")));

    // config with a small reservoir so the test stays fast
    std::ofstream cfg(dir.file("cfg.json"));
    cfg << R"({"reservoir": {"n_units": 20, "ridge_lambda": 1.0, "seed": 3},
               "preprocess": {"remove_background": false},
               "detector": {"nu": 0.01, "gamma_scale": 0.03},
               "threads": 2})";
    cfg.close();

    const CliResult fit = run_cli(dir, "fit --in " + dir.file("road.pgm") + " --config " +
                                       dir.file("cfg.json") + " --save-weights " +
                                       dir.file("weights.json") + " --out " + dir.file("space.csv"));
    CAPTURE(fit.err);
    CHECK(fit.exit_code == 0);
    CHECK(fs::exists(dir.file("space.csv")));
    CHECK(fs::exists(dir.file("weights.json")));

    const CliResult tr = run_cli(dir, "train-ocsvm --in " + dir.file("space.csv") +
                                      " --nu 0.05 --out " + dir.file("ocsvm.json"));
    CAPTURE(tr.err);
    CHECK(tr.exit_code == 0);

    const CliResult dia = run_cli(dir, "diagnose --in " + dir.file("road.pgm") + " --config " +
                                       dir.file("cfg.json") + " --normal-span 0:1200 --out " +
                                       dir.file("report"));
    CAPTURE(dia.err);
    CHECK(dia.exit_code == 0);
    CHECK(fs::exists(dir.file("report/windows.csv")));
    CHECK(fs::exists(dir.file("report/regions.csv")));
    CHECK(fs::exists(dir.file("report/summary.json")));
    CHECK(fs::exists(dir.file("report/base_ocsvm.json")));
    CHECK(dia.out.find("mean per-window latency") != std::string::npos);

    const CliResult prj = run_cli(dir, "project --in " + dir.file("space.csv") +
                                       " --dims 2 --out " + dir.file("proj.csv"));
    CAPTURE(prj.err);
    CHECK(prj.exit_code == 0);
    CHECK(fs::exists(dir.file("proj.csv")));

    // diagnose without a model or a normal span is a usage error
    const CliResult nospan = run_cli(dir, "diagnose --in " + dir.file("road.pgm") + " --out " +
                                          dir.file("r2"));
    CHECK(nospan.exit_code == 2);
    CHECK(nospan.err.rfind("E2:", 0) == 0);
}

TEST_CASE("numeric failures exit 4 with the E4 prefix") {
    TempDir dir;
    // an all-zero image fitted with ridge_lambda 0 leaves the normal
    // equations singular
    std::ofstream img(dir.file("zeros.csv"));
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 320; ++c) img << (c ? ",0" : "0");
        img << "\n";
    }
    img.close();
    std::ofstream cfg(dir.file("cfg0.json"));
    cfg << R"({"reservoir": {"n_units": 10, "ridge_lambda": 0.0}})";
    cfg.close();
    const CliResult r = run_cli(dir, "fit --in " + dir.file("zeros.csv") + " --config " +
                                     dir.file("cfg0.json") + " --out " + dir.file("s.csv"));
    CHECK(r.exit_code == 4);
    CHECK(r.err.rfind("E4:", 0) == 0);
}

TEST_CASE("flags override config values") {
    TempDir dir;
    CHECK(run_cli(dir, "generate --preset normal --rows 32 --cols 400 --seed 2 --out " +
                           dir.file("img.pgm")).exit_code == 0);
    std::ofstream cfg(dir.file("cfg.json"));
    cfg << R"({"reservoir": {"n_units": 12, "seed": 100, "ridge_lambda": 1.0}})";
    cfg.close();
    const CliResult fit = run_cli(dir, "fit --in " + dir.file("img.pgm") + " --config " +
                                       dir.file("cfg.json") + " --seed 555 --save-weights " +
                                       dir.file("w.json") + " --out " + dir.file("s.csv"));
    CAPTURE(fit.err);
    CHECK(fit.exit_code == 0);
    const std::string weights = slurp(dir.file("w.json"));
    CHECK(weights.find("\"seed\": 555") != std::string::npos);
    CHECK(weights.find("\"n_units\": 12") != std::string::npos);
}

TEST_CASE("preprocess subcommand writes the cleaned image") {
    TempDir dir;
    CHECK(run_cli(dir, "generate --preset normal --rows 32 --cols 400 --seed 2 --out " +
                           dir.file("img.pgm")).exit_code == 0);
    const CliResult pre = run_cli(dir, "preprocess --in " + dir.file("img.pgm") +
                                       " --median-k 3 --out " + dir.file("clean.csv"));
    CAPTURE(pre.err);
    CHECK(pre.exit_code == 0);
    CHECK(fs::exists(dir.file("clean.csv")));
    CHECK(fs::exists(dir.file("clean.csv.json")));
}

} // TEST_SUITE
