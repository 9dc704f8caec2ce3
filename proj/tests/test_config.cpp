#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "cvsense/config.hpp"
#include "cvsense/csv.hpp"
#include "cvsense/experiments.hpp"

using namespace cvsense;

namespace {

Config from_text(const std::string& text) {
    std::istringstream in(text);
    return Config::parse(in);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("cvsense_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_SUITE_BEGIN("config_cli");

TEST_CASE("parser reports line and field diagnostics") {
    try {
        from_text("experiment = threshold\nbroken line\n");
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        REQUIRE(e.diagnostics.size() == 1);
        CHECK(e.diagnostics[0].line == 2);
    }

    try {
        from_text("a = 1\na = 2\n");
        FAIL("expected a duplicate-key error");
    } catch (const ConfigError& e) {
        CHECK(e.diagnostics[0].message == "duplicate key");
    }

    Config c = from_text("# comment\nshots = 20000  # trailing\nm.list = 4, 9, 16\n");
    CHECK(c.get_long("shots") == 20000);
    CHECK(c.get_list("m.list").size() == 3);
    CHECK(c.line_of("m.list") == 3);
}

TEST_CASE("validation collects all schema violations without running") {
    Config c = from_text(
        "experiment = complex-sensing\n"
        "m.list = 5\n"
        "n_s = 4\n"
        "k_prior.list = 1\n");
    auto ds = validate_experiment(c);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].message == "perfect square required");

    Config empty_list = from_text(
        "experiment = complex-sensing\n"
        "m.list = \n"
        "n_s = 4\n"
        "k_prior.list = 1\n");
    bool saw = false;
    for (const auto& d : validate_experiment(empty_list))
        if (d.message == "nonempty range required") saw = true;
    CHECK(saw);

    Config ok = from_text(
        "experiment = complex-sensing\n"
        "m.list = 4, 16\n"
        "n_s = 4\n"
        "k_prior.list = 0.5, 1\n");
    CHECK(validate_experiment(ok).empty());

    Config no_seed = from_text(
        "experiment = channel-check\n"
        "eta.list = 0.9\n"
        "k.list = 2\n"
        "samples = 20000\n");
    bool seed_flagged = false;
    for (const auto& d : validate_experiment(no_seed))
        if (d.field == "seed") seed_flagged = true;
    CHECK(seed_flagged);

    Config low_shots = from_text(
        "experiment = threshold\n"
        "sigma.min = 0.5\nsigma.max = 0.52\nsigma.step = 0.01\n"
        "gain.min = 1\ngain.max = 2\ngain.step = 0.5\n"
        "shots = 100\nseed = 1\n");
    bool shots_flagged = false;
    for (const auto& d : validate_experiment(low_shots))
        if (d.field == "shots") shots_flagged = true;
    CHECK(shots_flagged);
}

TEST_CASE("run_experiment rejects invalid configs before computing") {
    Config c = from_text("experiment = complex-sensing\nm.list = 5\nn_s = 4\nk_prior.list = 1\n");
    RunOptions opts;
    opts.out_dir = temp_dir("reject");
    CHECK_THROWS_AS(run_experiment(c, opts), ConfigError);
}

TEST_CASE("experiments are deterministic byte for byte") {
    Config c = from_text(
        "experiment = channel-check\n"
        "eta.list = 0.9, 0.8\n"
        "k.list = 2, 0.5\n"
        "samples = 20000\n"
        "seed = 77\n");
    RunOptions a;
    a.out_dir = temp_dir("det_a");
    RunOptions b;
    b.out_dir = temp_dir("det_b");
    auto fa = run_experiment(c, a);
    auto fb = run_experiment(c, b);
    REQUIRE(fa.size() == 1);
    REQUIRE(fb.size() == 1);
    CHECK(slurp(fa[0]) == slurp(fb[0]));
    CHECK(slurp(fa[0]).substr(0, 9) == "# config ");
}

TEST_CASE("csv headers are pinned per experiment kind") {
    CHECK(csv_columns("threshold", "") ==
          std::vector<std::string>{"sigma", "gain_opt", "logical_rms", "mc_rms", "helps"});
    CHECK(csv_columns("sensing-sweep", "") ==
          std::vector<std::string>{"M", "delta_entangled", "delta_separable", "delta_qec1",
                                   "delta_qec2", "delta_lossless"});
    CHECK(csv_columns("complex-sensing", "") ==
          std::vector<std::string>{"M", "delta_q_gkp", "k_prior"});
    CHECK(csv_columns("code-noise", "stabilizer") ==
          std::vector<std::string>{"lambda", "sigma", "sigma_q", "sigma_p"});
    CHECK(csv_columns("code-noise", "tms") ==
          std::vector<std::string>{"sigma", "gain_opt", "sigma_q", "sigma_p"});
    CHECK(csv_columns("channel-check", "") ==
          std::vector<std::string>{"check", "param", "mean_dev_se", "var_dev_se", "pass"});
    CHECK_THROWS_AS(csv_columns("nope", ""), std::invalid_argument);

    // the written artifact carries exactly that header on line two
    Config c = from_text(
        "experiment = complex-sensing\nm.list = 4\nn_s = 4\nk_prior.list = 1\n");
    RunOptions opts;
    opts.out_dir = temp_dir("hdr");
    auto files = run_experiment(c, opts);
    REQUIRE(files.size() == 1);
    std::string text = slurp(files[0]);
    auto first_nl = text.find('\n');
    auto second_nl = text.find('\n', first_nl + 1);
    CHECK(text.substr(first_nl + 1, second_nl - first_nl - 1) == "M,delta_q_gkp,k_prior");
}

TEST_CASE("seed override lands in the config hash") {
    Config c = from_text(
        "experiment = channel-check\n"
        "eta.list = 0.9\n"
        "k.list = 2\n"
        "samples = 20000\n");
    RunOptions opts;
    opts.out_dir = temp_dir("seed_a");
    opts.seed_override = 5;
    auto fa = run_experiment(c, opts);
    RunOptions opts2 = opts;
    opts2.out_dir = temp_dir("seed_b");
    opts2.seed_override = 6;
    auto fb = run_experiment(c, opts2);
    CHECK(slurp(fa[0]) != slurp(fb[0]));
}

TEST_CASE("lossless sweep shows the 1/M scaling in the entangled column") {
    Config c = from_text(
        "experiment = sensing-sweep\n"
        "eta.list = 1.0\n"
        "m.list = 4, 16, 64, 256\n"
        "n_s = 1\n"
        "levels = 7\n"
        "lambda.list = 1.5\n"
        "gain.min = 1\ngain.max = 2\ngain.step = 0.5\n");
    RunOptions opts;
    opts.out_dir = temp_dir("slope");
    auto files = run_experiment(c, opts);
    REQUIRE(files.size() == 1);

    std::ifstream in(files[0]);
    std::string line;
    std::getline(in, line);  // hash comment
    std::getline(in, line);  // header
    std::vector<double> lx, ly;
    while (std::getline(in, line)) {
        std::stringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        lx.push_back(std::log(std::stod(cell)));
        std::getline(row, cell, ',');
        ly.push_back(std::log(std::stod(cell)));
    }
    REQUIRE(lx.size() == 4);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    double n = 4.0;
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::abs(slope + 1.0) <= 0.05);
}

TEST_CASE("code-noise can dump the logical densities") {
    Config c = from_text(
        "experiment = code-noise\n"
        "code = stabilizer\n"
        "sigma.min = 0.1\nsigma.max = 0.1\nsigma.step = 0.1\n"
        "lambda.list = 1.5\n"
        "levels = 3\n"
        "pdf.out = noise_pdf\n");
    RunOptions opts;
    opts.out_dir = temp_dir("pdfdump");
    auto files = run_experiment(c, opts);
    REQUIRE(files.size() == 3);  // table plus one density per quadrature
    bool saw_pdf = false;
    for (const auto& f : files)
        if (f.find("noise_pdf_lambda1p5_sigma0p1_q.csv") != std::string::npos) {
            saw_pdf = true;
            CHECK(slurp(f).substr(0, 10) == "x,density\n");
        }
    CHECK(saw_pdf);
}

TEST_CASE("two experiments in one process stay independent") {
    Config c = from_text(
        "experiment = channel-check\neta.list = 0.9\nk.list = 2\nsamples = 20000\nseed = 9\n");
    RunOptions a;
    a.out_dir = temp_dir("iso_a");
    auto fa = run_experiment(c, a);
    Config other = from_text(
        "experiment = complex-sensing\nm.list = 4\nn_s = 4\nk_prior.list = 1\n");
    RunOptions b;
    b.out_dir = temp_dir("iso_b");
    run_experiment(other, b);
    RunOptions a2;
    a2.out_dir = temp_dir("iso_c");
    auto fc = run_experiment(c, a2);
    CHECK(slurp(fa[0]) == slurp(fc[0]));
}

TEST_SUITE_END();
