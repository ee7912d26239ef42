#include "esn/experiment.hpp"
#include "esn/export.hpp"
#include "esn/rng.hpp"
#include "esn/sst.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <cmath>
#include <string>

using namespace esn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("esn_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(ESN_LRP_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Small synthetic run, fast enough for the unit suite.
const std::string kSmall = "--synthetic 8,24,60 --n-res 30 --no-sample-maps";

ExperimentConfig small_config(Command c, const fs::path& out)
{
    ExperimentConfig cfg;
    cfg.command = c;
    cfg.out = out;
    cfg.synthetic = parse_synthetic_spec("8,24,60");
    cfg.esn.n_res = 30;
    cfg.write_sample_maps = false;
    return cfg;
}

}  // namespace

TEST_CASE("same seed gives byte-identical artifacts")
{
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    REQUIRE(run_cli("synthetic " + kSmall + " --out " + a.string()) == 0);
    REQUIRE(run_cli("synthetic " + kSmall + " --out " + b.string()) == 0);
    for (const char* f : {"model.json", "samples.csv", "report.csv", "mean_relevance_elnino.csv"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
    const fs::path c = scratch("det_c");
    REQUIRE(run_cli("synthetic " + kSmall + " --seed 5 --out " + c.string()) == 0);
    CHECK(slurp(a / "model.json") != slurp(c / "model.json"));
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
}

TEST_CASE("exit codes")
{
    const fs::path out = scratch("codes");
    CHECK(run_cli("") == 2);
    CHECK(run_cli("train --bogus") == 2);
    CHECK(run_cli("train " + kSmall + " --alpha 1.5 --out " + out.string()) == 2);
    CHECK(run_cli("train --data /nonexistent/sst.bin --out " + out.string()) == 3);
    // Relevance before training: no model to explain.
    CHECK(run_cli("relevance " + kSmall + " --out " + out.string()) == 3);
    // Fewer training samples than reservoir units without a ridge.
    CHECK(run_cli("train --synthetic 8,24,10 --n-res 30 --out " + out.string()) == 4);
    CHECK(run_cli("train --synthetic 8,24,10 --n-res 30 --ridge 0.1 --out " + out.string()) == 0);
    fs::remove_all(out);
}

TEST_CASE("flags override the config file")
{
    const fs::path out = scratch("override");
    fs::create_directories(out);
    const fs::path cfg_path = out / "cfg.json";
    std::ofstream(cfg_path) << R"({"esn": {"n_res": 25, "leak_rate": 0.5}, "synthetic": {"d": 8, "t": 24, "n": 60}})";
    REQUIRE(run_cli("train --config " + cfg_path.string() + " --alpha 0.2 --out " + out.string()) == 0);
    const auto model = nlohmann::json::parse(slurp(out / "model.json"));
    CHECK(model["config"]["n_res"] == 25);
    CHECK(model["config"]["leak_rate"] == 0.2);

    std::ofstream(cfg_path) << "{not json";
    CHECK(run_cli("train --config " + cfg_path.string()) == 2);
    fs::remove_all(out);
}

TEST_CASE("train, evaluate and relevance chain")
{
    const fs::path out = scratch("chain");
    ExperimentConfig cfg = small_config(Command::Train, out);
    cfg.class_filter = ClassFilter::Both;
    const TrainReport train = cmd_train(cfg);
    CHECK(fs::exists(out / "model.json"));
    CHECK(fs::exists(out / "report.csv"));

    cfg.command = Command::Evaluate;
    const SplitAccuracy eval = cmd_evaluate(cfg);
    CHECK(eval.val.overall == train.esn.accuracy.val.overall);
    CHECK(eval.train.overall == train.esn.accuracy.train.overall);

    cfg.command = Command::Relevance;
    cfg.write_sample_maps = true;
    const RelevanceReport rel = cmd_relevance(cfg);
    CHECK(rel.audit_failures == 0);
    CHECK(rel.audited > 0);
    REQUIRE(rel.mean_maps.size() == 2);
    for (const Matrix& m : rel.mean_maps) {
        CHECK(m.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        CHECK(m.cols() == 24);
    }
    CHECK(fs::exists(out / "relevance_audit.csv"));
    CHECK(fs::exists(out / "mean_relevance_lanina.pgm"));
    CHECK(fs::is_directory(out / "relevance" / "elnino"));
    fs::remove_all(out);
}

TEST_CASE("config JSON round trip")
{
    ExperimentConfig cfg = small_config(Command::LeakSweep, "somewhere");
    cfg.alphas = {0.1, 0.9};
    cfg.ridge = 0.25;
    cfg.baseline = Baseline::Mlp;
    const ExperimentConfig back = experiment_config_from_json(experiment_config_to_json(cfg));
    CHECK(back.command == Command::LeakSweep);
    CHECK(back.out == cfg.out);
    CHECK(back.alphas == cfg.alphas);
    CHECK(back.ridge == 0.25);
    CHECK(back.baseline == Baseline::Mlp);
    CHECK(back.synthetic->t == 24);
    CHECK(back.esn.n_res == 30);
    CHECK_THROWS_AS(parse_synthetic_spec("8,24"), ConfigError);
    CHECK_THROWS_AS(command_from_string("fly"), ConfigError);
}

TEST_CASE("column centre of gravity and masked pearson")
{
    Matrix m = Matrix::Zero(2, 5);
    m(0, 1) = 1.0;
    m(1, 3) = -1.0;
    CHECK(column_center_of_gravity(m) == doctest::Approx(2.0));
    m(1, 3) = -3.0;
    CHECK(column_center_of_gravity(m) == doctest::Approx(2.5));

    Matrix a(1, 4), b(1, 4);
    a << 1, 2, 3, 100;
    b << 2, 4, 6, -50;
    Mask mask = Mask::Ones(1, 4);
    mask(0, 3) = false;
    CHECK(masked_pearson(a, b, mask) == doctest::Approx(1.0));
}

TEST_CASE("SST container runs end to end")
{
    // 1975-2014 on the standard grid: a seasonal cycle everywhere plus a
    // slow oscillation confined to the equatorial Pacific.
    const fs::path out = scratch("sst");
    fs::create_directories(out);
    SstSeries series;
    series.grid = GridSpec::standard();
    series.start_year = 1975;
    Rng rng(91);
    for (int m = 0; m < 40 * 12; ++m) {
        const double enso = 1.5 * std::sin(2.0 * M_PI * m / 43.0);
        Field f(89, 180);
        for (int i = 0; i < 89; ++i) {
            const double lat = series.grid.lat_centers[static_cast<std::size_t>(i)];
            for (int j = 0; j < 180; ++j) {
                const double lon = series.grid.lon_centers[static_cast<std::size_t>(j)];
                const double pattern = std::exp(-lat * lat / 50.0 - (lon - 215.0) * (lon - 215.0) / 2000.0);
                f(i, j) = static_cast<float>(20.0 + 3.0 * std::cos(2.0 * M_PI * (m % 12) / 12.0) + enso * pattern +
                                             0.2 * rng.uniform(-1.0, 1.0));
            }
        }
        f(0, 0) = std::numeric_limits<float>::quiet_NaN();  // one land cell
        series.months.push_back(std::move(f));
    }
    const fs::path data = out / "demo.sstg";
    write_sst(data, series);
    const std::string common = "--data " + data.string() + " --n-res 40 --out " + out.string();

    REQUIRE(run_cli("train " + common + " --baseline linreg --ridge 1e-6") == 0);
    CHECK(fs::exists(out / "index.csv"));
    CHECK(fs::exists(out / "report.csv"));
    CHECK(slurp(out / "report.csv").find("linreg") != std::string::npos);
    CHECK(run_cli("evaluate " + common) == 0);
    CHECK(run_cli("relevance " + common + " --class both --no-sample-maps") == 0);
    const Matrix mean = read_matrix_csv(out / "mean_relevance_elnino.csv");
    CHECK(mean.rows() == 89);
    CHECK(mean.cols() == 180);
    CHECK(mean.cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
    fs::remove_all(out);
}
