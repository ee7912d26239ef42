// Experiment driver: trains leaky ESNs on SST anomaly fields (or the synthetic
// task), explains them with LRP and writes CSV/PGM/JSON artifacts.

#include "esn/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

struct Flags {
    std::string config_file;
    std::optional<std::string> data, out, klass, baseline, synthetic;
    std::optional<std::uint64_t> seed, permute_seed;
    std::optional<double> alpha, sparsity, spectral_radius, ridge, noise;
    std::optional<int> n_res;
    std::vector<double> alphas;
    bool no_sample_maps = false;
};

void add_flags(CLI::App* app, Flags& f)
{
    app->add_option("--config", f.config_file, "JSON experiment config; flags override it");
    app->add_option("--data", f.data, "SSTG container (omit for the synthetic task)");
    app->add_option("--out", f.out, "output directory");
    app->add_option("--seed", f.seed, "master seed");
    app->add_option("--alpha", f.alpha, "leak rate");
    app->add_option("--n-res", f.n_res, "reservoir size");
    app->add_option("--sparsity", f.sparsity, "fraction of nonzero reservoir weights");
    app->add_option("--spectral-radius", f.spectral_radius, "target spectral radius");
    app->add_option("--class", f.klass, "elnino, lanina or both");
    app->add_option("--ridge", f.ridge, "readout ridge penalty");
    app->add_option("--baseline", f.baseline, "linreg, mlp or none");
    app->add_option("--permute-seed", f.permute_seed, "column permutation seed");
    app->add_option("--synthetic", f.synthetic, "synthetic task size d,t,n");
    app->add_option("--noise", f.noise, "synthetic background noise std");
    app->add_option("--alphas", f.alphas, "leak rates for leak-sweep")->delimiter(',');
    app->add_flag("--no-sample-maps", f.no_sample_maps, "skip per-sample relevance CSVs");
}

esn::ExperimentConfig build_config(esn::Command command, const Flags& f)
{
    esn::ExperimentConfig cfg;
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file);
        if (!in) {
            throw esn::ConfigError(f.config_file + ": cannot open config file");
        }
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw esn::ConfigError(f.config_file + ": " + e.what());
        }
        cfg = esn::experiment_config_from_json(j, cfg);
    }
    cfg.command = command;
    if (f.data) cfg.data = *f.data;
    if (f.out) cfg.out = *f.out;
    if (f.seed) cfg.seed = *f.seed;
    if (f.alpha) cfg.esn.leak_rate = *f.alpha;
    if (f.n_res) cfg.esn.n_res = *f.n_res;
    if (f.sparsity) cfg.esn.sparsity = *f.sparsity;
    if (f.spectral_radius) cfg.esn.spectral_radius = *f.spectral_radius;
    if (f.klass) cfg.class_filter = esn::class_filter_from_string(*f.klass);
    if (f.ridge) cfg.ridge = *f.ridge;
    if (f.baseline) cfg.baseline = esn::baseline_from_string(*f.baseline);
    if (f.permute_seed) cfg.permute_seed = *f.permute_seed;
    if (f.synthetic) cfg.synthetic = esn::parse_synthetic_spec(*f.synthetic);
    if (f.noise) {
        if (!cfg.synthetic) cfg.synthetic = esn::SyntheticSpec{};
        cfg.synthetic->options.noise_std = *f.noise;
    }
    if (!f.alphas.empty()) cfg.alphas = f.alphas;
    if (f.no_sample_maps) cfg.write_sample_maps = false;
    cfg.validate();
    return cfg;
}

std::string pct(const esn::ClassAccuracy& a)
{
    if (!a.rate()) {
        return "n/a";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%% (%zu/%zu)", 100.0 * *a.rate(), a.correct, a.total);
    return buf;
}

void print_accuracy(const std::string& name, const esn::SplitAccuracy& acc)
{
    std::printf("%-8s train: elnino %s, lanina %s\n", name.c_str(), pct(acc.train.el_nino).c_str(),
                pct(acc.train.la_nina).c_str());
    std::printf("%-8s val:   elnino %s, lanina %s\n", name.c_str(), pct(acc.val.el_nino).c_str(),
                pct(acc.val.la_nina).c_str());
}

void run(const esn::ExperimentConfig& cfg)
{
    using esn::Command;
    switch (cfg.command) {
    case Command::Train: {
        const auto r = esn::cmd_train(cfg);
        print_accuracy("esn", r.esn.accuracy);
        for (const auto& b : r.baselines) {
            print_accuracy(b.name, b.accuracy);
        }
        break;
    }
    case Command::Evaluate:
        print_accuracy("esn", esn::cmd_evaluate(cfg));
        break;
    case Command::Relevance: {
        const auto r = esn::cmd_relevance(cfg);
        std::printf("audited %zu samples, %zu conservation failures, max relative residual %.3g\n", r.audited,
                    r.audit_failures, r.max_relative_residual);
        if (r.audit_failures) {
            throw esn::NumericError("relevance conservation audit failed");
        }
        break;
    }
    case Command::LeakSweep:
        for (const auto& row : esn::cmd_leak_sweep(cfg)) {
            std::printf("alpha %-5g val %.3f  centre of gravity %.2f\n", row.alpha, row.accuracy.val.overall,
                        row.center_of_gravity);
        }
        break;
    case Command::Permutation: {
        const auto r = esn::cmd_permutation(cfg);
        print_accuracy("original", r.original);
        print_accuracy("permuted", r.permuted);
        std::printf("restored vs original map: r = %.4f, round trip %s\n", r.correlation,
                    r.round_trip_exact ? "exact" : "INEXACT");
        break;
    }
    case Command::Synthetic: {
        const auto r = esn::cmd_synthetic(cfg);
        print_accuracy("esn", r.esn.accuracy);
        std::printf("box mass ratio %.2f\n", r.box_ratio);
        break;
    }
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Leaky echo state networks with layer-wise relevance propagation"};
    app.require_subcommand(1);

    const std::pair<esn::Command, const char*> commands[] = {
        {esn::Command::Train, "train a reservoir model and write model.json and report.csv"},
        {esn::Command::Evaluate, "score the data with <out>/model.json"},
        {esn::Command::Relevance, "relevance maps for the training samples of <out>/model.json"},
        {esn::Command::LeakSweep, "retrain across leak rates and compare mean relevance maps"},
        {esn::Command::Permutation, "retrain on column-permuted inputs and restore the relevance map"},
        {esn::Command::Synthetic, "train and explain on the synthetic blob task"},
    };
    Flags flags[std::size(commands)];
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        subs.push_back(app.add_subcommand(esn::to_string(commands[i].first), commands[i].second));
        add_flags(subs.back(), flags[i]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (subs[i]->parsed()) {
                run(build_config(commands[i].first, flags[i]));
            }
        }
    } catch (const esn::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const esn::PreconditionError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const esn::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const esn::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    }
    return 0;
}
