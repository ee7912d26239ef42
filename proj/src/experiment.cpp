#include "esn/experiment.hpp"

#include "esn/export.hpp"
#include "esn/persistence.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace esn {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Smallest ridge used by the linear baseline, whose vectorized design has
// more columns than training rows.
constexpr double kBaselineMinRidge = 1e-8;

fs::path prepare_out(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ConfigError("output directory '" + dir.string() + "' is not writable");
    }
    return dir;
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw ConfigError(path.string() + ": cannot open for writing");
    }
    return out;
}

void write_accuracy_rows(std::ostream& out, const std::string& model, const std::string& split,
                         const AccuracyReport& r)
{
    const std::size_t total = r.el_nino.total + r.la_nina.total;
    if (total == 0) {
        return;
    }
    const auto correct = static_cast<std::size_t>(std::llround(r.overall * static_cast<double>(total)));
    out << model << ',' << split << ",all," << correct << ',' << total << ',' << format_number(r.overall) << '\n';
    for (const auto& [name, acc] : {std::pair{"elnino", r.el_nino}, std::pair{"lanina", r.la_nina}}) {
        if (const auto rate = acc.rate()) {
            out << model << ',' << split << ',' << name << ',' << acc.correct << ',' << acc.total << ','
                << format_number(*rate) << '\n';
        }
    }
}

void write_accuracy_csv(const fs::path& path,
                        const std::vector<std::pair<std::string, const SplitAccuracy*>>& models)
{
    std::ofstream out = open_out(path);
    out << "model,split,class,correct,total,accuracy\n";
    for (const auto& [name, acc] : models) {
        write_accuracy_rows(out, name, "train", acc->train);
        write_accuracy_rows(out, name, "val", acc->val);
    }
}

AccuracyReport accuracy_over(const SampleSet& set, const std::vector<double>& scores, Split which)
{
    std::vector<ClassPrediction> preds;
    std::vector<EnsoClass> labels;
    for (std::size_t i : set.indices(which)) {
        preds.push_back(binarize(scores[i]));
        labels.push_back(set.samples[i].label);
    }
    if (preds.empty()) {
        return {};
    }
    return accuracy(preds, labels);
}

Matrix baseline_vectors(const SampleSet& set)
{
    Matrix vectors(static_cast<Eigen::Index>(set.size()), set.valid_mask.count());
    for (std::size_t i = 0; i < set.size(); ++i) {
        vectors.row(static_cast<Eigen::Index>(i)) = preprocess_for_baseline(set.samples[i], set.valid_mask).transpose();
    }
    return vectors;
}

void split_rows(const SampleSet& set, const Matrix& all, const std::vector<std::size_t>& idx, Matrix& x, Vector& y)
{
    x.resize(static_cast<Eigen::Index>(idx.size()), all.cols());
    y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        x.row(static_cast<Eigen::Index>(k)) = all.row(static_cast<Eigen::Index>(idx[k]));
        y(static_cast<Eigen::Index>(k)) = set.samples[idx[k]].index;
    }
}

EsnConfig run_config(const ExperimentConfig& cfg)
{
    EsnConfig c = cfg.esn;
    c.seed = cfg.seed;
    return c;
}

std::string map_label(std::size_t i)
{
    return std::string(1, static_cast<char>('A' + i));
}

void write_map(const fs::path& dir, const std::string& stem, const Matrix& map)
{
    write_matrix_csv(dir / (stem + ".csv"), map);
    write_pgm_heatmap(dir / (stem + ".pgm"), map);
}

}  // namespace

Command command_from_string(const std::string& s)
{
    if (s == "train") return Command::Train;
    if (s == "evaluate") return Command::Evaluate;
    if (s == "relevance") return Command::Relevance;
    if (s == "leak-sweep") return Command::LeakSweep;
    if (s == "permutation") return Command::Permutation;
    if (s == "synthetic") return Command::Synthetic;
    throw ConfigError("unknown command '" + s + "'");
}

std::string to_string(Command c)
{
    switch (c) {
    case Command::Train: return "train";
    case Command::Evaluate: return "evaluate";
    case Command::Relevance: return "relevance";
    case Command::LeakSweep: return "leak-sweep";
    case Command::Permutation: return "permutation";
    case Command::Synthetic: return "synthetic";
    }
    return "unknown";
}

ClassFilter class_filter_from_string(const std::string& s)
{
    if (s == "elnino") return ClassFilter::ElNino;
    if (s == "lanina") return ClassFilter::LaNina;
    if (s == "both") return ClassFilter::Both;
    throw ConfigError("unknown class filter '" + s + "' (expected elnino, lanina or both)");
}

Baseline baseline_from_string(const std::string& s)
{
    if (s == "none") return Baseline::None;
    if (s == "linreg") return Baseline::LinReg;
    if (s == "mlp") return Baseline::Mlp;
    throw ConfigError("unknown baseline '" + s + "' (expected linreg, mlp or none)");
}

SyntheticSpec parse_synthetic_spec(const std::string& text)
{
    SyntheticSpec spec;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> spec.d >> c1 >> spec.t >> c2 >> spec.n) || c1 != ',' || c2 != ',' || !in.eof()) {
        throw ConfigError("--synthetic expects d,t,n (got '" + text + "')");
    }
    if (spec.d < 8 || spec.t < 8 || spec.n < 10) {
        throw ConfigError("--synthetic needs d >= 8, t >= 8, n >= 10");
    }
    return spec;
}

void ExperimentConfig::validate() const
{
    EsnConfig probe = esn;
    probe.n_in = std::max(probe.n_in, 1);
    probe.validate();
    lrp.validate();
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
        throw ConfigError("ridge must be a finite non-negative number");
    }
    if (alphas.empty()) {
        throw ConfigError("leak sweep needs at least one alpha");
    }
    for (double a : alphas) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw ConfigError("leak sweep alphas must lie in [0, 1]");
        }
    }
    if (alphas.size() > 26) {
        throw ConfigError("leak sweep supports at most 26 alphas");
    }
    if (out.empty()) {
        throw ConfigError("output directory must be given");
    }
}

ExperimentConfig experiment_config_from_json(const json& j, ExperimentConfig cfg)
{
    try {
        if (j.contains("command")) cfg.command = command_from_string(j.at("command").get<std::string>());
        if (j.contains("data")) cfg.data = j.at("data").get<std::string>();
        if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("class")) cfg.class_filter = class_filter_from_string(j.at("class").get<std::string>());
        if (j.contains("ridge")) cfg.ridge = j.at("ridge").get<double>();
        if (j.contains("baseline")) cfg.baseline = baseline_from_string(j.at("baseline").get<std::string>());
        if (j.contains("permute_seed")) cfg.permute_seed = j.at("permute_seed").get<std::uint64_t>();
        if (j.contains("alphas")) cfg.alphas = j.at("alphas").get<std::vector<double>>();
        if (j.contains("write_sample_maps")) cfg.write_sample_maps = j.at("write_sample_maps").get<bool>();
        if (j.contains("reference")) {
            const json& r = j.at("reference");
            cfg.reference.first_year = r.at("first_year").get<int>();
            cfg.reference.last_year = r.at("last_year").get<int>();
        }
        if (j.contains("synthetic") && !j.at("synthetic").is_null()) {
            const json& s = j.at("synthetic");
            SyntheticSpec spec;
            spec.d = s.value("d", spec.d);
            spec.t = s.value("t", spec.t);
            spec.n = s.value("n", spec.n);
            spec.options.noise_std = s.value("noise", spec.options.noise_std);
            cfg.synthetic = spec;
        }
        if (j.contains("esn")) {
            const json& e = j.at("esn");
            cfg.esn.n_res = e.value("n_res", cfg.esn.n_res);
            cfg.esn.leak_rate = e.value("leak_rate", cfg.esn.leak_rate);
            cfg.esn.sparsity = e.value("sparsity", cfg.esn.sparsity);
            cfg.esn.spectral_radius = e.value("spectral_radius", cfg.esn.spectral_radius);
            cfg.esn.weight_range = e.value("weight_range", cfg.esn.weight_range);
            if (e.contains("activation")) {
                cfg.esn.activation = activation_from_string(e.at("activation").get<std::string>());
            }
        }
        if (j.contains("lrp")) {
            cfg.lrp.epsilon = j.at("lrp").value("epsilon", cfg.lrp.epsilon);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
    return cfg;
}

json experiment_config_to_json(const ExperimentConfig& cfg)
{
    static const char* classes[] = {"elnino", "lanina", "both"};
    static const char* baselines[] = {"none", "linreg", "mlp"};
    json j{{"command", to_string(cfg.command)},
           {"data", cfg.data.string()},
           {"out", cfg.out.string()},
           {"seed", cfg.seed},
           {"class", classes[static_cast<int>(cfg.class_filter)]},
           {"ridge", cfg.ridge},
           {"baseline", baselines[static_cast<int>(cfg.baseline)]},
           {"permute_seed", cfg.permute_seed},
           {"alphas", cfg.alphas},
           {"write_sample_maps", cfg.write_sample_maps},
           {"reference", {{"first_year", cfg.reference.first_year}, {"last_year", cfg.reference.last_year}}},
           {"esn",
            {{"n_res", cfg.esn.n_res},
             {"leak_rate", cfg.esn.leak_rate},
             {"sparsity", cfg.esn.sparsity},
             {"spectral_radius", cfg.esn.spectral_radius},
             {"weight_range", cfg.esn.weight_range},
             {"activation", std::string(to_string(cfg.esn.activation))}}},
           {"lrp", {{"epsilon", cfg.lrp.epsilon}}}};
    if (cfg.synthetic) {
        j["synthetic"] = {{"d", cfg.synthetic->d},
                          {"t", cfg.synthetic->t},
                          {"n", cfg.synthetic->n},
                          {"noise", cfg.synthetic->options.noise_std}};
    } else {
        j["synthetic"] = nullptr;
    }
    return j;
}

Dataset load_dataset(const ExperimentConfig& cfg)
{
    Dataset ds;
    if (!cfg.data.empty()) {
        const SstSeries raw = load_sst(cfg.data);
        ds.months_loaded = raw.month_count();
        SstSeries anomalies = compute_anomalies(raw, cfg.reference);
        ds.index = nino34_index(anomalies, cfg.reference);
        ds.set = build_sample_set(anomalies, ds.index);
        ds.anomalies = std::move(anomalies);
    } else {
        const SyntheticSpec spec = cfg.synthetic.value_or(SyntheticSpec{});
        SyntheticTask task = synthesize_task(spec.n, spec.d, spec.t, cfg.seed, spec.options);
        ds.set = std::move(task.set);
        ds.signal_box = task.box;
    }
    if (ds.set.indices(Split::Train).size() < 2) {
        throw DataError("dataset has fewer than two training samples");
    }
    return ds;
}

std::vector<double> score_samples(const EsnModel& model, const SampleSet& set)
{
    require(model.n_in() == set.rows(), "model input size " + std::to_string(model.n_in()) +
                                            " does not match data rows " + std::to_string(set.rows()));
    std::vector<double> scores(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        scores[i] = model_output(model, run_reservoir(model, preprocess_for_esn(set.samples[i])))(0);
    }
    return scores;
}

SplitAccuracy split_accuracy(const SampleSet& set, const std::vector<double>& scores)
{
    return {accuracy_over(set, scores, Split::Train), accuracy_over(set, scores, Split::Val)};
}

EsnRun train_and_score(EsnConfig config, const SampleSet& set, double ridge)
{
    config.n_in = static_cast<int>(set.rows());
    EsnModel model = init_reservoir(config);

    Matrix states(static_cast<Eigen::Index>(set.size()), config.n_res);
    for (std::size_t i = 0; i < set.size(); ++i) {
        states.row(static_cast<Eigen::Index>(i)) =
            run_reservoir(model, preprocess_for_esn(set.samples[i])).final_state().transpose();
    }
    const auto train = set.indices(Split::Train);
    Matrix x;
    Vector y;
    split_rows(set, states, train, x, y);
    ReadoutSolution sol = fit_readout(x, y, ridge);
    model.set_readout(sol.w_out, sol.b_out);

    std::vector<double> scores(set.size());
    const Vector out = (states * model.w_out().row(0).transpose()).array() + model.b_out()(0);
    for (std::size_t i = 0; i < set.size(); ++i) {
        scores[i] = out(static_cast<Eigen::Index>(i));
    }
    SplitAccuracy acc = split_accuracy(set, scores);
    return EsnRun{std::move(model), std::move(scores), acc, sol.train_mse};
}

std::vector<EnsoClass> filter_classes(ClassFilter f)
{
    switch (f) {
    case ClassFilter::ElNino: return {EnsoClass::ElNino};
    case ClassFilter::LaNina: return {EnsoClass::LaNina};
    case ClassFilter::Both: return {EnsoClass::ElNino, EnsoClass::LaNina};
    }
    return {};
}

std::vector<SampleRelevance> class_relevance(const EsnModel& model, const SampleSet& set, EnsoClass cls,
                                             const LrpConfig& lrp)
{
    const RelevancePropagator propagator(model, lrp);
    std::vector<SampleRelevance> out;
    for (std::size_t i : set.indices(Split::Train)) {
        const LabeledSample& s = set.samples[i];
        if (s.label != cls) {
            continue;
        }
        const StateTrajectory traj = run_reservoir(model, preprocess_for_esn(s));
        out.push_back({s.month_id, s.label, propagator.relevance_map(traj)});
    }
    return out;
}

Matrix mean_map(const std::vector<SampleRelevance>& maps)
{
    std::vector<RelevanceMap> plain;
    plain.reserve(maps.size());
    for (const SampleRelevance& m : maps) {
        plain.push_back(m.map);
    }
    return mean_relevance(plain);
}

double column_center_of_gravity(const Matrix& map)
{
    const Eigen::RowVectorXd mass = map.cwiseAbs().colwise().sum();
    const double total = mass.sum();
    if (total == 0.0) {
        return 0.0;
    }
    double weighted = 0.0;
    for (Eigen::Index c = 0; c < mass.size(); ++c) {
        weighted += static_cast<double>(c) * mass(c);
    }
    return weighted / total;
}

double masked_pearson(const Matrix& a, const Matrix& b, const Mask& mask)
{
    require(a.rows() == b.rows() && a.cols() == b.cols() && mask.rows() == a.rows() && mask.cols() == a.cols(),
            "masked_pearson: shape mismatch");
    double n = 0.0, sa = 0.0, sb = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (mask(i, j)) {
                n += 1.0;
                sa += a(i, j);
                sb += b(i, j);
            }
        }
    }
    require(n >= 2.0, "masked_pearson: need at least two cells");
    const double ma = sa / n, mb = sb / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (mask(i, j)) {
                cov += (a(i, j) - ma) * (b(i, j) - mb);
                va += (a(i, j) - ma) * (a(i, j) - ma);
                vb += (b(i, j) - mb) * (b(i, j) - mb);
            }
        }
    }
    if (va == 0.0 || vb == 0.0) {
        return 0.0;
    }
    return cov / std::sqrt(va * vb);
}

BaselineResult run_linreg_baseline(const SampleSet& set, double ridge)
{
    const Matrix all = baseline_vectors(set);
    Matrix x;
    Vector y;
    split_rows(set, all, set.indices(Split::Train), x, y);
    const double used_ridge = x.cols() >= x.rows() ? std::max(ridge, kBaselineMinRidge) : ridge;
    const LinearModel model = fit_linreg(x, y, used_ridge);
    const Vector scores = (all * model.weights).array() + model.bias;
    const std::vector<double> s(scores.data(), scores.data() + scores.size());
    return {"linreg", split_accuracy(set, s), model.weights.size() + 1};
}

BaselineResult run_mlp_baseline(const SampleSet& set, std::uint64_t seed)
{
    const Matrix all = baseline_vectors(set);
    Matrix x;
    Vector y;
    split_rows(set, all, set.indices(Split::Train), x, y);
    MlpTrainOptions options;
    options.seed = seed;
    const MlpTrainResult trained = train_mlp(x, y, options);
    const Matrix out = mlp_forward(trained.model, all);
    const std::vector<double> s(out.data(), out.data() + out.size());
    return {"mlp", split_accuracy(set, s), trained.model.param_count()};
}

TrainReport cmd_train(const ExperimentConfig& cfg)
{
    cfg.validate();
    const fs::path out = prepare_out(cfg.out);
    const Dataset ds = load_dataset(cfg);

    TrainReport report{train_and_score(run_config(cfg), ds.set, cfg.ridge), {}};
    save_model(out / "model.json", report.esn.model);
    if (cfg.baseline == Baseline::LinReg) {
        report.baselines.push_back(run_linreg_baseline(ds.set, cfg.ridge));
    } else if (cfg.baseline == Baseline::Mlp) {
        report.baselines.push_back(run_mlp_baseline(ds.set, cfg.seed));
    }

    std::vector<std::pair<std::string, const SplitAccuracy*>> rows{{"esn", &report.esn.accuracy}};
    for (const BaselineResult& b : report.baselines) {
        rows.emplace_back(b.name, &b.accuracy);
    }
    write_accuracy_csv(out / "report.csv", rows);
    write_sample_set_csv(out / "samples.csv", ds.set);
    if (ds.anomalies) {
        write_index_csv(out / "index.csv", *ds.anomalies, ds.index);
    }
    return report;
}

SplitAccuracy cmd_evaluate(const ExperimentConfig& cfg)
{
    cfg.validate();
    const fs::path out = prepare_out(cfg.out);
    const EsnModel model = load_model(out / "model.json");
    const Dataset ds = load_dataset(cfg);
    const std::vector<double> scores = score_samples(model, ds.set);

    std::ofstream per_sample = open_out(out / "evaluation.csv");
    per_sample << "month_id,index,label,split,score,predicted\n";
    for (std::size_t i = 0; i < ds.set.size(); ++i) {
        const LabeledSample& s = ds.set.samples[i];
        per_sample << s.month_id << ',' << format_number(s.index) << ',' << to_string(s.label) << ','
                   << (ds.set.split[i] == Split::Train ? "train" : "val") << ',' << format_number(scores[i]) << ','
                   << to_string(binarize(scores[i]).label) << '\n';
    }
    const SplitAccuracy acc = split_accuracy(ds.set, scores);
    write_accuracy_csv(out / "evaluation_report.csv", {{"esn", &acc}});
    return acc;
}

RelevanceReport cmd_relevance(const ExperimentConfig& cfg)
{
    cfg.validate();
    const fs::path out = prepare_out(cfg.out);
    const fs::path model_path = out / "model.json";
    if (!fs::exists(model_path)) {
        throw DataError(model_path.string() + ": no trained model (run 'train' first)");
    }
    const EsnModel model = load_model(model_path);
    const Dataset ds = load_dataset(cfg);
    require(model.n_in() == ds.set.rows(), "model input size does not match data rows");

    RelevanceReport report;
    report.classes = filter_classes(cfg.class_filter);
    std::ofstream audit = open_out(out / "relevance_audit.csv");
    audit << "month_id,label,total,sum_scores,sum_dummy,absorbed,residual,pass\n";
    for (EnsoClass cls : report.classes) {
        const std::vector<SampleRelevance> maps = class_relevance(model, ds.set, cls, cfg.lrp);
        const fs::path class_dir = out / "relevance" / std::string(to_string(cls));
        if (cfg.write_sample_maps) {
            prepare_out(class_dir);
        }
        for (const SampleRelevance& m : maps) {
            const double residual = m.map.conservation_residual();
            const bool pass = m.map.conserves();
            ++report.audited;
            report.audit_failures += pass ? 0 : 1;
            report.max_relative_residual =
                std::max(report.max_relative_residual, std::abs(residual) / std::max(1.0, std::abs(m.map.total)));
            audit << m.month_id << ',' << to_string(cls) << ',' << format_number(m.map.total) << ','
                  << format_number(m.map.scores.sum()) << ',' << format_number(m.map.dummy_scores.sum()) << ','
                  << format_number(m.map.absorbed) << ',' << format_number(residual) << ','
                  << (pass ? "pass" : "FAIL") << '\n';
            if (cfg.write_sample_maps) {
                write_matrix_csv(class_dir / ("sample_" + std::to_string(m.month_id) + ".csv"), m.map.scores);
            }
        }
        if (maps.empty()) {
            throw DataError("no training samples of class " + std::string(to_string(cls)));
        }
        report.mean_maps.push_back(mean_map(maps));
        write_map(out, "mean_relevance_" + std::string(to_string(cls)), report.mean_maps.back());
    }
    return report;
}

std::vector<LeakRow> cmd_leak_sweep(const ExperimentConfig& cfg)
{
    cfg.validate();
    const fs::path out = prepare_out(cfg.out);
    const Dataset ds = load_dataset(cfg);
    const EnsoClass cls = filter_classes(cfg.class_filter).front();

    std::vector<LeakRow> rows;
    std::ofstream table = open_out(out / "leak_sweep.csv");
    table << "map,alpha,train_accuracy,val_accuracy,val_elnino,val_lanina,center_of_gravity\n";
    for (std::size_t k = 0; k < cfg.alphas.size(); ++k) {
        EsnConfig esn = run_config(cfg);
        esn.leak_rate = cfg.alphas[k];
        EsnRun run = train_and_score(esn, ds.set, cfg.ridge);
        const auto maps = class_relevance(run.model, ds.set, cls, cfg.lrp);
        if (maps.empty()) {
            throw DataError("no training samples of class " + std::string(to_string(cls)));
        }
        LeakRow row{cfg.alphas[k], run.accuracy, mean_map(maps), 0.0};
        row.center_of_gravity = column_center_of_gravity(row.mean_map);

        const auto rate = [](const ClassAccuracy& a) { return format_number(a.rate().value_or(0.0)); };
        table << map_label(k) << ',' << format_number(row.alpha) << ',' << format_number(row.accuracy.train.overall)
              << ',' << format_number(row.accuracy.val.overall) << ',' << rate(row.accuracy.val.el_nino) << ','
              << rate(row.accuracy.val.la_nina) << ',' << format_number(row.center_of_gravity) << '\n';
        write_map(out, "mean_relevance_" + map_label(k), row.mean_map);
        rows.push_back(std::move(row));
    }
    return rows;
}

PermutationReport cmd_permutation(const ExperimentConfig& cfg)
{
    cfg.validate();
    const fs::path out = prepare_out(cfg.out);
    const Dataset ds = load_dataset(cfg);
    const EnsoClass cls = filter_classes(cfg.class_filter).front();
    const EsnConfig esn = run_config(cfg);  // same reservoir seed for both runs

    PermutationReport report;
    const EsnRun original = train_and_score(esn, ds.set, cfg.ridge);
    report.original = original.accuracy;
    report.original_map = mean_map(class_relevance(original.model, ds.set, cls, cfg.lrp));

    const SampleSet permuted = permute_columns(ds.set, cfg.permute_seed);
    const EsnRun shuffled = train_and_score(esn, permuted, cfg.ridge);
    report.permuted = shuffled.accuracy;
    report.permuted_map = mean_map(class_relevance(shuffled.model, permuted, cls, cfg.lrp));
    report.restored_map = inverse_permute(permuted, report.permuted_map);
    report.correlation = masked_pearson(report.restored_map, report.original_map, ds.set.valid_mask);

    const Matrix reapplied = permuted.permutation->apply(report.restored_map);
    const Matrix field = ds.set.samples.front().field.cast<double>();
    const Matrix field_round_trip = inverse_permute(permuted, permuted.permutation->apply(field));
    report.round_trip_exact = reapplied == report.permuted_map &&
                              (field_round_trip.array() == field.array() ||
                               (field_round_trip.array().isNaN() && field.array().isNaN()))
                                  .all();

    std::ofstream table = open_out(out / "permutation.csv");
    table << "run,train_accuracy,val_accuracy,val_elnino,val_lanina\n";
    for (const auto& [name, acc] : {std::pair{"original", &report.original}, std::pair{"permuted", &report.permuted}}) {
        table << name << ',' << format_number(acc->train.overall) << ',' << format_number(acc->val.overall) << ','
              << format_number(acc->val.el_nino.rate().value_or(0.0)) << ','
              << format_number(acc->val.la_nina.rate().value_or(0.0)) << '\n';
    }
    table << "# restored_vs_original_pearson," << format_number(report.correlation) << '\n';
    table << "# round_trip_exact," << (report.round_trip_exact ? "true" : "false") << '\n';

    std::ofstream perm = open_out(out / "permutation_columns.csv");
    perm << "position,source_column\n";
    for (int i = 0; i < permuted.permutation->size(); ++i) {
        perm << i << ',' << permuted.permutation->forward()[i] << '\n';
    }
    write_map(out, "mean_relevance_original", report.original_map);
    write_map(out, "mean_relevance_permuted", report.permuted_map);
    write_map(out, "mean_relevance_restored", report.restored_map);
    return report;
}

SyntheticReport cmd_synthetic(const ExperimentConfig& cfg)
{
    cfg.validate();
    const fs::path out = prepare_out(cfg.out);
    ExperimentConfig synth = cfg;
    synth.data.clear();
    if (!synth.synthetic) {
        synth.synthetic = SyntheticSpec{};
    }
    const Dataset ds = load_dataset(synth);
    const EnsoClass cls = filter_classes(cfg.class_filter).front();

    SyntheticReport report{train_and_score(run_config(cfg), ds.set, cfg.ridge), {}, 0.0};
    report.mean_map = mean_map(class_relevance(report.esn.model, ds.set, cls, cfg.lrp));
    report.box_ratio = box_mass_ratio(report.mean_map, *ds.signal_box);

    save_model(out / "model.json", report.esn.model);
    write_sample_set_csv(out / "samples.csv", ds.set);
    write_accuracy_csv(out / "report.csv", {{"esn", &report.esn.accuracy}});
    write_map(out, "mean_relevance_" + std::string(to_string(cls)), report.mean_map);
    std::ofstream box = open_out(out / "signal_box.csv");
    box << "row_begin,row_end,col_begin,col_end,box_mass_ratio\n"
        << ds.signal_box->row_begin << ',' << ds.signal_box->row_end << ',' << ds.signal_box->col_begin << ','
        << ds.signal_box->col_end << ',' << format_number(report.box_ratio) << '\n';
    return report;
}

void run_command(const ExperimentConfig& cfg)
{
    switch (cfg.command) {
    case Command::Train: cmd_train(cfg); break;
    case Command::Evaluate: cmd_evaluate(cfg); break;
    case Command::Relevance: cmd_relevance(cfg); break;
    case Command::LeakSweep: cmd_leak_sweep(cfg); break;
    case Command::Permutation: cmd_permutation(cfg); break;
    case Command::Synthetic: cmd_synthetic(cfg); break;
    }
}

}  // namespace esn
