#pragma once

#include "esn/baselines.hpp"
#include "esn/lrp.hpp"
#include "esn/readout.hpp"
#include "esn/reservoir.hpp"
#include "esn/samples.hpp"
#include "esn/synthetic.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace esn {

enum class Command { Train, Evaluate, Relevance, LeakSweep, Permutation, Synthetic };
enum class ClassFilter { ElNino, LaNina, Both };
enum class Baseline { None, LinReg, Mlp };

Command command_from_string(const std::string& s);
ClassFilter class_filter_from_string(const std::string& s);
Baseline baseline_from_string(const std::string& s);
std::string to_string(Command c);

struct SyntheticSpec {
    int d = 16;
    int t = 180;  // column count of the SST grid
    int n = 400;
    SyntheticOptions options;
};

/// Parses "d,t,n".
SyntheticSpec parse_synthetic_spec(const std::string& text);

struct ExperimentConfig {
    Command command = Command::Train;
    std::filesystem::path data;       // SSTG container; empty means synthetic
    std::filesystem::path out = "out";
    std::optional<SyntheticSpec> synthetic;
    EsnConfig esn;                    // n_in is taken from the data
    LrpConfig lrp;
    std::uint64_t seed = 42;
    ClassFilter class_filter = ClassFilter::ElNino;
    double ridge = 0.0;
    Baseline baseline = Baseline::None;
    std::uint64_t permute_seed = 7;
    std::vector<double> alphas{0.01, 0.05, 0.2, 0.4};
    ReferencePeriod reference;
    bool write_sample_maps = true;

    /// Throws ConfigError on the first invalid field.
    void validate() const;
};

/// Reads the JSON form of ExperimentConfig on top of `base`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);

struct Dataset {
    SampleSet set;
    std::optional<GridBox> signal_box;  // synthetic data only
    std::optional<SstSeries> anomalies; // SST data only
    std::vector<double> index;          // per month, SST data only
    int months_loaded = 0;
};

/// Loads the SST pipeline from cfg.data or generates the synthetic task.
Dataset load_dataset(const ExperimentConfig& cfg);

struct SplitAccuracy {
    AccuracyReport train;
    AccuracyReport val;
};

struct EsnRun {
    EsnModel model;
    std::vector<double> scores;  // model output per sample
    SplitAccuracy accuracy;
    double train_mse = 0.0;
};

/// Builds a reservoir from `config` (n_in forced to the data), fits the
/// readout on the training split and scores every sample.
EsnRun train_and_score(EsnConfig config, const SampleSet& set, double ridge);

/// Scores every sample with an already trained model.
std::vector<double> score_samples(const EsnModel& model, const SampleSet& set);
SplitAccuracy split_accuracy(const SampleSet& set, const std::vector<double>& scores);

std::vector<EnsoClass> filter_classes(ClassFilter f);

struct SampleRelevance {
    int month_id = 0;
    EnsoClass label = EnsoClass::Neutral;
    RelevanceMap map;
};

/// Relevance maps for the training samples of one class, in time order.
std::vector<SampleRelevance> class_relevance(const EsnModel& model, const SampleSet& set, EnsoClass cls,
                                             const LrpConfig& lrp);

Matrix mean_map(const std::vector<SampleRelevance>& maps);

/// Column centre of gravity of |map| (0-based column index).
double column_center_of_gravity(const Matrix& map);

/// Pearson correlation of a and b restricted to mask cells.
double masked_pearson(const Matrix& a, const Matrix& b, const Mask& mask);

struct BaselineResult {
    std::string name;
    SplitAccuracy accuracy;
    Eigen::Index params = 0;
};

BaselineResult run_linreg_baseline(const SampleSet& set, double ridge);
BaselineResult run_mlp_baseline(const SampleSet& set, std::uint64_t seed);

struct TrainReport {
    EsnRun esn;
    std::vector<BaselineResult> baselines;
};

struct RelevanceReport {
    std::vector<EnsoClass> classes;
    std::vector<Matrix> mean_maps;  // one per class
    std::size_t audited = 0;
    std::size_t audit_failures = 0;
    double max_relative_residual = 0.0;
};

struct LeakRow {
    double alpha = 0.0;
    SplitAccuracy accuracy;
    Matrix mean_map;
    double center_of_gravity = 0.0;
};

struct PermutationReport {
    SplitAccuracy original;
    SplitAccuracy permuted;
    Matrix original_map;
    Matrix permuted_map;
    Matrix restored_map;
    double correlation = 0.0;
    bool round_trip_exact = false;
};

struct SyntheticReport {
    EsnRun esn;
    Matrix mean_map;
    double box_ratio = 0.0;
};

// Commands. Each writes its artifacts under cfg.out and returns the figures
// it reported.
TrainReport cmd_train(const ExperimentConfig& cfg);
SplitAccuracy cmd_evaluate(const ExperimentConfig& cfg);
RelevanceReport cmd_relevance(const ExperimentConfig& cfg);
std::vector<LeakRow> cmd_leak_sweep(const ExperimentConfig& cfg);
PermutationReport cmd_permutation(const ExperimentConfig& cfg);
SyntheticReport cmd_synthetic(const ExperimentConfig& cfg);

/// Dispatches on cfg.command.
void run_command(const ExperimentConfig& cfg);

}  // namespace esn
