#include "esn/samples.hpp"

#include "esn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace esn {

ColumnPermutation::ColumnPermutation(std::vector<int> forward) : forward_(std::move(forward))
{
    inverse_.assign(forward_.size(), -1);
    for (std::size_t i = 0; i < forward_.size(); ++i) {
        const int target = forward_[i];
        if (target < 0 || static_cast<std::size_t>(target) >= forward_.size() || inverse_[target] != -1) {
            throw PreconditionError("ColumnPermutation: not a bijection");
        }
        inverse_[target] = static_cast<int>(i);
    }
}

ColumnPermutation ColumnPermutation::random(int columns, std::uint64_t seed)
{
    require(columns > 0, "ColumnPermutation: need at least one column");
    std::vector<int> order(columns);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed, Stream::Permutation);
    for (int i = columns - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
    }
    return ColumnPermutation(std::move(order));
}

void ColumnPermutation::check_width(Eigen::Index cols) const
{
    require(cols == size(), "ColumnPermutation: matrix width does not match permutation size");
}

Mask ColumnPermutation::apply(const Mask& m) const
{
    check_width(m.cols());
    Mask out(m.rows(), m.cols());
    for (int i = 0; i < size(); ++i) {
        out.col(i) = m.col(forward_[i]);
    }
    return out;
}

std::vector<std::size_t> SampleSet::indices(Split which) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < split.size(); ++i) {
        if (split[i] == which) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<Split> time_ordered_split(std::size_t n, double train_fraction)
{
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    std::vector<Split> tags(n, Split::Val);
    std::fill_n(tags.begin(), std::min(n_train, n), Split::Train);
    return tags;
}

SampleSet build_sample_set(const SstSeries& anomalies, std::span<const double> index)
{
    require(index.size() == anomalies.months.size(), "build_sample_set: index length differs from month count");
    SampleSet set;
    set.valid_mask = anomalies.grid.valid_mask;
    for (int i = 0; i < anomalies.month_count(); ++i) {
        const EnsoClass label = classify_index(index[i]);
        if (label == EnsoClass::Neutral) {
            continue;
        }
        LabeledSample s;
        s.field = anomalies.months[i].cwiseMax(-kAnomalyClip).cwiseMin(kAnomalyClip);
        // cwiseMax/Min may turn NaN into a bound; restore missing values.
        for (Eigen::Index r = 0; r < s.field.rows(); ++r) {
            for (Eigen::Index c = 0; c < s.field.cols(); ++c) {
                if (!std::isfinite(anomalies.months[i](r, c))) {
                    s.field(r, c) = std::numeric_limits<float>::quiet_NaN();
                }
            }
        }
        s.index = index[i];
        s.label = label;
        s.month_id = anomalies.month_id(i);
        set.samples.push_back(std::move(s));
    }
    set.split = time_ordered_split(set.samples.size());
    return set;
}

namespace {

double scale_cell(float raw)
{
    if (!std::isfinite(raw)) {
        return 0.0;
    }
    const float clipped = std::clamp(raw, -kAnomalyClip, kAnomalyClip);
    return static_cast<double>(clipped) / static_cast<double>(kAnomalyClip);
}

}  // namespace

Matrix preprocess_for_esn(const LabeledSample& sample)
{
    const Eigen::Index rows = sample.field.rows();
    const Eigen::Index cols = sample.field.cols();
    Matrix out(rows, cols + 1);
    out.col(0).setOnes();
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            out(r, c + 1) = scale_cell(sample.field(r, c));
        }
    }
    return out;
}

Vector preprocess_for_baseline(const LabeledSample& sample, const Mask& valid_mask)
{
    require(valid_mask.rows() == sample.field.rows() && valid_mask.cols() == sample.field.cols(),
            "preprocess_for_baseline: mask shape differs from field");
    Vector out(valid_mask.count());
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < valid_mask.rows(); ++r) {
        for (Eigen::Index c = 0; c < valid_mask.cols(); ++c) {
            if (valid_mask(r, c)) {
                out(k++) = scale_cell(sample.field(r, c));
            }
        }
    }
    return out;
}

Matrix reinsert_masked(const Vector& values, const Mask& valid_mask)
{
    require(values.size() == valid_mask.count(), "reinsert_masked: value count differs from valid cell count");
    Matrix out = Matrix::Zero(valid_mask.rows(), valid_mask.cols());
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < valid_mask.rows(); ++r) {
        for (Eigen::Index c = 0; c < valid_mask.cols(); ++c) {
            if (valid_mask(r, c)) {
                out(r, c) = values(k++);
            }
        }
    }
    return out;
}

SampleSet permute_columns(const SampleSet& set, std::uint64_t seed)
{
    if (set.permutation) {
        throw PreconditionError("permute_columns: sample set is already permuted");
    }
    ColumnPermutation perm = ColumnPermutation::random(static_cast<int>(set.cols()), seed);
    SampleSet out;
    out.split = set.split;
    out.valid_mask = perm.apply(set.valid_mask);
    out.samples.reserve(set.samples.size());
    for (const LabeledSample& s : set.samples) {
        LabeledSample p = s;
        p.field = perm.apply(s.field);
        out.samples.push_back(std::move(p));
    }
    out.permutation = std::move(perm);
    return out;
}

Matrix inverse_permute(const SampleSet& set, const Matrix& field_or_map)
{
    if (!set.permutation) {
        throw PreconditionError("inverse_permute: sample set carries no permutation");
    }
    return set.permutation->restore(field_or_map);
}

RelevanceMap inverse_permute(const SampleSet& set, const RelevanceMap& map)
{
    RelevanceMap out = map;
    out.scores = inverse_permute(set, map.scores);
    return out;
}

}  // namespace esn
