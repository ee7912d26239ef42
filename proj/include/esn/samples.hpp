#pragma once

#include "esn/lrp.hpp"
#include "esn/sst.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace esn {

inline constexpr float kAnomalyClip = 5.0f;

struct LabeledSample {
    Field field;  // clipped anomaly, NaN over invalid cells
    double index = 0.0;
    EnsoClass label = EnsoClass::Neutral;
    int month_id = 0;
};

enum class Split { Train, Val };

/// Reversible reordering of field columns: permuted.col(i) = original.col(forward[i]).
class ColumnPermutation {
public:
    explicit ColumnPermutation(std::vector<int> forward);
    static ColumnPermutation random(int columns, std::uint64_t seed);

    const std::vector<int>& forward() const noexcept { return forward_; }
    const std::vector<int>& inverse() const noexcept { return inverse_; }
    int size() const noexcept { return static_cast<int>(forward_.size()); }

    template <typename Derived>
    auto apply(const Eigen::MatrixBase<Derived>& m) const
    {
        typename Derived::PlainObject out(m.rows(), m.cols());
        check_width(m.cols());
        for (int i = 0; i < size(); ++i) {
            out.col(i) = m.col(forward_[i]);
        }
        return out;
    }

    template <typename Derived>
    auto restore(const Eigen::MatrixBase<Derived>& m) const
    {
        typename Derived::PlainObject out(m.rows(), m.cols());
        check_width(m.cols());
        for (int i = 0; i < size(); ++i) {
            out.col(forward_[i]) = m.col(i);
        }
        return out;
    }

    Mask apply(const Mask& m) const;

private:
    void check_width(Eigen::Index cols) const;

    std::vector<int> forward_;
    std::vector<int> inverse_;
};

/// Labeled non-neutral samples in time order with their train/val tags.
struct SampleSet {
    std::vector<LabeledSample> samples;
    std::vector<Split> split;
    Mask valid_mask;
    std::optional<ColumnPermutation> permutation;

    std::size_t size() const noexcept { return samples.size(); }
    std::vector<std::size_t> indices(Split which) const;
    Eigen::Index rows() const { return valid_mask.rows(); }
    Eigen::Index cols() const { return valid_mask.cols(); }
};

/// First floor(0.8 n) samples train, the rest validation.
std::vector<Split> time_ordered_split(std::size_t n, double train_fraction = 0.8);

/// Clips anomalies to [-5, 5], labels each month by its index and keeps the
/// non-neutral ones.
SampleSet build_sample_set(const SstSeries& anomalies, std::span<const double> index);

/// Clip to [-5, 5], divide by 5, zero invalid cells, prepend a ones column.
/// Result is D x (T+1).
Matrix preprocess_for_esn(const LabeledSample& sample);

/// Same scaling, valid cells only, row-major mask order.
Vector preprocess_for_baseline(const LabeledSample& sample, const Mask& valid_mask);

/// Scatters a baseline vector back onto the grid; invalid cells become 0.
Matrix reinsert_masked(const Vector& values, const Mask& valid_mask);

/// Permutes the columns of every field (and the mask) with a seeded
/// bijection and records it. The dummy column is added later by
/// preprocess_for_esn, so it never moves.
SampleSet permute_columns(const SampleSet& set, std::uint64_t seed);

/// Restores original column order using the set's stored permutation.
Matrix inverse_permute(const SampleSet& set, const Matrix& field_or_map);
RelevanceMap inverse_permute(const SampleSet& set, const RelevanceMap& map);

}  // namespace esn
