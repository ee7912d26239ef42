#include "esn/synthetic.hpp"

#include "esn/rng.hpp"

#include <algorithm>
#include <cmath>

namespace esn {

GridBox synthetic_box(Eigen::Index d, Eigen::Index t)
{
    GridBox box;
    box.row_begin = (3 * d) / 8;
    box.row_end = std::max(box.row_begin + 1, (5 * d + 7) / 8);
    box.col_begin = (45 * t) / 100;
    box.col_end = std::max(box.col_begin + 1, (65 * t) / 100);
    return box;
}

namespace {

Matrix box_smooth(const Matrix& in)
{
    const Eigen::Index rows = in.rows();
    const Eigen::Index cols = in.cols();
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            double sum = 0.0;
            for (Eigen::Index dr = -1; dr <= 1; ++dr) {
                for (Eigen::Index dc = -1; dc <= 1; ++dc) {
                    const Eigen::Index rr = std::clamp<Eigen::Index>(r + dr, 0, rows - 1);
                    const Eigen::Index cc = std::clamp<Eigen::Index>(c + dc, 0, cols - 1);
                    sum += in(rr, cc);
                }
            }
            out(r, c) = sum / 9.0;
        }
    }
    return out;
}

}  // namespace

SyntheticTask synthesize_task(int n_samples, int d, int t, std::uint64_t seed, const SyntheticOptions& options)
{
    require(d >= 8 && t >= 8, "synthesize_task: d and t must be at least 8");
    require(n_samples >= 2, "synthesize_task: need at least two samples");
    require(options.noise_std >= 0.0 && options.amplitude_min >= 0.5 &&
                options.amplitude_max >= options.amplitude_min,
            "synthesize_task: invalid options (amplitudes must be >= 0.5 to stay non-neutral)");

    SyntheticTask task;
    task.box = synthetic_box(d, t);
    const GridBox& box = task.box;
    const double row_center = 0.5 * static_cast<double>(box.row_begin + box.row_end - 1);
    const double col_center = 0.5 * static_cast<double>(box.col_begin + box.col_end - 1);
    const double row_sigma = std::max(0.5, 0.25 * static_cast<double>(box.row_end - box.row_begin));
    const double col_sigma = std::max(0.5, 0.25 * static_cast<double>(box.col_end - box.col_begin));

    Matrix blob = Matrix::Zero(d, t);
    for (Eigen::Index r = box.row_begin; r < box.row_end; ++r) {
        for (Eigen::Index c = box.col_begin; c < box.col_end; ++c) {
            const double zr = (static_cast<double>(r) - row_center) / row_sigma;
            const double zc = (static_cast<double>(c) - col_center) / col_sigma;
            blob(r, c) = std::exp(-0.5 * (zr * zr + zc * zc));
        }
    }

    Rng rng(seed, Stream::Synthetic);
    task.set.valid_mask = Mask::Constant(d, t, true);
    task.set.samples.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double sign = rng.uniform01() < 0.5 ? 1.0 : -1.0;
        const double amplitude = sign * rng.uniform(options.amplitude_min, options.amplitude_max);

        Matrix field = options.peak_per_unit * amplitude * blob;
        if (options.noise_std > 0.0) {
            Matrix white(d, t);
            for (Eigen::Index c = 0; c < t; ++c) {
                for (Eigen::Index r = 0; r < d; ++r) {
                    white(r, c) = rng.normal();
                }
            }
            Matrix noise = box_smooth(box_smooth(white));
            const double mean = noise.mean();
            const double sd = std::sqrt((noise.array() - mean).square().mean());
            if (sd > 0.0) {
                field += noise * (options.noise_std / sd);
            }
        }

        LabeledSample s;
        s.field = field.cast<float>().cwiseMax(-kAnomalyClip).cwiseMin(kAnomalyClip);
        s.index = amplitude;
        s.label = classify_index(amplitude);
        s.month_id = i;
        task.set.samples.push_back(std::move(s));
    }
    task.set.split = time_ordered_split(task.set.samples.size());
    return task;
}

double box_mass_ratio(const Matrix& map, const GridBox& box)
{
    require(box.row_end <= map.rows() && box.col_end <= map.cols() && box.area() > 0,
            "box_mass_ratio: box outside map");
    const double total = map.cwiseAbs().sum();
    if (total == 0.0) {
        return 0.0;
    }
    const double inside =
        map.block(box.row_begin, box.col_begin, box.row_end - box.row_begin, box.col_end - box.col_begin)
            .cwiseAbs()
            .sum();
    const double area_fraction = static_cast<double>(box.area()) / static_cast<double>(map.size());
    return (inside / total) / area_fraction;
}

}  // namespace esn
