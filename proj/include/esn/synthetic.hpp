#pragma once

#include "esn/samples.hpp"

#include <cstdint>

namespace esn {

/// Half-open index box [row_begin, row_end) x [col_begin, col_end).
struct GridBox {
    Eigen::Index row_begin = 0, row_end = 0, col_begin = 0, col_end = 0;

    bool contains(Eigen::Index r, Eigen::Index c) const
    {
        return r >= row_begin && r < row_end && c >= col_begin && c < col_end;
    }
    Eigen::Index area() const { return (row_end - row_begin) * (col_end - col_begin); }
};

struct SyntheticOptions {
    double noise_std = 0.5;       // std of the correlated noise, degC-like units
    double peak_per_unit = 2.0;   // blob peak per unit of amplitude
    double amplitude_min = 0.5;   // |amplitude| drawn uniformly from [min, max]
    double amplitude_max = 2.0;
};

struct SyntheticTask {
    SampleSet set;
    GridBox box;  // where the signal lives
};

/// The fixed signal box for a d x t grid: the middle quarter of the rows and
/// columns [0.45 t, 0.65 t), i.e. a zonal band well before the last column.
GridBox synthetic_box(Eigen::Index d, Eigen::Index t);

/// Two-class stand-in for the SST task. Each sample is
///   field = peak_per_unit * a * blob + noise,   target = a,
/// where a = +-U(amplitude_min, amplitude_max) with a random sign, blob is a
/// unit-peak Gaussian truncated to synthetic_box(d, t) (sigma = a quarter of
/// the box extent per axis), and noise is white Gaussian noise smoothed by two
/// passes of a 3x3 box filter and rescaled to noise_std. Fields are clipped to
/// [-5, 5]; every cell is valid; the split is time-ordered 80/20.
SyntheticTask synthesize_task(int n_samples, int d, int t, std::uint64_t seed, const SyntheticOptions& options = {});

/// Share of |map| mass inside `box` divided by the box's areal fraction.
double box_mass_ratio(const Matrix& map, const GridBox& box);

}  // namespace esn
