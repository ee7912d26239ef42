#pragma once

#include "esn/samples.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace esn {

/// Nine significant digits, locale-independent.
std::string format_number(double v);

/// One CSV line per matrix row, no header.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Binary 8-bit PGM (P5), one pixel per matrix entry, rows top to bottom.
/// Values map linearly from [-max|m|, +max|m|] onto [0, 255]; an all-zero
/// matrix renders as uniform 128.
std::vector<unsigned char> heatmap_pixels(const Matrix& m);
void write_pgm_heatmap(const std::filesystem::path& path, const Matrix& m);

/// month_id,index,label,split
void write_sample_set_csv(const std::filesystem::path& path, const SampleSet& set);

/// month_id,year,month,index,label
void write_index_csv(const std::filesystem::path& path, const SstSeries& series, const std::vector<double>& index);

}  // namespace esn
