#include "esn/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace esn {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::trunc)
{
    std::ofstream out(path, mode);
    if (!out) {
        throw DataError(path.string() + ": cannot open for writing");
    }
    return out;
}

}  // namespace

std::string format_number(double v)
{
    if (!std::isfinite(v)) {
        throw NumericError("refusing to write non-finite value to CSV");
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);  // no "-0"
    return buf;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m)
{
    std::ofstream out = open_out(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) {
                out << ',';
            }
            out << format_number(m(i, j));
        }
        out << '\n';
    }
}

Matrix read_matrix_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError(path.string() + ": cannot open");
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(std::stod(cell));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw DataError(path.string() + ": ragged CSV row " + std::to_string(rows.size() + 1));
        }
        rows.push_back(std::move(row));
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

std::vector<unsigned char> heatmap_pixels(const Matrix& m)
{
    require(m.allFinite(), "heatmap: non-finite values");
    const double peak = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
    std::vector<unsigned char> pixels;
    pixels.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (peak == 0.0) {
                pixels.push_back(128);
                continue;
            }
            const double level = std::round((m(i, j) + peak) / (2.0 * peak) * 255.0);
            pixels.push_back(static_cast<unsigned char>(std::clamp(level, 0.0, 255.0)));
        }
    }
    return pixels;
}

void write_pgm_heatmap(const std::filesystem::path& path, const Matrix& m)
{
    const std::vector<unsigned char> pixels = heatmap_pixels(m);
    std::ofstream out = open_out(path, std::ios::binary | std::ios::trunc);
    out << "P5\n" << m.cols() << ' ' << m.rows() << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

void write_sample_set_csv(const std::filesystem::path& path, const SampleSet& set)
{
    std::ofstream out = open_out(path);
    out << "month_id,index,label,split\n";
    for (std::size_t i = 0; i < set.samples.size(); ++i) {
        const LabeledSample& s = set.samples[i];
        out << s.month_id << ',' << format_number(s.index) << ',' << to_string(s.label) << ','
            << (set.split[i] == Split::Train ? "train" : "val") << '\n';
    }
}

void write_index_csv(const std::filesystem::path& path, const SstSeries& series, const std::vector<double>& index)
{
    require(index.size() == series.months.size(), "write_index_csv: index length differs from month count");
    std::ofstream out = open_out(path);
    out << "month_id,year,month,index,label\n";
    for (int i = 0; i < series.month_count(); ++i) {
        out << series.month_id(i) << ',' << series.start_year + i / 12 << ',' << i % 12 + 1 << ','
            << format_number(index[i]) << ',' << to_string(classify_index(index[i])) << '\n';
    }
}

}  // namespace esn
