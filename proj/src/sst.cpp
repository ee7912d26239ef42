#include "esn/sst.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace esn {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'S', 'T', 'G'};
constexpr std::size_t kPreamble = 20;

std::uint32_t read_u32le(const unsigned char* p)
{
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32le(std::ostream& out, std::uint32_t v)
{
    const std::array<char, 4> bytes{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                    static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes.data(), bytes.size());
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what)
{
    throw DataError(path.string() + ": " + what);
}

}  // namespace

GridSpec GridSpec::standard()
{
    return regular(kStandardLat, kStandardLon, -88.0, 0.0, 2.0);
}

GridSpec GridSpec::regular(int n_lat, int n_lon, double lat0, double lon0, double step)
{
    GridSpec g;
    g.lat_centers.resize(n_lat);
    g.lon_centers.resize(n_lon);
    for (int i = 0; i < n_lat; ++i) {
        g.lat_centers[i] = lat0 + step * i;
    }
    for (int j = 0; j < n_lon; ++j) {
        g.lon_centers[j] = lon0 + step * j;
    }
    g.valid_mask = Mask::Constant(n_lat, n_lon, true);
    return g;
}

void refresh_valid_mask(SstSeries& series)
{
    Mask mask = Mask::Constant(series.grid.n_lat(), series.grid.n_lon(), false);
    for (const Field& f : series.months) {
        mask = mask.array() || f.array().isFinite();
    }
    series.grid.valid_mask = std::move(mask);
}

SstSeries read_sst_container(const std::filesystem::path& path, bool require_standard_grid)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(path, "cannot open file");
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < kMagic.size() || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
        fail(path, "malformed header: missing \"SSTG\" magic at byte offset 0");
    }
    if (bytes.size() < kPreamble) {
        std::ostringstream msg;
        msg << "malformed header: file ends at byte offset " << bytes.size() << ", header needs " << kPreamble
            << " bytes";
        fail(path, msg.str());
    }
    const std::uint32_t n_lat = read_u32le(&bytes[4]);
    const std::uint32_t n_lon = read_u32le(&bytes[8]);
    const std::uint32_t n_months = read_u32le(&bytes[12]);
    const std::uint32_t start_year = read_u32le(&bytes[16]);
    if (n_lat == 0 || n_lon == 0 || n_months == 0) {
        fail(path, "malformed header: zero grid dimension or month count (byte offsets 4..15)");
    }
    if (start_year > 9999) {
        fail(path, "malformed header: implausible start year at byte offset 16");
    }
    if (require_standard_grid && (n_lat != kStandardLat || n_lon != kStandardLon)) {
        std::ostringstream msg;
        msg << "wrong grid shape " << n_lat << "x" << n_lon << " (expected " << kStandardLat << "x" << kStandardLon
            << ")";
        fail(path, msg.str());
    }

    const std::uint64_t cells = std::uint64_t{n_lat} * n_lon;
    const std::uint64_t expected = kPreamble + std::uint64_t{n_months} * cells * 4;
    if (bytes.size() < expected) {
        const std::uint64_t payload = bytes.size() - kPreamble;
        const std::uint64_t month = payload / (cells * 4);
        std::ostringstream msg;
        msg << "truncated payload: file ends at byte offset " << bytes.size() << " inside month " << month << " of "
            << n_months << " (expected " << expected << " bytes)";
        fail(path, msg.str());
    }
    if (bytes.size() > expected) {
        std::ostringstream msg;
        msg << "month count mismatch: " << (bytes.size() - expected) << " trailing bytes after byte offset "
            << expected << " (header declares " << n_months << " months)";
        fail(path, msg.str());
    }

    SstSeries series;
    series.grid = GridSpec::regular(static_cast<int>(n_lat), static_cast<int>(n_lon), -88.0, 0.0, 2.0);
    series.start_year = static_cast<int>(start_year);
    series.months.reserve(n_months);
    std::size_t offset = kPreamble;
    for (std::uint32_t m = 0; m < n_months; ++m) {
        Field f(n_lat, n_lon);
        for (std::uint32_t i = 0; i < n_lat; ++i) {
            for (std::uint32_t j = 0; j < n_lon; ++j) {
                f(i, j) = std::bit_cast<float>(read_u32le(&bytes[offset]));
                offset += 4;
            }
        }
        series.months.push_back(std::move(f));
    }
    refresh_valid_mask(series);
    return series;
}

SstSeries load_sst(const std::filesystem::path& path)
{
    return read_sst_container(path, true);
}

void write_sst(const std::filesystem::path& path, const SstSeries& series)
{
    require(!series.months.empty(), "write_sst: no months to write");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError(path.string() + ": cannot open for writing");
    }
    out.write(kMagic.data(), kMagic.size());
    write_u32le(out, static_cast<std::uint32_t>(series.grid.n_lat()));
    write_u32le(out, static_cast<std::uint32_t>(series.grid.n_lon()));
    write_u32le(out, static_cast<std::uint32_t>(series.months.size()));
    write_u32le(out, static_cast<std::uint32_t>(series.start_year));
    for (const Field& f : series.months) {
        require(f.rows() == series.grid.n_lat() && f.cols() == series.grid.n_lon(), "write_sst: field shape mismatch");
        for (Eigen::Index i = 0; i < f.rows(); ++i) {
            for (Eigen::Index j = 0; j < f.cols(); ++j) {
                write_u32le(out, std::bit_cast<std::uint32_t>(f(i, j)));
            }
        }
    }
    if (!out) {
        throw DataError(path.string() + ": write failed");
    }
}

namespace {

void require_period(const SstSeries& s, ReferencePeriod ref)
{
    const int last_full_year = s.start_year + s.month_count() / 12 - 1;
    if (ref.first_year > ref.last_year || ref.first_year < s.start_year || ref.last_year > last_full_year) {
        std::ostringstream msg;
        msg << "reference period " << ref.first_year << ".." << ref.last_year << " is not inside the data span "
            << s.start_year << ".." << last_full_year;
        throw PreconditionError(msg.str());
    }
}

}  // namespace

SstSeries compute_anomalies(const SstSeries& fields, ReferencePeriod ref)
{
    require_period(fields, ref);
    const int rows = fields.grid.n_lat();
    const int cols = fields.grid.n_lon();

    std::array<Eigen::MatrixXd, 12> sum;
    std::array<Eigen::MatrixXi, 12> count;
    for (int m = 0; m < 12; ++m) {
        sum[m] = Eigen::MatrixXd::Zero(rows, cols);
        count[m] = Eigen::MatrixXi::Zero(rows, cols);
    }
    const int first = (ref.first_year - fields.start_year) * 12;
    const int last = (ref.last_year - fields.start_year + 1) * 12;
    for (int i = first; i < last; ++i) {
        const Field& f = fields.months[i];
        const int cal = i % 12;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                if (std::isfinite(f(r, c))) {
                    sum[cal](r, c) += f(r, c);
                    ++count[cal](r, c);
                }
            }
        }
    }

    std::array<Eigen::MatrixXd, 12> climatology;
    for (int m = 0; m < 12; ++m) {
        climatology[m] = Eigen::MatrixXd(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                climatology[m](r, c) = count[m](r, c) > 0 ? sum[m](r, c) / count[m](r, c)
                                                          : std::numeric_limits<double>::quiet_NaN();
            }
        }
    }

    SstSeries out;
    out.grid = fields.grid;
    out.start_year = fields.start_year;
    out.months.reserve(fields.months.size());
    for (int i = 0; i < fields.month_count(); ++i) {
        const Field& f = fields.months[i];
        const Eigen::MatrixXd& clim = climatology[i % 12];
        Field a(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                a(r, c) = static_cast<float>(static_cast<double>(f(r, c)) - clim(r, c));
            }
        }
        out.months.push_back(std::move(a));
    }
    return out;
}

std::vector<double> nino34_index(const SstSeries& anomalies, ReferencePeriod ref, LatLonBox box)
{
    require_period(anomalies, ref);
    const GridSpec& g = anomalies.grid;
    std::vector<std::pair<int, int>> cells;
    for (int r = 0; r < g.n_lat(); ++r) {
        for (int c = 0; c < g.n_lon(); ++c) {
            if (g.valid_mask(r, c) && box.contains(g.lat_centers[r], g.lon_centers[c])) {
                cells.emplace_back(r, c);
            }
        }
    }
    if (cells.empty()) {
        throw DataError("nino34_index: no valid grid cells inside the index region");
    }

    std::vector<double> regional(anomalies.months.size());
    for (std::size_t i = 0; i < anomalies.months.size(); ++i) {
        double sum = 0.0;
        int n = 0;
        for (const auto& [r, c] : cells) {
            const float v = anomalies.months[i](r, c);
            if (std::isfinite(v)) {
                sum += v;
                ++n;
            }
        }
        if (n == 0) {
            throw DataError("nino34_index: index region has no data in month " + std::to_string(i));
        }
        regional[i] = sum / n;
    }

    const int first = (ref.first_year - anomalies.start_year) * 12;
    const int last = (ref.last_year - anomalies.start_year + 1) * 12;
    double mean = 0.0;
    for (int i = first; i < last; ++i) {
        mean += regional[i];
    }
    mean /= (last - first);
    double var = 0.0;
    for (int i = first; i < last; ++i) {
        var += (regional[i] - mean) * (regional[i] - mean);
    }
    const double sd = std::sqrt(var / (last - first));
    if (!(sd > 0.0)) {
        throw NumericError("nino34_index: zero variability over the reference period");
    }
    for (double& v : regional) {
        v /= sd;
    }
    return regional;
}

EnsoClass classify_index(double index)
{
    if (index >= 0.5) {
        return EnsoClass::ElNino;
    }
    if (index <= -0.5) {
        return EnsoClass::LaNina;
    }
    return EnsoClass::Neutral;
}

}  // namespace esn
