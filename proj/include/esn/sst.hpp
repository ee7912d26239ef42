#pragma once

#include "esn/common.hpp"
#include "esn/readout.hpp"

#include <filesystem>
#include <vector>

namespace esn {

using Field = Eigen::MatrixXf;  // n_lat x n_lon, NaN marks missing values
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr int kStandardLat = 89;
inline constexpr int kStandardLon = 180;
inline constexpr int kMonthIdEpoch = 1880;

/// Cell-centered latitude/longitude grid. Longitudes use the 0..360 east convention.
struct GridSpec {
    std::vector<double> lat_centers;  // ascending, degrees north
    std::vector<double> lon_centers;  // ascending, degrees east
    Mask valid_mask;                  // false over land / never-observed cells

    int n_lat() const { return static_cast<int>(lat_centers.size()); }
    int n_lon() const { return static_cast<int>(lon_centers.size()); }
    Eigen::Index valid_count() const { return valid_mask.count(); }

    /// The 2-degree global grid: lat -88..88, lon 0..358, everything valid.
    static GridSpec standard();
    /// Regular grid with explicit origin and spacing (all cells valid).
    static GridSpec regular(int n_lat, int n_lon, double lat0, double lon0, double step);
};

/// Monthly fields starting in January of start_year.
struct SstSeries {
    GridSpec grid;
    int start_year = kMonthIdEpoch;
    std::vector<Field> months;

    int month_count() const { return static_cast<int>(months.size()); }
    /// Months since January 1880 for the i-th field.
    int month_id(int i) const { return (start_year - kMonthIdEpoch) * 12 + i; }
};

/// Reads an "SSTG" container (little-endian):
///   bytes 0..3   magic "SSTG"
///   bytes 4..19  u32 n_lat, u32 n_lon, u32 n_months, u32 start_year
///   then n_months row-major float32 grids, NaN = missing.
/// The grid must be the standard 89 x 180 one. A cell is valid when it holds a
/// finite value in at least one month.
SstSeries load_sst(const std::filesystem::path& path);

/// Reads any grid shape; the geometry is a 2-degree grid anchored like the
/// standard one. Used by load_sst and by tests.
SstSeries read_sst_container(const std::filesystem::path& path, bool require_standard_grid);

void write_sst(const std::filesystem::path& path, const SstSeries& series);

/// Recomputes valid_mask from the data (finite in any month).
void refresh_valid_mask(SstSeries& series);

struct ReferencePeriod {
    int first_year = 1980;
    int last_year = 2009;
};

/// Subtracts the per-cell, per-calendar-month mean over the reference years.
SstSeries compute_anomalies(const SstSeries& fields, ReferencePeriod ref = {});

struct LatLonBox {
    double lat_min, lat_max, lon_min, lon_max;  // closed interval on cell centers

    bool contains(double lat, double lon) const
    {
        return lat >= lat_min && lat <= lat_max && lon >= lon_min && lon <= lon_max;
    }
};

/// 5S-5N, 170W-120W in the 0..360 convention.
inline constexpr LatLonBox kNino34Box{-5.0, 5.0, 190.0, 240.0};

/// Unweighted box-mean anomaly per month, divided by the population standard
/// deviation of that series over the reference period.
std::vector<double> nino34_index(const SstSeries& anomalies, ReferencePeriod ref = {}, LatLonBox box = kNino34Box);

/// >= 0.5 El Nino, <= -0.5 La Nina, otherwise neutral.
EnsoClass classify_index(double index);

}  // namespace esn
