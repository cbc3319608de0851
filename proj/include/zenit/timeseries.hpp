#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace zenit {

constexpr int kHoursPerYear = 8760;
constexpr int kHoursPerDay = 24;

enum class SeriesUnit {
    kWhPerHour,   // loads, flows
    EurPerKWh,    // prices
    Celsius,      // temperatures
    kWhPerM2,     // insolation (used as a per-kW capacity factor)
    MW,           // regional load
    Dimensionless // COP profiles
};

std::string to_string(SeriesUnit unit);
SeriesUnit parse_series_unit(const std::string& text);

struct Series {
    std::string id;
    SeriesUnit unit = SeriesUnit::kWhPerHour;
    std::vector<double> values;
};

/// Named hourly series over one representative year. All members share one
/// horizon; loads and insolation are non-negative, prices may be negative.
class TimeSeriesSet {
public:
    void add(Series series);

    bool has(const std::string& id) const { return series_.count(id) > 0; }
    const Series& at(const std::string& id) const;
    const std::vector<double>& values(const std::string& id) const { return at(id).values; }

    std::size_t horizon() const { return horizon_; }
    std::size_t size() const { return series_.size(); }
    const std::map<std::string, Series>& all() const { return series_; }

private:
    std::map<std::string, Series> series_;
    std::size_t horizon_ = 0;
};

struct SeriesColumn {
    std::string column; // header name in the CSV
    SeriesUnit unit = SeriesUnit::kWhPerHour;
};

using SeriesManifest = std::map<std::string, SeriesColumn>; // series id -> column

/// Reads a comma-separated file with a header row; exactly 8760 data rows.
TimeSeriesSet load_series_csv(const std::filesystem::path& path, const SeriesManifest& manifest);

/// Writes all series, one column each, with round-trip-exact formatting.
void write_series_csv(const TimeSeriesSet& set, const std::filesystem::path& path);

int hour_of_day(int t);

} // namespace zenit
