#include "zenit/timeseries.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "zenit/errors.hpp"

namespace zenit {

std::string to_string(SeriesUnit unit) {
    switch (unit) {
    case SeriesUnit::kWhPerHour: return "kWh/h";
    case SeriesUnit::EurPerKWh: return "EUR/kWh";
    case SeriesUnit::Celsius: return "degC";
    case SeriesUnit::kWhPerM2: return "kWh/m2";
    case SeriesUnit::MW: return "MW";
    case SeriesUnit::Dimensionless: return "1";
    }
    return "?";
}

SeriesUnit parse_series_unit(const std::string& text) {
    if (text == "kWh/h") return SeriesUnit::kWhPerHour;
    if (text == "EUR/kWh") return SeriesUnit::EurPerKWh;
    if (text == "degC" || text == "C") return SeriesUnit::Celsius;
    if (text == "kWh/m2") return SeriesUnit::kWhPerM2;
    if (text == "MW") return SeriesUnit::MW;
    if (text == "1" || text == "dimensionless") return SeriesUnit::Dimensionless;
    throw ZenError("BadUnit", "unknown series unit '" + text + "'");
}

void TimeSeriesSet::add(Series series) {
    auto it = series_.find(series.id);
    if (it != series_.end() && it->second.unit != series.unit)
        throw ZenError("BadUnit", "series '" + series.id + "' re-declared with unit " +
                                      to_string(series.unit) + " (was " + to_string(it->second.unit) + ")");
    if (horizon_ == 0 && series_.empty())
        horizon_ = series.values.size();
    if (series.values.size() != horizon_)
        throw ZenError("HorizonMismatch", "series '" + series.id + "' has " +
                                              std::to_string(series.values.size()) + " points, set horizon is " +
                                              std::to_string(horizon_));
    series_[series.id] = std::move(series);
}

const Series& TimeSeriesSet::at(const std::string& id) const {
    auto it = series_.find(id);
    if (it == series_.end()) throw ZenError("MissingSeries", id);
    return it->second;
}

int hour_of_day(int t) {
    if (t < 0) throw ZenError("BadUnit", "negative hour index " + std::to_string(t));
    return t % kHoursPerDay;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    return out;
}

bool nonnegative_unit(SeriesUnit unit) {
    return unit == SeriesUnit::kWhPerHour || unit == SeriesUnit::kWhPerM2 || unit == SeriesUnit::MW;
}

} // namespace

TimeSeriesSet load_series_csv(const std::filesystem::path& path, const SeriesManifest& manifest) {
    std::ifstream in(path);
    if (!in) throw ZenError("MissingSeries", "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ZenError("HorizonMismatch", "empty file " + path.string());
    const auto header = split_csv_line(line);

    std::map<std::string, std::size_t> column_index;
    for (std::size_t i = 0; i < header.size(); ++i) column_index[header[i]] = i;

    struct Target {
        std::string id;
        SeriesUnit unit;
        std::size_t column;
    };
    std::vector<Target> targets;
    for (const auto& [id, col] : manifest) {
        auto it = column_index.find(col.column);
        if (it == column_index.end())
            throw ZenError("MissingColumn", col.column + " (series '" + id + "') in " + path.string());
        targets.push_back({id, col.unit, it->second});
    }

    std::vector<std::vector<double>> columns(targets.size());
    for (auto& c : columns) c.reserve(kHoursPerYear);

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        for (std::size_t k = 0; k < targets.size(); ++k) {
            const auto& target = targets[k];
            if (target.column >= fields.size())
                throw ZenError("UnparseableValue",
                               "row " + std::to_string(row + 1) + " is missing column " + std::to_string(target.column));
            const std::string& text = fields[target.column];
            errno = 0;
            char* end = nullptr;
            double value = std::strtod(text.c_str(), &end);
            if (end == text.c_str() || *end != '\0' || errno == ERANGE)
                throw ZenError("UnparseableValue", "row " + std::to_string(row + 1) + ", column '" +
                                                       header[target.column] + "': '" + text + "'");
            if (value < 0.0 && nonnegative_unit(target.unit))
                throw ZenError("NegativeLoad", "series '" + target.id + "', row " + std::to_string(row + 1));
            columns[k].push_back(value);
        }
        ++row;
    }
    if (row != kHoursPerYear)
        throw ZenError("HorizonMismatch", std::to_string(row) + " data rows in " + path.string() +
                                              ", expected " + std::to_string(kHoursPerYear));

    TimeSeriesSet set;
    for (std::size_t k = 0; k < targets.size(); ++k)
        set.add({targets[k].id, targets[k].unit, std::move(columns[k])});
    return set;
}

void write_series_csv(const TimeSeriesSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ZenError("IoError", "cannot write " + path.string());

    bool first = true;
    for (const auto& [id, s] : set.all()) {
        out << (first ? "" : ",") << id;
        first = false;
    }
    out << "\n";

    char buf[40];
    for (std::size_t t = 0; t < set.horizon(); ++t) {
        first = true;
        for (const auto& [id, s] : set.all()) {
            // %.17g round-trips an IEEE double exactly
            std::snprintf(buf, sizeof buf, "%.17g", s.values[t]);
            out << (first ? "" : ",") << buf;
            first = false;
        }
        out << "\n";
    }
}

} // namespace zenit
