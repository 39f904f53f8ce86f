#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ccmkit {

/// A named, time-indexed numeric series. `time_index` holds ordinals:
/// integer steps, or days since 1970-01-01 for date-stamped data.
struct TimeSeries {
    std::string name;
    std::vector<double> values;
    std::vector<double> time_index;

    std::size_t length() const noexcept { return values.size(); }

    /// Series on the integer time axis 1..n.
    static TimeSeries from_values(std::string name, std::vector<double> values);

    /// Same name and time axis, new values (lengths must match).
    TimeSeries with_values(std::vector<double> new_values) const;
};

/// Aligned series sharing one time axis. Immutable after construction.
class MultivariateDataset {
public:
    MultivariateDataset() = default;

    /// Validates alignment, unique non-empty names and a strictly increasing
    /// time axis. `time_labels` are the textual time cells written back out.
    MultivariateDataset(std::string time_column, std::vector<std::string> time_labels,
                        std::vector<double> time_index, std::vector<TimeSeries> series,
                        std::string provenance = {});

    /// Convenience for generated data: integer axis 1..n under column "t".
    static MultivariateDataset from_columns(std::vector<std::string> names,
                                            std::vector<std::vector<double>> columns,
                                            std::string provenance = {});

    std::size_t rows() const noexcept { return time_index_.size(); }
    std::size_t series_count() const noexcept { return series_.size(); }
    const std::string& time_column() const noexcept { return time_column_; }
    const std::vector<std::string>& time_labels() const noexcept { return time_labels_; }
    const std::vector<double>& time_index() const noexcept { return time_index_; }
    const std::vector<TimeSeries>& series() const noexcept { return series_; }
    const std::string& provenance() const noexcept { return provenance_; }
    std::vector<std::string> names() const;

    /// Exact, case-sensitive lookup. Unknown names raise an error listing the
    /// available ones.
    const TimeSeries& column(std::string_view name) const;
    std::size_t column_index(std::string_view name) const;

    /// Copy with the series replaced (same names and time axis required).
    MultivariateDataset with_series(std::vector<TimeSeries> series, std::string provenance) const;

private:
    std::string time_column_;
    std::vector<std::string> time_labels_;
    std::vector<double> time_index_;
    std::vector<TimeSeries> series_;
    std::string provenance_;
};

struct DroppedRow {
    std::size_t row = 0; // 1-based data-row number (the header is not counted)
    std::string reason;
};

struct LoadReport {
    std::size_t raw_rows = 0;
    std::vector<DroppedRow> dropped;
    std::vector<std::string> warnings;
};

/// Reads an RFC-4180 CSV. Rows with any missing or unparseable selected cell
/// are dropped whole and recorded in `report`. An empty `time_column` selects
/// the first header column; an empty `select` keeps every other column.
MultivariateDataset load_csv(const std::filesystem::path& path, std::string_view time_column = {},
                             const std::vector<std::string>& select = {},
                             LoadReport* report = nullptr);

void write_csv(const MultivariateDataset& dataset, const std::filesystem::path& path);

/// Quotes a field when it contains separators, quotes, line breaks or
/// surrounding whitespace.
std::string csv_escape(std::string_view field);

/// Splits CSV text into records of fields.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

} // namespace ccmkit
