#include "ccmkit/dataset.hpp"

#include "ccmkit/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace ccmkit {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

enum class TimeKind { integer, date };

struct ParsedTime {
    TimeKind kind = TimeKind::integer;
    double ordinal = 0.0;
    // Calendar fields for the month-step uniformity check (date kind only).
    long month_index = 0;
    int day = 0;
    double seconds = 0.0;
};

// Accepts integers, YYYY-MM, YYYY-MM-DD, and YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z].
std::optional<ParsedTime> parse_time(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    long long integer = 0;
    if (parse_int(cell, integer)) return ParsedTime{TimeKind::integer, static_cast<double>(integer)};

    if (cell.size() < 7 || cell[4] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0;
    unsigned d = 1;
    if (!parse_int(cell.substr(0, 4), y) || !parse_int(cell.substr(5, 2), m)) return std::nullopt;
    std::string_view rest = cell.substr(7);
    if (!rest.empty()) {
        if (rest.size() < 3 || rest[0] != '-' || !parse_int(rest.substr(1, 2), d)) return std::nullopt;
        rest.remove_prefix(3);
    }
    double seconds = 0.0;
    if (!rest.empty()) {
        if (rest[0] != 'T' && rest[0] != ' ') return std::nullopt;
        rest.remove_prefix(1);
        if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
        int hh = 0;
        int mm = 0;
        double ss = 0.0;
        if (rest.size() < 5 || rest[2] != ':' || !parse_int(rest.substr(0, 2), hh) ||
            !parse_int(rest.substr(3, 2), mm)) {
            return std::nullopt;
        }
        if (rest.size() > 5) {
            if (rest[5] != ':') return std::nullopt;
            const auto sec = rest.substr(6);
            const auto [ptr, ec] = std::from_chars(sec.data(), sec.data() + sec.size(), ss);
            if (ec != std::errc{} || ptr != sec.data() + sec.size()) return std::nullopt;
        }
        if (hh > 23 || mm > 59 || ss < 0.0 || ss >= 61.0) return std::nullopt;
        seconds = hh * 3600.0 + mm * 60.0 + ss;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    ParsedTime t;
    t.kind = TimeKind::date;
    t.ordinal = static_cast<double>(days) + seconds / 86400.0;
    t.month_index = static_cast<long>(y) * 12 + static_cast<long>(m) - 1;
    t.day = static_cast<int>(d);
    t.seconds = seconds;
    return t;
}

bool uniformly_spaced(const std::vector<ParsedTime>& times) {
    if (times.size() < 3) return true;
    const double step = times[1].ordinal - times[0].ordinal;
    bool equal_steps = true;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double diff = times[i].ordinal - times[i - 1].ordinal;
        if (std::fabs(diff - step) > 1e-9 * std::max(1.0, std::fabs(step))) {
            equal_steps = false;
            break;
        }
    }
    if (equal_steps || times.front().kind != TimeKind::date) return equal_steps;
    // Calendar months have unequal day counts; a fixed month step on the same
    // day and time of day still counts as uniform sampling.
    const long month_step = times[1].month_index - times[0].month_index;
    if (month_step <= 0) return false;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i].month_index - times[i - 1].month_index != month_step ||
            times[i].day != times[0].day || times[i].seconds != times[0].seconds) {
            return false;
        }
    }
    return true;
}

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    return out;
}

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

TimeSeries TimeSeries::from_values(std::string name, std::vector<double> values) {
    TimeSeries s;
    s.name = std::move(name);
    s.time_index.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) s.time_index[i] = static_cast<double>(i + 1);
    s.values = std::move(values);
    return s;
}

TimeSeries TimeSeries::with_values(std::vector<double> new_values) const {
    if (new_values.size() != values.size()) {
        fail(ErrorCode::length_mismatch, "series '" + name + "': replacement length differs");
    }
    TimeSeries s;
    s.name = name;
    s.time_index = time_index;
    s.values = std::move(new_values);
    return s;
}

MultivariateDataset::MultivariateDataset(std::string time_column, std::vector<std::string> time_labels,
                                         std::vector<double> time_index, std::vector<TimeSeries> series,
                                         std::string provenance)
    : time_column_(std::move(time_column)),
      time_labels_(std::move(time_labels)),
      time_index_(std::move(time_index)),
      series_(std::move(series)),
      provenance_(std::move(provenance)) {
    if (time_labels_.size() != time_index_.size()) {
        fail(ErrorCode::length_mismatch, "dataset: time labels and time index differ in length");
    }
    for (std::size_t i = 1; i < time_index_.size(); ++i) {
        if (!(time_index_[i] > time_index_[i - 1])) {
            fail(ErrorCode::parse, "dataset: time column '" + time_column_ +
                                       "' is not strictly increasing at row " + std::to_string(i + 1));
        }
    }
    std::set<std::string> seen{time_column_};
    for (auto& s : series_) {
        if (s.name.empty()) fail(ErrorCode::invalid_argument, "dataset: empty series name");
        if (!seen.insert(s.name).second) fail(ErrorCode::invalid_argument, "dataset: duplicate name '" + s.name + "'");
        if (s.values.size() != time_index_.size()) {
            fail(ErrorCode::length_mismatch, "dataset: series '" + s.name + "' is not aligned to the time axis");
        }
        s.time_index = time_index_;
    }
}

MultivariateDataset MultivariateDataset::from_columns(std::vector<std::string> names,
                                                      std::vector<std::vector<double>> columns,
                                                      std::string provenance) {
    if (names.size() != columns.size()) fail(ErrorCode::length_mismatch, "dataset: names and columns differ");
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    std::vector<std::string> labels(n);
    std::vector<double> index(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = std::to_string(i + 1);
        index[i] = static_cast<double>(i + 1);
    }
    std::vector<TimeSeries> series;
    series.reserve(names.size());
    for (std::size_t k = 0; k < names.size(); ++k) {
        series.push_back(TimeSeries{std::move(names[k]), std::move(columns[k]), {}});
    }
    return MultivariateDataset("t", std::move(labels), std::move(index), std::move(series),
                               std::move(provenance));
}

std::vector<std::string> MultivariateDataset::names() const {
    std::vector<std::string> out;
    out.reserve(series_.size());
    for (const auto& s : series_) out.push_back(s.name);
    return out;
}

std::size_t MultivariateDataset::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < series_.size(); ++i) {
        if (series_[i].name == name) return i;
    }
    fail(ErrorCode::unknown_column, "unknown column '" + std::string(name) + "'; available: [" +
                                        join_names(names()) + "]");
}

const TimeSeries& MultivariateDataset::column(std::string_view name) const {
    return series_[column_index(name)];
}

MultivariateDataset MultivariateDataset::with_series(std::vector<TimeSeries> series,
                                                     std::string provenance) const {
    if (series.size() != series_.size()) fail(ErrorCode::invalid_argument, "dataset: series count changed");
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].name != series_[i].name) fail(ErrorCode::invalid_argument, "dataset: series order changed");
    }
    return MultivariateDataset(time_column_, time_labels_, time_index_, std::move(series), std::move(provenance));
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool line_has_content = false;
    std::size_t i = 0;
    auto end_record = [&] {
        if (line_has_content) {
            record.push_back(std::move(field));
            records.push_back(std::move(record));
        }
        record.clear();
        field.clear();
        line_has_content = false;
    };
    while (i < text.size()) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            ++i;
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            line_has_content = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            line_has_content = true;
        } else if (c == '\r' || c == '\n') {
            end_record();
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else {
            field += c;
            line_has_content = true;
        }
        ++i;
    }
    if (in_quotes) fail(ErrorCode::parse, "csv: unterminated quoted field");
    end_record();
    return records;
}

std::string csv_escape(std::string_view field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                              (!field.empty() && (field.front() == ' ' || field.back() == ' '));
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

MultivariateDataset load_csv(const std::filesystem::path& path, std::string_view time_column,
                             const std::vector<std::string>& select, LoadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    auto records = parse_csv(text);
    if (records.empty()) fail(ErrorCode::insufficient_data, "'" + path.string() + "': zero usable rows");
    const auto& header = records.front();
    if (std::all_of(header.begin(), header.end(), [](const std::string& h) { return trim(h).empty(); })) {
        fail(ErrorCode::parse, "'" + path.string() + "': missing header row");
    }

    std::size_t time_col = 0;
    if (!time_column.empty()) {
        const auto it = std::find(header.begin(), header.end(), time_column);
        if (it == header.end()) {
            fail(ErrorCode::unknown_column, "'" + path.string() + "': time column '" + std::string(time_column) +
                                                "' absent; header: [" + join_names(header) + "]");
        }
        time_col = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<std::size_t> value_cols;
    if (select.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c != time_col) value_cols.push_back(c);
        }
    } else {
        for (const auto& name : select) {
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end() || static_cast<std::size_t>(it - header.begin()) == time_col) {
                fail(ErrorCode::unknown_column, "'" + path.string() + "': unknown column '" + name +
                                                    "'; header: [" + join_names(header) + "]");
            }
            value_cols.push_back(static_cast<std::size_t>(it - header.begin()));
        }
    }

    LoadReport local;
    LoadReport& rep = report ? *report : local;
    rep = LoadReport{};
    rep.raw_rows = records.size() - 1;

    std::vector<std::string> labels;
    std::vector<ParsedTime> times;
    std::vector<std::vector<double>> columns(value_cols.size());
    std::optional<TimeKind> kind;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != header.size()) {
            rep.dropped.push_back({r, "expected " + std::to_string(header.size()) + " fields, found " +
                                          std::to_string(rec.size())});
            continue;
        }
        const auto t = parse_time(rec[time_col]);
        if (!t || (kind && *kind != t->kind)) {
            rep.dropped.push_back({r, "unparseable time cell '" + rec[time_col] + "'"});
            continue;
        }
        std::vector<double> row(value_cols.size());
        std::optional<std::size_t> bad;
        for (std::size_t k = 0; k < value_cols.size(); ++k) {
            const auto v = parse_real(rec[value_cols[k]]);
            if (!v) {
                bad = k;
                break;
            }
            row[k] = *v;
        }
        if (bad) {
            rep.dropped.push_back({r, "missing or non-numeric value in column '" + header[value_cols[*bad]] + "'"});
            continue;
        }
        kind = t->kind;
        labels.emplace_back(trim(rec[time_col]));
        times.push_back(*t);
        for (std::size_t k = 0; k < row.size(); ++k) columns[k].push_back(row[k]);
    }
    if (labels.empty()) fail(ErrorCode::insufficient_data, "'" + path.string() + "': zero usable rows");
    if (!uniformly_spaced(times)) {
        rep.warnings.push_back("time column '" + header[time_col] + "' is not uniformly spaced");
    }

    std::vector<double> index(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) index[i] = times[i].ordinal;
    std::vector<TimeSeries> series;
    for (std::size_t k = 0; k < value_cols.size(); ++k) {
        series.push_back(TimeSeries{header[value_cols[k]], std::move(columns[k]), {}});
    }
    std::string provenance = "loaded from " + path.filename().string() + "; " +
                             std::to_string(rep.dropped.size()) + " of " + std::to_string(rep.raw_rows) +
                             " rows dropped";
    return MultivariateDataset(header[time_col], std::move(labels), std::move(index), std::move(series),
                               std::move(provenance));
}

void write_csv(const MultivariateDataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
    std::string line = csv_escape(dataset.time_column());
    for (const auto& s : dataset.series()) {
        line += ',';
        line += csv_escape(s.name);
    }
    out << line << '\n';
    for (std::size_t r = 0; r < dataset.rows(); ++r) {
        line = csv_escape(dataset.time_labels()[r]);
        for (const auto& s : dataset.series()) {
            line += ',';
            line += format_real(s.values[r]);
        }
        out << line << '\n';
    }
    out.close();
    if (!out) fail(ErrorCode::io, "failed writing '" + path.string() + "'");
}

} // namespace ccmkit
