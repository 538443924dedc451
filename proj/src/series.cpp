#include "eemdkit/series.hpp"

#include "eemdkit/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

namespace eemdkit {

namespace {

constexpr const char* kModule = "series-core";

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// RFC-4180-ish field splitting; quotes are only expected in header labels.
std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.emplace_back(trim(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    out.emplace_back(trim(field));
    return out;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct CsvTable {
    std::vector<std::string> header;
    std::size_t date_col = 0;
    std::vector<std::vector<std::string>> rows; // data rows only
};

CsvTable read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError(kModule, "cannot open '" + path.string() + "'");
    CsvTable t;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0)
            line.erase(0, 3);
        if (trim(line).empty())
            continue;
        auto fields = split_csv_line(line);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw ValidationError(kModule, path.string() + ": row " + std::to_string(t.rows.size() + 1) +
                                               " has " + std::to_string(fields.size()) + " fields, header has " +
                                               std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    if (!have_header)
        throw ValidationError(kModule, path.string() + ": empty file");
    auto it = std::find_if(t.header.begin(), t.header.end(), [](const std::string& h) { return iequals(h, "date"); });
    if (it == t.header.end())
        throw ValidationError(kModule, path.string() + ": no 'date' column in header");
    t.date_col = static_cast<std::size_t>(std::distance(t.header.begin(), it));
    return t;
}

std::size_t column_index(const CsvTable& t, std::string_view column, const std::filesystem::path& path) {
    auto it = std::find(t.header.begin(), t.header.end(), column);
    if (it == t.header.end() || static_cast<std::size_t>(std::distance(t.header.begin(), it)) == t.date_col)
        throw ValidationError(kModule, path.string() + ": missing column '" + std::string(column) + "'");
    return static_cast<std::size_t>(std::distance(t.header.begin(), it));
}

double parse_cell(const std::string& cell, std::size_t row, std::string_view column,
                  const std::filesystem::path& path) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+')
        ++first;
    auto res = std::from_chars(first, last, v);
    if (cell.empty() || res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
        throw ValidationError(kModule, path.string() + ": row " + std::to_string(row) + " (line " +
                                           std::to_string(row + 1) + "), column '" + std::string(column) +
                                           "': not a finite number: '" + cell + "'");
    }
    return v;
}

std::vector<Date> parse_dates(const CsvTable& t, const std::filesystem::path& path) {
    std::vector<Date> dates;
    dates.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        try {
            dates.push_back(parse_iso_date(t.rows[r][t.date_col]));
        } catch (const ValidationError&) {
            throw ValidationError(kModule, path.string() + ": row " + std::to_string(r + 1) +
                                               ": invalid date '" + t.rows[r][t.date_col] + "'");
        }
        if (r > 0 && dates[r] <= dates[r - 1]) {
            throw ValidationError(kModule, path.string() + ": row " + std::to_string(r + 1) +
                                               ": dates not strictly increasing (" + format_iso_date(dates[r - 1]) +
                                               " then " + format_iso_date(dates[r]) + ")");
        }
    }
    return dates;
}

} // namespace

Date parse_iso_date(std::string_view text) {
    text = trim(text);
    auto bad = [&] { return ValidationError(kModule, "invalid ISO-8601 date '" + std::string(text) + "'"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw bad();
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [&](std::size_t pos, std::size_t len, auto& out) {
        auto res = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        if (res.ec != std::errc{} || res.ptr != text.data() + pos + len)
            throw bad();
    };
    num(0, 4, y);
    num(5, 2, m);
    num(8, 2, d);
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok())
        throw bad();
    return Date{ymd};
}

std::string format_iso_date(Date d) {
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

void TimeSeries::validate() const {
    if (dates.size() != values.size())
        throw ValidationError(kModule, "series '" + name + "': date and value counts differ");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw ValidationError(kModule, "series '" + name + "': non-finite value at row " + std::to_string(i + 1));
        if (i > 0 && dates[i] <= dates[i - 1])
            throw ValidationError(kModule,
                                  "series '" + name + "': dates not strictly increasing at row " + std::to_string(i + 1));
    }
}

const TimeSeries& AlignedPanel::at(std::string_view name) const {
    for (const auto& s : series)
        if (s.name == name)
            return s;
    throw ValidationError(kModule, "panel has no series '" + std::string(name) + "'");
}

bool AlignedPanel::contains(std::string_view name) const noexcept {
    return std::any_of(series.begin(), series.end(), [&](const TimeSeries& s) { return s.name == name; });
}

TimeSeries ingest_csv(const std::filesystem::path& path, std::string_view column) {
    std::string col(column);
    return ingest_csv_columns(path, std::span<const std::string>(&col, 1)).front();
}

std::vector<TimeSeries> ingest_csv_columns(const std::filesystem::path& path, std::span<const std::string> columns) {
    CsvTable t = read_table(path);
    std::vector<std::size_t> idx;
    for (const auto& c : columns)
        idx.push_back(column_index(t, c, path));
    std::vector<Date> dates = parse_dates(t, path);

    std::vector<TimeSeries> out;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        TimeSeries s;
        s.name = columns[k];
        s.dates = dates;
        s.values.reserve(t.rows.size());
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            s.values.push_back(parse_cell(t.rows[r][idx[k]], r + 1, columns[k], path));
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> csv_value_columns(const std::filesystem::path& path) {
    CsvTable t = read_table(path);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (i != t.date_col)
            out.push_back(t.header[i]);
    return out;
}

void write_csv(const std::filesystem::path& path, std::span<const TimeSeries> series) {
    if (series.empty())
        throw ValidationError(kModule, "write_csv: no series");
    for (const auto& s : series) {
        if (s.dates != series.front().dates)
            throw ValidationError(kModule, "write_csv: series '" + s.name + "' has a different calendar");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError(kModule, "cannot write '" + path.string() + "'");
    out << "date";
    for (const auto& s : series)
        out << ',' << s.name;
    out << '\n';
    for (std::size_t i = 0; i < series.front().size(); ++i) {
        out << format_iso_date(series.front().dates[i]);
        for (const auto& s : series)
            out << ',' << format_double(s.values[i]);
        out << '\n';
    }
}

AlignedPanel align(std::span<const TimeSeries> series) {
    if (series.size() < 2)
        throw ValidationError(kModule, "align needs at least two series");
    for (const auto& s : series)
        s.validate();

    std::vector<Date> common = series.front().dates;
    for (std::size_t k = 1; k < series.size(); ++k) {
        std::vector<Date> next;
        std::set_intersection(common.begin(), common.end(), series[k].dates.begin(), series[k].dates.end(),
                              std::back_inserter(next));
        common = std::move(next);
    }
    if (common.empty())
        throw ValidationError(kModule, "calendars have an empty intersection");

    AlignedPanel panel;
    panel.dates = common;
    for (const auto& s : series) {
        TimeSeries out;
        out.name = s.name;
        out.dates = common;
        out.values.reserve(common.size());
        std::size_t j = 0;
        for (Date d : common) {
            while (s.dates[j] < d)
                ++j;
            out.values.push_back(s.values[j]);
        }
        panel.series.push_back(std::move(out));
    }
    return panel;
}

TimeSeries upsample_low_to_high(const TimeSeries& low, std::span<const Date> target) {
    low.validate();
    if (low.size() < 2)
        throw ValidationError(kModule, "upsample: series '" + low.name + "' needs at least 2 anchors");
    TimeSeries out;
    out.name = low.name;
    out.dates.assign(target.begin(), target.end());
    out.values.reserve(target.size());
    for (Date d : target) {
        if (d < low.dates.front() || d > low.dates.back()) {
            throw ValidationError(kModule, "upsample: target date " + format_iso_date(d) + " outside anchor span " +
                                               format_iso_date(low.dates.front()) + ".." +
                                               format_iso_date(low.dates.back()));
        }
        auto hi = std::lower_bound(low.dates.begin(), low.dates.end(), d);
        auto k = static_cast<std::size_t>(std::distance(low.dates.begin(), hi));
        if (*hi == d) {
            out.values.push_back(low.values[k]);
            continue;
        }
        const double t0 = static_cast<double>(low.dates[k - 1].time_since_epoch().count());
        const double t1 = static_cast<double>(low.dates[k].time_since_epoch().count());
        const double t = static_cast<double>(d.time_since_epoch().count());
        const double w = (t - t0) / (t1 - t0);
        out.values.push_back(low.values[k - 1] + w * (low.values[k] - low.values[k - 1]));
    }
    out.validate();
    return out;
}

TimeSeries deflate_to_real(const TimeSeries& nominal, const TimeSeries& price_index) {
    if (nominal.dates != price_index.dates)
        throw ValidationError(kModule, "deflate: '" + nominal.name + "' and index '" + price_index.name +
                                           "' are not aligned");
    if (nominal.size() == 0)
        return nominal;
    for (std::size_t i = 0; i < price_index.size(); ++i) {
        if (!(price_index.values[i] > 0.0))
            throw ValidationError(kModule, "deflate: index '" + price_index.name + "' is not positive at " +
                                               format_iso_date(price_index.dates[i]));
    }
    const double base = price_index.values.front();
    TimeSeries out = nominal;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = nominal.values[i] / (price_index.values[i] / base);
    return out;
}

double forward_price(const ForwardInputs& in) {
    if (!(in.spot > 0.0))
        throw ValidationError(kModule, "forward_price: spot must be positive");
    if (in.storage < 0.0 || in.convenience < 0.0)
        throw ValidationError(kModule, "forward_price: storage and convenience must be non-negative");
    return in.spot + in.rate * in.spot + in.storage - in.convenience;
}

TimeSeries log_transform(const TimeSeries& s) {
    TimeSeries out = s;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s.values[i] > 0.0))
            throw ValidationError(kModule, "log transform: '" + s.name + "' is not positive at row " +
                                               std::to_string(i + 1));
        out.values[i] = std::log(s.values[i]);
    }
    return out;
}

} // namespace eemdkit
