#pragma once

#include <chrono>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eemdkit {

using Date = std::chrono::sys_days;

/// Parses a strict `YYYY-MM-DD` calendar date. Throws ValidationError.
Date parse_iso_date(std::string_view text);
std::string format_iso_date(Date d);

/// A uniformly sampled daily series. Dates strictly increase and values are
/// finite; `validate()` enforces both.
struct TimeSeries {
    std::string name;
    std::vector<Date> dates;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    void validate() const;
};

/// Series sharing one calendar, in caller order.
struct AlignedPanel {
    std::vector<Date> dates;
    std::vector<TimeSeries> series;

    Date first() const { return dates.front(); }
    Date last() const { return dates.back(); }
    const TimeSeries& at(std::string_view name) const;
    bool contains(std::string_view name) const noexcept;
};

struct ForwardInputs {
    double spot = 0.0;
    double rate = 0.0;        ///< interest over one period, as a fraction
    double storage = 0.0;     ///< physical storage cost, price units
    double convenience = 0.0; ///< convenience yield, price units
};

/// Reads one value column (plus the `date` column) from a CSV file.
TimeSeries ingest_csv(const std::filesystem::path& path, std::string_view column);

/// Reads several value columns sharing the file's `date` column.
std::vector<TimeSeries> ingest_csv_columns(const std::filesystem::path& path,
                                           std::span<const std::string> columns);

/// Lists the value columns (every header field except `date`).
std::vector<std::string> csv_value_columns(const std::filesystem::path& path);

/// Writes `date,<name>...` using shortest round-trip number formatting.
/// All series must share one calendar.
void write_csv(const std::filesystem::path& path, std::span<const TimeSeries> series);

/// Restricts every series to the intersection of their calendars.
AlignedPanel align(std::span<const TimeSeries> series);

/// Piecewise-linear interpolation of a low-frequency series onto a daily
/// calendar. No extrapolation: every target date must fall within the
/// anchor span.
TimeSeries upsample_low_to_high(const TimeSeries& low, std::span<const Date> target);

/// real_t = nominal_t * index_0 / index_t, so the two agree at the first date.
TimeSeries deflate_to_real(const TimeSeries& nominal, const TimeSeries& price_index);

/// One-period forward price: S + r*S + w - c.
double forward_price(const ForwardInputs& in);

/// Natural log of every value; values must be positive.
TimeSeries log_transform(const TimeSeries& s);

} // namespace eemdkit
