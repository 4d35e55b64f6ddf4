#pragma once

#include <chrono>
#include <compare>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cml/data/cohort.hpp"

namespace cml::data {

struct DailyActivityRecord {
    std::string participant_id;
    std::chrono::year_month_day date;
    double medium_intensity_minutes = 0.0;
    double steps = 0.0;
    double average_met = 0.0;
};

struct IsoWeek {
    int year = 0;
    unsigned week = 0;

    auto operator<=>(const IsoWeek&) const = default;
};

struct WeeklyMinutes {
    IsoWeek week;
    double minutes = 0.0;
};

/// Inclusive calendar window restricting which daily records count.
struct DateWindow {
    std::chrono::year_month_day from;
    std::chrono::year_month_day to;
};

enum class ActivityClass { Active, LowActive };

inline constexpr double kWeeklyActivityThreshold = 150.0;

std::chrono::year_month_day parse_date(std::string_view text);
std::string format_date(std::chrono::year_month_day date);

IsoWeek iso_week(std::chrono::year_month_day date);

/// CSV columns: participant_id,date,medium_intensity_minutes,steps,average_met.
/// Rejects duplicate (participant_id, date) pairs and negative values.
std::vector<DailyActivityRecord> load_daily_activity(std::istream& in);
std::vector<DailyActivityRecord> load_daily_activity(const std::filesystem::path& path);
void write_daily_activity(std::ostream& out, std::span<const DailyActivityRecord> records);

/// Minutes summed per ISO week over the participant's observed span; weeks
/// without records inside the span are reported as 0.
std::vector<WeeklyMinutes> weekly_activity(std::span<const DailyActivityRecord> records,
                                           std::string_view participant,
                                           const std::optional<DateWindow>& window = std::nullopt);

/// Active iff mean weekly minutes >= threshold.
ActivityClass classify_activity(std::span<const WeeklyMinutes> weekly,
                                double threshold = kWeeklyActivityThreshold);

/// Adds (or replaces) a binary treatment column derived from daily activity.
/// Participants are matched by the integer value of `id_column`.
Cohort assign_activity_treatment(const Cohort& cohort,
                                 std::span<const DailyActivityRecord> records,
                                 std::string_view id_column, std::string_view treatment,
                                 double threshold = kWeeklyActivityThreshold,
                                 const std::optional<DateWindow>& window = std::nullopt);

}  // namespace cml::data
