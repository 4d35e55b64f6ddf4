#include "cml/data/activity.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "csv.hpp"
#include "cml/util/error.hpp"

namespace cml::data {

using namespace std::chrono;

year_month_day parse_date(std::string_view text) {
    text = csv::trim(text);
    auto field = [&](std::size_t pos, std::size_t len) -> int {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
        if (ec != std::errc{} || ptr != text.data() + pos + len) throw DataError("invalid date '" + std::string(text) + "'");
        return v;
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw DataError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    const year_month_day ymd{year{field(0, 4)}, month{static_cast<unsigned>(field(5, 2))},
                             day{static_cast<unsigned>(field(8, 2))}};
    if (!ymd.ok()) throw DataError("invalid date '" + std::string(text) + "'");
    return ymd;
}

std::string format_date(year_month_day date) {
    return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(date.year()), static_cast<unsigned>(date.month()),
                       static_cast<unsigned>(date.day()));
}

namespace {

sys_days monday_of(sys_days d) {
    const unsigned iso = weekday{d}.iso_encoding();  // Mon=1 .. Sun=7
    return d - days{iso - 1};
}

}  // namespace

IsoWeek iso_week(year_month_day date) {
    const sys_days d{date};
    const sys_days thursday = monday_of(d) + days{3};
    const year y = year_month_day{thursday}.year();
    const sys_days jan1{y / January / 1};
    const auto week = static_cast<unsigned>((thursday - jan1).count() / 7 + 1);
    return {static_cast<int>(y), week};
}

std::vector<DailyActivityRecord> load_daily_activity(std::istream& in) {
    static const std::vector<std::string> expected = {"participant_id", "date", "medium_intensity_minutes", "steps",
                                                      "average_met"};
    std::string line;
    if (!std::getline(in, line)) throw DataError("daily activity file is empty");
    const auto header = csv::split(line);
    std::vector<std::size_t> idx;
    for (const auto& name : expected) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw DataError("daily activity header is missing '" + name + "'");
        idx.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    std::vector<DailyActivityRecord> records;
    std::set<std::pair<std::string, int>> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto cells = csv::split(line);
        if (cells.size() != header.size())
            throw DataError(fmt::format("line {}: expected {} cells, found {}", line_no, header.size(), cells.size()));
        DailyActivityRecord rec;
        rec.participant_id = cells[idx[0]];
        rec.date = parse_date(cells[idx[1]]);
        double* targets[] = {&rec.medium_intensity_minutes, &rec.steps, &rec.average_met};
        for (int k = 0; k < 3; ++k) {
            const auto v = csv::parse_number(cells[idx[2 + k]]);
            if (!v) throw DataError(fmt::format("line {}: non-numeric '{}' in {}", line_no, cells[idx[2 + k]], expected[2 + k]));
            if (*v < 0.0) throw DataError(fmt::format("line {}: negative {}", line_no, expected[2 + k]));
            *targets[k] = *v;
        }
        if (!seen.emplace(rec.participant_id, sys_days{rec.date}.time_since_epoch().count()).second)
            throw DataError(fmt::format("line {}: duplicate record for participant {} on {}", line_no,
                                        rec.participant_id, format_date(rec.date)));
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<DailyActivityRecord> load_daily_activity(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open daily activity file " + path.string());
    return load_daily_activity(in);
}

void write_daily_activity(std::ostream& out, std::span<const DailyActivityRecord> records) {
    out << "participant_id,date,medium_intensity_minutes,steps,average_met\n";
    for (const auto& r : records)
        out << fmt::format("{},{},{},{},{}\n", r.participant_id, format_date(r.date), r.medium_intensity_minutes,
                           r.steps, r.average_met);
}

std::vector<WeeklyMinutes> weekly_activity(std::span<const DailyActivityRecord> records, std::string_view participant,
                                           const std::optional<DateWindow>& window) {
    std::map<sys_days, double> by_monday;
    bool any = false;
    for (const auto& r : records) {
        if (r.participant_id != participant) continue;
        if (window && (sys_days{r.date} < sys_days{window->from} || sys_days{r.date} > sys_days{window->to})) continue;
        any = true;
        by_monday[monday_of(sys_days{r.date})] += r.medium_intensity_minutes;
    }
    if (!any) throw DataError("no activity records for participant '" + std::string(participant) + "'");

    std::vector<WeeklyMinutes> out;
    const sys_days last = by_monday.rbegin()->first;
    for (sys_days w = by_monday.begin()->first; w <= last; w += days{7}) {
        auto it = by_monday.find(w);
        out.push_back({iso_week(year_month_day{w}), it == by_monday.end() ? 0.0 : it->second});
    }
    return out;
}

ActivityClass classify_activity(std::span<const WeeklyMinutes> weekly, double threshold) {
    if (weekly.empty()) throw DataError("cannot classify activity from an empty weekly series");
    double total = 0.0;
    for (const auto& w : weekly) total += w.minutes;
    const double mean = total / static_cast<double>(weekly.size());
    return mean >= threshold ? ActivityClass::Active : ActivityClass::LowActive;
}

Cohort assign_activity_treatment(const Cohort& cohort, std::span<const DailyActivityRecord> records,
                                 std::string_view id_column, std::string_view treatment, double threshold,
                                 const std::optional<DateWindow>& window) {
    const auto ids = cohort.column(id_column);
    std::map<std::string, std::vector<DailyActivityRecord>, std::less<>> by_participant;
    for (const auto& rec : records) by_participant[rec.participant_id].push_back(rec);
    std::vector<double> values(cohort.rows());
    for (std::size_t r = 0; r < cohort.rows(); ++r) {
        if (is_missing(ids[r])) {
            values[r] = kMissing;
            continue;
        }
        const std::string pid = fmt::format("{}", static_cast<long long>(ids[r]));
        auto it = by_participant.find(pid);
        if (it == by_participant.end()) throw DataError("no activity records for participant '" + pid + "'");
        const auto weekly = weekly_activity(it->second, pid, window);
        values[r] = classify_activity(weekly, threshold) == ActivityClass::Active ? 1.0 : 0.0;
    }
    if (cohort.find(treatment)) {
        auto schema = cohort.schema();
        auto& var = schema[cohort.index_of(treatment)];
        var.kind = VarKind::Binary;
        var.role = Role::Treatment;
        std::vector<std::vector<double>> cols;
        for (std::size_t c = 0; c < cohort.cols(); ++c) {
            const auto col = cohort.column(c);
            cols.emplace_back(col.begin(), col.end());
        }
        cols[cohort.index_of(treatment)] = std::move(values);
        return Cohort(std::move(schema), std::move(cols), cohort.timepoint());
    }
    return cohort.with_column({std::string(treatment), VarKind::Binary, Role::Treatment, "indicator", {}},
                              std::move(values));
}

}  // namespace cml::data
