#pragma once

#include <utility>
#include <vector>

namespace qgdirac {

/// One step of a nonrelativistic-limit sequence:
/// b = (m c^2 + omega) / c^2 and a = (m c^2 - omega) b.
struct ScheduleEntry {
    double c = 0.0;
    double omega = 0.0;
    double a = 0.0;
    double b = 0.0;
};

struct LimitSchedule {
    double m = 0.0;
    double nu = 0.0;
    std::vector<ScheduleEntry> entries;  ///< strictly increasing c
    bool default_rule = true;            ///< omega = m c^2 + nu / (2m)

    std::size_t size() const noexcept { return entries.size(); }
    bool empty() const noexcept { return entries.empty(); }
};

/// omega_n = m c_n^2 + nu/(2m). Throws std::invalid_argument unless m > 0,
/// nu < 0, c strictly increasing and 0 < omega_n < m c_n^2.
LimitSchedule make_schedule(double m, double nu, const std::vector<double>& c_list);

/// User-supplied (c_n, omega_n) pairs, validated the same way.
LimitSchedule make_schedule_from_pairs(double m, double nu, const std::vector<std::pair<double, double>>& pairs);

}  // namespace qgdirac
