#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "nlqwalk/analysis.hpp"
#include "nlqwalk/bounds.hpp"
#include "nlqwalk/transfer.hpp"
#include "nlqwalk/walk.hpp"

namespace nlqwalk {

using json = nlohmann::json;

/// Shortest decimal string that parses back to the identical double.
std::string format_double(double value);

/// Strict full-string parse of what format_double produces (plus inf/nan).
/// Throws std::invalid_argument on anything else.
double parse_double(std::string_view text);

/// Columns: t, p_0 ... p_{N-1}, norm, energy. LF line endings, '.' decimal
/// point, values in shortest round-trip form so a read back is bit-exact.
void write_series_csv(std::ostream& out, const ObservableSeries& series);

/// Inverse of write_series_csv. The CSV carries no amplitudes, so the
/// returned final_state holds the last sample time and an empty psi; use the
/// JSON form when the state itself must survive the round trip.
ObservableSeries read_series_csv(std::istream& in);

json series_to_json(const ObservableSeries& series);
ObservableSeries series_from_json(const json& j);

/// Columns: g, p_bar. Failed sweep points have no value and are omitted;
/// the JSON form keeps them with their error strings.
void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points);
json sweep_to_json(std::span<const SweepPoint> points);

/// {deg_r, g_abs, p_star, f_min, p_minus, p_plus, guarantee}; absent roots
/// serialize as null. Degrees above 2 get a note that the bound formula is
/// extrapolated beyond the lattices the derivation covers.
json bound_report_json(const TrapBoundResult& result);

json transfer_report_json(const TransferReport& report);

/// Schedules interchange as a JSON array of {t_start, t_end, g} objects.
json schedule_to_json(const GSchedule& schedule);
GSchedule schedule_from_json(const json& j);

/// Parses and validates a schedule file. JSON syntax errors are rethrown as
/// ScheduleError prefixed with "<path>:<line>".
GSchedule load_schedule_file(const std::string& path);

}  // namespace nlqwalk
