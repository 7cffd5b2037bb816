#include "nlqwalk/series_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

namespace nlqwalk {

std::string format_double(double value) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(text.data(), last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return value;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

void write_series_csv(std::ostream& out, const ObservableSeries& series) {
  if (series.size() == 0)
    throw std::invalid_argument("cannot write an empty series");
  const Eigen::Index n = series.probs.front().size();
  out << "t";
  for (Eigen::Index j = 0; j < n; ++j) out << ",p_" << j;
  out << ",norm,energy\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_double(series.times[i]);
    const auto& row = series.probs[i];
    for (Eigen::Index j = 0; j < n; ++j) out << ',' << format_double(row[j]);
    out << ',' << format_double(series.norms[i]) << ','
        << format_double(series.energies[i]) << '\n';
  }
}

ObservableSeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("series CSV is empty");
  chomp(line);
  const auto header = split_fields(line);
  if (header.size() < 4 || header.front() != "t" ||
      header[header.size() - 2] != "norm" || header.back() != "energy")
    throw std::invalid_argument(
        "series CSV header must be t,p_0,...,norm,energy");
  const std::size_t n = header.size() - 3;
  for (std::size_t j = 0; j < n; ++j)
    if (header[j + 1] != "p_" + std::to_string(j))
      throw std::invalid_argument("unexpected series CSV column '" +
                                  std::string(header[j + 1]) + "'");

  ObservableSeries series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != n + 3)
      throw std::invalid_argument("series CSV line " + std::to_string(line_no) +
                                  " has " + std::to_string(fields.size()) +
                                  " fields, expected " + std::to_string(n + 3));
    series.times.push_back(parse_double(fields[0]));
    Eigen::VectorXd row(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) row[static_cast<Eigen::Index>(j)] = parse_double(fields[j + 1]);
    series.probs.push_back(std::move(row));
    series.norms.push_back(parse_double(fields[n + 1]));
    series.energies.push_back(parse_double(fields[n + 2]));
  }
  if (series.size() == 0)
    throw std::invalid_argument("series CSV has no data rows");
  series.final_state = WalkState{series.times.back(), ComplexVector()};
  return series;
}

json series_to_json(const ObservableSeries& series) {
  json probs = json::array();
  for (const auto& row : series.probs) {
    json r = json::array();
    for (Eigen::Index j = 0; j < row.size(); ++j) r.push_back(row[j]);
    probs.push_back(std::move(r));
  }
  json psi_re = json::array();
  json psi_im = json::array();
  for (Eigen::Index j = 0; j < series.final_state.psi.size(); ++j) {
    psi_re.push_back(series.final_state.psi[j].real());
    psi_im.push_back(series.final_state.psi[j].imag());
  }
  return json{{"times", series.times},
              {"probs", std::move(probs)},
              {"norms", series.norms},
              {"energies", series.energies},
              {"final_state",
               {{"t", series.final_state.t},
                {"psi_re", std::move(psi_re)},
                {"psi_im", std::move(psi_im)}}}};
}

ObservableSeries series_from_json(const json& j) {
  ObservableSeries series;
  series.times = j.at("times").get<std::vector<double>>();
  series.norms = j.at("norms").get<std::vector<double>>();
  series.energies = j.at("energies").get<std::vector<double>>();
  for (const auto& r : j.at("probs")) {
    Eigen::VectorXd row(static_cast<Eigen::Index>(r.size()));
    Eigen::Index k = 0;
    for (const auto& v : r) row[k++] = v.get<double>();
    series.probs.push_back(std::move(row));
  }
  if (series.probs.size() != series.times.size() ||
      series.norms.size() != series.times.size() ||
      series.energies.size() != series.times.size())
    throw std::invalid_argument("series JSON columns have mismatched lengths");
  const auto& fs = j.at("final_state");
  const auto re = fs.at("psi_re").get<std::vector<double>>();
  const auto im = fs.at("psi_im").get<std::vector<double>>();
  if (re.size() != im.size())
    throw std::invalid_argument("final_state psi_re/psi_im lengths differ");
  ComplexVector psi(static_cast<Eigen::Index>(re.size()));
  for (std::size_t k = 0; k < re.size(); ++k)
    psi[static_cast<Eigen::Index>(k)] = {re[k], im[k]};
  series.final_state = WalkState{fs.at("t").get<double>(), std::move(psi)};
  return series;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points) {
  out << "g,p_bar\n";
  for (const auto& pt : points)
    if (pt.ok())
      out << format_double(pt.g) << ',' << format_double(*pt.p_bar) << '\n';
}

json sweep_to_json(std::span<const SweepPoint> points) {
  json arr = json::array();
  for (const auto& pt : points) {
    json o{{"g", pt.g}};
    if (pt.ok())
      o["p_bar"] = *pt.p_bar;
    else
      o["error"] = pt.error;
    arr.push_back(std::move(o));
  }
  return json{{"points", std::move(arr)}};
}

json bound_report_json(const TrapBoundResult& result) {
  json j{{"deg_r", result.deg_r},
         {"g_abs", result.g_abs},
         {"p_star", result.p_star},
         {"f_min", result.f_min},
         {"p_minus", nullptr},
         {"p_plus", nullptr},
         {"guarantee", result.guarantee()}};
  if (result.p_minus) j["p_minus"] = *result.p_minus;
  if (result.p_plus) j["p_plus"] = *result.p_plus;
  if (result.deg_r > 2)
    j["note"] =
        "formula extrapolation: the derivation covers degree 1 and 2 "
        "lattices, higher degrees reuse the formula untested";
  return j;
}

json transfer_report_json(const TransferReport& report) {
  json j{{"source", report.source},
         {"target", report.target},
         {"g_trap", report.g_trap},
         {"hold_in", report.hold_in},
         {"transfer_time", report.transfer_time},
         {"hold_out", report.hold_out},
         {"hold_fidelity_source", report.hold_fidelity_source},
         {"transfer_fidelity", report.transfer_fidelity},
         {"hold_fidelity_target", report.hold_fidelity_target},
         {"f_min", report.f_min},
         {"bound_guarantee", report.bound_guarantee},
         {"p_plus", nullptr},
         {"validated_protocol", report.validated_protocol},
         {"warnings", report.warnings}};
  if (report.p_plus) j["p_plus"] = *report.p_plus;
  return j;
}

json schedule_to_json(const GSchedule& schedule) {
  json arr = json::array();
  for (const auto& seg : schedule.segments())
    arr.push_back(json{{"t_start", seg.t_start},
                       {"t_end", seg.t_end},
                       {"g", seg.g}});
  return arr;
}

GSchedule schedule_from_json(const json& j) {
  if (!j.is_array())
    throw ScheduleError("schedule JSON must be an array of {t_start, t_end, g} objects");
  std::vector<ScheduleSegment> segments;
  segments.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& o = j[i];
    if (!o.is_object() || !o.contains("t_start") || !o.contains("t_end") ||
        !o.contains("g"))
      throw ScheduleError("schedule segment " + std::to_string(i) +
                          " must be an object with t_start, t_end and g");
    if (!o["t_start"].is_number() || !o["t_end"].is_number() ||
        !o["g"].is_number())
      throw ScheduleError("schedule segment " + std::to_string(i) +
                          " has a non-numeric field");
    segments.push_back(ScheduleSegment{o["t_start"].get<double>(),
                                       o["t_end"].get<double>(),
                                       o["g"].get<double>()});
  }
  return GSchedule(std::move(segments));
}

GSchedule load_schedule_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open schedule file: " + path);
  std::string text{std::istreambuf_iterator<char>(in),
                   std::istreambuf_iterator<char>()};
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line =
        1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ScheduleError(path + ":" + std::to_string(line) + ": " + e.what());
  }
  try {
    return schedule_from_json(j);
  } catch (const ScheduleError& e) {
    throw ScheduleError(path + ": " + e.what());
  }
}

}  // namespace nlqwalk
