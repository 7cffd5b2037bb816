#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlqwalk/bounds.hpp"
#include "nlqwalk/errors.hpp"
#include "nlqwalk/lattice.hpp"
#include "nlqwalk/series_io.hpp"
#include "nlqwalk/transfer.hpp"
#include "nlqwalk/walk.hpp"

using namespace nlqwalk;

namespace {

ObservableSeries sample_series() {
  const Lattice lat = Lattice::path(5);
  IntegratorConfig cfg;
  return evolve(lat, WalkParams{1.5, 1.0}, localized_state(5, 2), 2.0, cfg);
}

class TempFile {
 public:
  explicit TempFile(const std::string& name)
      : path_(std::filesystem::temp_directory_path() /
              ("nlqwalk_test_" + name)) {}
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  void write(const std::string& text) const {
    std::ofstream out(path_);
    out << text;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST_CASE("double formatting round-trips every value bit-exactly") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(mant(gen), expo(gen));
    const std::string s = format_double(x);
    CHECK(parse_double(s) == x);
  }
  for (double x : {0.0, -0.0, 1.0, -1.0, 2.0 / 3.0,
                   std::numeric_limits<double>::min(),
                   std::numeric_limits<double>::denorm_min(),
                   std::numeric_limits<double>::max(),
                   0.1, 0.9874622171769684}) {
    const std::string s = format_double(x);
    const double back = parse_double(s);
    CHECK(back == x);
    CHECK(std::signbit(back) == std::signbit(x));
  }

  SUBCASE("shortest form") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.25) == "-0.25");
  }

  SUBCASE("parser rejects junk") {
    CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_double("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double("1.5 "), std::invalid_argument);
    CHECK_THROWS_AS(parse_double(" 1.5"), std::invalid_argument);
  }
}

TEST_CASE("series CSV round trip") {
  const ObservableSeries series = sample_series();

  std::ostringstream out;
  write_series_csv(out, series);
  const std::string text = out.str();

  SUBCASE("header names every column") {
    CHECK(text.rfind("t,p_0,p_1,p_2,p_3,p_4,norm,energy\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
  }

  SUBCASE("read back is bit-exact") {
    std::istringstream in(text);
    const ObservableSeries back = read_series_csv(in);
    REQUIRE(back.size() == series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
      CHECK(back.times[i] == series.times[i]);
      CHECK(back.norms[i] == series.norms[i]);
      CHECK(back.energies[i] == series.energies[i]);
      REQUIRE(back.probs[i].size() == series.probs[i].size());
      for (Eigen::Index v = 0; v < series.probs[i].size(); ++v)
        CHECK(back.probs[i][v] == series.probs[i][v]);
    }
    CHECK(back.final_state.t == series.times.back());
    CHECK(back.final_state.psi.size() == 0);  // CSV carries no amplitudes
  }

  SUBCASE("empty series cannot be written") {
    std::ostringstream sink;
    CHECK_THROWS_AS(write_series_csv(sink, ObservableSeries{}),
                    std::invalid_argument);
  }

  SUBCASE("malformed input is rejected with a line number") {
    std::istringstream wrong_header("time,p_0,norm,energy\n");
    CHECK_THROWS_AS(read_series_csv(wrong_header), std::invalid_argument);

    std::istringstream missing_field(
        "t,p_0,norm,energy\n0,1,1\n");
    CHECK_THROWS_WITH_AS(read_series_csv(missing_field),
                         doctest::Contains("line 2"), std::invalid_argument);

    std::istringstream bad_number(
        "t,p_0,norm,energy\n0,one,1,0\n");
    CHECK_THROWS_AS(read_series_csv(bad_number), std::invalid_argument);

    std::istringstream header_only("t,p_0,norm,energy\n");
    CHECK_THROWS_WITH_AS(read_series_csv(header_only),
                         doctest::Contains("no data rows"),
                         std::invalid_argument);
  }
}

TEST_CASE("series JSON keeps the final state") {
  const ObservableSeries series = sample_series();
  const json j = series_to_json(series);
  const ObservableSeries back = series_from_json(j);

  REQUIRE(back.size() == series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(back.times[i] == series.times[i]);
    for (Eigen::Index v = 0; v < series.probs[i].size(); ++v)
      CHECK(back.probs[i][v] == series.probs[i][v]);
    CHECK(back.norms[i] == series.norms[i]);
    CHECK(back.energies[i] == series.energies[i]);
  }
  CHECK(back.final_state.t == series.final_state.t);
  REQUIRE(back.final_state.psi.size() == series.final_state.psi.size());
  for (Eigen::Index v = 0; v < series.final_state.psi.size(); ++v)
    CHECK(back.final_state.psi[v] == series.final_state.psi[v]);

  SUBCASE("length mismatches are rejected") {
    json broken = j;
    broken["norms"].erase(0);
    CHECK_THROWS_AS(series_from_json(broken), std::invalid_argument);
  }
}

TEST_CASE("sweep serialization") {
  std::vector<SweepPoint> points(3);
  points[0].g = 0.0;
  points[0].p_bar = 0.11;
  points[1].g = 4.0;
  points[1].error = "g = 4.000000: step budget exhausted at t = 1.2";
  points[2].g = 8.0;
  points[2].p_bar = 0.92;

  SUBCASE("CSV omits the failed point") {
    std::ostringstream out;
    write_sweep_csv(out, points);
    const std::string text = out.str();
    CHECK(text.rfind("g,p_bar\n", 0) == 0);
    CHECK(text.find("0,0.11\n") != std::string::npos);
    CHECK(text.find("8,0.92\n") != std::string::npos);
    CHECK(text.find("4,") == std::string::npos);
  }

  SUBCASE("JSON keeps the failed point with its error") {
    const json j = sweep_to_json(points);
    REQUIRE(j.contains("points"));
    const json& pts = j["points"];
    REQUIRE(pts.is_array());
    REQUIRE(pts.size() == 3);
    CHECK(pts[0]["p_bar"].get<double>() == 0.11);
    CHECK_FALSE(pts[1].contains("p_bar"));
    CHECK(pts[1]["error"].get<std::string>().find("budget") != std::string::npos);
    CHECK(pts[2]["g"].get<double>() == 8.0);
  }
}

TEST_CASE("bound report JSON") {
  SUBCASE("guaranteed case carries both roots") {
    const json j = bound_report_json(trap_roots(1, 20.0));
    CHECK(j["deg_r"].get<int>() == 1);
    CHECK(j["g_abs"].get<double>() == 20.0);
    CHECK(j["guarantee"].get<bool>());
    CHECK(j["p_plus"].get<double>() == doctest::Approx(0.987).epsilon(5e-4));
    CHECK(j["p_minus"].get<double>() > 0.0);
    CHECK_FALSE(j.contains("note"));
  }

  SUBCASE("no-guarantee case serializes null roots") {
    const json j = bound_report_json(trap_roots(2, 5.0));
    CHECK_FALSE(j["guarantee"].get<bool>());
    CHECK(j["p_plus"].is_null());
    CHECK(j["p_minus"].is_null());
  }

  SUBCASE("degrees beyond the derivation get a note") {
    const json j = bound_report_json(trap_roots(3, 20.0));
    REQUIRE(j.contains("note"));
    CHECK(j["note"].get<std::string>().find("degree") != std::string::npos);
  }
}

TEST_CASE("transfer report JSON") {
  const Lattice p3 = Lattice::path(3);
  IntegratorConfig cfg;
  const TransferReport report =
      timed_transfer(p3, 0, 2, 5.0, std::nullopt, 4.78, 40.0, cfg);
  const json j = transfer_report_json(report);

  CHECK(j["source"].get<int>() == 0);
  CHECK(j["target"].get<int>() == 2);
  CHECK(j["g_trap"].get<double>() == 40.0);
  CHECK(j["transfer_fidelity"].get<double>() == report.transfer_fidelity);
  CHECK(j["bound_guarantee"].get<bool>());
  CHECK(j["p_plus"].get<double>() == *report.p_plus);
  CHECK(j["validated_protocol"].get<bool>());
  CHECK(j["warnings"].is_array());

  SUBCASE("absent guarantee serializes as null") {
    const TransferReport weak =
        timed_transfer(p3, 0, 2, 1.0, std::nullopt, 1.0, 2.0, cfg);
    const json wj = transfer_report_json(weak);
    CHECK(wj["p_plus"].is_null());
    CHECK_FALSE(wj["bound_guarantee"].get<bool>());
    CHECK_FALSE(wj["warnings"].empty());
  }
}

TEST_CASE("schedule JSON round trip") {
  const GSchedule sched(std::vector<ScheduleSegment>{
      {0.0, 5.0, 40.0}, {5.0, 7.22, 0.0}, {7.22, 12.0, 40.0}});
  const json j = schedule_to_json(sched);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 3);
  CHECK(j[1]["t_start"].get<double>() == 5.0);
  CHECK(j[1]["g"].get<double>() == 0.0);

  const GSchedule back = schedule_from_json(j);
  REQUIRE(back.segments().size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.segments()[i].t_start == sched.segments()[i].t_start);
    CHECK(back.segments()[i].t_end == sched.segments()[i].t_end);
    CHECK(back.segments()[i].g == sched.segments()[i].g);
  }

  SUBCASE("malformed documents are rejected") {
    CHECK_THROWS_AS(schedule_from_json(json::object()), ScheduleError);
    CHECK_THROWS_AS(schedule_from_json(json::array({json::object()})),
                    ScheduleError);
    json missing = json::array();
    missing.push_back({{"t_start", 0.0}, {"t_end", 1.0}});
    CHECK_THROWS_AS(schedule_from_json(missing), ScheduleError);
    json wrong_type = json::array();
    wrong_type.push_back({{"t_start", 0.0}, {"t_end", 1.0}, {"g", "forty"}});
    CHECK_THROWS_AS(schedule_from_json(wrong_type), ScheduleError);
  }
}

TEST_CASE("schedule files") {
  SUBCASE("valid file loads") {
    TempFile file("sched_ok.json");
    file.write(R"([{"t_start": 0, "t_end": 5, "g": 40},
                   {"t_start": 5, "t_end": 7.22, "g": 0}])");
    const GSchedule sched = load_schedule_file(file.path().string());
    CHECK(sched.total_time() == 7.22);
    CHECK(sched.g_at(6.0) == 0.0);
  }

  SUBCASE("missing file names the path") {
    CHECK_THROWS_WITH_AS(load_schedule_file("/nonexistent/sched.json"),
                         doctest::Contains("cannot open schedule file"),
                         std::invalid_argument);
  }

  SUBCASE("syntax error carries file and line") {
    TempFile file("sched_bad.json");
    file.write("[\n{\"t_start\": 0, \"t_end\": 5, \"g\": 40},\n{oops}\n]");
    try {
      load_schedule_file(file.path().string());
      FAIL("expected ScheduleError");
    } catch (const ScheduleError& e) {
      const std::string what = e.what();
      CHECK(what.find("sched_bad.json:3") != std::string::npos);
    }
  }

  SUBCASE("tiling violations are prefixed with the path") {
    TempFile file("sched_gap.json");
    file.write(R"([{"t_start": 0, "t_end": 1, "g": 1},
                   {"t_start": 2, "t_end": 3, "g": 0}])");
    try {
      load_schedule_file(file.path().string());
      FAIL("expected ScheduleError");
    } catch (const ScheduleError& e) {
      CHECK(std::string(e.what()).find("sched_gap.json") != std::string::npos);
    }
  }
}
