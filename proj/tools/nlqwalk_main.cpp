#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nlqwalk/analysis.hpp"
#include "nlqwalk/bounds.hpp"
#include "nlqwalk/series_io.hpp"
#include "nlqwalk/transfer.hpp"
#include "nlqwalk/walk.hpp"

namespace {

using namespace nlqwalk;

constexpr int kExitRuntime = 1;  // integration or other numeric failure
constexpr int kExitUsage = 2;    // bad arguments, config or input files

int parse_int(std::string_view text, const std::string& what) {
  int value = 0;
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(text.data(), last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::invalid_argument(what + ": '" + std::string(text) +
                                "' is not an integer");
  return value;
}

Lattice parse_graph(const std::string& arg) {
  const auto colon = arg.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("graph must be path:N or cycle:N, got '" +
                                arg + "'");
  const std::string kind = arg.substr(0, colon);
  const int n =
      parse_int(std::string_view(arg).substr(colon + 1), "graph size");
  if (kind == "path") return Lattice::path(n);
  if (kind == "cycle") return Lattice::cycle(n);
  throw std::invalid_argument("unknown graph kind '" + kind +
                              "' (expected path or cycle)");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

struct IntegratorFlags {
  std::string method = "rk45";
  IntegratorConfig cfg;

  void attach(CLI::App* cmd) {
    cmd->add_option("--method", method, "integration method")
        ->check(CLI::IsMember({"rk45", "rk4"}))
        ->capture_default_str();
    cmd->add_option("--rel-tol", cfg.rel_tol, "relative tolerance (rk45)")
        ->capture_default_str();
    cmd->add_option("--abs-tol", cfg.abs_tol, "absolute tolerance (rk45)")
        ->capture_default_str();
    cmd->add_option("--max-step", cfg.max_step, "largest time step")
        ->capture_default_str();
    cmd->add_option("--sample-dt", cfg.sample_dt, "output sampling interval")
        ->capture_default_str();
    cmd->add_option("--max-steps", cfg.max_steps, "step budget")
        ->capture_default_str();
  }

  IntegratorConfig resolve() const {
    IntegratorConfig out = cfg;
    out.method =
        method == "rk4" ? StepMethod::FixedRK4 : StepMethod::AdaptiveRK45;
    return out;
  }

  json echo() const {
    return json{{"method", method},
                {"rel_tol", cfg.rel_tol},
                {"abs_tol", cfg.abs_tol},
                {"max_step", cfg.max_step},
                {"sample_dt", cfg.sample_dt},
                {"max_steps", cfg.max_steps}};
  }
};

struct Sink {
  std::ofstream file;
  bool to_stdout = false;
  std::ostream& stream() { return to_stdout ? std::cout : file; }
};

// Output paths are opened before any computation so a bad path fails fast.
Sink open_sink(const std::string& path) {
  Sink s;
  if (path == "-") {
    s.to_stdout = true;
    return s;
  }
  s.file.open(path, std::ios::binary);
  if (!s.file) throw std::invalid_argument("cannot open output file: " + path);
  return s;
}

void emit_json(Sink& sink, const json& doc) {
  sink.stream() << doc.dump(2) << '\n';
}

// CSV tables carry their configuration in a sidecar <out>.meta.json; tables
// on stdout echo it to stderr instead. JSON outputs embed it directly. Either
// way a data file identifies the exact run that produced it.
void echo_csv_config(std::optional<Sink>& meta, const json& config) {
  if (meta)
    emit_json(*meta, json{{"config", config}});
  else
    std::cerr << json{{"config", config}}.dump() << '\n';
}

struct SimulateArgs {
  std::string graph;
  int start = 0;
  double g = 0.0;
  double t_end = 0.0;
  IntegratorFlags iflags;
  std::string format = "csv";
  std::string out = "-";
};

int cmd_simulate(const SimulateArgs& a) {
  const Lattice lat = parse_graph(a.graph);
  const WalkParams params{a.g, 1.0};
  const auto cfg = a.iflags.resolve();
  params.validate();
  cfg.validate();
  const auto initial = localized_state(lat.size(), a.start);

  const json config{{"command", "simulate"},
                    {"graph", a.graph},
                    {"start", a.start},
                    {"g", a.g},
                    {"gamma", 1.0},
                    {"t", a.t_end},
                    {"integrator", a.iflags.echo()},
                    {"format", a.format},
                    {"out", a.out}};

  Sink sink = open_sink(a.out);
  std::optional<Sink> meta;
  if (a.format == "csv" && !sink.to_stdout)
    meta = open_sink(a.out + ".meta.json");

  const auto series = evolve(lat, params, initial, a.t_end, cfg);

  if (a.format == "json") {
    emit_json(sink,
              json{{"config", config}, {"series", series_to_json(series)}});
  } else {
    write_series_csv(sink.stream(), series);
    echo_csv_config(meta, config);
  }
  return 0;
}

struct SweepArgs {
  std::string graph;
  int start = 0;
  std::string g_range;
  std::string g_list;
  double total_time = 300.0;
  int samples = 400;
  int jobs = 0;
  IntegratorFlags iflags;
  std::string format = "csv";
  std::string out = "-";
};

std::vector<double> resolve_g_values(const SweepArgs& a) {
  if (a.g_range.empty() == a.g_list.empty())
    throw std::invalid_argument("give exactly one of --g-range or --g-list");
  std::vector<double> values;
  if (!a.g_list.empty()) {
    for (const auto& field : split(a.g_list, ','))
      values.push_back(parse_double(field));
  } else {
    const auto parts = split(a.g_range, ':');
    if (parts.size() != 3)
      throw std::invalid_argument("--g-range must be min:max:step, got '" +
                                  a.g_range + "'");
    const double lo = parse_double(parts[0]);
    const double hi = parse_double(parts[1]);
    const double step = parse_double(parts[2]);
    if (hi < lo)
      throw std::invalid_argument("--g-range max must not be below min");
    if (lo == hi) {
      values.push_back(lo);
    } else {
      if (!(step > 0.0))
        throw std::invalid_argument("--g-range step must be positive");
      const auto count =
          static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
      for (std::size_t i = 0; i <= count; ++i)
        values.push_back(lo + static_cast<double>(i) * step);
    }
  }
  if (values.empty()) throw std::invalid_argument("empty g list");
  return values;
}

int cmd_sweep(const SweepArgs& a) {
  const auto g_values = resolve_g_values(a);
  SweepSpec spec{g_values,
                 parse_graph(a.graph),
                 a.start,
                 1.0,
                 AverageConfig{a.total_time, a.samples},
                 a.iflags.resolve(),
                 a.jobs};
  spec.avg.validate();
  spec.integrator.validate();

  const json config{
      {"command", "sweep"},
      {"graph", a.graph},
      {"start", a.start},
      {"g_values", g_values},
      {"averaging",
       json{{"total_time", a.total_time},
            {"samples", a.samples},
            {"window", json::array({a.total_time / 2.0, a.total_time})},
            {"endpoints_included", true}}},
      {"jobs", a.jobs},
      {"integrator", a.iflags.echo()},
      {"format", a.format},
      {"out", a.out}};

  Sink sink = open_sink(a.out);
  std::optional<Sink> meta;
  if (a.format == "csv" && !sink.to_stdout)
    meta = open_sink(a.out + ".meta.json");

  const auto points = sweep_g(spec);

  if (a.format == "json") {
    json doc = sweep_to_json(points);
    doc["config"] = config;
    emit_json(sink, doc);
  } else {
    write_sweep_csv(sink.stream(), points);
    echo_csv_config(meta, config);
  }

  int failures = 0;
  for (const auto& pt : points)
    if (!pt.ok()) {
      ++failures;
      std::cerr << "sweep point failed: " << pt.error << '\n';
    }
  return failures == 0 ? 0 : kExitRuntime;
}

struct BoundArgs {
  int deg = 1;
  std::optional<double> g_abs;
  std::optional<double> p_target;
  std::string out = "-";
};

int cmd_bound(const BoundArgs& a) {
  if (a.g_abs.has_value() == a.p_target.has_value())
    throw std::invalid_argument("give exactly one of --g or --target");
  Sink sink = open_sink(a.out);
  json report;
  if (a.g_abs) {
    report = bound_report_json(trap_roots(a.deg, *a.g_abs));
  } else {
    const double g = required_g(a.deg, *a.p_target);
    report = bound_report_json(trap_roots(a.deg, g));
    report["p_target"] = *a.p_target;
    report["required_g_abs"] = g;
  }
  emit_json(sink, report);
  return 0;
}

struct TransferArgs {
  std::string graph = "path:3";
  int source = 0;
  int target = 2;
  double g_trap = 40.0;
  double hold_in = 5.0;
  std::optional<double> transfer_time;
  double hold_out = 4.78;
  std::string schedule_file;
  int start = 0;
  IntegratorFlags iflags;
  std::string format = "csv";
  std::string out = "-";
  std::string series_out;
};

int cmd_transfer(const TransferArgs& a) {
  const Lattice lat = parse_graph(a.graph);
  const auto cfg = a.iflags.resolve();

  if (!a.schedule_file.empty()) {
    const GSchedule schedule = load_schedule_file(a.schedule_file);
    const json config{{"command", "transfer"},
                      {"graph", a.graph},
                      {"schedule_file", a.schedule_file},
                      {"schedule", schedule_to_json(schedule)},
                      {"start", a.start},
                      {"integrator", a.iflags.echo()},
                      {"format", a.format},
                      {"out", a.out}};
    Sink sink = open_sink(a.out);
    std::optional<Sink> meta;
    if (a.format == "csv" && !sink.to_stdout)
      meta = open_sink(a.out + ".meta.json");
    const auto series =
        run_schedule(lat, schedule, localized_state(lat.size(), a.start), cfg);
    if (a.format == "json") {
      emit_json(sink,
                json{{"config", config}, {"series", series_to_json(series)}});
    } else {
      write_series_csv(sink.stream(), series);
      echo_csv_config(meta, config);
    }
    return 0;
  }

  const double t_transfer =
      a.transfer_time.value_or(std::numbers::pi / std::numbers::sqrt2);
  const json config{{"command", "transfer"},
                    {"graph", a.graph},
                    {"source", a.source},
                    {"target", a.target},
                    {"g_trap", a.g_trap},
                    {"hold_in", a.hold_in},
                    {"transfer_time", t_transfer},
                    {"hold_out", a.hold_out},
                    {"integrator", a.iflags.echo()},
                    {"format", a.format},
                    {"out", a.out},
                    {"series_out", a.series_out}};

  Sink report_sink = open_sink(a.out);
  std::optional<Sink> series_sink, series_meta;
  if (!a.series_out.empty()) {
    series_sink = open_sink(a.series_out);
    if (a.format == "csv" && !series_sink->to_stdout)
      series_meta = open_sink(a.series_out + ".meta.json");
  }

  ObservableSeries series;
  const auto report =
      timed_transfer(lat, a.source, a.target, a.hold_in, a.transfer_time,
                     a.hold_out, a.g_trap, cfg, series_sink ? &series : nullptr);

  json doc = transfer_report_json(report);
  doc["config"] = config;
  emit_json(report_sink, doc);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';

  if (series_sink) {
    if (a.format == "json") {
      emit_json(*series_sink,
                json{{"config", config}, {"series", series_to_json(series)}});
    } else {
      write_series_csv(series_sink->stream(), series);
      echo_csv_config(series_meta, config);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time quantum walks with a cubic nonlinearity on 1D lattices"};
  app.require_subcommand(1);

  SimulateArgs sim;
  SweepArgs swp;
  BoundArgs bnd;
  TransferArgs tra;

  auto* s = app.add_subcommand(
      "simulate", "Evolve a walker and write the observable series");
  s->add_option("--graph", sim.graph, "lattice, path:N or cycle:N")->required();
  s->add_option("--start", sim.start, "initial vertex")->required();
  s->add_option("--g", sim.g, "nonlinearity coefficient")
      ->capture_default_str();
  s->add_option("--t", sim.t_end, "end time")->required();
  sim.iflags.attach(s);
  s->add_option("--format", sim.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  s->add_option("--out", sim.out, "output path, - for stdout")
      ->capture_default_str();

  auto* w = app.add_subcommand(
      "sweep", "Time-averaged trapping probability over a range of g");
  w->add_option("--graph", swp.graph, "lattice, path:N or cycle:N")->required();
  w->add_option("--start", swp.start, "initial vertex")->required();
  w->add_option("--g-range", swp.g_range, "g values as min:max:step");
  w->add_option("--g-list", swp.g_list, "comma-separated g values");
  w->add_option("--T", swp.total_time, "total simulation time")
      ->capture_default_str();
  w->add_option("--M", swp.samples, "averaging sample count")
      ->capture_default_str();
  w->add_option("--jobs", swp.jobs, "parallel workers, 0 = all processors")
      ->envname("NLQWALK_JOBS")
      ->capture_default_str();
  swp.iflags.attach(w);
  w->add_option("--format", swp.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  w->add_option("--out", swp.out, "output path, - for stdout")
      ->capture_default_str();

  auto* b = app.add_subcommand("bound",
                               "Trapping bound: roots of f(x) = |g| for a "
                               "given |g|, or the |g| for a target probability");
  b->add_option("--deg", bnd.deg, "degree of the start vertex")->required();
  b->add_option("--g", bnd.g_abs, "|g| to solve f(x) = |g| for");
  b->add_option("--target", bnd.p_target, "trapping probability to guarantee");
  b->add_option("--out", bnd.out, "output path, - for stdout")
      ->capture_default_str();

  auto* t = app.add_subcommand("transfer",
                               "Trap, release and re-trap a walker, or run a "
                               "custom g schedule from a JSON file");
  t->add_option("--graph", tra.graph, "lattice, path:N or cycle:N")
      ->capture_default_str();
  t->add_option("--source", tra.source, "protocol source vertex")
      ->capture_default_str();
  t->add_option("--target", tra.target, "protocol target vertex")
      ->capture_default_str();
  t->add_option("--g-trap", tra.g_trap, "nonlinearity during the hold phases")
      ->capture_default_str();
  t->add_option("--hold-in", tra.hold_in, "duration of the initial hold")
      ->capture_default_str();
  t->add_option("--transfer-time", tra.transfer_time,
                "release duration (default pi/sqrt(2))");
  t->add_option("--hold-out", tra.hold_out, "duration of the final hold")
      ->capture_default_str();
  t->add_option("--schedule", tra.schedule_file,
                "JSON schedule file; runs it instead of the protocol");
  t->add_option("--start", tra.start, "initial vertex for --schedule runs")
      ->capture_default_str();
  tra.iflags.attach(t);
  t->add_option("--format", tra.format, "series format, csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  t->add_option("--out", tra.out, "report path (series path in --schedule mode)")
      ->capture_default_str();
  t->add_option("--series-out", tra.series_out,
                "also write the full series of the protocol run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim);
    if (w->parsed()) return cmd_sweep(swp);
    if (b->parsed()) return cmd_bound(bnd);
    if (t->parsed()) return cmd_transfer(tra);
  } catch (const StiffnessError& e) {
    std::cerr << "integration failed: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
