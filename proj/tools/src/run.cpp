#include "slelab_cli/run.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>

#include "slelab/hull.hpp"
#include "slelab/loewner.hpp"
#include "slelab/parallel.hpp"

namespace slelab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Files written by one run; removed again unless the run completes.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    if (created_dir_) fs::remove(dir_, ec);  // only succeeds when empty
  }

  void open() {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    }
    if (!fs::is_directory(dir_)) throw std::runtime_error("output_dir: " + dir_.string() + " is not a directory");
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    files_.push_back(path);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    if (!f.flush()) throw std::runtime_error("write failed for " + path.string());
  }

  void commit() { committed_ = true; }
  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool created_dir_ = false;
  bool committed_ = false;
};

struct SimulationOutput {
  ExperimentReport report;
  std::string traces;
  std::map<std::string, std::string> curves;
};

void append_curve(std::string& csv, std::size_t sample, const Curve& curve) {
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    csv += std::to_string(sample) + "," + std::to_string(i) + "," + number(curve.points[i].real()) + "," +
           number(curve.points[i].imag()) + "\n";
  }
}

SimulationOutput simulate(const SleConfig& sle, const SimulateParams& p, unsigned threads) {
  struct Sample {
    TracePath trace;
    std::optional<Curve> hull;
    std::optional<std::pair<Curve, Curve>> sides;
    bool stopped = false;
  };
  const auto samples = parallel_map<Sample>(p.n_samples, threads, [&](std::size_t i) {
    const SampledPath path = sample_driving(sle, i, 1);
    Sample s;
    s.trace = trace(path.driving);
    s.stopped = path.stopped_at.has_value();
    const double t = path.driving.horizon();
    if (p.curves == CurveKind::Hull) s.hull = hull_boundary(path.driving, t, p.resolution);
    if (p.curves == CurveKind::LeftRight) s.sides = left_right_boundaries(path.driving, t, p.resolution);
    return s;
  });

  SimulationOutput out;
  out.traces = "sample,t,re,im\n";
  std::string hull = "sample,idx,re,im\n";
  std::string left = hull;
  std::string right = hull;
  std::size_t stopped = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    stopped += s.stopped ? 1 : 0;
    for (std::size_t k = 0; k < s.trace.points.size(); ++k) {
      out.traces += std::to_string(i) + "," + number(s.trace.times[k]) + "," + number(s.trace.points[k].real()) +
                    "," + number(s.trace.points[k].imag()) + "\n";
    }
    if (s.hull) append_curve(hull, i, *s.hull);
    if (s.sides) {
      append_curve(left, i, s.sides->first);
      append_curve(right, i, s.sides->second);
    }
  }
  if (p.curves == CurveKind::Hull) out.curves["curves"] = std::move(hull);
  if (p.curves == CurveKind::LeftRight) {
    out.curves["curves-left"] = std::move(left);
    out.curves["curves-right"] = std::move(right);
  }

  ExperimentReport& r = out.report;
  r.name = "simulate";
  r.seed = sle.seed;
  r.n_samples = p.n_samples;
  r.parameters = {{"kappa", sle.kappa}, {"dt", sle.dt}, {"horizon", sle.horizon},
                  {"n_samples", static_cast<double>(p.n_samples)}};
  r.diagnostics["stopped_by_swallowing"] = static_cast<double>(stopped);
  r.finalize();
  return out;
}

ExperimentReport run_experiment(const RunConfig& config, const RunOptions& run) {
  return std::visit(
      [&](const auto& p) -> ExperimentReport {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DensityParams>) {
          return density_experiment(p, run);
        } else if constexpr (std::is_same_v<P, MixtureParams>) {
          return mixture_experiment(p, run);
        } else if constexpr (std::is_same_v<P, DualityParams>) {
          return duality_boundary_experiment(p, run);
        } else if constexpr (std::is_same_v<P, LimitParams>) {
          return limit_classification_experiment(p, run);
        } else if constexpr (std::is_same_v<P, ScalingParams>) {
          return scaling_invariance_test(p, run);
        } else if constexpr (std::is_same_v<P, DimensionParams>) {
          return dimension_experiment(p, run);
        } else {
          throw std::logic_error("simulate is not a verification experiment");
        }
      },
      config.params);
}

std::string series_csv(const std::vector<double>& values) {
  std::string csv = "idx,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) csv += std::to_string(i) + "," + number(values[i]) + "\n";
  return csv;
}

}  // namespace

std::uint64_t resolve_seed(const RunConfig& config, std::optional<std::uint64_t> cli_seed) {
  if (cli_seed) return *cli_seed;
  if (config.seed_given) return config.sle.seed;
  if (const char* env = std::getenv("SLE_LAB_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ConfigError("SLE_LAB_SEED", "expected an unsigned integer");
    return v;
  }
  return 0;
}

json report_to_json(const ExperimentReport& report, const RunConfig& config, const std::string& hash,
                    const std::vector<std::string>& files) {
  json checks = json::array();
  for (const Check& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"statistic", c.statistic},
                      {"comparison", c.comparison},
                      {"threshold", c.threshold},
                      {"passed", c.passed},
                      {"required", c.required}});
  }
  json j = {{"schema", 1},
            {"name", report.name},
            {"seed", report.seed},
            {"n_samples", report.n_samples},
            {"statistic", report.statistic},
            {"comparison", report.comparison},
            {"threshold", report.threshold},
            {"passed", report.passed},
            {"parameters", report.parameters},
            {"labels", report.labels},
            {"diagnostics", report.diagnostics},
            {"checks", checks},
            {"config", resolved_config(config)},
            {"config_sha256", hash},
            {"files", files}};
  if (config.format == OutputFormat::Json) j["series"] = report.series;
  return j;
}

RunOutcome run(RunConfig config, const CommandOptions& options) {
  config.sle.seed = resolve_seed(config, options.seed);
  config.seed_given = true;
  if (options.out) config.output_dir = *options.out;
  const std::string hash = config_hash(config);
  const std::string tag = hash.substr(0, 12);
  const auto started = std::chrono::steady_clock::now();

  RunOutcome outcome;
  std::map<std::string, std::string> data;  // file name -> content
  if (const auto* sim = std::get_if<SimulateParams>(&config.params)) {
    SimulationOutput s = simulate(config.sle, *sim, options.threads);
    outcome.report = std::move(s.report);
    data["traces-" + tag + ".csv"] = std::move(s.traces);
    for (auto& [name, csv] : s.curves) data[name + "-" + tag + ".csv"] = std::move(csv);
  } else {
    outcome.report = run_experiment(config, RunOptions{config.sle.seed, options.threads});
    if (config.format == OutputFormat::Csv) {
      for (const auto& [name, values] : outcome.report.series) {
        data["series-" + name + "-" + tag + ".csv"] = series_csv(values);
      }
    }
  }
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  outcome.report.runtime = runtime;

  std::vector<std::string> names;
  for (const auto& kv : data) names.push_back(kv.first);
  outcome.report_json = report_to_json(outcome.report, config, hash, names);

  OutputSet files(config.output_dir);
  files.open();
  for (const auto& [name, content] : data) files.write(name, content);
  files.write("report.json", outcome.report_json.dump(2) + "\n");
  const json timing = {{"config_sha256", hash}, {"runtime_seconds", runtime}, {"threads", options.threads}};
  files.write("timing.json", timing.dump(2) + "\n");
  outcome.files = files.files();
  files.commit();
  return outcome;
}

int run_command(const fs::path& config_file, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = load_config(config_file);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  try {
    const RunOutcome outcome = run(std::move(config), options);
    const ExperimentReport& r = outcome.report;
    for (const Check& c : r.checks) {
      out << (c.passed ? "PASS " : "FAIL ") << r.name << "." << c.name << ": " << c.statistic << " " << c.comparison
          << " " << c.threshold << (c.required ? "" : " (informational)") << "\n";
    }
    out << r.name << ": " << (r.passed ? "passed" : "FAILED") << " (" << r.runtime << " s); report in "
        << outcome.files.at(outcome.files.size() - 2).string() << "\n";
    return r.passed ? kExitPassed : kExitFailedChecks;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

}  // namespace slelab::cli
