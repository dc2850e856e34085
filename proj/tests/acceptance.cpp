// Acceptance suite: one PASS/FAIL line per criterion, full-size runs.
//
// A criterion marked "known" is reproduced faithfully but is expected to
// fail with this discretization; it is reported and does not decide the
// exit status.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slelab/loewner.hpp"
#include "slelab/sde.hpp"
#include "slelab_cli/config.hpp"
#include "slelab_cli/run.hpp"

namespace fs = std::filesystem;
using namespace slelab;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> body;
  bool known_failure = false;
};

fs::path g_configs;
fs::path g_out;
unsigned g_threads = 1;

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

cli::RunOutcome run_config(const std::string& file, const std::string& tag, unsigned threads) {
  cli::CommandOptions options;
  options.threads = threads;
  options.out = g_out / tag;
  fs::remove_all(*options.out);
  return cli::run(cli::load_config(g_configs / file), options);
}

// Passes when the report passes; the detail lists every check.
Outcome report_criterion(const std::string& file) {
  const auto outcome = run_config(file, fs::path(file).stem().string(), g_threads);
  Outcome o;
  o.passed = outcome.report.passed;
  for (const Check& c : outcome.report.checks) {
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += c.name + "=" + fmt(c.statistic) + " " + c.comparison + " " + fmt(c.threshold);
    if (!c.required) o.detail += " (info)";
  }
  return o;
}

Outcome slit_and_round_trip() {
  const double dt = 1e-4;
  DrivingPath zero;
  zero.dt = dt;
  zero.values.assign(10001, 0.0);
  const TracePath tr = chordal_trace(zero);
  double worst_trace = 0.0;
  for (std::size_t k = 0; k < tr.points.size(); ++k) {
    worst_trace = std::max(worst_trace, std::abs(tr.points[k] - Complex(0.0, 2.0 * std::sqrt(tr.times[k]))));
  }

  double worst_round_trip = 0.0;
  for (double kappa : {2.0, 6.0}) {
    SleConfig cfg;
    cfg.kappa = kappa;
    cfg.dt = dt;
    cfg.horizon = 1.0;
    cfg.seed = 99;
    const SampledPath s = sample_driving(cfg);
    const LoewnerChain chain(s.driving);
    double height = 0.0;
    double lo = 0.0, hi = 0.0;
    for (const Complex& z : chordal_trace(s.driving).points) {
      height = std::max(height, z.imag());
      lo = std::min(lo, z.real());
      hi = std::max(hi, z.real());
    }
    for (int i = 0; i <= 10; ++i) {
      for (double above : {0.1, 0.5, 2.0}) {
        const Complex z(lo - 1.0 + (hi - lo + 2.0) * i / 10.0, height + above);
        const FlowResult f = chain.forward(z, 1.0);
        if (f.swallowed()) return {false, "test point swallowed"};
        worst_round_trip = std::max(worst_round_trip, std::abs(chain.inverse(f.value, 1.0) - z));
      }
    }
  }
  Outcome o;
  o.passed = worst_trace <= 5.0 * std::sqrt(dt) && worst_round_trip <= 1e-6;
  o.detail = "max |gamma(t) - 2i sqrt t| = " + fmt(worst_trace) + " <= " + fmt(5.0 * std::sqrt(dt)) +
             "; max round-trip error = " + fmt(worst_round_trip) + " <= 1e-06";
  return o;
}

Outcome hydrodynamic() {
  SleConfig cfg;
  cfg.kappa = 6.0;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  cfg.seed = 7;
  const SampledPath s = sample_driving(cfg);
  const Complex z(0.0, 1e4);
  const Complex phi = chordal_forward_map(s.driving, z, 1.0).value;
  const double err = std::abs(phi - (z + 2.0 / z));
  return {err <= 1e-6, "|phi(1, 1e4 i) - (z + 2/z)| = " + fmt(err) + " <= 1e-06"};
}

Outcome reproducible(const std::string& file) {
  const std::string stem = fs::path(file).stem().string();
  (void)run_config(file, "repro-1-" + stem, 1);
  (void)run_config(file, "repro-3-" + stem, 3);
  const std::string a = slurp(g_out / ("repro-1-" + stem) / "report.json");
  const std::string b = slurp(g_out / ("repro-3-" + stem) / "report.json");
  return {!a.empty() && a == b, "report.json with --threads 1 and 3 " + std::string(a == b ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks for sle-lab"};
  std::string configs = SLELAB_CONFIG_DIR;
  std::string out = "acceptance-out";
  std::vector<std::string> only;
  app.add_option("--configs", configs, "Directory with the acceptance configs");
  app.add_option("--out", out, "Directory for run outputs");
  app.add_option("--threads", g_threads, "Worker threads");
  app.add_option("--only", only, "Run only criteria whose name contains one of these strings");
  CLI11_PARSE(app, argc, argv);
  g_configs = configs;
  g_out = out;

  auto from = [](const std::string& file) { return [file] { return report_criterion(file); }; };
  const std::vector<Criterion> criteria = {
      {"solver: slit trace and round trip", slit_and_round_trip},
      {"solver: hydrodynamic normalization", hydrodynamic},
      {"density: kappa=2, rho=-2,-2", from("density-k2.yaml")},
      {"density: kappa=6, rho=0,0", from("density-k6.yaml")},
      {"mixture: kappa=6, t0=0.5", from("mixture-k6.yaml")},
      {"duality: kappa=6, x=1 signs", from("duality-k6.yaml")},
      {"duality: kappa=8, x=1 near endpoint", from("duality-k8.yaml"), true},
      {"dimension: kappa=8/3 trace", from("dimension-trace-k83.yaml")},
      {"dimension: kappa=6 hull boundary at T1", from("dimension-hull-k6.yaml")},
      {"limits: case 13 escapes to -inf", from("limits-case13.yaml")},
      {"limits: case 11 converges to p0", from("limits-case11.yaml")},
      {"limits: case 33 symmetric split", from("limits-case33.yaml")},
      {"scaling: kappa=2, a=2", from("scaling-k2.yaml")},
      {"scaling: kappa=6, a=2", from("scaling-k6.yaml")},
      {"reproducibility: scaling kappa=6 across threads", [] { return reproducible("scaling-k6.yaml"); }},
      {"reproducibility: limits case 13 across threads", [] { return reproducible("limits-case13.yaml"); }},
  };

  int unexpected = 0;
  int ran = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty()) {
      bool keep = false;
      for (const auto& s : only) keep = keep || c.name.find(s) != std::string::npos;
      if (!keep) continue;
    }
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.passed ? "PASS" : "FAIL") << (c.known_failure ? " [known]" : "") << "  " << c.name << "  ("
              << fmt(secs) << " s)  " << o.detail << std::endl;
    if (!o.passed && !c.known_failure) ++unexpected;
  }
  std::cout << ran << " criteria, " << unexpected << " unexpected failures" << std::endl;
  return unexpected == 0 ? 0 : 1;
}
