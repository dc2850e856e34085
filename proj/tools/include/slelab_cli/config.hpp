#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "slelab/experiments.hpp"
#include "slelab/sde.hpp"

namespace slelab::cli {

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

enum class Experiment { Simulate, Density, Mixture, Duality, Limits, Scaling, Dimension };
enum class OutputFormat { Csv, Json };

std::string_view to_string(Experiment e) noexcept;
const std::vector<std::string>& experiment_names();
Experiment experiment_from_string(const std::string& name);

enum class CurveKind { None, Hull, LeftRight };

struct SimulateParams {
  std::size_t n_samples = 1;
  CurveKind curves = CurveKind::None;
  std::size_t resolution = 200;
};

using ExperimentParams =
    std::variant<SimulateParams, DensityParams, MixtureParams, DualityParams, LimitParams, ScalingParams,
                 DimensionParams>;

struct RunConfig {
  Experiment experiment = Experiment::Simulate;
  SleConfig sle;
  ExperimentParams params;
  std::filesystem::path output_dir = "sle-lab-out";
  OutputFormat format = OutputFormat::Json;
  bool seed_given = false;
};

/// Parses YAML text (or a file) into a validated RunConfig. The sle block
/// carries kappa, geometry, dt, horizon and force points; experiment
/// parameters that follow from it (rho+-, x, p0, t) are read from there.
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::filesystem::path& file);

/// Canonical resolved configuration: every parameter with its default
/// filled in. Output location and thread count are not part of it.
nlohmann::json resolved_config(const RunConfig& config);

/// Lower-case hex SHA-256 of the compact dump of resolved_config.
std::string config_hash(const RunConfig& config);

}  // namespace slelab::cli
