#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vsm/mechanism_catalog.hpp"
#include "vsm/spring_model.hpp"
#include "vsm/stiffness_optimization.hpp"
#include "vsm/workspace_metric.hpp"

namespace vsm {

/// Malformed or invalid configuration. Parse errors name the line and column.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpringSettings {
  double a = 5.0;
  double gamma_max = std::numbers::pi;
  SpringLaw law = SpringLaw::Additive;

  friend bool operator==(const SpringSettings&, const SpringSettings&) = default;
};

struct OutputPaths {
  std::string sweep = "sweep.csv";
  std::string table = "table";  ///< stem; `table` writes <stem>.csv and <stem>.json

  friend bool operator==(const OutputPaths&, const OutputPaths&) = default;
};

struct RunConfig {
  std::vector<DesignId> designs{kAllDesigns.begin(), kAllDesigns.end()};
  std::vector<DesignGeometry> geometries{{0.5, 0.25, 0.5}, {0.4, 0.4, 0.5}};
  BaseOffsets base_offsets;
  SpringSettings spring;
  GridSettings grid;
  OptimizerSettings optimizer;
  LogBase log_base = LogBase::Natural;
  std::array<double, 2> load{0.0, 0.0};
  int threads = 1;
  OutputPaths output;

  [[nodiscard]] SpringModel spring_model() const;
  [[nodiscard]] MetricOptions metric_options() const;
  [[nodiscard]] MechanismDesign design(DesignId id, std::size_t geometry_index = 0) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses a JSON document; `//` and `/* */` comments are allowed. Keys that
/// are absent keep their defaults, unknown keys are rejected.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Effective configuration as plain JSON (every field present).
std::string config_to_json(const RunConfig& config);

/// The default configuration with a comment on every field.
std::string defaults_document();

}  // namespace vsm
