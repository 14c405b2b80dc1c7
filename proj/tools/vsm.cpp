#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vsm/commands.hpp"
#include "vsm/config.hpp"
#include "vsm/error.hpp"

namespace {

std::optional<vsm::Point2> parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return std::nullopt;
  const std::string xs = text.substr(0, comma);
  const std::string ys = text.substr(comma + 1);
  char* end = nullptr;
  const double x = std::strtod(xs.c_str(), &end);
  if (xs.empty() || *end != '\0') return std::nullopt;
  const double y = std::strtod(ys.c_str(), &end);
  if (ys.empty() || *end != '\0') return std::nullopt;
  return vsm::Point2(x, y);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stiffness analysis of planar 2-DOF variable stiffness mechanisms"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  int threads = 0;
  bool print_defaults = false;
  app.add_option("--config", config_path, "configuration file (JSON with comments)");
  app.add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
  app.add_flag("--print-defaults", print_defaults, "print the default configuration and exit");

  std::string design_name;
  std::string branch_text;
  std::string point_text;
  std::string out_path;
  double perturbation = 0.0;

  auto* analyze = app.add_subcommand("analyze", "stiffness report at one task point (JSON on stdout)");
  analyze->add_option("--design", design_name, "design id")->required();
  analyze->add_option("--branch", branch_text, "branch string such as 1121 (default all 1)");
  analyze->add_option("--point", point_text, "task point x,y")->required();

  auto* sweep = app.add_subcommand("sweep", "per-point logdet and sv over the workspace grid (CSV)");
  sweep->add_option("--design", design_name, "design id")->required();
  sweep->add_option("--branch", branch_text, "branch string such as 1121 (default all 1)");
  sweep->add_option("--out", out_path, "CSV path (default from config)");

  auto* table = app.add_subcommand("table", "wssm for every design, branch and geometry (CSV + JSON)");
  table->add_option("--out", out_path, "output stem (default from config)");

  auto* validate = app.add_subcommand("validate", "run the numerical self-checks");
  validate->add_option("--perturb-jacobian", perturbation, "offset added to analytic Jacobians")->group("");

  auto* config_cmd = app.add_subcommand("config", "configuration utilities");
  config_cmd->add_flag("--print-defaults", print_defaults, "print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? vsm::kExitOk : vsm::kExitConfig;
  }

  if (print_defaults) {
    std::cout << vsm::defaults_document();
    return vsm::kExitOk;
  }
  if (app.get_subcommands().empty() || config_cmd->parsed()) {
    std::cerr << app.help();
    return vsm::kExitConfig;
  }

  vsm::RunConfig config;
  try {
    if (!config_path.empty()) config = vsm::load_config(config_path);
  } catch (const vsm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return vsm::kExitConfig;
  }
  if (threads > 0) config.threads = threads;

  try {
    if (validate->parsed()) {
      vsm::ValidationOptions options;
      options.jacobian_perturbation = perturbation;
      return vsm::cmd_validate(config, options, std::cout, std::cerr);
    }
    if (table->parsed()) {
      return vsm::cmd_table(config, out_path.empty() ? config.output.table : out_path, std::cerr);
    }

    const auto design = vsm::parse_design_key(design_name);
    if (!design) {
      std::cerr << "unknown design \"" << design_name << "\"\n";
      return vsm::kExitConfig;
    }
    const std::size_t legs = config.design(*design).leg_count();
    const auto branch = branch_text.empty() ? std::optional(vsm::BranchVector::uniform(legs))
                                            : vsm::BranchVector::parse(branch_text);
    if (!branch) {
      std::cerr << "invalid branch \"" << branch_text << "\"\n";
      return vsm::kExitConfig;
    }
    if (analyze->parsed()) {
      const auto x = parse_point(point_text);
      if (!x) {
        std::cerr << "invalid point \"" << point_text << "\", expected x,y\n";
        return vsm::kExitConfig;
      }
      return vsm::cmd_analyze(config, *design, *branch, *x, std::cout, std::cerr);
    }
    return vsm::cmd_sweep(config, *design, *branch, out_path.empty() ? config.output.sweep : out_path, std::cerr);
  } catch (const vsm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return vsm::kExitConfig;
  }
}
