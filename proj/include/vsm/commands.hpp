#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vsm/config.hpp"
#include "vsm/validation.hpp"
#include "vsm/workspace_metric.hpp"

namespace vsm {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitInfeasible = 2,
  kExitValidation = 3,
};

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

/// JSON report for one task point; exit code 2 when the point is infeasible.
int cmd_analyze(const RunConfig& config, DesignId design, const BranchVector& branch, const Point2& x,
                std::ostream& out, std::ostream& err);

/// CSV of the whole grid: x,y,feasible,reason,logdet_min,logdet_max,sv.
std::string sweep_csv(const RunConfig& config, DesignId design, const BranchVector& branch);
int cmd_sweep(const RunConfig& config, DesignId design, const BranchVector& branch,
              const std::filesystem::path& out_path, std::ostream& err);

std::string table_csv(const std::vector<TableCell>& cells);
std::string table_json(const std::vector<TableCell>& cells);
/// Writes <stem>.csv and <stem>.json.
int cmd_table(const RunConfig& config, const std::filesystem::path& stem, std::ostream& log);

int cmd_validate(const RunConfig& config, const ValidationOptions& options, std::ostream& out, std::ostream& err);

}  // namespace vsm
