#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsm/elastic_stiffness.hpp"
#include "vsm/mechanism_catalog.hpp"
#include "vsm/stiffness_optimization.hpp"

namespace vsm {

enum class PointStatus { Ok, Unreachable, IllConditioned, LegSingular };

std::string_view to_string(PointStatus status);

enum class LogBase { Natural, Decimal };

std::string_view to_string(LogBase base);
std::optional<LogBase> parse_log_base(std::string_view text);

struct GridPoint {
  Point2 x = Point2::Zero();
  PointStatus status = PointStatus::Unreachable;
  double condition_index = 0.0;

  [[nodiscard]] bool feasible() const { return status == PointStatus::Ok; }
};

/// Uniform nx * ny samples of [-h, h]^2 with h = e + r + l, stored y-major.
struct WorkspaceGrid {
  double half_width = 0.0;
  int nx = 0;
  int ny = 0;
  std::vector<GridPoint> points;

  [[nodiscard]] std::size_t feasible_count() const;
};

/// Reachability, leg singularity and condition-index test at one task point.
PointStatus classify_point(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                           double cutoff, double* condition = nullptr);

WorkspaceGrid workspace_grid(const MechanismDesign& design, const BranchVector& branch, int nx, int ny,
                             double cutoff = 1e-4);

/// log(det K_max / det K_min). Throws Error(DegenerateStiffness) if either
/// determinant is <= 1e-300.
double stiffness_variation(const StiffnessMatrix& k_max, const StiffnessMatrix& k_min,
                           LogBase base = LogBase::Natural);

struct MetricOptions {
  ExternalLoad load;
  OptimizerSettings optimizer;
  LogBase log_base = LogBase::Natural;
  int threads = 1;
};

struct PointMetric {
  double logdet_min = 0.0;
  double logdet_max = 0.0;
  double sv = 0.0;
};

PointMetric point_metric(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                         const MetricOptions& options);

struct MetricResult {
  DesignId design = DesignId::ViaSea;
  BranchVector branch;
  DesignGeometry geometry;
  /// One entry per grid point; nullopt where the point is infeasible.
  std::vector<std::optional<PointMetric>> samples;
  /// sv at the feasible points, in grid order.
  std::vector<double> sv_grid;
  double wssm = 0.0;
};

/// Mean of sv over the feasible grid points. Throws Error(EmptyWorkspace).
MetricResult wssm(const MechanismDesign& design, const BranchVector& branch, const WorkspaceGrid& grid,
                  const MetricOptions& options);

struct GridSettings {
  int nx = 61;
  int ny = 61;
  double cutoff = 1e-4;

  friend bool operator==(const GridSettings&, const GridSettings&) = default;
};

struct TableCell {
  DesignGeometry geometry;
  DesignId design = DesignId::ViaSea;
  BranchVector branch;
  std::size_t feasible_points = 0;
  std::optional<double> wssm;
  std::string error;  ///< set when wssm is empty
};

/// Called after each completed cell (for progress reporting).
using CellCallback = std::function<void(const TableCell&)>;

/// wssm for every geometry x design x branch vector, in that nesting order.
std::vector<TableCell> metric_table(const std::vector<DesignGeometry>& geometries, const std::vector<DesignId>& designs,
                                    const SpringModel& spring, const BaseOffsets& offsets, const GridSettings& grid,
                                    const MetricOptions& options, const CellCallback& on_cell = {});

}  // namespace vsm
