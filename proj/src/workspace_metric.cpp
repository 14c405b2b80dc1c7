#include "vsm/workspace_metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vsm/error.hpp"
#include "vsm/parallel.hpp"
#include "vsm/parallel_jacobian.hpp"

namespace vsm {

namespace {

constexpr double kMinDeterminant = 1e-300;

double log_in(double value, LogBase base) { return base == LogBase::Natural ? std::log(value) : std::log10(value); }

/// Symmetric coordinate: the i-th and (n-1-i)-th samples are exact negatives.
double grid_coordinate(double half_width, int i, int n) {
  return half_width * static_cast<double>(2 * i - (n - 1)) / static_cast<double>(n - 1);
}

}  // namespace

std::string_view to_string(PointStatus status) {
  switch (status) {
    case PointStatus::Ok: return "ok";
    case PointStatus::Unreachable: return "unreachable";
    case PointStatus::IllConditioned: return "ill_conditioned";
    case PointStatus::LegSingular: return "leg_singular";
  }
  return "unknown";
}

std::string_view to_string(LogBase base) { return base == LogBase::Natural ? "natural" : "decimal"; }

std::optional<LogBase> parse_log_base(std::string_view text) {
  if (text == "natural") return LogBase::Natural;
  if (text == "decimal") return LogBase::Decimal;
  return std::nullopt;
}

std::size_t WorkspaceGrid::feasible_count() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const GridPoint& p) { return p.feasible(); }));
}

PointStatus classify_point(const MechanismDesign& design, const Point2& x, const BranchVector& branch, double cutoff,
                           double* condition) {
  if (condition) *condition = 0.0;
  const auto state = try_full_state(design, x, branch);
  if (!state) return PointStatus::Unreachable;
  for (std::size_t i = 0; i < design.legs.size(); ++i) {
    const Matrix2 jl = leg_jacobian(design.legs[i].geometry, state->legs[i]);
    if (!(std::abs(jl.determinant()) > kLegSingularTolerance)) return PointStatus::LegSingular;
  }
  const auto parts = jacobian_parts(design, x, *state);
  Eigen::MatrixXd j;
  try {
    j = parallel_jacobian(parts.jx, parts.jq);
  } catch (const Error&) {
    return PointStatus::IllConditioned;
  }
  const double ci = condition_index(j);
  if (condition) *condition = ci;
  if (!(ci >= cutoff)) return PointStatus::IllConditioned;
  return PointStatus::Ok;
}

WorkspaceGrid workspace_grid(const MechanismDesign& design, const BranchVector& branch, int nx, int ny,
                             double cutoff) {
  if (nx < 2 || ny < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 samples per axis");
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw Error(ErrorCode::InvalidArgument, "cutoff must lie in (0, 1)");
  if (design.legs.empty()) throw Error(ErrorCode::InvalidArgument, "design has no legs");
  const LegGeometry& g = design.legs.front().geometry;
  WorkspaceGrid grid;
  grid.half_width = design.e + g.r + g.l;
  grid.nx = nx;
  grid.ny = ny;
  grid.points.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      GridPoint p;
      p.x = Point2(grid_coordinate(grid.half_width, ix, nx), grid_coordinate(grid.half_width, iy, ny));
      p.status = classify_point(design, p.x, branch, cutoff, &p.condition_index);
      grid.points.push_back(p);
    }
  }
  return grid;
}

double stiffness_variation(const StiffnessMatrix& k_max, const StiffnessMatrix& k_min, LogBase base) {
  const double det_max = k_max.determinant();
  const double det_min = k_min.determinant();
  if (!(det_max > kMinDeterminant) || !(det_min > kMinDeterminant)) {
    throw Error(ErrorCode::DegenerateStiffness, "stiffness determinant is not positive");
  }
  return log_in(det_max, base) - log_in(det_min, base);
}

PointMetric point_metric(const MechanismDesign& design, const Point2& x, const BranchVector& branch,
                         const MetricOptions& options) {
  const auto k_min = minimize_det_Kx(design, x, branch, options.load, options.optimizer);
  const auto k_max = maximize_det_Kx(design, x, branch, options.load, options.optimizer);
  PointMetric m;
  m.sv = stiffness_variation(k_max.kx, k_min.kx, options.log_base);
  m.logdet_min = log_in(k_min.kx.determinant(), options.log_base);
  m.logdet_max = log_in(k_max.kx.determinant(), options.log_base);
  return m;
}

MetricResult wssm(const MechanismDesign& design, const BranchVector& branch, const WorkspaceGrid& grid,
                  const MetricOptions& options) {
  MetricResult result;
  result.design = design.id;
  result.branch = branch;
  if (!design.legs.empty()) {
    result.geometry = {design.legs.front().geometry.r, design.legs.front().geometry.l, design.e};
  }
  result.samples.assign(grid.points.size(), std::nullopt);

  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    if (grid.points[i].feasible()) feasible.push_back(i);
  }
  if (feasible.empty()) throw Error(ErrorCode::EmptyWorkspace, "no feasible grid point");

  parallel_for(feasible.size(), options.threads, [&](std::size_t n) {
    const std::size_t i = feasible[n];
    result.samples[i] = point_metric(design, grid.points[i].x, branch, options);
  });

  result.sv_grid.reserve(feasible.size());
  for (std::size_t i : feasible) result.sv_grid.push_back(result.samples[i]->sv);
  // fixed-order summation keeps the mean independent of the thread count
  double sum = 0.0;
  for (double sv : result.sv_grid) sum += sv;
  result.wssm = sum / static_cast<double>(result.sv_grid.size());
  return result;
}

std::vector<TableCell> metric_table(const std::vector<DesignGeometry>& geometries, const std::vector<DesignId>& designs,
                                    const SpringModel& spring, const BaseOffsets& offsets, const GridSettings& grid,
                                    const MetricOptions& options, const CellCallback& on_cell) {
  std::vector<TableCell> cells;
  for (const DesignGeometry& geometry : geometries) {
    for (DesignId id : designs) {
      const MechanismDesign design = make_design(id, geometry, spring, offsets);
      for (const BranchVector& branch : branch_vectors(design)) {
        TableCell cell;
        cell.geometry = geometry;
        cell.design = id;
        cell.branch = branch;
        try {
          const WorkspaceGrid ws = workspace_grid(design, branch, grid.nx, grid.ny, grid.cutoff);
          cell.feasible_points = ws.feasible_count();
          cell.wssm = wssm(design, branch, ws, options).wssm;
        } catch (const Error& err) {
          cell.error = to_string(err.code());
        }
        if (on_cell) on_cell(cell);
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

}  // namespace vsm
