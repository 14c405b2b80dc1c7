#include "vsm/commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <system_error>

#include <json.hpp>

#include "vsm/error.hpp"
#include "vsm/parallel.hpp"
#include "vsm/parallel_jacobian.hpp"

namespace vsm {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string reason_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unreachable: return "unreachable";
    case ErrorCode::LegSingular: return "leg_singular";
    case ErrorCode::RankDeficient: return "ill_conditioned";
    case ErrorCode::TorqueInfeasible: return "torque_infeasible";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::DegenerateStiffness: return "degenerate_stiffness";
    default: return "error";
  }
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ordered_json optimum_json(const OptimizationResult& r, LogBase base) {
  ordered_json j;
  j["kx"] = matrix_json(r.kx.k);
  j["logdet"] = base == LogBase::Natural ? r.objective : r.objective / std::log(10.0);
  j["u"] = vector_json(r.u);
  j["torques"] = vector_json(r.torques);
  j["sea_deflections"] = r.deflections.sea;
  ordered_json via = ordered_json::array();
  for (const ViaDeflection& v : r.deflections.via) via.push_back({v.gamma1, v.gamma2});
  j["via_deflections"] = via;
  return j;
}

void check_branch(const MechanismDesign& design, const BranchVector& branch) {
  if (branch.size() != design.leg_count()) {
    throw Error(ErrorCode::DimensionMismatch, "branch \"" + branch.to_string() + "\" needs " +
                                                  std::to_string(design.leg_count()) + " entries for " +
                                                  std::string(design_key(design.id)));
  }
}

std::string geometry_label(const DesignGeometry& g) {
  return "r=" + number(g.r) + " l=" + number(g.l) + " e=" + number(g.e);
}

/// Table column labels: four-leg branch vectors, leg 1 varying fastest.
std::vector<std::string> table_columns() {
  std::vector<std::string> out;
  for (int bits = 0; bits < 16; ++bits) {
    std::string s;
    for (int leg = 0; leg < 4; ++leg) s += (bits >> leg) & 1 ? '2' : '1';
    out.push_back(s);
  }
  return out;
}

}  // namespace

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out << content;
    out.close();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::InvalidArgument, "cannot rename onto " + path.string());
  }
}

int cmd_analyze(const RunConfig& config, DesignId id, const BranchVector& branch, const Point2& x, std::ostream& out,
                std::ostream& err) {
  const MechanismDesign design = config.design(id);
  check_branch(design, branch);
  const MetricOptions options = config.metric_options();

  ordered_json report;
  report["design"] = std::string(design_key(id));
  report["branch"] = branch.to_string();
  report["point"] = {x.x(), x.y()};
  auto infeasible = [&](const std::string& reason) {
    report["feasible"] = false;
    report["reason"] = reason;
    out << report.dump(2) << "\n";
    err << "infeasible point: " << reason << "\n";
    return kExitInfeasible;
  };

  double ci = 0.0;
  const PointStatus status = classify_point(design, x, branch, config.grid.cutoff, &ci);
  if (status != PointStatus::Ok) return infeasible(std::string(to_string(status)));

  try {
    const FullState state = full_state(design, x, branch);
    const JacobianBundle bundle = jacobian_bundle(design, x, state);
    const OptimizationResult k_min = minimize_det_Kx(design, x, branch, options.load, options.optimizer);
    const OptimizationResult k_max = maximize_det_Kx(design, x, branch, options.load, options.optimizer);
    const double sv = stiffness_variation(k_max.kx, k_min.kx, options.log_base);
    report["feasible"] = true;
    report["log_base"] = std::string(to_string(options.log_base));
    report["condition_index"] = ci;
    report["jacobian"] = matrix_json(bundle.j);
    report["kernel"] = matrix_json(bundle.kernel);
    report["min"] = optimum_json(k_min, options.log_base);
    report["max"] = optimum_json(k_max, options.log_base);
    report["sv"] = sv;
  } catch (const Error& e) {
    return infeasible(reason_of(e.code()));
  }
  out << report.dump(2) << "\n";
  return kExitOk;
}

std::string sweep_csv(const RunConfig& config, DesignId id, const BranchVector& branch) {
  const MechanismDesign design = config.design(id);
  check_branch(design, branch);
  const MetricOptions options = config.metric_options();
  const WorkspaceGrid grid = workspace_grid(design, branch, config.grid.nx, config.grid.ny, config.grid.cutoff);

  std::vector<std::string> rows(grid.points.size());
  parallel_for(grid.points.size(), options.threads, [&](std::size_t i) {
    const GridPoint& p = grid.points[i];
    std::string row = number(p.x.x()) + "," + number(p.x.y()) + ",";
    if (!p.feasible()) {
      rows[i] = row + "0," + std::string(to_string(p.status)) + ",,,";
      return;
    }
    try {
      const PointMetric m = point_metric(design, p.x, branch, options);
      rows[i] = row + "1,ok," + number(m.logdet_min) + "," + number(m.logdet_max) + "," + number(m.sv);
    } catch (const Error& e) {
      rows[i] = row + "0," + reason_of(e.code()) + ",,,";
    }
  });

  std::string csv = "x,y,feasible,reason,logdet_min,logdet_max,sv\n";
  for (const std::string& row : rows) csv += row + "\n";
  return csv;
}

int cmd_sweep(const RunConfig& config, DesignId id, const BranchVector& branch, const std::filesystem::path& out_path,
              std::ostream& err) {
  const std::string csv = sweep_csv(config, id, branch);
  write_file_atomically(out_path, csv);
  err << "wrote " << out_path.string() << "\n";
  return kExitOk;
}

std::string table_csv(const std::vector<TableCell>& cells) {
  const auto columns = table_columns();
  std::string csv = "r,l,e,design";
  for (const std::string& c : columns) csv += "," + c;
  csv += "\n";

  std::size_t i = 0;
  while (i < cells.size()) {
    const TableCell& head = cells[i];
    std::vector<std::string> values(columns.size(), "-");
    for (; i < cells.size() && cells[i].design == head.design && cells[i].geometry == head.geometry; ++i) {
      const TableCell& cell = cells[i];
      std::string key = cell.branch.to_string();
      key.resize(4, '1');
      for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] == key) values[c] = cell.wssm ? number(*cell.wssm) : cell.error;
      }
    }
    csv += number(head.geometry.r) + "," + number(head.geometry.l) + "," + number(head.geometry.e) + "," +
           std::string(design_key(head.design));
    for (const std::string& v : values) csv += "," + v;
    csv += "\n";
  }
  return csv;
}

std::string table_json(const std::vector<TableCell>& cells) {
  ordered_json root;
  root["geometries"] = ordered_json::array();
  std::size_t i = 0;
  while (i < cells.size()) {
    const DesignGeometry g = cells[i].geometry;
    ordered_json block;
    block["r"] = g.r;
    block["l"] = g.l;
    block["e"] = g.e;
    ordered_json designs = ordered_json::object();
    for (; i < cells.size() && cells[i].geometry == g; ++i) {
      const TableCell& cell = cells[i];
      ordered_json entry;
      entry["feasible_points"] = cell.feasible_points;
      if (cell.wssm) {
        entry["wssm"] = *cell.wssm;
      } else {
        entry["error"] = cell.error;
      }
      designs[std::string(design_key(cell.design))][cell.branch.to_string()] = entry;
    }
    block["designs"] = designs;
    root["geometries"].push_back(block);
  }
  return root.dump(2) + "\n";
}

int cmd_table(const RunConfig& config, const std::filesystem::path& stem, std::ostream& log) {
  auto progress = [&log](const TableCell& cell) {
    log << geometry_label(cell.geometry) << " " << design_key(cell.design) << " " << cell.branch.to_string() << ": "
        << (cell.wssm ? number(*cell.wssm) : cell.error) << "\n";
  };
  const auto cells = metric_table(config.geometries, config.designs, config.spring_model(), config.base_offsets,
                                  config.grid, config.metric_options(), progress);
  std::filesystem::path csv_path = stem;
  std::filesystem::path json_path = stem;
  csv_path += ".csv";
  json_path += ".json";
  write_file_atomically(csv_path, table_csv(cells));
  write_file_atomically(json_path, table_json(cells));
  log << "wrote " << csv_path.string() << " and " << json_path.string() << "\n";
  return kExitOk;
}

int cmd_validate(const RunConfig& config, const ValidationOptions& options, std::ostream& out, std::ostream& err) {
  const auto checks = run_validation(config, options);
  std::string failed;
  for (const CheckResult& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << number(c.value) << " limit=" << short_number(c.limit);
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << "\n";
    if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
  }
  if (!failed.empty()) {
    err << "validation failed: " << failed << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace vsm
