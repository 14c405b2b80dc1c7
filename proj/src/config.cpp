#include "vsm/config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace vsm {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("expected an object");
  }

  [[nodiscard]] const json* find(const char* key) {
    known_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void read(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail_key(key, "expected a number");
      out = v->get<double>();
    }
  }

  void read(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail_key(key, "expected an integer");
      const auto value = v->get<long long>();
      if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
        fail_key(key, "integer out of range");
      }
      out = static_cast<int>(value);
    }
  }

  void read(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail_key(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  template <class Parse, class T>
  void read_enum(const char* key, T& out, Parse parse) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail_key(key, "expected a string");
      const std::string text = v->get<std::string>();
      const auto value = parse(text);
      if (!value) fail_key(key, "unknown value \"" + text + "\"");
      out = *value;
    }
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!known_.count(it.key())) fail("unknown key \"" + it.key() + "\"");
    }
  }

  [[nodiscard]] std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError((path_.empty() ? std::string("config") : path_) + ": " + message);
  }

  [[noreturn]] void fail_key(const std::string& key, const std::string& message) const {
    throw ConfigError(child_path(key) + ": " + message);
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> known_;
};

DesignGeometry read_geometry(const json& node, const std::string& path) {
  Section s(node, path);
  DesignGeometry g;
  s.read("r", g.r);
  s.read("l", g.l);
  s.read("e", g.e);
  s.finish();
  return g;
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate(const RunConfig& c) {
  check(!c.designs.empty(), "designs: at least one design is required");
  check(!c.geometries.empty(), "geometries: at least one geometry is required");
  for (std::size_t i = 0; i < c.geometries.size(); ++i) {
    const DesignGeometry& g = c.geometries[i];
    const std::string where = "geometries[" + std::to_string(i) + "]";
    check(g.r > 0.0 && g.l > 0.0 && g.e > 0.0, where + ": r, l and e must be positive");
  }
  check(c.spring.a > 0.0, "spring.a: must be positive");
  check(c.spring.gamma_max > 0.0, "spring.gamma_max: must be positive");
  check(c.grid.nx >= 2 && c.grid.ny >= 2, "grid: nx and ny must be at least 2");
  check(c.grid.cutoff > 0.0 && c.grid.cutoff < 1.0, "grid.cutoff: must lie in (0, 1)");
  check(c.optimizer.grid_points >= 2, "optimizer.grid_points: must be at least 2");
  check(c.optimizer.refine_iterations >= 0, "optimizer.refine_iterations: must not be negative");
  check(c.optimizer.tolerance > 0.0, "optimizer.tolerance: must be positive");
  check(c.optimizer.via_grid_points >= 2, "optimizer.via_grid_points: must be at least 2");
  check(c.optimizer.via_tolerance > 0.0, "optimizer.via_tolerance: must be positive");
  check(c.threads >= 1, "threads: must be at least 1");
  check(!c.output.sweep.empty() && !c.output.table.empty(), "output: paths must not be empty");
}

ordered_json to_ordered_json(const RunConfig& c) {
  ordered_json j;
  j["designs"] = ordered_json::array();
  for (DesignId id : c.designs) j["designs"].push_back(std::string(design_key(id)));
  j["geometries"] = ordered_json::array();
  for (const DesignGeometry& g : c.geometries) j["geometries"].push_back({{"r", g.r}, {"l", g.l}, {"e", g.e}});
  j["base_offsets"] = {{"two_legs", c.base_offsets.two_legs},
                       {"three_legs", c.base_offsets.three_legs},
                       {"four_legs", c.base_offsets.four_legs}};
  j["spring"] = {{"a", c.spring.a}, {"gamma_max", c.spring.gamma_max}, {"law", std::string(to_string(c.spring.law))}};
  j["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"cutoff", c.grid.cutoff}};
  j["optimizer"] = {{"grid_points", c.optimizer.grid_points},
                    {"refine_iterations", c.optimizer.refine_iterations},
                    {"tolerance", c.optimizer.tolerance},
                    {"via_grid_points", c.optimizer.via_grid_points},
                    {"via_tolerance", c.optimizer.via_tolerance}};
  j["log_base"] = std::string(to_string(c.log_base));
  j["load"] = {c.load[0], c.load[1]};
  j["threads"] = c.threads;
  j["output"] = {{"sweep", c.output.sweep}, {"table", c.output.table}};
  return j;
}

}  // namespace

SpringModel RunConfig::spring_model() const { return SpringModel(spring.a, spring.gamma_max, spring.law); }

MetricOptions RunConfig::metric_options() const {
  MetricOptions options;
  options.load.f = Eigen::Vector2d(load[0], load[1]);
  options.optimizer = optimizer;
  options.log_base = log_base;
  options.threads = threads;
  return options;
}

MechanismDesign RunConfig::design(DesignId id, std::size_t geometry_index) const {
  return make_design(id, geometries.at(geometry_index), spring_model(), base_offsets);
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& err) {
    throw ConfigError(err.what());
  }

  RunConfig c;
  Section top(root, "");
  if (const json* designs = top.find("designs")) {
    if (!designs->is_array()) top.fail_key("designs", "expected an array");
    c.designs.clear();
    for (const json& d : *designs) {
      if (!d.is_string()) top.fail_key("designs", "expected design names");
      const auto id = parse_design_key(d.get<std::string>());
      if (!id) top.fail_key("designs", "unknown design \"" + d.get<std::string>() + "\"");
      c.designs.push_back(*id);
    }
  }
  if (const json* geometries = top.find("geometries")) {
    if (!geometries->is_array()) top.fail_key("geometries", "expected an array");
    c.geometries.clear();
    for (std::size_t i = 0; i < geometries->size(); ++i) {
      c.geometries.push_back(read_geometry((*geometries)[i], "geometries[" + std::to_string(i) + "]"));
    }
  }
  if (const json* node = top.find("base_offsets")) {
    Section s(*node, "base_offsets");
    s.read("two_legs", c.base_offsets.two_legs);
    s.read("three_legs", c.base_offsets.three_legs);
    s.read("four_legs", c.base_offsets.four_legs);
    s.finish();
  }
  if (const json* node = top.find("spring")) {
    Section s(*node, "spring");
    s.read("a", c.spring.a);
    s.read("gamma_max", c.spring.gamma_max);
    s.read_enum("law", c.spring.law, parse_spring_law);
    s.finish();
  }
  if (const json* node = top.find("grid")) {
    Section s(*node, "grid");
    s.read("nx", c.grid.nx);
    s.read("ny", c.grid.ny);
    s.read("cutoff", c.grid.cutoff);
    s.finish();
  }
  if (const json* node = top.find("optimizer")) {
    Section s(*node, "optimizer");
    s.read("grid_points", c.optimizer.grid_points);
    s.read("refine_iterations", c.optimizer.refine_iterations);
    s.read("tolerance", c.optimizer.tolerance);
    s.read("via_grid_points", c.optimizer.via_grid_points);
    s.read("via_tolerance", c.optimizer.via_tolerance);
    s.finish();
  }
  top.read_enum("log_base", c.log_base, parse_log_base);
  if (const json* load = top.find("load")) {
    if (!load->is_array() || load->size() != 2 || !(*load)[0].is_number() || !(*load)[1].is_number()) {
      top.fail_key("load", "expected [fx, fy]");
    }
    c.load = {(*load)[0].get<double>(), (*load)[1].get<double>()};
  }
  top.read("threads", c.threads);
  if (const json* node = top.find("output")) {
    Section s(*node, "output");
    s.read("sweep", c.output.sweep);
    s.read("table", c.output.table);
    s.finish();
  }
  top.finish();
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigError& err) {
    throw ConfigError(path.string() + ": " + err.what());
  }
}

std::string config_to_json(const RunConfig& config) { return to_ordered_json(config).dump(2) + "\n"; }

std::string defaults_document() {
  const RunConfig c;
  const ordered_json j = to_ordered_json(c);
  auto v = [](const ordered_json& node) { return node.dump(); };
  std::ostringstream out;
  out << "// vsm run configuration. JSON with comments; omitted keys take the values shown.\n"
      << "{\n"
      << "  // designs to evaluate: via_sea, dual_via, full_sea_mix, dual_full, three_legs, four_legs\n"
      << "  \"designs\": " << v(j["designs"]) << ",\n"
      << "  // link lengths r (proximal), l (distal) and base circle radius e; analyze and sweep use the first\n"
      << "  \"geometries\": " << v(j["geometries"]) << ",\n"
      << "  // angle of the first base joint on the circle, per leg count (radians)\n"
      << "  \"base_offsets\": {\n"
      << "    \"two_legs\": " << v(j["base_offsets"]["two_legs"]) << ",\n"
      << "    \"three_legs\": " << v(j["base_offsets"]["three_legs"]) << ",\n"
      << "    \"four_legs\": " << v(j["base_offsets"]["four_legs"]) << "\n"
      << "  },\n"
      << "  \"spring\": {\n"
      << "    // torque law coefficient\n"
      << "    \"a\": " << v(j["spring"]["a"]) << ",\n"
      << "    // deflection limit (radians)\n"
      << "    \"gamma_max\": " << v(j["spring"]["gamma_max"]) << ",\n"
      << "    // additive: a*sin(g) + g^3, product: a*sin(g)*g^3\n"
      << "    \"law\": " << v(j["spring"]["law"]) << "\n"
      << "  },\n"
      << "  // workspace samples over [-(e+r+l), e+r+l]^2 and condition-index cutoff\n"
      << "  \"grid\": {\n"
      << "    \"nx\": " << v(j["grid"]["nx"]) << ",\n"
      << "    \"ny\": " << v(j["grid"]["ny"]) << ",\n"
      << "    \"cutoff\": " << v(j["grid"]["cutoff"]) << "\n"
      << "  },\n"
      << "  \"optimizer\": {\n"
      << "    // coarse null-space grid points per dimension\n"
      << "    \"grid_points\": " << v(j["optimizer"]["grid_points"]) << ",\n"
      << "    // pattern-search sweeps after the grid\n"
      << "    \"refine_iterations\": " << v(j["optimizer"]["refine_iterations"]) << ",\n"
      << "    // objective gain per sweep below which the step is halved\n"
      << "    \"tolerance\": " << v(j["optimizer"]["tolerance"]) << ",\n"
      << "    // co-contraction scan samples for antagonistic joints\n"
      << "    \"via_grid_points\": " << v(j["optimizer"]["via_grid_points"]) << ",\n"
      << "    // golden-section bracket width for antagonistic joints\n"
      << "    \"via_tolerance\": " << v(j["optimizer"]["via_tolerance"]) << "\n"
      << "  },\n"
      << "  // logarithm used for sv and logdet values: natural or decimal\n"
      << "  \"log_base\": " << v(j["log_base"]) << ",\n"
      << "  // external task force [fx, fy]\n"
      << "  \"load\": " << v(j["load"]) << ",\n"
      << "  // worker threads; results do not depend on this\n"
      << "  \"threads\": " << v(j["threads"]) << ",\n"
      << "  \"output\": {\n"
      << "    // sweep CSV path (overridden by --out)\n"
      << "    \"sweep\": " << v(j["output"]["sweep"]) << ",\n"
      << "    // table output stem: <stem>.csv and <stem>.json (overridden by --out)\n"
      << "    \"table\": " << v(j["output"]["table"]) << "\n"
      << "  }\n"
      << "}\n";
  return out.str();
}

}  // namespace vsm
