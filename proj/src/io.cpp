#include "fracdiff/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fracdiff {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json tail_json(const Field& f) {
  if (!f.tail) return nullptr;
  return json{{"A_minus", f.tail->left_amplitude},
              {"A_plus", f.tail->right_amplitude},
              {"gamma", f.tail->decay_exponent},
              {"R_t", f.tail->activation_radius}};
}

std::optional<TailModel> tail_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  TailModel t;
  t.left_amplitude = j.at("A_minus").get<double>();
  t.right_amplitude = j.at("A_plus").get<double>();
  t.decay_exponent = j.at("gamma").get<double>();
  t.activation_radius = j.at("R_t").get<double>();
  return t;
}

}  // namespace

void write_field_csv(const fs::path& path, const Field& f) {
  std::ofstream out(path);
  if (!out) throw Error("write_field_csv: cannot open " + path.string());
  out << "x,value\n";
  for (int i = 0; i < f.grid.n_points; ++i)
    out << fmt17(f.grid.x(i)) << ',' << fmt17(f.values[i]) << '\n';

  json side{{"L", f.grid.half_width},
            {"n_points", f.grid.n_points},
            {"tail", tail_json(f)}};
  std::ofstream sj(path.string() + ".json");
  sj << side.dump(2) << '\n';
}

Field read_field_csv(const fs::path& path) {
  std::ifstream sj(path.string() + ".json");
  if (!sj) throw ParseError("read_field_csv: missing sidecar for " + path.string());
  json side = json::parse(sj, nullptr, false);
  if (side.is_discarded())
    throw ParseError("read_field_csv: invalid sidecar JSON");
  Grid1D grid(side.at("L").get<double>(), side.at("n_points").get<int>());

  std::ifstream in(path);
  if (!in) throw ParseError("read_field_csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,value", 0) != 0)
    throw ParseError("read_field_csv: bad header in " + path.string());
  Vector v(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    if (!std::getline(in, line))
      throw ParseError("read_field_csv: truncated file " + path.string());
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("read_field_csv: malformed row " + line);
    v[i] = std::stod(line.substr(comma + 1));
  }
  return Field(grid, std::move(v), tail_from_json(side.at("tail")));
}

void write_trajectory(const fs::path& dir, const Trajectory& traj, double s,
                      double n) {
  fs::create_directories(dir);
  for (std::size_t k = 0; k < traj.size(); ++k)
    write_field_csv(dir / ("t_" + std::to_string(k) + ".csv"), traj.states[k]);
  json manifest{{"eps", traj.eps},
                {"s", s},
                {"n", n},
                {"times", traj.times},
                {"records",
                 {{"mass", traj.mass},
                  {"sup_norm", traj.sup_norm},
                  {"min_value", traj.min_value}}}};
  std::ofstream out(dir / "trajectory.json");
  out << manifest.dump(2) << '\n';
}

Trajectory read_trajectory(const fs::path& dir) {
  std::ifstream in(dir / "trajectory.json");
  if (!in) throw ParseError("read_trajectory: missing manifest in " + dir.string());
  json manifest = json::parse(in, nullptr, false);
  if (manifest.is_discarded())
    throw ParseError("read_trajectory: invalid manifest JSON");
  Trajectory traj;
  traj.eps = manifest.at("eps").get<double>();
  traj.times = manifest.at("times").get<std::vector<double>>();
  traj.mass = manifest.at("records").at("mass").get<std::vector<double>>();
  traj.sup_norm = manifest.at("records").at("sup_norm").get<std::vector<double>>();
  traj.min_value = manifest.at("records").at("min_value").get<std::vector<double>>();
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    traj.states.push_back(read_field_csv(dir / ("t_" + std::to_string(k) + ".csv")));
  return traj;
}

void write_profile_csv(const fs::path& path, const SelfSimilarProfile& p) {
  std::ofstream out(path);
  if (!out) throw Error("write_profile_csv: cannot open " + path.string());
  out << "xi,F\n";
  for (int i = 0; i < p.xi.size(); ++i)
    out << fmt17(p.xi[i]) << ',' << fmt17(p.F[i]) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("write_text: cannot open " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

StepperConfig ExperimentConfig::stepper(FracOrder order) const {
  StepperConfig cfg;
  cfg.dt = (dt > 0.0) ? dt : default_dt(grid(), order);
  cfg.dt_min = dt_min;
  cfg.dt_max = dt_max;
  cfg.newton_tol = newton_tol;
  cfg.newton_max_iter = newton_max_iter;
  cfg.adaptive = adaptive;
  return cfg;
}

Field ExperimentConfig::initial_data() const {
  const Grid1D g = grid();
  if (data_kind == "bump") return bump_field(g, mass, width, center);
  if (data_kind == "cauchy_tail") return cauchy_tail_field(g, mass, width, q);
  if (data_kind == "vss_like") {
    // rounded profile (1 + x^2)^(-s/(1+n)) shaped datum
    return cauchy_tail_field(g, mass, width, 2.0 * s / (1.0 + n));
  }
  if (data_kind == "custom_csv") return read_field_csv(data_path);
  throw ParseError("unknown data kind: " + data_kind);
}

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"model", {"s", "n"}},
    {"grid", {"half_width", "n_points"}},
    {"data", {"kind", "mass", "width", "center", "q", "path"}},
    {"ladder", {"eps_max", "eps_min", "ratio"}},
    {"time", {"t_end", "records"}},
    {"stepper",
     {"dt", "dt_min", "dt_max", "newton_tol", "newton_max_iter", "adaptive"}},
    {"output", {"dir"}},
    {"checks", {"names"}},
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError("config: bad numeric value for " + key + ": " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError("config: bad boolean value for " + key + ": " + v);
}

}  // namespace

ExperimentConfig parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open " + path.string());
  ExperimentConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("config: malformed section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (!kSchema.count(section))
        throw ParseError("config: unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty())
      throw ParseError("config: expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!kSchema.at(section).count(key))
      throw ParseError("config: unknown key " + key + " in [" + section + "]");

    const std::string id = section + "." + key;
    if (id == "model.s") cfg.s = to_double(id, val);
    else if (id == "model.n") cfg.n = to_double(id, val);
    else if (id == "grid.half_width") cfg.half_width = to_double(id, val);
    else if (id == "grid.n_points") cfg.n_points = static_cast<int>(to_double(id, val));
    else if (id == "data.kind") cfg.data_kind = val;
    else if (id == "data.mass") cfg.mass = to_double(id, val);
    else if (id == "data.width") cfg.width = to_double(id, val);
    else if (id == "data.center") cfg.center = to_double(id, val);
    else if (id == "data.q") cfg.q = to_double(id, val);
    else if (id == "data.path") cfg.data_path = val;
    else if (id == "ladder.eps_max") cfg.eps_max = to_double(id, val);
    else if (id == "ladder.eps_min") cfg.eps_min = to_double(id, val);
    else if (id == "ladder.ratio") cfg.eps_ratio = to_double(id, val);
    else if (id == "time.t_end") cfg.t_end = to_double(id, val);
    else if (id == "time.records") cfg.records = static_cast<int>(to_double(id, val));
    else if (id == "stepper.dt") cfg.dt = to_double(id, val);
    else if (id == "stepper.dt_min") cfg.dt_min = to_double(id, val);
    else if (id == "stepper.dt_max") cfg.dt_max = to_double(id, val);
    else if (id == "stepper.newton_tol") cfg.newton_tol = to_double(id, val);
    else if (id == "stepper.newton_max_iter")
      cfg.newton_max_iter = static_cast<int>(to_double(id, val));
    else if (id == "stepper.adaptive") cfg.adaptive = to_bool(id, val);
    else if (id == "output.dir") cfg.out_dir = val;
    else if (id == "checks.names") {
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) cfg.checks.push_back(item);
      }
    }
  }
  if (!(cfg.s > 0.0 && cfg.s < 1.0)) throw ParseError("config: s must lie in (0,1)");
  if (cfg.n < 0.0) throw ParseError("config: n must be >= 0");
  if (cfg.half_width <= 0.0) throw ParseError("config: half_width must be positive");
  if (cfg.n_points < 3 || cfg.n_points % 2 == 0)
    throw ParseError("config: n_points must be odd and >= 3");
  if (cfg.t_end <= 0.0) throw ParseError("config: t_end must be positive");
  return cfg;
}

}  // namespace fracdiff
