#include "circsynth/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "circsynth/errors.hpp"

namespace circsynth {

namespace fs = std::filesystem;

Vec logspace(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2)
    throw ConfigError("bad-grid", "frequency grid needs 0 < min < max and at least 2 points");
  Vec w(points);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int k = 0; k < points; ++k) w(k) = std::pow(10.0, a + (b - a) * k / (points - 1));
  return w;
}

Vec FrequencyGrid::omegas() const { return logspace(omega_min, omega_max, points); }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError("bad-value", "cannot parse '" + v + "' for key '" + key + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw ConfigError("bad-value", "key '" + key + "' expects an integer");
  return static_cast<int>(x);
}

std::vector<std::pair<double, double>> read_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing-file", "cannot open profile file '" + path + "'");
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double t, i;
    if (!(ss >> t >> i)) continue;  // header row
    pts.emplace_back(t, i);
  }
  if (pts.empty()) throw ConfigError("bad-profile", "profile file '" + path + "' has no data rows");
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (!(pts[k].first > pts[k - 1].first))
      throw ConfigError("bad-profile", "profile times must be strictly increasing");
  return pts;
}

void set_run_key(RunConfig& run, const std::string& key, const std::string& v, const std::string& base_dir) {
  if (key == "variant") {
    run.variant = parse_variant(v);
  } else if (key == "r_stable") {
    run.r_stable = to_int(key, v);
    if (run.r_stable < 0) throw ConfigError("bad-value", "r_stable must be >= 0");
  } else if (key == "topology") {
    run.topologies = split_csv_list(v);
  } else if (key == "omega_min") {
    run.grid.omega_min = to_double(key, v);
  } else if (key == "omega_max") {
    run.grid.omega_max = to_double(key, v);
  } else if (key == "omega_points") {
    run.grid.points = to_int(key, v);
  } else if (key == "profile") {
    if (v == "constant") run.profile.kind = ProfileKind::constant;
    else if (v == "sinusoid") run.profile.kind = ProfileKind::sinusoid;
    else if (v == "file") run.profile.kind = ProfileKind::file;
    else throw ConfigError("bad-value", "profile must be constant, sinusoid or file");
  } else if (key == "current") {
    run.profile.value = to_double(key, v);
  } else if (key == "offset") {
    run.profile.offset = to_double(key, v);
  } else if (key == "amplitude") {
    run.profile.amplitude = to_double(key, v);
  } else if (key == "angular_frequency") {
    run.profile.omega = to_double(key, v);
  } else if (key == "profile_file") {
    fs::path p(v);
    if (p.is_relative()) p = fs::path(base_dir) / p;
    run.profile.path = p.string();
  } else if (key == "t_end") {
    run.t_end = to_double(key, v);
  } else if (key == "sample_interval") {
    run.sample_interval = to_double(key, v);
  } else if (key == "output_interval") {
    run.output_interval = to_double(key, v);
  } else if (key == "rtol") {
    run.rtol = to_double(key, v);
  } else if (key == "c_floor") {
    run.c_floor = to_double(key, v);
  } else if (key == "output_dir") {
    run.output_dir = v;
  } else if (key == "label") {
    run.label = v;
  } else {
    throw ConfigError("unknown-key", "unknown [run] key '" + key + "'");
  }
}

}  // namespace

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::function<double(double)> ProfileSpec::make() const {
  switch (kind) {
    case ProfileKind::constant: {
      const double v = value;
      return [v](double) { return v; };
    }
    case ProfileKind::sinusoid: {
      const double o = offset, a = amplitude, w = omega;
      return [o, a, w](double t) { return o + a * std::sin(w * t); };
    }
    case ProfileKind::file: {
      auto pts = read_profile_file(path);
      return [pts](double t) {
        if (t <= pts.front().first) return pts.front().second;
        if (t >= pts.back().first) return pts.back().second;
        auto it = std::upper_bound(pts.begin(), pts.end(), t,
                                   [](double x, const std::pair<double, double>& p) { return x < p.first; });
        const auto& [t1, i1] = *it;
        const auto& [t0, i0] = *(it - 1);
        return i0 + (i1 - i0) * (t - t0) / (t1 - t0);
      };
    }
  }
  return {};
}

LoadedConfig parse_config(const std::string& text, const std::string& base_dir) {
  LoadedConfig cfg;
  std::istringstream in(text);
  std::string line;
  bool in_run = false;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line == "[run]") {
        in_run = true;
        continue;
      }
      throw ConfigError("bad-section", "line " + std::to_string(lineno) + ": unknown section " + line);
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("bad-line", "line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("bad-line", "line " + std::to_string(lineno) + ": empty key or value");
    const std::string qualified = (in_run ? "run." : "") + key;
    if (!seen.insert(qualified).second)
      throw ConfigError("duplicate-key", "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    if (in_run) {
      set_run_key(cfg.run, key, value, base_dir);
    } else if (!cfg.params.set(key, value)) {
      throw ConfigError("unknown-key", "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.params.validate();
  if (cfg.run.profile.kind == ProfileKind::file) {
    if (cfg.run.profile.path.empty()) throw ConfigError("missing-file", "profile = file requires profile_file");
    if (!fs::exists(cfg.run.profile.path))
      throw ConfigError("missing-file", "profile file '" + cfg.run.profile.path + "' does not exist");
  }
  if (!(cfg.run.t_end > 0.0)) throw ConfigError("bad-value", "t_end must be positive");
  if (!(cfg.run.sample_interval > 0.0)) throw ConfigError("bad-value", "sample_interval must be positive");
  if (!(cfg.run.output_interval > 0.0)) throw ConfigError("bad-value", "output_interval must be positive");
  if (!(cfg.run.c_floor > 0.0)) throw ConfigError("bad-value", "c_floor must be positive");
  cfg.run.grid.omegas();  // validates the grid
  return cfg;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing-file", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto cfg = parse_config(ss.str(), fs::path(path).parent_path().string());
  cfg.run.params_path = path;
  return cfg;
}

}  // namespace circsynth
