#pragma once

#include <functional>
#include <string>
#include <vector>

#include "circsynth/params.hpp"
#include "circsynth/types.hpp"

namespace circsynth {

struct FrequencyGrid {
  double omega_min = 1e-4;
  double omega_max = 1e2;
  int points = 200;
  Vec omegas() const;  // log-spaced, strictly increasing
};

Vec logspace(double lo, double hi, int points);

enum class ProfileKind { constant, sinusoid, file };

struct ProfileSpec {
  ProfileKind kind = ProfileKind::constant;
  double value = 10.0;  // constant current, A m^-2
  double offset = 10.0;
  double amplitude = 10.0;
  double omega = 0.1;  // rad s^-1
  std::string path;    // two-column CSV (t_s, i_A_m2), linearly interpolated
  std::function<double(double)> make() const;
};

struct RunConfig {
  std::string params_path;
  Variant variant = Variant::baseline;
  int r_stable = 3;
  std::vector<std::string> topologies{"classical", "dynamic", "ladder"};
  FrequencyGrid grid;
  ProfileSpec profile;
  double t_end = 100.0;
  double sample_interval = 10.0;
  double output_interval = 1.0;
  double rtol = 1e-6;
  double c_floor = 1.0;
  std::string output_dir = ".";
  std::string label = "cell";
};

struct LoadedConfig {
  ModelParams params;
  RunConfig run;
};

// Flat "key = value" text; '#' starts a comment; keys after a "[run]" line
// belong to RunConfig. Unknown keys, duplicate keys and malformed lines are
// ConfigErrors.
LoadedConfig parse_config(const std::string& text, const std::string& base_dir = ".");
LoadedConfig load_config(const std::string& path);

std::vector<std::string> split_csv_list(const std::string& s);

}  // namespace circsynth
