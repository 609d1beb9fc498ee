#include "circsynth/params.hpp"

#include <cmath>

#include "circsynth/errors.hpp"

namespace circsynth {

const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::numerics: return "numerics";
    case ErrorCategory::synthesis: return "synthesis";
  }
  return "unknown";
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::numerics: return 3;
    case ErrorCategory::synthesis: return 4;
  }
  return 1;
}

Variant parse_variant(const std::string& name) {
  if (name == "baseline") return Variant::baseline;
  if (name == "kappa_of_c") return Variant::kappa_of_c;
  if (name == "aC_of_phi") return Variant::aC_of_phi;
  throw ConfigError("bad-variant", "unknown variant '" + name + "'");
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::kappa_of_c: return "kappa_of_c";
    case Variant::aC_of_phi: return "aC_of_phi";
  }
  return "?";
}

namespace {

struct Field {
  const char* name;
  double ModelParams::*d = nullptr;
  int ModelParams::*i = nullptr;
};

const Field kFields[] = {
    {"aC", &ModelParams::aC},
    {"sigma", &ModelParams::sigma},
    {"kappa_electrode", &ModelParams::kappa_electrode},
    {"kappa_separator", &ModelParams::kappa_separator},
    {"D_electrode", &ModelParams::D_electrode},
    {"D_separator", &ModelParams::D_separator},
    {"eps_electrode", &ModelParams::eps_electrode},
    {"eps_separator", &ModelParams::eps_separator},
    {"t_plus", &ModelParams::t_plus},
    {"dq_plus_dq", &ModelParams::dq_plus_dq},
    {"dq_minus_dq", &ModelParams::dq_minus_dq},
    {"T", &ModelParams::T},
    {"F_const", &ModelParams::F_const},
    {"R_const", &ModelParams::R_const},
    {"L_electrode", &ModelParams::L_electrode},
    {"L_separator", &ModelParams::L_separator},
    {"area", &ModelParams::area},
    {"c_init", &ModelParams::c_init},
    {"kappa0", &ModelParams::kappa0},
    {"alpha", &ModelParams::alpha},
    {"beta", &ModelParams::beta},
    {"N_electrode", nullptr, &ModelParams::N_electrode},
    {"N_separator", nullptr, &ModelParams::N_separator},
};

}  // namespace

bool ModelParams::set(const std::string& key, const std::string& value) {
  for (const auto& f : kFields) {
    if (key != f.name) continue;
    std::size_t used = 0;
    try {
      if (f.d) {
        this->*f.d = std::stod(value, &used);
      } else {
        this->*f.i = std::stoi(value, &used);
      }
    } catch (const std::exception&) {
      throw ConfigError("bad-value", "cannot parse value '" + value + "' for key '" + key + "'");
    }
    if (used != value.size())
      throw ConfigError("bad-value", "trailing characters in value '" + value + "' for key '" + key + "'");
    return true;
  }
  return false;
}

std::map<std::string, double> ModelParams::as_map() const {
  std::map<std::string, double> m;
  for (const auto& f : kFields) m[f.name] = f.d ? this->*f.d : double(this->*f.i);
  return m;
}

void ModelParams::validate() const {
  auto positive = [](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError("bad-param", std::string(name) + " must be strictly positive");
  };
  positive("aC", aC);
  positive("sigma", sigma);
  positive("kappa_electrode", kappa_electrode);
  positive("kappa_separator", kappa_separator);
  positive("D_electrode", D_electrode);
  positive("D_separator", D_separator);
  positive("eps_electrode", eps_electrode);
  positive("eps_separator", eps_separator);
  positive("T", T);
  positive("F_const", F_const);
  positive("R_const", R_const);
  positive("L_electrode", L_electrode);
  positive("L_separator", L_separator);
  positive("area", area);
  positive("c_init", c_init);
  positive("alpha", alpha);
  positive("beta", beta);
  if (kappa0 < 0.0) throw ConfigError("bad-param", "kappa0 must be positive (0 selects the default)");
  if (!(t_plus > 0.0 && t_plus < 1.0)) throw ConfigError("bad-param", "t_plus must lie in (0, 1)");
  if (!std::isfinite(dq_plus_dq) || !std::isfinite(dq_minus_dq))
    throw ConfigError("bad-param", "dq derivatives must be finite");
  if (N_electrode < 3) throw ConfigError("bad-param", "N_electrode must be >= 3");
  if (N_separator < 2) throw ConfigError("bad-param", "N_separator must be >= 2");
}

}  // namespace circsynth
