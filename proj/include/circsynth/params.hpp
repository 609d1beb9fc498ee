#pragma once

#include <map>
#include <string>

namespace circsynth {

enum class Variant { baseline, kappa_of_c, aC_of_phi };

Variant parse_variant(const std::string& name);
const char* variant_name(Variant v);

// Physical, geometric and discretization parameters. SI units throughout.
struct ModelParams {
  double aC = 42e6;
  double sigma = 0.0521;
  double kappa_electrode = 0.0195;
  double kappa_separator = 0.0312;
  double D_electrode = 2.09e-12;
  double D_separator = 3.34e-12;
  double eps_electrode = 0.67;
  double eps_separator = 0.6;
  double t_plus = 0.55;
  double dq_plus_dq = -0.5;
  double dq_minus_dq = -0.5;
  double T = 298.0;
  double F_const = 96485.33212;
  double R_const = 8.314462618;
  double L_electrode = 50e-6;
  double L_separator = 25e-6;
  double area = 1.0;
  double c_init = 930.0;
  double kappa0 = 0.0;  // 0 selects kappa_electrode / c_init
  double alpha = 42e6;
  double beta = 10e6;
  int N_electrode = 4;
  int N_separator = 4;  // interior separator nodes

  double t_minus() const { return 1.0 - t_plus; }
  double kappa0_effective() const { return kappa0 > 0.0 ? kappa0 : kappa_electrode / c_init; }
  // Throws ConfigError on the first violated invariant.
  void validate() const;

  // Set a field by its config-file name; returns false for unknown keys.
  bool set(const std::string& key, const std::string& value);
  std::map<std::string, double> as_map() const;
};

}  // namespace circsynth
