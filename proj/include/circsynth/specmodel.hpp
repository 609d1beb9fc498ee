#pragma once

#include <string>
#include <vector>

#include "circsynth/params.hpp"
#include "circsynth/types.hpp"

namespace circsynth {

// Variables are ordered [c ; eta ; phi2] with eta = phi1 - phi2. After
// elimination n_phi2 is 0.
struct StateLayout {
  int n_c = 0;
  int n_eta = 0;
  int n_phi2 = 0;
  int n_dynamic() const { return n_c + n_eta; }
  int n_total() const { return n_c + n_eta + n_phi2; }
};

// phi2 = Px * x + Pln * ln(c / c_ref) + Pi * i, x = [c - c_ref ; eta].
struct Phi2Recovery {
  Mat Px;
  Mat Pln;
  Vec Pi;
};

struct AssemblyOptions {
  bool pin_reference = true;
  int reference_node = -1;  // -1 selects the electrode/separator interface
};

// Mmass x' = Adyn (x - x_eq) + Bln ln(c / c_ref) + Bi i,  V = Cout (x - x_eq) + Dln ln(c / c_ref) + Di i.
struct DescriptorSystem {
  Mat Mmass;
  Mat Adyn;
  Mat Bln;  // columns: c nodes
  Vec Bi;
  RowVec Cout;
  RowVec Dln;
  double Di = 0.0;
  StateLayout state_layout;
  Phi2Recovery phi2_recovery;  // populated by eliminate_phi2
  Vec salt_weights;            // quadrature weights of the ionic content, eps-weighted, per c node
  Vec node_x;                  // position of each c node (m)
  std::vector<std::string> row_labels;
  double c_ref = 1.0;

  // Provenance, used to re-evaluate state-dependent coefficients.
  ModelParams params;
  Variant variant = Variant::baseline;
  AssemblyOptions options;
  bool assembled = false;
};

// Nonlinear ODE x' = Am (x - x_eq) + B1m ln(c / c_ref) + B2m i on x = [c ; eta].
struct NonlinearODE {
  Mat Am;
  Mat B1m;
  Vec B2m;
  RowVec Cout;
  RowVec Dln;
  double Di = 0.0;
  StateLayout state_layout;
  Phi2Recovery phi2_recovery;
  Vec salt_weights;
  double c_ref = 1.0;
  double mass_condition = 1.0;
  std::vector<std::string> warnings;

  ModelParams params;
  Variant variant = Variant::baseline;
  AssemblyOptions options;
  bool assembled = false;

  Vec equilibrium() const;
  Vec rhs(const Vec& x, double i) const;
  Mat jacobian(const Vec& x) const;
  double output(const Vec& x, double i) const;
  RowVec output_jacobian(const Vec& x) const;
  Vec phi2(const Vec& x, double i) const;
  double salt_content(const Vec& x) const { return salt_weights.dot(x.head(state_layout.n_c)); }
  // Does the vector field depend on the state beyond the log term?
  bool frozen_coefficients() const { return assembled && variant != Variant::baseline; }
};

// Full three-domain DAE (electrode, separator, electrode) at equilibrium.
DescriptorSystem assemble_cell(const ModelParams& params, Variant variant = Variant::baseline,
                               const AssemblyOptions& opts = {});

// Same, with state-dependent coefficients frozen at the full state [c ; eta].
DescriptorSystem assemble_cell_at(const ModelParams& params, Variant variant, const Vec& c, const Vec& eta,
                                  const AssemblyOptions& opts = {});

DescriptorSystem eliminate_phi2(const DescriptorSystem& sys);

constexpr double kMassConditionWarn = 1e12;
NonlinearODE to_ode(const DescriptorSystem& sys);

// Row-major JSON dump of the matrices, for debugging.
std::string descriptor_to_json(const DescriptorSystem& sys);

}  // namespace circsynth
