#pragma once

#include <map>
#include <string>
#include <vector>

#include "circsynth/linearize.hpp"
#include "circsynth/rational.hpp"

namespace circsynth {

constexpr double kTolPr = 1e-9;

RationalFunction ss_to_tf(const LTISystem& sys, double tol_cancel = kTolCancel);

struct PrVerdict {
  bool pass = false;
  std::string reason;          // empty on pass
  bool real_axis_pass = false; // G real and >= 0 for real s >= 0
  double min_real_part = 0.0;  // min over sampled Re G(jw)
  double omega_at_min = 0.0;
};

PrVerdict is_positive_real(const RationalFunction& G, double tol_pr = kTolPr);

struct FosterTerm {
  double k = 0.0;
  double sigma = 0.0;
};

// G = k0 / s + sum k_i / (s + sigma_i) + k_inf, terms ordered fastest first.
struct FosterExpansion {
  double k0 = 0.0;
  std::vector<FosterTerm> terms;
  double k_inf = 0.0;
};

FosterExpansion foster_expand(const RationalFunction& G);

enum class Topology { classical, dynamic, ladder_cauer1, ladder_cauer2 };
const char* topology_name(Topology t);
Topology parse_topology(const std::string& name);  // "ladder" selects Cauer I

enum class ElementKind { resistor, capacitor };

struct LadderElement {
  bool series = true;  // series arm; otherwise shunt to node 0
  ElementKind kind = ElementKind::resistor;
  double value = 0.0;
  int index = 1;
};

struct Circuit {
  Topology topology = Topology::dynamic;
  // classical / dynamic: series R0, series C0 and parallel RC branches
  double R_series = 0.0;  // 0 = absent
  double C_series = 0.0;  // 0 = absent
  std::vector<std::pair<double, double>> branches;  // (R_i, C_i)
  // ladders: elements in order from the port
  std::vector<LadderElement> ladder;
  std::vector<std::string> warnings;

  int branch_count() const;
  cplx impedance(cplx s) const;
  // Named component values in schematic order.
  std::vector<std::pair<std::string, double>> components() const;
  void validate() const;  // throws SynthesisError on a non-positive value
};

Circuit synth_dynamic(const RationalFunction& G);
Circuit synth_classical(const RationalFunction& G);

enum class CauerKind { first, second };
Circuit cauer_expand(const RationalFunction& G, CauerKind kind);

RationalFunction circuit_impedance(const Circuit& c);

std::string export_netlist(const Circuit& c, const std::string& label);
std::string circuit_to_json(const Circuit& c, const std::string& label);

}  // namespace circsynth
