#pragma once

#include <functional>
#include <string>
#include <vector>

#include "circsynth/linearize.hpp"
#include "circsynth/mor.hpp"
#include "circsynth/netsynth.hpp"
#include "circsynth/specmodel.hpp"

namespace circsynth {

struct BodeData {
  Vec omega;
  Vec magnitude_db;
  Vec phase_deg;             // unwrapped
  std::vector<bool> flagged;  // evaluation hit a pole; entries are NaN
};

BodeData bode(const RationalFunction& Z, const Vec& omega);
BodeData bode(const LTISystem& sys, const Vec& omega);
BodeData bode(const Circuit& c, const Vec& omega);

// Header "omega_rad_s,mag_db,phase_deg"; flagged points are skipped.
std::string bode_csv(const BodeData& b);

using CurrentProfile = std::function<double(double)>;

struct SimOptions {
  double t_end = 100.0;
  double output_interval = 1.0;
  std::vector<double> output_times;  // overrides output_interval when set
  double rtol = 1e-6;
  double atol_c_rel = 1e-6;  // times c_init
  double atol_eta = 1e-9;
  double c_floor = 1.0;
  double h_initial = 1e-4;
  long max_steps = 2000000;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;  // [c ; eta]
  std::vector<Vec> phi2;
  std::vector<double> V;
  std::vector<double> i;
  std::vector<double> c_min;
  std::vector<double> c_max;
  std::vector<double> salt;  // ionic content per unit area
  long steps = 0;
  long rejected = 0;
};

// Adaptive TR-BDF2 from the model equilibrium. Throws NumericsError
// "c-floor" if any concentration drops below the floor.
Trajectory simulate(const NonlinearODE& model, const CurrentProfile& profile, const SimOptions& opt);
Trajectory simulate_from(const NonlinearODE& model, const Vec& x0, const CurrentProfile& profile,
                         const SimOptions& opt);

// Header "t_s,V,i_A_m2,c_min,c_max".
std::string trajectory_csv(const Trajectory& tr);

struct TrackOptions {
  int r_stable = 3;
  SimOptions sim;
  TruncationOptions reduction;
  bool parallel = true;
  TrackOptions() { reduction.measure_error = false; }
};

struct ParamTrace {
  std::vector<double> times;
  std::vector<Vec> tau;        // dynamic-circuit time constants, fastest first
  std::vector<Vec> deviation;  // percent, relative to the first sample
  std::vector<bool> valid;
  std::vector<std::string> notes;  // failure reason per invalid sample
};

// Simulates, then at every sample re-linearizes at the current state,
// reduces and synthesizes the dynamic circuit.
ParamTrace track_parameters(const NonlinearODE& model, const CurrentProfile& profile, double t_end,
                            double sample_interval, const TrackOptions& opt = {});

// Header "t_s,tau1_s,...,dev1_pct,...".
std::string param_trace_csv(const ParamTrace& p, int n_tau = 3);

}  // namespace circsynth
