#pragma once

#include <string>
#include <vector>

#include "circsynth/linearize.hpp"
#include "circsynth/types.hpp"

namespace circsynth {

struct Grammians {
  Mat Xc;
  Mat Yo;
};

Grammians compute_grammians(const LTISystem& sys);

struct IntegratorSplit {
  Mat B_int;  // k x 1
  Mat C_int;  // 1 x k
  LTISystem hurwitz;
  Mat T;     // x = T [z_int ; z_h]
  Mat Tinv;
  int n_integrators() const { return static_cast<int>(B_int.rows()); }
};

// Separates the zero eigenvalues (|lambda| < tol * max|lambda|) from the
// strictly stable part using the null spaces of A.
IntegratorSplit split_integrators(const LTISystem& sys, double tol = 1e-8);

// Capacitor value 1 / (C_int B_int) in farads.
double lumped_capacitance(const Mat& B_int, const Mat& C_int);

// Modal Popov-Belevitch-Hautus measures on clusters of (numerically) equal
// eigenvalues. A cluster of size m holds at most one controllable and one
// observable direction for a SISO system.
struct ModalCluster {
  cplx lambda;
  int size = 1;
  double controllability = 0.0;  // ||projection of B on the left eigenspace|| / ||B||
  double observability = 0.0;    // ||C restricted to the right eigenspace|| / ||C||
};

struct PbhTolerances {
  double controllability = 1e-8;
  double observability = 1e-11;
  double cluster = 1e-6;  // relative eigenvalue distance
};

std::vector<ModalCluster> modal_clusters(const LTISystem& sys, double cluster_tol = 1e-6);

struct RankEstimate {
  int n = 0;
  int controllability_rank = 0;
  int observability_rank = 0;
};

RankEstimate grammian_rank(const LTISystem& sys, const PbhTolerances& tol = {});

// Restriction of sys to its reachable subspace, x = basis * z.
struct Restriction {
  LTISystem sys;
  Mat basis;
  int removed = 0;
};

Restriction restrict_to_reachable(const LTISystem& sys, const PbhTolerances& tol = {});

struct BalancedRealization {
  Mat Abal;
  Mat Bbal;
  Mat Cbal;
  double D = 0.0;
  Vec hsv;
  Mat T;     // z = T x
  Mat Tinv;  // x = Tinv z
};

struct ReductionReport {
  int r = 0;
  Vec hsv;
  double lower_bound = 0.0;
  double measured_error = 0.0;
  double measured_omega = 0.0;
  double lumped_C = 0.0;  // farads; 0 when there is no integrator part
  int n_integrators = 0;
  int n_unreachable_removed = 0;
  std::vector<std::string> warnings;

  std::string to_json() const;
};

struct TruncationOptions {
  PbhTolerances pbh;
  double tie_rel = 1e-9;
  double omega_min = 1e-6;
  double omega_max = 1e4;
  int omega_points = 2000;
  bool parallel = true;
  bool measure_error = true;
};

struct TruncationResult {
  LTISystem reduced;
  BalancedRealization balanced;
  ReductionReport report;
};

// Square-root balanced truncation to order r (extended to keep tied HSVs).
// Throws DegeneracyError naming the rank-deficient grammian.
TruncationResult balance_and_truncate(const LTISystem& sys, int r, const TruncationOptions& opt = {});

struct ReductionResult {
  LTISystem reduced;  // integrators first, then the balanced stable part
  ReductionReport report;
};

// split -> reachable part -> balance_and_truncate -> recombine.
ReductionResult reduce(const LTISystem& full, int r_stable, const TruncationOptions& opt = {});

LTISystem similarity_transform(const LTISystem& sys, const Mat& T);  // x = T z

}  // namespace circsynth
