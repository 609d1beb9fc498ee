#pragma once

#include <vector>

#include "circsynth/specmodel.hpp"
#include "circsynth/types.hpp"

namespace circsynth {

enum class StateKind { concentration, potential, integrator, mixed };

// Single-input single-output state space: x' = A x + B i, V = C x + D i.
struct LTISystem {
  Mat A;
  Mat B;  // n x 1
  Mat C;  // 1 x n
  double D = 0.0;
  std::vector<StateKind> state_layout;
  double c_e = 0.0;

  int order() const { return static_cast<int>(A.rows()); }
  // Throws on inconsistent dimensions.
  void check() const;
  cplx eval(cplx s) const;
};

LTISystem make_lti(const Mat& A, const Mat& B, const Mat& C, double D);

// Jacobian at the uniform state c = c_e, eta = 0; states are deviations.
LTISystem linearize(const NonlinearODE& model, double c_e);

// Jacobian at an arbitrary state [c ; eta].
LTISystem linearize_at(const NonlinearODE& model, const Vec& x);

}  // namespace circsynth
