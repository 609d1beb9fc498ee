#pragma once

#include "circsynth/types.hpp"

namespace circsynth {

// Solves A X + X A^T + Q = 0 for Hurwitz A (complex Schur form, column-wise
// triangular back substitution). Throws NumericsError("stability") otherwise.
Mat solve_lyapunov(const Mat& A, const Mat& Q);

// ||A X + X A^T + Q|| / ||Q||.
double lyapunov_residual(const Mat& A, const Mat& X, const Mat& Q);

}  // namespace circsynth
