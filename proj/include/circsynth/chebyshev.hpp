#pragma once

#include "circsynth/types.hpp"

namespace circsynth {

// Chebyshev-Gauss-Lobatto collocation on [a, b], nodes ascending.
struct DiffMatrix {
  int order = 0;  // polynomial degree n; there are n + 1 nodes
  Vec nodes;
  Mat D1;
  Mat D2;
  Vec weights;  // Clenshaw-Curtis quadrature weights on [a, b]
};

DiffMatrix cheb_diff_matrix(int n, double a, double b);

}  // namespace circsynth
