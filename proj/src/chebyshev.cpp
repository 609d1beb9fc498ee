#include "circsynth/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "circsynth/errors.hpp"

namespace circsynth {

namespace {

// Clenshaw-Curtis weights on [-1, 1] for the nodes cos(pi j / n), j = 0..n.
Vec clenshaw_curtis(int n) {
  const double pi = std::numbers::pi;
  Vec w = Vec::Zero(n + 1);
  Vec v = Vec::Ones(n - 1);
  auto theta = [&](int j) { return pi * j / n; };
  if (n % 2 == 0) {
    w(0) = w(n) = 1.0 / (double(n) * n - 1.0);
    for (int k = 1; k < n / 2; ++k)
      for (int j = 1; j < n; ++j) v(j - 1) -= 2.0 * std::cos(2.0 * k * theta(j)) / (4.0 * k * k - 1.0);
    for (int j = 1; j < n; ++j) v(j - 1) -= std::cos(n * theta(j)) / (double(n) * n - 1.0);
  } else {
    w(0) = w(n) = 1.0 / (double(n) * n);
    for (int k = 1; k <= (n - 1) / 2; ++k)
      for (int j = 1; j < n; ++j) v(j - 1) -= 2.0 * std::cos(2.0 * k * theta(j)) / (4.0 * k * k - 1.0);
  }
  w.segment(1, n - 1) = 2.0 * v / n;
  return w;
}

}  // namespace

DiffMatrix cheb_diff_matrix(int n, double a, double b) {
  if (n < 2) throw NumericsError("invalid-order", "cheb_diff_matrix: order " + std::to_string(n) + " < 2");
  if (!(b > a)) throw NumericsError("invalid-interval", "cheb_diff_matrix: need b > a");

  const double pi = std::numbers::pi;
  const int m = n + 1;
  // Ascending reference nodes x_j = -cos(pi j / n). The weight pattern below
  // is invariant under reversing the node order.
  Vec x(m), c(m);
  for (int j = 0; j < m; ++j) {
    x(j) = -std::cos(pi * j / n);
    c(j) = ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
  }
  // x_i - x_j in product form avoids cancellation near the ends.
  auto diff = [&](int i, int j) {
    return -2.0 * std::sin(pi * (j + i) / (2.0 * n)) * std::sin(pi * (j - i) / (2.0 * n));
  };
  Mat D = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      D(i, j) = (c(i) / c(j)) / diff(i, j);
    }
    // negative-sum trick: rows annihilate constants exactly
    D(i, i) = -D.row(i).sum();
  }

  const double scale = 2.0 / (b - a);
  DiffMatrix out;
  out.order = n;
  out.nodes = a + (x.array() + 1.0) / scale;
  out.D1 = D * scale;
  Mat D2 = D * D;
  for (int i = 0; i < m; ++i) D2(i, i) = -(D2.row(i).sum() - D2(i, i));
  out.D2 = D2 * (scale * scale);
  // cos(pi j/n) ordering is the reverse of ours; the weights are symmetric.
  out.weights = clenshaw_curtis(n) / scale;
  return out;
}

}  // namespace circsynth
