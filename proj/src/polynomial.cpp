#include "circsynth/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace circsynth {

int degree(const Poly& p) {
  for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k)
    if (p[k] != 0.0) return k;
  return -1;
}

Poly poly_trim(Poly p) {
  p.resize(degree(p) + 1);
  return p;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly c(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) c[i] += b[i];
  return c;
}

Poly poly_scale(const Poly& a, double k) {
  Poly c = a;
  for (double& x : c) x *= k;
  return c;
}

cplx poly_eval(const Poly& p, cplx s) {
  cplx acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Poly poly_from_roots(const std::vector<cplx>& roots, double gain) {
  std::vector<cplx> c{1.0};
  for (const cplx& r : roots) {
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  Poly p(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) p[i] = gain * c[i].real();
  return p;
}

std::vector<cplx> poly_roots(const Poly& p_in) {
  const Poly p = poly_trim(p_in);
  const int n = degree(p);
  std::vector<cplx> roots;
  if (n <= 0) return roots;
  // zeros at the origin are exact
  int z = 0;
  while (z < n && p[z] == 0.0) ++z;
  roots.assign(z, cplx(0.0));
  const int m = n - z;
  if (m == 0) return roots;
  Mat comp = Mat::Zero(m, m);
  for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < m; ++i) comp(i, m - 1) = -p[z + i] / p[n];
  const CVec ev = Eigen::EigenSolver<Mat>(comp, false).eigenvalues();
  Poly q(p.begin() + z, p.end());
  Poly dq(m);
  for (int i = 1; i <= m; ++i) dq[i - 1] = i * q[i];
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    cplx r = ev(k);
    for (int it = 0; it < 3; ++it) {
      const cplx f = poly_eval(q, r), df = poly_eval(dq, r);
      if (df == cplx(0.0)) break;
      const cplx step = f / df;
      if (!(std::abs(step) < 1e-6 * std::max(1.0, std::abs(r)))) break;  // stay near the eigenvalue
      r -= step;
    }
    if (std::abs(r.imag()) <= 1e-14 * std::abs(r)) r = cplx(r.real(), 0.0);
    roots.push_back(r);
  }
  return roots;
}

}  // namespace circsynth
