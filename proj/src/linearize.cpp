#include "circsynth/linearize.hpp"

#include <string>

#include "circsynth/errors.hpp"

namespace circsynth {

void LTISystem::check() const {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || B.cols() != 1 || C.cols() != n || C.rows() != 1)
    throw NumericsError("dimension", "LTISystem: inconsistent dimensions (n = " + std::to_string(n) + ")");
}

cplx LTISystem::eval(cplx s) const {
  const int n = order();
  if (n == 0) return D;
  CMat M = -A.cast<cplx>();
  M.diagonal().array() += s;
  const CVec x = M.partialPivLu().solve(B.cast<cplx>());
  return (C.cast<cplx>() * x)(0) + D;
}

LTISystem make_lti(const Mat& A, const Mat& B, const Mat& C, double D) {
  LTISystem s;
  s.A = A;
  s.B = B;
  s.C = C;
  s.D = D;
  s.state_layout.assign(A.rows(), StateKind::mixed);
  s.check();
  return s;
}

namespace {

std::vector<StateKind> physical_layout(const StateLayout& L) {
  std::vector<StateKind> k(L.n_c, StateKind::concentration);
  k.insert(k.end(), L.n_eta, StateKind::potential);
  return k;
}

}  // namespace

LTISystem linearize(const NonlinearODE& m, double c_e) {
  if (!(c_e > 0.0)) throw NumericsError("domain", "linearize: c_e must be positive (ln c is singular at 0)");
  const int nc = m.state_layout.n_c;
  LTISystem s;
  s.A = m.Am;
  s.A.leftCols(nc) += m.B1m / c_e;
  s.B = m.B2m;
  s.C = m.Cout;
  s.C.leftCols(nc) += m.Dln / c_e;
  s.D = m.Di;
  s.state_layout = physical_layout(m.state_layout);
  s.c_e = c_e;
  s.check();
  return s;
}

LTISystem linearize_at(const NonlinearODE& m, const Vec& x) {
  const int nc = m.state_layout.n_c;
  if (x.size() != m.state_layout.n_dynamic()) throw NumericsError("dimension", "linearize_at: state size");
  if (x.head(nc).minCoeff() <= 0.0) throw NumericsError("domain", "linearize_at: non-positive concentration");
  LTISystem s;
  s.A = m.jacobian(x);
  if (m.frozen_coefficients()) {
    // B is the input column of the frozen vector field.
    Vec e = m.rhs(x, 1.0) - m.rhs(x, 0.0);
    s.B = e;
    s.D = m.output(x, 1.0) - m.output(x, 0.0);
  } else {
    s.B = m.B2m;
    s.D = m.Di;
  }
  s.C = m.output_jacobian(x);
  s.state_layout = physical_layout(m.state_layout);
  s.c_e = x.head(nc).mean();
  s.check();
  return s;
}

}  // namespace circsynth
