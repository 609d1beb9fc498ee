#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "circsynth/errors.hpp"
#include "circsynth/freqsim.hpp"
#include "circsynth/linearize.hpp"
#include "test_support.hpp"

using namespace circsynth;

TEST_CASE("c_e must be positive") {
  const NonlinearODE m = testsupport::baseline_model();
  for (double ce : {0.0, -5.0}) {
    try {
      linearize(m, ce);
      FAIL("expected a domain error");
    } catch (const NumericsError& e) {
      CHECK(e.kind() == "domain");
    }
  }
}

TEST_CASE("no log coupling leaves A = Am") {
  NonlinearODE m = testsupport::baseline_model();
  m.B1m.setZero();
  m.Dln.setZero();
  const LTISystem l = linearize(m, 500.0);
  CHECK((l.A - m.Am).norm() == 0.0);
  CHECK((l.C - Mat(m.Cout)).norm() == 0.0);
}

TEST_CASE("log-Jacobian block scales as 1 / c_e") {
  const NonlinearODE m = testsupport::baseline_model();
  const double a = (linearize(m, 930.0).A - m.Am).norm();
  const double b = (linearize(m, 1860.0).A - m.Am).norm();
  CHECK(b / a == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("linearization residual is second order") {
  const NonlinearODE m = testsupport::baseline_model();
  const double ce = m.params.c_init;
  const LTISystem l = linearize(m, ce);
  const Vec x0 = m.equilibrium();
  Vec dir = Vec::Zero(x0.size());
  for (int k = 0; k < m.state_layout.n_c; ++k) dir(k) = std::sin(1.0 + k);
  auto mismatch = [&](double eps) {
    const Vec dx = eps * ce * dir;
    return (m.rhs(x0 + dx, 0.0) - l.A * dx).norm();
  };
  const double r1 = mismatch(1e-3), r2 = mismatch(5e-4);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("linearized model has no unstable modes") {
  const LTISystem l = testsupport::baseline_lti();
  const CVec ev = Eigen::EigenSolver<Mat>(l.A, false).eigenvalues();
  CHECK(ev.real().maxCoeff() < 1e-9 * ev.cwiseAbs().maxCoeff());
}

TEST_CASE("Jacobian at a uniform state equals linearize") {
  const NonlinearODE m = testsupport::baseline_model();
  const LTISystem a = linearize(m, m.params.c_init);
  const LTISystem b = linearize_at(m, m.equilibrium());
  CHECK((a.A - b.A).norm() <= 1e-12 * a.A.norm());
  CHECK((a.C - b.C).norm() <= 1e-12 * a.C.norm());
  CHECK(a.D == doctest::Approx(b.D));
}

TEST_CASE("small-signal step response matches the nonlinear model within 0.5%") {
  const NonlinearODE m = testsupport::baseline_model();
  const LTISystem l = linearize(m, m.params.c_init);
  const double i = 1.0, T = 10.0;
  // Exact zero-order-hold response through the augmented exponential.
  const int n = l.order();
  Mat Aug = Mat::Zero(n + 1, n + 1);
  Aug.topLeftCorner(n, n) = l.A * T;
  Aug.topRightCorner(n, 1) = l.B * T;
  const Mat E = Aug.exp();
  const double v_lin = (l.C * E.topRightCorner(n, 1))(0, 0) * i + l.D * i;
  SimOptions o;
  o.t_end = T;
  o.rtol = 1e-9;
  const double v_nl = simulate(m, [&](double) { return i; }, o).V.back();
  CHECK(std::abs(v_lin - v_nl) / std::abs(v_nl) < 5e-3);
}

TEST_CASE("dimension checks") {
  LTISystem s = make_lti(Mat::Identity(2, 2), Mat::Ones(2, 1), Mat::Ones(1, 2), 0.0);
  CHECK_NOTHROW(s.check());
  s.B = Mat::Ones(3, 1);
  CHECK_THROWS(s.check());
  const LTISystem t = make_lti(Mat::Constant(1, 1, -1.0), Mat::Ones(1, 1), Mat::Ones(1, 1), 0.5);
  CHECK(std::abs(t.eval(cplx(0.0, 1.0)) - (0.5 + 1.0 / cplx(1.0, 1.0))) < 1e-15);
}
