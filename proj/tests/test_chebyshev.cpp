#include <doctest.h>

#include <cmath>
#include <random>

#include "circsynth/chebyshev.hpp"
#include "circsynth/errors.hpp"

using namespace circsynth;

namespace {

// Direct differentiation of the Lagrange basis, independent of the
// closed-form Chebyshev entries.
Mat lagrange_d1(const Vec& x) {
  const Eigen::Index n = x.size();
  Mat D = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double denom = 1.0;
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != j) denom *= x(j) - x(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < n; ++k)
          if (k != j) s += 1.0 / (x(j) - x(k));
        D(i, j) = s;
      } else {
        double p = 1.0;
        for (Eigen::Index k = 0; k < n; ++k)
          if (k != i && k != j) p *= x(i) - x(k);
        D(i, j) = p / denom;
      }
    }
  }
  return D;
}

}  // namespace

TEST_CASE("three-point matrix on [-1, 1]") {
  const DiffMatrix d = cheb_diff_matrix(2, -1.0, 1.0);
  CHECK(d.nodes(0) == doctest::Approx(-1.0));
  CHECK(std::abs(d.nodes(1)) < 1e-15);
  CHECK(d.nodes(2) == doctest::Approx(1.0));
  CHECK(d.D1(1, 0) == doctest::Approx(-0.5));
  CHECK(std::abs(d.D1(1, 1)) < 1e-15);
  CHECK(d.D1(1, 2) == doctest::Approx(0.5));
}

TEST_CASE("matches Lagrange differentiation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int n = 2; n <= 12; ++n) {
    const double a = u(rng), b = a + 0.1 + std::abs(u(rng));
    const DiffMatrix d = cheb_diff_matrix(n, a, b);
    const Mat L = lagrange_d1(d.nodes);
    CHECK((d.D1 - L).cwiseAbs().maxCoeff() / L.cwiseAbs().maxCoeff() < 1e-12);
    CHECK((d.D2 - L * L).cwiseAbs().maxCoeff() / (L * L).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("row sums vanish") {
  for (int n : {2, 3, 5, 8, 16}) {
    const DiffMatrix d = cheb_diff_matrix(n, 0.0, 50e-6);
    // Zero up to the rounding of the summation itself.
    CHECK(d.D1.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-13 * d.D1.cwiseAbs().maxCoeff());
    CHECK(d.D2.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-13 * d.D2.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("second derivative of x^2 on [0, 1]") {
  const DiffMatrix d = cheb_diff_matrix(8, 0.0, 1.0);
  const Vec p = d.nodes.array().square();
  CHECK((d.D2 * p - 2.0 * Vec::Ones(9)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((d.D1 * p - 2.0 * d.nodes).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("monomials up to the order are differentiated exactly") {
  for (int n = 2; n <= 16; ++n) {
    const DiffMatrix d = cheb_diff_matrix(n, -1.0, 1.0);
    for (int k = 1; k <= n; ++k) {
      const Vec p = d.nodes.array().pow(k);
      const Vec dp = k * d.nodes.array().pow(k - 1);
      CHECK((d.D1 * p - dp).cwiseAbs().maxCoeff() < 1e-10 * k);
    }
  }
}

TEST_CASE("nodes ascend and span the interval") {
  const DiffMatrix d = cheb_diff_matrix(6, 2.0, 5.0);
  CHECK(d.nodes(0) == 2.0);
  CHECK(d.nodes(6) == doctest::Approx(5.0));
  for (int i = 1; i <= 6; ++i) CHECK(d.nodes(i) > d.nodes(i - 1));
}

TEST_CASE("Clenshaw-Curtis weights integrate polynomials of the order") {
  for (int n : {2, 4, 7, 10}) {
    const double a = 0.5, b = 2.0;
    const DiffMatrix d = cheb_diff_matrix(n, a, b);
    for (int k = 0; k <= n; ++k) {
      const double exact = (std::pow(b, k + 1) - std::pow(a, k + 1)) / (k + 1);
      CHECK(d.weights.dot(Vec(d.nodes.array().pow(k))) == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("order below two is rejected") {
  try {
    cheb_diff_matrix(1, 0.0, 1.0);
    FAIL("expected an error");
  } catch (const NumericsError& e) {
    CHECK(e.kind() == "invalid-order");
  }
  CHECK_THROWS(cheb_diff_matrix(4, 1.0, 1.0));
}
