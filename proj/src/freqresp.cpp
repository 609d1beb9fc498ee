#include "circsynth/freqresp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace circsynth {

FrequencyResponse::FrequencyResponse(const LTISystem& sys) {
  sys.check();
  d_ = sys.D;
  if (sys.order() == 0) return;
  Eigen::HessenbergDecomposition<Mat> hd(sys.A);
  H_ = hd.matrixH();
  const Mat Q = hd.matrixQ();
  b_ = Q.transpose() * sys.B.col(0);
  c_ = sys.C.row(0) * Q;
}

cplx FrequencyResponse::at(cplx s) const {
  const Eigen::Index n = H_.rows();
  if (n == 0) return d_;
  CMat M = -H_.cast<cplx>();
  M.diagonal().array() += s;
  CVec y = b_.cast<cplx>();
  // Gaussian elimination on an upper Hessenberg matrix: only the
  // subdiagonal needs clearing, with pivoting between adjacent rows.
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (std::abs(M(k + 1, k)) > std::abs(M(k, k))) {
      M.row(k).segment(k, n - k).swap(M.row(k + 1).segment(k, n - k));
      std::swap(y(k), y(k + 1));
    }
    if (M(k, k) == cplx(0.0)) continue;
    const cplx l = M(k + 1, k) / M(k, k);
    M.row(k + 1).segment(k, n - k) -= l * M.row(k).segment(k, n - k);
    y(k + 1) -= l * y(k);
  }
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    cplx acc = y(k);
    for (Eigen::Index j = k + 1; j < n; ++j) acc -= M(k, j) * y(j);
    y(k) = acc / M(k, k);
  }
  return c_.cast<cplx>().dot(y) + d_;
}

CVec FrequencyResponse::serial(const Vec& omega) const {
  CVec g(omega.size());
  for (Eigen::Index k = 0; k < omega.size(); ++k) g(k) = at(cplx(0.0, omega(k)));
  return g;
}

CVec FrequencyResponse::parallel(const Vec& omega) const {
  CVec g(omega.size());
  const long n = static_cast<long>(omega.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) g(k) = at(cplx(0.0, omega(k)));
  return g;
}

CVec freq_response_serial(const LTISystem& sys, const Vec& omega) { return FrequencyResponse(sys).serial(omega); }

CVec freq_response(const LTISystem& sys, const Vec& omega) { return FrequencyResponse(sys).parallel(omega); }

HinfEstimate hinf_sampled(const LTISystem& sys, const Vec& grid, bool parallel) {
  const FrequencyResponse fr(sys);
  const CVec g = parallel ? fr.parallel(grid) : fr.serial(grid);
  const Eigen::Index m = grid.size();
  Vec mag(m);
  for (Eigen::Index k = 0; k < m; ++k) mag(k) = std::isfinite(std::abs(g(k))) ? std::abs(g(k)) : 0.0;

  HinfEstimate best;
  best.value = std::abs(sys.D);
  best.omega = std::numeric_limits<double>::infinity();
  if (sys.order() > 0) {
    Eigen::FullPivLU<Mat> lu(sys.A);
    if (lu.isInvertible()) {
      const double g0 = std::abs(sys.D - (sys.C * lu.solve(sys.B))(0, 0));
      if (g0 > best.value) best = {g0, 0.0};
    }
  }
  for (Eigen::Index k = 0; k < m; ++k)
    if (mag(k) > best.value) best = {mag(k), grid(k)};

  // Refine the few largest interior local maxima.
  std::vector<Eigen::Index> peaks;
  for (Eigen::Index k = 0; k < m; ++k) {
    const bool left = k == 0 || mag(k) >= mag(k - 1);
    const bool right = k == m - 1 || mag(k) >= mag(k + 1);
    if (left && right) peaks.push_back(k);
  }
  std::sort(peaks.begin(), peaks.end(), [&](auto a, auto b) { return mag(a) > mag(b); });
  if (peaks.size() > 5) peaks.resize(5);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (auto k : peaks) {
    double lo = std::log(grid(std::max<Eigen::Index>(k - 1, 0)));
    double hi = std::log(grid(std::min<Eigen::Index>(k + 1, m - 1)));
    auto f = [&](double lw) { return std::abs(fr.at(cplx(0.0, std::exp(lw)))); };
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = f(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = f(x1);
      }
    }
    if (f1 > best.value) best = {f1, std::exp(x1)};
    if (f2 > best.value) best = {f2, std::exp(x2)};
  }
  return best;
}

LTISystem difference(const LTISystem& a, const LTISystem& b) {
  const int na = a.order(), nb = b.order();
  Mat A = Mat::Zero(na + nb, na + nb);
  A.topLeftCorner(na, na) = a.A;
  A.bottomRightCorner(nb, nb) = b.A;
  Mat B(na + nb, 1);
  B << a.B, b.B;
  Mat C(1, na + nb);
  C << a.C, -b.C;
  return make_lti(A, B, C, a.D - b.D);
}

}  // namespace circsynth
