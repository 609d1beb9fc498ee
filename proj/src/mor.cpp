#include "circsynth/mor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "circsynth/config.hpp"
#include "circsynth/errors.hpp"
#include "circsynth/freqresp.hpp"
#include "circsynth/lyapunov.hpp"

namespace circsynth {

Grammians compute_grammians(const LTISystem& sys) {
  sys.check();
  Grammians g;
  g.Xc = solve_lyapunov(sys.A, sys.B * sys.B.transpose());
  g.Yo = solve_lyapunov(sys.A.transpose(), sys.C.transpose() * sys.C);
  return g;
}

namespace {

// Osborne diagonal balancing with power-of-two factors (exact in floating
// point): returns d with D^-1 A D better scaled, D = diag(d).
Vec balance_diagonal(const Mat& A) {
  const Eigen::Index n = A.rows();
  Vec d = Vec::Ones(n);
  Mat M = A;
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = M.col(i).norm() - std::abs(M(i, i));
      const double r = M.row(i).norm() - std::abs(M(i, i));
      if (!(c > 0.0) || !(r > 0.0)) continue;
      double f = std::exp2(std::round(0.5 * std::log2(r / c)));
      // Reducible matrices let the factors drift without bound; keep them
      // within a fixed range and only accept clear improvements.
      f = std::clamp(f * d(i), 0x1p-30, 0x1p30) / d(i);
      if (f == 1.0 || !(c * f + r / f < 0.95 * (c + r))) continue;
      M.col(i) *= f;
      M.row(i) /= f;
      d(i) *= f;
      changed = true;
    }
    if (!changed) break;
  }
  return d;
}

IntegratorSplit split_balanced(const LTISystem& sys, double tol);

}  // namespace

// A is diagonally balanced first. Physical models mix concentration and
// potential states whose rates differ by many decades, and without scaling
// the null-space gap in the singular values collapses.
IntegratorSplit split_integrators(const LTISystem& sys, double tol) {
  sys.check();
  const int n = sys.order();
  if (n == 0) return split_balanced(sys, tol);
  const Vec d = balance_diagonal(sys.A);
  const LTISystem b =
      make_lti(d.cwiseInverse().asDiagonal() * sys.A * d.asDiagonal(), d.cwiseInverse().asDiagonal() * sys.B,
               sys.C * d.asDiagonal(), sys.D);
  IntegratorSplit out = split_balanced(b, tol);
  const int ni = out.n_integrators();
  const int nh = n - ni;
  out.T = d.asDiagonal() * out.T;
  out.Tinv = out.Tinv * d.cwiseInverse().asDiagonal();
  if (ni == 0 || nh == 0) return out;
  // Re-express the Hurwitz part in an orthonormal basis of the original state
  // space. The PBH measures in reduce() compare normalized eigenvectors, so
  // they are only meaningful in coordinates with physical scaling.
  Eigen::HouseholderQR<Mat> qr(out.T.rightCols(nh));
  const Mat Qp = qr.householderQ() * Mat::Identity(n, nh);
  const Mat R = Qp.transpose() * out.T.rightCols(nh);
  const auto Ru = R.triangularView<Eigen::Upper>();
  LTISystem& h = out.hurwitz;
  h.A = Ru.solve<Eigen::OnTheRight>((R * h.A).eval());
  h.B = R * h.B;
  h.C = Ru.solve<Eigen::OnTheRight>(h.C);
  out.T.rightCols(nh) = Qp;
  out.Tinv.bottomRows(nh) = R * out.Tinv.bottomRows(nh);
  return out;
}

namespace {

IntegratorSplit split_balanced(const LTISystem& sys, double tol) {
  const int n = sys.order();
  IntegratorSplit out;
  if (n == 0) {
    out.B_int = Mat(0, 1);
    out.C_int = Mat(1, 0);
    out.hurwitz = sys;
    return out;
  }
  const CVec lam = Eigen::EigenSolver<Mat>(sys.A, false).eigenvalues();
  const double scale = lam.cwiseAbs().maxCoeff();
  const double thresh = tol * (scale > 0.0 ? scale : 1.0);
  int nz = 0;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (std::abs(lam(k)) < thresh) {
      ++nz;
    } else if (lam(k).real() >= -thresh) {
      throw NumericsError("ambiguous-split", "split_integrators: eigenvalue " + std::to_string(lam(k).real()) +
                                                 (lam(k).imag() != 0.0 ? "+" + std::to_string(lam(k).imag()) + "j" : "") +
                                                 " is neither an integrator nor strictly stable");
    }
  }

  // Same scale as the eigenvalue test: the largest singular value of a
  // badly scaled A can exceed max|lambda| by orders of magnitude.
  Eigen::JacobiSVD<Mat> svd(sys.A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  int nullity = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) < thresh) ++nullity;
  if (nullity != nz)
    throw NumericsError("ambiguous-split", "split_integrators: defective zero eigenvalue (algebraic multiplicity " +
                                               std::to_string(nz) + ", null space dimension " +
                                               std::to_string(nullity) + ")");

  if (nz == 0) {
    out.B_int = Mat(0, 1);
    out.C_int = Mat(1, 0);
    out.hurwitz = sys;
    out.T = Mat::Identity(n, n);
    out.Tinv = out.T;
    return out;
  }

  Mat V0 = svd.matrixV().rightCols(nz);
  Mat W0 = svd.matrixU().rightCols(nz).transpose();
  for (int k = 0; k < nz; ++k) {
    Eigen::Index i = 0;
    V0.col(k).cwiseAbs().maxCoeff(&i);
    if (V0(i, k) < 0.0) V0.col(k) *= -1.0;
  }
  const Mat G = W0 * V0;
  Eigen::FullPivLU<Mat> glu(G);
  if (!glu.isInvertible())
    throw NumericsError("ambiguous-split", "split_integrators: zero eigenvalue is defective (left/right null spaces are orthogonal)");
  W0 = glu.solve(W0);

  Eigen::JacobiSVD<Mat> wsvd(W0, Eigen::ComputeFullV);
  const Mat Q = wsvd.matrixV().rightCols(n - nz);
  Mat T(n, n);
  T << V0, Q;
  const Mat Tinv = T.partialPivLu().inverse();

  const Mat Ti_h = Tinv.bottomRows(n - nz);
  LTISystem h = make_lti(Ti_h * sys.A * Q, Ti_h * sys.B, sys.C * Q, sys.D);
  out.B_int = W0 * sys.B;
  out.C_int = sys.C * V0;
  out.hurwitz = h;
  out.T = T;
  out.Tinv = Tinv;
  return out;
}

}  // namespace

double lumped_capacitance(const Mat& B_int, const Mat& C_int) {
  if (B_int.rows() == 0) throw NumericsError("no-integrator", "lumped_capacitance: integrator part is empty");
  const double cb = (C_int * B_int)(0, 0);
  if (!(cb > 0.0))
    throw NumericsError("passivity", "lumped_capacitance: C_int * B_int = " + std::to_string(cb) +
                                         " is not positive (passivity violation or unobservable integrator)");
  return 1.0 / cb;
}

namespace {

struct ModalData {
  CVec lam;
  CMat V;  // unit columns
  CMat W;  // V^-1, rows are left eigenvectors
  std::vector<std::vector<int>> groups;
};

ModalData modal_decomposition(const LTISystem& sys, double cluster_tol) {
  ModalData md;
  const int n = sys.order();
  Eigen::EigenSolver<Mat> es(sys.A, true);
  md.lam = es.eigenvalues();
  md.V = es.eigenvectors();
  for (int k = 0; k < n; ++k) md.V.col(k).normalize();
  md.W = md.V.partialPivLu().inverse();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (md.lam(a).real() != md.lam(b).real()) return md.lam(a).real() < md.lam(b).real();
    return md.lam(a).imag() < md.lam(b).imag();
  });
  std::vector<bool> used(n, false);
  for (int i : order) {
    if (used[i]) continue;
    std::vector<int> g;
    for (int j : order) {
      if (used[j]) continue;
      const double d = std::abs(md.lam(j) - md.lam(i));
      if (d == 0.0 || d <= cluster_tol * std::max(std::abs(md.lam(i)), std::abs(md.lam(j)))) {
        g.push_back(j);
        used[j] = true;
      }
    }
    md.groups.push_back(g);
  }
  return md;
}

CMat gather_rows(const CMat& M, const std::vector<int>& idx) {
  CMat out(idx.size(), M.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(k) = M.row(idx[k]);
  return out;
}

CMat gather_cols(const CMat& M, const std::vector<int>& idx) {
  CMat out(M.rows(), idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(k) = M.col(idx[k]);
  return out;
}

CMat orthonormal_basis(const CMat& M) {
  Eigen::HouseholderQR<CMat> qr(M);
  return qr.householderQ() * CMat::Identity(M.rows(), M.cols());
}

ModalCluster measure(const ModalData& md, const std::vector<int>& g, const LTISystem& sys) {
  ModalCluster mc;
  mc.size = static_cast<int>(g.size());
  cplx sum = 0.0;
  for (int k : g) sum += md.lam(k);
  mc.lambda = sum / double(g.size());
  const CVec B = sys.B.col(0).cast<cplx>();
  const double nb = B.norm(), nc = sys.C.norm();
  const CMat Ql = orthonormal_basis(gather_rows(md.W, g).adjoint());
  const CMat Qr = orthonormal_basis(gather_cols(md.V, g));
  mc.controllability = nb > 0.0 ? (Ql.adjoint() * B).norm() / nb : 0.0;
  mc.observability = nc > 0.0 ? (sys.C.cast<cplx>() * Qr).norm() / nc : 0.0;
  return mc;
}

}  // namespace

std::vector<ModalCluster> modal_clusters(const LTISystem& sys, double cluster_tol) {
  sys.check();
  std::vector<ModalCluster> out;
  if (sys.order() == 0) return out;
  const ModalData md = modal_decomposition(sys, cluster_tol);
  for (const auto& g : md.groups) out.push_back(measure(md, g, sys));
  return out;
}

RankEstimate grammian_rank(const LTISystem& sys, const PbhTolerances& tol) {
  RankEstimate r;
  r.n = sys.order();
  r.controllability_rank = r.observability_rank = r.n;
  for (const auto& mc : modal_clusters(sys, tol.cluster)) {
    r.controllability_rank -= mc.size - (mc.controllability > tol.controllability ? 1 : 0);
    r.observability_rank -= mc.size - (mc.observability > tol.observability ? 1 : 0);
  }
  return r;
}

namespace {

Restriction restrict_once(const LTISystem& sys, const PbhTolerances& tol) {
  sys.check();
  const int n = sys.order();
  Restriction out;
  if (n == 0) {
    out.sys = sys;
    out.basis = Mat(0, 0);
    return out;
  }
  const ModalData md = modal_decomposition(sys, tol.cluster);
  const CVec B = sys.B.col(0).cast<cplx>();
  std::vector<Vec> dirs;
  for (const auto& g : md.groups) {
    const ModalCluster mc = measure(md, g, sys);
    if (!(mc.controllability > tol.controllability)) continue;
    const CVec v = gather_cols(md.V, g) * (gather_rows(md.W, g) * B);
    const bool complex_mode = std::abs(mc.lambda.imag()) > tol.cluster * std::abs(mc.lambda);
    if (!complex_mode) {
      dirs.push_back(v.real());
    } else if (mc.lambda.imag() > 0.0) {
      dirs.push_back(v.real());
      dirs.push_back(v.imag());
    }
  }
  Mat K(n, dirs.size());
  for (std::size_t k = 0; k < dirs.size(); ++k) K.col(k) = dirs[k] / dirs[k].norm();
  Eigen::ColPivHouseholderQR<Mat> qr(K);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  const Mat Q = Mat(qr.householderQ()).leftCols(rank);
  out.basis = Q;
  out.removed = n - rank;
  out.sys = make_lti(Q.transpose() * sys.A * Q, Q.transpose() * sys.B, sys.C * Q, sys.D);
  return out;
}

}  // namespace

// Nearly coincident eigenvalues that fall outside one cluster can leave a
// weakly reachable combination behind, so the restriction is repeated until
// the PBH test finds nothing more to remove.
Restriction restrict_to_reachable(const LTISystem& sys, const PbhTolerances& tol) {
  Restriction out = restrict_once(sys, tol);
  for (int pass = 0; pass < sys.order() && out.sys.order() > 0; ++pass) {
    if (grammian_rank(out.sys, tol).controllability_rank >= out.sys.order()) break;
    const Restriction next = restrict_once(out.sys, tol);
    if (next.removed == 0) break;
    out.basis = out.basis * next.basis;
    out.removed += next.removed;
    out.sys = next.sys;
  }
  return out;
}

namespace {

Mat sqrt_factor(const Mat& X) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (X + X.transpose()));
  const Vec l = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * l.asDiagonal();
}

void check_hurwitz(const LTISystem& sys, const char* who) {
  const CVec lam = Eigen::EigenSolver<Mat>(sys.A, false).eigenvalues();
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    if (!(lam(k).real() < 0.0))
      throw NumericsError("stability", std::string(who) + ": system is not Hurwitz (eigenvalue real part " +
                                           std::to_string(lam(k).real()) + ")");
}

}  // namespace

TruncationResult balance_and_truncate(const LTISystem& sys, int r, const TruncationOptions& opt) {
  sys.check();
  const int n = sys.order();
  if (r < 1 || r > n)
    throw NumericsError("bad-order", "balance_and_truncate: r = " + std::to_string(r) + " outside [1, " +
                                         std::to_string(n) + "]");
  check_hurwitz(sys, "balance_and_truncate");

  const RankEstimate rank = grammian_rank(sys, opt.pbh);
  if (rank.controllability_rank < n)
    throw DegeneracyError(Grammian::controllability, n - rank.controllability_rank,
                          "balance_and_truncate: controllability grammian is rank deficient (rank " +
                              std::to_string(rank.controllability_rank) + " of " + std::to_string(n) + ")");
  if (rank.observability_rank < n)
    throw DegeneracyError(Grammian::observability, n - rank.observability_rank,
                          "balance_and_truncate: observability grammian is rank deficient (rank " +
                              std::to_string(rank.observability_rank) + " of " + std::to_string(n) + ")");

  const Grammians g = compute_grammians(sys);
  const Mat Lc = sqrt_factor(g.Xc);
  const Mat Lo = sqrt_factor(g.Yo);
  Eigen::JacobiSVD<Mat> svd(Lo.transpose() * Lc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec hsv = svd.singularValues();
  const double floor = hsv(0) > 0.0 ? hsv(0) * 1e-300 : std::numeric_limits<double>::min();
  hsv = hsv.cwiseMax(floor);

  TruncationResult out;
  int r_eff = r;
  while (r_eff < n && hsv(r_eff) >= hsv(r_eff - 1) * (1.0 - opt.tie_rel)) ++r_eff;
  if (r_eff != r)
    out.report.warnings.push_back("Hankel singular values tied at the truncation boundary; kept order " +
                                  std::to_string(r_eff) + " instead of " + std::to_string(r));

  const Vec s_isqrt = hsv.cwiseSqrt().cwiseInverse();
  const Mat T = s_isqrt.asDiagonal() * svd.matrixU().transpose() * Lo.transpose();
  const Mat Tinv = Lc * svd.matrixV() * s_isqrt.asDiagonal();
  BalancedRealization& bal = out.balanced;
  bal.T = T;
  bal.Tinv = Tinv;
  bal.Abal = T * sys.A * Tinv;
  bal.Bbal = T * sys.B;
  bal.Cbal = sys.C * Tinv;
  bal.D = sys.D;
  bal.hsv = hsv;

  if (r_eff == n) {
    out.reduced = sys;
  } else {
    out.reduced = make_lti(bal.Abal.topLeftCorner(r_eff, r_eff), bal.Bbal.topRows(r_eff),
                           bal.Cbal.leftCols(r_eff), sys.D);
  }
  out.reduced.c_e = sys.c_e;

  ReductionReport& rep = out.report;
  rep.r = r_eff;
  rep.hsv = hsv;
  rep.lower_bound = r_eff < n ? hsv(r_eff) : 0.0;
  if (opt.measure_error) {
    if (r_eff == n) {
      rep.measured_error = 0.0;
    } else {
      const auto h = hinf_sampled(difference(sys, out.reduced),
                                  logspace(opt.omega_min, opt.omega_max, opt.omega_points), opt.parallel);
      rep.measured_error = h.value;
      rep.measured_omega = h.omega;
    }
  }
  return out;
}

ReductionResult reduce(const LTISystem& full, int r_stable, const TruncationOptions& opt) {
  if (r_stable < 0) throw NumericsError("bad-order", "reduce: r_stable must be >= 0");
  const IntegratorSplit sp = split_integrators(full);
  const Restriction rs = restrict_to_reachable(sp.hurwitz, opt.pbh);
  const int nh = rs.sys.order();
  const int ni = sp.n_integrators();

  ReductionResult out;
  ReductionReport& rep = out.report;
  int r = r_stable;
  if (r > nh) {
    rep.warnings.push_back("r_stable = " + std::to_string(r_stable) + " exceeds the reachable stable order " +
                           std::to_string(nh) + "; using " + std::to_string(nh));
    r = nh;
  }

  LTISystem stable;
  if (nh == 0) {
    stable = make_lti(Mat(0, 0), Mat(0, 1), Mat(1, 0), full.D);
  } else if (r == 0) {
    TruncationOptions o = opt;
    o.measure_error = false;
    const TruncationResult bt = balance_and_truncate(rs.sys, nh, o);
    rep.hsv = bt.report.hsv;
    rep.lower_bound = rep.hsv(0);
    // dropping the whole stable part leaves its strictly proper response as the error
    LTISystem strictly = rs.sys;
    strictly.D = 0.0;
    const auto h = hinf_sampled(strictly, logspace(opt.omega_min, opt.omega_max, opt.omega_points), opt.parallel);
    rep.measured_error = h.value;
    rep.measured_omega = h.omega;
    stable = make_lti(Mat(0, 0), Mat(0, 1), Mat(1, 0), full.D);
  } else {
    const TruncationResult bt = balance_and_truncate(rs.sys, r, opt);
    stable = bt.reduced;
    rep.hsv = bt.report.hsv;
    rep.lower_bound = bt.report.lower_bound;
    rep.measured_error = bt.report.measured_error;
    rep.measured_omega = bt.report.measured_omega;
    rep.warnings.insert(rep.warnings.end(), bt.report.warnings.begin(), bt.report.warnings.end());
    r = bt.report.r;
  }

  const int ns = stable.order();
  Mat A = Mat::Zero(ni + ns, ni + ns);
  A.bottomRightCorner(ns, ns) = stable.A;
  Mat B(ni + ns, 1);
  B << sp.B_int, stable.B;
  Mat C(1, ni + ns);
  C << sp.C_int, stable.C;
  out.reduced = make_lti(A, B, C, full.D);
  for (int k = 0; k < ni; ++k) out.reduced.state_layout[k] = StateKind::integrator;
  out.reduced.c_e = full.c_e;

  rep.r = r;
  rep.n_integrators = ni;
  rep.n_unreachable_removed = rs.removed;
  rep.lumped_C = ni > 0 ? lumped_capacitance(sp.B_int, sp.C_int) : 0.0;
  return out;
}

LTISystem similarity_transform(const LTISystem& sys, const Mat& T) {
  const Eigen::PartialPivLU<Mat> lu(T);
  LTISystem out = make_lti(lu.solve(sys.A * T), lu.solve(sys.B), sys.C * T, sys.D);
  out.c_e = sys.c_e;
  return out;
}

std::string ReductionReport::to_json() const {
  nlohmann::ordered_json j;
  j["r"] = r;
  j["hsv"] = std::vector<double>(hsv.data(), hsv.data() + hsv.size());
  j["lower_bound"] = lower_bound;
  j["measured_error"] = measured_error;
  j["measured_omega"] = std::isfinite(measured_omega) ? nlohmann::ordered_json(measured_omega)
                                                      : nlohmann::ordered_json("inf");
  j["lumped_C"] = lumped_C;
  j["n_integrators"] = n_integrators;
  j["n_unreachable_removed"] = n_unreachable_removed;
  j["warnings"] = warnings;
  return j.dump(2);
}

}  // namespace circsynth
