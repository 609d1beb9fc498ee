#include "circsynth/specmodel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "circsynth/chebyshev.hpp"
#include "circsynth/errors.hpp"

namespace circsynth {

namespace {

// Sign of the salt source driven by double-layer charging; see README
// "Model conventions".
constexpr double kSaltCouplingSign = -1.0;

struct Domain {
  bool electrode;
  double a, b;
  int nodes;  // collocation nodes in this domain
  int g0;     // global c-node index of local node 0
  int e;      // electrode index, -1 for the separator
  const char* name;
};

std::string node_label(const Domain& d, int j) {
  return std::string(d.name) + " node " + std::to_string(j);
}

DescriptorSystem assemble_impl(const ModelParams& p, Variant variant, const Vec* c_state, const Vec* eta_state,
                               const AssemblyOptions& opts) {
  p.validate();
  const int Ne = p.N_electrode, Ns = p.N_separator;
  const int nc = 2 * Ne + Ns, ne = 2 * Ne, n = 2 * nc + ne;
  const double Le = p.L_electrode, Ls = p.L_separator;
  const Domain doms[3] = {
      {true, 0.0, Le, Ne, 0, 0, "electrode1"},
      {false, Le, Le + Ls, Ns + 2, Ne - 1, -1, "separator"},
      {true, Le + Ls, 2 * Le + Ls, Ne, Ne + Ns, 1, "electrode2"},
  };
  auto ic = [](int g) { return g; };
  auto ie = [&](int e, int j) { return nc + e * Ne + j; };
  auto ip = [&](int g) { return nc + ne + g; };

  const double nu = p.R_const * p.T * (p.t_plus - p.t_minus()) / p.F_const;
  const double kfac = p.t_minus() * p.dq_plus_dq + p.t_plus * p.dq_minus_dq;

  auto c_at = [&](int g) { return c_state ? (*c_state)(g) : p.c_init; };
  auto eta_at = [&](int e, int j) { return eta_state ? (*eta_state)(e * Ne + j) : 0.0; };
  auto aC_at = [&](int e, int j) {
    return variant == Variant::aC_of_phi ? p.alpha + p.beta * eta_at(e, j) : p.aC;
  };
  auto kappa_e_at = [&](int g) {
    return variant == Variant::kappa_of_c ? p.kappa0_effective() * c_at(g) : p.kappa_electrode;
  };

  DescriptorSystem s;
  s.Mmass = Mat::Zero(n, n);
  s.Adyn = Mat::Zero(n, n);
  s.Bln = Mat::Zero(n, nc);
  s.Bi = Vec::Zero(n);
  s.Cout = RowVec::Zero(n);
  s.Dln = RowVec::Zero(nc);
  s.row_labels.assign(n, "");
  s.salt_weights = Vec::Zero(nc);
  s.node_x = Vec::Zero(nc);
  Vec wt = Vec::Zero(nc);

  int ar = nc + ne;  // next algebraic row
  for (const Domain& d : doms) {
    const DiffMatrix cm = cheb_diff_matrix(d.nodes - 1, d.a, d.b);
    const double Dc = d.electrode ? p.D_electrode : p.D_separator;
    const double eps = d.electrode ? p.eps_electrode : p.eps_separator;
    const int N = d.nodes;

    // Salt balance: quadrature of eps c' over each node's share, with the
    // computed end fluxes replaced by the shared interface flux.
    for (int j = 0; j < N; ++j) {
      const int g = d.g0 + j, r = ic(g);
      const double w = cm.weights(j);
      wt(g) += w;
      s.salt_weights(g) += w * eps;
      s.node_x(g) = cm.nodes(j);
      s.Mmass(r, ic(g)) += w * eps;
      if (d.electrode) s.Mmass(r, ie(d.e, j)) += kSaltCouplingSign * w * aC_at(d.e, j) * kfac / p.F_const;
      for (int k = 0; k < N; ++k) {
        double a = w * Dc * cm.D2(j, k);
        if (j == 0) a += Dc * cm.D1(0, k);
        if (j == N - 1) a -= Dc * cm.D1(N - 1, k);
        s.Adyn(r, ic(d.g0 + k)) += a;
      }
      if (s.row_labels[r].empty()) s.row_labels[r] = "salt balance at " + node_label(d, j);
    }

    if (!d.electrode) {
      // Ohm rows; local node 0 is covered by the reference.
      for (int j = 1; j < N; ++j, ++ar) {
        for (int k = 0; k < N; ++k) {
          s.Adyn(ar, ip(d.g0 + k)) += p.kappa_separator * cm.D1(j, k);
          s.Bln(ar, d.g0 + k) += p.kappa_separator * nu * cm.D1(j, k);
        }
        s.Bi(ar) = -1.0;
        s.row_labels[ar] = "ionic current at " + node_label(d, j);
      }
      continue;
    }

    // Charge balance in the electrode with the collector / interface
    // electronic-current conditions patched in at the ends.
    const bool left_collector = (d.e == 0);
    for (int j = 0; j < N; ++j) {
      const int r = ie(d.e, j);
      s.Mmass(r, r) = aC_at(d.e, j);
      for (int k = 0; k < N; ++k) {
        double a = p.sigma * cm.D2(j, k);
        if (j == 0) a += p.sigma * cm.D1(0, k) / cm.weights(0);
        if (j == N - 1) a -= p.sigma * cm.D1(N - 1, k) / cm.weights(N - 1);
        s.Adyn(r, ie(d.e, k)) += a;
        s.Adyn(r, ip(d.g0 + k)) += a;
      }
      if (j == 0 && left_collector) s.Bi(r) += -1.0 / cm.weights(0);
      if (j == N - 1 && !left_collector) s.Bi(r) += 1.0 / cm.weights(N - 1);
      s.row_labels[r] = "charge balance at " + node_label(d, j);
    }
    const int drop = left_collector ? N - 1 : 0;
    for (int j = 0; j < N; ++j) {
      if (j == drop) continue;
      const double kap = kappa_e_at(d.g0 + j);
      for (int k = 0; k < N; ++k) {
        s.Adyn(ar, ie(d.e, k)) += p.sigma * cm.D1(j, k);
        s.Adyn(ar, ip(d.g0 + k)) += (p.sigma + kap) * cm.D1(j, k);
        if (variant == Variant::kappa_of_c) {
          // kappa0 c d(ln c)/dx = kappa0 dc/dx
          s.Adyn(ar, ic(d.g0 + k)) += p.kappa0_effective() * nu * cm.D1(j, k);
        } else {
          s.Bln(ar, d.g0 + k) += kap * nu * cm.D1(j, k);
        }
      }
      s.Bi(ar) = -1.0;
      s.row_labels[ar] = "total current at " + node_label(d, j);
      ++ar;
    }
  }
  for (int g = 0; g < nc; ++g) {
    s.Mmass.row(g) /= wt(g);
    s.Adyn.row(g) /= wt(g);
  }
  const int ref = opts.reference_node >= 0 ? opts.reference_node : Ne - 1;
  if (ref >= nc) throw NumericsError("assembly", "reference node " + std::to_string(ref) + " out of range");
  if (opts.pin_reference) s.Adyn(ar, ip(ref)) = 1.0;
  s.row_labels[ar] = "phi2 reference";
  ++ar;
  if (ar != n) throw NumericsError("assembly", "internal row count mismatch");

  s.Cout(ie(1, Ne - 1)) += 1.0;
  s.Cout(ip(nc - 1)) += 1.0;
  s.Cout(ie(0, 0)) -= 1.0;
  s.Cout(ip(0)) -= 1.0;

  s.state_layout = {nc, ne, nc};
  s.c_ref = p.c_init;
  s.params = p;
  s.variant = variant;
  s.options = opts;
  s.assembled = true;

  // Patched blocks must be invertible; name the row that breaks them.
  auto check_block = [&](const Mat& B, int row0, const char* what) {
    Eigen::JacobiSVD<Mat> svd(B, Eigen::ComputeFullU);
    const Vec& sv = svd.singularValues();
    if (sv.size() == 0) return;
    if (sv(sv.size() - 1) > 1e-13 * sv(0)) return;
    Eigen::Index worst = 0;
    svd.matrixU().col(sv.size() - 1).cwiseAbs().maxCoeff(&worst);
    throw NumericsError("assembly", std::string("singular ") + what + " block; offending row: " +
                                        s.row_labels[row0 + static_cast<int>(worst)]);
  };
  check_block(s.Mmass.topLeftCorner(nc + ne, nc + ne), 0, "mass");
  if (opts.pin_reference) check_block(s.Adyn.bottomRightCorner(nc, nc), nc + ne, "algebraic");
  return s;
}

Vec log_ratio(const Vec& c, double c_ref) {
  Vec out(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k)
    out(k) = c(k) > 0.0 ? std::log(c(k) / c_ref) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

Vec deviation(const Vec& x, int nc, double c_ref) {
  Vec dx = x;
  dx.head(nc).array() -= c_ref;
  return dx;
}

template <class F>
Mat finite_difference(const Vec& x, int rows, F&& f) {
  Mat J(rows, x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
    Vec xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    J.col(k) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return J;
}

}  // namespace

DescriptorSystem assemble_cell(const ModelParams& params, Variant variant, const AssemblyOptions& opts) {
  return assemble_impl(params, variant, nullptr, nullptr, opts);
}

DescriptorSystem assemble_cell_at(const ModelParams& params, Variant variant, const Vec& c, const Vec& eta,
                                  const AssemblyOptions& opts) {
  const int nc = 2 * params.N_electrode + params.N_separator, ne = 2 * params.N_electrode;
  if (c.size() != nc || eta.size() != ne) throw NumericsError("dimension", "assemble_cell_at: state size mismatch");
  return assemble_impl(params, variant, &c, &eta, opts);
}

DescriptorSystem eliminate_phi2(const DescriptorSystem& sys) {
  const auto& L = sys.state_layout;
  if (L.n_phi2 == 0) return sys;
  const int nd = L.n_dynamic(), na = L.n_phi2;
  const Mat Aaa = sys.Adyn.bottomRightCorner(na, na);
  Eigen::FullPivLU<Mat> lu(Aaa);
  lu.setThreshold(1e-12);
  if (lu.rank() < na)
    throw NumericsError("elimination", "phi2 block is singular (rank " + std::to_string(lu.rank()) + " of " +
                                           std::to_string(na) + "); missing or duplicate potential reference");

  DescriptorSystem r = sys;
  const Mat Aad = sys.Adyn.bottomLeftCorner(na, nd);
  const Mat Ada = sys.Adyn.topRightCorner(nd, na);
  r.phi2_recovery.Px = -lu.solve(Aad);
  r.phi2_recovery.Pln = -lu.solve(sys.Bln.bottomRows(na));
  r.phi2_recovery.Pi = -lu.solve(sys.Bi.tail(na));

  r.Mmass = sys.Mmass.topLeftCorner(nd, nd);
  r.Adyn = sys.Adyn.topLeftCorner(nd, nd) + Ada * r.phi2_recovery.Px;
  r.Bln = sys.Bln.topRows(nd) + Ada * r.phi2_recovery.Pln;
  r.Bi = sys.Bi.head(nd) + Ada * r.phi2_recovery.Pi;
  const RowVec Ca = sys.Cout.tail(na);
  r.Cout = sys.Cout.head(nd) + Ca * r.phi2_recovery.Px;
  r.Dln = sys.Dln + Ca * r.phi2_recovery.Pln;
  r.Di = sys.Di + Ca.dot(r.phi2_recovery.Pi);
  r.row_labels.resize(nd);
  r.state_layout.n_phi2 = 0;
  return r;
}

NonlinearODE to_ode(const DescriptorSystem& in) {
  const DescriptorSystem sys = in.state_layout.n_phi2 > 0 ? eliminate_phi2(in) : in;
  const int n = sys.state_layout.n_dynamic();
  if (sys.Mmass.rows() != n || sys.Mmass.cols() != n) throw NumericsError("dimension", "to_ode: mass matrix size");

  Eigen::JacobiSVD<Mat> svd(sys.Mmass);
  const Vec& sv = svd.singularValues();
  if (n == 0 || !(sv(n - 1) > 0.0))
    throw NumericsError("singular-mass", "to_ode: mass matrix is exactly singular");
  Eigen::PartialPivLU<Mat> lu(sys.Mmass);

  NonlinearODE o;
  o.mass_condition = sv(0) / sv(n - 1);
  if (o.mass_condition > kMassConditionWarn)
    o.warnings.push_back("ill-conditioned mass matrix (cond = " + std::to_string(o.mass_condition) + ")");
  o.Am = lu.solve(sys.Adyn);
  o.B1m = lu.solve(sys.Bln);
  o.B2m = lu.solve(sys.Bi);
  o.Cout = sys.Cout;
  o.Dln = sys.Dln;
  o.Di = sys.Di;
  o.state_layout = sys.state_layout;
  o.phi2_recovery = sys.phi2_recovery;
  o.salt_weights = sys.salt_weights.size() ? sys.salt_weights : Vec::Zero(sys.state_layout.n_c);
  o.c_ref = sys.c_ref;
  o.params = sys.params;
  o.variant = sys.variant;
  o.options = sys.options;
  o.assembled = sys.assembled;
  return o;
}

Vec NonlinearODE::equilibrium() const {
  Vec x = Vec::Zero(state_layout.n_dynamic());
  x.head(state_layout.n_c).setConstant(c_ref);
  return x;
}

namespace {

DescriptorSystem frozen_at(const NonlinearODE& m, const Vec& x) {
  const int nc = m.state_layout.n_c;
  return eliminate_phi2(
      assemble_cell_at(m.params, m.variant, x.head(nc), x.tail(m.state_layout.n_eta), m.options));
}

}  // namespace

Vec NonlinearODE::rhs(const Vec& x, double i) const {
  const int nc = state_layout.n_c;
  const Vec lnc = log_ratio(x.head(nc), c_ref);
  if (!lnc.allFinite()) return Vec::Constant(x.size(), std::numeric_limits<double>::quiet_NaN());
  const Vec dx = deviation(x, nc, c_ref);
  if (frozen_coefficients()) {
    const DescriptorSystem s = frozen_at(*this, x);
    return s.Mmass.partialPivLu().solve(s.Adyn * dx + s.Bln * lnc + s.Bi * i);
  }
  return Am * dx + B1m * lnc + B2m * i;
}

Mat NonlinearODE::jacobian(const Vec& x) const {
  const int nc = state_layout.n_c;
  if (frozen_coefficients()) return finite_difference(x, x.size(), [&](const Vec& y) { return rhs(y, 0.0); });
  Mat J = Am;
  for (int k = 0; k < nc; ++k) J.col(k) += B1m.col(k) / x(k);
  return J;
}

double NonlinearODE::output(const Vec& x, double i) const {
  const int nc = state_layout.n_c;
  const Vec lnc = log_ratio(x.head(nc), c_ref);
  const Vec dx = deviation(x, nc, c_ref);
  if (frozen_coefficients()) {
    const DescriptorSystem s = frozen_at(*this, x);
    return s.Cout.dot(dx) + s.Dln.dot(lnc) + s.Di * i;
  }
  return Cout.dot(dx) + Dln.dot(lnc) + Di * i;
}

RowVec NonlinearODE::output_jacobian(const Vec& x) const {
  const int nc = state_layout.n_c;
  if (frozen_coefficients()) {
    Mat J = finite_difference(x, 1, [&](const Vec& y) {
      Vec v(1);
      v(0) = output(y, 0.0);
      return v;
    });
    return J.row(0);
  }
  RowVec C = Cout;
  for (int k = 0; k < nc; ++k) C(k) += Dln(k) / x(k);
  return C;
}

Vec NonlinearODE::phi2(const Vec& x, double i) const {
  const int nc = state_layout.n_c;
  const Vec lnc = log_ratio(x.head(nc), c_ref);
  const Vec dx = deviation(x, nc, c_ref);
  const Phi2Recovery& P = frozen_coefficients() ? frozen_at(*this, x).phi2_recovery : phi2_recovery;
  if (P.Px.size() == 0) return Vec();
  return P.Px * dx + P.Pln * lnc + P.Pi * i;
}

std::string descriptor_to_json(const DescriptorSystem& sys) {
  using nlohmann::json;
  auto dump = [](const auto& M) {
    json j;
    j["rows"] = M.rows();
    j["cols"] = M.cols();
    std::vector<double> data;
    data.reserve(M.size());
    for (Eigen::Index r = 0; r < M.rows(); ++r)
      for (Eigen::Index c = 0; c < M.cols(); ++c) data.push_back(M(r, c));
    j["data"] = data;
    return j;
  };
  json j;
  j["layout"] = {{"n_c", sys.state_layout.n_c},
                 {"n_eta", sys.state_layout.n_eta},
                 {"n_phi2", sys.state_layout.n_phi2}};
  j["variant"] = variant_name(sys.variant);
  j["c_ref"] = sys.c_ref;
  j["Mmass"] = dump(sys.Mmass);
  j["Adyn"] = dump(sys.Adyn);
  j["Bln"] = dump(sys.Bln);
  j["Bi"] = dump(sys.Bi);
  j["Cout"] = dump(sys.Cout);
  j["Dln"] = dump(sys.Dln);
  j["Di"] = sys.Di;
  j["row_labels"] = sys.row_labels;
  return j.dump(1);
}

}  // namespace circsynth
