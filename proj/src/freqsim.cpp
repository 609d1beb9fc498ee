#include "circsynth/freqsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

#include "circsynth/errors.hpp"
#include "circsynth/freqresp.hpp"

namespace circsynth {

// ------------------------------------------------------------------- Bode

namespace {

BodeData bode_from(const Vec& omega, const std::function<cplx(double)>& eval) {
  const Eigen::Index n = omega.size();
  for (Eigen::Index k = 1; k < n; ++k)
    if (!(omega(k) > omega(k - 1))) throw ConfigError("bad-grid", "bode: omega must be strictly increasing");
  BodeData b;
  b.omega = omega;
  b.magnitude_db.resize(n);
  b.phase_deg.resize(n);
  b.flagged.assign(n, false);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double prev = nan;
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx g = eval(omega(k));
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag()) || std::abs(g) == 0.0) {
      b.flagged[k] = true;
      b.magnitude_db(k) = b.phase_deg(k) = nan;
      continue;
    }
    b.magnitude_db(k) = 20.0 * std::log10(std::abs(g));
    double ph = std::arg(g) * 180.0 / std::numbers::pi;
    if (std::isfinite(prev)) ph -= 360.0 * std::round((ph - prev) / 360.0);
    b.phase_deg(k) = prev = ph;
  }
  return b;
}

}  // namespace

BodeData bode(const RationalFunction& Z, const Vec& omega) {
  return bode_from(omega, [&](double w) { return Z(cplx(0.0, w)); });
}

BodeData bode(const LTISystem& sys, const Vec& omega) {
  const CVec g = freq_response(sys, omega);
  return bode_from(omega, [&](double w) {
    const auto k = std::lower_bound(omega.data(), omega.data() + omega.size(), w) - omega.data();
    return g(k);
  });
}

BodeData bode(const Circuit& c, const Vec& omega) {
  return bode_from(omega, [&](double w) { return c.impedance(cplx(0.0, w)); });
}

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

}  // namespace

std::string bode_csv(const BodeData& b) {
  std::ostringstream os;
  os << "omega_rad_s,mag_db,phase_deg\n";
  for (Eigen::Index k = 0; k < b.omega.size(); ++k) {
    if (b.flagged[k]) continue;
    os << num(b.omega(k)) << ',' << num(b.magnitude_db(k)) << ',' << num(b.phase_deg(k)) << '\n';
  }
  return os.str();
}

// ------------------------------------------------------------- simulation

namespace {

// TR-BDF2 as a stiffly accurate ESDIRK: trapezoidal stage to t + 2d h, then
// BDF2 to t + h. The embedded second weights give a third-order error
// estimate, filtered through (I - d h J)^-1 to stay bounded for stiff modes.
constexpr double kD = 1.0 - std::numbers::sqrt2 / 2.0;
constexpr double kW = std::numbers::sqrt2 / 4.0;
constexpr double kBh1 = (1.0 - kW) / 3.0;
constexpr double kBh2 = (3.0 * kW + 1.0) / 3.0;
constexpr double kBh3 = kD / 3.0;

struct Stepper {
  const NonlinearODE& model;
  const CurrentProfile& profile;
  Vec atol;
  double rtol;

  double wrms(const Vec& e, const Vec& y0, const Vec& y1) const {
    double s = 0.0;
    for (Eigen::Index k = 0; k < e.size(); ++k) {
      const double sc = atol(k) + rtol * std::max(std::abs(y0(k)), std::abs(y1(k)));
      s += (e(k) / sc) * (e(k) / sc);
    }
    return std::sqrt(s / static_cast<double>(e.size()));
  }

  // Solves z = psi + d h f(t, z) by modified Newton.
  bool stage(const Eigen::PartialPivLU<Mat>& lu, const Vec& psi, double t, double h, Vec& z, Vec& fz,
             const Vec& y0) const {
    const double i = profile(t);
    for (int it = 0; it < 10; ++it) {
      fz = model.rhs(z, i);
      if (!fz.allFinite()) return false;
      const Vec G = z - psi - kD * h * fz;
      const Vec dz = lu.solve(-G);
      z += dz;
      if (!z.allFinite()) return false;
      if (wrms(dz, y0, z) < 1e-3) {
        fz = model.rhs(z, i);
        return fz.allFinite();
      }
    }
    return false;
  }
};

void record(Trajectory& tr, const NonlinearODE& model, double t, const Vec& x, double i) {
  const int nc = model.state_layout.n_c;
  tr.times.push_back(t);
  tr.states.push_back(x);
  tr.phi2.push_back(model.phi2(x, i));
  tr.V.push_back(model.output(x, i));
  tr.i.push_back(i);
  tr.c_min.push_back(x.head(nc).minCoeff());
  tr.c_max.push_back(x.head(nc).maxCoeff());
  tr.salt.push_back(model.salt_content(x));
}

}  // namespace

Trajectory simulate(const NonlinearODE& model, const CurrentProfile& profile, const SimOptions& opt) {
  return simulate_from(model, model.equilibrium(), profile, opt);
}

Trajectory simulate_from(const NonlinearODE& model, const Vec& x0, const CurrentProfile& profile,
                         const SimOptions& opt) {
  if (!model.assembled) throw NumericsError("not-assembled", "simulate: model is not assembled");
  if (!(opt.t_end >= 0.0) || !(opt.rtol > 0.0)) throw ConfigError("bad-sim-options", "simulate: bad t_end or rtol");
  const int nc = model.state_layout.n_c;
  const int n = model.state_layout.n_dynamic();
  if (x0.size() != n) throw NumericsError("dimension", "simulate: initial state has the wrong size");
  if (!(x0.head(nc).minCoeff() > opt.c_floor))
    throw NumericsError("c-floor", "simulate: initial concentration below c_floor");

  std::vector<double> outs = opt.output_times;
  if (outs.empty()) {
    if (!(opt.output_interval > 0.0)) throw ConfigError("bad-sim-options", "simulate: output_interval must be > 0");
    const long m = static_cast<long>(std::floor(opt.t_end / opt.output_interval + 1e-9));
    for (long k = 0; k <= m; ++k) outs.push_back(static_cast<double>(k) * opt.output_interval);
    if (outs.back() < opt.t_end * (1.0 - 1e-12)) outs.push_back(opt.t_end);
  }
  std::sort(outs.begin(), outs.end());
  outs.erase(std::unique(outs.begin(), outs.end()), outs.end());

  Stepper st{model, profile, Vec(n), opt.rtol};
  st.atol.head(nc).setConstant(opt.atol_c_rel * model.params.c_init);
  st.atol.tail(n - nc).setConstant(opt.atol_eta);

  Trajectory tr;
  Vec y = x0;
  double t = 0.0;
  std::size_t next = 0;
  while (next < outs.size() && outs[next] <= 0.0) {
    record(tr, model, 0.0, y, profile(0.0));
    ++next;
  }
  double h = std::min(opt.h_initial, std::max(opt.t_end, 1e-12));
  const Mat I = Mat::Identity(n, n);
  while (next < outs.size()) {
    if (++tr.steps > opt.max_steps) throw NumericsError("max-steps", "simulate: step limit reached");
    const double target = outs[next];
    bool lands = false;
    if (t + h >= target * (1.0 - 1e-14)) {
      h = target - t;
      lands = true;
    }
    const Mat J = model.jacobian(y);
    const Eigen::PartialPivLU<Mat> lu(I - kD * h * J);
    const Vec f1 = model.rhs(y, profile(t));
    if (!f1.allFinite()) throw NumericsError("c-floor", "simulate: state left the domain of the log term");

    Vec z2 = y + 2.0 * kD * h * f1, f2;
    Vec z3, f3;
    bool ok = st.stage(lu, y + kD * h * f1, t + 2.0 * kD * h, h, z2, f2, y);
    if (ok) {
      z3 = y + h * (kW * f1 + kW * f2) + kD * h * f2;  // predictor
      ok = st.stage(lu, y + h * (kW * f1 + kW * f2), t + h, h, z3, f3, y);
    }
    double err = std::numeric_limits<double>::infinity();
    if (ok) {
      const Vec e = h * ((kW - kBh1) * f1 + (kW - kBh2) * f2 + (kD - kBh3) * f3);
      err = st.wrms(lu.solve(e), y, z3);
    }
    if (!ok || !(err <= 1.0)) {
      ++tr.rejected;
      h *= ok ? std::clamp(0.9 * std::pow(err, -1.0 / 3.0), 0.2, 0.9) : 0.25;
      if (h < 1e-14 * std::max(1.0, t)) throw NumericsError("step-size", "simulate: step size underflow");
      continue;
    }
    t = lands ? target : t + h;
    y = z3;
    const double cmin = y.head(nc).minCoeff();
    if (cmin < opt.c_floor) {
      std::ostringstream os;
      os << "simulate: concentration " << cmin << " fell below c_floor = " << opt.c_floor << " at t = " << t;
      throw NumericsError("c-floor", os.str());
    }
    const double grow = err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -1.0 / 3.0)) : 5.0;
    const double h_used = h;
    h = h_used * std::max(grow, 0.2);
    if (lands) {
      record(tr, model, t, y, profile(t));
      ++next;
    }
  }
  return tr;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  os << "t_s,V,i_A_m2,c_min,c_max\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    os << num(tr.times[k]) << ',' << num(tr.V[k]) << ',' << num(tr.i[k]) << ',' << num(tr.c_min[k]) << ','
       << num(tr.c_max[k]) << '\n';
  return os.str();
}

// --------------------------------------------------------------- tracking

ParamTrace track_parameters(const NonlinearODE& model, const CurrentProfile& profile, double t_end,
                            double sample_interval, const TrackOptions& opt) {
  if (!(sample_interval > 0.0)) throw ConfigError("bad-sim-options", "track: sample_interval must be > 0");
  SimOptions so = opt.sim;
  so.t_end = t_end;
  so.output_times.clear();
  const long m = static_cast<long>(std::floor(t_end / sample_interval + 1e-9));
  for (long k = 0; k <= m; ++k) so.output_times.push_back(static_cast<double>(k) * sample_interval);
  const Trajectory tr = simulate(model, profile, so);

  const int ns = static_cast<int>(tr.times.size());
  ParamTrace p;
  p.times = tr.times;
  p.tau.assign(ns, Vec());
  p.deviation.assign(ns, Vec());
  p.valid.assign(ns, false);
  p.notes.assign(ns, "");

  auto one = [&](int k) {
    try {
      const LTISystem lin = linearize_at(model, tr.states[k]);
      const ReductionResult red = reduce(lin, opt.r_stable, opt.reduction);
      const Circuit c = synth_dynamic(ss_to_tf(red.reduced));
      Vec tau(static_cast<Eigen::Index>(c.branches.size()));
      for (std::size_t b = 0; b < c.branches.size(); ++b) tau(b) = c.branches[b].first * c.branches[b].second;
      p.tau[k] = tau;
      p.valid[k] = true;
    } catch (const std::exception& e) {
      p.notes[k] = e.what();
    }
  };
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
  for (int k = 0; k < ns; ++k) one(k);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < ns; ++k) {
    if (!p.valid[k]) continue;
    Vec dev = Vec::Constant(p.tau[k].size(), nan);
    if (p.valid[0] && p.tau[0].size() == p.tau[k].size())
      for (Eigen::Index j = 0; j < dev.size(); ++j) dev(j) = 100.0 * (p.tau[k](j) - p.tau[0](j)) / p.tau[0](j);
    p.deviation[k] = dev;
  }
  return p;
}

std::string param_trace_csv(const ParamTrace& p, int n_tau) {
  std::ostringstream os;
  os << "t_s";
  for (int j = 1; j <= n_tau; ++j) os << ",tau" << j << "_s";
  for (int j = 1; j <= n_tau; ++j) os << ",dev" << j << "_pct";
  os << '\n';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    os << num(p.times[k]);
    for (int j = 0; j < n_tau; ++j) os << ',' << num(p.valid[k] && j < p.tau[k].size() ? p.tau[k](j) : nan);
    for (int j = 0; j < n_tau; ++j)
      os << ',' << num(p.valid[k] && j < p.deviation[k].size() ? p.deviation[k](j) : nan);
    os << '\n';
  }
  return os.str();
}

}  // namespace circsynth
