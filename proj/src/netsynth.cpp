#include "circsynth/netsynth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "circsynth/config.hpp"
#include "circsynth/errors.hpp"

namespace circsynth {

// ---------------------------------------------------------------- ss_to_tf

RationalFunction ss_to_tf(const LTISystem& sys, double tol_cancel) {
  sys.check();
  const int n = sys.order();
  if (n == 0) return RationalFunction::constant(sys.D);

  std::vector<cplx> poles;
  const CVec lam = Eigen::EigenSolver<Mat>(sys.A, false).eigenvalues();
  for (Eigen::Index k = 0; k < lam.size(); ++k) poles.push_back(lam(k));

  std::vector<cplx> zeros;
  double gain = 0.0;
  if (sys.D != 0.0) {
    gain = sys.D;
    const CVec z = Eigen::EigenSolver<Mat>(sys.A - sys.B * sys.C / sys.D, false).eigenvalues();
    for (Eigen::Index k = 0; k < z.size(); ++k) zeros.push_back(z(k));
  } else {
    // Relative degree from the first non-negligible Markov parameter.
    const double nA = std::max(sys.A.norm(), std::numeric_limits<double>::min());
    Mat Ak_B = sys.B;
    int rel = 0;
    for (int k = 1; k <= n; ++k) {
      const double m = (sys.C * Ak_B)(0, 0);
      if (std::abs(m) > 1e-12 * sys.C.norm() * Ak_B.norm() + 1e-300) {
        rel = k;
        gain = m;
        break;
      }
      Ak_B = sys.A * Ak_B;
    }
    (void)nA;
    if (rel == 0) return RationalFunction::from_zpk({}, poles, 0.0, tol_cancel);
    const int nz = n - rel;
    if (nz > 0) {
      Mat M = Mat::Zero(n + 1, n + 1), E = Mat::Zero(n + 1, n + 1);
      M.topLeftCorner(n, n) = sys.A;
      M.topRightCorner(n, 1) = sys.B;
      M.bottomLeftCorner(1, n) = sys.C;
      E.topLeftCorner(n, n).setIdentity();
      Eigen::GeneralizedEigenSolver<Mat> ges(M, E, false);
      const CVec al = ges.alphas();
      const Vec be = ges.betas();
      std::vector<cplx> finite;
      for (Eigen::Index k = 0; k < al.size(); ++k)
        if (be(k) != 0.0) finite.push_back(al(k) / be(k));
      std::sort(finite.begin(), finite.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
      if (static_cast<int>(finite.size()) < nz)
        throw NumericsError("ss-to-tf", "ss_to_tf: could not locate all transmission zeros");
      zeros.assign(finite.begin(), finite.begin() + nz);
    }
  }
  return RationalFunction::from_zpk(zeros, poles, gain, tol_cancel);
}

// ------------------------------------------------------ positive realness

namespace {

cplx residue_at(const RationalFunction& G, std::size_t i) {
  const cplx p = G.poles[i];
  cplx v = G.gain;
  for (const cplx& z : G.zeros) v *= (p - z);
  for (std::size_t j = 0; j < G.poles.size(); ++j)
    if (j != i) v /= (p - G.poles[j]);
  return v;
}

double root_scale(const RationalFunction& G) {
  double s = 1.0;
  for (const auto& z : G.zeros) s = std::max(s, std::abs(z));
  for (const auto& p : G.poles) s = std::max(s, std::abs(p));
  return s;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

PrVerdict is_positive_real(const RationalFunction& G, double tol_pr) {
  PrVerdict v;
  if (G.is_zero()) {
    v.pass = v.real_axis_pass = true;
    return v;
  }
  const int rel = G.den_degree() - G.num_degree();
  std::string reason;
  if (rel < -1 || (rel == -1 && G.gain < 0.0))
    reason = "degree condition violated (numerator degree exceeds denominator degree)";

  const double scale = root_scale(G);
  std::vector<std::size_t> axis_poles;
  for (std::size_t i = 0; i < G.poles.size() && reason.empty(); ++i) {
    const cplx p = G.poles[i];
    const double tol = 1e-9 * std::max(1.0, std::abs(p));
    if (p.real() > tol) {
      reason = "pole in the open right half-plane at " + fmt(p.real()) + (p.imag() != 0.0 ? "+" + fmt(p.imag()) + "j" : "");
    } else if (p.real() >= -tol) {
      axis_poles.push_back(i);
    }
  }
  for (std::size_t a = 0; a < axis_poles.size() && reason.empty(); ++a) {
    const std::size_t i = axis_poles[a];
    for (std::size_t j = 0; j < G.poles.size(); ++j)
      if (j != i && std::abs(G.poles[j] - G.poles[i]) <= 1e-9 * std::max(1.0, std::abs(G.poles[i])))
        reason = "repeated pole on the imaginary axis at " + fmt(G.poles[i].imag()) + "j";
    if (!reason.empty()) break;
    const cplx r = residue_at(G, i);
    if (!(r.real() > 0.0) || std::abs(r.imag()) > 1e-6 * std::abs(r))
      reason = "imaginary-axis pole at " + fmt(G.poles[i].imag()) + "j has residue " + fmt(r.real()) +
               (r.imag() != 0.0 ? "+" + fmt(r.imag()) + "j" : "") + " (must be real and positive)";
  }

  // Sampled Re G(jw), with extra points at every root magnitude.
  double lo = 1e-6, hi = 1e6;
  {
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    auto upd = [&](cplx r) {
      const double m = std::abs(r);
      if (m > 0.0) {
        rmin = std::min(rmin, m);
        rmax = std::max(rmax, m);
      }
    };
    for (const auto& z : G.zeros) upd(z);
    for (const auto& p : G.poles) upd(p);
    if (rmax > 0.0) {
      lo = std::min(lo, rmin * 1e-4);
      hi = std::max(hi, rmax * 1e4);
    }
  }
  std::vector<double> grid;
  const Vec base = logspace(lo, hi, 4000);
  grid.assign(base.data(), base.data() + base.size());
  for (const auto& z : G.zeros) grid.push_back(std::abs(z.imag()) > 0.0 ? std::abs(z.imag()) : std::abs(z));
  for (const auto& p : G.poles) grid.push_back(std::abs(p.imag()) > 0.0 ? std::abs(p.imag()) : std::abs(p));
  v.min_real_part = std::numeric_limits<double>::infinity();
  for (double w : grid) {
    if (!(w > 0.0)) continue;
    bool at_pole = false;
    for (std::size_t i : axis_poles)
      if (std::abs(std::abs(G.poles[i].imag()) - w) <= 1e-9 * std::max(1.0, w)) at_pole = true;
    if (at_pole) continue;
    const double re = G(cplx(0.0, w)).real();
    if (std::isfinite(re) && re < v.min_real_part) {
      v.min_real_part = re;
      v.omega_at_min = w;
    }
  }
  if (rel >= 0) {
    const double inf_val = G.value_at_infinity();
    if (inf_val < v.min_real_part) {
      v.min_real_part = inf_val;
      v.omega_at_min = std::numeric_limits<double>::infinity();
    }
  }
  if (reason.empty() && v.min_real_part < -tol_pr)
    reason = "Re G(jw) = " + fmt(v.min_real_part) + " < 0 at w = " + fmt(v.omega_at_min) + " rad/s";

  // Literal condition: G(s) real and non-negative for real s >= 0.
  v.real_axis_pass = true;
  for (double s : grid) {
    const cplx g = G(cplx(s, 0.0));
    if (!std::isfinite(g.real())) continue;
    if (g.real() < -tol_pr || std::abs(g.imag()) > 1e-9 * std::max(1.0, std::abs(g.real()))) {
      v.real_axis_pass = false;
      break;
    }
  }
  (void)scale;
  v.pass = reason.empty();
  v.reason = reason;
  return v;
}

// ------------------------------------------------------------------ Foster

FosterExpansion foster_expand(const RationalFunction& G) {
  FosterExpansion f;
  if (G.is_zero()) return f;
  if (!G.proper()) throw SynthesisError("unsupported-pole-structure", "foster_expand: pole at infinity");
  const double scale = root_scale(G);
  for (std::size_t i = 0; i < G.poles.size(); ++i) {
    const cplx p = G.poles[i];
    const double tol = 1e-9 * std::max(1.0, std::abs(p));
    if (std::abs(p.imag()) > tol)
      throw SynthesisError("unsupported-pole-structure", "foster_expand: complex pole " + fmt(p.real()) + "+" +
                                                             fmt(p.imag()) + "j");
    if (p.real() > 1e-12 * scale)
      throw SynthesisError("unsupported-pole-structure", "foster_expand: unstable pole at " + fmt(p.real()));
    for (std::size_t j = i + 1; j < G.poles.size(); ++j)
      if (std::abs(G.poles[j] - p) <= tol)
        throw SynthesisError("unsupported-pole-structure", "foster_expand: repeated pole at " + fmt(p.real()));
  }
  for (std::size_t i = 0; i < G.poles.size(); ++i) {
    const double p = G.poles[i].real();
    const double k = residue_at(G, i).real();
    if (!(k > 0.0))
      throw SynthesisError("not-rc-realizable", "foster_expand: residue " + fmt(k) + " at pole " + fmt(p) +
                                                    " is not positive");
    if (std::abs(p) <= 1e-12 * scale) {
      f.k0 = k;
    } else {
      f.terms.push_back({k, -p});
    }
  }
  f.k_inf = G.value_at_infinity();
  if (f.k_inf < 0.0) throw SynthesisError("not-rc-realizable", "foster_expand: negative high-frequency resistance");
  std::sort(f.terms.begin(), f.terms.end(), [](const FosterTerm& a, const FosterTerm& b) { return a.sigma > b.sigma; });
  return f;
}

// ----------------------------------------------------------------- Circuit

const char* topology_name(Topology t) {
  switch (t) {
    case Topology::classical: return "classical";
    case Topology::dynamic: return "dynamic";
    case Topology::ladder_cauer1: return "ladder_cauer1";
    case Topology::ladder_cauer2: return "ladder_cauer2";
  }
  return "?";
}

Topology parse_topology(const std::string& name) {
  if (name == "classical") return Topology::classical;
  if (name == "dynamic") return Topology::dynamic;
  if (name == "ladder" || name == "ladder_cauer1") return Topology::ladder_cauer1;
  if (name == "ladder_cauer2") return Topology::ladder_cauer2;
  throw ConfigError("bad-topology", "unknown topology '" + name + "'");
}

int Circuit::branch_count() const {
  if (topology == Topology::classical || topology == Topology::dynamic) return static_cast<int>(branches.size());
  int n = 0;
  for (const auto& e : ladder) n += e.kind == ElementKind::capacitor ? 1 : 0;
  return n;
}

cplx Circuit::impedance(cplx s) const {
  if (topology == Topology::classical || topology == Topology::dynamic) {
    cplx z = R_series;
    if (C_series > 0.0) z += 1.0 / (C_series * s);
    for (const auto& [R, C] : branches) z += R / (1.0 + R * C * s);
    return z;
  }
  bool have = false;
  cplx z = 0.0;
  for (auto it = ladder.rbegin(); it != ladder.rend(); ++it) {
    const bool res = it->kind == ElementKind::resistor;
    if (it->series) {
      const cplx ze = res ? cplx(it->value) : 1.0 / (it->value * s);
      z = have ? ze + z : ze;
    } else {
      const cplx ye = res ? cplx(1.0 / it->value) : it->value * s;
      z = have ? 1.0 / (ye + 1.0 / z) : 1.0 / ye;
    }
    have = true;
  }
  return z;
}

std::vector<std::pair<std::string, double>> Circuit::components() const {
  std::vector<std::pair<std::string, double>> out;
  if (topology == Topology::classical || topology == Topology::dynamic) {
    if (R_series > 0.0) out.emplace_back("R0", R_series);
    if (C_series > 0.0) out.emplace_back("C0", C_series);
    for (std::size_t k = 0; k < branches.size(); ++k) {
      out.emplace_back("R" + std::to_string(k + 1), branches[k].first);
      out.emplace_back("C" + std::to_string(k + 1), branches[k].second);
    }
    return out;
  }
  for (const auto& e : ladder)
    out.emplace_back((e.kind == ElementKind::resistor ? "R" : "C") + std::to_string(e.index), e.value);
  return out;
}

void Circuit::validate() const {
  for (const auto& [name, v] : components())
    if (!(v > 0.0) || !std::isfinite(v))
      throw SynthesisError("non-positive-component", "component " + name + " = " + fmt(v) + " is not positive");
}

Circuit synth_dynamic(const RationalFunction& G) {
  const FosterExpansion f = foster_expand(G);
  Circuit c;
  c.topology = Topology::dynamic;
  c.R_series = f.k_inf;
  c.C_series = f.k0 > 0.0 ? 1.0 / f.k0 : 0.0;
  for (const auto& t : f.terms) c.branches.emplace_back(t.k / t.sigma, 1.0 / t.k);
  c.validate();
  return c;
}

Circuit synth_classical(const RationalFunction& G) {
  const FosterExpansion f = foster_expand(G);
  Circuit c;
  c.topology = Topology::classical;
  c.R_series = f.k_inf;
  c.C_series = f.k0 > 0.0 ? 1.0 / f.k0 : 0.0;
  if (f.terms.empty()) {
    c.warnings.push_back("no stable Foster term; classical circuit reduces to series R-C");
    return c;
  }
  // Largest low-frequency resistance k/sigma; ties go to the slower branch.
  const FosterTerm* best = &f.terms.front();
  for (const auto& t : f.terms) {
    const double a = t.k / t.sigma, b = best->k / best->sigma;
    if (a > b * (1.0 + 1e-12) || (a >= b * (1.0 - 1e-12) && t.sigma < best->sigma)) best = &t;
  }
  c.branches.emplace_back(best->k / best->sigma, 1.0 / best->k);
  c.validate();
  return c;
}

// ------------------------------------------------------------------- Cauer

namespace {

using mp = boost::multiprecision::cpp_bin_float_50;
using MPoly = std::vector<mp>;

MPoly to_mp(const Poly& p) {
  MPoly q(p.begin(), p.end());
  while (!q.empty() && q.back() == 0) q.pop_back();
  return q;
}

int mdeg(const MPoly& p) { return static_cast<int>(p.size()) - 1; }

void mtrim(MPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// r = a - b coefficientwise; "zero" when every coefficient is lost in
// cancellation relative to the operands.
bool negligible_difference(const MPoly& a, const MPoly& b, const MPoly& r) {
  for (std::size_t k = 0; k < r.size(); ++k) {
    const mp ak = k < a.size() ? abs(a[k]) : mp(0);
    const mp bk = k < b.size() ? abs(b[k]) : mp(0);
    if (abs(r[k]) > mp(1e-9) * (ak + bk)) return false;
  }
  return true;
}

MPoly msub(const MPoly& a, const MPoly& b) {
  MPoly r(std::max(a.size(), b.size()), mp(0));
  for (std::size_t k = 0; k < a.size(); ++k) r[k] += a[k];
  for (std::size_t k = 0; k < b.size(); ++k) r[k] -= b[k];
  return r;
}

MPoly mscale(const MPoly& a, const mp& k) {
  MPoly r = a;
  for (auto& x : r) x *= k;
  return r;
}

MPoly mshift_up(const MPoly& a) {  // s * a
  MPoly r(a.size() + 1, mp(0));
  for (std::size_t k = 0; k < a.size(); ++k) r[k + 1] = a[k];
  return r;
}

[[noreturn]] void not_rc(const std::string& what, const std::vector<std::string>& trace) {
  std::string msg = "cauer_expand: " + what + "; partial quotients:";
  if (trace.empty()) msg += " (none)";
  for (const auto& t : trace) msg += " " + t;
  throw SynthesisError("not-rc-realizable", msg);
}

std::string qstr(const char* tag, const mp& a) { return std::string(tag) + "=" + fmt(static_cast<double>(a)); }

Circuit cauer_first(const RationalFunction& G) {
  MPoly P = to_mp(G.num), Q = to_mp(G.den);
  Circuit c;
  c.topology = Topology::ladder_cauer1;
  std::vector<std::string> trace;
  int ri = 0, ci = 0;
  bool impedance = true, first = true;
  while (true) {
    const int dp = mdeg(P), dq = mdeg(Q);
    if (dp < 0) break;
    if (impedance) {
      if (dp > dq) not_rc("impedance has a pole at infinity", trace);
      if (dp == dq) {
        const mp a = P[dp] / Q[dq];
        trace.push_back(qstr("R", a));
        if (!(a > 0)) not_rc("non-positive series resistance", trace);
        const MPoly aQ = mscale(Q, a);
        MPoly r = msub(P, aQ);
        r[dp] = 0;
        c.ladder.push_back({true, ElementKind::resistor, static_cast<double>(a), ++ri});
        if (negligible_difference(P, aQ, r)) break;
        mtrim(r);
        P = r;
      } else if (!first) {
        not_rc("missing series resistance", trace);
      }
    } else {
      if (dp != dq + 1) not_rc("admittance has no pole at infinity", trace);
      const mp a = P[dp] / Q[dq];
      trace.push_back(qstr("C", a));
      if (!(a > 0)) not_rc("non-positive shunt capacitance", trace);
      const MPoly asQ = mscale(mshift_up(Q), a);
      MPoly r = msub(P, asQ);
      r[dp] = 0;
      c.ladder.push_back({false, ElementKind::capacitor, static_cast<double>(a), ++ci});
      if (negligible_difference(P, asQ, r)) break;
      mtrim(r);
      P = r;
    }
    std::swap(P, Q);
    impedance = !impedance;
    first = false;
  }
  return c;
}

Circuit cauer_second(const RationalFunction& G) {
  MPoly P = to_mp(G.num), Q = to_mp(G.den);
  Circuit c;
  c.topology = Topology::ladder_cauer2;
  std::vector<std::string> trace;
  int ri = 0, ci = 0;
  bool impedance = true, first = true;
  auto max_abs = [](const MPoly& p) {
    mp m = 0;
    for (const auto& x : p) m = std::max(m, mp(abs(x)));
    return m;
  };
  while (true) {
    if (P.empty()) break;
    if (impedance) {
      const bool origin_pole = Q[0] == 0 || (first && abs(Q[0]) <= mp(1e-12) * max_abs(Q));
      if (origin_pole) {
        MPoly Qt(Q.begin() + 1, Q.end());
        if (Qt.empty() || Qt[0] == 0) not_rc("repeated pole at the origin", trace);
        const mp a = P[0] / Qt[0];
        trace.push_back(qstr("1/C", a));
        if (!(a > 0)) not_rc("non-positive series capacitance", trace);
        const MPoly aQ = mscale(Qt, a);
        MPoly r = msub(P, aQ);
        r[0] = 0;
        c.ladder.push_back({true, ElementKind::capacitor, static_cast<double>(1 / a), ++ci});
        if (negligible_difference(P, aQ, r)) break;
        mtrim(r);
        P.assign(r.begin() + 1, r.end());
        Q = Qt;
      } else if (!first) {
        not_rc("missing series capacitance", trace);
      }
    } else {
      if (Q.empty() || Q[0] == 0) not_rc("admittance has a pole at the origin", trace);
      const mp a = P[0] / Q[0];
      trace.push_back(qstr("1/R", a));
      if (!(a > 0)) not_rc("non-positive shunt conductance", trace);
      const MPoly aQ = mscale(Q, a);
      MPoly r = msub(P, aQ);
      r[0] = 0;
      c.ladder.push_back({false, ElementKind::resistor, static_cast<double>(1 / a), ++ri});
      if (negligible_difference(P, aQ, r)) break;
      mtrim(r);
      P = r;
    }
    std::swap(P, Q);
    impedance = !impedance;
    first = false;
  }
  return c;
}

}  // namespace

Circuit cauer_expand(const RationalFunction& G, CauerKind kind) {
  if (G.is_zero()) throw SynthesisError("not-rc-realizable", "cauer_expand: zero impedance");
  Circuit c = kind == CauerKind::first ? cauer_first(G) : cauer_second(G);
  c.validate();
  return c;
}

// ------------------------------------------------------ circuit impedance

namespace {

struct MRat {
  MPoly n, d;
};

MPoly madd(const MPoly& a, const MPoly& b) {
  MPoly r(std::max(a.size(), b.size()), mp(0));
  for (std::size_t k = 0; k < a.size(); ++k) r[k] += a[k];
  for (std::size_t k = 0; k < b.size(); ++k) r[k] += b[k];
  return r;
}

MPoly mmul(const MPoly& a, const MPoly& b) {
  if (a.empty() || b.empty()) return {};
  MPoly r(a.size() + b.size() - 1, mp(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

MRat radd(const MRat& x, const MRat& y) { return {madd(mmul(x.n, y.d), mmul(y.n, x.d)), mmul(x.d, y.d)}; }
MRat rinv(const MRat& x) { return {x.d, x.n}; }

}  // namespace

RationalFunction circuit_impedance(const Circuit& c) {
  c.validate();
  MRat z{{mp(0)}, {mp(1)}};
  if (c.topology == Topology::classical || c.topology == Topology::dynamic) {
    if (c.R_series > 0.0) z = radd(z, {{mp(c.R_series)}, {mp(1)}});
    if (c.C_series > 0.0) z = radd(z, {{mp(1)}, {mp(0), mp(c.C_series)}});
    for (const auto& [R, C] : c.branches) z = radd(z, {{mp(R)}, {mp(1), mp(R) * mp(C)}});
  } else {
    bool have = false;
    for (auto it = c.ladder.rbegin(); it != c.ladder.rend(); ++it) {
      const mp v(it->value);
      const bool res = it->kind == ElementKind::resistor;
      if (it->series) {
        const MRat ze = res ? MRat{{v}, {mp(1)}} : MRat{{mp(1)}, {mp(0), v}};
        z = have ? radd(ze, z) : ze;
      } else {
        const MRat ye = res ? MRat{{mp(1)}, {v}} : MRat{{mp(0), v}, {mp(1)}};
        z = have ? rinv(radd(ye, rinv(z))) : rinv(ye);
      }
      have = true;
    }
  }
  mtrim(z.n);
  mtrim(z.d);
  const mp lead = z.d.back();
  Poly num, den;
  for (const auto& x : z.n) num.push_back(static_cast<double>(x / lead));
  for (const auto& x : z.d) den.push_back(static_cast<double>(x / lead));
  return RationalFunction::from_coefficients(num, den, 0.0);
}

}  // namespace circsynth
