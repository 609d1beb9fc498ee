#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <Eigen/Dense>
#include <json.hpp>

#include "circsynth/errors.hpp"
#include "circsynth/mor.hpp"
#include "circsynth/netsynth.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace circsynth;
using testsupport::rel_err;

namespace {

template <class F>
std::string synthesis_kind(F&& f) {
  try {
    f();
  } catch (const SynthesisError& e) {
    return e.kind();
  }
  return "";
}

// Nodal analysis: inject 1 A at node 1 and read back its potential.
cplx mna_impedance(const testsupport::Netlist& net, cplx s) {
  int nodes = 0;
  for (const auto& e : net.elements) nodes = std::max({nodes, e.a, e.b});
  CMat Y = CMat::Zero(nodes, nodes);
  for (const auto& e : net.elements) {
    const cplx y = e.name[0] == 'R' ? cplx(1.0 / e.value) : s * e.value;
    for (int a : {e.a, e.b})
      if (a > 0) Y(a - 1, a - 1) += y;
    if (e.a > 0 && e.b > 0) {
      Y(e.a - 1, e.b - 1) -= y;
      Y(e.b - 1, e.a - 1) -= y;
    }
  }
  CVec rhs = CVec::Zero(nodes);
  rhs(0) = 1.0;
  return Y.fullPivLu().solve(rhs)(0);
}

Circuit classical_reference() {
  Circuit c;
  c.topology = Topology::classical;
  c.R_series = 2.5e-3;
  c.C_series = 1.05e3;
  c.branches = {{6.2e-4, 431.0}};
  return c;
}

Circuit dynamic_reference() {
  Circuit c;
  c.topology = Topology::dynamic;
  c.R_series = 2.52e-3;
  c.C_series = 1.05e3;
  c.branches = {{3.75e-4, 475.0}, {3.15e-4, 2.26e3}, {2.52e-4, 1.3e6}};
  return c;
}

Circuit ladder(Topology t, std::vector<LadderElement> els) {
  Circuit c;
  c.topology = t;
  c.ladder = std::move(els);
  return c;
}

std::vector<double> values(const Circuit& c) {
  std::vector<double> v;
  for (const auto& [name, x] : c.components()) v.push_back(x);
  return v;
}

}  // namespace

TEST_CASE("ss_to_tf on small systems") {
  const RationalFunction g = ss_to_tf(make_lti(Mat{{-1.0}}, Mat{{1.0}}, Mat{{1.0}}, 0.0));
  REQUIRE(g.den_degree() == 1);
  CHECK(g.num_degree() == 0);
  CHECK(g.poles[0].real() == doctest::Approx(-1.0));
  CHECK(std::abs(g(cplx(0.0, 2.0)) - 1.0 / cplx(1.0, 2.0)) < 1e-14);

  // series R with a capacitor C0
  const double R = 0.3, C0 = 4.0;
  const RationalFunction h = ss_to_tf(make_lti(Mat{{0.0}}, Mat{{1.0 / C0}}, Mat{{1.0}}, R));
  REQUIRE(h.den_degree() == 1);
  REQUIRE(h.num_degree() == 1);
  CHECK(std::abs(h.poles[0]) < 1e-14);
  CHECK(h.zeros[0].real() == doctest::Approx(-1.0 / (R * C0)));
  for (double w : {0.01, 1.0, 100.0}) {
    const cplx s(0.0, w);
    CHECK(rel_err(h(s), (R * s + 1.0 / C0) / s) < 1e-13);
  }
}

TEST_CASE("ss_to_tf cancels pole/zero pairs of non-minimal realizations") {
  // The second state is unobservable, so its pole must cancel.
  const LTISystem s = make_lti(Mat{{-1.0, 0.0}, {0.0, -3.0}}, Mat{{1.0}, {1.0}}, Mat{{2.0, 0.0}}, 0.0);
  const RationalFunction g = ss_to_tf(s);
  CHECK(g.den_degree() == 1);
  CHECK(g.cancelled.size() == 1);
  CHECK(std::abs(g(cplx(0.5, 1.0)) - 2.0 / cplx(1.5, 1.0)) < 1e-13);
}

TEST_CASE("ss_to_tf matches the state-space response of the reduced baseline") {
  const LTISystem full = testsupport::baseline_lti();
  const ReductionResult red = reduce(full, 3);
  const RationalFunction g = ss_to_tf(red.reduced);
  // three integrators share one pole at the origin after cancellation
  CHECK(g.den_degree() == 4);
  for (double w : {1e-4, 1e-2, 1.0, 1e2}) {
    const cplx s(0.0, w);
    CHECK(rel_err(g(s), red.reduced.eval(s)) < 1e-8);
  }
  // feedthrough consistency
  CHECK(std::abs(foster_expand(g).k_inf - full.D) < 1e-10);
}

TEST_CASE("positive-real verdicts") {
  CHECK_FALSE(is_positive_real(RationalFunction::from_zpk({1.0}, {-1.0}, 1.0)).pass);
  CHECK(is_positive_real(testsupport::published_impedance()).pass);
  CHECK(is_positive_real(RationalFunction::constant(2.0)).pass);
  CHECK(is_positive_real(RationalFunction::constant(0.0)).pass);
  CHECK_FALSE(is_positive_real(RationalFunction::constant(-1.0)).pass);
  // right half-plane pole
  const PrVerdict rhp = is_positive_real(RationalFunction::from_zpk({}, {1.0}, 1.0));
  CHECK_FALSE(rhp.pass);
  CHECK(rhp.reason.find("right half-plane") != std::string::npos);
  // double integrator is not PR
  CHECK_FALSE(is_positive_real(RationalFunction::from_zpk({}, {0.0, 0.0}, 1.0)).pass);
  // 1/s is PR; -1/s has a negative residue on the axis
  CHECK(is_positive_real(RationalFunction::from_zpk({}, {0.0}, 1.0)).pass);
  CHECK_FALSE(is_positive_real(RationalFunction::from_zpk({}, {0.0}, -1.0)).pass);
  // lossless LC impedance s/(s^2+1)
  CHECK(is_positive_real(RationalFunction::from_coefficients({0.0, 1.0}, {1.0, 0.0, 1.0})).pass);
  // improper
  CHECK_FALSE(is_positive_real(RationalFunction::from_coefficients({0.0, 0.0, 1.0}, {1.0, 1.0})).pass);
}

TEST_CASE("the literal real-axis condition is weaker than the full test") {
  // Positive for every real s >= 0, but the lightly damped zeros drive
  // Re G(jw) negative above w = 1.
  const RationalFunction g = RationalFunction::from_zpk({cplx(-0.01, 1.0), cplx(-0.01, -1.0)}, {-5.0, -5.0}, 1.0);
  const PrVerdict v = is_positive_real(g);
  CHECK(v.real_axis_pass);
  CHECK_FALSE(v.pass);
  CHECK(v.min_real_part < 0.0);
  CHECK(v.omega_at_min > 1.0);
  CHECK(v.omega_at_min < 5.0);
}

TEST_CASE("Foster expansion against the residue oracle") {
  SUBCASE("(s + 0.5) / (s (s + 1))") {
    const FosterExpansion f = foster_expand(RationalFunction::from_coefficients({0.5, 1.0}, {0.0, 1.0, 1.0}));
    CHECK(f.k0 == doctest::Approx(0.5));
    REQUIRE(f.terms.size() == 1);
    CHECK(f.terms[0].k == doctest::Approx(0.5));
    CHECK(f.terms[0].sigma == doctest::Approx(1.0));
    CHECK(f.k_inf == 0.0);
  }
  SUBCASE("printed biproper impedance") {
    const FosterExpansion f = foster_expand(testsupport::published_impedance());
    CHECK(f.k0 == doctest::Approx(6.56 * 1.59 * 0.29 / (5.62 * 1.4)).epsilon(1e-12));
    CHECK(f.k_inf == doctest::Approx(1.0));
    REQUIRE(f.terms.size() == 2);
    CHECK(f.terms[0].sigma == doctest::Approx(5.62));
    CHECK(f.terms[1].sigma == doctest::Approx(1.4));
    // residue at p: num(p) / den'(p)
    const Poly num = testsupport::published_impedance().num, den = testsupport::published_impedance().den;
    Poly dden(den.size() - 1);
    for (std::size_t k = 1; k < den.size(); ++k) dden[k - 1] = static_cast<double>(k) * den[k];
    for (const FosterTerm& t : f.terms) {
      const double p = -t.sigma;
      CHECK(t.k == doctest::Approx(poly_eval(num, cplx(p)).real() / poly_eval(dden, cplx(p)).real()).epsilon(1e-10));
    }
  }
  SUBCASE("pure capacitor") {
    const FosterExpansion f = foster_expand(RationalFunction::from_zpk({}, {0.0}, 1.0));
    CHECK(f.k0 == doctest::Approx(1.0));
    CHECK(f.terms.empty());
    CHECK(f.k_inf == 0.0);
  }
}

TEST_CASE("Foster expansion rejects non-RC pole structures") {
  CHECK(synthesis_kind([] { foster_expand(RationalFunction::from_zpk({}, {cplx(-1.0, 1.0), cplx(-1.0, -1.0)}, 1.0)); }) ==
        "unsupported-pole-structure");
  CHECK(synthesis_kind([] { foster_expand(RationalFunction::from_zpk({}, {-2.0, -2.0}, 1.0)); }) ==
        "unsupported-pole-structure");
  CHECK(synthesis_kind([] { foster_expand(RationalFunction::from_zpk({}, {1.0}, 1.0)); }) ==
        "unsupported-pole-structure");
  // 1/((s+1)(s+2)) has residues +1 and -1
  CHECK(synthesis_kind([] { foster_expand(RationalFunction::from_zpk({}, {-1.0, -2.0}, 1.0)); }) ==
        "not-rc-realizable");
}

TEST_CASE("dynamic synthesis rules") {
  const Circuit c = synth_dynamic(RationalFunction::from_coefficients({0.5, 1.0}, {0.0, 1.0, 1.0}));
  CHECK(c.topology == Topology::dynamic);
  CHECK(c.C_series == doctest::Approx(2.0));
  CHECK(c.R_series == 0.0);
  REQUIRE(c.branches.size() == 1);
  CHECK(c.branches[0].first == doctest::Approx(0.5));
  CHECK(c.branches[0].second == doctest::Approx(2.0));

  const Circuit e = synth_dynamic(testsupport::published_impedance());
  REQUIRE(e.branches.size() == 2);
  CHECK(e.branches[0].first * e.branches[0].second == doctest::Approx(1.0 / 5.62));
  CHECK(e.branches[1].first * e.branches[1].second == doctest::Approx(1.0 / 1.4));
  CHECK(e.R_series == doctest::Approx(1.0));
  // published dynamic-circuit products for the two fast branches
  CHECK(3.75e-4 * 475.0 == doctest::Approx(1.0 / 5.62).epsilon(0.01));
  CHECK(3.15e-4 * 2260.0 == doctest::Approx(1.0 / 1.4).epsilon(0.01));

  const Circuit n = synth_dynamic(RationalFunction::from_zpk({}, {-2.0}, 3.0));
  CHECK(n.C_series == 0.0);
  CHECK(n.branches.size() == 1);
  for (const auto& [name, v] : n.components()) CHECK(name.rfind("C0", 0) != 0);
}

TEST_CASE("classical synthesis keeps the dominant branch") {
  SUBCASE("printed impedance") {
    const Circuit c = synth_classical(testsupport::published_impedance());
    CHECK(c.topology == Topology::classical);
    REQUIRE(c.branches.size() == 1);
    const FosterExpansion f = foster_expand(testsupport::published_impedance());
    const FosterTerm& best =
        *std::max_element(f.terms.begin(), f.terms.end(),
                          [](const FosterTerm& a, const FosterTerm& b) { return a.k / a.sigma < b.k / b.sigma; });
    CHECK(c.branches[0].first * c.branches[0].second == doctest::Approx(1.0 / best.sigma));
    CHECK(c.C_series == doctest::Approx(1.0 / f.k0));
    CHECK(c.R_series == doctest::Approx(1.0));
  }
  SUBCASE("R + 1/(Cs)") {
    const double R = 2.0, C = 0.25;
    const Circuit c = synth_classical(RationalFunction::from_coefficients({1.0 / C, R}, {0.0, 1.0}));
    CHECK(c.R_series == doctest::Approx(R));
    CHECK(c.C_series == doctest::Approx(C));
    CHECK(c.branches.empty());
    CHECK_FALSE(c.warnings.empty());
  }
  SUBCASE("equal-energy branches tie-break to the slower one") {
    // k/sigma = 1 for both (k, sigma) = (1, 1) and (3, 3)
    const Poly den = poly_mul(poly_mul({0.0, 1.0}, {1.0, 1.0}), {3.0, 1.0});
    Poly num = poly_mul({1.0, 1.0}, {3.0, 1.0});
    num = poly_add(num, poly_mul({0.0, 1.0}, {3.0, 1.0}));
    num = poly_add(num, poly_mul({0.0, 3.0}, {1.0, 1.0}));
    const Circuit c = synth_classical(RationalFunction::from_coefficients(num, den, 0.0));
    REQUIRE(c.branches.size() == 1);
    CHECK(c.branches[0].first * c.branches[0].second == doctest::Approx(1.0));
  }
}

TEST_CASE("Cauer expansions") {
  SUBCASE("1 + 1/s") {
    const Circuit c = cauer_expand(RationalFunction::from_coefficients({1.0, 1.0}, {0.0, 1.0}), CauerKind::first);
    REQUIRE(c.ladder.size() == 2);
    CHECK(c.ladder[0].series);
    CHECK(c.ladder[0].kind == ElementKind::resistor);
    CHECK(c.ladder[0].value == doctest::Approx(1.0));
    CHECK_FALSE(c.ladder[1].series);
    CHECK(c.ladder[1].kind == ElementKind::capacitor);
    CHECK(c.ladder[1].value == doctest::Approx(1.0));
  }
  SUBCASE("first kind recovers a known ladder") {
    const Circuit src = ladder(Topology::ladder_cauer1, {{true, ElementKind::resistor, 2.0, 1},
                                                         {false, ElementKind::capacitor, 3.0, 1},
                                                         {true, ElementKind::resistor, 5.0, 2},
                                                         {false, ElementKind::capacitor, 7.0, 2}});
    const Circuit back = cauer_expand(circuit_impedance(src), CauerKind::first);
    REQUIRE(back.ladder.size() == 4);
    const std::vector<double> want{2.0, 3.0, 5.0, 7.0};
    for (int k = 0; k < 4; ++k) {
      CHECK(back.ladder[k].value == doctest::Approx(want[k]).epsilon(1e-13));
      CHECK(back.ladder[k].series == src.ladder[k].series);
      CHECK(back.ladder[k].kind == src.ladder[k].kind);
    }
  }
  SUBCASE("second kind recovers a known ladder") {
    const Circuit src = ladder(Topology::ladder_cauer2, {{true, ElementKind::capacitor, 2.0, 1},
                                                         {false, ElementKind::resistor, 3.0, 1},
                                                         {true, ElementKind::capacitor, 5.0, 2},
                                                         {false, ElementKind::resistor, 7.0, 2}});
    const Circuit back = cauer_expand(circuit_impedance(src), CauerKind::second);
    REQUIRE(back.ladder.size() == 4);
    const std::vector<double> want{2.0, 3.0, 5.0, 7.0};
    for (int k = 0; k < 4; ++k) {
      CHECK(back.ladder[k].value == doctest::Approx(want[k]).epsilon(1e-13));
      CHECK(back.ladder[k].kind == src.ladder[k].kind);
    }
  }
  SUBCASE("printed impedance gives a six-element positive ladder") {
    for (CauerKind k : {CauerKind::first, CauerKind::second}) {
      const Circuit c = cauer_expand(testsupport::published_impedance(), k);
      CHECK(c.ladder.size() == 6);
      for (const auto& e : c.ladder) CHECK(e.value > 0.0);
      for (double w : {1e-3, 0.3, 2.0, 50.0}) {
        const cplx s(0.0, w);
        CHECK(rel_err(c.impedance(s), testsupport::published_impedance()(s)) < 1e-9);
      }
    }
  }
  SUBCASE("non-RC input reports its partial quotients") {
    // (s+1)/(s+2) = 1 - 1/(s+2) is an RL impedance
    try {
      cauer_expand(RationalFunction::from_zpk({-1.0}, {-2.0}, 1.0), CauerKind::first);
      FAIL("expected a synthesis error");
    } catch (const SynthesisError& e) {
      CHECK(e.kind() == "not-rc-realizable");
      CHECK(std::string(e.what()).find("partial quotients") != std::string::npos);
    }
  }
}

TEST_CASE("circuit impedance identities") {
  const Circuit c = classical_reference();
  const RationalFunction z = circuit_impedance(c);
  const double R = c.R_series, C = c.C_series, R1 = c.branches[0].first, C1 = c.branches[0].second;
  for (double w : {1e-4, 1e-2, 1.0, 1e3}) {
    const cplx s(0.0, w);
    CHECK(rel_err(z(s), R + 1.0 / (C * s) + R1 / (R1 * C1 * s + 1.0)) < 1e-12);
    CHECK(rel_err(c.impedance(s), z(s)) < 1e-12);
  }
  CHECK(is_positive_real(z).pass);

  const RationalFunction z2 = circuit_impedance(dynamic_reference());
  REQUIRE(z2.den_degree() == 4);
  std::vector<double> poles;
  for (const cplx& p : z2.poles) poles.push_back(p.real());
  std::sort(poles.begin(), poles.end());
  std::vector<double> want{0.0};
  for (const auto& [Ri, Ci] : dynamic_reference().branches) want.push_back(-1.0 / (Ri * Ci));
  std::sort(want.begin(), want.end());
  for (std::size_t k = 0; k < want.size(); ++k)
    CHECK(poles[k] == doctest::Approx(want[k]).epsilon(1e-9).scale(1e-12));
}

TEST_CASE("component validation") {
  Circuit c = classical_reference();
  c.branches[0].second = -1.0;
  CHECK(synthesis_kind([&] { c.validate(); }) == "non-positive-component");
}

TEST_CASE("topology names") {
  CHECK(parse_topology("ladder") == Topology::ladder_cauer1);
  CHECK(parse_topology("ladder_cauer2") == Topology::ladder_cauer2);
  CHECK(parse_topology(topology_name(Topology::classical)) == Topology::classical);
  try {
    parse_topology("foster2");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == "bad-topology");
  }
}

TEST_CASE("netlist export of the classical table values") {
  const std::string text = export_netlist(classical_reference(), "cell");
  CHECK(text ==
        "* circsynth classical cell\n"
        "R0 1 2 2.50000e-03\n"
        "C0 2 3 1.05000e+03\n"
        "R1 3 0 6.20000e-04\n"
        "C1 3 0 4.31000e+02\n"
        ".end\n");
  const testsupport::Netlist n = testsupport::parse_netlist(text);
  CHECK(n.elements.size() == 4);
  CHECK(n.ended);
}

TEST_CASE("netlist with only series elements") {
  Circuit c;
  c.topology = Topology::dynamic;
  c.R_series = 1.5;
  c.C_series = 2.0;
  const testsupport::Netlist n = testsupport::parse_netlist(export_netlist(c, "x"));
  REQUIRE(n.elements.size() == 2);
  CHECK(n.elements[0].name == "R0");
  CHECK(n.elements[1].name == "C0");
  CHECK(n.elements[1].b == 0);
}

TEST_CASE("netlists parse back bit-exactly and nodal analysis reproduces the impedance") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto rc = testsupport::random_rc(rng, 1 + trial % 5);
    std::vector<Circuit> circuits{synth_dynamic(rc.G), cauer_expand(rc.G, CauerKind::first)};
    try {
      circuits.push_back(cauer_expand(rc.G, CauerKind::second));
    } catch (const SynthesisError&) {
    }
    for (const Circuit& c : circuits) {
      const std::string text = export_netlist(c, "rt");
      const testsupport::Netlist n = testsupport::parse_netlist(text);
      const auto comps = c.components();
      REQUIRE(n.elements.size() == comps.size());
      for (std::size_t k = 0; k < comps.size(); ++k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.5e", comps[k].second);
        CHECK(n.elements[k].name == comps[k].first);
        CHECK(n.elements[k].value == std::strtod(buf, nullptr));
        char again[32];
        std::snprintf(again, sizeof again, "%.5e", n.elements[k].value);
        CHECK(std::string(buf) == again);
      }
      for (int k = 0; k < 4; ++k) {
        const cplx s = testsupport::random_point(rng);
        CHECK(rel_err(mna_impedance(n, s), c.impedance(s)) < 1e-4);
      }
    }
  }
}

TEST_CASE("synthesis round trip, positivity and topology equivalence on random RC impedances") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    const auto rc = testsupport::random_rc(rng, 1 + trial % 7);
    const Circuit dyn = synth_dynamic(rc.G);
    const Circuit c1 = cauer_expand(rc.G, CauerKind::first);
    std::vector<const Circuit*> all{&dyn, &c1};
    Circuit c2;
    try {
      c2 = cauer_expand(rc.G, CauerKind::second);
      all.push_back(&c2);
    } catch (const SynthesisError& e) {
      FAIL("Cauer II failed on an RC impedance: " << e.what());
    }
    for (const Circuit* c : all) {
      for (double v : values(*c)) CHECK(v > 0.0);
      const RationalFunction z = circuit_impedance(*c);
      CHECK(is_positive_real(z).pass);
      for (int k = 0; k < 64; ++k) {
        const cplx s = testsupport::random_point(rng);
        CHECK(rel_err(c->impedance(s), rc.G(s)) < 1e-9);
        CHECK(rel_err(z(s), rc.G(s)) < 1e-9);
      }
    }
    const FosterExpansion f = foster_expand(rc.G);
    CHECK(f.k_inf == doctest::Approx(rc.k_inf).epsilon(1e-10).scale(1e-10));
  }
}

TEST_CASE("circuit JSON layout") {
  const auto j = nlohmann::json::parse(circuit_to_json(dynamic_reference(), "cell"));
  CHECK(j["topology"] == "dynamic");
  CHECK(j["branch_count"] == 3);
  CHECK(j["components"].size() == 8);
  CHECK(j["components"][0]["name"] == "R0");
  CHECK(j["components"][0]["unit"] == "ohm");
  CHECK(j["time_constants_s"].size() == 3);
}
