// circsynth: model assembly, reduction, circuit synthesis and simulation.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "circsynth/config.hpp"
#include "circsynth/errors.hpp"
#include "circsynth/freqsim.hpp"
#include "circsynth/linearize.hpp"
#include "circsynth/mor.hpp"
#include "circsynth/netsynth.hpp"
#include "circsynth/specmodel.hpp"

namespace fs = std::filesystem;
using namespace circsynth;

namespace {

struct Args {
  std::string command;
  std::string config;
  std::string out;
  int order = -1;
  std::string variant;
  std::string topology;
};

struct Context {
  LoadedConfig cfg;
  fs::path out;
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("io", "cannot write " + p.string());
  f << text;
  if (!f) throw ConfigError("io", "write failed for " + p.string());
}

Context prepare(const Args& a) {
  Context ctx;
  ctx.cfg = a.config.empty() ? LoadedConfig{} : load_config(a.config);
  RunConfig& run = ctx.cfg.run;
  if (!a.variant.empty()) run.variant = parse_variant(a.variant);
  if (a.order >= 0) run.r_stable = a.order;
  if (!a.topology.empty()) run.topologies = split_csv_list(a.topology);
  if (!a.out.empty()) run.output_dir = a.out;
  ctx.cfg.params.validate();
  ctx.out = run.output_dir;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw ConfigError("io", "cannot create output directory " + ctx.out.string() + ": " + ec.message());
  return ctx;
}

NonlinearODE model_of(const Context& ctx) { return to_ode(assemble_cell(ctx.cfg.params, ctx.cfg.run.variant)); }

ReductionResult reduced_of(const Context& ctx, const LTISystem& lin) {
  return reduce(lin, ctx.cfg.run.r_stable);
}

Circuit synthesize(const RationalFunction& G, const std::string& topo) {
  switch (parse_topology(topo)) {
    case Topology::classical: return synth_classical(G);
    case Topology::dynamic: return synth_dynamic(G);
    case Topology::ladder_cauer1: return cauer_expand(G, CauerKind::first);
    case Topology::ladder_cauer2: return cauer_expand(G, CauerKind::second);
  }
  throw ConfigError("bad-topology", topo);
}

RationalFunction checked_tf(const LTISystem& reduced) {
  const RationalFunction G = ss_to_tf(reduced);
  const PrVerdict v = is_positive_real(G);
  if (!v.pass) throw SynthesisError("not-positive-real", "reduced impedance is not positive real: " + v.reason);
  return G;
}

void cmd_assemble(const Context& ctx) {
  const DescriptorSystem d = assemble_cell(ctx.cfg.params, ctx.cfg.run.variant);
  const NonlinearODE m = to_ode(d);
  nlohmann::ordered_json j;
  j["variant"] = variant_name(ctx.cfg.run.variant);
  j["N_electrode"] = ctx.cfg.params.N_electrode;
  j["N_separator"] = ctx.cfg.params.N_separator;
  j["n_c"] = d.state_layout.n_c;
  j["n_eta"] = d.state_layout.n_eta;
  j["n_phi2"] = d.state_layout.n_phi2;
  j["n_descriptor"] = d.state_layout.n_total();
  j["n_ode"] = m.state_layout.n_dynamic();
  j["mass_condition"] = m.mass_condition;
  j["warnings"] = m.warnings;
  write_file(ctx.out / "model_dims.json", j.dump(2) + "\n");
  write_file(ctx.out / "descriptor.json", descriptor_to_json(d) + "\n");
}

void cmd_reduce(const Context& ctx) {
  const LTISystem lin = linearize(model_of(ctx), ctx.cfg.params.c_init);
  const ReductionResult red = reduced_of(ctx, lin);
  write_file(ctx.out / "reduction_report.json", red.report.to_json() + "\n");
  std::string csv = "index,hsv\n";
  for (Eigen::Index k = 0; k < red.report.hsv.size(); ++k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%ld,%.10e\n", static_cast<long>(k + 1), red.report.hsv(k));
    csv += buf;
  }
  write_file(ctx.out / "hsv.csv", csv);
}

void cmd_synth(const Context& ctx) {
  if (ctx.cfg.run.topologies.empty()) throw ConfigError("bad-topology", "synth needs at least one topology");
  const LTISystem lin = linearize(model_of(ctx), ctx.cfg.params.c_init);
  const RationalFunction G = checked_tf(reduced_of(ctx, lin).reduced);
  for (const auto& t : ctx.cfg.run.topologies) {
    const Circuit c = synthesize(G, t);
    write_file(ctx.out / ("circuit_" + t + ".json"), circuit_to_json(c, ctx.cfg.run.label));
    write_file(ctx.out / ("circuit_" + t + ".cir"), export_netlist(c, ctx.cfg.run.label));
  }
}

void cmd_bode(const Context& ctx) {
  const Vec w = ctx.cfg.run.grid.omegas();
  const LTISystem lin = linearize(model_of(ctx), ctx.cfg.params.c_init);
  const ReductionResult red = reduced_of(ctx, lin);
  write_file(ctx.out / "bode_full.csv", bode_csv(bode(lin, w)));
  write_file(ctx.out / "bode_reduced.csv", bode_csv(bode(red.reduced, w)));
  if (ctx.cfg.run.topologies.empty()) return;
  const RationalFunction G = checked_tf(red.reduced);
  for (const auto& t : ctx.cfg.run.topologies)
    write_file(ctx.out / ("bode_" + t + ".csv"), bode_csv(bode(synthesize(G, t), w)));
}

SimOptions sim_options(const RunConfig& run) {
  SimOptions o;
  o.t_end = run.t_end;
  o.output_interval = run.output_interval;
  o.rtol = run.rtol;
  o.c_floor = run.c_floor;
  return o;
}

void cmd_simulate(const Context& ctx) {
  const Trajectory tr = simulate(model_of(ctx), ctx.cfg.run.profile.make(), sim_options(ctx.cfg.run));
  write_file(ctx.out / "trajectory.csv", trajectory_csv(tr));
}

void cmd_track(const Context& ctx) {
  TrackOptions o;
  o.r_stable = ctx.cfg.run.r_stable;
  o.sim = sim_options(ctx.cfg.run);
  const ParamTrace p = track_parameters(model_of(ctx), ctx.cfg.run.profile.make(), ctx.cfg.run.t_end,
                                        ctx.cfg.run.sample_interval, o);
  write_file(ctx.out / "param_trace.csv", param_trace_csv(p, o.r_stable));
  for (std::size_t k = 0; k < p.times.size(); ++k)
    if (!p.valid[k]) std::cerr << "warning: sample at t = " << p.times[k] << " s invalid: " << p.notes[k] << "\n";
}

int fail(const char* category, const std::string& kind, const std::string& msg, int code) {
  std::string one_line = msg;
  for (char& ch : one_line)
    if (ch == '\n') ch = ' ';
  std::cerr << "error: " << category << ": " << kind << ": " << one_line << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivalent-circuit synthesis from a porous-electrode model"};
  app.require_subcommand(1);
  Args a;
  const char* commands[][2] = {{"assemble", "assemble the model and report its dimensions"},
                               {"reduce", "balanced truncation of the linearized model"},
                               {"synth", "synthesize circuits and netlists"},
                               {"bode", "frequency responses of model and circuits"},
                               {"simulate", "nonlinear time-domain simulation"},
                               {"track", "circuit time constants along a current profile"}};
  for (auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", a.config, "config file")->check(CLI::ExistingFile);
    sub->add_option("--out", a.out, "output directory");
    sub->add_option("--order", a.order, "stable reduction order")->check(CLI::NonNegativeNumber);
    sub->add_option("--variant", a.variant, "baseline | kappa_of_c | aC_of_phi");
    sub->add_option("--topology", a.topology, "comma-separated topologies");
    sub->callback([&a, sub] { a.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("config", "usage", e.what(), 2);
  }

  try {
    const Context ctx = prepare(a);
    if (a.command == "assemble") cmd_assemble(ctx);
    else if (a.command == "reduce") cmd_reduce(ctx);
    else if (a.command == "synth") cmd_synth(ctx);
    else if (a.command == "bode") cmd_bode(ctx);
    else if (a.command == "simulate") cmd_simulate(ctx);
    else if (a.command == "track") cmd_track(ctx);
  } catch (const Error& e) {
    return fail(category_name(e.category()), e.kind(), e.what(), exit_code(e.category()));
  } catch (const std::exception& e) {
    return fail("numerics", "internal", e.what(), 3);
  }
  return 0;
}
