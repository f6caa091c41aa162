#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kp5/dispersion.hpp"
#include "kp5/error.hpp"
#include "kp5/evolution.hpp"
#include "kp5/experiments.hpp"
#include "kp5/ground_state.hpp"
#include "kp5/snapshot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kp5;

namespace {

void write_text(const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot write " + path.string());
  f << body;
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot read " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
}

// Comma separated CSV to whitespace separated columns with a commented header.
std::string csv_to_dat(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  bool first = true;
  while (std::getline(in, line)) {
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    out += (first ? "# " : "") + line + "\n";
    first = false;
  }
  return out;
}

json ground_state_json(const GroundState& gs) {
  const auto dev = pohozaev_report(gs);
  return {{"p", gs.p.p.str()},
          {"c", gs.c},
          {"nx", gs.phi.grid().nx()},
          {"ny", gs.phi.grid().ny()},
          {"lx", gs.phi.grid().lx()},
          {"ly", gs.phi.grid().ly()},
          {"residual", gs.residual},
          {"tol", gs.tol},
          {"d1", gs.d1},
          {"mass", gs.mass},
          {"iterations", gs.iterations},
          {"pohozaev",
           {{"dxx_norm2", gs.pohozaev.dxx_norm2},
            {"dxinvdy_norm2", gs.pohozaev.dxinvdy_norm2},
            {"mass_term", gs.pohozaev.mass_term},
            {"potential_term", gs.pohozaev.potential_term}}},
          {"pohozaev_deviations", dev},
          {"stabilizer_history", gs.stabilizer_history}};
}

std::vector<double> number_list(const json& g, const char* key, std::vector<double> fallback) {
  return g.contains(key) ? g[key].get<std::vector<double>>() : fallback;
}

json dispersion_fit(const std::string& mode, const json& grid) {
  if (mode == "cylinder") {
    const int j_min = grid.value("j_min", 0), j_max = grid.value("j_max", 3);
    const int span = grid.value("l_span", 6), ts = grid.value("t_samples", 3);
    std::vector<DecaySample> all;
    for (int j = j_min; j <= j_max; ++j) {
      const auto s = cylinder_samples(j, 2 * j, 2 * j + span, ts);
      all.insert(all.end(), s.begin(), s.end());
    }
    json out = to_json(fit_exponents(all, cylinder_bound_exponents(), {"2^l", "2^j"}));
    out["mode"] = mode;
    return out;
  }
  const bool kernel = mode == "kernel2d";
  if (!kernel && mode != "phase1d") fail(ErrorCode::InvalidArgument, "unknown dispersion mode: " + mode);
  const auto N = number_list(grid, "N", {1.0, 2.0, 4.0, 8.0});
  const auto tau = number_list(grid, "tau", log_space(100.0, 1e4, 11));
  const auto thetas = number_list(grid, "theta", {0.0, 0.25, 0.5});
  const auto samples = kernel ? kernel2d_samples(N, tau) : phase1d_samples(N, tau);
  json fits = json::array();
  for (double th : thetas) {
    const std::vector<double> e =
        kernel ? std::vector<double>{-0.5 - th, 1.5 - 5.0 * th} : std::vector<double>{-th, 1.0 - 5.0 * th};
    json f = to_json(fit_exponents(samples, e, {"t", "N"}));
    f["theta"] = th;
    fits.push_back(f);
  }
  json out = fits.front();
  out["mode"] = mode;
  int violations = 0;
  for (const auto& f : fits) violations += f["violations"].get<int>();
  out["violations"] = violations;
  out["fits"] = fits;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral toolkit for the fifth-order modified KP-I equation"};
  app.require_subcommand(1);

  std::string p_text = "2";
  double c = 1.0;

  auto* gs_cmd = app.add_subcommand("ground-state", "Petviashvili ground state");
  int nx = 256, ny = 256;
  double lx = 40.0, ly = 40.0, tol = 1e-10;
  int max_iter = 500, starts = 0;
  std::string gs_out, gs_report;
  gs_cmd->add_option("--p", p_text, "exponent m/n");
  gs_cmd->add_option("--c", c);
  gs_cmd->add_option("--nx", nx);
  gs_cmd->add_option("--ny", ny);
  gs_cmd->add_option("--lx", lx);
  gs_cmd->add_option("--ly", ly);
  gs_cmd->add_option("--tol", tol);
  gs_cmd->add_option("--max-iter", max_iter);
  gs_cmd->add_option("--multi-start", starts, "number of seeded starts, 0 for the preset only");
  gs_cmd->add_option("--out", gs_out, "KP5FLD output")->required();
  gs_cmd->add_option("--report", gs_report);

  auto* ev_cmd = app.add_subcommand("evolve", "time integration from a snapshot");
  std::string init, integrator = "etdrk4", diag, snap_dir;
  double dt = 1e-4, t_final = 1.0;
  int snap_every = 0, diag_stride = 10;
  ev_cmd->add_option("--init", init)->required();
  ev_cmd->add_option("--dt", dt);
  ev_cmd->add_option("--t-final", t_final);
  ev_cmd->add_option("--p", p_text);
  ev_cmd->add_option("--integrator", integrator);
  ev_cmd->add_option("--diag-stride", diag_stride);
  ev_cmd->add_option("--diag", diag, "CSV diagnostics");
  ev_cmd->add_option("--snapshots", snap_dir);
  ev_cmd->add_option("--snap-every", snap_every);

  auto* disp_cmd = app.add_subcommand("dispersion", "kernel decay fits");
  std::string mode, grid_path, fit_out;
  disp_cmd->add_option("--mode", mode)->required()->check(CLI::IsMember({"phase1d", "kernel2d", "cylinder"}));
  disp_cmd->add_option("--param-grid", grid_path);
  disp_cmd->add_option("--out", fit_out)->required();

  auto* run_cmd = app.add_subcommand("run", "scenario runner");
  std::string scenario, config, out_dir = "results";
  bool dat = false;
  run_cmd->add_option("--scenario", scenario, "global-threshold, blowup, virial, cylinder, dispersion")->required();
  run_cmd->add_option("--config", config);
  run_cmd->add_option("--out-dir", out_dir);
  run_cmd->add_flag("--dat", dat, "also write gnuplot .dat files");

  CLI11_PARSE(app, argc, argv);

  try {
    const Power power(Rational::parse(p_text));
    if (*gs_cmd) {
      const Grid2D g(nx, ny, lx, ly);
      const GroundState gs = starts > 0 ? multi_start(power, c, g, tol, max_iter, starts)
                                        : petviashvili_solve(power, c, g, tol, max_iter);
      write_snapshot(gs_out, {gs.phi, 0.0, power.p});
      const json r = ground_state_json(gs);
      if (!gs_report.empty()) write_text(gs_report, r.dump(2) + "\n");
      std::cout << r.dump(2) << "\n";
      return 0;
    }
    if (*ev_cmd) {
      const Snapshot snap = read_snapshot(init);
      SolverConfig cfg;
      cfg.dt = dt;
      cfg.t_final = t_final;
      cfg.p = power;
      cfg.integrator = integrator_from_string(integrator);
      cfg.diag_stride = diag_stride;
      EvolveOptions o;
      o.snapshot_every = snap_every;
      int count = 0;
      if (!snap_dir.empty()) {
        fs::create_directories(snap_dir);
        o.on_snapshot = [&](double t, const Spectrum& s) {
          char name[32];
          std::snprintf(name, sizeof name, "snap_%06d.kp5", count++);
          write_snapshot(fs::path(snap_dir) / name, {inverse(s), snap.time + t, power.p});
        };
      }
      const EvolveResult r = evolve(snap.field, cfg, o);
      if (!diag.empty()) write_text(diag, diagnostics_csv(r.diagnostics));
      const json summary = {{"steps", r.steps},
                            {"cfl", r.cfl},
                            {"mass_drift", r.mass_drift},
                            {"energy_drift", r.energy_drift},
                            {"blowup_detected", r.blowup.detected},
                            {"trigger", to_string(r.blowup.trigger)},
                            {"t_detect", r.blowup.t_detect}};
      std::cout << summary.dump(2) << "\n";
      return 0;
    }
    if (*disp_cmd) {
      const json grid = grid_path.empty() ? json::object() : read_json(grid_path);
      const json fit = dispersion_fit(mode, grid);
      write_text(fit_out, fit.dump(2) + "\n");
      std::cout << "slopes " << fit["slopes"].dump() << " bound_constant " << fit["bound_constant"]
                << " violations " << fit["violations"] << "\n";
      return 0;
    }
    const ScenarioKind kind = scenario_kind_from_string(scenario);
    const Scenario sc = config.empty() ? default_scenario(kind) : scenario_from_json(read_json(config), kind);
    const ScenarioReport rep = run_scenario(sc);
    const fs::path dir(out_dir);
    for (const auto& [name, body] : rep.files) {
      write_text(dir / name, body);
      if (dat) write_text(dir / fs::path(name).replace_extension(".dat"), csv_to_dat(body));
    }
    write_text(dir / "report.json", to_json(rep).dump(2) + "\n");
    std::cout << rep.id << ": " << (rep.pass ? "pass" : "FAIL") << "\n";
    return rep.pass ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 2;
  }
}
