#include "kp5/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "kp5/dispersion.hpp"
#include "kp5/error.hpp"
#include "kp5/functionals.hpp"
#include "kp5/snapshot.hpp"
#include "kp5/spectral.hpp"

namespace kp5 {

using nlohmann::json;

namespace {

constexpr double kThresholdSlack = 1e-3;
constexpr double kVirialTol = 1e-2;
constexpr double kLinearVirialTol = 1e-4;
constexpr double kIdentityTol = 1e-2;
constexpr double kPohozaevTol = 1e-4;
constexpr double kCylMassTol = 1e-8;
constexpr double kCylEnergyTol = 1e-6;
constexpr double kCylGrowth = 10.0;
constexpr double kPhaseSlopeLo = -0.55, kPhaseSlopeHi = -0.45;
constexpr double kKernelSlopeLo = -1.05, kKernelSlopeHi = -0.95;
constexpr double kLevelSlope = -2.9 + 2.0;

const std::pair<ScenarioKind, const char*> kKindNames[] = {
    {ScenarioKind::GlobalThreshold, "global-threshold"},
    {ScenarioKind::BlowupJ, "blowup"},
    {ScenarioKind::VirialCheck, "virial"},
    {ScenarioKind::CylinderSmallData, "cylinder"},
    {ScenarioKind::DispersionSuite, "dispersion"},
};

std::string fnv1a(const Eigen::ArrayXXd& v) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
  for (size_t i = 0; i < static_cast<size_t>(v.size()) * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json error_json(const Error& e) { return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}; }

// Relative drift, zero when the reference vanishes with the series.
double max_rel_drift(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double ref = v.front();
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::abs(x - ref));
  if (worst == 0.0) return 0.0;
  return ref == 0.0 ? std::numeric_limits<double>::infinity() : worst / std::abs(ref);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_inf(const json& v) {
  return v.is_number() ? v.get<double>() : std::numeric_limits<double>::infinity();
}

bool has_error(const json& r) { return r.contains("error") && !r["error"].is_null(); }


SolverConfig solver_from_json(const json& j, SolverConfig c) {
  if (j.contains("dt")) c.dt = j["dt"].get<double>();
  if (j.contains("t_final")) c.t_final = j["t_final"].get<double>();
  if (j.contains("p"))
    c.p = Power(Rational::parse(j["p"].is_string() ? j["p"].get<std::string>() : std::to_string(j["p"].get<int>())),
                j.value("odd_root", false));
  if (j.contains("nonlinear")) c.nonlinear = j["nonlinear"].get<bool>();
  if (j.contains("integrator")) c.integrator = integrator_from_string(j["integrator"].get<std::string>());
  if (j.contains("diag_stride")) c.diag_stride = j["diag_stride"].get<int>();
  if (j.contains("blowup_growth_factor")) c.blowup_growth_factor = j["blowup_growth_factor"].get<double>();
  if (j.contains("tail_energy_frac")) c.tail_energy_frac = j["tail_energy_frac"].get<double>();
  if (j.contains("contour_points")) c.contour_points = j["contour_points"].get<int>();
  if (j.contains("c")) c.c = j["c"].get<double>();
  return c;
}

json solver_json(const SolverConfig& c) {
  return {{"dt", c.dt},
          {"t_final", c.t_final},
          {"p", c.p.p.str()},
          {"odd_root", c.p.odd_root},
          {"integrator", to_string(c.integrator)},
          {"diag_stride", c.diag_stride},
          {"blowup_growth_factor", c.blowup_growth_factor},
          {"tail_energy_frac", c.tail_energy_frac},
          {"contour_points", c.contour_points},
          {"nonlinear", c.nonlinear},
          {"c", c.c}};
}

Grid2D scenario_grid(const Scenario& sc) {
  if (sc.kind == ScenarioKind::CylinderSmallData) return Grid2D::cylinder(sc.nx, sc.ny, sc.lx);
  return Grid2D(sc.nx, sc.ny, sc.lx, sc.ly);
}

ScenarioReport new_report(const Scenario& sc) {
  ScenarioReport r;
  r.id = sc.id;
  r.kind = sc.kind;
  r.scenario = to_json(sc);
  return r;
}

void finish(ScenarioReport& r) { r.pass = recompute_pass(r.kind, r.records); }

// Interior second differences of J divided by 8.
std::vector<double> j_second_over_8(const DiagnosticsSeries& d) {
  std::vector<double> out;
  const size_t n = d.times.size();
  if (n < 3) return out;
  const double h = d.times[1] - d.times[0];
  for (size_t i = 1; i + 1 < n; ++i)
    out.push_back((d.reports[i + 1].J - 2.0 * d.reports[i].J + d.reports[i - 1].J) / (h * h) / 8.0);
  return out;
}

// phi rescaled by the instability family without the localization guard.
Field unguarded_instability(const Field& phi, double eps, const Rational& p) {
  const ScaleCoefficients sc = scale_coefficients(ScaleFamily::instability(eps), p);
  const Grid2D& g = phi.grid();
  Eigen::ArrayXXd v = sc.amplitude * evaluate_scaled(forward(phi), sc.a, sc.b);
  for (int k = 0; k < g.ny(); ++k)
    for (int i = 0; i < g.nx(); ++i)
      if (std::abs(sc.a * g.x(i)) > 0.5 * g.lx() || std::abs(sc.b * g.y(k)) > 0.5 * g.ly()) v(i, k) = 0.0;
  return inverse(project_zero_x_mean(forward(Field(g, std::move(v)))));
}

json functionals_json(const FunctionalReport& r) {
  return {{"mass", r.mass}, {"energy", r.energy}, {"L1", r.L1}, {"I", r.I}, {"K", r.K}, {"Q", r.Q}, {"J", r.J}};
}

std::string fraction_tag(double f) {
  std::ostringstream s;
  s << f;
  return s.str();
}

}  // namespace

std::string to_string(ScenarioKind k) {
  for (auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& text) {
  for (auto& [kind, name] : kKindNames)
    if (text == name) return kind;
  fail(ErrorCode::InvalidArgument, "unknown scenario: " + text);
}

Scenario default_scenario(ScenarioKind kind) {
  Scenario sc;
  sc.kind = kind;
  sc.id = to_string(kind);
  sc.solver.dt = 1e-3;
  switch (kind) {
    case ScenarioKind::GlobalThreshold:
      sc.solver.t_final = 5.0;
      break;
    case ScenarioKind::BlowupJ:
      sc.solver.t_final = 10.0;
      break;
    case ScenarioKind::VirialCheck:
      sc.sigma = 2.0;
      sc.solver.dt = 1e-4;
      sc.solver.t_final = 0.5;
      break;
    case ScenarioKind::CylinderSmallData:
      sc.ny = 32;
      sc.ly = 2.0 * std::numbers::pi;
      sc.solver.t_final = 20.0;
      break;
    case ScenarioKind::DispersionSuite:
      break;
  }
  sc.dispersion.tau = log_space(100.0, 1e4, 11);
  return sc;
}

void validate(const Scenario& sc) {
  for (double f : sc.mass_fractions)
    if (!(f > 0.0 && f < 1.0)) fail(ErrorCode::InvalidArgument, "mass fractions must lie in (0, 1)");
  for (double e : sc.epsilons)
    if (!(e >= 0.0 && e < 1.0 / 6.0)) fail(ErrorCode::InvalidArgument, "epsilons must lie in [0, 1/6)");
  if (!(sc.amplitude >= 0.0)) fail(ErrorCode::InvalidArgument, "amplitude must be nonnegative");
  if (!(sc.sigma > 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be positive");
  if (sc.kind != ScenarioKind::DispersionSuite) {
    validate(sc.solver);
    (void)scenario_grid(sc);
  }
}

Scenario scenario_from_json(const json& j, ScenarioKind kind) {
  Scenario sc = default_scenario(kind);
  try {
    if (j.contains("id")) sc.id = j["id"].get<std::string>();
    if (j.contains("mass_fractions")) sc.mass_fractions = j["mass_fractions"].get<std::vector<double>>();
    if (j.contains("epsilons")) sc.epsilons = j["epsilons"].get<std::vector<double>>();
    if (j.contains("amplitude")) sc.amplitude = j["amplitude"].get<double>();
    if (j.contains("grid")) {
      const json& g = j["grid"];
      sc.nx = g.value("nx", sc.nx);
      sc.ny = g.value("ny", sc.ny);
      sc.lx = g.value("lx", sc.lx);
      sc.ly = g.value("ly", sc.ly);
    }
    if (j.contains("sigma")) sc.sigma = j["sigma"].get<double>();
    if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("ground_state")) sc.ground_state_path = j["ground_state"].get<std::string>();
    if (j.contains("gs_tol")) sc.gs_tol = j["gs_tol"].get<double>();
    if (j.contains("gs_max_iter")) sc.gs_max_iter = j["gs_max_iter"].get<int>();
    if (j.contains("solver")) sc.solver = solver_from_json(j["solver"], sc.solver);
    if (j.contains("dispersion")) {
      const json& d = j["dispersion"];
      DispersionPlan& p = sc.dispersion;
      p.phase1d = d.value("phase1d", p.phase1d);
      p.kernel2d = d.value("kernel2d", p.kernel2d);
      p.cylinder = d.value("cylinder", p.cylinder);
      if (d.contains("N")) p.N = d["N"].get<std::vector<double>>();
      if (d.contains("tau")) p.tau = d["tau"].get<std::vector<double>>();
      p.cylinder_j_max = d.value("cylinder_j_max", p.cylinder_j_max);
      p.cylinder_l_span = d.value("cylinder_l_span", p.cylinder_l_span);
      p.cylinder_t_samples = d.value("cylinder_t_samples", p.cylinder_t_samples);
      p.poisson_j = d.value("poisson_j", p.poisson_j);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("scenario config: ") + e.what());
  }
  validate(sc);
  return sc;
}

json to_json(const Scenario& sc) {
  const DispersionPlan& p = sc.dispersion;
  return {{"kind", to_string(sc.kind)},
          {"id", sc.id},
          {"mass_fractions", sc.mass_fractions},
          {"epsilons", sc.epsilons},
          {"amplitude", sc.amplitude},
          {"grid", {{"nx", sc.nx}, {"ny", sc.ny}, {"lx", sc.lx}, {"ly", sc.ly}}},
          {"sigma", sc.sigma},
          {"seed", sc.seed},
          {"ground_state", sc.ground_state_path},
          {"gs_tol", sc.gs_tol},
          {"gs_max_iter", sc.gs_max_iter},
          {"solver", solver_json(sc.solver)},
          {"dispersion",
           {{"phase1d", p.phase1d},
            {"kernel2d", p.kernel2d},
            {"cylinder", p.cylinder},
            {"N", p.N},
            {"tau", p.tau},
            {"cylinder_j_max", p.cylinder_j_max},
            {"cylinder_l_span", p.cylinder_l_span},
            {"cylinder_t_samples", p.cylinder_t_samples},
            {"poisson_j", p.poisson_j}}}};
}

json to_json(const ScenarioReport& r) {
  json files = json::array();
  for (const auto& [name, body] : r.files) files.push_back(name);
  return {{"id", r.id}, {"kind", to_string(r.kind)}, {"scenario", r.scenario},
          {"records", r.records}, {"pass", r.pass}, {"files", files}};
}

json to_json(const DecayFit& f) {
  json samples = json::array();
  for (const auto& s : f.samples) samples.push_back({{"params", s.params}, {"value", s.value}});
  json slopes = json::array(), errs = json::array();
  for (size_t k = 0; k < f.slopes.size(); ++k) {
    slopes.push_back(finite_or_null(f.slopes[k]));
    errs.push_back(finite_or_null(f.slope_errors[k]));
  }
  return {{"names", f.names},          {"samples", samples},
          {"slopes", slopes},          {"slope_errors", errs},
          {"intercept", f.intercept},  {"bound_exponents", f.bound_exponents},
          {"bound_constant", f.bound_constant}, {"violations", f.violations}};
}

bool recompute_pass(ScenarioKind kind, const json& records) {
  if (!records.is_array() || records.empty()) return false;
  for (const json& r : records) {
    if (has_error(r)) return false;
    switch (kind) {
      case ScenarioKind::GlobalThreshold:
        if (r["detected"].get<bool>()) return false;
        if (r["max_proxy"].get<double>() > number_or_inf(r["bound"]) * (1.0 + kThresholdSlack)) return false;
        break;
      case ScenarioKind::BlowupJ:
        if (r["initial_label"] != "InJ") return false;
        if (r["pohozaev_max"].get<double>() >= kPohozaevTol) return false;
        if (!r["detected"].get<bool>()) return false;
        if (r["trigger"] != "DyGrowth" && r["trigger"] != "Both") return false;
        if (!r["j_concave"].get<bool>()) return false;
        if (number_or_inf(r["virial_residual"]) >= kVirialTol) return false;
        if (number_or_inf(r["identity_residual"]) > kIdentityTol) return false;
        if (!r["identity_negative"].get<bool>()) return false;
        if (r["inj_fraction"].get<double>() < 1.0) return false;
        break;
      case ScenarioKind::VirialCheck: {
        const double tol = r["family"] == "linear" ? kLinearVirialTol : kVirialTol;
        if (number_or_inf(r["virial_residual"]) >= tol) return false;
        break;
      }
      case ScenarioKind::CylinderSmallData:
        if (number_or_inf(r["mass_drift"]) >= kCylMassTol) return false;
        if (number_or_inf(r["e2_drift"]) >= kCylEnergyTol) return false;
        if (number_or_inf(r["zs_growth"]) > kCylGrowth) return false;
        break;
      case ScenarioKind::DispersionSuite:
        if (!r["pass"].get<bool>()) return false;
        break;
    }
  }
  return true;
}

GroundStateArtifact ground_state_for(const Scenario& sc) {
  const Grid2D g(sc.nx, sc.ny, sc.lx, sc.ly);
  auto solve = [&]() -> GroundState {
    if (sc.ground_state_path.empty()) return petviashvili_solve(sc.solver.p, sc.solver.c, g, sc.gs_tol, sc.gs_max_iter);
    if (!std::filesystem::exists(sc.ground_state_path))
      fail(ErrorCode::MissingGroundState, "no ground state at " + sc.ground_state_path);
    Snapshot snap = [&] {
      try {
        return read_snapshot(sc.ground_state_path);
      } catch (const Error& e) {
        fail(ErrorCode::MissingGroundState, std::string("unreadable ground state: ") + e.what());
      }
    }();
    const Field init = snap.field.grid() == g ? snap.field : inverse(resample(forward(snap.field), g));
    return petviashvili_solve(sc.solver.p, sc.solver.c, init, sc.gs_tol, sc.gs_max_iter);
  };
  GroundState gs = solve();
  const std::string hash = fnv1a(gs.phi.values());
  return {std::move(gs), hash};
}

Field dipole_seed(const Grid2D& g, double sigma, double target_mass) {
  const Field d = inverse(project_zero_x_mean(forward(Field::sample(g, [sigma](double x, double y) {
    const double s2 = sigma * sigma;
    return -2.0 * x / s2 * std::exp(-(x * x + y * y) / s2);
  }))));
  const double m = mass(d);
  return d.scaled(target_mass > 0.0 ? std::sqrt(target_mass / m) : 0.0);
}

std::string diagnostics_csv(const DiagnosticsSeries& d) {
  std::string out = csv_header() + ",tail_frac,label\n";
  for (size_t i = 0; i < d.times.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, ",%.17g,", d.tail_fracs[i]);
    out += csv_row(d.times[i], d.reports[i]) + buf + (i < d.labels.size() ? to_string(d.labels[i].label) : "") + "\n";
  }
  return out;
}

// ---------------------------------------------------------------- threshold

ScenarioReport run_global_threshold(const Scenario& sc, const GroundStateArtifact& gs) {
  validate(sc);
  ScenarioReport rep = new_report(sc);
  const Grid2D g = scenario_grid(sc);
  for (double f : sc.mass_fractions) {
    json rec = {{"fraction", f}, {"ground_state_hash", gs.hash}, {"phi_mass", gs.gs.mass}, {"error", nullptr}};
    try {
      const Field u0 = dipole_seed(g, sc.sigma, f * f * gs.gs.mass);
      const EvolveResult r = evolve(u0, sc.solver);
      const FunctionalReport& r0 = r.diagnostics.reports.front();
      const double bound = e2_bound(r0.mass, r0.energy, gs.gs.mass);
      double max_proxy = 0.0;
      for (const auto& fr : r.diagnostics.reports) max_proxy = std::max(max_proxy, fr.e2_proxy());
      rec["mass0"] = r0.mass;
      rec["energy0"] = r0.energy;
      rec["proxy0"] = r0.e2_proxy();
      rec["max_proxy"] = max_proxy;
      rec["bound"] = finite_or_null(bound);
      rec["margin"] = finite_or_null(bound * (1.0 + kThresholdSlack) - max_proxy);
      rec["detected"] = r.blowup.detected;
      rec["trigger"] = to_string(r.blowup.trigger);
      rec["t_end"] = r.diagnostics.times.back();
      rec["mass_drift"] = r.mass_drift;
      rec["energy_drift"] = r.energy_drift;
      rep.files.emplace_back("threshold_f" + fraction_tag(f) + ".csv", diagnostics_csv(r.diagnostics));
    } catch (const Error& e) {
      rec["error"] = error_json(e);
    }
    rep.records.push_back(rec);
  }
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------- blow-up

namespace {

json blowup_run(const Scenario& sc, const GroundStateArtifact& gs, double eps, double pohozaev_max,
                ScenarioReport& rep) {
  json rec = {{"epsilon", eps}, {"ground_state_hash", gs.hash}, {"d1", gs.gs.d1}, {"phi_mass", gs.gs.mass},
              {"pohozaev_max", pohozaev_max}, {"error", nullptr}};
  const Rational& p = sc.solver.p.p;
  try {
    if (p.num % 2 != 0) fail(ErrorCode::InvalidArgument, "blow-up family needs p = m/n with m even");
    // What the family produces on this box, even when the guard rejects it.
    try {
      const SetLabel raw = classify(unguarded_instability(gs.gs.phi, eps, p), sc.solver.p, gs.gs.d1, gs.gs.mass);
      rec["unguarded_label"] = to_string(raw.label);
      rec["unguarded"] = functionals_json(raw.report);
      rec["unguarded_L1_minus_d1"] = raw.report.L1 - gs.gs.d1;
    } catch (const Error&) {
    }
    const Field u0 = scale_transform(gs.gs.phi, ScaleFamily::instability(eps), p);
    const SetLabel lab = classify(u0, sc.solver.p, gs.gs.d1, gs.gs.mass);
    rec["initial_label"] = to_string(lab.label);
    rec["initial"] = functionals_json(lab.report);
    rec["L1_minus_d1"] = lab.report.L1 - gs.gs.d1;
    if (lab.label != SetLabel::Kind::InJ)
      fail(ErrorCode::NotInJ, "initial data labelled " + to_string(lab.label) + ", not InJ");

    EvolveOptions o;
    o.d1 = gs.gs.d1;
    o.phi_mass = gs.gs.mass;
    const EvolveResult r = evolve(u0, sc.solver, o);
    const DiagnosticsSeries& d = r.diagnostics;
    rec["detected"] = r.blowup.detected;
    rec["t_detect"] = r.blowup.t_detect;
    rec["trigger"] = to_string(r.blowup.trigger);
    rec["j_concave"] = r.blowup.J_concavity_confirmed;
    rec["estimated_T0"] = finite_or_null(r.blowup.estimated_T0);
    rec["samples"] = d.times.size();
    rec["virial_residual"] = finite_or_null(d.times.size() >= 3 ? virial_relative_residual(d)
                                                                : std::numeric_limits<double>::infinity());
    size_t inj = 0;
    for (const auto& l : d.labels) inj += l.label == SetLabel::Kind::InJ;
    rec["inj_fraction"] = d.labels.empty() ? 0.0 : static_cast<double>(inj) / d.labels.size();

    const std::vector<double> j8 = j_second_over_8(d);
    double scale = 0.0, worst = 0.0;
    bool negative = !j8.empty();
    for (size_t i = 0; i < j8.size(); ++i) {
      const double ik = d.reports[i + 1].I - d.reports[i + 1].K;
      scale = std::max(scale, std::abs(ik));
      worst = std::max(worst, std::abs(j8[i] - ik));
      negative = negative && ik < 0.0 && j8[i] < 0.0;
    }
    rec["identity_residual"] = finite_or_null(scale > 0.0 ? worst / scale : std::numeric_limits<double>::infinity());
    rec["identity_negative"] = negative;
    rep.files.emplace_back("blowup_eps" + fraction_tag(eps) + ".csv", diagnostics_csv(d));
  } catch (const Error& e) {
    rec["error"] = error_json(e);
  }
  return rec;
}

}  // namespace

ScenarioReport run_blowup(const Scenario& sc, const GroundStateArtifact& gs) {
  validate(sc);
  ScenarioReport rep = new_report(sc);
  double pmax = std::numeric_limits<double>::infinity();
  try {
    const auto dev = pohozaev_report(gs.gs);
    pmax = *std::max_element(dev.begin(), dev.end());
  } catch (const Error&) {
  }
  for (double eps : sc.epsilons) rep.records.push_back(blowup_run(sc, gs, eps, pmax, rep));
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------- virial

ScenarioReport run_virial(const Scenario& sc, const GroundStateArtifact& gs) {
  validate(sc);
  ScenarioReport rep = new_report(sc);
  const Grid2D g = scenario_grid(sc);
  struct Family {
    const char* name;
    double mass_fraction;  // of mass(phi); negative means the instability family
  };
  const double eps = sc.epsilons.empty() ? 0.02 : sc.epsilons[sc.epsilons.size() / 2];
  for (const Family fam : {Family{"linear", 1e-8}, Family{"subthreshold", 0.5}, Family{"J", -1.0}}) {
    json rec = {{"family", fam.name}, {"ground_state_hash", gs.hash}, {"error", nullptr}};
    try {
      Field u0 = Field::zeros(g);
      if (fam.mass_fraction > 0.0) {
        u0 = dipole_seed(g, sc.sigma, fam.mass_fraction * gs.gs.mass);
        rec["mass0"] = fam.mass_fraction * gs.gs.mass;
      } else {
        rec["epsilon"] = eps;
        u0 = scale_transform(gs.gs.phi, ScaleFamily::instability(eps), sc.solver.p.p);
        const SetLabel lab = classify(u0, sc.solver.p, gs.gs.d1, gs.gs.mass);
        if (lab.label != SetLabel::Kind::InJ)
          fail(ErrorCode::NotInJ, "initial data labelled " + to_string(lab.label) + ", not InJ");
      }
      const EvolveResult r = evolve(u0, sc.solver);
      rec["detected"] = r.blowup.detected;
      rec["t_end"] = r.diagnostics.times.back();
      rec["samples"] = r.diagnostics.times.size();
      double qmax = 0.0;
      for (const auto& fr : r.diagnostics.reports) qmax = std::max(qmax, std::abs(fr.Q));
      rec["max_abs_Q"] = qmax;
      rec["virial_residual"] = finite_or_null(r.diagnostics.times.size() >= 3 ? virial_relative_residual(r.diagnostics)
                                                                              : std::numeric_limits<double>::infinity());
      rep.files.emplace_back(std::string("virial_") + fam.name + ".csv", diagnostics_csv(r.diagnostics));
    } catch (const Error& e) {
      rec["error"] = error_json(e);
    }
    rep.records.push_back(rec);
  }
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------- cylinder

ScenarioReport run_cylinder(const Scenario& sc) {
  validate(sc);
  if (std::abs(sc.ly - 2.0 * std::numbers::pi) > 1e-12) fail(ErrorCode::WrongMode, "cylinder runs need ly = 2 pi");
  ScenarioReport rep = new_report(sc);
  const Grid2D g = scenario_grid(sc);
  const double s2 = sc.sigma * sc.sigma;
  Field shape = Field::sample(g, [s2](double x, double y) {
    return -2.0 * x / s2 * std::exp(-x * x / s2) * (1.0 + 0.5 * std::cos(y) + 0.25 * std::sin(2.0 * y));
  });
  const double peak = shape.max_abs();
  const Field u0 = inverse(project_zero_x_mean(forward(shape.scaled(sc.amplitude / peak))));
  for (Integrator integ : {Integrator::ETDRK4, Integrator::IFRK4}) {
    json rec = {{"integrator", to_string(integ)}, {"amplitude", sc.amplitude}, {"error", nullptr}};
    try {
      SolverConfig cfg = sc.solver;
      cfg.integrator = integ;
      std::vector<double> masses, energies, zs;
      EvolveOptions o;
      o.snapshot_every = cfg.diag_stride;
      o.on_snapshot = [&](double, const Spectrum& s) {
        masses.push_back(mass(s));
        energies.push_back(cylinder_energy(s, 2.0, cfg.p));
        zs.push_back(zs_norm(s, 2.0));
      };
      const EvolveResult r = evolve(u0, cfg, o);
      const double zs0 = zs.front();
      const double zmax = *std::max_element(zs.begin(), zs.end());
      rec["zs0"] = zs0;
      rec["zs_max"] = zmax;
      rec["zs_growth"] = zs0 > 0.0 ? zmax / zs0 : (zmax == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
      rec["mass_drift"] = finite_or_null(max_rel_drift(masses));
      rec["e2_drift"] = finite_or_null(max_rel_drift(energies));
      rec["e2_0"] = energies.front();
      rec["detected"] = r.blowup.detected;
      rec["t_end"] = r.trajectory.times.back();
      rec["samples"] = masses.size();
      rep.files.emplace_back("cylinder_" + to_string(integ) + ".csv", diagnostics_csv(r.diagnostics));
    } catch (const Error& e) {
      rec["error"] = error_json(e);
    }
    rep.records.push_back(rec);
  }
  finish(rep);
  return rep;
}

// ---------------------------------------------------------------- dispersion

namespace {

json oscillatory_mode(const char* name, const DispersionPlan& plan, bool kernel) {
  json rec = {{"mode", name}, {"error", nullptr}, {"pass", false}};
  try {
    const auto samples = kernel ? kernel2d_samples(plan.N, plan.tau) : phase1d_samples(plan.N, plan.tau);
    const double lo = kernel ? kKernelSlopeLo : kPhaseSlopeLo;
    const double hi = kernel ? kKernelSlopeHi : kPhaseSlopeHi;
    json fits = json::array();
    bool ok = true;
    double slope = std::numeric_limits<double>::quiet_NaN();
    for (double theta : {0.0, 0.25, 0.5}) {
      const std::vector<double> e = kernel ? std::vector<double>{-0.5 - theta, 1.5 - 5.0 * theta}
                                           : std::vector<double>{-theta, 1.0 - 5.0 * theta};
      const DecayFit f = fit_exponents(samples, e, {"t", "N"});
      slope = f.slopes[0];
      json fj = to_json(f);
      fj["theta"] = theta;
      ok = ok && f.violations == 0;
      fits.push_back(fj);
    }
    rec["fits"] = fits;
    rec["t_slope"] = finite_or_null(slope);
    rec["slope_window"] = {lo, hi};
    rec["pass"] = ok && slope >= lo && slope <= hi;
  } catch (const Error& e) {
    rec["error"] = error_json(e);
  }
  return rec;
}

json cylinder_mode(const DispersionPlan& plan) {
  json rec = {{"mode", "cylinder"}, {"error", nullptr}, {"pass", false}};
  try {
    std::vector<DecaySample> all;
    json levels = json::array();
    std::vector<double> sup_at_2j;
    bool ok = true;
    for (int j = 0; j <= plan.cylinder_j_max; ++j) {
      const auto s = cylinder_samples(j, 2 * j, 2 * j + plan.cylinder_l_span, plan.cylinder_t_samples);
      double first = 0.0;
      for (const auto& x : s)
        if (x.params[0] == std::ldexp(1.0, 2 * j)) first = std::max(first, x.value);
      sup_at_2j.push_back(first);
      const DecayFit f = fit_exponents(s, cylinder_bound_exponents(), {"2^l", "2^j"});
      json fj = to_json(f);
      fj["j"] = j;
      levels.push_back(fj);
      ok = ok && f.violations == 0;
      all.insert(all.end(), s.begin(), s.end());
    }
    rec["levels"] = levels;
    if (plan.cylinder_j_max >= 1) {
      const DecayFit f = fit_exponents(all, cylinder_bound_exponents(), {"2^l", "2^j"});
      rec["combined"] = to_json(f);
      ok = ok && f.violations == 0;
    }
    json steps = json::array();
    for (size_t j = 1; j < sup_at_2j.size(); ++j)
      steps.push_back({{"j", j}, {"log2_ratio", std::log2(sup_at_2j[j] / sup_at_2j[j - 1])}, {"bound_exponent", kLevelSlope}});
    rec["level_steps_at_l_2j"] = steps;
    rec["pass"] = ok;
  } catch (const Error& e) {
    rec["error"] = error_json(e);
  }
  return rec;
}

json poisson_mode(const DispersionPlan& plan) {
  json rec = {{"mode", "poisson_tail"}, {"j", plan.poisson_j}, {"error", nullptr}, {"pass", false}};
  try {
    const double tail = poisson_tail_max(plan.poisson_j);
    const double bound = 10.0 * std::pow(2.0, -6.0 * plan.poisson_j);
    rec["tail"] = tail;
    rec["bound"] = bound;
    rec["pass"] = tail <= bound;
  } catch (const Error& e) {
    rec["error"] = error_json(e);
  }
  return rec;
}

}  // namespace

ScenarioReport run_dispersion_suite(const Scenario& sc) {
  validate(sc);
  ScenarioReport rep = new_report(sc);
  const DispersionPlan& plan = sc.dispersion;
  if (plan.phase1d) rep.records.push_back(oscillatory_mode("phase1d", plan, false));
  if (plan.kernel2d) rep.records.push_back(oscillatory_mode("kernel2d", plan, true));
  if (plan.cylinder) {
    rep.records.push_back(cylinder_mode(plan));
    rep.records.push_back(poisson_mode(plan));
  }
  finish(rep);
  return rep;
}

ScenarioReport run_scenario(const Scenario& sc) {
  switch (sc.kind) {
    case ScenarioKind::CylinderSmallData:
      return run_cylinder(sc);
    case ScenarioKind::DispersionSuite:
      return run_dispersion_suite(sc);
    default:
      break;
  }
  const GroundStateArtifact gs = ground_state_for(sc);
  switch (sc.kind) {
    case ScenarioKind::GlobalThreshold:
      return run_global_threshold(sc, gs);
    case ScenarioKind::BlowupJ:
      return run_blowup(sc, gs);
    default:
      return run_virial(sc, gs);
  }
}

}  // namespace kp5
