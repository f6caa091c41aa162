#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kp5/dispersion.hpp"
#include "kp5/evolution.hpp"
#include "kp5/ground_state.hpp"

namespace kp5 {

enum class ScenarioKind { GlobalThreshold, BlowupJ, VirialCheck, CylinderSmallData, DispersionSuite };

std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& text);

struct DispersionPlan {
  bool phase1d = true;
  bool kernel2d = true;
  bool cylinder = true;
  std::vector<double> N{1.0, 2.0, 4.0, 8.0};
  std::vector<double> tau;  // t N^5 values shared by every N
  int cylinder_j_max = 3;
  int cylinder_l_span = 6;  // l in [2j, 2j + span]
  int cylinder_t_samples = 3;
  int poisson_j = 2;
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::GlobalThreshold;
  std::string id;
  std::vector<double> mass_fractions{0.3, 0.5, 0.8};  // of ||phi||_L2, so mass = f^2 mass(phi)
  std::vector<double> epsilons{0.01, 0.02, 0.05};
  double amplitude = 1e-2;
  int nx = 128, ny = 128;
  double lx = 40.0, ly = 40.0;
  double sigma = 4.0;  // dipole width
  SolverConfig solver;
  std::uint64_t seed = 0;
  std::string ground_state_path;  // KP5FLD file; empty means solve on the scenario grid
  double gs_tol = 1e-10;
  int gs_max_iter = 500;
  DispersionPlan dispersion;
};

/// Defaults per kind, including t_final (5, 10, 20) and the cylinder grid.
Scenario default_scenario(ScenarioKind kind);
void validate(const Scenario& sc);

/// Fields absent from j keep the kind's defaults.
Scenario scenario_from_json(const nlohmann::json& j, ScenarioKind kind);
nlohmann::json to_json(const Scenario& sc);

struct ScenarioReport {
  std::string id;
  ScenarioKind kind = ScenarioKind::GlobalThreshold;
  nlohmann::json scenario;
  nlohmann::json records = nlohmann::json::array();  // one outcome object per run or mode
  bool pass = false;
  std::vector<std::pair<std::string, std::string>> files;  // per-run CSV diagnostics
};

nlohmann::json to_json(const ScenarioReport& r);
nlohmann::json to_json(const DecayFit& f);

/// The pass rule of each scenario, evaluated on stored records only.
bool recompute_pass(ScenarioKind kind, const nlohmann::json& records);

struct GroundStateArtifact {
  GroundState gs;
  std::string hash;  // FNV-1a of the profile samples
};

/// Loads sc.ground_state_path (MissingGroundState if unreadable) or solves on the scenario grid.
GroundStateArtifact ground_state_for(const Scenario& sc);

/// d/dx exp(-(x^2 + y^2)/sigma^2) on g, rescaled to the given mass.
Field dipole_seed(const Grid2D& g, double sigma, double target_mass);

ScenarioReport run_global_threshold(const Scenario& sc, const GroundStateArtifact& gs);
ScenarioReport run_blowup(const Scenario& sc, const GroundStateArtifact& gs);
ScenarioReport run_virial(const Scenario& sc, const GroundStateArtifact& gs);
ScenarioReport run_cylinder(const Scenario& sc);
ScenarioReport run_dispersion_suite(const Scenario& sc);

/// Dispatches on sc.kind, solving or loading the ground state when needed.
ScenarioReport run_scenario(const Scenario& sc);

std::string diagnostics_csv(const DiagnosticsSeries& d);

}  // namespace kp5
