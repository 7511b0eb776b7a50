#pragma once

#include "delam/evolution.hpp"

#include <array>
#include <string>
#include <vector>

namespace delam {

/// Rectangle specimen glued to a rigid foundation along part of one side.
/// Side arrays are indexed by RectSide (bottom, right, top, left).
struct ScenarioConfig {
  std::string name = "custom";
  double length = 250.0;  // mm
  double height = 12.5;   // mm
  std::array<Index, 4> side_counts{30, 2, 30, 2};
  std::array<BoundaryTag, 4> side_tags{BoundaryTag::Neumann, BoundaryTag::Dirichlet, BoundaryTag::Neumann,
                                       BoundaryTag::Neumann};
  RectSide contact_side = RectSide::Bottom;
  double contact_begin = 0.0;
  double contact_end = 225.0;
  Index contact_count = 27;
  /// Spatial load shapes per side: displacement (mm) on Dirichlet sides,
  /// traction (MPa) on Neumann sides.
  std::array<Vec2, 4> dirichlet_shape{Vec2::Zero(), Vec2(1.0, 0.6), Vec2::Zero(), Vec2::Zero()};
  std::array<Vec2, 4> neumann_shape{Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};

  Material<double> material{70000.0, 0.35};
  AdhesiveParams adhesive;
  LoadProgram load;
  EvolutionOptions options;

  /// Interface abscissa of the probed node (stress-jump history).
  double probe_x = 208.33;
  /// Times at which interface profiles are written.
  std::vector<double> snapshot_times;
  std::string out_dir = "out";

  void validate() const;
};

ScenarioConfig scenario_nonmonotonic(char variant);
/// Neumann-loaded strip, left side fixed; `contact_count` elements on Γ_C.
ScenarioConfig scenario_traction(double p0 = 1200.0, Index contact_count = 24);
/// Same geometry with damage excluded.
ScenarioConfig scenario_traction_plastic(Index contact_count);
/// Monotone pull with 54, 108 or 216 elements on Γ_C.
ScenarioConfig scenario_application(Index contact_elements = 54);
/// Application run stopped at u_1 = 0.28 mm on Γ_D.
ScenarioConfig scenario_application_snapshot(Index contact_elements = 54);

/// Names accepted by builtin_scenario.
std::vector<std::string> builtin_names();
/// `name` ∈ builtin_names(); `level` is the Γ_C element count where relevant.
ScenarioConfig builtin_scenario(const std::string& name, Index level = 0);

DomainMesh scenario_mesh(const ScenarioConfig& cfg);
Problem build_problem(const ScenarioConfig& cfg);

/// Response of a single adhesive point driven along a prescribed jump path.
struct SpringSample {
  double jump_n = 0.0, jump_t = 0.0;
  double sigma_n = 0.0, sigma_t = 0.0;
  double zeta = 1.0, pi = 0.0;
};
std::vector<SpringSample> spring_response(const AdhesiveParams& p, const std::vector<double>& jump_n,
                                          const std::vector<double>& jump_t, bool damage = true,
                                          bool plasticity = true);

/// gc_curve sampled at `samples` equidistant angles on [0, π/2].
std::vector<GcPoint> gc_sweep(const AdhesiveParams& p, Index samples = 91);

/// Coordinate of each interface entry along the contact side axis, mm.
std::vector<double> entry_abscissa(const ScenarioConfig& cfg, const DomainMesh& mesh, const InterfacePairing& pairing);
/// Entry closest to x given the abscissae of entry_abscissa.
Index nearest_entry(const std::vector<double>& abscissa, double x);

}  // namespace delam
