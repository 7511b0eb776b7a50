#pragma once

#include "delam/energy.hpp"
#include "delam/optim.hpp"

#include <optional>
#include <string>
#include <vector>

namespace delam {

enum class LoadKind { Zero, Linear, Sine, Power };

/// Scalar time factor: Linear a·t, Sine a·sin(ω t), Power a·t^ω.
struct LoadFunction {
  LoadKind kind = LoadKind::Zero;
  double amplitude = 1.0;
  double omega = 1.0;
  double operator()(double t) const;
};

/// u_D(t, x) = φ(t) u_D(x), p_N(t, x) = ψ(t) p_N(x) on t ∈ [0, T] in `steps`
/// equal increments, or on the explicit grid `times` when given.
struct LoadProgram {
  LoadFunction phi{LoadKind::Linear};
  LoadFunction psi{LoadKind::Zero};
  double final_time = 1.0;
  Index steps = 100;
  std::vector<double> times;

  Index num_steps() const { return times.empty() ? steps : static_cast<Index>(times.size()) - 1; }
  double time(Index k) const;
  void validate() const;
};

/// One elastic subdomain with the spatial shapes of its prescribed data.
struct DomainSetup {
  DomainMesh mesh;
  Material<double> material;
  std::vector<Vec2> dirichlet;  // per node, read at Dirichlet nodes
  std::vector<Vec2> neumann;    // per element, read on Neumann elements
};

struct EvolutionOptions {
  bool damage = true;
  bool plasticity = true;
  double ama_tol = 1e-6;
  int ama_max_iter = 100;
  bool backtracking = true;
  /// Failed two-sided tests tolerated at any one time step before aborting.
  int max_backtracks = 50;
  /// Two-sided test slack relative to the energy scale of the step.
  double two_sided_rel_tol = 1e-7;
  bool stop_when_debonded = true;
  AssemblyOptions assembly;
  QpOptions qp{1e-10, -1, 1.0, true};
};

struct Problem {
  std::vector<DomainSetup> domains;
  InterfacePairing pairing;
  AdhesiveParams adhesive;
  LoadProgram load;
  EvolutionOptions options;
};

/// Fields and diagnostics of one accepted step.
struct StepRecord {
  Index step = 0;
  double time = 0.0;
  double phi = 0.0, psi = 0.0;
  VecX v;  // kinematic variables
  VecX jump_n, jump_t, pi, zeta;
  EnergyBreakdown energy;
  DissipationParts dissipation_step;
  AdhesiveEnergyParts adhesive_parts;
  std::vector<Vec2> force_D, force_N;  // per domain, N/mm
  int ama_iterations = 0;
  bool ama_converged = true;
  bool ama_monotone = true;
  bool two_sided_ok = true;
  double two_sided_tol = 0.0;
  /// min over single-element debond competitors of ΔΠ + R (≥ 0 when stable).
  double competitor_margin = kInfinity;
  int backtracks_before = 0;
};

struct EvolutionRecord {
  std::vector<StepRecord> steps;  // steps[0] is the initial state
  std::string termination;
  bool aborted = false;
  int total_backtracks = 0;
  int max_backtracks_seen = 0;
  std::vector<double> asymmetry;  // per domain
  double energy_balance_residual = 0.0;
  double peak_total_energy = 0.0;
};

struct AmaResult {
  StepRecord state;
  std::vector<double> objective_history;
};

/// Precomputed condensation and driver for one problem.
class Simulator {
 public:
  explicit Simulator(Problem problem);

  const Problem& problem() const { return problem_; }
  Index num_domains() const { return static_cast<Index>(problem_.domains.size()); }
  const CondensedOperator& condensed(Index d) const { return ops_[static_cast<std::size_t>(d)]; }
  const CollocationSystem& collocation(Index d) const { return systems_[static_cast<std::size_t>(d)]; }
  const MatX& bulk_stiffness() const { return K_; }
  /// Map from kinematic variables to the stacked u_C of domain d.
  const MatX& contact_map(Index d) const { return T_[static_cast<std::size_t>(d)]; }

  LoadSnapshot load_at(Index d, double phi, double psi) const;
  /// Bulk energy ½vᵀKv + f(t)ᵀv + c(t), all domains.
  double bulk_energy(const VecX& v, double phi, double psi) const;
  VecX bulk_linear(double phi, double psi) const;
  VecX contact_displacement(Index d, const VecX& v) const { return contact_map(d) * v; }
  /// Full boundary traces of domain d.
  BoundarySolution traces(Index d, const VecX& v, double phi, double psi) const;

  /// State at t_0: given ζ_0, π_0 and the elastic equilibrium.
  StepRecord initial_state(const VecX& zeta0, const VecX& pi0) const;
  /// Alternate minimization at time t_k from the accepted state `previous`.
  AmaResult ama_step(Index k, const StepRecord& previous, const VecX& zeta_init) const;
  /// Energetic bookkeeping of `candidate` relative to `previous` (fills energy fields).
  void evaluate_step(StepRecord& candidate, const StepRecord& previous) const;
  /// Smallest change of Π + R over single-element-debond competitors of an
  /// accepted state; +∞ when damage is disabled.
  double competitor_margin(const StepRecord& s) const;

  EvolutionRecord run(std::optional<VecX> zeta0 = std::nullopt, std::optional<VecX> pi0 = std::nullopt) const;

  double feasibility_tol() const { return feasibility_tol_; }

 private:
  void fill_outputs(StepRecord& s) const;

  Problem problem_;
  std::vector<CollocationSystem> systems_;
  std::vector<CondensedOperator> ops_;
  std::vector<MatX> T_;
  std::vector<VecX> uD_shape_, pN_shape_;
  MatX K_;
  VecX fD_, fN_;
  KinematicLayout layout_;
  double feasibility_tol_ = 0.0;
};

/// Enclosed area of a force-displacement path: the path is split where the
/// displacement changes sign and each run is closed through the origin.
double loop_area(const std::vector<double>& displacement, const std::vector<double>& force);

/// Number of interface elements newly debonded (ζ: >0 → 0) between two states.
Index newly_debonded(const VecX& zeta_old, const VecX& zeta_new);

/// Discrete energy balance residual |E(T) + Diss − E(0) − Σ ½(lower + upper)|.
double energy_balance_residual(const EvolutionRecord& record);

}  // namespace delam
