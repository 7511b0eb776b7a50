#pragma once

#include "delam/adhesive.hpp"
#include "delam/bem.hpp"

#include <vector>

namespace delam {

/// Prescribed data of one domain at one instant: nodal u_D (2 per Dirichlet
/// node) and p_N (2 per Neumann traction DOF), in the partition order.
struct LoadSnapshot {
  VecX u_D;
  VecX p_N;
  bool homogeneous_neumann() const { return p_N.size() == 0 || p_N.isZero(0.0); }
};

/// Energies of one accepted step, N/mm per unit thickness (= J/m).
struct EnergyBreakdown {
  double bulk = 0.0;
  double adhesive = 0.0;
  double dissipated_step = 0.0;
  double dissipated_cumulative = 0.0;
  double total = 0.0;      // bulk + adhesive
  double lower = 0.0;      // power integral with the new contact displacement
  double upper = 0.0;      // power integral with the old contact displacement
  double increment = 0.0;  // total_k + dissipated_step − total_{k−1}
};

/// ½∫_Γ u·p dS for nodal u and element-end tractions p.
double bulk_energy_boundary(const DomainMesh& mesh, const TractionLayout& layout, const VecX& u, const VecX& p);

/// Condensed bulk potential energy ½u_CᵀK_Cu_C + f_Cᵀu_C + c of one domain.
double condensed_bulk_energy(const CondensedOperator& op, const VecX& u_C, const LoadSnapshot& load);

/// Bulk energy of all domains plus the adhesive energy.
double total_potential_energy(const std::vector<const CondensedOperator*>& ops, const std::vector<VecX>& u_C,
                              const std::vector<LoadSnapshot>& loads, double adhesive);

/// ∫ ∂Π/∂t dt over one step with the contact displacement frozen at `u_C`.
/// With p_N ≡ 0 in both snapshots the homogeneous form is used.
double power_integral(const CondensedOperator& op, const LoadSnapshot& previous, const LoadSnapshot& current,
                      const VecX& u_C);
/// Power integral at the new contact displacement u_C^k.
inline double power_integral_lower(const CondensedOperator& op, const LoadSnapshot& previous,
                                   const LoadSnapshot& current, const VecX& u_C_new) {
  return power_integral(op, previous, current, u_C_new);
}
/// Power integral at the old contact displacement u_C^{k−1}.
inline double power_integral_upper(const CondensedOperator& op, const LoadSnapshot& previous,
                                   const LoadSnapshot& current, const VecX& u_C_old) {
  return power_integral(op, previous, current, u_C_old);
}

/// lower − tol ≤ increment ≤ upper + tol.
bool two_sided_holds(const EnergyBreakdown& e, double tol);

}  // namespace delam
