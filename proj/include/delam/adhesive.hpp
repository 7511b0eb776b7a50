#pragma once

#include "delam/mesh.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace delam {

class AdhesiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stiffnesses in MPa/mm, G_Ic in N/mm, yield stress in MPa, κ_0 in N.
struct AdhesiveParams {
  double kappa_n = 18000.0;
  double kappa_t = 4500.0;
  double kappa_H = 500.0;
  double kappa_0 = 0.0;
  double G_Ic = 10.0;
  double sigma_yield = 168.0;

  double sigma_n_crit() const { return std::sqrt(2.0 * kappa_n * G_Ic); }
  double sigma_t_crit() const { return std::sqrt(2.0 * kappa_t * G_Ic); }
  /// ½σ_t,crit < σ_yield ≤ σ_t,crit.
  bool yield_window_ok() const;
  /// Throws on invalid values; returns warnings (yield window) as text.
  std::vector<std::string> validate() const;
};

/// κ_n and κ_t of a thin isotropic layer of modulus E_a, Poisson ratio ν_a and thickness h_a.
double layer_normal_stiffness(double E_a, double nu_a, double h_a);
double layer_tangential_stiffness(double kappa_n, double nu_a);

template <class Scalar>
struct Activation {
  Scalar value;
  bool triggered;
};

/// Stored areal energy ½κ_n⟦u⟧ₙ² + ½κ_t(⟦u⟧ₜ−π)² against G_Ic.
template <class Scalar>
Activation<Scalar> damage_activation(const AdhesiveParams& p, Scalar jump_n, Scalar jump_t, Scalar pi) {
  const Scalar e = Scalar(0.5) * Scalar(p.kappa_n) * jump_n * jump_n +
                   Scalar(0.5) * Scalar(p.kappa_t) * (jump_t - pi) * (jump_t - pi);
  return {e, e >= Scalar(p.G_Ic)};
}

/// Driving stress |ζκ_t(⟦u⟧ₜ−π) − κ_H π| against σ_yield.
template <class Scalar>
Activation<Scalar> plastic_activation(const AdhesiveParams& p, Scalar zeta, Scalar jump_t, Scalar pi) {
  using std::abs;
  const Scalar s = abs(zeta * Scalar(p.kappa_t) * (jump_t - pi) - Scalar(p.kappa_H) * pi);
  return {s, s >= Scalar(p.sigma_yield)};
}

/// Energy release rate including the slip terms, N/mm.
template <class Scalar>
Scalar err_with_plasticity(const AdhesiveParams& p, Scalar jump_n, Scalar jump_t, Scalar pi) {
  using std::abs;
  return Scalar(0.5) * Scalar(p.kappa_n) * jump_n * jump_n +
         Scalar(0.5) * Scalar(p.kappa_t) * (jump_t - pi) * (jump_t - pi) + Scalar(p.sigma_yield) * abs(pi) +
         Scalar(0.5) * Scalar(p.kappa_H) * pi * pi;
}

/// Slip at yield with positive shear, eliminated from the tangential equilibrium.
double eliminated_slip(const AdhesiveParams& p, double jump_t);

/// Mode-mixity angles (radians) of an elastic crack-tip state.
struct ModeMixity {
  double psi_u = 0.0;      // atan(⟦u⟧ₜ/⟦u⟧ₙ)
  double psi_G = 0.0;      // atan(√(G_II/G_I))
  double psi_sigma = 0.0;  // atan(σ_t/σ_n)
};

ModeMixity mode_mixity(const AdhesiveParams& p, double jump_n, double jump_t);

struct GcPoint {
  double phi = 0.0;
  double jump_n = 0.0;
  double jump_t = 0.0;
  double G_c = 0.0;
  bool plastic = false;
  ModeMixity mixity;
};

/// Crack-growth onset at parametric angle φ ∈ [0, π/2].
GcPoint gc_curve(const AdhesiveParams& p, double phi);
/// φ* separating the elastic and plastic branches.
double gc_transition_angle(const AdhesiveParams& p);

/// ζ per interface element, π per entry; `_prev` are the last accepted values.
struct InterfaceState {
  VecX zeta, pi;
  VecX zeta_prev, pi_prev;
  double dissipated = 0.0;  // N/mm over Γ_C

  static InterfaceState virgin(const InterfacePairing& pairing);
};

/// Per-element pieces of the adhesive energy.
struct AdhesiveEnergyParts {
  double normal = 0.0;
  double tangential = 0.0;
  double hardening = 0.0;
  double gradient = 0.0;
  double total() const { return normal + tangential + hardening + gradient; }
};

/// ∫_ΓC ζ(½κ_n⟦u⟧ₙ² + ½κ_t(⟦u⟧ₜ−π)²) + ½κ_H π² + κ_0/2 |∂ζ|² dS; +∞ when a
/// normal jump is below −feasibility_tol or ζ leaves [0, 1].
double adhesive_energy(const AdhesiveParams& p, const InterfacePairing& pairing, const VecX& zeta, const VecX& pi,
                       const VecX& jump_n, const VecX& jump_t, double feasibility_tol = 0.0,
                       AdhesiveEnergyParts* parts = nullptr);

/// Per-element stored energy per unit length and unit ζ:
/// e_m = (1/h)∫ ½κ_n⟦u⟧ₙ² + ½κ_t(⟦u⟧ₜ−π)² dS.
VecX element_energy_density(const AdhesiveParams& p, const InterfacePairing& pairing, const VecX& pi,
                            const VecX& jump_n, const VecX& jump_t);

struct DissipationParts {
  double damage = 0.0;
  double plastic = 0.0;
  double total() const { return damage + plastic; }
};

/// ∫ G_Ic|Δζ| + σ_yield|Δπ| dS with trapezoidal nodal weights for |Δπ|;
/// +∞ on any healing (Δζ > 0).
double dissipation_increment(const AdhesiveParams& p, const InterfacePairing& pairing, const VecX& zeta_new,
                             const VecX& zeta_old, const VecX& pi_new, const VecX& pi_old,
                             DissipationParts* parts = nullptr);

/// Distance between the midpoints of consecutive interface elements sharing an
/// entry, as (element a, element b, distance).
struct ElementAdjacency {
  Index a, b;
  double distance;
};
std::vector<ElementAdjacency> element_adjacency(const InterfacePairing& pairing);

/// Element mass matrix h/6 [[2,1],[1,2]] assembled over the interface entries.
MatX interface_mass(const InterfacePairing& pairing, const VecX& element_weight);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace delam
