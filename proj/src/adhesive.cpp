#include "delam/adhesive.hpp"

#include <cmath>
#include <numbers>

namespace delam {

bool AdhesiveParams::yield_window_ok() const {
  const double s = sigma_t_crit();
  return 0.5 * s < sigma_yield && sigma_yield <= s;
}

std::vector<std::string> AdhesiveParams::validate() const {
  if (!(kappa_n > 0.0) || !(kappa_t > 0.0)) throw AdhesiveError("adhesive: κ_n and κ_t must be positive");
  if (!(G_Ic > 0.0)) throw AdhesiveError("adhesive: G_Ic must be positive");
  if (!(sigma_yield > 0.0)) throw AdhesiveError("adhesive: σ_t,yield must be positive");
  if (!(kappa_H >= 0.0)) throw AdhesiveError("adhesive: κ_H must be non-negative");
  if (!(kappa_0 >= 0.0)) throw AdhesiveError("adhesive: κ_0 must be non-negative");
  std::vector<std::string> warnings;
  if (!yield_window_ok())
    warnings.push_back("adhesive: σ_t,yield = " + std::to_string(sigma_yield) + " MPa lies outside (" +
                       std::to_string(0.5 * sigma_t_crit()) + ", " + std::to_string(sigma_t_crit()) + "]");
  return warnings;
}

double layer_normal_stiffness(double E_a, double nu_a, double h_a) {
  return E_a * (1.0 - nu_a) / (h_a * (1.0 + nu_a) * (1.0 - 2.0 * nu_a));
}

double layer_tangential_stiffness(double kappa_n, double nu_a) {
  return kappa_n * (1.0 - 2.0 * nu_a) / (2.0 * (1.0 - nu_a));
}

double eliminated_slip(const AdhesiveParams& p, double jump_t) {
  return p.kappa_t / (p.kappa_t + p.kappa_H) * (jump_t - p.sigma_yield / p.kappa_t);
}

ModeMixity mode_mixity(const AdhesiveParams& p, double jump_n, double jump_t) {
  ModeMixity m;
  m.psi_u = std::atan2(jump_t, jump_n);
  const double GI = 0.5 * p.kappa_n * jump_n * jump_n;
  const double GII = 0.5 * p.kappa_t * jump_t * jump_t;
  m.psi_G = std::atan2(std::sqrt(GII), std::sqrt(GI));
  m.psi_sigma = std::atan2(p.kappa_t * jump_t, p.kappa_n * jump_n);
  return m;
}

double gc_transition_angle(const AdhesiveParams& p) {
  return std::asin(std::min(1.0, p.sigma_yield / p.sigma_t_crit()));
}

GcPoint gc_curve(const AdhesiveParams& p, double phi) {
  if (!(phi >= 0.0 && phi <= 0.5 * std::numbers::pi + 1e-15))
    throw AdhesiveError("gc_curve: φ must lie in [0, π/2]");
  GcPoint g;
  g.phi = phi;
  g.jump_n = std::sqrt(2.0 * p.G_Ic / p.kappa_n) * std::cos(phi);
  const double s = std::sin(phi);
  if (phi <= gc_transition_angle(p)) {
    g.jump_t = std::sqrt(2.0 * p.G_Ic / p.kappa_t) * s;
    g.G_c = p.G_Ic;
    g.mixity = mode_mixity(p, g.jump_n, g.jump_t);
    return g;
  }
  if (!(p.kappa_H > 0.0)) throw AdhesiveError("gc_curve: the plastic branch needs κ_H > 0");
  g.plastic = true;
  g.jump_t = std::sqrt(2.0 * p.G_Ic / p.kappa_t) * (p.kappa_t + p.kappa_H) / p.kappa_H * s -
             p.sigma_yield / p.kappa_H;
  g.G_c = p.G_Ic * (1.0 + p.kappa_t / p.kappa_H * s * s) - p.sigma_yield * p.sigma_yield / (2.0 * p.kappa_H);
  const double pi = eliminated_slip(p, g.jump_t);
  g.mixity.psi_u = std::atan2(g.jump_t, g.jump_n);
  const ModeMixity elastic = mode_mixity(p, g.jump_n, g.jump_t - pi);
  g.mixity.psi_G = elastic.psi_G;
  g.mixity.psi_sigma = elastic.psi_sigma;
  return g;
}

InterfaceState InterfaceState::virgin(const InterfacePairing& pairing) {
  InterfaceState s;
  s.zeta = VecX::Ones(pairing.num_elements());
  s.pi = VecX::Zero(pairing.num_entries());
  s.zeta_prev = s.zeta;
  s.pi_prev = s.pi;
  return s;
}

namespace {

// ∫ a b over an element with nodal-linear a, b.
double linear_product(double h, double a0, double a1, double b0, double b1) {
  return h / 6.0 * (2.0 * a0 * b0 + a0 * b1 + a1 * b0 + 2.0 * a1 * b1);
}

void check_sizes(const InterfacePairing& pairing, const VecX& zeta, const VecX& pi, const VecX& jn, const VecX& jt) {
  if (zeta.size() != pairing.num_elements() || pi.size() != pairing.num_entries() ||
      jn.size() != pairing.num_entries() || jt.size() != pairing.num_entries())
    throw AdhesiveError("adhesive: field sizes do not match the interface");
}

}  // namespace

std::vector<ElementAdjacency> element_adjacency(const InterfacePairing& pairing) {
  std::vector<Index> starts_at(static_cast<std::size_t>(pairing.num_entries()), -1);
  for (Index e = 0; e < pairing.num_elements(); ++e)
    starts_at[static_cast<std::size_t>(pairing.elements[static_cast<std::size_t>(e)][0])] = e;
  std::vector<ElementAdjacency> out;
  for (Index e = 0; e < pairing.num_elements(); ++e) {
    const Index next = starts_at[static_cast<std::size_t>(pairing.elements[static_cast<std::size_t>(e)][1])];
    if (next >= 0)
      out.push_back({e, next,
                     0.5 * (pairing.element_lengths[static_cast<std::size_t>(e)] +
                            pairing.element_lengths[static_cast<std::size_t>(next)])});
  }
  return out;
}

MatX interface_mass(const InterfacePairing& pairing, const VecX& element_weight) {
  MatX M = MatX::Zero(pairing.num_entries(), pairing.num_entries());
  for (Index e = 0; e < pairing.num_elements(); ++e) {
    const auto& el = pairing.elements[static_cast<std::size_t>(e)];
    const double w = element_weight(e) * pairing.element_lengths[static_cast<std::size_t>(e)] / 6.0;
    M(el[0], el[0]) += 2.0 * w;
    M(el[1], el[1]) += 2.0 * w;
    M(el[0], el[1]) += w;
    M(el[1], el[0]) += w;
  }
  return M;
}

double adhesive_energy(const AdhesiveParams& p, const InterfacePairing& pairing, const VecX& zeta, const VecX& pi,
                       const VecX& jump_n, const VecX& jump_t, double feasibility_tol, AdhesiveEnergyParts* parts) {
  check_sizes(pairing, zeta, pi, jump_n, jump_t);
  if ((jump_n.array() < -feasibility_tol).any()) return kInfinity;
  if ((zeta.array() < 0.0).any() || (zeta.array() > 1.0).any()) return kInfinity;
  AdhesiveEnergyParts e;
  for (Index m = 0; m < pairing.num_elements(); ++m) {
    const auto& el = pairing.elements[static_cast<std::size_t>(m)];
    const double h = pairing.element_lengths[static_cast<std::size_t>(m)];
    const double n0 = jump_n(el[0]), n1 = jump_n(el[1]);
    const double s0 = jump_t(el[0]) - pi(el[0]), s1 = jump_t(el[1]) - pi(el[1]);
    e.normal += zeta(m) * 0.5 * p.kappa_n * linear_product(h, n0, n1, n0, n1);
    e.tangential += zeta(m) * 0.5 * p.kappa_t * linear_product(h, s0, s1, s0, s1);
    e.hardening += 0.5 * p.kappa_H * linear_product(h, pi(el[0]), pi(el[1]), pi(el[0]), pi(el[1]));
  }
  if (p.kappa_0 > 0.0)
    for (const auto& adj : element_adjacency(pairing)) {
      const double d = zeta(adj.a) - zeta(adj.b);
      e.gradient += 0.5 * p.kappa_0 * d * d / adj.distance;
    }
  if (parts) *parts = e;
  return e.total();
}

VecX element_energy_density(const AdhesiveParams& p, const InterfacePairing& pairing, const VecX& pi,
                            const VecX& jump_n, const VecX& jump_t) {
  VecX e(pairing.num_elements());
  for (Index m = 0; m < pairing.num_elements(); ++m) {
    const auto& el = pairing.elements[static_cast<std::size_t>(m)];
    const double h = pairing.element_lengths[static_cast<std::size_t>(m)];
    const double n0 = jump_n(el[0]), n1 = jump_n(el[1]);
    const double s0 = jump_t(el[0]) - pi(el[0]), s1 = jump_t(el[1]) - pi(el[1]);
    e(m) = (0.5 * p.kappa_n * linear_product(h, n0, n1, n0, n1) + 0.5 * p.kappa_t * linear_product(h, s0, s1, s0, s1)) / h;
  }
  return e;
}

double dissipation_increment(const AdhesiveParams& p, const InterfacePairing& pairing, const VecX& zeta_new,
                             const VecX& zeta_old, const VecX& pi_new, const VecX& pi_old, DissipationParts* parts) {
  if (zeta_new.size() != zeta_old.size() || zeta_new.size() != pairing.num_elements() ||
      pi_new.size() != pi_old.size() || pi_new.size() != pairing.num_entries())
    throw AdhesiveError("dissipation: states live on different interfaces");
  if (((zeta_new - zeta_old).array() > 0.0).any()) return kInfinity;
  DissipationParts d;
  for (Index m = 0; m < pairing.num_elements(); ++m)
    d.damage += p.G_Ic * (zeta_old(m) - zeta_new(m)) * pairing.element_lengths[static_cast<std::size_t>(m)];
  d.plastic = p.sigma_yield * pairing.lumped_weights().dot((pi_new - pi_old).cwiseAbs());
  if (parts) *parts = d;
  return d.total();
}

}  // namespace delam
