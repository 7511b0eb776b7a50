#include "delam/adhesive.hpp"
#include "delam/scenarios.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace delam;

namespace {

// One interface element of length h on the rigid obstacle.
InterfacePairing single_element(double h) {
  InterfacePairing p;
  p.entries.resize(2);
  p.elements = {{0, 1}};
  p.element_lengths = {h};
  return p;
}

InterfacePairing pull_push_interface() {
  return build_problem(builtin_scenario("nonmonotonic-d")).pairing;
}

}  // namespace

TEST_CASE("critical stresses and the yield window") {
  const AdhesiveParams p;
  CHECK(p.sigma_n_crit() == 600.0);
  CHECK(p.sigma_t_crit() == 300.0);
  CHECK(p.yield_window_ok());
  CHECK(p.validate().empty());

  AdhesiveParams low = p;
  low.sigma_yield = 140.0;
  CHECK_FALSE(low.yield_window_ok());
  CHECK(low.validate().size() == 1);

  AdhesiveParams bad = p;
  bad.G_Ic = 0.0;
  CHECK_THROWS_AS(bad.validate(), AdhesiveError);
  bad = p;
  bad.kappa_H = -1.0;
  CHECK_THROWS_AS(bad.validate(), AdhesiveError);
}

TEST_CASE("layer stiffnesses of a thin isotropic adhesive") {
  const double E = 2000.0, nu = 1.0 / 3.0, h = 0.2;
  const double kn = layer_normal_stiffness(E, nu, h);
  CHECK(kn == doctest::Approx(E * (2.0 / 3.0) / (h * (4.0 / 3.0) * (1.0 / 3.0))));
  // shear modulus over thickness
  CHECK(layer_tangential_stiffness(kn, nu) == doctest::Approx(E / (2.0 * (1.0 + nu)) / h));
  CHECK(layer_tangential_stiffness(18000.0, nu) == doctest::Approx(4500.0));
}

TEST_CASE("damage activation") {
  const AdhesiveParams p;
  CHECK(damage_activation(p, 600.0 / 18000.0, 0.0, 0.0).value == doctest::Approx(p.G_Ic).epsilon(1e-14));
  CHECK(damage_activation(p, 0.0, 300.0 / 4500.0 + 0.01, 0.01).value == doctest::Approx(p.G_Ic).epsilon(1e-14));
  const auto zero = damage_activation(p, 0.0, 0.0, 0.0);
  CHECK(zero.value == 0.0);
  CHECK_FALSE(zero.triggered);
}

TEST_CASE("plastic activation") {
  const AdhesiveParams p;
  const auto at = plastic_activation(p, 1.0, 168.0 / 4500.0, 0.0);
  CHECK(at.value == doctest::Approx(p.sigma_yield).epsilon(1e-14));
  CHECK(168.0 / 4500.0 == doctest::Approx(0.03733).epsilon(1e-4));
  CHECK(plastic_activation(p, 0.0, 0.5, 0.0).value == 0.0);
  CHECK_FALSE(plastic_activation(p, 1.0, 0.03, 0.0).triggered);
}

TEST_CASE("energy release rate with slip") {
  const AdhesiveParams p;
  CHECK(err_with_plasticity(p, 0.02, 0.03, 0.0) == doctest::Approx(0.5 * 18000 * 0.0004 + 0.5 * 4500 * 0.0009));
  CHECK(err_with_plasticity(p, 0.02, 0.0, 0.0) == doctest::Approx(0.5 * 18000 * 0.0004));

  // slip from tangential equilibrium κ_t(⟦u⟧ₜ−π) = σ_yield + κ_H π, solved by bisection
  const double jt = 0.06;
  double a = 0.0, b = jt;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    (p.kappa_t * (jt - m) - p.sigma_yield - p.kappa_H * m > 0.0 ? a : b) = m;
  }
  const double pi = 0.5 * (a + b);
  CHECK(eliminated_slip(p, jt) == doctest::Approx(pi).epsilon(1e-12));
  const double G = 0.5 * p.kappa_t * (jt - pi) * (jt - pi) + p.sigma_yield * pi + 0.5 * p.kappa_H * pi * pi;
  CHECK(err_with_plasticity(p, 0.0, jt, eliminated_slip(p, jt)) == doctest::Approx(G).epsilon(1e-12));
}

TEST_CASE("fracture toughness curve") {
  const AdhesiveParams p;
  CHECK(gc_curve(p, 0.0).G_c == p.G_Ic);
  CHECK_FALSE(gc_curve(p, 0.0).plastic);

  const double phi_star = gc_transition_angle(p);
  CHECK(std::sin(phi_star) == doctest::Approx(168.0 / 300.0).epsilon(1e-14));
  const double plastic_at_star =
      p.G_Ic * (1.0 + p.kappa_t / p.kappa_H * std::pow(std::sin(phi_star), 2)) - p.sigma_yield * p.sigma_yield / (2.0 * p.kappa_H);
  CHECK(std::abs(plastic_at_star - p.G_Ic) < 1e-10);
  const GcPoint above = gc_curve(p, phi_star + 1e-12);
  CHECK(above.plastic);
  CHECK(std::abs(above.G_c - p.G_Ic) < 1e-10);
  CHECK(std::abs(above.jump_t - gc_curve(p, phi_star).jump_t) < 1e-10);

  const double top = 10.0 * (1.0 + 9.0) - 168.0 * 168.0 / 1000.0;
  CHECK(top == doctest::Approx(71.776).epsilon(1e-12));
  CHECK(gc_curve(p, 0.5 * std::numbers::pi).G_c == doctest::Approx(top).epsilon(1e-9));

  // on the plastic branch G_c is the release rate at onset with π eliminated
  for (double phi : {0.7, 1.0, 1.3, 0.5 * std::numbers::pi}) {
    const GcPoint g = gc_curve(p, phi);
    REQUIRE(g.plastic);
    CHECK(err_with_plasticity(p, g.jump_n, g.jump_t, eliminated_slip(p, g.jump_t)) ==
          doctest::Approx(g.G_c).epsilon(1e-12));
    CHECK(damage_activation(p, g.jump_n, g.jump_t, eliminated_slip(p, g.jump_t)).value ==
          doctest::Approx(p.G_Ic).epsilon(1e-12));
  }

  // non-decreasing in φ, pure-mode angles at the ends
  const auto sweep = gc_sweep(p);
  for (std::size_t i = 1; i < sweep.size(); ++i) CHECK(sweep[i].G_c >= sweep[i - 1].G_c - 1e-12);
  CHECK(sweep.front().mixity.psi_u == 0.0);
  CHECK(sweep.back().mixity.psi_u == doctest::Approx(0.5 * std::numbers::pi));

  CHECK_THROWS_AS(gc_curve(p, -0.1), AdhesiveError);
  CHECK_THROWS_AS(gc_curve(p, 2.0), AdhesiveError);
}

TEST_CASE("mode mixity of pure modes") {
  const AdhesiveParams p;
  const ModeMixity I = mode_mixity(p, 0.01, 0.0), II = mode_mixity(p, 0.0, 0.01);
  CHECK(I.psi_u == 0.0);
  CHECK(I.psi_G == 0.0);
  CHECK(II.psi_sigma == doctest::Approx(0.5 * std::numbers::pi));
  const ModeMixity mix = mode_mixity(p, 0.01, 0.01);
  CHECK(mix.psi_u == doctest::Approx(0.25 * std::numbers::pi));
  CHECK(std::tan(mix.psi_sigma) == doctest::Approx(0.25));
  CHECK(std::tan(mix.psi_G) == doctest::Approx(0.5));
}

TEST_CASE("adhesive energy") {
  const AdhesiveParams p;
  const InterfacePairing one = single_element(1.0);
  const VecX z1 = VecX::Ones(1), z0 = VecX::Zero(1), zero2 = VecX::Zero(2);

  CHECK(adhesive_energy(p, one, z1, zero2, zero2, zero2) == 0.0);

  const VecX open = VecX::Constant(2, 0.0333);
  AdhesiveEnergyParts parts;
  const double e = adhesive_energy(p, one, z1, zero2, open, zero2, 0.0, &parts);
  CHECK(e == doctest::Approx(0.5 * 18000.0 * 0.0333 * 0.0333).epsilon(1e-14));
  CHECK(e == doctest::Approx(p.G_Ic).epsilon(2e-3));
  CHECK(parts.normal == e);

  const VecX slip = VecX::Constant(2, 0.1);
  const VecX any = (VecX(2) << 0.3, 0.7).finished();
  CHECK(adhesive_energy(p, one, z0, slip, any, any) == doctest::Approx(0.5 * 500.0 * 0.01).epsilon(1e-14));

  // linear jump: ∫₀ʰ (a + (b−a)s/h)² ds = h(a² + ab + b²)/3
  const VecX lin = (VecX(2) << 0.01, 0.03).finished();
  const InterfacePairing two = single_element(2.0);
  CHECK(adhesive_energy(p, two, z1, zero2, lin, zero2) ==
        doctest::Approx(0.5 * 18000.0 * 2.0 * (1e-4 + 3e-4 + 9e-4) / 3.0).epsilon(1e-14));
  CHECK(element_energy_density(p, two, zero2, lin, zero2)(0) ==
        doctest::Approx(0.5 * 18000.0 * (1e-4 + 3e-4 + 9e-4) / 3.0).epsilon(1e-14));

  const VecX pen = (VecX(2) << -1e-3, 0.0).finished();
  CHECK(adhesive_energy(p, one, z1, zero2, pen, zero2) == kInfinity);
  CHECK(adhesive_energy(p, one, z1, zero2, pen, zero2, 1e-2) < kInfinity);
  CHECK(adhesive_energy(p, one, VecX::Constant(1, 1.1), zero2, zero2, zero2) == kInfinity);
  CHECK_THROWS_AS(adhesive_energy(p, one, z1, VecX::Zero(3), zero2, zero2), AdhesiveError);
}

TEST_CASE("gradient term couples neighbouring elements") {
  AdhesiveParams p;
  p.kappa_0 = 2.0;
  InterfacePairing two;
  two.entries.resize(3);
  two.elements = {{0, 1}, {1, 2}};
  two.element_lengths = {1.0, 3.0};
  const auto adj = element_adjacency(two);
  REQUIRE(adj.size() == 1);
  CHECK(adj[0].distance == 2.0);
  AdhesiveEnergyParts parts;
  const VecX z = (VecX(2) << 1.0, 0.5).finished(), zero3 = VecX::Zero(3);
  adhesive_energy(p, two, z, zero3, zero3, zero3, 0.0, &parts);
  CHECK(parts.gradient == doctest::Approx(0.5 * 2.0 * 0.25 / 2.0));
}

TEST_CASE("dissipation") {
  const AdhesiveParams p;
  const InterfacePairing strip = pull_push_interface();
  const VecX ones = VecX::Ones(strip.num_elements()), zeros = VecX::Zero(strip.num_elements());
  const VecX pi0 = VecX::Zero(strip.num_entries());
  CHECK(dissipation_increment(p, strip, ones, ones, pi0, pi0) == 0.0);
  CHECK(dissipation_increment(p, strip, zeros, ones, pi0, pi0) == doctest::Approx(2250.0).epsilon(1e-12));

  VecX heal = zeros;
  heal(3) = 0.1;
  CHECK(dissipation_increment(p, strip, heal, zeros, pi0, pi0) == kInfinity);

  DissipationParts parts;
  const VecX pi1 = VecX::Constant(strip.num_entries(), -0.01);
  dissipation_increment(p, strip, ones, ones, pi1, pi0, &parts);
  CHECK(parts.damage == 0.0);
  CHECK(parts.plastic == doctest::Approx(168.0 * 0.01 * 225.0).epsilon(1e-12));
}

TEST_CASE("interface mass and virgin state") {
  const InterfacePairing one = single_element(6.0);
  const MatX M = interface_mass(one, VecX::Ones(1));
  CHECK(M(0, 0) == 2.0);
  CHECK(M(0, 1) == 1.0);
  CHECK(M.sum() == doctest::Approx(6.0));
  const InterfaceState s = InterfaceState::virgin(one);
  CHECK(s.zeta.size() == 1);
  CHECK(s.zeta(0) == 1.0);
  CHECK(s.pi.size() == 2);
  CHECK(s.dissipated == 0.0);
}

TEST_CASE("single spring: bilinear shear law and brittle opening") {
  const AdhesiveParams p;
  std::vector<double> jt, zeros;
  for (int i = 0; i <= 800; ++i) jt.push_back(0.08 * i / 800.0);
  zeros.assign(jt.size(), 0.0);
  const auto shear = spring_response(p, zeros, jt, false, true);
  const double yield = p.sigma_yield / p.kappa_t;
  for (std::size_t i = 1; i < shear.size(); ++i) {
    const double slope = (shear[i].sigma_t - shear[i - 1].sigma_t) / (jt[i] - jt[i - 1]);
    if (jt[i] <= yield)
      CHECK(slope == doctest::Approx(p.kappa_t).epsilon(1e-6));
    else if (jt[i - 1] >= yield)
      CHECK(slope == doctest::Approx(p.kappa_t * p.kappa_H / (p.kappa_t + p.kappa_H)).epsilon(1e-6));
  }

  std::vector<double> jn;
  for (int i = 0; i <= 500; ++i) jn.push_back(0.05 * i / 500.0);
  const auto normal = spring_response(p, jn, std::vector<double>(jn.size(), 0.0), true, false);
  std::size_t drop = 0;
  while (drop < normal.size() && normal[drop].zeta > 0.0) ++drop;
  REQUIRE(drop < normal.size());
  CHECK(jn[drop - 1] <= 0.033334);
  CHECK(jn[drop] >= 0.033333);
  CHECK(normal[drop].sigma_n == 0.0);
  CHECK(normal[drop - 1].sigma_n == doctest::Approx(p.kappa_n * jn[drop - 1]));
}
