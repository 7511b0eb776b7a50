#include "delam/bem.hpp"
#include "delam/scenarios.hpp"

#include <doctest.h>

#include <random>

using namespace delam;

namespace {

const Material<double> kMat{70000.0, 0.35};

DomainMesh unit_square(Index n, BoundaryTag tag) {
  RectangleSpec s;
  for (auto& sd : s.sides) sd = {n, tag};
  return build_rectangle(s);
}

// Affine field u = (αx, −ναx/(1−ν)) and its plane-strain stresses.
struct Affine {
  double alpha = 1e-3, E = 70000.0, nu = 0.35;
  Vec2 u(const Vec2& x) const { return {alpha * x.x(), -nu * alpha * x.x() / (1.0 - nu)}; }
  Mat2 stress() const {
    const double lam = E * nu / ((1 + nu) * (1 - 2 * nu)), mu = E / (2 * (1 + nu));
    const double exx = alpha, eyy = 0.0, exy = 0.5 * (-nu * alpha / (1.0 - nu));
    Mat2 s;
    s << lam * (exx + eyy) + 2 * mu * exx, 2 * mu * exy, 2 * mu * exy, lam * (exx + eyy) + 2 * mu * eyy;
    return s;
  }
};

double patch_error(Index n) {
  const DomainMesh m = unit_square(n, BoundaryTag::Dirichlet);
  const CollocationSystem sys = assemble(m, kMat);
  const Affine a;
  VecX u(2 * m.num_nodes());
  for (Index i = 0; i < m.num_nodes(); ++i) u.segment<2>(2 * i) = a.u(m.nodes[static_cast<std::size_t>(i)]);
  const BoundarySolution sol = solve_mixed(sys, m, u, VecX::Zero(2 * sys.traction.size()));
  const Mat2 s = a.stress();
  double err = 0.0;
  for (Index e = 0; e < m.num_elements(); ++e)
    for (int k = 0; k < 2; ++k) {
      const Index d = sys.traction.dof[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)];
      err = std::max(err, (sol.p.segment<2>(2 * d) - s * m.outward_normal(e)).norm() / s(0, 0));
    }
  return err;
}

VecX random_vector(Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  VecX v(n);
  for (Index i = 0; i < n; ++i) v(i) = U(gen);
  return v;
}

}  // namespace

TEST_CASE("rigid motions are annihilated by H on every mesh") {
  std::vector<DomainMesh> meshes;
  for (Index n : {1, 4, 8, 16}) meshes.push_back(unit_square(n, BoundaryTag::Dirichlet));
  for (const char* name : {"nonmonotonic-a", "traction", "application"})
    meshes.push_back(scenario_mesh(builtin_scenario(name)));
  for (const auto& m : meshes) CHECK(rigid_body_residual(assemble(m, kMat), m) <= 1e-8);
}

TEST_CASE("affine patch test reproduces plane-strain Hooke's law") {
  const Affine a;
  CHECK(a.stress()(0, 0) == doctest::Approx(a.E * a.alpha * (1 - a.nu) / ((1 + a.nu) * (1 - 2 * a.nu))));
  CHECK(patch_error(8) < 0.01);
  CHECK(patch_error(16) < 0.01);
}

TEST_CASE("zero data gives the zero solution") {
  const DomainMesh m = scenario_mesh(builtin_scenario("nonmonotonic-a"));
  const CollocationSystem sys = assemble(m, kMat);
  const BoundarySolution sol = solve_mixed(sys, m, VecX::Zero(2 * m.num_nodes()), VecX::Zero(2 * sys.traction.size()));
  CHECK(sol.u.norm() == 0.0);
  CHECK(sol.p.norm() == 0.0);
  CHECK_THROWS_AS(solve_mixed(sys, m, VecX::Zero(3), VecX::Zero(2 * sys.traction.size())), BemError);
}

TEST_CASE("all-Neumann domain is rejected") {
  const DomainMesh m = unit_square(4, BoundaryTag::Neumann);
  const CollocationSystem sys = assemble(m, kMat);
  CHECK_THROWS_AS(solve_mixed(sys, m, VecX::Zero(2 * m.num_nodes()), VecX::Ones(2 * sys.traction.size())), BemError);
}

TEST_CASE("traction layout shares DOFs only along straight same-tag runs") {
  const DomainMesh m = unit_square(2, BoundaryTag::Dirichlet);
  const TractionLayout L = build_traction_layout(m);
  CHECK(L.size() == 12);  // 4 sides × (2 elements + 1) with corners split
  for (Index e = 0; e < m.num_elements(); ++e) CHECK(L.dof[static_cast<std::size_t>(e)][0] != L.dof[static_cast<std::size_t>(e)][1]);
  CHECK(L.dof[0][1] == L.dof[1][0]);  // mid-side node of the bottom
  CHECK(L.dof[1][1] != L.dof[2][0]);  // bottom-right corner
}

TEST_CASE("condensed operator: superposition, consistency and loads") {
  ScenarioConfig cfg = builtin_scenario("traction");
  cfg.neumann_shape[static_cast<std::size_t>(RectSide::Top)] = Vec2(3.0, -2.0);
  cfg.side_tags[static_cast<std::size_t>(RectSide::Right)] = BoundaryTag::Dirichlet;
  const Problem P = build_problem(cfg);
  const DomainMesh& m = P.domains[0].mesh;
  const CollocationSystem sys = assemble(m, kMat);
  const CondensedOperator op = condense(sys, m);
  const Partition& part = op.part;

  const VecX uC = random_vector(op.size_C(), 1), uD = random_vector(op.size_D(), 2), pN = random_vector(op.size_N(), 3);

  VecX nodal = VecX::Zero(2 * m.num_nodes()), dofp = VecX::Zero(2 * sys.traction.size());
  const auto put_nodes = [&](VecX& full, const std::vector<Index>& ids, const VecX& v) {
    for (std::size_t k = 0; k < ids.size(); ++k) full.segment<2>(2 * ids[k]) = v.segment<2>(2 * static_cast<Index>(k));
  };
  put_nodes(nodal, part.nodes_C, uC);
  put_nodes(nodal, part.nodes_D, uD);
  put_nodes(dofp, part.dofs_N, pN);
  const BoundarySolution sol = solve_mixed(sys, m, nodal, dofp);
  CHECK(sol.residual < 1e-10);

  SUBCASE("sum of the C, D and N sub-solutions") {
    const VecX zC = VecX::Zero(uC.size()), zD = VecX::Zero(uD.size()), zN = VecX::Zero(pN.size());
    const VecX y = op.Ru * op.known(uC, uD, pN);
    const VecX ysum = op.Ru * op.known(uC, zD, zN) + op.Ru * op.known(zC, uD, zN) + op.Ru * op.known(zC, zD, pN);
    CHECK((y - ysum).norm() <= 1e-10 * y.norm());
    CHECK((y - sol.u).norm() <= 1e-9 * y.norm());
    CHECK((op.Rp * op.known(uC, uD, pN) - sol.p).norm() <= 1e-9 * sol.p.norm());
  }
  SUBCASE("contact tractions from the blocks") {
    const VecX pC = op.CC * uC + op.CD * uD + op.CN * pN;
    const VecX ref = gather_dofs(sol.p, part.dofs_C);
    CHECK((pC - ref).norm() <= 1e-9 * ref.norm());
  }
  SUBCASE("load terms") {
    const VecX zD = VecX::Zero(uD.size()), zN = VecX::Zero(pN.size());
    CHECK(contact_linear_term(op, zD, zN).norm() == 0.0);
    CHECK(contact_constant_term(op, zD, zN) == 0.0);
    const VecX f1 = contact_linear_term(op, uD, zN);
    CHECK((contact_linear_term(op, VecX(0.37 * uD), zN) - 0.37 * f1).norm() <= 1e-14 * f1.norm());
    const ContactQuadratic q = contact_qp_data(op, uD, pN);
    CHECK((q.K - op.K_C).norm() == 0.0);
    CHECK((q.K - q.K.transpose()).norm() == 0.0);
  }
}

TEST_CASE("Betti residuals shrink under refinement") {
  double prev_cn = kInfinity, prev_cd = kInfinity;
  for (Index r : {2, 4, 8}) {
    ScenarioConfig cfg = builtin_scenario("nonmonotonic-a");
    cfg.side_counts = {30 * r, 2 * r, 30 * r, 2 * r};
    cfg.contact_count = 27 * r;
    const Problem P = build_problem(cfg);
    const DomainMesh& m = P.domains[0].mesh;
    const CondensedOperator op = condense(assemble(m, kMat), m);
    // linear opening profile on Γ_C, uniform pull on Γ_D, uniform pressure on Γ_N
    VecX uC(op.size_C()), uD(op.size_D()), pN(op.size_N());
    for (std::size_t k = 0; k < op.part.nodes_C.size(); ++k)
      uC.segment<2>(2 * static_cast<Index>(k)) = Vec2(0.0, m.nodes[static_cast<std::size_t>(op.part.nodes_C[k])].x() / 250.0);
    for (Index k = 0; k < uD.size() / 2; ++k) uD.segment<2>(2 * k) = Vec2(1.0, 0.6);
    for (Index k = 0; k < pN.size() / 2; ++k) pN.segment<2>(2 * k) = Vec2(0.0, -1.0);
    const double cn = std::abs(betti_residual_CN(op, uC, pN)) / std::abs(uC.dot(op.W_C * (op.CN * pN)));
    const double cd = std::abs(betti_residual_CD(op, uC, uD)) / std::abs(uC.dot(op.W_C * (op.CD * uD)));
    MESSAGE("refinement " << r << ": Betti CN " << cn << ", CD " << cd);
    CHECK(cn < 5e-3);
    CHECK(cd < 5e-3);
    CHECK(cn < prev_cn);
    CHECK(cd < prev_cd);
    prev_cn = cn;
    prev_cd = cd;
  }
}

TEST_CASE("condensation asymmetry shrinks across the application meshes") {
  double prev = kInfinity;
  for (Index level : {54, 108, 216}) {
    const DomainMesh m = scenario_mesh(builtin_scenario("application", level));
    const CondensedOperator op = condense(assemble(m, kMat), m);
    MESSAGE(level << " elements: asymmetry " << op.asymmetry);
    CHECK(op.asymmetry < prev);
    prev = op.asymmetry;
  }
}

TEST_CASE("global equilibrium of the boundary tractions") {
  // Collocation enforces equilibrium only up to the discretization error,
  // which is driven by the stress singularities at the ends of Γ_C.
  double prev = kInfinity;
  for (Index r : {1, 2, 4}) {
    ScenarioConfig cfg = builtin_scenario("nonmonotonic-a");
    cfg.side_counts = {30 * r, 2 * r, 30 * r, 2 * r};
    cfg.contact_count = 27 * r;
    const Problem P = build_problem(cfg);
    const DomainMesh& m = P.domains[0].mesh;
    const CollocationSystem sys = assemble(m, kMat);
    // bonded contact part held fixed, Γ_D pulled
    VecX nodal = VecX::Zero(2 * m.num_nodes());
    for (Index n : m.nodes_of(BoundaryTag::Dirichlet))
      nodal.segment<2>(2 * n) = P.domains[0].dirichlet[static_cast<std::size_t>(n)];
    const BoundarySolution sol = solve_mixed(sys, m, nodal, VecX::Zero(2 * sys.traction.size()));
    const Vec2 fD = resultant_force(m, sys.traction, sol.p, BoundaryTag::Dirichlet);
    const Vec2 fC = resultant_force(m, sys.traction, sol.p, BoundaryTag::Contact);
    const Vec2 fN = resultant_force(m, sys.traction, sol.p, BoundaryTag::Neumann);
    const Vec2 all = resultant_force(m, sys.traction, sol.p);
    const double rel = (fD + fC + fN).norm() / fD.norm();
    MESSAGE("refinement " << r << ": F_D " << fD.transpose() << ", imbalance " << rel);
    CHECK(fD.allFinite());
    CHECK(fN.norm() == 0.0);
    CHECK((all - (fD + fC + fN)).norm() <= 1e-12 * fD.norm());
    CHECK(rel < 1e-3);
    CHECK(rel < 0.6 * prev);
    prev = rel;
  }
  const DomainMesh sq = unit_square(2, BoundaryTag::Dirichlet);
  const TractionLayout L = build_traction_layout(sq);
  CHECK(resultant_force(sq, L, VecX::Zero(2 * L.size())).norm() == 0.0);
  CHECK_THROWS_AS(resultant_force(sq, L, VecX::Zero(2 * L.size()), BoundaryTag::Contact), BemError);
}
