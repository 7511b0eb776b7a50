#pragma once

#include "delam/kernels.hpp"
#include "delam/mesh.hpp"

#include <vector>

namespace delam {

class BemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Traction unknowns are attached to element ends. Two ends at a node share a
/// DOF when both elements carry the same tag and are collinear; elsewhere the
/// traction may jump.
struct TractionLayout {
  std::vector<std::array<Index, 2>> dof;  // per element: DOF at node 0 and node 1
  std::vector<BoundaryTag> tag;           // per DOF
  std::vector<Index> node;                // per DOF
  Index size() const { return static_cast<Index>(tag.size()); }
};

TractionLayout build_traction_layout(const DomainMesh& mesh);

/// Where the boundary integral identity is imposed. Regular points sit on a
/// node; at a corner carrying two unknown tractions the node is replaced by
/// one point inside each adjacent element.
struct CollocationPoint {
  Index node = 0;
  Index element = -1;  // -1 for a node point
  double param = 0.0;  // position on `element` as a fraction from its first node
  Vec2 x = Vec2::Zero();
};

struct CollocationSystem {
  MatX H;  // rows: 2 per point, cols: 2 per node
  MatX G;  // cols: 2 per traction DOF
  std::vector<CollocationPoint> points;
  TractionLayout traction;
};

struct AssemblyOptions {
  QuadratureOptions quadrature;
  double corner_offset = 0.25;
};

/// Known/unknown split of the boundary data of one domain. Node lists are
/// ascending; traction DOF lists follow the layout numbering.
struct Partition {
  std::vector<Index> nodes_C, nodes_D, nodes_N, nodes_free;
  std::vector<Index> dofs_C, dofs_D, dofs_N;
  static Partition of(const DomainMesh& mesh, const TractionLayout& layout);
  /// Size of the known data vector [u_C, u_D, p_N].
  Index known_size() const;
};

CollocationSystem assemble(const DomainMesh& mesh, const Material<double>& material,
                           const AssemblyOptions& options = {});

/// ‖H u‖ / (‖H‖ ‖u‖) for the two translations and the linearized rotation; max.
double rigid_body_residual(const CollocationSystem& system, const DomainMesh& mesh);

struct BoundarySolution {
  VecX u;  // 2 per node
  VecX p;  // 2 per traction DOF
  double residual = 0.0;  // ‖H u − G p‖ / (‖H u‖ + ‖G p‖)
};

/// Nodal displacement data of Contact and Dirichlet nodes (2 per node, read
/// only at those nodes) and Neumann tractions (2 per traction DOF, read only
/// at Neumann DOFs).
BoundarySolution solve_mixed(const CollocationSystem& system, const DomainMesh& mesh, const VecX& nodal_u,
                             const VecX& dof_p);

/// Boundary map (u_C, u_D, p_N) -> (p_C, p_D, u_N) of one domain plus the
/// boundary mass matrices: ∫_Γη u·p dS = u_ηᵀ W_η p_η.
struct CondensedOperator {
  Partition part;
  MatX CC, CD, CN, DC, DD, DN, NC, ND, NN;
  MatX W_C, W_D, W_N;
  /// Full traces from known data: u = Ru y, p = Rp y with y = [u_C, u_D, p_N].
  MatX Ru, Rp;
  /// Symmetrized W_C M_CC and its relative asymmetry.
  MatX K_C;
  double asymmetry = 0.0;
  /// No Dirichlet part: K_C then has a rigid-motion kernel.
  bool free_rigid_modes = false;

  Index size_C() const { return CC.cols(); }
  Index size_D() const { return CD.cols(); }
  Index size_N() const { return CN.cols(); }
  VecX known(const VecX& u_C, const VecX& u_D, const VecX& p_N) const;
};

CondensedOperator condense(const CollocationSystem& system, const DomainMesh& mesh);

/// Mass matrix ∫ u·p dS over the elements of `tag`, rows over `nodes` (2 each),
/// columns over `dofs` (2 each).
MatX boundary_mass(const DomainMesh& mesh, const TractionLayout& layout, BoundaryTag tag,
                   const std::vector<Index>& nodes, const std::vector<Index>& dofs);

/// Condensed bulk energy pieces: Π(u_C) = ½ u_Cᵀ K_C u_C + f_Cᵀ u_C + c.
struct ContactQuadratic {
  MatX K;
  VecX f;
  double c = 0.0;
};

ContactQuadratic contact_qp_data(const CondensedOperator& op, const VecX& u_D, const VecX& p_N);
/// f_C alone: W_C (M_CD u_D + M_CN p_N).
VecX contact_linear_term(const CondensedOperator& op, const VecX& u_D, const VecX& p_N);
/// c alone: the u_D / p_N-only integrals of the condensed energy.
double contact_constant_term(const CondensedOperator& op, const VecX& u_D, const VecX& p_N);

/// ∫ p_N M_NC u_C + ∫ u_C M_CN p_N (vanishes when the reciprocity holds with a minus sign).
double betti_residual_CN(const CondensedOperator& op, const VecX& u_C, const VecX& p_N);
/// ∫ u_D M_DC u_C − ∫ u_C M_CD u_D.
double betti_residual_CD(const CondensedOperator& op, const VecX& u_C, const VecX& u_D);

/// Integral of the tractions over the elements of `tag` (all elements when
/// `tag` is empty). N/mm per unit thickness.
Vec2 resultant_force(const DomainMesh& mesh, const TractionLayout& layout, const VecX& p,
                     std::optional<BoundaryTag> tag = std::nullopt);

/// Stacks nodal values of a node subset (2 per node) out of a full nodal vector.
VecX gather_nodes(const VecX& full, const std::vector<Index>& nodes);
VecX gather_dofs(const VecX& full, const std::vector<Index>& dofs);

}  // namespace delam
