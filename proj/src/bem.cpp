#include "delam/bem.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace delam {

namespace {

bool collinear(const DomainMesh& mesh, Index e1, Index e2) {
  return mesh.tangent(e1).dot(mesh.tangent(e2)) > 1.0 - 1e-9;
}

bool u_known(const DomainMesh& mesh, Index node) {
  return mesh.touches(node, BoundaryTag::Contact) || mesh.touches(node, BoundaryTag::Dirichlet);
}

bool traction_unknown(BoundaryTag tag) { return tag != BoundaryTag::Neumann; }

// Distinct unknown traction DOFs meeting at `node`.
std::vector<Index> unknown_dofs_at(const DomainMesh& mesh, const TractionLayout& layout, Index node) {
  std::vector<Index> out;
  const Index eb = mesh.element_before(node), ea = mesh.element_after(node);
  const Index db = layout.dof[static_cast<std::size_t>(eb)][1];
  const Index da = layout.dof[static_cast<std::size_t>(ea)][0];
  if (traction_unknown(layout.tag[static_cast<std::size_t>(db)])) out.push_back(db);
  if (traction_unknown(layout.tag[static_cast<std::size_t>(da)]) && da != db) out.push_back(da);
  return out;
}

std::map<Index, Index> position_map(const std::vector<Index>& ids) {
  std::map<Index, Index> pos;
  for (std::size_t k = 0; k < ids.size(); ++k) pos[ids[k]] = static_cast<Index>(k);
  return pos;
}

void add_block(MatX& m, Index row, Index col, const Mat2& b) { m.block<2, 2>(row, col) += b; }

// Column layout of the mixed system A x = B y.
struct MixedMaps {
  std::vector<Index> x_u_node, x_p_dof;  // unknown columns
  Index nx = 0, ny = 0;
  std::vector<Index> node_col_y, node_col_x;  // per node, -1 if absent
  std::vector<Index> dof_col_y, dof_col_x;
};

MixedMaps mixed_maps(const DomainMesh& mesh, const Partition& part, const TractionLayout& layout) {
  MixedMaps m;
  const auto nn = static_cast<std::size_t>(mesh.num_nodes());
  const auto nd = static_cast<std::size_t>(layout.size());
  m.node_col_y.assign(nn, -1);
  m.node_col_x.assign(nn, -1);
  m.dof_col_y.assign(nd, -1);
  m.dof_col_x.assign(nd, -1);
  Index cx = 0, cy = 0;
  for (Index n : part.nodes_free) m.node_col_x[static_cast<std::size_t>(n)] = (cx += 2) - 2;
  for (Index d : part.dofs_C) m.dof_col_x[static_cast<std::size_t>(d)] = (cx += 2) - 2;
  for (Index d : part.dofs_D) m.dof_col_x[static_cast<std::size_t>(d)] = (cx += 2) - 2;
  for (Index n : part.nodes_C) m.node_col_y[static_cast<std::size_t>(n)] = (cy += 2) - 2;
  for (Index n : part.nodes_D)
    if (m.node_col_y[static_cast<std::size_t>(n)] < 0) m.node_col_y[static_cast<std::size_t>(n)] = (cy += 2) - 2;
  for (Index d : part.dofs_N) m.dof_col_y[static_cast<std::size_t>(d)] = (cy += 2) - 2;
  m.nx = cx;
  m.ny = cy;
  return m;
}

struct MixedSystem {
  MatX A, B;
  Eigen::VectorXd col_scale;
};

MixedSystem mixed_system(const CollocationSystem& sys, const MixedMaps& maps) {
  const Index rows = sys.H.rows();
  if (rows != maps.nx)
    throw BemError("collocation system has " + std::to_string(rows) + " equations for " +
                   std::to_string(maps.nx) + " unknowns");
  MixedSystem ms;
  ms.A = MatX::Zero(rows, maps.nx);
  ms.B = MatX::Zero(rows, maps.ny);
  for (std::size_t n = 0; n < maps.node_col_x.size(); ++n) {
    const Index c = static_cast<Index>(2 * n);
    if (maps.node_col_x[n] >= 0) ms.A.middleCols(maps.node_col_x[n], 2) += sys.H.middleCols(c, 2);
    if (maps.node_col_y[n] >= 0) ms.B.middleCols(maps.node_col_y[n], 2) -= sys.H.middleCols(c, 2);
  }
  for (std::size_t d = 0; d < maps.dof_col_x.size(); ++d) {
    const Index c = static_cast<Index>(2 * d);
    if (maps.dof_col_x[d] >= 0) ms.A.middleCols(maps.dof_col_x[d], 2) -= sys.G.middleCols(c, 2);
    if (maps.dof_col_y[d] >= 0) ms.B.middleCols(maps.dof_col_y[d], 2) += sys.G.middleCols(c, 2);
  }
  ms.col_scale = VecX::Ones(maps.nx);
  for (Index j = 0; j < maps.nx; ++j) {
    const double m = ms.A.col(j).cwiseAbs().maxCoeff();
    if (m > 0.0) ms.col_scale(j) = 1.0 / m;
  }
  ms.A = ms.A * ms.col_scale.asDiagonal();
  return ms;
}

Eigen::PartialPivLU<MatX> factorize(const MatX& A) {
  Eigen::PartialPivLU<MatX> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 1e-13))
    throw BemError("singular collocation system (rcond " + std::to_string(rc) +
                   "); an all-Neumann domain leaves rigid motions undetermined");
  return lu;
}

}  // namespace

TractionLayout build_traction_layout(const DomainMesh& mesh) {
  const Index ne = mesh.num_elements();
  // candidate DOF 2e + end, merged by union-find
  std::vector<Index> parent(static_cast<std::size_t>(2 * ne));
  std::iota(parent.begin(), parent.end(), Index{0});
  const auto find = [&](Index a) {
    while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)];
    return a;
  };
  for (Index e = 0; e < ne; ++e) {
    const Index node = mesh.elements[static_cast<std::size_t>(e)][0];
    const Index prev = mesh.element_before(node);
    if (mesh.tags[static_cast<std::size_t>(prev)] == mesh.tags[static_cast<std::size_t>(e)] &&
        collinear(mesh, prev, e)) {
      const Index a = find(2 * e), b = find(2 * prev + 1);
      parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  }
  TractionLayout layout;
  layout.dof.resize(static_cast<std::size_t>(ne));
  std::map<Index, Index> number;
  for (Index e = 0; e < ne; ++e) {
    for (int end = 0; end < 2; ++end) {
      const Index root = find(2 * e + end);
      auto it = number.find(root);
      if (it == number.end()) {
        it = number.emplace(root, layout.size()).first;
        layout.tag.push_back(mesh.tags[static_cast<std::size_t>(e)]);
        layout.node.push_back(mesh.elements[static_cast<std::size_t>(e)][static_cast<std::size_t>(end)]);
      }
      layout.dof[static_cast<std::size_t>(e)][static_cast<std::size_t>(end)] = it->second;
    }
  }
  return layout;
}

Partition Partition::of(const DomainMesh& mesh, const TractionLayout& layout) {
  Partition p;
  for (Index n = 0; n < mesh.num_nodes(); ++n) {
    const bool c = mesh.touches(n, BoundaryTag::Contact);
    const bool d = mesh.touches(n, BoundaryTag::Dirichlet);
    if (c) p.nodes_C.push_back(n);
    if (d) p.nodes_D.push_back(n);
    if (mesh.touches(n, BoundaryTag::Neumann)) p.nodes_N.push_back(n);
    if (!c && !d) p.nodes_free.push_back(n);
  }
  for (Index k = 0; k < layout.size(); ++k) {
    switch (layout.tag[static_cast<std::size_t>(k)]) {
      case BoundaryTag::Contact: p.dofs_C.push_back(k); break;
      case BoundaryTag::Dirichlet: p.dofs_D.push_back(k); break;
      case BoundaryTag::Neumann: p.dofs_N.push_back(k); break;
    }
  }
  return p;
}

Index Partition::known_size() const {
  return 2 * static_cast<Index>(nodes_C.size() + nodes_D.size() + dofs_N.size());
}

CollocationSystem assemble(const DomainMesh& mesh, const Material<double>& material,
                           const AssemblyOptions& options) {
  material.validate();
  CollocationSystem sys;
  sys.traction = build_traction_layout(mesh);

  for (Index n = 0; n < mesh.num_nodes(); ++n) {
    const std::size_t count = u_known(mesh, n) ? unknown_dofs_at(mesh, sys.traction, n).size() : 1;
    if (count == 1) {
      sys.points.push_back({n, -1, 0.0, mesh.nodes[static_cast<std::size_t>(n)]});
    } else {
      const Index eb = mesh.element_before(n), ea = mesh.element_after(n);
      const auto at = [&](Index e, double s) {
        const auto& el = mesh.elements[static_cast<std::size_t>(e)];
        return Vec2((1.0 - s) * mesh.nodes[static_cast<std::size_t>(el[0])] +
                    s * mesh.nodes[static_cast<std::size_t>(el[1])]);
      };
      const double off = options.corner_offset;
      sys.points.push_back({n, eb, 1.0 - off, at(eb, 1.0 - off)});
      sys.points.push_back({n, ea, off, at(ea, off)});
    }
  }

  const Index rows = 2 * static_cast<Index>(sys.points.size());
  sys.H = MatX::Zero(rows, 2 * mesh.num_nodes());
  sys.G = MatX::Zero(rows, 2 * sys.traction.size());

  for (std::size_t i = 0; i < sys.points.size(); ++i) {
    const CollocationPoint& pt = sys.points[i];
    const Index r = 2 * static_cast<Index>(i);
    for (Index e = 0; e < mesh.num_elements(); ++e) {
      const auto& el = mesh.elements[static_cast<std::size_t>(e)];
      const auto blocks = element_integrals<double>(material, mesh.nodes[static_cast<std::size_t>(el[0])],
                                                    mesh.nodes[static_cast<std::size_t>(el[1])], pt.x,
                                                    options.quadrature);
      for (int a = 0; a < 2; ++a) {
        if (a != blocks.singular_node) add_block(sys.H, r, 2 * el[static_cast<std::size_t>(a)], blocks.T[a]);
        add_block(sys.G, r, 2 * sys.traction.dof[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)],
                  blocks.U[a]);
      }
    }
    if (pt.element >= 0) {
      const auto& el = mesh.elements[static_cast<std::size_t>(pt.element)];
      add_block(sys.H, r, 2 * el[0], 0.5 * (1.0 - pt.param) * Mat2::Identity());
      add_block(sys.H, r, 2 * el[1], 0.5 * pt.param * Mat2::Identity());
    }
    // rigid-body closure of the block at the point's node
    const Index c = 2 * pt.node;
    sys.H.block<2, 2>(r, c).setZero();
    Mat2 sum = Mat2::Zero();
    for (Index n = 0; n < mesh.num_nodes(); ++n) sum += sys.H.block<2, 2>(r, 2 * n);
    sys.H.block<2, 2>(r, c) = -sum;
  }
  return sys;
}

double rigid_body_residual(const CollocationSystem& system, const DomainMesh& mesh) {
  const Index nn = mesh.num_nodes();
  const Vec2 centre = std::accumulate(mesh.nodes.begin(), mesh.nodes.end(), Vec2(Vec2::Zero())) /
                      static_cast<double>(nn);
  const double Hn = system.H.norm();
  double worst = 0.0;
  for (int mode = 0; mode < 3; ++mode) {
    VecX u(2 * nn);
    for (Index n = 0; n < nn; ++n) {
      const Vec2 x = mesh.nodes[static_cast<std::size_t>(n)] - centre;
      const Vec2 v = mode == 0 ? Vec2(1, 0) : mode == 1 ? Vec2(0, 1) : Vec2(-x.y(), x.x());
      u.segment<2>(2 * n) = v;
    }
    worst = std::max(worst, (system.H * u).norm() / (Hn * u.norm()));
  }
  return worst;
}

BoundarySolution solve_mixed(const CollocationSystem& system, const DomainMesh& mesh, const VecX& nodal_u,
                             const VecX& dof_p) {
  const Partition part = Partition::of(mesh, system.traction);
  const MixedMaps maps = mixed_maps(mesh, part, system.traction);
  if (nodal_u.size() != 2 * mesh.num_nodes() || dof_p.size() != 2 * system.traction.size())
    throw BemError("solve_mixed: boundary data sizes do not match the mesh");
  const MixedSystem ms = mixed_system(system, maps);

  VecX y = VecX::Zero(maps.ny);
  for (std::size_t n = 0; n < maps.node_col_y.size(); ++n)
    if (maps.node_col_y[n] >= 0) y.segment<2>(maps.node_col_y[n]) = nodal_u.segment<2>(static_cast<Index>(2 * n));
  for (std::size_t d = 0; d < maps.dof_col_y.size(); ++d)
    if (maps.dof_col_y[d] >= 0) y.segment<2>(maps.dof_col_y[d]) = dof_p.segment<2>(static_cast<Index>(2 * d));

  const auto lu = factorize(ms.A);
  const VecX x = ms.col_scale.asDiagonal() * lu.solve(ms.B * y);

  BoundarySolution sol;
  sol.u = VecX::Zero(2 * mesh.num_nodes());
  sol.p = VecX::Zero(2 * system.traction.size());
  for (std::size_t n = 0; n < maps.node_col_y.size(); ++n) {
    const Index r = static_cast<Index>(2 * n);
    if (maps.node_col_y[n] >= 0) sol.u.segment<2>(r) = y.segment<2>(maps.node_col_y[n]);
    if (maps.node_col_x[n] >= 0) sol.u.segment<2>(r) = x.segment<2>(maps.node_col_x[n]);
  }
  for (std::size_t d = 0; d < maps.dof_col_y.size(); ++d) {
    const Index r = static_cast<Index>(2 * d);
    if (maps.dof_col_y[d] >= 0) sol.p.segment<2>(r) = y.segment<2>(maps.dof_col_y[d]);
    if (maps.dof_col_x[d] >= 0) sol.p.segment<2>(r) = x.segment<2>(maps.dof_col_x[d]);
  }
  const VecX Hu = system.H * sol.u, Gp = system.G * sol.p;
  const double scale = Hu.norm() + Gp.norm();
  sol.residual = scale > 0.0 ? (Hu - Gp).norm() / scale : 0.0;
  return sol;
}

MatX boundary_mass(const DomainMesh& mesh, const TractionLayout& layout, BoundaryTag tag,
                   const std::vector<Index>& nodes, const std::vector<Index>& dofs) {
  const auto npos = position_map(nodes);
  const auto dpos = position_map(dofs);
  MatX W = MatX::Zero(2 * static_cast<Index>(nodes.size()), 2 * static_cast<Index>(dofs.size()));
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    if (mesh.tags[static_cast<std::size_t>(e)] != tag) continue;
    const double h = mesh.element_length(e);
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const Index r = 2 * npos.at(el[static_cast<std::size_t>(a)]);
        const Index c = 2 * dpos.at(layout.dof[static_cast<std::size_t>(e)][static_cast<std::size_t>(b)]);
        W.block<2, 2>(r, c) += (a == b ? h / 3.0 : h / 6.0) * Mat2::Identity();
      }
  }
  return W;
}

CondensedOperator condense(const CollocationSystem& system, const DomainMesh& mesh) {
  CondensedOperator op;
  op.part = Partition::of(mesh, system.traction);
  const Partition& part = op.part;
  if (part.nodes_C.empty()) throw BemError("condense: the domain has no contact part");
  const MixedMaps maps = mixed_maps(mesh, part, system.traction);
  const MixedSystem ms = mixed_system(system, maps);
  const auto lu = factorize(ms.A);
  const MatX M = ms.col_scale.asDiagonal() * lu.solve(ms.B);

  const Index nn = mesh.num_nodes(), nd = system.traction.size();
  op.Ru = MatX::Zero(2 * nn, maps.ny);
  op.Rp = MatX::Zero(2 * nd, maps.ny);
  for (Index n = 0; n < nn; ++n) {
    const auto k = static_cast<std::size_t>(n);
    if (maps.node_col_y[k] >= 0) op.Ru.block<2, 2>(2 * n, maps.node_col_y[k]).setIdentity();
    if (maps.node_col_x[k] >= 0) op.Ru.middleRows(2 * n, 2) = M.middleRows(maps.node_col_x[k], 2);
  }
  for (Index d = 0; d < nd; ++d) {
    const auto k = static_cast<std::size_t>(d);
    if (maps.dof_col_y[k] >= 0) op.Rp.block<2, 2>(2 * d, maps.dof_col_y[k]).setIdentity();
    if (maps.dof_col_x[k] >= 0) op.Rp.middleRows(2 * d, 2) = M.middleRows(maps.dof_col_x[k], 2);
  }

  const auto rows_of = [](const MatX& R, const std::vector<Index>& ids) {
    MatX out(2 * static_cast<Index>(ids.size()), R.cols());
    for (std::size_t k = 0; k < ids.size(); ++k) out.middleRows(2 * static_cast<Index>(k), 2) = R.middleRows(2 * ids[k], 2);
    return out;
  };
  const MatX pC = rows_of(op.Rp, part.dofs_C), pD = rows_of(op.Rp, part.dofs_D), uN = rows_of(op.Ru, part.nodes_N);
  const Index nC = 2 * static_cast<Index>(part.nodes_C.size());
  const Index nD = 2 * static_cast<Index>(part.nodes_D.size());
  const Index nNp = 2 * static_cast<Index>(part.dofs_N.size());
  op.CC = pC.leftCols(nC);
  op.CD = pC.middleCols(nC, nD);
  op.CN = pC.rightCols(nNp);
  op.DC = pD.leftCols(nC);
  op.DD = pD.middleCols(nC, nD);
  op.DN = pD.rightCols(nNp);
  op.NC = uN.leftCols(nC);
  op.ND = uN.middleCols(nC, nD);
  op.NN = uN.rightCols(nNp);

  op.W_C = boundary_mass(mesh, system.traction, BoundaryTag::Contact, part.nodes_C, part.dofs_C);
  op.W_D = boundary_mass(mesh, system.traction, BoundaryTag::Dirichlet, part.nodes_D, part.dofs_D);
  op.W_N = boundary_mass(mesh, system.traction, BoundaryTag::Neumann, part.nodes_N, part.dofs_N);

  const MatX WM = op.W_C * op.CC;
  op.K_C = 0.5 * (WM + WM.transpose());
  op.asymmetry = (WM - WM.transpose()).norm() / WM.norm();
  op.free_rigid_modes = part.nodes_D.empty();
  return op;
}

VecX CondensedOperator::known(const VecX& u_C, const VecX& u_D, const VecX& p_N) const {
  VecX y(u_C.size() + u_D.size() + p_N.size());
  y << u_C, u_D, p_N;
  return y;
}

VecX contact_linear_term(const CondensedOperator& op, const VecX& u_D, const VecX& p_N) {
  return op.W_C * (op.CD * u_D + op.CN * p_N);
}

double contact_constant_term(const CondensedOperator& op, const VecX& u_D, const VecX& p_N) {
  double c = 0.0;
  if (u_D.size() > 0) c += 0.5 * u_D.dot(op.W_D * (op.DD * u_D)) + 0.5 * u_D.dot(op.W_D * (op.DN * p_N));
  if (p_N.size() > 0) c -= 0.5 * (op.ND * u_D).dot(op.W_N * p_N) + 0.5 * (op.NN * p_N).dot(op.W_N * p_N);
  return c;
}

ContactQuadratic contact_qp_data(const CondensedOperator& op, const VecX& u_D, const VecX& p_N) {
  return {op.K_C, contact_linear_term(op, u_D, p_N), contact_constant_term(op, u_D, p_N)};
}

double betti_residual_CN(const CondensedOperator& op, const VecX& u_C, const VecX& p_N) {
  return (op.NC * u_C).dot(op.W_N * p_N) + u_C.dot(op.W_C * (op.CN * p_N));
}

double betti_residual_CD(const CondensedOperator& op, const VecX& u_C, const VecX& u_D) {
  return u_D.dot(op.W_D * (op.DC * u_C)) - u_C.dot(op.W_C * (op.CD * u_D));
}

Vec2 resultant_force(const DomainMesh& mesh, const TractionLayout& layout, const VecX& p,
                     std::optional<BoundaryTag> tag) {
  Vec2 f = Vec2::Zero();
  bool any = false;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    if (tag && mesh.tags[static_cast<std::size_t>(e)] != *tag) continue;
    any = true;
    const auto& d = layout.dof[static_cast<std::size_t>(e)];
    f += 0.5 * mesh.element_length(e) * (p.segment<2>(2 * d[0]) + p.segment<2>(2 * d[1]));
  }
  if (!any) throw BemError("resultant_force: the requested part is empty");
  return f;
}

VecX gather_nodes(const VecX& full, const std::vector<Index>& nodes) {
  VecX out(2 * static_cast<Index>(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); ++k) out.segment<2>(2 * static_cast<Index>(k)) = full.segment<2>(2 * nodes[k]);
  return out;
}

VecX gather_dofs(const VecX& full, const std::vector<Index>& dofs) { return gather_nodes(full, dofs); }

}  // namespace delam
