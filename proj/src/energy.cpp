#include "delam/energy.hpp"

namespace delam {

double bulk_energy_boundary(const DomainMesh& mesh, const TractionLayout& layout, const VecX& u, const VecX& p) {
  if (u.size() != 2 * mesh.num_nodes() || p.size() != 2 * layout.size())
    throw BemError("bulk energy: boundary fields do not match the mesh");
  double w = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    const auto& d = layout.dof[static_cast<std::size_t>(e)];
    const Vec2 u0 = u.segment<2>(2 * el[0]), u1 = u.segment<2>(2 * el[1]);
    const Vec2 p0 = p.segment<2>(2 * d[0]), p1 = p.segment<2>(2 * d[1]);
    w += mesh.element_length(e) / 6.0 * (2.0 * u0.dot(p0) + u0.dot(p1) + u1.dot(p0) + 2.0 * u1.dot(p1));
  }
  return 0.5 * w;
}

double condensed_bulk_energy(const CondensedOperator& op, const VecX& u_C, const LoadSnapshot& load) {
  return 0.5 * u_C.dot(op.K_C * u_C) + contact_linear_term(op, load.u_D, load.p_N).dot(u_C) +
         contact_constant_term(op, load.u_D, load.p_N);
}

double total_potential_energy(const std::vector<const CondensedOperator*>& ops, const std::vector<VecX>& u_C,
                              const std::vector<LoadSnapshot>& loads, double adhesive) {
  if (ops.size() != u_C.size() || ops.size() != loads.size())
    throw BemError("total energy: one contact displacement and load per domain");
  double e = adhesive;
  for (std::size_t d = 0; d < ops.size(); ++d) e += condensed_bulk_energy(*ops[d], u_C[d], loads[d]);
  return e;
}

double power_integral(const CondensedOperator& op, const LoadSnapshot& previous, const LoadSnapshot& current,
                      const VecX& u_C) {
  const VecX& uk = current.u_D;
  const VecX& uk1 = previous.u_D;
  if (previous.homogeneous_neumann() && current.homogeneous_neumann()) {
    double s = u_C.dot(op.W_C * (op.CD * uk - op.CD * uk1));
    if (uk.size() > 0) s += 0.5 * (uk - uk1).dot(op.W_D * (op.DD * uk + op.DD * uk1));
    return s;
  }
  const VecX& pk = current.p_N;
  const VecX& pk1 = previous.p_N;
  double s = u_C.dot(op.W_C * (op.CD * uk + op.CN * pk)) - u_C.dot(op.W_C * (op.CD * uk1 + op.CN * pk1));
  if (uk.size() > 0) {
    s += 0.5 * uk.dot(op.W_D * (op.DD * uk)) - 0.5 * uk1.dot(op.W_D * (op.DD * uk1));
    s += 0.5 * uk.dot(op.W_D * (op.DN * pk)) - 0.5 * uk1.dot(op.W_D * (op.DN * pk1));
  }
  if (pk.size() > 0) {
    s -= 0.5 * pk.dot(op.W_N.transpose() * (op.ND * uk)) - 0.5 * pk1.dot(op.W_N.transpose() * (op.ND * uk1));
    s -= 0.5 * pk.dot(op.W_N.transpose() * (op.NN * pk)) - 0.5 * pk1.dot(op.W_N.transpose() * (op.NN * pk1));
  }
  return s;
}

bool two_sided_holds(const EnergyBreakdown& e, double tol) {
  return e.lower - tol <= e.increment && e.increment <= e.upper + tol;
}

}  // namespace delam
