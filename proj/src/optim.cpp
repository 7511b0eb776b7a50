#include "delam/optim.hpp"

namespace delam {

BoxQP<double> kinematic_qp(const KinematicInput& in, KinematicLayout& layout) {
  if (!in.pairing || !in.params || !in.bulk_K || !in.bulk_f) throw QpError("kinematic substep: missing input");
  const InterfacePairing& pairing = *in.pairing;
  const AdhesiveParams& p = *in.params;
  const Index m = pairing.num_entries();
  layout.entries = m;
  layout.two_domain = pairing.kind == PairingKind::TwoDomain;
  layout.slip = in.slip;
  const Index nk = layout.kinematic_size();
  if (in.bulk_K->rows() != nk || in.bulk_f->size() != nk)
    throw QpError("kinematic substep: bulk energy does not match the variable layout");
  if (in.zeta.size() != pairing.num_elements() || in.pi_anchor.size() != m)
    throw QpError("kinematic substep: interface state does not match the pairing");

  const MatX Sn = interface_mass(pairing, p.kappa_n * in.zeta);
  const MatX St = interface_mass(pairing, p.kappa_t * in.zeta);
  const MatX SH = interface_mass(pairing, VecX::Constant(pairing.num_elements(), p.kappa_H));
  const VecX w = pairing.lumped_weights();

  const Index n = layout.size();
  BoxQP<double> qp;
  qp.Q = MatX::Zero(n, n);
  qp.b = VecX::Zero(n);
  qp.lower = VecX::Constant(n, -kInfinity);
  qp.upper = VecX::Constant(n, kInfinity);
  qp.Q.topLeftCorner(nk, nk) = *in.bulk_K;
  qp.b.head(nk) = *in.bulk_f;

  const VecX St_pi = St * in.pi_anchor;
  const VecX StH_pi = (St + SH) * in.pi_anchor;
  for (Index i = 0; i < m; ++i) {
    qp.lower(layout.jump(i)) = 0.0;
    qp.b(layout.jump(i) + 1) -= St_pi(i);
    for (Index j = 0; j < m; ++j) {
      qp.Q(layout.jump(i), layout.jump(j)) += Sn(i, j);
      qp.Q(layout.jump(i) + 1, layout.jump(j) + 1) += St(i, j);
    }
  }
  if (in.slip) {
    for (Index i = 0; i < m; ++i) {
      qp.lower(layout.plus(i)) = 0.0;
      qp.lower(layout.minus(i)) = 0.0;
      qp.b(layout.plus(i)) = StH_pi(i) + p.sigma_yield * w(i);
      qp.b(layout.minus(i)) = -StH_pi(i) + p.sigma_yield * w(i);
      for (Index j = 0; j < m; ++j) {
        const double a = St(i, j) + SH(i, j);
        qp.Q(layout.plus(i), layout.plus(j)) = a;
        qp.Q(layout.minus(i), layout.minus(j)) = a;
        qp.Q(layout.plus(i), layout.minus(j)) = -a;
        qp.Q(layout.minus(i), layout.plus(j)) = -a;
        qp.Q(layout.jump(i) + 1, layout.plus(j)) = -St(i, j);
        qp.Q(layout.plus(j), layout.jump(i) + 1) = -St(i, j);
        qp.Q(layout.jump(i) + 1, layout.minus(j)) = St(i, j);
        qp.Q(layout.minus(j), layout.jump(i) + 1) = St(i, j);
      }
    }
  }
  return qp;
}

KinematicResult kinematic_substep(const KinematicInput& in) {
  KinematicLayout layout;
  const BoxQP<double> qp = kinematic_qp(in, layout);
  const Index m = layout.entries;
  const Index nk = layout.kinematic_size();

  VecX x0 = VecX::Zero(layout.size());
  if (in.start.size() == nk) x0.head(nk) = in.start;
  if (in.slip && in.pi_start.size() == m) {
    const VecX d = in.pi_start - in.pi_anchor;
    for (Index i = 0; i < m; ++i) {
      x0(layout.plus(i)) = std::max(d(i), 0.0);
      x0(layout.minus(i)) = std::max(-d(i), 0.0);
    }
  }

  KinematicResult r;
  r.qp = solve_box_qp(qp, x0, in.qp);
  r.v = r.qp.x.head(nk);
  r.objective = r.qp.objective;
  r.jump_n.resize(m);
  r.jump_t.resize(m);
  r.pi = in.pi_anchor;
  for (Index i = 0; i < m; ++i) {
    r.jump_n(i) = std::max(r.v(layout.jump(i)), 0.0);
    r.jump_t(i) = r.v(layout.jump(i) + 1);
    if (in.slip) r.pi(i) += r.qp.x(layout.plus(i)) - r.qp.x(layout.minus(i));
  }
  return r;
}

VecX damage_substep(const AdhesiveParams& p, const InterfacePairing& pairing, const VecX& energy_density,
                    const VecX& zeta_anchor, const QpOptions& qp_options) {
  const Index ne = pairing.num_elements();
  if (energy_density.size() != ne || zeta_anchor.size() != ne)
    throw QpError("damage substep: sizes do not match the interface");
  VecX b(ne);
  for (Index e = 0; e < ne; ++e) b(e) = pairing.element_lengths[static_cast<std::size_t>(e)] * (energy_density(e) - p.G_Ic);
  if (p.kappa_0 <= 0.0) {
    VecX z = zeta_anchor;
    for (Index e = 0; e < ne; ++e)
      if (b(e) > 0.0) z(e) = 0.0;
    return z;
  }
  BoxQP<double> qp;
  qp.Q = MatX::Zero(ne, ne);
  for (const auto& adj : element_adjacency(pairing)) {
    const double k = p.kappa_0 / adj.distance;
    qp.Q(adj.a, adj.a) += k;
    qp.Q(adj.b, adj.b) += k;
    qp.Q(adj.a, adj.b) -= k;
    qp.Q(adj.b, adj.a) -= k;
  }
  qp.b = b;
  qp.lower = VecX::Zero(ne);
  qp.upper = zeta_anchor;
  return solve_box_qp(qp, zeta_anchor, qp_options).x;
}

}  // namespace delam
