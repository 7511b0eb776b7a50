#include "delam/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace delam {

double LoadFunction::operator()(double t) const {
  switch (kind) {
    case LoadKind::Zero: return 0.0;
    case LoadKind::Linear: return amplitude * t;
    case LoadKind::Sine: return amplitude * std::sin(omega * t);
    case LoadKind::Power: return amplitude * std::pow(t, omega);
  }
  return 0.0;
}

double LoadProgram::time(Index k) const {
  if (!times.empty()) return times.at(static_cast<std::size_t>(k));
  return final_time * static_cast<double>(k) / static_cast<double>(steps);
}

void LoadProgram::validate() const {
  if (times.empty()) {
    if (steps < 1) throw std::invalid_argument("load program: at least one time step is required");
    if (!(final_time > 0.0)) throw std::invalid_argument("load program: final time must be positive");
    return;
  }
  if (times.size() < 2) throw std::invalid_argument("load program: a time grid needs two instants");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("load program: times must increase strictly");
}

namespace {

Index domain_index(const std::vector<DomainSetup>& domains, int id) {
  for (std::size_t d = 0; d < domains.size(); ++d)
    if (domains[d].mesh.domain_id == id) return static_cast<Index>(d);
  throw MeshError("pairing refers to unknown domain " + std::to_string(id));
}

}  // namespace

Simulator::Simulator(Problem problem) : problem_(std::move(problem)) {
  const Problem& P = problem_;
  if (P.domains.empty()) throw std::invalid_argument("problem: no domains");
  P.adhesive.validate();
  P.load.validate();
  P.pairing.validate();

  layout_.entries = P.pairing.num_entries();
  layout_.two_domain = P.pairing.kind == PairingKind::TwoDomain;
  layout_.slip = false;
  const Index nk = layout_.kinematic_size();

  double diameter = 0.0;
  for (const auto& dom : P.domains) {
    diameter = std::max(diameter, dom.mesh.diameter());
    auto sys = assemble(dom.mesh, dom.material, P.options.assembly);
    auto op = condense(sys, dom.mesh);

    VecX uD = VecX::Zero(2 * static_cast<Index>(op.part.nodes_D.size()));
    if (!dom.dirichlet.empty()) {
      if (static_cast<Index>(dom.dirichlet.size()) != dom.mesh.num_nodes())
        throw std::invalid_argument("domain " + std::to_string(dom.mesh.domain_id) + ": one Dirichlet vector per node");
      for (std::size_t k = 0; k < op.part.nodes_D.size(); ++k)
        uD.segment<2>(2 * static_cast<Index>(k)) = dom.dirichlet[static_cast<std::size_t>(op.part.nodes_D[k])];
    }
    VecX pN = VecX::Zero(2 * static_cast<Index>(op.part.dofs_N.size()));
    if (!dom.neumann.empty()) {
      if (static_cast<Index>(dom.neumann.size()) != dom.mesh.num_elements())
        throw std::invalid_argument("domain " + std::to_string(dom.mesh.domain_id) + ": one Neumann vector per element");
      std::map<Index, std::pair<Vec2, int>> acc;
      for (Index e = 0; e < dom.mesh.num_elements(); ++e) {
        if (dom.mesh.tags[static_cast<std::size_t>(e)] != BoundaryTag::Neumann) continue;
        for (Index dof : sys.traction.dof[static_cast<std::size_t>(e)]) {
          auto& slot = acc.try_emplace(dof, Vec2::Zero(), 0).first->second;
          slot.first += dom.neumann[static_cast<std::size_t>(e)];
          slot.second += 1;
        }
      }
      for (std::size_t k = 0; k < op.part.dofs_N.size(); ++k) {
        const auto& slot = acc.at(op.part.dofs_N[k]);
        pN.segment<2>(2 * static_cast<Index>(k)) = slot.first / slot.second;
      }
    }
    uD_shape_.push_back(uD);
    pN_shape_.push_back(pN);
    T_.push_back(MatX::Zero(2 * static_cast<Index>(op.part.nodes_C.size()), nk));
    systems_.push_back(std::move(sys));
    ops_.push_back(std::move(op));
  }
  feasibility_tol_ = 1e-10 * diameter;

  // contact maps
  std::vector<std::map<Index, Index>> row_of(P.domains.size());
  for (std::size_t d = 0; d < P.domains.size(); ++d)
    for (std::size_t k = 0; k < ops_[d].part.nodes_C.size(); ++k) row_of[d][ops_[d].part.nodes_C[k]] = 2 * static_cast<Index>(k);
  std::vector<std::vector<char>> covered(P.domains.size());
  for (std::size_t d = 0; d < P.domains.size(); ++d) covered[d].assign(ops_[d].part.nodes_C.size(), 0);
  const auto row = [&](const NodeRef& ref, Index& dom) {
    dom = domain_index(P.domains, ref.domain);
    const auto it = row_of[static_cast<std::size_t>(dom)].find(ref.node);
    if (it == row_of[static_cast<std::size_t>(dom)].end())
      throw MeshError("pairing: domain " + std::to_string(ref.domain) + " node " + std::to_string(ref.node) +
                      " is not a contact node");
    covered[static_cast<std::size_t>(dom)][static_cast<std::size_t>(it->second / 2)] = 1;
    return it->second;
  };
  for (Index i = 0; i < layout_.entries; ++i) {
    const auto& en = P.pairing.entries[static_cast<std::size_t>(i)];
    Index dp = 0;
    const Index r = row(en.primary, dp);
    MatX& Tp = T_[static_cast<std::size_t>(dp)];
    Tp.block<2, 1>(r, layout_.jump(i)) = en.normal;
    Tp.block<2, 1>(r, layout_.jump(i) + 1) = en.tangent;
    if (en.secondary) {
      Tp.block<2, 2>(r, layout_.base(i)).setIdentity();
      Index ds = 0;
      const Index rs = row(*en.secondary, ds);
      T_[static_cast<std::size_t>(ds)].block<2, 2>(rs, layout_.base(i)).setIdentity();
    }
  }
  for (std::size_t d = 0; d < covered.size(); ++d)
    for (std::size_t k = 0; k < covered[d].size(); ++k)
      if (!covered[d][k])
        throw MeshError("pairing: contact node " + std::to_string(ops_[d].part.nodes_C[k]) + " of domain " +
                        std::to_string(P.domains[d].mesh.domain_id) + " is unmatched");

  K_ = MatX::Zero(nk, nk);
  fD_ = VecX::Zero(nk);
  fN_ = VecX::Zero(nk);
  for (std::size_t d = 0; d < ops_.size(); ++d) {
    const MatX& T = T_[d];
    K_ += T.transpose() * ops_[d].K_C * T;
    fD_ += T.transpose() * contact_linear_term(ops_[d], uD_shape_[d], VecX::Zero(pN_shape_[d].size()));
    fN_ += T.transpose() * contact_linear_term(ops_[d], VecX::Zero(uD_shape_[d].size()), pN_shape_[d]);
  }
}

LoadSnapshot Simulator::load_at(Index d, double phi, double psi) const {
  return {phi * uD_shape_[static_cast<std::size_t>(d)], psi * pN_shape_[static_cast<std::size_t>(d)]};
}

VecX Simulator::bulk_linear(double phi, double psi) const { return phi * fD_ + psi * fN_; }

double Simulator::bulk_energy(const VecX& v, double phi, double psi) const {
  double e = 0.5 * v.dot(K_ * v) + bulk_linear(phi, psi).dot(v);
  for (Index d = 0; d < num_domains(); ++d) {
    const LoadSnapshot l = load_at(d, phi, psi);
    e += contact_constant_term(condensed(d), l.u_D, l.p_N);
  }
  return e;
}

BoundarySolution Simulator::traces(Index d, const VecX& v, double phi, double psi) const {
  const CondensedOperator& op = condensed(d);
  const LoadSnapshot l = load_at(d, phi, psi);
  const VecX y = op.known(contact_displacement(d, v), l.u_D, l.p_N);
  return {op.Ru * y, op.Rp * y, 0.0};
}

void Simulator::fill_outputs(StepRecord& s) const {
  s.force_D.clear();
  s.force_N.clear();
  for (Index d = 0; d < num_domains(); ++d) {
    const auto& mesh = problem_.domains[static_cast<std::size_t>(d)].mesh;
    const auto tr = traces(d, s.v, s.phi, s.psi);
    const auto& layout = collocation(d).traction;
    const auto part_force = [&](BoundaryTag tag) {
      return mesh.elements_of(tag).empty() ? Vec2(Vec2::Zero()) : resultant_force(mesh, layout, tr.p, tag);
    };
    s.force_D.push_back(part_force(BoundaryTag::Dirichlet));
    s.force_N.push_back(part_force(BoundaryTag::Neumann));
  }
}

StepRecord Simulator::initial_state(const VecX& zeta0, const VecX& pi0) const {
  StepRecord s;
  s.step = 0;
  s.time = problem_.load.time(0);
  s.phi = problem_.load.phi(s.time);
  s.psi = problem_.load.psi(s.time);
  const VecX f = bulk_linear(s.phi, s.psi);
  KinematicInput in;
  in.pairing = &problem_.pairing;
  in.params = &problem_.adhesive;
  in.bulk_K = &K_;
  in.bulk_f = &f;
  in.zeta = zeta0;
  in.pi_anchor = pi0;
  in.slip = false;
  in.qp = problem_.options.qp;
  const auto r = kinematic_substep(in);
  s.v = r.v;
  s.jump_n = r.jump_n;
  s.jump_t = r.jump_t;
  s.pi = pi0;
  s.zeta = zeta0;
  s.energy.adhesive = adhesive_energy(problem_.adhesive, problem_.pairing, s.zeta, s.pi, s.jump_n, s.jump_t,
                                      feasibility_tol_, &s.adhesive_parts);
  s.energy.bulk = bulk_energy(s.v, s.phi, s.psi);
  s.energy.total = s.energy.bulk + s.energy.adhesive;
  fill_outputs(s);
  return s;
}

AmaResult Simulator::ama_step(Index k, const StepRecord& previous, const VecX& zeta_init) const {
  const auto& opt = problem_.options;
  const AdhesiveParams& ap = problem_.adhesive;
  AmaResult out;
  StepRecord& s = out.state;
  s.step = k;
  s.time = problem_.load.time(k);
  s.phi = problem_.load.phi(s.time);
  s.psi = problem_.load.psi(s.time);
  const VecX f = bulk_linear(s.phi, s.psi);

  const auto objective = [&](const VecX& v, const VecX& zeta, const VecX& pi, const VecX& jn, const VecX& jt) {
    return bulk_energy(v, s.phi, s.psi) + adhesive_energy(ap, problem_.pairing, zeta, pi, jn, jt, feasibility_tol_) +
           dissipation_increment(ap, problem_.pairing, zeta, previous.zeta, pi, previous.pi);
  };

  VecX zeta = zeta_init;
  VecX v = previous.v, pi = previous.pi;
  VecX jn = previous.jump_n, jt = previous.jump_t;
  s.ama_converged = false;
  for (int j = 1; j <= opt.ama_max_iter; ++j) {
    KinematicInput in;
    in.pairing = &problem_.pairing;
    in.params = &ap;
    in.bulk_K = &K_;
    in.bulk_f = &f;
    in.zeta = zeta;
    in.pi_anchor = previous.pi;
    in.slip = opt.plasticity;
    in.start = v;
    in.pi_start = pi;
    in.qp = opt.qp;
    const auto r = kinematic_substep(in);
    v = r.v;
    pi = r.pi;
    jn = r.jump_n;
    jt = r.jump_t;
    out.objective_history.push_back(objective(v, zeta, pi, jn, jt));

    VecX zeta_new = zeta;
    if (opt.damage)
      zeta_new = damage_substep(ap, problem_.pairing, element_energy_density(ap, problem_.pairing, pi, jn, jt),
                                previous.zeta, opt.qp);
    const double change = (zeta_new - zeta).cwiseAbs().maxCoeff();
    zeta = zeta_new;
    out.objective_history.push_back(objective(v, zeta, pi, jn, jt));
    s.ama_iterations = j;
    if (change < opt.ama_tol) {
      s.ama_converged = true;
      break;
    }
  }
  for (std::size_t i = 1; i < out.objective_history.size(); ++i) {
    const double a = out.objective_history[i - 1], b = out.objective_history[i];
    if (b > a + 1e-9 * (1.0 + std::abs(a))) s.ama_monotone = false;
  }
  s.v = v;
  s.pi = pi;
  s.zeta = zeta;
  s.jump_n = jn;
  s.jump_t = jt;
  return out;
}

void Simulator::evaluate_step(StepRecord& c, const StepRecord& prev) const {
  const AdhesiveParams& ap = problem_.adhesive;
  c.energy.adhesive =
      adhesive_energy(ap, problem_.pairing, c.zeta, c.pi, c.jump_n, c.jump_t, feasibility_tol_, &c.adhesive_parts);
  c.energy.bulk = bulk_energy(c.v, c.phi, c.psi);
  c.energy.total = c.energy.bulk + c.energy.adhesive;
  c.energy.dissipated_step =
      dissipation_increment(ap, problem_.pairing, c.zeta, prev.zeta, c.pi, prev.pi, &c.dissipation_step);
  c.energy.dissipated_cumulative = prev.energy.dissipated_cumulative + c.energy.dissipated_step;
  c.energy.lower = 0.0;
  c.energy.upper = 0.0;
  for (Index d = 0; d < num_domains(); ++d) {
    const LoadSnapshot lp = load_at(d, prev.phi, prev.psi), lc = load_at(d, c.phi, c.psi);
    c.energy.lower += power_integral_lower(condensed(d), lp, lc, contact_displacement(d, c.v));
    c.energy.upper += power_integral_upper(condensed(d), lp, lc, contact_displacement(d, prev.v));
  }
  c.energy.increment = c.energy.total + c.energy.dissipated_step - prev.energy.total;
  const double scale = std::abs(c.energy.total) + std::abs(prev.energy.total) + std::abs(c.energy.dissipated_step) +
                       std::abs(c.energy.lower) + std::abs(c.energy.upper);
  c.two_sided_tol = problem_.options.two_sided_rel_tol * scale + 1e-12;
  c.two_sided_ok = std::isfinite(c.energy.increment) && two_sided_holds(c.energy, c.two_sided_tol);
  fill_outputs(c);
}

double Simulator::competitor_margin(const StepRecord& s) const {
  // ζ is not a variable without damage: no debonded competitor is admissible
  if (!problem_.options.damage) return kInfinity;
  const AdhesiveParams& ap = problem_.adhesive;
  const double base = adhesive_energy(ap, problem_.pairing, s.zeta, s.pi, s.jump_n, s.jump_t, feasibility_tol_);
  double margin = kInfinity;
  VecX z = s.zeta;
  for (Index m = 0; m < z.size(); ++m) {
    if (!(s.zeta(m) > 0.0)) continue;
    z(m) = 0.0;
    const double e = adhesive_energy(ap, problem_.pairing, z, s.pi, s.jump_n, s.jump_t, feasibility_tol_);
    const double r = dissipation_increment(ap, problem_.pairing, z, s.zeta, s.pi, s.pi);
    margin = std::min(margin, e + r - base);
    z(m) = s.zeta(m);
  }
  return margin;
}

EvolutionRecord Simulator::run(std::optional<VecX> zeta0, std::optional<VecX> pi0) const {
  const auto& opt = problem_.options;
  EvolutionRecord rec;
  for (const auto& op : ops_) rec.asymmetry.push_back(op.asymmetry);
  const Index K = problem_.load.num_steps();
  const VecX z0 = zeta0.value_or(VecX::Ones(problem_.pairing.num_elements()));
  const VecX p0 = pi0.value_or(VecX::Zero(problem_.pairing.num_entries()));

  std::vector<StepRecord> states(static_cast<std::size_t>(K + 1));
  std::vector<int> failures(static_cast<std::size_t>(K + 1), 0);
  states[0] = initial_state(z0, p0);
  VecX zeta_init = z0;
  Index k = 1, last = 0;
  rec.termination = "completed";

  while (k <= K) {
    const StepRecord& prev = states[static_cast<std::size_t>(k - 1)];
    StepRecord cand = ama_step(k, prev, zeta_init).state;
    evaluate_step(cand, prev);
    zeta_init = cand.zeta;
    if (!std::isfinite(cand.energy.total) || !std::isfinite(cand.energy.dissipated_step)) {
      rec.aborted = true;
      rec.termination = "non-finite energy at step " + std::to_string(k);
      last = k - 1;
      break;
    }
    if (!opt.backtracking || cand.two_sided_ok) {
      cand.backtracks_before = failures[static_cast<std::size_t>(k)];
      states[static_cast<std::size_t>(k)] = std::move(cand);
      last = k;
      const StepRecord& acc = states[static_cast<std::size_t>(k)];
      ++k;
      if (opt.stop_when_debonded && opt.damage && acc.zeta.size() > 0 && (acc.zeta.array() <= 0.0).all()) {
        rec.termination = "interface fully debonded at step " + std::to_string(acc.step);
        break;
      }
    } else {
      ++rec.total_backtracks;
      const int n = ++failures[static_cast<std::size_t>(k)];
      rec.max_backtracks_seen = std::max(rec.max_backtracks_seen, n);
      if (n > opt.max_backtracks) {
        rec.aborted = true;
        rec.termination = "backtrack budget exhausted at step " + std::to_string(k);
        last = k - 1;
        break;
      }
      k = std::max<Index>(1, k - 1);
      last = k - 1;
    }
  }
  states.resize(static_cast<std::size_t>(last + 1));
  for (auto& s : states) s.competitor_margin = competitor_margin(s);
  rec.steps = std::move(states);
  rec.energy_balance_residual = energy_balance_residual(rec);
  for (const auto& s : rec.steps) rec.peak_total_energy = std::max(rec.peak_total_energy, std::abs(s.energy.total));
  return rec;
}

double loop_area(const std::vector<double>& u, const std::vector<double>& f) {
  if (u.size() != f.size()) throw std::invalid_argument("loop_area: path coordinates differ in length");
  double area = 0.0;
  std::size_t i = 0;
  while (i < u.size()) {
    if (u[i] == 0.0) {
      ++i;
      continue;
    }
    const bool positive = u[i] > 0.0;
    double run = 0.0, x0 = 0.0, y0 = 0.0;
    for (; i < u.size() && u[i] != 0.0 && (u[i] > 0.0) == positive; ++i) {
      run += x0 * f[i] - u[i] * y0;
      x0 = u[i];
      y0 = f[i];
    }
    run += x0 * 0.0 - 0.0 * y0;
    area += 0.5 * std::abs(run);
  }
  return area;
}

Index newly_debonded(const VecX& zeta_old, const VecX& zeta_new) {
  Index n = 0;
  for (Index m = 0; m < zeta_old.size(); ++m)
    if (zeta_old(m) > 0.0 && zeta_new(m) <= 0.0) ++n;
  return n;
}

double energy_balance_residual(const EvolutionRecord& record) {
  if (record.steps.empty()) return 0.0;
  double power = 0.0;
  for (std::size_t k = 1; k < record.steps.size(); ++k)
    power += 0.5 * (record.steps[k].energy.lower + record.steps[k].energy.upper);
  const auto& first = record.steps.front().energy;
  const auto& last = record.steps.back().energy;
  return std::abs(last.total + last.dissipated_cumulative - first.total - power);
}

}  // namespace delam
