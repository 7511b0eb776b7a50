#include "delam/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace delam {

namespace {

RectSide side_of(const ScenarioConfig& cfg, const Vec2& mid) {
  const double tol = 1e-9 * std::max(cfg.length, cfg.height);
  if (std::abs(mid.y()) < tol) return RectSide::Bottom;
  if (std::abs(mid.x() - cfg.length) < tol) return RectSide::Right;
  if (std::abs(mid.y() - cfg.height) < tol) return RectSide::Top;
  return RectSide::Left;
}

std::size_t idx(RectSide s) { return static_cast<std::size_t>(s); }

}  // namespace

void ScenarioConfig::validate() const {
  if (!(length > 0.0) || !(height > 0.0)) throw std::invalid_argument("scenario: length and height must be positive");
  for (Index c : side_counts)
    if (c < 1) throw std::invalid_argument("scenario: every side needs at least one element");
  if (contact_count < 1) throw std::invalid_argument("scenario: the contact zone needs at least one element");
  if (side_tags[idx(contact_side)] == BoundaryTag::Contact)
    throw std::invalid_argument("scenario: side tags must be Dirichlet or Neumann");
  for (BoundaryTag t : side_tags)
    if (t == BoundaryTag::Contact) throw std::invalid_argument("scenario: side tags must be Dirichlet or Neumann");
  const double side_len = (contact_side == RectSide::Bottom || contact_side == RectSide::Top) ? length : height;
  if (!(contact_begin >= 0.0 && contact_end > contact_begin && contact_end <= side_len))
    throw std::invalid_argument("scenario: contact span must satisfy 0 <= begin < end <= side length");
  material.validate();
  adhesive.validate();
  load.validate();
  if (!(options.ama_tol > 0.0) || options.ama_max_iter < 1)
    throw std::invalid_argument("scenario: alternate minimization needs a positive tolerance and iteration cap");
  if (options.max_backtracks < 0) throw std::invalid_argument("scenario: backtrack budget must be non-negative");
  if (!(options.two_sided_rel_tol >= 0.0)) throw std::invalid_argument("scenario: two-sided tolerance must be >= 0");
  for (double t : snapshot_times)
    if (t < 0.0) throw std::invalid_argument("scenario: snapshot times must be non-negative");
}

ScenarioConfig scenario_nonmonotonic(char variant) {
  ScenarioConfig c;
  c.name = std::string("nonmonotonic-") + variant;
  c.load.phi = {LoadKind::Sine, 1.0, 7.0};
  c.load.psi = {LoadKind::Zero};
  c.load.final_time = 1.0;
  c.load.steps = 560;
  switch (variant) {
    case 'a': c.options.damage = false; c.options.plasticity = false; break;
    case 'b': c.options.damage = false; c.options.plasticity = true; break;
    case 'c': c.options.damage = true; c.options.plasticity = false; break;
    case 'd': c.options.damage = true; c.options.plasticity = true; break;
    default: throw std::invalid_argument(std::string("nonmonotonic case must be a, b, c or d, got '") + variant + "'");
  }
  c.snapshot_times = {0.2, 0.4, 0.6, 0.8, 1.0};
  return c;
}

ScenarioConfig scenario_traction(double p0, Index contact_count) {
  ScenarioConfig c;
  c.name = "traction";
  c.side_tags = {BoundaryTag::Neumann, BoundaryTag::Neumann, BoundaryTag::Neumann, BoundaryTag::Dirichlet};
  c.contact_begin = 25.0;
  c.contact_end = 225.0;
  c.contact_count = contact_count;
  c.dirichlet_shape = {Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  c.neumann_shape = {Vec2::Zero(), Vec2(p0, 0.0), Vec2::Zero(), Vec2::Zero()};
  c.load.phi = {LoadKind::Zero};
  c.load.psi = {LoadKind::Linear, 1.0};
  c.load.steps = 100;
  c.probe_x = 225.0;
  c.snapshot_times = {0.1, 0.2, 0.25, 0.3};
  return c;
}

ScenarioConfig scenario_traction_plastic(Index contact_count) {
  ScenarioConfig c = scenario_traction(1200.0, contact_count);
  c.name = "traction-plastic-" + std::to_string(contact_count);
  c.options.damage = false;
  c.options.stop_when_debonded = false;
  return c;
}

ScenarioConfig scenario_application(Index contact_elements) {
  if (contact_elements % 54 != 0 || contact_elements < 54)
    throw std::invalid_argument("application mesh level must be a multiple of 54 elements on the contact zone");
  const Index r = contact_elements / 54;
  ScenarioConfig c;
  c.name = "application";
  c.side_counts = {60 * r, 3 * r, 60 * r, 3 * r};
  c.contact_count = contact_elements;
  c.dirichlet_shape = {Vec2::Zero(), Vec2(0.6, 0.36), Vec2::Zero(), Vec2::Zero()};
  c.load.phi = {LoadKind::Linear, 1.0};
  c.load.steps = 100;
  c.snapshot_times = {0.25, 0.5, 0.75, 1.0};
  return c;
}

ScenarioConfig scenario_application_snapshot(Index contact_elements) {
  ScenarioConfig c = scenario_application(contact_elements);
  c.name = "application-snapshot";
  c.load.final_time = 0.28 / 0.6;
  c.load.steps = 28;
  c.snapshot_times = {c.load.final_time};
  return c;
}

std::vector<std::string> builtin_names() {
  return {"nonmonotonic-a",      "nonmonotonic-b", "nonmonotonic-c",       "nonmonotonic-d",
          "traction",            "traction-plastic", "application",        "application-snapshot",
          "spring",              "gc-sweep"};
}

ScenarioConfig builtin_scenario(const std::string& name, Index level) {
  if (name.rfind("nonmonotonic-", 0) == 0 && name.size() == 14) return scenario_nonmonotonic(name.back());
  if (name == "traction") return level > 0 ? scenario_traction(1200.0, level) : scenario_traction();
  if (name == "traction-plastic") return scenario_traction_plastic(level > 0 ? level : 10);
  if (name == "application") return scenario_application(level > 0 ? level : 54);
  if (name == "application-snapshot") return scenario_application_snapshot(level > 0 ? level : 54);
  throw std::invalid_argument("unknown builtin scenario '" + name + "'");
}

DomainMesh scenario_mesh(const ScenarioConfig& cfg) {
  RectangleSpec spec;
  spec.length = cfg.length;
  spec.height = cfg.height;
  for (std::size_t s = 0; s < 4; ++s) spec.sides[s] = {cfg.side_counts[s], cfg.side_tags[s]};
  spec.contact = ContactSpan{cfg.contact_side, cfg.contact_begin, cfg.contact_end, cfg.contact_count};
  return build_rectangle(spec);
}

Problem build_problem(const ScenarioConfig& cfg) {
  cfg.validate();
  Problem P;
  DomainSetup dom;
  dom.mesh = scenario_mesh(cfg);
  dom.material = cfg.material;
  dom.dirichlet.assign(static_cast<std::size_t>(dom.mesh.num_nodes()), Vec2::Zero());
  dom.neumann.assign(static_cast<std::size_t>(dom.mesh.num_elements()), Vec2::Zero());
  for (Index e = 0; e < dom.mesh.num_elements(); ++e) {
    const auto& el = dom.mesh.elements[static_cast<std::size_t>(e)];
    const Vec2 mid = 0.5 * (dom.mesh.nodes[static_cast<std::size_t>(el[0])] + dom.mesh.nodes[static_cast<std::size_t>(el[1])]);
    const RectSide side = side_of(cfg, mid);
    switch (dom.mesh.tags[static_cast<std::size_t>(e)]) {
      case BoundaryTag::Dirichlet:
        for (Index n : el) dom.dirichlet[static_cast<std::size_t>(n)] = cfg.dirichlet_shape[idx(side)];
        break;
      case BoundaryTag::Neumann: dom.neumann[static_cast<std::size_t>(e)] = cfg.neumann_shape[idx(side)]; break;
      case BoundaryTag::Contact: break;
    }
  }
  P.pairing = pair_with_obstacle(dom.mesh);
  P.domains.push_back(std::move(dom));
  P.adhesive = cfg.adhesive;
  P.load = cfg.load;
  P.options = cfg.options;
  return P;
}

std::vector<SpringSample> spring_response(const AdhesiveParams& p, const std::vector<double>& jump_n,
                                          const std::vector<double>& jump_t, bool damage, bool plasticity) {
  if (jump_n.size() != jump_t.size()) throw std::invalid_argument("spring: jump paths differ in length");
  std::vector<SpringSample> out;
  out.reserve(jump_n.size());
  double zeta = 1.0, pi = 0.0;
  for (std::size_t k = 0; k < jump_n.size(); ++k) {
    const double jn = jump_n[k], jt = jump_t[k];
    if (jn < 0.0) throw std::invalid_argument("spring: normal jump must be non-negative");
    if (plasticity) {
      const double s = zeta * p.kappa_t * (jt - pi) - p.kappa_H * pi;
      if (std::abs(s) > p.sigma_yield) pi += std::copysign((std::abs(s) - p.sigma_yield) / (zeta * p.kappa_t + p.kappa_H), s);
    }
    if (damage && zeta > 0.0 && damage_activation(p, jn, jt, pi).value > p.G_Ic) zeta = 0.0;
    out.push_back({jn, jt, zeta * p.kappa_n * jn, zeta * p.kappa_t * (jt - pi), zeta, pi});
  }
  return out;
}

std::vector<GcPoint> gc_sweep(const AdhesiveParams& p, Index samples) {
  if (samples < 2) throw std::invalid_argument("gc sweep: at least two samples");
  std::vector<GcPoint> out;
  for (Index i = 0; i < samples; ++i)
    out.push_back(gc_curve(p, 0.5 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(samples - 1)));
  return out;
}

std::vector<double> entry_abscissa(const ScenarioConfig& cfg, const DomainMesh& mesh, const InterfacePairing& pairing) {
  const bool horizontal = cfg.contact_side == RectSide::Bottom || cfg.contact_side == RectSide::Top;
  std::vector<double> x;
  for (const auto& en : pairing.entries) {
    const Vec2& n = mesh.nodes[static_cast<std::size_t>(en.primary.node)];
    x.push_back(horizontal ? n.x() : n.y());
  }
  return x;
}

Index nearest_entry(const std::vector<double>& abscissa, double x) {
  if (abscissa.empty()) throw std::invalid_argument("nearest entry: empty interface");
  Index best = 0;
  for (std::size_t i = 1; i < abscissa.size(); ++i)
    if (std::abs(abscissa[i] - x) < std::abs(abscissa[static_cast<std::size_t>(best)] - x)) best = static_cast<Index>(i);
  return best;
}

}  // namespace delam
