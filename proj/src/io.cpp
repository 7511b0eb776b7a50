#include "delam/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace delam {

using nlohmann::json;

namespace {

const char* side_name(RectSide s) {
  switch (s) {
    case RectSide::Bottom: return "bottom";
    case RectSide::Right: return "right";
    case RectSide::Top: return "top";
    case RectSide::Left: return "left";
  }
  return "bottom";
}

RectSide side_from_name(const std::string& s) {
  if (s == "bottom") return RectSide::Bottom;
  if (s == "right") return RectSide::Right;
  if (s == "top") return RectSide::Top;
  if (s == "left") return RectSide::Left;
  throw ConfigError("unknown rectangle side '" + s + "'");
}

const char* kind_name(LoadKind k) {
  switch (k) {
    case LoadKind::Zero: return "zero";
    case LoadKind::Linear: return "linear";
    case LoadKind::Sine: return "sine";
    case LoadKind::Power: return "power";
  }
  return "zero";
}

LoadKind kind_from_name(const std::string& s) {
  if (s == "zero") return LoadKind::Zero;
  if (s == "linear") return LoadKind::Linear;
  if (s == "sine") return LoadKind::Sine;
  if (s == "power") return LoadKind::Power;
  throw ConfigError("unknown load function '" + s + "'");
}

json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }

Vec2 vec_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(where + ": expected a pair of numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

/// Object view that rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }
  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError(path_ + ": unknown key '" + key + "'");
  }
  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  template <class T>
  void get(const std::string& key, T& out) {
    if (const json* v = find(key)) {
      try {
        out = v->get<T>();
      } catch (const json::exception&) {
        throw ConfigError(path_ + "." + key + ": wrong type");
      }
    }
  }
  std::string path(const std::string& key) const { return path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json load_function_json(const LoadFunction& f) {
  return {{"kind", kind_name(f.kind)}, {"amplitude", f.amplitude}, {"omega", f.omega}};
}

LoadFunction load_function_from(const json& j, LoadFunction f, const std::string& path) {
  Section s(j, path);
  std::string kind = kind_name(f.kind);
  s.get("kind", kind);
  f.kind = kind_from_name(kind);
  s.get("amplitude", f.amplitude);
  s.get("omega", f.omega);
  s.finish();
  return f;
}

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  bool first = true;
  for (double v : values) {
    if (!first) row += ',';
    row += format_number(v);
    first = false;
  }
  row += '\n';
  return row;
}

}  // namespace

json to_json(const ScenarioConfig& c) {
  json sides_tags = json::array(), counts = json::array(), dsh = json::array(), nsh = json::array();
  for (std::size_t s = 0; s < 4; ++s) {
    sides_tags.push_back(to_string(c.side_tags[s]));
    counts.push_back(c.side_counts[s]);
    dsh.push_back(vec(c.dirichlet_shape[s]));
    nsh.push_back(vec(c.neumann_shape[s]));
  }
  const auto& o = c.options;
  const auto& a = c.adhesive;
  return {
      {"schema_version", kConfigSchemaVersion},
      {"name", c.name},
      {"geometry",
       {{"length", c.length},
        {"height", c.height},
        {"side_counts", counts},
        {"side_tags", sides_tags},
        {"contact", {{"side", side_name(c.contact_side)}, {"begin", c.contact_begin}, {"end", c.contact_end},
                     {"count", c.contact_count}}}}},
      {"material", {{"young_modulus", c.material.young_modulus}, {"poisson_ratio", c.material.poisson_ratio}}},
      {"adhesive",
       {{"kappa_n", a.kappa_n}, {"kappa_t", a.kappa_t}, {"kappa_H", a.kappa_H}, {"kappa_0", a.kappa_0},
        {"G_Ic", a.G_Ic}, {"sigma_yield", a.sigma_yield}}},
      {"load",
       {{"dirichlet_shape", dsh},
        {"neumann_shape", nsh},
        {"phi", load_function_json(c.load.phi)},
        {"psi", load_function_json(c.load.psi)},
        {"final_time", c.load.final_time},
        {"steps", c.load.steps},
        {"times", c.load.times}}},
      {"solver",
       {{"damage", o.damage},
        {"plasticity", o.plasticity},
        {"ama_tol", o.ama_tol},
        {"ama_max_iter", o.ama_max_iter},
        {"backtracking", o.backtracking},
        {"max_backtracks", o.max_backtracks},
        {"two_sided_rel_tol", o.two_sided_rel_tol},
        {"stop_when_debonded", o.stop_when_debonded},
        {"qp_tol", o.qp.tol},
        {"corner_offset", o.assembly.corner_offset}}},
      {"output", {{"probe_x", c.probe_x}, {"snapshot_times", c.snapshot_times}, {"out_dir", c.out_dir}}},
  };
}

ScenarioConfig config_from_json(const json& j, const ScenarioConfig& base) {
  ScenarioConfig c = base;
  Section root(j, "config");
  int version = -1;
  root.get("schema_version", version);
  if (version != kConfigSchemaVersion)
    throw ConfigError("config: schema_version must be " + std::to_string(kConfigSchemaVersion) + ", got " +
                      std::to_string(version));
  root.get("name", c.name);

  if (const json* g = root.find("geometry")) {
    Section s(*g, root.path("geometry"));
    s.get("length", c.length);
    s.get("height", c.height);
    if (const json* v = s.find("side_counts")) {
      if (!v->is_array() || v->size() != 4) throw ConfigError(s.path("side_counts") + ": expected 4 integers");
      for (std::size_t i = 0; i < 4; ++i) c.side_counts[i] = (*v)[i].get<Index>();
    }
    if (const json* v = s.find("side_tags")) {
      if (!v->is_array() || v->size() != 4) throw ConfigError(s.path("side_tags") + ": expected 4 tags");
      try {
        for (std::size_t i = 0; i < 4; ++i) c.side_tags[i] = tag_from_string((*v)[i].get<std::string>());
      } catch (const MeshError& e) {
        throw ConfigError(s.path("side_tags") + ": " + e.what());
      }
    }
    if (const json* v = s.find("contact")) {
      Section cs(*v, s.path("contact"));
      std::string side = side_name(c.contact_side);
      cs.get("side", side);
      c.contact_side = side_from_name(side);
      cs.get("begin", c.contact_begin);
      cs.get("end", c.contact_end);
      cs.get("count", c.contact_count);
      cs.finish();
    }
    s.finish();
  }
  if (const json* m = root.find("material")) {
    Section s(*m, root.path("material"));
    s.get("young_modulus", c.material.young_modulus);
    s.get("poisson_ratio", c.material.poisson_ratio);
    s.finish();
  }
  if (const json* a = root.find("adhesive")) {
    Section s(*a, root.path("adhesive"));
    s.get("kappa_n", c.adhesive.kappa_n);
    s.get("kappa_t", c.adhesive.kappa_t);
    s.get("kappa_H", c.adhesive.kappa_H);
    s.get("kappa_0", c.adhesive.kappa_0);
    s.get("G_Ic", c.adhesive.G_Ic);
    s.get("sigma_yield", c.adhesive.sigma_yield);
    s.finish();
  }
  if (const json* l = root.find("load")) {
    Section s(*l, root.path("load"));
    for (const char* key : {"dirichlet_shape", "neumann_shape"}) {
      if (const json* v = s.find(key)) {
        if (!v->is_array() || v->size() != 4) throw ConfigError(s.path(key) + ": expected 4 pairs");
        auto& dst = std::string(key) == "dirichlet_shape" ? c.dirichlet_shape : c.neumann_shape;
        for (std::size_t i = 0; i < 4; ++i) dst[i] = vec_from((*v)[i], s.path(key));
      }
    }
    if (const json* v = s.find("phi")) c.load.phi = load_function_from(*v, c.load.phi, s.path("phi"));
    if (const json* v = s.find("psi")) c.load.psi = load_function_from(*v, c.load.psi, s.path("psi"));
    s.get("final_time", c.load.final_time);
    s.get("steps", c.load.steps);
    s.get("times", c.load.times);
    s.finish();
  }
  if (const json* o = root.find("solver")) {
    Section s(*o, root.path("solver"));
    s.get("damage", c.options.damage);
    s.get("plasticity", c.options.plasticity);
    s.get("ama_tol", c.options.ama_tol);
    s.get("ama_max_iter", c.options.ama_max_iter);
    s.get("backtracking", c.options.backtracking);
    s.get("max_backtracks", c.options.max_backtracks);
    s.get("two_sided_rel_tol", c.options.two_sided_rel_tol);
    s.get("stop_when_debonded", c.options.stop_when_debonded);
    s.get("qp_tol", c.options.qp.tol);
    s.get("corner_offset", c.options.assembly.corner_offset);
    s.finish();
  }
  if (const json* o = root.find("output")) {
    Section s(*o, root.path("output"));
    s.get("probe_x", c.probe_x);
    s.get("snapshot_times", c.snapshot_times);
    s.get("out_dir", c.out_dir);
    s.finish();
  }
  root.finish();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  ScenarioConfig base;
  if (const auto it = j.find("builtin"); it != j.end()) {
    try {
      base = builtin_scenario(it->get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    j.erase("builtin");
  }
  return config_from_json(j, base);
}

json to_json(const DomainMesh& mesh) {
  json nodes = json::array(), elements = json::array(), tags = json::array();
  for (const Vec2& n : mesh.nodes) nodes.push_back(vec(n));
  for (const auto& e : mesh.elements) elements.push_back({e[0], e[1]});
  for (BoundaryTag t : mesh.tags) tags.push_back(to_string(t));
  return {{"domain_id", mesh.domain_id}, {"nodes", nodes}, {"elements", elements}, {"tags", tags}};
}

DomainMesh mesh_from_json(const json& j) {
  DomainMesh mesh;
  Section s(j, "mesh");
  s.get("domain_id", mesh.domain_id);
  const json* nodes = s.find("nodes");
  const json* elements = s.find("elements");
  const json* tags = s.find("tags");
  s.finish();
  if (!nodes || !elements || !tags) throw ConfigError("mesh: nodes, elements and tags are required");
  for (const auto& n : *nodes) mesh.nodes.push_back(vec_from(n, "mesh.nodes"));
  for (const auto& e : *elements) {
    if (!e.is_array() || e.size() != 2) throw ConfigError("mesh.elements: expected node index pairs");
    mesh.elements.push_back({e[0].get<Index>(), e[1].get<Index>()});
  }
  for (const auto& t : *tags) mesh.tags.push_back(tag_from_string(t.get<std::string>()));
  mesh.finalize();
  return mesh;
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::string> write_run_tables(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                                          const Simulator& sim, const EvolutionRecord& rec) {
  std::filesystem::create_directories(dir);
  const Problem& P = sim.problem();
  const DomainMesh& mesh = P.domains[0].mesh;
  const InterfacePairing& pairing = P.pairing;
  const AdhesiveParams& ap = P.adhesive;
  const auto xs = entry_abscissa(cfg, mesh, pairing);
  const Index probe = nearest_entry(xs, cfg.probe_x);
  std::vector<std::string> files;

  Vec2 uD_mean = Vec2::Zero();
  Index nD = 0;
  for (Index n : mesh.nodes_of(BoundaryTag::Dirichlet)) {
    uD_mean += P.domains[0].dirichlet.empty() ? Vec2::Zero() : P.domains[0].dirichlet[static_cast<std::size_t>(n)];
    ++nD;
  }
  if (nD > 0) uD_mean /= static_cast<double>(nD);
  Index corner = 0;
  for (Index n = 1; n < mesh.num_nodes(); ++n)
    if ((mesh.nodes[static_cast<std::size_t>(n)] - Vec2(cfg.length, 0.0)).norm() <
        (mesh.nodes[static_cast<std::size_t>(corner)] - Vec2(cfg.length, 0.0)).norm())
      corner = n;

  std::string energies =
      "# energies per unit thickness in N/mm (= J/m); time dimensionless\n"
      "step,time,phi,psi,bulk,adhesive,total,dissipated_step,dissipated_damage_step,dissipated_plastic_step,"
      "dissipated_cumulative,power_lower,power_upper,increment,two_sided_ok,adhesive_normal,adhesive_tangential,"
      "adhesive_hardening,ama_iterations,backtracks\n";
  std::string forces =
      "# forces in N/mm (= kN/m) per unit thickness; displacements in mm\n"
      "step,time,u_D_x,u_D_y,F_D_x,F_D_y,F_N_x,F_N_y,corner_u_x,corner_u_y\n";
  std::string probe_csv =
      "# interface point history; jumps and slip in mm, stresses in MPa\n"
      "step,time,x,jump_n,jump_t,pi,sigma_n,sigma_t,zeta\n";

  const auto node_zeta = [&](const StepRecord& s, Index i) {
    double z = 0.0;
    int n = 0;
    for (std::size_t e = 0; e < pairing.elements.size(); ++e)
      if (pairing.elements[e][0] == i || pairing.elements[e][1] == i) {
        z += s.zeta(static_cast<Index>(e));
        ++n;
      }
    return n ? z / n : 0.0;
  };

  for (const StepRecord& s : rec.steps) {
    const auto& E = s.energy;
    energies += std::to_string(s.step) + "," +
                csv_row({s.time, s.phi, s.psi, E.bulk, E.adhesive, E.total, E.dissipated_step,
                         s.dissipation_step.damage, s.dissipation_step.plastic, E.dissipated_cumulative, E.lower,
                         E.upper, E.increment, s.two_sided_ok ? 1.0 : 0.0, s.adhesive_parts.normal,
                         s.adhesive_parts.tangential, s.adhesive_parts.hardening,
                         static_cast<double>(s.ama_iterations), static_cast<double>(s.backtracks_before)});
    const auto tr = sim.traces(0, s.v, s.phi, s.psi);
    const Vec2 uD = s.phi * uD_mean;
    forces += std::to_string(s.step) + "," +
              csv_row({s.time, uD.x(), uD.y(), s.force_D[0].x(), s.force_D[0].y(), s.force_N[0].x(),
                       s.force_N[0].y(), tr.u(2 * corner), tr.u(2 * corner + 1)});
    const double z = node_zeta(s, probe);
    probe_csv += std::to_string(s.step) + "," +
                 csv_row({s.time, xs[static_cast<std::size_t>(probe)], s.jump_n(probe), s.jump_t(probe), s.pi(probe),
                          z * ap.kappa_n * s.jump_n(probe), z * ap.kappa_t * (s.jump_t(probe) - s.pi(probe)), z});
  }
  write_atomically(dir / "energies.csv", energies);
  write_atomically(dir / "forces.csv", forces);
  write_atomically(dir / "probe.csv", probe_csv);
  files = {"energies.csv", "forces.csv", "probe.csv"};

  std::set<std::size_t> snaps;
  for (double t : cfg.snapshot_times) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < rec.steps.size(); ++k)
      if (std::abs(rec.steps[k].time - t) < std::abs(rec.steps[best].time - t)) best = k;
    if (!rec.steps.empty()) snaps.insert(best);
  }
  const auto& layout = sim.collocation(0).traction;
  for (std::size_t k : snaps) {
    const StepRecord& s = rec.steps[k];
    const auto tr = sim.traces(0, s.v, s.phi, s.psi);
    std::string csv =
        "# interface profile at one step; x and jumps in mm, tractions in MPa\n"
        "x,jump_n,jump_t,zeta,pi,t_n,t_t,bem_t_n,bem_t_t\n";
    for (Index i = 0; i < pairing.num_entries(); ++i) {
      const auto& en = pairing.entries[static_cast<std::size_t>(i)];
      const Index n = en.primary.node;
      Vec2 p = Vec2::Zero();
      int cnt = 0;
      for (Index e : {mesh.element_before(n), mesh.element_after(n)}) {
        if (mesh.tags[static_cast<std::size_t>(e)] != BoundaryTag::Contact) continue;
        const auto& el = mesh.elements[static_cast<std::size_t>(e)];
        const Index dof = layout.dof[static_cast<std::size_t>(e)][el[0] == n ? 0 : 1];
        p += tr.p.segment<2>(2 * dof);
        ++cnt;
      }
      if (cnt) p /= cnt;
      const double z = node_zeta(s, i);
      csv += csv_row({xs[static_cast<std::size_t>(i)], s.jump_n(i), s.jump_t(i), z, s.pi(i), z * ap.kappa_n * s.jump_n(i),
                      z * ap.kappa_t * (s.jump_t(i) - s.pi(i)), -p.dot(en.normal), -p.dot(en.tangent)});
    }
    char name[48];
    std::snprintf(name, sizeof name, "interface_%04zu.csv", static_cast<std::size_t>(s.step));
    write_atomically(dir / name, csv);
    files.emplace_back(name);
  }
  return files;
}

std::string spring_csv(const std::vector<SpringSample>& samples) {
  std::string csv =
      "# single adhesive point; jumps and slip in mm, stresses in MPa\n"
      "jump_n,jump_t,sigma_n,sigma_t,zeta,pi\n";
  for (const auto& s : samples) csv += csv_row({s.jump_n, s.jump_t, s.sigma_n, s.sigma_t, s.zeta, s.pi});
  return csv;
}

std::string gc_sweep_csv(const std::vector<GcPoint>& points) {
  std::string csv =
      "# crack onset along parametric angle phi (rad); jumps in mm, G_c in N/mm, mixity angles in rad\n"
      "phi,psi_u,psi_G,psi_sigma,jump_n,jump_t,G_c,plastic\n";
  for (const auto& p : points)
    csv += csv_row({p.phi, p.mixity.psi_u, p.mixity.psi_G, p.mixity.psi_sigma, p.jump_n, p.jump_t, p.G_c,
                    p.plastic ? 1.0 : 0.0});
  return csv;
}

DamageEvent first_damage(const EvolutionRecord& rec, const InterfacePairing& pairing) {
  for (std::size_t k = 1; k < rec.steps.size(); ++k) {
    const VecX& a = rec.steps[k - 1].zeta;
    const VecX& b = rec.steps[k].zeta;
    if (newly_debonded(a, b) == 0) continue;
    DamageEvent ev{rec.steps[k].step, rec.steps[k].time, 0, 0.0};
    for (Index m = 0; m < a.size(); ++m)
      if (a(m) > 0.0 && b(m) <= 0.0) {
        ++ev.elements;
        ev.length += pairing.element_lengths[static_cast<std::size_t>(m)];
      }
    return ev;
  }
  return {};
}

double percentage_difference(double a, double b) { return 100.0 * std::abs(a - b) / std::abs(b); }

}  // namespace delam
