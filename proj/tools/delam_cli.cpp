#include "delam/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

using namespace delam;
using nlohmann::json;

namespace {

struct RunArgs {
  std::string builtin;
  std::string config;
  std::string out_dir;
  Index steps = 0;
  Index mesh_level = 0;
  std::string variant;
  unsigned seed = 0;
  int max_backtracks = -1;
  std::string reference;
};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

int run_spring(const std::filesystem::path& dir) {
  const AdhesiveParams p;
  std::filesystem::create_directories(dir);
  const auto up = linspace(0.0, 0.05, 101);
  write_atomically(dir / "spring_normal.csv",
                   spring_csv(spring_response(p, up, std::vector<double>(up.size(), 0.0), true, false)));
  std::vector<double> jt = linspace(0.0, 0.08, 81);
  for (double v : linspace(0.08, -0.08, 161)) jt.push_back(v);
  for (double v : linspace(-0.08, 0.08, 161)) jt.push_back(v);
  write_atomically(dir / "spring_shear.csv",
                   spring_csv(spring_response(p, std::vector<double>(jt.size(), 0.0), jt, false, true)));
  std::cout << "wrote spring_normal.csv, spring_shear.csv to " << dir.string() << "\n";
  return 0;
}

int run_gc_sweep(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_atomically(dir / "gc_sweep.csv", gc_sweep_csv(gc_sweep(AdhesiveParams{})));
  std::cout << "wrote gc_sweep.csv to " << dir.string() << "\n";
  return 0;
}

json diagnostics(const EvolutionRecord& rec, const InterfacePairing& pairing) {
  int ama_total = 0, ama_max = 0, ama_nonconv = 0;
  for (std::size_t k = 1; k < rec.steps.size(); ++k) {
    ama_total += rec.steps[k].ama_iterations;
    ama_max = std::max(ama_max, rec.steps[k].ama_iterations);
    if (!rec.steps[k].ama_converged) ++ama_nonconv;
  }
  const DamageEvent ev = first_damage(rec, pairing);
  json d = {{"termination", rec.termination},
            {"aborted", rec.aborted},
            {"accepted_steps", rec.steps.empty() ? 0 : rec.steps.size() - 1},
            {"asymmetry", rec.asymmetry},
            {"ama_iterations_total", ama_total},
            {"ama_iterations_max", ama_max},
            {"ama_not_converged", ama_nonconv},
            {"backtracks_total", rec.total_backtracks},
            {"backtracks_max_per_step", rec.max_backtracks_seen},
            {"energy_balance_residual", rec.energy_balance_residual},
            {"peak_total_energy", rec.peak_total_energy},
            {"first_damage", {{"step", ev.step}, {"time", ev.time}, {"elements", ev.elements}, {"length_mm", ev.length}}}};
  if (!rec.steps.empty()) {
    const auto& e = rec.steps.back().energy;
    d["strain_energy_final"] = e.bulk;
    d["total_energy_final"] = e.total;
    d["dissipated_final"] = e.dissipated_cumulative;
  }
  return d;
}

int run_command(const RunArgs& a) {
  std::string name = a.builtin;
  if (name == "nonmonotonic") name += "-" + (a.variant.empty() ? std::string("d") : a.variant);
  const std::filesystem::path out_default = a.out_dir.empty() ? std::string("out") : a.out_dir;
  if (name == "spring") return run_spring(out_default);
  if (name == "gc-sweep") return run_gc_sweep(out_default);

  ScenarioConfig cfg;
  try {
    if (!a.config.empty())
      cfg = load_config(a.config);
    else
      cfg = builtin_scenario(name, a.mesh_level);
    if (!a.variant.empty() && cfg.name.rfind("nonmonotonic-", 0) == 0) cfg = builtin_scenario("nonmonotonic-" + a.variant);
    if (a.steps > 0) {
      cfg.load.steps = a.steps;
      cfg.load.times.clear();
    }
    if (a.max_backtracks >= 0) cfg.options.max_backtracks = a.max_backtracks;
    if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  const std::filesystem::path dir = cfg.out_dir;
  std::filesystem::create_directories(dir);
  json report = {{"schema_version", kConfigSchemaVersion}, {"config", to_json(cfg)}, {"seed", a.seed}};
  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    Simulator sim(build_problem(cfg));
    const EvolutionRecord rec = sim.run();
    std::vector<std::string> files = write_run_tables(dir, cfg, sim, rec);
    write_atomically(dir / "mesh.json", to_json(sim.problem().domains[0].mesh).dump(1) + "\n");
    files.emplace_back("mesh.json");
    report["diagnostics"] = diagnostics(rec, sim.problem().pairing);
    if (!a.reference.empty()) {
      std::ifstream in(a.reference);
      if (!in) throw ConfigError("cannot open reference report '" + a.reference + "'");
      const json ref = json::parse(in);
      const double e_ref = ref.at("diagnostics").at("strain_energy_final").get<double>();
      const double e = report["diagnostics"]["strain_energy_final"].get<double>();
      report["reference"] = {{"path", a.reference},
                             {"strain_energy", e_ref},
                             {"strain_energy_percentage_difference", percentage_difference(e, e_ref)}};
    }
    files.emplace_back("report.json");
    report["files"] = files;
    code = rec.aborted ? 2 : 0;
    std::cout << cfg.name << ": " << rec.termination << ", " << rec.steps.size() - 1 << " steps, "
              << rec.total_backtracks << " backtracks\n";
  } catch (const std::exception& e) {
    report["error"] = e.what();
    report["files"] = json::array({"report.json"});
    std::cerr << "run failed: " << e.what() << "\n";
    code = 1;
  }
  report["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_atomically(dir / "report.json", report.dump(2) + "\n");
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delamination of an adhesive layer by a boundary element energetic solver"};
  app.require_subcommand(1);

  RunArgs args;
  auto* run = app.add_subcommand("run", "Run a built-in scenario or a JSON config");
  auto* src = run->add_option_group("source");
  src->add_option("--builtin", args.builtin, "Built-in scenario name (see `list`)");
  src->add_option("--config", args.config, "JSON config file")->check(CLI::ExistingFile);
  src->require_option(1);
  run->add_option("--out-dir", args.out_dir, "Output directory");
  run->add_option("--steps", args.steps, "Number of time steps")->check(CLI::PositiveNumber);
  run->add_option("--mesh-level", args.mesh_level, "Elements on the contact zone (54, 108, 216 for application)");
  run->add_option("--case", args.variant, "Nonmonotonic case")->check(CLI::IsMember({"a", "b", "c", "d"}));
  run->add_option("--seed", args.seed, "Seed echoed in the report; runs are deterministic");
  run->add_option("--max-backtracks", args.max_backtracks, "Failed energy tests allowed per step")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--reference", args.reference, "report.json of a reference run for the strain energy comparison");

  auto* list = app.add_subcommand("list", "List built-in scenarios");
  std::string show_name;
  Index show_level = 0;
  auto* show = app.add_subcommand("show-config", "Print the JSON config of a built-in scenario");
  show->add_option("name", show_name)->required();
  show->add_option("--mesh-level", show_level);

  CLI11_PARSE(app, argc, argv);

  if (*list) {
    for (const auto& n : builtin_names()) std::cout << n << "\n";
    return 0;
  }
  if (*show) {
    try {
      std::cout << to_json(builtin_scenario(show_name, show_level)).dump(2) << "\n";
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    }
    return 0;
  }
  return run_command(args);
}
