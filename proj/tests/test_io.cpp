#include "delam/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace delam;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("delam_test_io_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config round trip for every builtin scenario") {
  for (const std::string& name : builtin_names()) {
    CAPTURE(name);
    if (name == "spring" || name == "gc-sweep") {
      CHECK_THROWS(builtin_scenario(name));
      continue;
    }
    const ScenarioConfig cfg = builtin_scenario(name);
    const json j = to_json(cfg);
    const ScenarioConfig back = config_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(json::parse(j.dump()) == j);
    CHECK_NOTHROW(back.validate());
  }
}

TEST_CASE("partial configs keep the defaults of their base") {
  const ScenarioConfig base = builtin_scenario("traction");
  const ScenarioConfig c = config_from_json(json{{"schema_version", kConfigSchemaVersion}, {"load", {{"steps", 7}}}}, base);
  CHECK(c.load.steps == 7);
  CHECK(c.name == base.name);
  CHECK(c.contact_count == base.contact_count);
  CHECK(c.neumann_shape == base.neumann_shape);
}

TEST_CASE("config errors") {
  const json good = to_json(builtin_scenario("nonmonotonic-a"));
  json j = good;
  j["schema_version"] = kConfigSchemaVersion + 1;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = good;
  j.erase("schema_version");
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = good;
  j["adhesive"]["kappa_m"] = 1.0;
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("kappa_m"), ConfigError);
  j = good;
  j["extra"] = 1;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = good;
  j["geometry"]["side_tags"] = {"neumann", "dirichlet", "glue", "neumann"};
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j = good;
  j["geometry"]["side_counts"] = {1, 2, 3};
  CHECK_THROWS_AS(config_from_json(j), ConfigError);

  const auto dir = scratch_dir("errors");
  std::filesystem::create_directories(dir);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  write_atomically(dir / "broken.json", "{ \"schema_version\": ");
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  write_atomically(dir / "unknown.json", R"({"schema_version": 1, "builtin": "nope"})");
  CHECK_THROWS_AS(load_config(dir / "unknown.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config files may start from a builtin") {
  const auto dir = scratch_dir("builtin");
  std::filesystem::create_directories(dir);
  write_atomically(dir / "c.json", R"({"schema_version": 1, "builtin": "application", "load": {"steps": 12}})");
  const ScenarioConfig c = load_config(dir / "c.json");
  CHECK(c.name == "application");
  CHECK(c.load.steps == 12);
  CHECK(c.contact_count == builtin_scenario("application").contact_count);
  std::filesystem::remove_all(dir);
}

TEST_CASE("mesh json round trip") {
  const DomainMesh m = scenario_mesh(builtin_scenario("nonmonotonic-a"));
  const DomainMesh back = mesh_from_json(json::parse(to_json(m).dump()));
  CHECK(back.nodes == m.nodes);
  CHECK(back.elements == m.elements);
  CHECK(back.tags == m.tags);
  CHECK(back.domain_id == m.domain_id);

  json j = to_json(m);
  j["elements"][0] = {0, 0};
  CHECK_THROWS(mesh_from_json(j));
  j = to_json(m);
  j.erase("tags");
  CHECK_THROWS_AS(mesh_from_json(j), ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0.0000000000e+00");
  CHECK(format_number(-0.0) == "0.0000000000e+00");
  CHECK(format_number(1.5) == "1.5000000000e+00");
  CHECK(format_number(-2.25e-7) == "-2.2500000000e-07");
  CHECK(format_number(1.0 / 3.0) == format_number(1.0 / 3.0));
}

TEST_CASE("run tables are deterministic") {
  ScenarioConfig cfg = builtin_scenario("nonmonotonic-c");
  cfg.load.steps = 140;
  cfg.snapshot_times = {0.5, 1.0};
  const Simulator sim(build_problem(cfg));
  const EvolutionRecord rec = sim.run();

  const auto a = scratch_dir("run_a"), b = scratch_dir("run_b");
  const auto files = write_run_tables(a, cfg, sim, rec);
  REQUIRE(write_run_tables(b, cfg, Simulator(build_problem(cfg)), Simulator(build_problem(cfg)).run()) == files);
  CHECK(files.size() == 5);
  for (const std::string& f : files) {
    CAPTURE(f);
    const std::string ca = slurp(a / f);
    CHECK_FALSE(ca.empty());
    CHECK(ca == slurp(b / f));
    CHECK(ca.rfind("# ", 0) == 0);
    CHECK(ca.find("nan") == std::string::npos);
    CHECK(ca.find("-0.0000000000e+00") == std::string::npos);
    CHECK_FALSE(std::filesystem::exists(a / (f + ".tmp")));
  }
  // header plus comment plus one line per step
  const std::string energies = slurp(a / "energies.csv");
  CHECK(std::count(energies.begin(), energies.end(), '\n') == static_cast<long>(rec.steps.size()) + 2);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST_CASE("first damage event and percentage difference") {
  InterfacePairing p;
  p.element_lengths = {1.0, 2.0, 4.0};
  EvolutionRecord rec;
  rec.steps.resize(4);
  for (std::size_t k = 0; k < 4; ++k) {
    rec.steps[k].step = static_cast<Index>(k);
    rec.steps[k].time = 0.25 * static_cast<double>(k);
    rec.steps[k].zeta = VecX::Ones(3);
  }
  CHECK(first_damage(rec, p).step == 0);
  rec.steps[2].zeta << 0.0, 1.0, 0.0;
  rec.steps[3].zeta << 0.0, 0.0, 0.0;
  const DamageEvent ev = first_damage(rec, p);
  CHECK(ev.step == 2);
  CHECK(ev.time == 0.5);
  CHECK(ev.elements == 2);
  CHECK(ev.length == 5.0);

  CHECK(percentage_difference(101.0, 100.0) == doctest::Approx(1.0));
  CHECK(percentage_difference(99.0, -100.0) == doctest::Approx(199.0));
}
