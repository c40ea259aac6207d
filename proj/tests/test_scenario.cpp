#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "focalfree/regress.hpp"
#include "focalfree/scenario.hpp"
#include <fmt/core.h>

#include "json.hpp"

using namespace focalfree;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "focalfree_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

const char* kSmall = R"([run]
seed = 9
commands = check-nofocal, geodesic, busemann, crossratio, entropy, psmeasure, mme-sample, correlate

[certification]
vectors = 20

[sampler]
n = 100

[correlate]
n = 300
t_grid = 0, 1, 2
)";

const std::vector<std::string> kGeometry{"nofocal.json", "geodesic.csv", "busemann.json",
                                         "crossratio.json", "entropy.json", "psmeasure.csv"};

}  // namespace

TEST_CASE("scenario parsing") {
  const Scenario d = parse_scenario("");
  CHECK(d.seed == 1);
  CHECK(d.amplitude == 0.0);
  CHECK(d.L == 10);

  const Scenario s = parse_scenario("[metric]\namplitude = 0.3\ncenter_x = 0.05\n[run]\nseed = 42\n");
  CHECK(s.amplitude == 0.3);
  CHECK(s.center.x == 0.05);
  CHECK(s.seed == 42);

  // All problems are reported together, each with its key path.
  try {
    parse_scenario("[metric]\namplitude = -1\nradius = abc\ncolour = red\n[nonsense]\nx = 1\n[correlate]\nt_grid = 2, 1\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string all = e.what();
    CHECK(all.find("metric.radius: expected a number") != std::string::npos);
    CHECK(all.find("metric.colour: unknown key") != std::string::npos);
    CHECK(all.find("nonsense: unknown section") != std::string::npos);
    CHECK(all.find("metric.amplitude: must be >= 0") != std::string::npos);
    CHECK(all.find("correlate.t_grid: must be strictly increasing") != std::string::npos);
    CHECK(e.problems.size() == 5);
  }
  try {
    parse_scenario("[metric]\namplitude = -1\n[correlate]\nt_grid = 2, 1\nf = nope\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems.size() == 3);
    CHECK(e.problems[0].rfind("metric.amplitude", 0) == 0);
  }
  CHECK_THROWS_AS(parse_scenario("[run]\ncommands = geodesic, fly\n"), ConfigError);
}

TEST_CASE("config hash") {
  const Scenario a = parse_scenario("[metric]\namplitude = 0.3\n");
  const Scenario b = parse_scenario("; comment\n[metric]\namplitude=0.30\n\n[run]\nseed = 7\noutput = elsewhere\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(parse_scenario("[metric]\namplitude = 0.31\n")));
  CHECK(config_hash(a).size() == 64);
  // Known SHA-256 vector.
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("scenario runs and regression") {
  const fs::path dir = scratch("run");
  spit(dir / "small.ini", kSmall);
  const Scenario s = load_scenario(dir / "small.ini");
  const RunReport r1 = run_scenario(s, s.commands, dir / "a");
  REQUIRE(r1.ok());
  CHECK(r1.certification.certified);
  for (const auto& name : r1.artifacts) {
    const std::string content = slurp(dir / "a" / name);
    CHECK(content.find(r1.config_hash) != std::string::npos);
    CHECK(content.find('\r') == std::string::npos);
  }
  const auto meta = nlohmann::json::parse(slurp(dir / "a" / "metadata.json"));
  CHECK(meta["config_hash"] == r1.config_hash);
  CHECK(meta["seed"] == 9);
  CHECK(meta["certified_no_focal"] == true);

  // Headers exactly as documented.
  auto header = [&](const std::string& name) {
    std::istringstream in(slurp(dir / "a" / name));
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    return line;
  };
  CHECK(header("geodesic.csv") == "t,x,y,angle");
  CHECK(header("psmeasure.csv") == "theta,weight");
  CHECK(header("mme.csv") == "x,y,angle,weight");
  CHECK(header("correlation.csv") == "t,estimate,stderr,N,seed");

  // Same config twice: byte-identical artifacts.
  run_scenario(s, s.commands, dir / "b");
  for (const auto& name : r1.artifacts) CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  CHECK(regress(dir / "a", dir / "a").pass());
  CHECK(regress(dir / "a", dir / "b").pass());

  // Another seed: only the stochastic artifacts change.
  Scenario other = s;
  other.seed = 10;
  run_scenario(other, other.commands, dir / "c");
  const RegressReport r = regress(dir / "a", dir / "c");
  CHECK_FALSE(r.pass());
  CHECK_FALSE(r.structural_failure);
  bool correlation_flagged = false;
  for (const auto& m : r.mismatches) {
    correlation_flagged |= m.rfind("correlation.csv", 0) == 0;
    for (const auto& g : kGeometry) CHECK(m.rfind(g, 0) != 0);
  }
  CHECK(correlation_flagged);

  // Tolerance 0 flags any change in the printed numbers.
  fs::copy(dir / "a", dir / "d");
  {
    std::string text = slurp(dir / "d" / "busemann.json");
    const auto pos = text.find("\"value\": ") + 9;
    const auto end = text.find_first_of(",\n}", pos);
    const double v = std::stod(text.substr(pos, end - pos));
    text.replace(pos, end - pos, fmt::format("{:.15e}", v));
    spit(dir / "d" / "busemann.json", text);
  }
  CHECK(regress(dir / "a", dir / "d").pass());
  RegressOptions exact;
  exact.default_tol = 0.0;
  CHECK_FALSE(regress(dir / "a", dir / "d", exact).pass());

  // Missing artifact is a structural failure.
  fs::remove(dir / "d" / "entropy.json");
  const RegressReport missing = regress(dir / "a", dir / "d");
  CHECK(missing.structural_failure);

  // Different configuration: refused unless forced.
  Scenario changed = s;
  changed.geodesic_t_max = 4.0;
  run_scenario(changed, {"geodesic"}, dir / "e");
  fs::create_directories(dir / "f");
  run_scenario(s, {"geodesic"}, dir / "f");
  const RegressReport refused = regress(dir / "f", dir / "e");
  CHECK(refused.structural_failure);
  RegressOptions force;
  force.force = true;
  const RegressReport forced = regress(dir / "f", dir / "e", force);
  CHECK_FALSE(forced.structural_failure);
  CHECK_FALSE(forced.pass());
}

TEST_CASE("uncertified metric and stage errors") {
  const fs::path dir = scratch("uncertified");
  const Scenario s = parse_scenario(
      "[metric]\namplitude = 0.5\ncenter_x = 0.05\ncenter_y = 0.02\nradius = 1.2\n"
      "[certification]\nvectors = 5\n[busemann]\np_x = 0.2\nq_x = 0.999999999\n");
  const RunReport r = run_scenario(s, {"check-nofocal"}, dir);
  CHECK_FALSE(r.certification.certified);
  REQUIRE(r.certification.witness_time.has_value());
  const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
  CHECK(meta["certified_no_focal"] == false);
  CHECK(meta["witness_time"].is_number());

  // A failing stage is recorded and the run continues.
  const Scenario h = parse_scenario("[entropy]\nr_lo = 0.1\nr_hi = 0.3\nr_step = 0.1\n");
  const RunReport e = run_scenario(h, {"entropy", "geodesic"}, dir / "stages");
  REQUIRE(e.errors.size() == 1);
  CHECK(e.errors[0].stage == "entropy");
  CHECK(e.artifacts == std::vector<std::string>{"geodesic.csv"});
}
