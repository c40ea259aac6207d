#include <cstdlib>
#include <iostream>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "focalfree/regress.hpp"
#include "focalfree/scenario.hpp"

using namespace focalfree;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config, "Scenario file (INI); defaults to the hyperbolic surface")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", flags.seed, "Master seed, overrides [run] seed");
  sub->add_option("--out", flags.out, "Output directory, overrides [run] output");
}

int report_run(const RunReport& r, const std::filesystem::path& out) {
  for (const auto& a : r.artifacts) fmt::print("{}\n", (out / a).string());
  fmt::print("{}\n", (out / "metadata.json").string());
  if (!r.certification.certified)
    fmt::print(stderr, "warning: metric not certified free of focal points (witness time {})\n",
               r.certification.witness_time ? fmt::format("{}", *r.certification.witness_time) : "none");
  for (const auto& e : r.errors) fmt::print(stderr, "error in {}: {}\n", e.stage, e.message);
  return r.ok() ? 0 : 1;
}

int run(const CommonFlags& flags, std::vector<std::string> commands) {
  Scenario s = flags.config.empty() ? Scenario{} : load_scenario(flags.config);
  if (flags.seed) s.seed = *flags.seed;
  std::filesystem::path out = flags.out.empty() ? std::filesystem::path(s.output) : std::filesystem::path(flags.out);
  if (flags.out.empty() && !flags.config.empty() && out.is_relative())
    out = std::filesystem::path(flags.config).parent_path() / out;
  if (commands.empty()) commands = s.commands;
  if (commands.empty()) throw ConfigError({"run.commands: no commands to run"});
  return report_run(run_scenario(s, commands, out), out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic flow laboratory on genus-2 surfaces without focal points"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string chosen;
  for (const auto& command : kCommands) {
    auto* sub = app.add_subcommand(command, "Run the " + command + " stage and write its artifact");
    add_common(sub, flags);
    sub->callback([&chosen, command] { chosen = command; });
  }
  auto* all = app.add_subcommand("run", "Run the commands listed in [run] commands");
  add_common(all, flags);
  all->callback([&chosen] { chosen = "run"; });

  std::string golden, fresh;
  RegressOptions regress_options;
  std::vector<std::string> per_artifact;
  auto* reg = app.add_subcommand("regress", "Compare a fresh artifact directory against a golden one");
  reg->add_option("golden", golden)->required()->check(CLI::ExistingDirectory);
  reg->add_option("fresh", fresh)->required()->check(CLI::ExistingDirectory);
  reg->add_option("--tol", regress_options.default_tol, "Relative tolerance for numeric fields (0 = exact text)");
  reg->add_option("--tol-for", per_artifact, "Per-artifact tolerance, NAME=TOL (repeatable)");
  reg->add_flag("--force", regress_options.force, "Compare even when the config hashes differ");
  reg->callback([&chosen] { chosen = "regress"; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (chosen == "regress") {
      for (const auto& item : per_artifact) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--tol-for", "expected NAME=TOL");
        regress_options.tolerances[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      }
      const RegressReport r = regress(golden, fresh, regress_options);
      for (const auto& p : r.problems) fmt::print("structural: {}\n", p);
      for (const auto& m : r.mismatches) fmt::print("mismatch: {}\n", m);
      fmt::print("{} ({} artifacts compared)\n", r.pass() ? "pass" : "fail", r.compared.size());
      return r.pass() ? 0 : 1;
    }
    return run(flags, chosen == "run" ? std::vector<std::string>{} : std::vector<std::string>{chosen});
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems) fmt::print(stderr, "config error: {}\n", p);
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
