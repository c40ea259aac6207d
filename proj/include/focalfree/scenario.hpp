#pragma once

// Scenario files (INI), command execution and artifact writing for the
// command-line harness.
//
// Every artifact carries the hash of the scenario: CSV files start with a
// "# config_hash=<hex>" line followed by the header, JSON files have a
// "config_hash" field. The hash covers every setting except the seed and the
// output directory, so runs that differ only in seed stay comparable.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "focalfree/boundary.hpp"
#include "focalfree/cross_ratio.hpp"
#include "focalfree/ergodic.hpp"
#include "focalfree/flow.hpp"
#include "focalfree/measures.hpp"

namespace focalfree {

// Schema violations, one entry per offending key path ("metric.amplitude: ...").
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> problems);
  std::vector<std::string> problems;
};

struct Scenario {
  // [run]
  std::uint64_t seed = 1;
  std::string output = "out";
  std::vector<std::string> commands;  // used by `run`

  // [metric]
  double amplitude = 0.0;
  DiskPoint center{0.0, 0.0};
  double radius = 1.0;

  // [group]
  int L = 10;

  IntegratorConfig integrator;       // [integrator]
  BoundaryOptions boundary;          // [boundary]
  CertificationOptions certification;  // [certification], with its own seed

  // [geodesic]
  double geodesic_xi = 0.0, geodesic_eta = kPi;
  double geodesic_t_max = 5.0, geodesic_dt = 0.1;

  // [busemann]
  DiskPoint busemann_p{0.0, 0.0}, busemann_q{0.3, 0.0};
  double busemann_xi = 0.0;

  // [crossratio]
  double cr_xi = kPi, cr_eta = 0.0, cr_xi_prime = 1.5 * kPi, cr_eta_prime = 0.5 * kPi;
  CrossRatioOptions cross_ratio;

  EntropyOptions entropy;  // [entropy]
  PsOptions ps;            // [psmeasure]
  DiskPoint ps_base{0.0, 0.0};

  // [sampler]
  int samples = 1000;

  // [correlate]
  std::string observable_f = "angular_harmonic", observable_g = "angular_harmonic";
  std::vector<double> t_grid{0.0, 2.0, 4.0, 6.0, 8.0};
  int correlation_samples = 1000;

  // [birkhoff]
  std::string birkhoff_observable = "angular_harmonic";
  double birkhoff_T = 1000.0;
  double birkhoff_dt = 0.05;

  void validate() const;  // throws ConfigError
};

// Reads an INI file; unknown sections or keys and malformed values are all
// reported together in one ConfigError.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& ini_text);

// Canonical "section.key=value" listing of every hashed setting.
std::string canonical_text(const Scenario& s);
std::string config_hash(const Scenario& s);  // SHA-256 of canonical_text, lowercase hex
std::string sha256_hex(const std::string& bytes);

Observable observable_by_name(const std::string& name);

// Exact CSV headers.
inline constexpr const char* kGeodesicHeader = "t,x,y,angle";
inline constexpr const char* kPsMeasureHeader = "theta,weight";
inline constexpr const char* kMmeHeader = "x,y,angle,weight";
inline constexpr const char* kCorrelationHeader = "t,estimate,stderr,N,seed";

inline const std::vector<std::string> kCommands{"check-nofocal", "geodesic",   "busemann", "crossratio", "psmeasure",
                                                "entropy",       "mme-sample", "correlate", "birkhoff"};

struct StageError {
  std::string stage;
  std::string message;
};

struct RunReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  CertificationStatus certification;
  std::vector<std::string> artifacts;  // file names written, in order
  std::vector<StageError> errors;
  bool ok() const { return errors.empty(); }
};

// Certifies the metric, runs each command and writes its artifact plus
// metadata.json into `out`. Module errors are recorded with their stage and
// the remaining commands still run.
RunReport run_scenario(const Scenario& scenario, const std::vector<std::string>& commands,
                       const std::filesystem::path& out);
// Loads the file and runs its [run] commands into its [run] output directory.
RunReport run_scenario(const std::filesystem::path& config);

}  // namespace focalfree
