#pragma once

// Golden-data comparison of two artifact directories written by run_scenario.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace focalfree {

struct RegressOptions {
  // Numbers a, b match when |a - b| <= tol * max(1, |a|, |b|); tol = 0 compares
  // the printed text exactly.
  double default_tol = 1e-9;
  std::map<std::string, double> tolerances;  // per artifact file name
  bool force = false;                        // compare even when config hashes differ
};

struct RegressReport {
  bool structural_failure = false;   // missing artifacts, unreadable files, hash refusal
  std::vector<std::string> problems;    // structural issues
  std::vector<std::string> mismatches;  // "file:row:column: golden vs fresh"
  std::vector<std::string> compared;    // artifact names compared
  bool pass() const { return !structural_failure && mismatches.empty(); }
};

// metadata.json is used for the hash check only; its other fields record the
// run (seed, certification, stage errors) and are not compared.
RegressReport regress(const std::filesystem::path& golden, const std::filesystem::path& fresh,
                      const RegressOptions& options = {});

}  // namespace focalfree
