#include "focalfree/regress.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "json.hpp"

namespace focalfree {

namespace {

using nlohmann::json;

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::stringstream buffer;
  buffer << f.rdbuf();
  return buffer.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::optional<double> as_number(const std::string& s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

bool numbers_match(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Text cells compare exactly; numeric cells within tolerance unless tol = 0.
bool cells_match(const std::string& a, const std::string& b, double tol) {
  if (tol == 0.0 || a == b) return a == b;
  const auto x = as_number(a), y = as_number(b);
  return x && y && numbers_match(*x, *y, tol);
}

std::string csv_hash(const std::string& content) {
  const std::string prefix = "# config_hash=";
  if (content.rfind(prefix, 0) != 0) return "";
  return content.substr(prefix.size(), content.find('\n') - prefix.size());
}

void compare_csv(const std::string& name, const std::string& golden, const std::string& fresh, double tol,
                 RegressReport& report) {
  auto g = split(golden, '\n'), f = split(fresh, '\n');
  // Line 0 is the hash comment, line 1 the header.
  if (g.size() < 2 || f.size() < 2) {
    report.structural_failure = true;
    report.problems.push_back(name + ": missing hash or header line");
    return;
  }
  if (g[1] != f[1]) {
    report.structural_failure = true;
    report.problems.push_back(name + ": header '" + g[1] + "' vs '" + f[1] + "'");
    return;
  }
  const auto columns = split(g[1], ',');
  if (g.size() != f.size()) report.mismatches.push_back(fmt::format("{}: {} rows vs {}", name, g.size() - 2, f.size() - 2));
  for (std::size_t row = 2; row < std::min(g.size(), f.size()); ++row) {
    const auto a = split(g[row], ','), b = split(f[row], ',');
    if (a.size() != b.size()) {
      report.mismatches.push_back(fmt::format("{}:{}: {} cells vs {}", name, row - 1, a.size(), b.size()));
      continue;
    }
    for (std::size_t c = 0; c < a.size(); ++c)
      if (!cells_match(a[c], b[c], tol))
        report.mismatches.push_back(fmt::format("{}:{}:{}: {} vs {}", name, row - 1,
                                                c < columns.size() ? columns[c] : std::to_string(c), a[c], b[c]));
  }
}

void compare_json(const std::string& where, const json& a, const json& b, double tol, RegressReport& report) {
  if (a.is_number() && b.is_number()) {
    const bool same = tol == 0.0 ? a.dump() == b.dump() : numbers_match(a.get<double>(), b.get<double>(), tol);
    if (!same) report.mismatches.push_back(where + ": " + a.dump() + " vs " + b.dump());
    return;
  }
  if (a.type() != b.type()) {
    report.mismatches.push_back(where + ": " + a.dump() + " vs " + b.dump());
    return;
  }
  if (a.is_object()) {
    std::set<std::string> names;
    for (const auto& [k, v] : a.items()) names.insert(k);
    for (const auto& [k, v] : b.items()) names.insert(k);
    for (const auto& k : names) {
      if (k == "config_hash") continue;
      if (!a.contains(k) || !b.contains(k)) {
        report.mismatches.push_back(where + "." + k + ": present on one side only");
        continue;
      }
      compare_json(where + "." + k, a[k], b[k], tol, report);
    }
  } else if (a.is_array()) {
    if (a.size() != b.size()) {
      report.mismatches.push_back(fmt::format("{}: {} items vs {}", where, a.size(), b.size()));
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) compare_json(fmt::format("{}[{}]", where, i), a[i], b[i], tol, report);
  } else if (a != b) {
    report.mismatches.push_back(where + ": " + a.dump() + " vs " + b.dump());
  }
}

// Parsing would normalise number formatting, so exact mode compares lines.
void compare_json_text(const std::string& name, const std::string& golden, const std::string& fresh,
                       RegressReport& report) {
  auto keep = [](const std::string& text) {
    std::vector<std::string> lines;
    for (auto& line : split(text, '\n'))
      if (line.find("\"config_hash\"") == std::string::npos) lines.push_back(line);
    return lines;
  };
  const auto g = keep(golden), f = keep(fresh);
  if (g.size() != f.size()) report.mismatches.push_back(fmt::format("{}: {} lines vs {}", name, g.size(), f.size()));
  for (std::size_t i = 0; i < std::min(g.size(), f.size()); ++i)
    if (g[i] != f[i]) report.mismatches.push_back(fmt::format("{}: '{}' vs '{}'", name, g[i], f[i]));
}

std::set<std::string> artifacts_in(const std::filesystem::path& dir) {
  std::set<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && (ext == ".csv" || ext == ".json") && name != "metadata.json") out.insert(name);
  }
  return out;
}

std::string metadata_hash(const std::filesystem::path& dir) {
  const auto text = read_file(dir / "metadata.json");
  if (!text) return "";
  try {
    return json::parse(*text).value("config_hash", "");
  } catch (const json::exception&) {
    return "";
  }
}

}  // namespace

RegressReport regress(const std::filesystem::path& golden, const std::filesystem::path& fresh,
                      const RegressOptions& options) {
  RegressReport report;
  for (const auto& dir : {golden, fresh})
    if (!std::filesystem::is_directory(dir)) {
      report.structural_failure = true;
      report.problems.push_back(dir.string() + ": not a directory");
    }
  if (report.structural_failure) return report;

  const std::string hg = metadata_hash(golden), hf = metadata_hash(fresh);
  if (hg.empty() || hf.empty()) {
    report.structural_failure = true;
    report.problems.push_back("metadata.json with a config_hash is missing");
    return report;
  }
  if (hg != hf && !options.force) {
    report.structural_failure = true;
    report.problems.push_back("config hashes differ (" + hg + " vs " + hf + "); use force to compare anyway");
    return report;
  }

  const auto in_golden = artifacts_in(golden), in_fresh = artifacts_in(fresh);
  for (const auto& name : in_golden)
    if (!in_fresh.count(name)) {
      report.structural_failure = true;
      report.problems.push_back(name + ": missing from the fresh directory");
    }
  for (const auto& name : in_fresh)
    if (!in_golden.count(name)) {
      report.structural_failure = true;
      report.problems.push_back(name + ": not in the golden directory");
    }

  for (const auto& name : in_golden) {
    if (!in_fresh.count(name)) continue;
    const auto a = read_file(golden / name), b = read_file(fresh / name);
    if (!a || !b) {
      report.structural_failure = true;
      report.problems.push_back(name + ": unreadable");
      continue;
    }
    const auto it = options.tolerances.find(name);
    const double tol = it == options.tolerances.end() ? options.default_tol : it->second;
    report.compared.push_back(name);
    if (name.ends_with(".csv")) {
      if (!options.force && (csv_hash(*a) != hg || csv_hash(*b) != hf)) {
        report.structural_failure = true;
        report.problems.push_back(name + ": artifact hash does not match its metadata");
        continue;
      }
      compare_csv(name, *a, *b, tol, report);
    } else {
      try {
        const json ja = json::parse(*a), jb = json::parse(*b);
        if (!options.force && (ja.value("config_hash", "") != hg || jb.value("config_hash", "") != hf)) {
          report.structural_failure = true;
          report.problems.push_back(name + ": artifact hash does not match its metadata");
          continue;
        }
        if (tol == 0.0)
          compare_json_text(name, *a, *b, report);
        else
          compare_json(name, ja, jb, tol, report);
      } catch (const json::exception& e) {
        report.structural_failure = true;
        report.problems.push_back(name + ": " + e.what());
      }
    }
  }
  return report;
}

}  // namespace focalfree
