#include "focalfree/scenario.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <fmt/format.h>

#include "focalfree/cross_ratio.hpp"
#include "json.hpp"

namespace focalfree {

namespace {

using nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::optional<double> parse_double(const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> parse_int(const std::string& text) {
  const std::string s = trim(text);
  Int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string num(double v) { return fmt::format("{}", v); }

// One configurable setting: how to read it from text and how to print it.
struct Key {
  std::string path;  // section.key
  bool hashed = true;
  std::function<std::optional<std::string>(const std::string&)> set;  // error text or nullopt
  std::function<std::string()> get;
};

Key real(const std::string& path, double& field) {
  return {path, true,
          [&field](const std::string& v) -> std::optional<std::string> {
            const auto d = parse_double(v);
            if (!d) return "expected a number, got '" + v + "'";
            field = *d;
            return std::nullopt;
          },
          [&field] { return num(field); }};
}

Key integer(const std::string& path, int& field) {
  return {path, true,
          [&field](const std::string& v) -> std::optional<std::string> {
            const auto d = parse_int<int>(v);
            if (!d) return "expected an integer, got '" + v + "'";
            field = *d;
            return std::nullopt;
          },
          [&field] { return std::to_string(field); }};
}

Key text(const std::string& path, std::string& field) {
  return {path, true,
          [&field](const std::string& v) -> std::optional<std::string> {
            field = trim(v);
            return std::nullopt;
          },
          [&field] { return field; }};
}

std::vector<Key> keys(Scenario& s) {
  std::vector<Key> k{
      {"run.seed", false,
       [&s](const std::string& v) -> std::optional<std::string> {
         const auto d = parse_int<std::uint64_t>(v);
         if (!d) return "expected a nonnegative integer, got '" + v + "'";
         s.seed = *d;
         return std::nullopt;
       },
       [&s] { return std::to_string(s.seed); }},
      {"run.output", false,
       [&s](const std::string& v) -> std::optional<std::string> {
         s.output = trim(v);
         return std::nullopt;
       },
       [&s] { return s.output; }},
      {"run.commands", true,
       [&s](const std::string& v) -> std::optional<std::string> {
         s.commands = split_list(v);
         for (const auto& c : s.commands)
           if (std::find(kCommands.begin(), kCommands.end(), c) == kCommands.end()) return "unknown command '" + c + "'";
         return std::nullopt;
       },
       [&s] {
         std::string out;
         for (const auto& c : s.commands) out += (out.empty() ? "" : ",") + c;
         return out;
       }},
      real("metric.amplitude", s.amplitude),
      real("metric.center_x", s.center.x),
      real("metric.center_y", s.center.y),
      real("metric.radius", s.radius),
      integer("group.L", s.L),
      real("integrator.abs_tol", s.integrator.abs_tol),
      real("integrator.rel_tol", s.integrator.rel_tol),
      real("integrator.max_step", s.integrator.max_step),
      real("integrator.fixed_step", s.integrator.fixed_step),
      real("boundary.busemann_T", s.boundary.busemann_T),
      real("boundary.busemann_T_max", s.boundary.busemann_T_max),
      real("boundary.busemann_tol", s.boundary.busemann_tol),
      real("boundary.endpoint_cutoff", s.boundary.endpoint_cutoff),
      real("boundary.connect_tol", s.boundary.connect_tol),
      integer("certification.vectors", s.certification.n_vectors),
      real("certification.T", s.certification.T),
      integer("certification.samples", s.certification.n_samples),
      {"certification.seed", true,
       [&s](const std::string& v) -> std::optional<std::string> {
         const auto d = parse_int<std::uint64_t>(v);
         if (!d) return "expected a nonnegative integer, got '" + v + "'";
         s.certification.seed = *d;
         return std::nullopt;
       },
       [&s] { return std::to_string(s.certification.seed); }},
      real("geodesic.xi", s.geodesic_xi),
      real("geodesic.eta", s.geodesic_eta),
      real("geodesic.t_max", s.geodesic_t_max),
      real("geodesic.dt", s.geodesic_dt),
      real("busemann.p_x", s.busemann_p.x),
      real("busemann.p_y", s.busemann_p.y),
      real("busemann.q_x", s.busemann_q.x),
      real("busemann.q_y", s.busemann_q.y),
      real("busemann.xi", s.busemann_xi),
      real("crossratio.xi", s.cr_xi),
      real("crossratio.eta", s.cr_eta),
      real("crossratio.xi_prime", s.cr_xi_prime),
      real("crossratio.eta_prime", s.cr_eta_prime),
      real("crossratio.R", s.cross_ratio.R),
      real("crossratio.R_step", s.cross_ratio.R_step),
      real("crossratio.R_max", s.cross_ratio.R_max),
      real("crossratio.tol", s.cross_ratio.tol),
      real("entropy.r_lo", s.entropy.r_lo),
      real("entropy.r_hi", s.entropy.r_hi),
      real("entropy.r_step", s.entropy.r_step),
      real("psmeasure.p_x", s.ps_base.x),
      real("psmeasure.p_y", s.ps_base.y),
      real("psmeasure.r_out", s.ps.r_out),
      real("psmeasure.width", s.ps.width),
      real("psmeasure.s_offset", s.ps.s_offset),
      integer("sampler.n", s.samples),
      text("correlate.f", s.observable_f),
      text("correlate.g", s.observable_g),
      {"correlate.t_grid", true,
       [&s](const std::string& v) -> std::optional<std::string> {
         s.t_grid.clear();
         for (const auto& item : split_list(v)) {
           const auto d = parse_double(item);
           if (!d) return "expected a comma-separated list of numbers, got '" + v + "'";
           s.t_grid.push_back(*d);
         }
         return std::nullopt;
       },
       [&s] {
         std::string out;
         for (double t : s.t_grid) out += (out.empty() ? "" : ",") + num(t);
         return out;
       }},
      integer("correlate.n", s.correlation_samples),
      text("birkhoff.observable", s.birkhoff_observable),
      real("birkhoff.T", s.birkhoff_T),
      real("birkhoff.dt", s.birkhoff_dt),
  };
  return k;
}

void require(std::vector<std::string>& problems, bool ok, const std::string& path, const std::string& what) {
  if (!ok) problems.push_back(path + ": " + what);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& i : items) out += (out.empty() ? "" : "; ") + i;
  return out;
}

// Writes through one stream so every artifact ends up with LF line endings.
void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

std::string csv(const std::string& hash, const char* header, const std::vector<std::vector<std::string>>& rows) {
  std::string out = "# config_hash=" + hash + "\n" + header + "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

ordered_json json_number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

// Lazily built pieces shared between commands in one run.
class Workspace {
 public:
  Workspace(const Scenario& s, ConformalMetric metric) : s_(s), metric_(std::move(metric)) {}

  const ConformalMetric& metric() const { return metric_; }

  const EntropyEstimate& entropy() {
    if (!entropy_) entropy_ = critical_exponent(metric_, s_.ps.q, s_.L, s_.entropy, s_.integrator);
    return *entropy_;
  }
  const AtomicBoundaryMeasure& measure() {
    if (!measure_) {
      const double h = entropy().h;
      measure_ = ps_measure(metric_, s_.ps_base, s_.L, h + s_.ps.s_offset, h, s_.ps, s_.integrator);
    }
    return *measure_;
  }
  SamplerOptions sampler() const { return {}; }

 private:
  const Scenario& s_;
  ConformalMetric metric_;
  std::optional<EntropyEstimate> entropy_;
  std::optional<AtomicBoundaryMeasure> measure_;
};

// Returns the artifact file name and its content.
std::pair<std::string, std::string> run_command(const std::string& command, const Scenario& s, Workspace& ws,
                                                const RunReport& report) {
  const std::string& hash = report.config_hash;
  const ConformalMetric& m = ws.metric();
  auto json_artifact = [&](ordered_json j) {
    ordered_json out{{"config_hash", hash}};
    out.update(j);
    return out.dump(2) + "\n";
  };

  if (command == "check-nofocal") {
    const auto& c = report.certification;
    return {"nofocal.json", json_artifact({{"certified_no_focal", c.certified},
                                           {"witness_time", c.witness_time ? json_number(*c.witness_time) : nullptr},
                                           {"vectors_checked", c.vectors_checked},
                                           {"T", s.certification.T}})};
  }
  if (command == "geodesic") {
    const Geodesic g = connect(m, BoundaryPoint{s.geodesic_xi}, BoundaryPoint{s.geodesic_eta}, s.boundary, s.integrator);
    std::vector<std::vector<std::string>> rows;
    const int n = static_cast<int>(std::floor(s.geodesic_t_max / s.geodesic_dt + 1e-9));
    for (int i = -n; i <= n; ++i) {
      const double t = i * s.geodesic_dt;
      const UnitTangent v = g.at(t).resolve();
      rows.push_back({num(t), num(v.base.x), num(v.base.y), num(v.angle)});
    }
    return {"geodesic.csv", csv(hash, kGeodesicHeader, rows)};
  }
  if (command == "busemann") {
    const double b = busemann(m, s.busemann_p, s.busemann_q, BoundaryPoint{s.busemann_xi}, s.boundary, s.integrator);
    return {"busemann.json", json_artifact({{"p", {s.busemann_p.x, s.busemann_p.y}},
                                            {"q", {s.busemann_q.x, s.busemann_q.y}},
                                            {"xi", s.busemann_xi},
                                            {"value", b}})};
  }
  if (command == "crossratio") {
    const Quadrilateral q = make_quadrilateral(m, BoundaryPoint{s.cr_xi}, BoundaryPoint{s.cr_eta},
                                               BoundaryPoint{s.cr_xi_prime}, BoundaryPoint{s.cr_eta_prime}, s.boundary,
                                               s.integrator);
    const CrossRatioReport r = cross_ratio_all(m, q, s.cross_ratio, s.boundary, s.integrator);
    return {"crossratio.json",
            json_artifact({{"points", {s.cr_xi, s.cr_eta, s.cr_xi_prime, s.cr_eta_prime}},
                           {"limit", r.limit},
                           {"horospheres", r.horospheres},
                           {"holonomy", r.holonomy},
                           {"spread", r.spread()}})};
  }
  if (command == "entropy") {
    const auto& e = ws.entropy();
    return {"entropy.json", json_artifact({{"h", e.h},
                                           {"residual", e.residual},
                                           {"points", e.points},
                                           {"L", s.L},
                                           {"r_lo", s.entropy.r_lo},
                                           {"r_hi", s.entropy.r_hi}})};
  }
  if (command == "psmeasure") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& a : ws.measure().atoms) rows.push_back({num(a.xi.theta), num(a.weight)});
    return {"psmeasure.csv", csv(hash, kPsMeasureHeader, rows)};
  }
  if (command == "mme-sample") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& x : sample_mme(m, ws.measure(), s.samples, s.seed, ws.sampler(), s.integrator))
      rows.push_back({num(x.tangent.base.x), num(x.tangent.base.y), num(x.tangent.angle), num(x.source.weight)});
    return {"mme.csv", csv(hash, kMmeHeader, rows)};
  }
  if (command == "correlate") {
    CorrelationOptions o;
    o.integrator = s.integrator;
    const auto series = mixing_curve(m, observable_by_name(s.observable_f), observable_by_name(s.observable_g),
                                     s.t_grid, ws.measure(), s.correlation_samples, s.seed, o, ws.sampler());
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < series.t_grid.size(); ++i)
      rows.push_back({num(series.t_grid[i]), num(series.estimates[i].estimate), num(series.estimates[i].stderr_),
                      std::to_string(series.N), std::to_string(series.seed)});
    return {"correlation.csv", csv(hash, kCorrelationHeader, rows)};
  }
  if (command == "birkhoff") {
    // Start from a maximal-entropy sample: Birkhoff averages converge to the
    // space average for almost every start of that measure.
    const auto start = sample_mme(m, ws.measure(), 1, s.seed, ws.sampler(), s.integrator).front();
    BirkhoffOptions o;
    o.dt = s.birkhoff_dt;
    o.integrator = s.integrator;
    const Observable f = observable_by_name(s.birkhoff_observable);
    const BirkhoffResult r = birkhoff_average(m, f, start.tangent, s.birkhoff_T, o);
    return {"birkhoff.json", json_artifact({{"observable", f.name},
                                            {"start", {start.tangent.base.x, start.tangent.base.y, start.tangent.angle}},
                                            {"T", r.T},
                                            {"average", r.average},
                                            {"stderr", r.stderr_}})};
  }
  throw DomainError("unknown command '" + command + "'");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> p) : std::runtime_error(join(p)), problems(std::move(p)) {}

void Scenario::validate() const {
  std::vector<std::string> p;
  require(p, amplitude >= 0.0, "metric.amplitude", "must be >= 0");
  require(p, radius > 0.0, "metric.radius", "must be > 0");
  require(p, center.valid(), "metric.center_x", "center must lie in the open disk");
  require(p, L >= 0 && L <= orbit_group().options().max_word_length, "group.L",
          "must be in [0, " + std::to_string(orbit_group().options().max_word_length) + "]");
  require(p, integrator.abs_tol > 0.0, "integrator.abs_tol", "must be > 0");
  require(p, integrator.rel_tol > 0.0, "integrator.rel_tol", "must be > 0");
  require(p, integrator.max_step > 0.0, "integrator.max_step", "must be > 0");
  require(p, integrator.fixed_step > 0.0, "integrator.fixed_step", "must be > 0");
  require(p, boundary.busemann_T > 0.0, "boundary.busemann_T", "must be > 0");
  require(p, boundary.busemann_T_max >= boundary.busemann_T, "boundary.busemann_T_max", "must be >= busemann_T");
  require(p, boundary.busemann_tol > 0.0, "boundary.busemann_tol", "must be > 0");
  require(p, boundary.endpoint_cutoff > 0.0 && boundary.endpoint_cutoff < 1.0, "boundary.endpoint_cutoff",
          "must be in (0, 1)");
  require(p, boundary.connect_tol > 0.0, "boundary.connect_tol", "must be > 0");
  require(p, certification.n_vectors > 0, "certification.vectors", "must be > 0");
  require(p, certification.T > 0.0, "certification.T", "must be > 0");
  require(p, certification.n_samples > 0, "certification.samples", "must be > 0");
  require(p, geodesic_t_max > 0.0, "geodesic.t_max", "must be > 0");
  require(p, geodesic_dt > 0.0, "geodesic.dt", "must be > 0");
  require(p, busemann_p.valid(), "busemann.p_x", "p must lie in the open disk");
  require(p, busemann_q.valid(), "busemann.q_x", "q must lie in the open disk");
  require(p, cross_ratio.R > 0.0, "crossratio.R", "must be > 0");
  require(p, cross_ratio.R_step > 0.0, "crossratio.R_step", "must be > 0");
  require(p, cross_ratio.R_max >= cross_ratio.R, "crossratio.R_max", "must be >= R");
  require(p, cross_ratio.tol > 0.0, "crossratio.tol", "must be > 0");
  require(p, entropy.r_lo > 0.0, "entropy.r_lo", "must be > 0");
  require(p, entropy.r_hi > entropy.r_lo, "entropy.r_hi", "must be > r_lo");
  require(p, entropy.r_step > 0.0, "entropy.r_step", "must be > 0");
  require(p, ps_base.valid(), "psmeasure.p_x", "p must lie in the open disk");
  require(p, ps.width > 0.0, "psmeasure.width", "must be > 0");
  require(p, ps.r_out > ps.width, "psmeasure.r_out", "must exceed width");
  require(p, ps.s_offset > 0.0, "psmeasure.s_offset", "must be > 0");
  require(p, samples > 0, "sampler.n", "must be > 0");
  require(p, correlation_samples >= 100, "correlate.n", "must be >= 100");
  require(p, !t_grid.empty(), "correlate.t_grid", "must not be empty");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) {
      p.push_back("correlate.t_grid: must be strictly increasing");
      break;
    }
  for (const auto& [path, name] : {std::pair{"correlate.f", observable_f}, std::pair{"correlate.g", observable_g},
                                   std::pair{"birkhoff.observable", birkhoff_observable}}) {
    try {
      observable_by_name(name);
    } catch (const DomainError& e) {
      p.push_back(std::string(path) + ": " + e.what());
    }
  }
  require(p, birkhoff_T > 0.0, "birkhoff.T", "must be > 0");
  require(p, birkhoff_dt > 0.0, "birkhoff.dt", "must be > 0");
  if (!p.empty()) throw ConfigError(p);
}

Scenario parse_scenario(const std::string& ini_text) {
  boost::property_tree::ptree tree;
  std::istringstream in(ini_text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError({"line " + std::to_string(e.line()) + ": " + e.message()});
  }
  Scenario s;
  auto table = keys(s);
  std::map<std::string, Key*> by_path;
  std::set<std::string> sections;
  for (auto& k : table) {
    by_path[k.path] = &k;
    sections.insert(k.path.substr(0, k.path.find('.')));
  }
  std::vector<std::string> problems;
  for (const auto& [section, body] : tree) {
    if (!sections.count(section)) {
      problems.push_back(section + ": unknown section");
      continue;
    }
    if (!body.data().empty()) {
      problems.push_back(section + ": keys must sit inside a section");
      continue;
    }
    for (const auto& [key, value] : body) {
      const std::string path = section + "." + key;
      const auto it = by_path.find(path);
      if (it == by_path.end()) {
        problems.push_back(path + ": unknown key");
        continue;
      }
      if (const auto err = it->second->set(value.data())) problems.push_back(path + ": " + *err);
    }
  }
  // Range checks run too; unparsable fields keep their valid defaults.
  try {
    s.validate();
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.problems.begin(), e.problems.end());
  }
  if (!problems.empty()) throw ConfigError(problems);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError({path.string() + ": cannot open"});
  std::stringstream buffer;
  buffer << f.rdbuf();
  return parse_scenario(buffer.str());
}

std::string canonical_text(const Scenario& s) {
  Scenario copy = s;
  std::string out;
  for (const auto& k : keys(copy))
    if (k.hashed) out += k.path + "=" + k.get() + "\n";
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string config_hash(const Scenario& s) { return sha256_hex(canonical_text(s)); }

Observable observable_by_name(const std::string& name) {
  if (name == "angular_harmonic") return angular_harmonic();
  if (name == "disk_indicator") return disk_indicator();
  if (name == "constant") return constant_observable(1.0);
  throw DomainError("unknown observable '" + name + "' (angular_harmonic, disk_indicator, constant)");
}

RunReport run_scenario(const Scenario& scenario, const std::vector<std::string>& commands,
                       const std::filesystem::path& out) {
  scenario.validate();
  for (const auto& c : commands)
    if (std::find(kCommands.begin(), kCommands.end(), c) == kCommands.end())
      throw ConfigError({"run.commands: unknown command '" + c + "'"});
  std::filesystem::create_directories(out);

  RunReport report;
  report.config_hash = config_hash(scenario);
  report.seed = scenario.seed;
  const ConformalMetric base =
      scenario.amplitude == 0.0 ? ConformalMetric::hyperbolic()
                                : ConformalMetric::bump(scenario.amplitude, scenario.center, scenario.radius);
  try {
    report.certification = certify_no_focal(base, scenario.certification, scenario.integrator);
  } catch (const std::exception& e) {
    report.certification = {false, std::nullopt, 0};
    report.errors.push_back({"certification", e.what()});
  }
  Workspace ws(scenario, base.with_certification(report.certification));

  for (const auto& command : commands) {
    try {
      const auto [name, content] = run_command(command, scenario, ws, report);
      write_file(out / name, content);
      report.artifacts.push_back(name);
    } catch (const std::exception& e) {
      report.errors.push_back({command, e.what()});
    }
  }

  ordered_json errors = ordered_json::array();
  for (const auto& e : report.errors) errors.push_back({{"stage", e.stage}, {"message", e.message}});
  const auto& c = report.certification;
  ordered_json meta{{"config_hash", report.config_hash},
                    {"seed", report.seed},
                    {"certified_no_focal", c.certified},
                    {"witness_time", c.witness_time ? json_number(*c.witness_time) : nullptr},
                    {"vectors_checked", c.vectors_checked},
                    {"s_offset", scenario.ps.s_offset},
                    {"commands", commands},
                    {"artifacts", report.artifacts},
                    {"errors", errors}};
  write_file(out / "metadata.json", meta.dump(2) + "\n");
  return report;
}

RunReport run_scenario(const std::filesystem::path& config) {
  const Scenario s = load_scenario(config);
  std::filesystem::path out = s.output;
  if (out.is_relative()) out = config.parent_path() / out;
  return run_scenario(s, s.commands, out);
}

}  // namespace focalfree
