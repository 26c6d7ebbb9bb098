#include "sqg/cli_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "sqg/errors.hpp"
#include "sqg/io.hpp"
#include "sqg/spectral_ops.hpp"

#ifndef SQG_VERSION
#define SQG_VERSION "unknown"
#endif

namespace sqg::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "local_existence",  "small_data_global",      "subcritical_global", "inviscid_local",
      "linear_advection", "retarded_mollification", "picard_inviscid",    "verify_suite"};
  return names;
}

std::string to_string(Preset p) { return preset_names()[static_cast<std::size_t>(p)]; }

Preset parse_preset(const std::string& name) {
  const auto& names = preset_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("preset: unknown preset '" + name + "' (expected one of " + list + ")");
  }
  return static_cast<Preset>(it - names.begin());
}

bool requires_completion(Preset p) {
  switch (p) {
    case Preset::local_existence:
    case Preset::small_data_global:
    case Preset::subcritical_global:
    case Preset::linear_advection:
    case Preset::retarded_mollification:
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

json default_config() {
  return json{
      {"schema_version", kConfigSchemaVersion},
      {"Lx", kPi},
      {"Ly", kPi},
      {"J", 8},
      {"Nquad", 0},  // 0 selects 2J+2
      {"alpha", 0.5},
      {"kappa", 1.0},
      {"dt", 1e-3},
      {"T", 1.0},
      {"scheme", "etdrk2"},
      {"snapshot_stride", 10},
      {"seed", 0},
      {"lr", json::array({4.0})},
      {"nonlinearity", "pseudo_spectral"},
      {"gamma_cache", ""},
      {"init", "random"},
      {"init_j", 1},
      {"init_k", 1},
      {"init_decay", 2.0},
      {"init_norm", 1.0},
      {"init_path", ""},
      {"delta", 0.1},
      {"kappa_visc", 0.05},
      {"tol", 1e-10},
      {"max_iter", 10},
      {"proxy_p", 4.0},
      {"M", kCalibratedLocalExistenceConstant},
      {"C", kCalibratedSmallDataConstant},
      {"smallness_fraction", 0.5},
      {"velocity", "frozen_initial"},
      {"suite", "default"},
      {"plots", true},
      {"write_snapshots", true},
  };
}

json preset_overrides(Preset p) {
  switch (p) {
    case Preset::local_existence: return json{{"init_norm", 1000.0}};
    case Preset::small_data_global: return json{{"T", 10.0}, {"snapshot_stride", 100}};
    case Preset::subcritical_global: return json{{"alpha", 0.75}, {"T", 10.0}, {"init_norm", 5.0}, {"snapshot_stride", 100}};
    case Preset::inviscid_local: return json{{"kappa", 0.0}, {"scheme", "rk4_fully_explicit"}};
    case Preset::linear_advection: return json::object();
    case Preset::retarded_mollification: return json{{"delta", 0.1}};
    case Preset::picard_inviscid: return json{{"T", 0.1}, {"init_norm", 0.1}, {"kappa", 0.0}};
    case Preset::verify_suite: return json{{"plots", false}, {"write_snapshots", false}};
  }
  return json::object();
}

namespace {

void merge_key(json& target, const std::string& key, const json& value) {
  if (!target.contains(key)) throw ConfigError("unknown configuration key '" + key + "'");
  const json& current = target[key];
  json v = value;
  auto mismatch = [&](const char* expected) {
    return ConfigError(key + ": expected " + std::string(expected) + ", got " + value.dump());
  };
  if (current.is_number_float()) {
    if (!v.is_number()) throw mismatch("a number");
    v = v.get<double>();
  } else if (current.is_number_integer()) {
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d != std::floor(d) || std::abs(d) > 9e15) throw mismatch("an integer");
      v = static_cast<std::int64_t>(d);
    }
    if (!v.is_number_integer()) throw mismatch("an integer");
  } else if (current.is_string()) {
    if (!v.is_string()) throw mismatch("a string");
  } else if (current.is_boolean()) {
    if (!v.is_boolean()) throw mismatch("true or false");
  } else if (current.is_array()) {
    if (v.is_number()) v = json::array({v});
    if (!v.is_array()) throw mismatch("a list of numbers");
    for (const json& e : v) {
      if (!e.is_number()) throw mismatch("a list of numbers");
    }
  }
  target[key] = std::move(v);
}

void merge_object(json& target, const json& overrides, const std::string& source) {
  if (!overrides.is_object()) throw ConfigError(source + ": configuration must be a JSON object");
  for (const auto& [key, value] : overrides.items()) merge_key(target, key, value);
}

template <typename F>
void check(bool ok, const std::string& key, F&& message) {
  if (!ok) throw ConfigError(key + ": " + message());
}

double num(const json& c, const char* key) { return c.at(key).get<double>(); }
std::int64_t integer(const json& c, const char* key) { return c.at(key).get<std::int64_t>(); }
std::string str(const json& c, const char* key) { return c.at(key).get<std::string>(); }

void require_one_of(const json& c, const char* key, std::initializer_list<const char*> allowed) {
  const std::string v = str(c, key);
  for (const char* a : allowed) {
    if (v == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ConfigError(std::string(key) + ": '" + v + "' is not one of " + list);
}

SolverConfig build_solver(json& c) {
  if (integer(c, "schema_version") != kConfigSchemaVersion) {
    throw ConfigError("schema_version: unsupported version " + c.at("schema_version").dump());
  }
  const std::int64_t modes = integer(c, "J");
  check(modes >= 1 && modes <= 256, "J", [&] { return "must lie in [1,256], got " + std::to_string(modes); });
  std::int64_t quad = integer(c, "Nquad");
  if (quad == 0) quad = 2 * modes + 2;
  c["Nquad"] = quad;

  SolverConfig s;
  s.domain.lx = num(c, "Lx");
  s.domain.ly = num(c, "Ly");
  s.domain.modes = static_cast<int>(modes);
  s.domain.quad = static_cast<int>(std::min<std::int64_t>(quad, 1 << 20));
  s.alpha = num(c, "alpha");
  s.kappa = num(c, "kappa");
  s.dt = num(c, "dt");
  s.T = num(c, "T");
  s.scheme = parse_scheme(str(c, "scheme"));
  s.snapshot_stride = static_cast<int>(std::clamp<std::int64_t>(integer(c, "snapshot_stride"), -1, 1 << 30));
  const std::int64_t seed = integer(c, "seed");
  check(seed >= 0, "seed", [] { return "must be >= 0"; });
  s.seed = static_cast<std::uint64_t>(seed);
  s.lr = c.at("lr").get<std::vector<double>>();
  require_one_of(c, "nonlinearity", {"pseudo_spectral", "gamma", "off"});
  s.nonlinear = str(c, "nonlinearity") != "off";
  if (str(c, "nonlinearity") == "gamma") s.path = NonlinearPath::gamma;
  s.domain.validate();
  if (s.path == NonlinearPath::gamma) {
    const BasisPtr basis = build_basis(s.domain);
    const std::string cache = str(c, "gamma_cache");
    s.gamma = std::make_shared<const GammaTensor>(cache.empty() ? gamma_tensor(basis) : load_gamma(cache, basis));
  }
  s.validate();
  return s;
}

void validate_experiment_keys(const json& c, int modes) {
  require_one_of(c, "init", {"random", "mode", "zero", "snapshot"});
  const std::int64_t ij = integer(c, "init_j");
  const std::int64_t ik = integer(c, "init_k");
  check(ij >= 1 && ij <= modes, "init_j", [&] { return "must lie in [1,J], got " + std::to_string(ij); });
  check(ik >= 1 && ik <= modes, "init_k", [&] { return "must lie in [1,J], got " + std::to_string(ik); });
  check(num(c, "init_decay") >= 0.0, "init_decay", [] { return "must be >= 0"; });
  check(num(c, "init_norm") >= 0.0, "init_norm", [] { return "must be >= 0"; });
  check(num(c, "delta") > 0.0, "delta", [] { return "must be > 0"; });
  check(num(c, "kappa_visc") > 0.0, "kappa_visc", [] { return "must be > 0"; });
  check(num(c, "tol") > 0.0, "tol", [] { return "must be > 0"; });
  check(integer(c, "max_iter") >= 1, "max_iter", [] { return "must be >= 1"; });
  check(num(c, "proxy_p") >= 1.0, "proxy_p", [] { return "must be >= 1"; });
  check(num(c, "M") > 0.0, "M", [] { return "must be > 0"; });
  check(num(c, "C") > 0.0, "C", [] { return "must be > 0"; });
  const double frac = num(c, "smallness_fraction");
  check(frac > 0.0 && frac < 1.0, "smallness_fraction", [] { return "must lie in (0,1)"; });
  require_one_of(c, "velocity", {"zero", "frozen_initial"});
  const std::string suite = str(c, "suite");
  const auto& suites = suite_names();
  check(std::find(suites.begin(), suites.end(), suite) != suites.end(), "suite",
        [&] { return "unknown suite '" + suite + "'"; });
}

json parse_set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set: expected key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  return json{{key, value}};
}

}  // namespace

ExperimentConfig resolve_config(Preset preset, const json& overrides) {
  json c = default_config();
  merge_object(c, preset_overrides(preset), "preset");
  merge_object(c, overrides, "config");
  ExperimentConfig out;
  out.preset = preset;
  out.solver = build_solver(c);
  validate_experiment_keys(c, out.solver.domain.modes);
  out.resolved = std::move(c);
  return out;
}

json collect_overrides(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& sets) {
  json overrides = json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("config: cannot open " + path->string());
    json file = json::parse(in, nullptr, false);
    if (file.is_discarded()) throw ConfigError("config: " + path->string() + " is not valid JSON");
    if (!file.is_object()) throw ConfigError("config: " + path->string() + " must hold a JSON object");
    for (const auto& [k, v] : file.items()) overrides[k] = v;
  }
  for (const std::string& s : sets) {
    const json one = parse_set(s);
    for (const auto& [k, v] : one.items()) overrides[k] = v;
  }
  return overrides;
}

ExperimentConfig parse_config(Preset preset, const std::optional<std::filesystem::path>& path,
                              const std::vector<std::string>& sets) {
  ExperimentConfig cfg = resolve_config(preset, collect_overrides(path, sets));
  cfg.config_path = path;
  return cfg;
}

std::string config_hash(const json& resolved) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : resolved.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string code_version() { return SQG_VERSION; }

SpectralField initial_data(const ExperimentConfig& cfg) {
  const json& c = cfg.resolved;
  const BasisPtr basis = build_basis(cfg.solver.domain);
  const std::string kind = str(c, "init");
  SpectralField theta(basis);
  if (kind == "zero") return theta;
  if (kind == "random") {
    std::mt19937_64 rng(cfg.solver.seed);
    theta = random_field(basis, rng, num(c, "init_decay"));
  } else if (kind == "mode") {
    const Mode m{static_cast<int>(integer(c, "init_j")), static_cast<int>(integer(c, "init_k"))};
    theta = SpectralField::unit(basis, static_cast<std::size_t>(basis->index_of(m)));
  } else {
    const io::Snapshot snap = io::read_snapshot(str(c, "init_path"));
    if (snap.modes != cfg.solver.domain.modes || snap.lx != cfg.solver.domain.lx || snap.ly != cfg.solver.domain.ly) {
      throw ConfigError("init_path: snapshot was written for a different domain");
    }
    theta = SpectralField(basis, snap.coeffs);
  }
  double target = num(c, "init_norm");
  if (cfg.preset == Preset::small_data_global) {
    target = num(c, "smallness_fraction") * cfg.solver.kappa / num(c, "C");
  }
  if (target > 0.0 && !theta.is_zero()) theta = with_sobolev_norm(std::move(theta), 2.0, target);
  return theta;
}

// ---------------------------------------------------------------------------
// Manifest and output directory
// ---------------------------------------------------------------------------

json RunManifest::to_json() const {
  json j{{"preset", preset},
         {"config", config},
         {"config_hash", config_hash},
         {"code_version", code_version},
         {"seed", seed},
         {"config_path", config_path},
         {"output_dir", output_dir},
         {"artifacts", artifacts},
         {"wall_clock_seconds", wall_clock_seconds},
         {"outcome", outcome},
         {"summary", summary}};
  j["blow_up_time"] = blow_up_time ? json(*blow_up_time) : json(nullptr);
  return j;
}

std::filesystem::path default_output_dir(const ExperimentConfig& cfg) {
  const char* root = std::getenv(kOutputRootEnv);
  const std::filesystem::path base = root && *root ? std::filesystem::path(root) : std::filesystem::path("sqg_output");
  return base / (to_string(cfg.preset) + "-" + config_hash(cfg.resolved).substr(0, 8));
}

OutputLock::OutputLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::FILE* f = std::fopen(path_.c_str(), "wx");
  if (!f) throw IoError("output directory " + dir.string() + " is locked by another run (" + path_.string() + ")");
  std::fprintf(f, "%s\n", code_version().c_str());
  std::fclose(f);
}

OutputLock::~OutputLock() {
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

namespace {

double max_h2(const std::vector<DiagnosticsRow>& rows) {
  double m = 0.0;
  for (const DiagnosticsRow& r : rows) m = std::max(m, r.h2);
  return m;
}

double linf_l2_distance(const Trajectory& a, const Trajectory& b) {
  double d = 0.0;
  const std::size_t n = std::min(a.snapshots.size(), b.snapshots.size());
  for (std::size_t i = 0; i < n; ++i) d = std::max(d, sobolev_norm(a.snapshots[i] - b.snapshots[i], 0.0));
  return d;
}

class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, RunManifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {}

  std::filesystem::path path(const std::string& relative) {
    manifest_.artifacts.push_back(relative);
    return dir_ / relative;
  }

  void rows(const ExperimentConfig& cfg, const std::vector<DiagnosticsRow>& rows) {
    io::write_diagnostics_csv(path("diagnostics.csv"), rows, cfg.solver.lr);
    if (cfg.resolved.at("plots").get<bool>()) io::write_norm_plot(path("norms.svg"), rows, to_string(cfg.preset));
  }

  void snapshots(const ExperimentConfig& cfg, const Trajectory& traj, double alpha, double kappa) {
    if (!cfg.resolved.at("write_snapshots").get<bool>()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir_ / "snapshots", ec);
    if (ec) throw IoError("cannot create " + (dir_ / "snapshots").string());
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
      char name[48];
      std::snprintf(name, sizeof name, "snapshots/snap_%06zu.bin", i);
      io::write_snapshot(path(name), traj.snapshots[i], alpha, kappa, traj.times[i]);
    }
  }

 private:
  std::filesystem::path dir_;
  RunManifest& manifest_;
};

void record_run(const ExperimentConfig& cfg, const RunResult& r, ArtifactWriter& out, RunManifest& m) {
  out.rows(cfg, r.rows);
  out.snapshots(cfg, r.trajectory, cfg.solver.alpha, cfg.solver.kappa);
  if (r.blow_up) {
    m.outcome = "blow_up";
    m.blow_up_time = r.blow_up->time;
    m.summary["blow_up_reason"] = r.blow_up->reason;
  }
  if (!r.rows.empty()) {
    m.summary["final_time"] = r.rows.back().t;
    m.summary["initial_H2"] = r.rows.front().h2;
    m.summary["max_H2"] = max_h2(r.rows);
    m.summary["final_L2"] = r.rows.back().l2;
  }
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& output_dir) {
  const auto start = std::chrono::steady_clock::now();
  OutputLock lock(output_dir);
  RunManifest m;
  m.preset = to_string(cfg.preset);
  m.config = cfg.resolved;
  m.config_hash = config_hash(cfg.resolved);
  m.code_version = code_version();
  m.seed = cfg.solver.seed;
  m.config_path = cfg.config_path ? cfg.config_path->string() : "";
  m.output_dir = output_dir.string();
  ArtifactWriter out(output_dir, m);
  const json& c = cfg.resolved;

  switch (cfg.preset) {
    case Preset::local_existence: {
      const SpectralField theta0 = initial_data(cfg);
      if (theta0.is_zero()) throw ConfigError("init: the zero datum has no local existence window");
      SolverConfig s = cfg.solver;
      s.T = local_existence_time(theta0, s.kappa, num(c, "M"));
      if (s.dt > s.T) throw ConfigError("dt: exceeds the local existence window " + std::to_string(s.T));
      const RunResult r = run(theta0, s);
      record_run(cfg, r, out, m);
      const double h0 = sobolev_norm(theta0, 2.0);
      const double peak = max_h2(r.rows);
      m.summary["local_existence_time"] = s.T;
      m.summary["M"] = num(c, "M");
      m.summary["max_H2_sq_ratio"] = peak * peak / (h0 * h0);
      m.summary["within_doubling_bound"] = peak * peak <= 2.0 * h0 * h0;
      break;
    }
    case Preset::small_data_global: {
      const SpectralField theta0 = initial_data(cfg);
      const RunResult r = run(theta0, cfg.solver);
      record_run(cfg, r, out, m);
      const double h0 = sobolev_norm(theta0, 2.0);
      m.summary["C"] = num(c, "C");
      m.summary["kappa"] = cfg.solver.kappa;
      m.summary["smallness_margin"] = smallness_margin(theta0, cfg.solver.kappa, num(c, "C"));
      if (h0 > 0.0) {
        m.summary["max_H2_ratio"] = max_h2(r.rows) / h0;
        m.summary["bounded_by_initial"] = max_h2(r.rows) <= (1.0 + 1e-6) * h0;
      }
      break;
    }
    case Preset::subcritical_global:
    case Preset::inviscid_local: {
      const SpectralField theta0 = initial_data(cfg);
      const RunResult r = run(theta0, cfg.solver);
      record_run(cfg, r, out, m);
      if (!r.rows.empty() && r.rows.front().l2 > 0.0) {
        double drift = 0.0;
        for (const DiagnosticsRow& row : r.rows) drift = std::max(drift, std::abs(row.l2 - r.rows.front().l2));
        m.summary["max_relative_L2_drift"] = drift / r.rows.front().l2;
      }
      break;
    }
    case Preset::linear_advection: {
      const SpectralField theta0 = initial_data(cfg);
      const VelocityField u =
          str(c, "velocity") == "zero" ? velocity(SpectralField(theta0.basis())) : velocity(theta0);
      const LinearAdvectionResult r = solve_linear_advection([u](double) { return u; }, theta0, cfg.solver);
      record_run(cfg, r.run, out, m);
      m.summary["velocity"] = str(c, "velocity");
      m.summary["growth_ratio"] = r.growth_ratio;
      m.summary["u_B_integral"] = r.u_b_integral.empty() ? 0.0 : r.u_b_integral.back();
      break;
    }
    case Preset::retarded_mollification: {
      const SpectralField theta0 = initial_data(cfg);
      const double delta = num(c, "delta");
      const RunResult r = run_retarded_mollification(theta0, delta, cfg.solver);
      record_run(cfg, r, out, m);
      m.summary["delta"] = delta;
      if (r.completed()) {
        const RunResult direct = run(theta0, cfg.solver);
        if (direct.completed()) {
          m.summary["linf_l2_difference_to_direct"] = linf_l2_distance(r.trajectory, direct.trajectory);
        }
      }
      break;
    }
    case Preset::picard_inviscid: {
      const SpectralField theta0 = initial_data(cfg);
      PicardOptions opts;
      opts.kappa_visc = num(c, "kappa_visc");
      opts.tol = num(c, "tol");
      opts.max_iter = static_cast<int>(integer(c, "max_iter"));
      opts.proxy_p = num(c, "proxy_p");
      const PicardResult r = run_picard_inviscid(theta0, opts, cfg.solver);
      out.rows(cfg, r.rows);
      out.snapshots(cfg, r.trajectory, 1.0, opts.kappa_visc);
      std::string csv = "iterate,residual,w2p_proxy\n";
      for (std::size_t n = 0; n < r.w2p_proxy.size(); ++n) {
        char line[96];
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", n, n == 0 ? 0.0 : r.residuals[n - 1], r.w2p_proxy[n]);
        csv += line;
      }
      io::write_text(out.path("picard.csv"), csv);
      m.outcome = r.converged ? "completed" : "iteration_failure";
      m.summary["converged"] = r.converged;
      m.summary["iterations"] = r.iterations;
      m.summary["residuals"] = r.residuals;
      break;
    }
    case Preset::verify_suite: {
      const std::vector<InequalityReport> reports = run_verify(str(c, "suite"), VerifyOptions{false, cfg.solver.seed});
      io::write_text(out.path("reports.jsonl"), io::format_reports(reports));
      const auto passed = std::count_if(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
      m.summary["reports"] = reports.size();
      m.summary["passed"] = passed;
      m.summary["all_pass"] = static_cast<std::size_t>(passed) == reports.size();
      break;
    }
  }

  m.artifacts.push_back("manifest.json");
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_text(output_dir / "manifest.json", m.to_json().dump(2) + "\n");
  return m;
}

int exit_code(const ExperimentConfig& cfg, const RunManifest& manifest) {
  if (cfg.preset == Preset::verify_suite && !manifest.summary.value("all_pass", true)) return kExitVerifyFailed;
  if (manifest.outcome == "blow_up" && requires_completion(cfg.preset)) return kExitBlowUp;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Calibration and gamma export
// ---------------------------------------------------------------------------

SolverConfig calibration_config(char which, const json& overrides) {
  if (which != 'C' && which != 'M') throw ConfigError("calibrate: expected M or C");
  json c = default_config();
  c["T"] = which == 'C' ? 10.0 : 1.0;
  c["lr"] = json::array();
  merge_object(c, overrides, "calibrate");
  return build_solver(c);
}

ConstantCalibration calibrate(char which, const SolverConfig& base, const CalibrationOptions& opts) {
  if (which == 'C') return calibrate_small_data_constant(base, opts);
  if (which == 'M') return calibrate_local_existence_constant(base, opts, {250.0, 500.0, 1000.0, 2000.0, 4000.0});
  throw ConfigError("calibrate: expected M or C");
}

json to_json(const ConstantCalibration& c) {
  return json{{"constant", c.constant}, {"per_shape", c.per_shape}, {"provenance", c.provenance}};
}

void export_gamma(const ExperimentConfig& cfg, const std::filesystem::path& path, bool allow_large) {
  const BasisPtr basis = build_basis(cfg.solver.domain);
  save_gamma(gamma_tensor(basis, allow_large), path);
}

}  // namespace sqg::cli
