#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqg/sqg_core.hpp"
#include "sqg/timestepping.hpp"
#include "sqg/verification.hpp"

namespace sqg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitVerifyFailed = 3;
inline constexpr int kExitBlowUp = 4;
inline constexpr int kExitIo = 5;

inline constexpr int kConfigSchemaVersion = 1;

/// Environment variable naming the root directory for run outputs.
inline constexpr const char* kOutputRootEnv = "SQG_OUTPUT_ROOT";

// Empirical constants, J = 8, alpha = 1/2, kappa = 1, etdrk2 at dt = 1e-3.
// Small data: `sqg calibrate C` (32 decay-2 shapes, seed 7001, T = 10).
// Critical amplitudes ranged 792..3815; C = 1 / 792.37.
// Local existence: `sqg calibrate M` (32 shapes x amplitudes {250,500,1000,2000,4000}, T = 1).
inline constexpr double kCalibratedSmallDataConstant = 0.001262043193018206;
inline constexpr double kCalibratedLocalExistenceConstant = 1.0416666666666666e-05;

enum class Preset {
  local_existence,
  small_data_global,
  subcritical_global,
  inviscid_local,
  linear_advection,
  retarded_mollification,
  picard_inviscid,
  verify_suite,
};

std::string to_string(Preset p);
Preset parse_preset(const std::string& name);
const std::vector<std::string>& preset_names();
/// Presets whose blow-up outcome maps to exit code 4.
bool requires_completion(Preset p);

/// Fully resolved experiment configuration.
struct ExperimentConfig {
  Preset preset = Preset::local_existence;
  SolverConfig solver;
  /// Every key with its resolved value; hashed into the manifest.
  nlohmann::json resolved;
  std::optional<std::filesystem::path> config_path;
};

/// Defaults of every key, before preset overrides.
nlohmann::json default_config();
/// Overrides applied by a preset on top of the defaults.
nlohmann::json preset_overrides(Preset p);

/// Precedence: defaults < preset < file < `sets` (in order). Each set is
/// "key=value" with value parsed as JSON when possible, else as a string.
/// Unknown keys, type mismatches and out-of-range values throw ConfigError
/// naming the key.
ExperimentConfig parse_config(Preset preset, const std::optional<std::filesystem::path>& path,
                              const std::vector<std::string>& sets);
ExperimentConfig resolve_config(Preset preset, const nlohmann::json& overrides);
/// File keys overlaid with `sets`, unvalidated.
nlohmann::json collect_overrides(const std::optional<std::filesystem::path>& path,
                                 const std::vector<std::string>& sets);

/// FNV-1a 64 of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& resolved);

/// Initial datum selected by the `init*` keys.
SpectralField initial_data(const ExperimentConfig& cfg);

struct RunManifest {
  std::string preset;
  nlohmann::json config;
  std::string config_hash;
  std::string code_version;
  std::uint64_t seed = 0;
  std::string config_path;
  std::string output_dir;
  std::vector<std::string> artifacts;
  double wall_clock_seconds = 0.0;
  std::string outcome = "completed";  // completed | blow_up | iteration_failure
  std::optional<double> blow_up_time;
  nlohmann::json summary = nlohmann::json::object();

  [[nodiscard]] nlohmann::json to_json() const;
};

std::string code_version();

/// Output directory of a run: <root>/<preset>-<hash prefix>, with root from
/// SQG_OUTPUT_ROOT or ./sqg_output.
std::filesystem::path default_output_dir(const ExperimentConfig& cfg);

/// Exclusive lock on an output directory, held for the object's lifetime.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path path_;
};

/// Executes the preset, writes artifacts into `output_dir` and returns the
/// manifest (also written as manifest.json).
RunManifest run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& output_dir);

/// Exit code for a finished run.
int exit_code(const ExperimentConfig& cfg, const RunManifest& manifest);

// ---------------------------------------------------------------------------
// Verification battery
// ---------------------------------------------------------------------------

struct VerifyOptions {
  /// Flips the sign of one off-diagonal gamma entry (mutation fixture).
  bool inject_gamma_sign_error = false;
  std::uint64_t seed = 20240;
};

const std::vector<std::string>& suite_names();
/// Runs the named suite; "empty" yields no reports. Unknown names throw ConfigError.
std::vector<InequalityReport> run_verify(const std::string& suite, const VerifyOptions& opts = {});

// ---------------------------------------------------------------------------
// Calibration and gamma export
// ---------------------------------------------------------------------------

/// Base configuration for `calibrate C` / `calibrate M` with overrides applied.
SolverConfig calibration_config(char which, const nlohmann::json& overrides);
ConstantCalibration calibrate(char which, const SolverConfig& base, const CalibrationOptions& opts);
nlohmann::json to_json(const ConstantCalibration& c);

/// Builds the gamma tensor of the configured basis and writes the cache.
void export_gamma(const ExperimentConfig& cfg, const std::filesystem::path& path, bool allow_large);

}  // namespace sqg::cli
