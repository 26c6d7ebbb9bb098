#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sqg/cli_harness.hpp"
#include "sqg/errors.hpp"
#include "sqg/io.hpp"

namespace {

using namespace sqg;

std::optional<std::filesystem::path> as_path(const std::optional<std::string>& p) {
  return p ? std::optional<std::filesystem::path>(*p) : std::nullopt;
}

int run_main(int argc, char** argv) {
  CLI::App app{"Galerkin solver and property checks for dissipative surface quasi-geostrophic flow"};
  app.require_subcommand(1);

  std::string preset;
  std::optional<std::string> config_path;
  std::vector<std::string> sets;
  std::optional<std::string> output;
  auto* run = app.add_subcommand("run", "Run an experiment preset");
  run->add_option("preset", preset, "Preset name")->required();
  run->add_option("--config", config_path, "JSON configuration file");
  run->add_option("--set", sets, "Override a key: key=value (repeatable)");
  run->add_option("--output", output, "Output directory (default: $SQG_OUTPUT_ROOT/<preset>-<hash>)");

  std::string suite = "default";
  bool inject = false;
  std::uint64_t verify_seed = cli::VerifyOptions{}.seed;
  auto* verify = app.add_subcommand("verify", "Run the inequality and invariant battery");
  verify->add_option("--suite", suite, "Suite name");
  verify->add_option("--seed", verify_seed, "Base seed of the sampled fields");
  verify->add_flag("--inject-gamma-sign-error", inject, "Flip one gamma entry (mutation fixture)");

  std::string which;
  CalibrationOptions calib;
  std::optional<std::string> calib_config;
  std::vector<std::string> calib_sets;
  auto* calibrate = app.add_subcommand("calibrate", "Calibrate the constant M or C");
  calibrate->add_option("constant", which, "M or C")->required()->check(CLI::IsMember({"M", "C"}));
  calibrate->add_option("--config", calib_config, "JSON configuration file");
  calibrate->add_option("--set", calib_sets, "Override a key: key=value (repeatable)");
  calibrate->add_option("--shapes", calib.shapes, "Number of random calibration shapes");
  calibrate->add_option("--seed", calib.seed, "Seed of the first shape");

  std::string gamma_out;
  bool allow_large = false;
  std::optional<std::string> gamma_config;
  std::vector<std::string> gamma_sets;
  auto* gamma = app.add_subcommand("export-gamma", "Write the gamma tensor cache");
  gamma->add_option("--out", gamma_out, "Output file")->required();
  gamma->add_option("--config", gamma_config, "JSON configuration file");
  gamma->add_option("--set", gamma_sets, "Override a key: key=value (repeatable)");
  gamma->add_flag("--allow-large", allow_large, "Lift the J <= 8 memory guard");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }

  try {
    if (*run) {
      const cli::ExperimentConfig cfg = cli::parse_config(
          cli::parse_preset(preset), as_path(config_path),
          sets);
      const std::filesystem::path dir = output ? std::filesystem::path(*output) : cli::default_output_dir(cfg);
      const cli::RunManifest manifest = cli::run_experiment(cfg, dir);
      std::cout << manifest.to_json().dump(2) << "\n";
      return cli::exit_code(cfg, manifest);
    }
    if (*verify) {
      const auto reports = cli::run_verify(suite, cli::VerifyOptions{inject, verify_seed});
      if (reports.empty()) std::cerr << "warning: suite '" << suite << "' selected no checks\n";
      std::cout << io::format_reports(reports);
      bool ok = true;
      for (const auto& r : reports) {
        if (!r.pass) {
          ok = false;
          std::cerr << "FAILED " << io::to_json(r).dump() << "\n";
        }
      }
      return ok ? cli::kExitOk : cli::kExitVerifyFailed;
    }
    if (*calibrate) {
      const SolverConfig base = cli::calibration_config(which[0], cli::collect_overrides(as_path(calib_config), calib_sets));
      std::cout << cli::to_json(cli::calibrate(which[0], base, calib)).dump(2) << "\n";
      return cli::kExitOk;
    }
    if (*gamma) {
      const cli::ExperimentConfig cfg = cli::parse_config(
          cli::Preset::local_existence,
          as_path(gamma_config), gamma_sets);
      cli::export_gamma(cfg, gamma_out, allow_large);
      return cli::kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return cli::kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return cli::kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return cli::kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return cli::kExitIo;
  }
  return cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) { return run_main(argc, argv); }
