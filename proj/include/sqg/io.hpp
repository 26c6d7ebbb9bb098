#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqg/eigenbasis.hpp"
#include "sqg/timestepping.hpp"
#include "sqg/verification.hpp"

namespace sqg::io {

inline constexpr std::uint32_t kSnapshotFormatVersion = 1;

/// Little-endian primitives shared by the binary formats.
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);

struct Snapshot {
  double lx = 0.0;
  double ly = 0.0;
  int modes = 0;
  double alpha = 0.0;
  double kappa = 0.0;
  double t = 0.0;
  std::vector<double> coeffs;
};

/// Magic "SQGSNAP1", version, J, Lx, Ly, alpha, kappa, t, count, coefficients.
void write_snapshot(const std::filesystem::path& path, const SpectralField& theta, double alpha, double kappa,
                    double t);
Snapshot read_snapshot(const std::filesystem::path& path);

/// "t,L2,Halpha,H2,H2alpha,L<r>...,energy_residual" with %.17g values.
std::string diagnostics_header(const std::vector<double>& lr);
std::string format_diagnostics_csv(const std::vector<DiagnosticsRow>& rows, const std::vector<double>& lr);
void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRow>& rows,
                           const std::vector<double>& lr);

nlohmann::json to_json(const InequalityReport& report);
/// One compact JSON object per line.
std::string format_reports(const std::vector<InequalityReport>& reports);

/// Static SVG line chart of log10 of the row norms against t.
void write_norm_plot(const std::filesystem::path& path, const std::vector<DiagnosticsRow>& rows,
                     const std::string& title);

/// Writes `text` to `path`; IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace sqg::io
