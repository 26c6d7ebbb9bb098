#include "sqg/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "sqg/errors.hpp"
#include "sqg/sqg_core.hpp"

namespace sqg {
namespace io {

namespace {

constexpr std::array<char, 8> kSnapshotMagic = {'S', 'Q', 'G', 'S', 'N', 'A', 'P', '1'};
constexpr std::array<char, 8> kGammaMagic = {'S', 'Q', 'G', 'G', 'A', 'M', 'M', 'A'};

template <typename U>
U to_little(U v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    U out = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out = static_cast<U>((out << 8) | ((v >> (8 * i)) & 0xFF));
    }
    return out;
  }
}

template <typename U>
void put(std::ostream& out, U v) {
  v = to_little(v);
  char buf[sizeof(U)];
  std::memcpy(buf, &v, sizeof(U));
  out.write(buf, sizeof(U));
}

template <typename U>
U get(std::istream& in) {
  char buf[sizeof(U)];
  if (!in.read(buf, sizeof(U))) throw FormatError("unexpected end of binary stream");
  U v;
  std::memcpy(&v, buf, sizeof(U));
  return to_little(v);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_magic(std::istream& in, const std::array<char, 8>& magic, const std::string& what) {
  std::array<char, 8> got{};
  if (!in.read(got.data(), got.size()) || got != magic) throw FormatError(what + ": bad magic");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace

void write_u32(std::ostream& out, std::uint32_t v) { put(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { put(out, v); }
void write_f64(std::ostream& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }
std::uint32_t read_u32(std::istream& in) { return get<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return get<std::uint64_t>(in); }
double read_f64(std::istream& in) { return std::bit_cast<double>(get<std::uint64_t>(in)); }

void write_snapshot(const std::filesystem::path& path, const SpectralField& theta, double alpha, double kappa,
                    double t) {
  std::ofstream out = open_out(path);
  const DomainSpec& d = theta.basis()->domain();
  out.write(kSnapshotMagic.data(), kSnapshotMagic.size());
  write_u32(out, kSnapshotFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(d.modes));
  write_f64(out, d.lx);
  write_f64(out, d.ly);
  write_f64(out, alpha);
  write_f64(out, kappa);
  write_f64(out, t);
  write_u64(out, theta.size());
  for (double c : theta.coeffs()) write_f64(out, c);
  finish(out, path);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  check_magic(in, kSnapshotMagic, "snapshot " + path.string());
  const std::uint32_t version = read_u32(in);
  if (version != kSnapshotFormatVersion) {
    throw FormatError("snapshot " + path.string() + ": unsupported version " + std::to_string(version));
  }
  Snapshot s;
  s.modes = static_cast<int>(read_u32(in));
  s.lx = read_f64(in);
  s.ly = read_f64(in);
  s.alpha = read_f64(in);
  s.kappa = read_f64(in);
  s.t = read_f64(in);
  const std::uint64_t count = read_u64(in);
  if (count != static_cast<std::uint64_t>(s.modes) * static_cast<std::uint64_t>(s.modes)) {
    throw FormatError("snapshot " + path.string() + ": coefficient count does not match J");
  }
  s.coeffs.resize(count);
  for (double& c : s.coeffs) c = read_f64(in);
  return s;
}

std::string diagnostics_header(const std::vector<double>& lr) {
  std::string h = "t,L2,Halpha,H2,H2alpha";
  for (double r : lr) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ",L%g", r);
    h += buf;
  }
  h += ",energy_residual";
  return h;
}

std::string format_diagnostics_csv(const std::vector<DiagnosticsRow>& rows, const std::vector<double>& lr) {
  std::string out = diagnostics_header(lr) + "\n";
  for (const DiagnosticsRow& row : rows) {
    if (row.lr.size() != lr.size()) throw ShapeError("diagnostics row has the wrong number of Lr columns");
    out += format_double(row.t);
    for (double v : {row.l2, row.halpha, row.h2, row.h2alpha}) out += "," + format_double(v);
    for (double v : row.lr) out += "," + format_double(v);
    out += "," + format_double(row.energy_residual) + "\n";
  }
  return out;
}

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRow>& rows,
                           const std::vector<double>& lr) {
  write_text(path, format_diagnostics_csv(rows, lr));
}

nlohmann::json to_json(const InequalityReport& report) {
  nlohmann::json j;
  j["name"] = report.name;
  j["samples"] = report.samples;
  j["worst_violation"] = report.worst_violation;
  j["tolerance"] = report.tolerance;
  j["pass"] = report.pass;
  j["metadata"] = report.metadata;
  return j;
}

std::string format_reports(const std::vector<InequalityReport>& reports) {
  std::string out;
  for (const InequalityReport& r : reports) out += to_json(r).dump() + "\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  finish(out, path);
}

void write_norm_plot(const std::filesystem::path& path, const std::vector<DiagnosticsRow>& rows,
                     const std::string& title) {
  constexpr double width = 640.0;
  constexpr double height = 400.0;
  constexpr double margin = 50.0;
  struct Series {
    const char* label;
    const char* color;
    double DiagnosticsRow::*field;
  };
  const std::array<Series, 4> series = {{{"L2", "#1f77b4", &DiagnosticsRow::l2},
                                         {"Halpha", "#2ca02c", &DiagnosticsRow::halpha},
                                         {"H2", "#d62728", &DiagnosticsRow::h2},
                                         {"H2alpha", "#9467bd", &DiagnosticsRow::h2alpha}}};
  auto logv = [](double v) { return std::log10(std::max(v, 1e-300)); };

  double t0 = 0.0, t1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (!rows.empty()) {
    t0 = rows.front().t;
    t1 = std::max(rows.back().t, t0 + 1e-300);
    y0 = std::numeric_limits<double>::infinity();
    y1 = -std::numeric_limits<double>::infinity();
    for (const DiagnosticsRow& r : rows) {
      for (const Series& s : series) {
        y0 = std::min(y0, logv(r.*s.field));
        y1 = std::max(y1, logv(r.*s.field));
      }
    }
    if (y1 - y0 < 1e-12) {
      y0 -= 0.5;
      y1 += 0.5;
    }
  }
  auto px = [&](double t) { return margin + (t - t0) / (t1 - t0) * (width - 2 * margin); };
  auto py = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << margin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << width - margin << "\" y=\"" << height - 15 << "\" font-family=\"sans-serif\" font-size=\"12\" "
      << "text-anchor=\"end\">t = " << format_double(t1) << "</text>\n";
  svg << "<text x=\"5\" y=\"" << margin - 5 << "\" font-family=\"sans-serif\" font-size=\"12\">log10 = "
      << format_double(y1) << "</text>\n";
  svg << "<text x=\"5\" y=\"" << height - margin + 15 << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << format_double(y0) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
    for (const DiagnosticsRow& r : rows) svg << px(r.t) << "," << py(logv(r.*s.field)) << " ";
    svg << "\"/>\n";
    svg << "<text x=\"" << width - margin - 60 << "\" y=\"" << margin + 15.0 * static_cast<double>(i)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << s.color << "\">" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  write_text(path, svg.str());
}

}  // namespace io

// ---------------------------------------------------------------------------
// Gamma cache
// ---------------------------------------------------------------------------

void save_gamma(const GammaTensor& gamma, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const DomainSpec& d = gamma.basis()->domain();
  out.write(io::kGammaMagic.data(), io::kGammaMagic.size());
  io::write_u32(out, kGammaFormatVersion);
  io::write_u32(out, static_cast<std::uint32_t>(d.modes));
  io::write_u32(out, static_cast<std::uint32_t>(d.quad));
  io::write_u32(out, 0);
  io::write_f64(out, d.lx);
  io::write_f64(out, d.ly);
  for (double v : gamma.entries()) io::write_f64(out, v);
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

GammaTensor load_gamma(const std::filesystem::path& path, const BasisPtr& basis) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  io::check_magic(in, io::kGammaMagic, "gamma cache " + path.string());
  const std::uint32_t version = io::read_u32(in);
  if (version != kGammaFormatVersion) {
    throw FormatError("gamma cache: unsupported version " + std::to_string(version));
  }
  const DomainSpec& d = basis->domain();
  const std::uint32_t modes = io::read_u32(in);
  const std::uint32_t quad = io::read_u32(in);
  io::read_u32(in);
  const double lx = io::read_f64(in);
  const double ly = io::read_f64(in);
  if (static_cast<int>(modes) != d.modes || static_cast<int>(quad) != d.quad || lx != d.lx || ly != d.ly) {
    throw FormatError("gamma cache: header (J=" + std::to_string(modes) + ", Nquad=" + std::to_string(quad) +
                      ") does not match the requested basis (J=" + std::to_string(d.modes) +
                      ", Nquad=" + std::to_string(d.quad) + ")");
  }
  const std::size_t m = basis->size();
  std::vector<double> entries(m * m * m);
  for (double& v : entries) v = io::read_f64(in);
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("gamma cache: trailing bytes");
  return GammaTensor(basis, std::move(entries));
}

}  // namespace sqg
