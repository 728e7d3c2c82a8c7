#include "bubbleband/cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "phonon/capacity.hpp"
#include "phonon/spectra.hpp"

namespace bubbleband {

using phonon::BlochVector;
using json = nlohmann::json;

namespace {

constexpr const char* schema_help = R"(Outputs (CSV, UTF-8, LF line endings, values with 15 significant digits):
  bands     s,alpha_x,alpha_y,band,omega
            one row per path sample and band; s in [0,1] runs Gamma->X->M->Gamma.
            footer: # omega_star=<max band 1>  # gap_lo=<max band 1>  # gap_hi=<min band 2>
            (gap fields read "none" when band 2 dips below band 1)
  compare   contrast,delta,omega_exact,omega_approx,rel_error
            delta = 1/contrast, omega_approx = omega_M sqrt(Cap_alpha/Cap_D).
            failed contrasts leave omega_exact and rel_error empty and are listed
            under a "# warnings" footer.
  dilute    radius,omega_star,omega_M,ratio      (ratio = omega_star/omega_M)
            footer: # argmax radius=<r> alpha_x=<ax> alpha_y=<ay>
  capacity  key=value report on stdout: Cap_D, Cap_D_alpha, ratio, omega_M, omega_M_alpha.

Config (JSON object, every key optional): radius, rho, kappa, rho_b, kappa_b,
  truncation_N, path_resolution, band_count, omega_max, scan_step, scan_step_high,
  lattice_tol, spectral_cutoff, contrasts, radii, output_path.

Flags (per subcommand): --config <json>, --output <file>, --threads <n>;
  compare and capacity also take --alpha ax,ay (default pi,pi).

Exit codes: 0 success, 1 computation failure, 2 usage error.)";

std::string num(double v) { return fmt::format("{:.15g}", v); }

phonon::spectra::Options spectra_options(const RunConfig& c) {
  phonon::spectra::Options o;
  o.step_low = c.scan_step;
  o.step_high = c.scan_step_high;
  o.lattice.tol = c.lattice_tol;
  return o;
}

phonon::op::QuasiStaticOptions qs_options(const RunConfig& c) {
  phonon::op::QuasiStaticOptions o;
  o.cutoff = c.spectral_cutoff;
  return o;
}

phonon::op::MaterialParams material(const RunConfig& c) { return {c.rho, c.kappa, c.rho_b, c.kappa_b}; }

double parse_component(std::string t) {
  t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char ch) { return std::isspace(ch); }), t.end());
  if (t.empty()) throw UsageError("empty alpha component");
  auto number = [](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw UsageError("bad number in alpha: '" + s + "'");
    }
    if (pos != s.size()) throw UsageError("bad number in alpha: '" + s + "'");
    return v;
  };
  const auto p = t.find("pi");
  if (p == std::string::npos) return number(t);
  double scale = 1.0;
  std::string head = t.substr(0, p), tail = t.substr(p + 2);
  if (head == "-") {
    scale = -1.0;
  } else if (!head.empty() && head != "+") {
    if (head.back() != '*') throw UsageError("bad alpha component: '" + t + "'");
    scale = number(head.substr(0, head.size() - 1));
  }
  if (!tail.empty()) {
    if (tail.front() != '/') throw UsageError("bad alpha component: '" + t + "'");
    const double d = number(tail.substr(1));
    if (d == 0.0) throw UsageError("division by zero in alpha");
    scale /= d;
  }
  return scale * phonon::pi;
}

template <class T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  RunConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "radius") c.radius = get_field<double>(j, "radius");
    else if (k == "rho") c.rho = get_field<double>(j, "rho");
    else if (k == "kappa") c.kappa = get_field<double>(j, "kappa");
    else if (k == "rho_b") c.rho_b = get_field<double>(j, "rho_b");
    else if (k == "kappa_b") c.kappa_b = get_field<double>(j, "kappa_b");
    else if (k == "truncation_N") c.truncation_N = get_field<int>(j, "truncation_N");
    else if (k == "path_resolution") c.path_resolution = get_field<int>(j, "path_resolution");
    else if (k == "band_count") c.band_count = get_field<int>(j, "band_count");
    else if (k == "omega_max") c.omega_max = get_field<double>(j, "omega_max");
    else if (k == "scan_step") c.scan_step = get_field<double>(j, "scan_step");
    else if (k == "scan_step_high") c.scan_step_high = get_field<double>(j, "scan_step_high");
    else if (k == "lattice_tol") c.lattice_tol = get_field<double>(j, "lattice_tol");
    else if (k == "spectral_cutoff") c.spectral_cutoff = get_field<int>(j, "spectral_cutoff");
    else if (k == "contrasts") c.contrasts = get_field<std::vector<double>>(j, "contrasts");
    else if (k == "radii") c.radii = get_field<std::vector<double>>(j, "radii");
    else if (k == "output_path") c.output_path = get_field<std::string>(j, "output_path");
    else throw UsageError("unknown config field '" + k + "'");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string(name) + " must be positive");
  };
  positive(c.radius, "radius");
  if (!(c.radius < 0.5)) throw UsageError("radius must be below 0.5");
  positive(c.rho, "rho");
  positive(c.kappa, "kappa");
  positive(c.rho_b, "rho_b");
  positive(c.kappa_b, "kappa_b");
  if (c.truncation_N < 1 || c.truncation_N > 12) throw UsageError("truncation_N must lie in [1, 12]");
  if (c.path_resolution < 3) throw UsageError("path_resolution must be at least 3");
  if (c.band_count < 1 || c.band_count > 5) throw UsageError("band_count must lie in [1, 5]");
  positive(c.omega_max, "omega_max");
  positive(c.scan_step, "scan_step");
  positive(c.scan_step_high, "scan_step_high");
  positive(c.lattice_tol, "lattice_tol");
  if (c.spectral_cutoff < 20) throw UsageError("spectral_cutoff must be at least 20");
  for (double v : c.contrasts) positive(v, "contrasts entries");
  for (double r : c.radii)
    if (!(r > 0.0 && r < 0.5)) throw UsageError("radii entries must lie in (0, 0.5)");
}

BlochVector parse_alpha(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
    throw UsageError("--alpha expects two comma-separated components");
  return {parse_component(text.substr(0, comma)), parse_component(text.substr(comma + 1))};
}

int run_bands(const RunConfig& c, int threads, std::ostream& out, std::ostream& err) {
  const auto bs = phonon::spectra::band_structure(material(c), {c.radius}, c.truncation_N, c.path_resolution,
                                                  c.band_count, c.omega_max, spectra_options(c), threads);
  out << "s,alpha_x,alpha_y,band,omega\n";
  for (const auto& p : bs.points)
    for (std::size_t b = 0; b < p.omegas.size(); ++b)
      out << num(p.s) << ',' << num(p.alpha.x) << ',' << num(p.alpha.y) << ',' << b + 1 << ',' << num(p.omegas[b])
          << '\n';
  out << "# omega_star=" << num(bs.omega_star) << '\n';
  out << "# gap_lo=" << (bs.gap ? num(bs.gap->lo) : "none") << '\n';
  out << "# gap_hi=" << (bs.gap ? num(bs.gap->hi) : "none") << '\n';
  if (!bs.failures.empty()) {
    err << "bands: failed at path point " << bs.failures.front() << '\n';
    return 1;
  }
  return 0;
}

int run_compare(const RunConfig& c, std::optional<BlochVector> alpha_opt, int threads, std::ostream& out,
                std::ostream& err) {
  const BlochVector alpha = alpha_opt.value_or(phonon::points::M);
  if (alpha.is_zero()) throw UsageError("compare needs alpha != 0");
  struct Row {
    double contrast, delta, exact = NAN, approx = NAN;
    std::string warning;
  };
  std::vector<Row> rows;
  for (double v : c.contrasts) rows.push_back({v, 1.0 / v, NAN, NAN, {}});
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) {
      auto& r = rows[i];
      try {
        const phonon::op::MaterialParams mat{r.contrast * c.rho_b, r.contrast * c.kappa_b, c.rho_b, c.kappa_b};
        const phonon::op::DiskCrystal crystal{c.radius};
        r.approx = phonon::capacity::approx_resonance(alpha, mat, crystal, c.truncation_N, qs_options(c));
        const double wmax = std::max(c.omega_max, 2.0 * r.approx);
        phonon::spectra::PointSolver ps(alpha, mat, crystal, c.truncation_N, wmax, spectra_options(c));
        const auto roots = ps.roots(1);
        if (roots.empty())
          r.warning = "no band below " + num(wmax);
        else
          r.exact = roots.front().omega;
      } catch (const phonon::Error& e) {
        r.warning = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < std::max(1, threads); ++t) pool.emplace_back(work);
    work();
  }
  out << "contrast,delta,omega_exact,omega_approx,rel_error\n";
  std::size_t failed = 0;
  for (const auto& r : rows) {
    const bool ok = r.warning.empty();
    failed += !ok;
    out << num(r.contrast) << ',' << num(r.delta) << ',' << (ok ? num(r.exact) : "") << ','
        << (std::isnan(r.approx) ? "" : num(r.approx)) << ','
        << (ok ? num(std::abs(r.exact - r.approx) / r.exact) : "") << '\n';
  }
  if (failed) {
    out << "# warnings\n";
    for (const auto& r : rows)
      if (!r.warning.empty()) out << "# contrast=" << num(r.contrast) << ": " << r.warning << '\n';
  }
  if (failed == rows.size() && !rows.empty()) {
    err << "compare: every contrast failed\n";
    return 1;
  }
  return 0;
}

int run_dilute(const RunConfig& c, int threads, std::ostream& out, std::ostream& err) {
  const auto mat = material(c);
  out << "radius,omega_star,omega_M,ratio\n";
  std::vector<std::string> footer;
  int status = 0;
  for (double R : c.radii) {
    const auto bs = phonon::spectra::band_structure(mat, {R}, c.truncation_N, c.path_resolution, 1, c.omega_max,
                                                    spectra_options(c), threads);
    const double wm = phonon::capacity::minnaert_frequency(mat.delta(), mat.v_b(),
                                                           phonon::capacity::capacity_disk(R), phonon::op::DiskCrystal{R}.area());
    out << num(R) << ',' << num(bs.omega_star) << ',' << num(wm) << ',' << num(bs.omega_star / wm) << '\n';
    footer.push_back("# argmax radius=" + num(R) + " alpha_x=" + num(bs.argmax_alpha.x) +
                     " alpha_y=" + num(bs.argmax_alpha.y));
    if (!bs.failures.empty()) {
      err << "dilute: radius " << num(R) << " failed at path point " << bs.failures.front() << '\n';
      status = 1;
    }
  }
  for (const auto& f : footer) out << f << '\n';
  return status;
}

int run_capacity(const RunConfig& c, BlochVector alpha, std::ostream& out, std::ostream&) {
  if (alpha.is_zero()) throw UsageError("capacity needs alpha != 0");
  const auto mat = material(c);
  const double cd = phonon::capacity::capacity_disk(c.radius);
  const auto qs = qs_options(c);
  const auto ca = phonon::capacity::capacity_quasi(alpha, c.radius, c.truncation_N, qs);
  const double wm = phonon::capacity::minnaert_frequency(mat.delta(), mat.v_b(), cd, phonon::op::DiskCrystal{c.radius}.area());
  const double wma = phonon::capacity::minnaert_frequency(mat.delta(), mat.v_b(), ca.cap, phonon::op::DiskCrystal{c.radius}.area());
  out << "# radius=" << num(c.radius) << " alpha=(" << num(alpha.x) << "," << num(alpha.y) << ")"
      << " delta=" << num(mat.delta()) << " v_b=" << num(mat.v_b()) << '\n';
  out << "# Cap_D: -2 pi / ln R\n";
  out << "# Cap_D_alpha: quasi-static single layer, N=" << c.truncation_N
      << ", Ewald split with reciprocal shell budget " << qs.cutoff << ", " << qs.nodes
      << " trapezoid nodes per circle, solve residual " << fmt::format("{:.3g}", ca.residual) << '\n';
  out << "Cap_D=" << num(cd) << '\n';
  out << "Cap_D_alpha=" << num(ca.cap) << '\n';
  out << "ratio=" << num(ca.cap / cd) << '\n';
  out << "omega_M=" << num(wm) << '\n';
  out << "omega_M_alpha=" << num(wma) << '\n';
  return 0;
}

int main_cli(int argc, char** argv) {
  CLI::App app{"Subwavelength band structures of a square lattice of circular bubbles."};
  app.footer(schema_help);
  app.require_subcommand(1, 1);
  std::string config_path, alpha_text, output;
  int threads = 1;
  auto common = [&](CLI::App* sub, bool with_alpha) {
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    if (with_alpha) sub->add_option("--alpha", alpha_text, "Bloch vector ax,ay (numbers or forms like pi, pi/2)");
    sub->add_option("--output", output, "output file (default: config output_path, else stdout)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* bands = app.add_subcommand("bands", "band structure along Gamma-X-M-Gamma");
  auto* compare = app.add_subcommand("compare", "exact first band vs the capacity approximation over contrasts");
  auto* dilute = app.add_subcommand("dilute", "omega_star against the Minnaert frequency over radii");
  auto* cap = app.add_subcommand("capacity", "capacities and Minnaert frequencies at one Bloch vector");
  common(bands, false);
  common(compare, true);
  common(dilute, false);
  common(cap, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunConfig cfg;
  std::optional<BlochVector> alpha;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!output.empty()) cfg.output_path = output;
    validate(cfg);
    if (!alpha_text.empty()) alpha = parse_alpha(alpha_text);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!cfg.output_path.empty()) {
    file.open(cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!file) {
      std::cerr << "usage error: cannot write " << cfg.output_path << '\n';
      return 2;
    }
    out = &file;
  }
  try {
    if (bands->parsed()) return run_bands(cfg, threads, *out, std::cerr);
    if (compare->parsed()) return run_compare(cfg, alpha, threads, *out, std::cerr);
    if (dilute->parsed()) return run_dilute(cfg, threads, *out, std::cerr);
    return run_capacity(cfg, alpha.value_or(phonon::points::M), *out, std::cerr);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const phonon::Error& e) {
    std::cerr << "computation failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace bubbleband
