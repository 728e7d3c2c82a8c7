#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phonon/types.hpp"

namespace bubbleband {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Defaults reproduce the dilute experiment.
struct RunConfig {
  double radius = 0.05;
  double rho = 5000.0;
  double kappa = 5000.0;
  double rho_b = 1.0;
  double kappa_b = 1.0;
  int truncation_N = 7;
  int path_resolution = 30;
  int band_count = 2;
  double omega_max = 6.0;
  double scan_step = 2e-3;
  double scan_step_high = 1e-2;
  double lattice_tol = 1e-8;
  int spectral_cutoff = 60;
  std::vector<double> contrasts{100.0, 300.0, 1000.0, 3000.0};
  std::vector<double> radii{0.25, 0.1, 0.05};
  std::string output_path;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);
void validate(const RunConfig& cfg);

// "ax,ay"; each component a number or [c*]pi[/d].
phonon::BlochVector parse_alpha(const std::string& text);

// Each returns a process exit code (0 ok, 1 computation failure).
int run_bands(const RunConfig& cfg, int threads, std::ostream& out, std::ostream& err);
int run_compare(const RunConfig& cfg, std::optional<phonon::BlochVector> alpha, int threads, std::ostream& out,
                std::ostream& err);
int run_dilute(const RunConfig& cfg, int threads, std::ostream& out, std::ostream& err);
int run_capacity(const RunConfig& cfg, phonon::BlochVector alpha, std::ostream& out, std::ostream& err);

int main_cli(int argc, char** argv);

}  // namespace bubbleband
