#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phonon/lattice.hpp"
#include "phonon/operator.hpp"
#include "phonon/types.hpp"

namespace phonon::spectra {

struct Options {
  double step_low = 2e-3;   // scan step below step_split
  double step_high = 1e-2;  // scan step above
  double step_split = 0.5;
  double accept = 1e-6;     // indicator bound for an accepted root
  double muller_tol = 1e-10;
  int max_iter = 50;
  double guard = 0.05;      // empty-lattice margin reported as flagged
  double deflate_pad = 1.0; // deflate reciprocal points with |q| <= k_max + pad
  lattice::Options lattice;
};

// Smallest singular value of the row-equilibrated matrix. Row scales
// (max-norms) are written to `scales` when given.
double singular_value_indicator(const Eigen::MatrixXcd& A, Eigen::VectorXd* scales = nullptr);

// Same quantity via the smallest eigenvalue of B^H B. Cheaper, but resolves
// values only down to about 1e-8; used for scanning, never for acceptance.
double gram_indicator(const Eigen::MatrixXcd& A);

struct LogDet {
  cplx phase = 1.0;
  double logabs = 0.0;
};
LogDet log_determinant(const Eigen::MatrixXcd& A);

struct Bracket {
  double lo = 0.0, mid = 0.0, hi = 0.0;
  double value = 0.0;  // indicator at mid
};

// Interior local minima of values over an ascending grid.
std::vector<Bracket> bracket_minima(const std::vector<double>& grid, const std::vector<double>& values);

struct ScanResult {
  std::vector<Bracket> brackets;
  std::vector<std::pair<double, double>> flagged;  // omega intervals with margin < guard
};

ScanResult scan_and_bracket(BlochVector alpha, const op::MaterialParams& mat, const op::DiskCrystal& crystal,
                            int N, double omega_lo, double omega_hi, const Options& opt = {});

struct MullerResult {
  cplx root;
  int iterations = 0;
  bool converged = false;
};

// Stops when |dx| < tol + 1e-10 |x| or after max_iter; project_real keeps
// every iterate on the real axis.
MullerResult muller_refine(const std::function<cplx(cplx)>& f, cplx x0, cplx x1, cplx x2, double tol = 1e-10,
                           int max_iter = 50, bool project_real = false);

struct Root {
  double omega = 0.0;
  double indicator = 0.0;
  int iterations = 0;
  bool converged = true;
};

// Characteristic-value search at one Bloch vector. The reciprocal points
// below k_max + pad are deflated once, so every evaluation in the scan and in
// Muller uses the same analytic function of omega.
class PointSolver {
 public:
  PointSolver(BlochVector alpha, op::MaterialParams mat, op::DiskCrystal crystal, int N, double omega_max,
              Options opt = {});

  Eigen::MatrixXcd matrix(double omega) const;
  double indicator(double omega) const;
  double scan_value(double omega) const;
  std::vector<double> grid(double lo, double hi) const;
  // Smallest `count` accepted roots in (0, omega_max].
  std::vector<Root> roots(int count) const;
  std::optional<Root> refine(const Bracket& b) const;

  const std::vector<lattice::RecipPoint>& deflated() const { return deflated_; }

 private:
  BlochVector alpha_;
  op::MaterialParams mat_;
  op::DiskCrystal crystal_;
  int N_;
  double omega_max_;
  Options opt_;
  std::vector<lattice::RecipPoint> deflated_;
};

// (omega_1, omega_2); at Gamma omega_1 = 0.
std::pair<double, double> first_two_bands(BlochVector alpha, const op::MaterialParams& mat,
                                          const op::DiskCrystal& crystal, int N, double omega_max,
                                          const Options& opt = {});

struct BandPoint {
  double s = 0.0;
  BlochVector alpha;
  std::vector<double> omegas;
  std::vector<Root> roots;  // diagnostics, parallel to omegas
  std::string error;
};

struct Gap {
  double lo = 0.0, hi = 0.0;
};

struct BandStructure {
  std::vector<BandPoint> points;
  std::optional<Gap> gap;
  double omega_star = 0.0;
  BlochVector argmax_alpha;
  std::vector<std::string> failures;
};

// Closed path Gamma -> X -> M -> Gamma, `resolution` samples per edge plus the
// closing Gamma.
std::vector<std::pair<double, BlochVector>> path_samples(int resolution);

BandStructure band_structure(const op::MaterialParams& mat, const op::DiskCrystal& crystal, int N, int resolution,
                             int band_count, double omega_max, const Options& opt = {}, int threads = 1);

std::pair<double, std::optional<Gap>> extract_gap_and_star(const BandStructure& bs);

}  // namespace phonon::spectra
