#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>

#include "phonon/lattice.hpp"
#include "phonon/types.hpp"

namespace phonon::op {

struct MaterialParams {
  double rho = 1.0;
  double kappa = 1.0;
  double rho_b = 1.0;
  double kappa_b = 1.0;

  double delta() const { return rho_b / rho; }
  double v() const { return std::sqrt(kappa / rho); }
  double v_b() const { return std::sqrt(kappa_b / rho_b); }
  double tau() const { return v() / v_b(); }
  void validate() const;
};

struct DiskCrystal {
  double R = 0.05;

  double area() const { return pi * R * R; }
  void validate() const;
};

// Rows: [continuity of u; continuity of flux] x orders -N..N.
// Columns: [inner coefficients; outer coefficients] x orders -N..N,
// followed by `border` auxiliary columns/rows when empty-lattice poles were
// deflated (see assemble_bordered).
struct CharacteristicMatrix {
  double omega = 0.0;
  BlochVector alpha;
  int N = 0;
  double R = 0.0;
  int border = 0;
  Eigen::MatrixXcd entries;

  int block() const { return 2 * N + 1; }
};

// Free-space single layer at k_b, interior trace: (s, ds).
std::pair<cplx, cplx> inner_block_diag(int n, double kb, double R);

// Quasi-periodic single layer at k, exterior trace: (s, ds) for row m, column n.
std::pair<cplx, cplx> outer_block_entries(int m, int n, double k, double R,
                                          const lattice::LatticeSumTable& Q);

// Plain assembly; the lattice sums enforce the empty-lattice guard.
CharacteristicMatrix assemble_characteristic_matrix(double omega, const MaterialParams& mat,
                                                    BlochVector alpha, const DiskCrystal& crystal,
                                                    int N, const lattice::Options& lopt = {});

// Assembly with the listed reciprocal points deflated. Each pole term
// u v^T / (k^2 - |q|^2) is moved into a border row/column, so that
// det(bordered) = prod_b (|q_b|^2 - k^2) * det(A) and the bordered matrix stays
// analytic through k = |q_b|.
CharacteristicMatrix assemble_bordered(double omega, const MaterialParams& mat, BlochVector alpha,
                                       const DiskCrystal& crystal, int N,
                                       std::span<const lattice::RecipPoint> deflated,
                                       const lattice::Options& lopt = {});

struct QuasiStaticOptions {
  int cutoff = 60;   // shell budget for the reciprocal sum
  double eta = 0.0;  // 0 selects a radius-dependent default
  int nodes = 64;    // trapezoid nodes per circle for the real-space part
};

// Matrix of S_D^{alpha,0} in the harmonic basis (row m, column n).
Eigen::MatrixXcd quasistatic_matrix(BlochVector alpha, double R, int N, const QuasiStaticOptions& opt = {});

}  // namespace phonon::op
