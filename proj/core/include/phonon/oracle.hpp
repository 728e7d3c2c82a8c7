#pragma once

#include <Eigen/Dense>

#include "phonon/types.hpp"

// Slow reference computations for the test suite. Bessel values come from the
// C++17 special functions, not from phonon::specfun.
namespace phonon::oracle {

struct QuadratureRule {
  int node_count = 256;  // even, >= 64
};

struct NystromValue {
  cplx value;
  bool degraded = false;  // doubling the nodes moved the value by more than 1e-7
};

// m-th Fourier coefficient of S_k[e^{in theta}] on the circle of radius R,
// kernel -(i/4) H_0(k|x-y|), log singularity handled by Kress product quadrature.
cplx nystrom_projection(int m, int n, double k, double R, const QuadratureRule& rule);

// Diagonal value (m = n) with the self-convergence flag.
NystromValue nystrom_free_space(int n, double k, double R, const QuadratureRule& rule = {});

struct SpectralOptions {
  int nodes = 512;
  double eps_min = 1e-5;
  double eps_max = 6e-5;
  int eps_count = 11;
  int fit_terms = 6;  // powers eps^{j/2}, j < fit_terms
};

// Harmonic-basis matrix of the quasi-periodic single layer from the spectral
// kernel sum_q e^{iq.(x-y)} / (k^2 - |q|^2). The raw sum converges too slowly
// to truncate, so it is Gaussian-damped and extrapolated to zero damping.
Eigen::MatrixXcd spectral_reference_matrix(int N, double k, BlochVector alpha, double R,
                                           const SpectralOptions& opt = {});
cplx spectral_reference_entry(int m, int n, double k, BlochVector alpha, double R,
                              const SpectralOptions& opt = {});

struct BruteValue {
  cplx value;
  double dispersion = 0.0;  // spread between extrapolation orders
};

// Direct lattice sum of H_n(k|m|) e^{in arg m} e^{i alpha.m}, damped by
// e^{-eps |m|^2} and Richardson-extrapolated in eps. `shell_count` is the
// truncation radius at the smallest damping.
BruteValue brute_lattice_sum(int n, double k, BlochVector alpha, int shell_count = 400);

}  // namespace phonon::oracle
