#pragma once

#include <optional>
#include <vector>

#include "phonon/operator.hpp"
#include "phonon/types.hpp"

namespace phonon::capacity {

struct CapacityResult {
  double cap = 0.0;
  std::optional<BlochVector> alpha;
  double R = 0.0;
  int N = 0;
  double residual = 0.0;   // ||S a - e_0|| / ||S||
  double imag_part = 0.0;  // discarded imaginary part of the quadratic form
};

// -2 pi / ln R for the disk.
double capacity_disk(double R);

// Solve S^{alpha,0} a = e_0 and return -2 pi R a_0.
CapacityResult capacity_quasi(BlochVector alpha, double R, int N, const op::QuasiStaticOptions& opt = {});

// sqrt(delta v_b^2 cap / volume)
double minnaert_frequency(double delta, double v_b, double cap, double volume);

// omega_{M,alpha} = sqrt(delta v_b^2 Cap_{D,alpha} / (pi R^2))
double approx_resonance(BlochVector alpha, const op::MaterialParams& mat, const op::DiskCrystal& crystal,
                        int N, const op::QuasiStaticOptions& opt = {});

struct DiluteRow {
  BlochVector alpha;
  std::vector<double> radii;
  std::vector<double> beta;  // (Cap_{D,alpha} - Cap_D) / Cap_D^2
  double spread = 0.0;       // (max - min) / mean |beta|
};

std::vector<DiluteRow> dilute_consistency(const std::vector<BlochVector>& alphas, const std::vector<double>& radii,
                                          int N, const op::QuasiStaticOptions& opt = {});

}  // namespace phonon::capacity
