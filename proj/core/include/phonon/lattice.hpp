#pragma once

#include <span>
#include <vector>

#include "phonon/types.hpp"

namespace phonon::lattice {

// Reciprocal lattice point q = alpha + 2*pi*(p1, p2).
struct RecipPoint {
  int p1 = 0;
  int p2 = 0;
  bool operator==(const RecipPoint&) const = default;
};

inline double qx(BlochVector a, RecipPoint p) { return a.x + 2.0 * pi * p.p1; }
inline double qy(BlochVector a, RecipPoint p) { return a.y + 2.0 * pi * p.p2; }
inline double qnorm(BlochVector a, RecipPoint p) { return std::hypot(qx(a, p), qy(a, p)); }

struct Options {
  double tol = 1e-8;      // accuracy relative to max(1, |H_n(k)|)
  double guard = 0.05;    // minimum distance to an undeflated empty-lattice resonance
  double eta = 0.0;       // Ewald splitting; 0 selects max(sqrt(pi), k/sqrt(8))
  int max_shells = 600;
};

struct LatticeSumTable {
  double k = 0.0;
  BlochVector alpha;
  int order_max = 0;
  std::vector<cplx> values;  // Q_{-order_max} .. Q_{order_max}
  double est_error = 0.0;  // relative to max(1, |H_n(k)|), worst order
  std::vector<RecipPoint> deflated;

  cplx operator()(int n) const;
};

// min | k - |q| | over reciprocal points with |q| <= k + 2*pi.
double empty_lattice_margin(double k, BlochVector alpha);
// Same, skipping the listed points.
double empty_lattice_margin(double k, BlochVector alpha, std::span<const RecipPoint> skip);

// Reciprocal points with |q| <= radius, ordered by (|q|, p1, p2).
std::vector<RecipPoint> reciprocal_points_within(BlochVector alpha, double radius);

// Q_n for |n| <= order_max by Ewald summation. Points in `deflated` have their
// spectral pole 1/(|q|^2 - k^2) removed: the table then holds the regular part
// of Q and the caller accounts for the rank-one pole term separately.
LatticeSumTable lattice_sum_table(int order_max, double k, BlochVector alpha,
                                  const Options& opt = {},
                                  std::span<const RecipPoint> deflated = {});

cplx lattice_sum(int n, double k, BlochVector alpha, const Options& opt = {});

}  // namespace phonon::lattice
