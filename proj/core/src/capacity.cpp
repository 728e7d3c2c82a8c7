#include "phonon/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace phonon::capacity {

double capacity_disk(double R) {
  if (!(R > 0.0 && R < 1.0)) throw DomainError("capacity_disk: need 0 < R < 1");
  return -2.0 * pi / std::log(R);
}

CapacityResult capacity_quasi(BlochVector alpha, double R, int N, const op::QuasiStaticOptions& opt) {
  const Eigen::MatrixXcd S = op::quasistatic_matrix(alpha, R, N, opt);
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(S.rows());
  e0(N) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(S);
  if (!lu.isInvertible()) throw SingularSystem("quasi-static single layer is singular");
  const Eigen::VectorXcd a = lu.solve(e0);
  CapacityResult r;
  r.alpha = alpha;
  r.R = R;
  r.N = N;
  r.residual = (S * a - e0).norm() / S.norm();
  const cplx q = -2.0 * pi * R * a(N);
  r.cap = q.real();
  r.imag_part = q.imag();
  if (!(r.cap > 0.0)) throw SingularSystem("quasi-periodic capacity is not positive");
  return r;
}

double minnaert_frequency(double delta, double v_b, double cap, double volume) {
  if (!(delta > 0 && v_b > 0 && cap > 0 && volume > 0))
    throw DomainError("minnaert_frequency: inputs must be positive");
  return std::sqrt(delta * v_b * v_b * cap / volume);
}

double approx_resonance(BlochVector alpha, const op::MaterialParams& mat, const op::DiskCrystal& crystal,
                        int N, const op::QuasiStaticOptions& opt) {
  const auto c = capacity_quasi(alpha, crystal.R, N, opt);
  return minnaert_frequency(mat.delta(), mat.v_b(), c.cap, crystal.area());
}

std::vector<DiluteRow> dilute_consistency(const std::vector<BlochVector>& alphas, const std::vector<double>& radii,
                                          int N, const op::QuasiStaticOptions& opt) {
  std::vector<DiluteRow> out;
  for (const auto& a : alphas) {
    if (a.norm() < 1.0) throw DomainError("dilute_consistency: need |alpha| >= 1");
    DiluteRow row;
    row.alpha = a;
    row.radii = radii;
    for (double R : radii) {
      const double cd = capacity_disk(R);
      row.beta.push_back((capacity_quasi(a, R, N, opt).cap - cd) / (cd * cd));
    }
    const auto [lo, hi] = std::minmax_element(row.beta.begin(), row.beta.end());
    double mean = 0.0;
    for (double b : row.beta) mean += std::abs(b);
    mean /= static_cast<double>(row.beta.size());
    row.spread = mean > 0.0 ? (*hi - *lo) / mean : 0.0;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace phonon::capacity
