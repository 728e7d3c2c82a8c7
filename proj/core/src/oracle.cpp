#include "phonon/oracle.hpp"

#include <cmath>
#include <vector>

namespace phonon::oracle {

namespace {

constexpr cplx I1{0.0, 1.0};

cplx h0(double x) { return {std::cyl_bessel_j(0.0, x), std::cyl_neumann(0.0, x)}; }

cplx hn(int n, double x) {
  const int a = std::abs(n);
  const cplx v{std::cyl_bessel_j(static_cast<double>(a), x), std::cyl_neumann(static_cast<double>(a), x)};
  return (n < 0 && (a & 1)) ? -v : v;
}

}  // namespace

cplx nystrom_projection(int m, int n, double k, double R, const QuadratureRule& rule) {
  const int nq = rule.node_count;
  if (nq < 64 || (nq & 1)) throw DomainError("quadrature needs an even node count >= 64");
  if (!(k * R > 0.0)) throw DomainError("nystrom: kR must be positive");
  const int half = nq / 2;
  const double h = 2.0 * pi / nq;
  // Kress weights depend only on the node offset.
  std::vector<double> wlog(nq);
  for (int d = 0; d < nq; ++d) {
    const double t = d * h;
    double s = 0.0;
    for (int j = 1; j < half; ++j) s += std::cos(j * t) / j;
    wlog[d] = -(2.0 * pi / half) * s - (pi / (half * static_cast<double>(half))) * std::cos(half * t);
  }
  std::vector<double> m1(nq);
  std::vector<cplx> m2(nq);
  for (int d = 0; d < nq; ++d) {
    const double t = d * h;
    const double r = 2.0 * R * std::abs(std::sin(t / 2.0));
    if (d == 0) {
      m1[d] = 1.0 / (4.0 * pi);
      m2[d] = -I1 / 4.0 + (std::log(k * R / 2.0) + euler_gamma) / (2.0 * pi);
      continue;
    }
    const double j0 = std::cyl_bessel_j(0.0, k * r);
    m1[d] = j0 / (4.0 * pi);
    m2[d] = -I1 / 4.0 * h0(k * r) - m1[d] * std::log(4.0 * std::sin(t / 2.0) * std::sin(t / 2.0));
  }
  // S[e^{in.}](t_i) at every node, then the discrete Fourier coefficient m.
  cplx coef = 0.0;
  for (int i = 0; i < nq; ++i) {
    cplx acc = 0.0;
    for (int j = 0; j < nq; ++j) {
      const int d = ((i - j) % nq + nq) % nq;
      acc += (wlog[d] * m1[d] + h * m2[d]) * std::polar(1.0, n * j * h);
    }
    coef += R * acc * std::polar(1.0, -m * i * h);
  }
  return coef / static_cast<double>(nq);
}

NystromValue nystrom_free_space(int n, double k, double R, const QuadratureRule& rule) {
  NystromValue v;
  v.value = nystrom_projection(n, n, k, R, rule);
  const cplx fine = nystrom_projection(n, n, k, R, {rule.node_count * 2});
  v.degraded = std::abs(fine - v.value) > 1e-7;
  return v;
}

Eigen::MatrixXcd spectral_reference_matrix(int N, double k, BlochVector alpha, double R, const SpectralOptions& opt) {
  if (alpha.is_zero() && k == 0.0) throw ZeroAlpha("spectral reference at k = 0 needs alpha != 0");
  const int n2 = 2 * N + 1;
  const int ne = opt.eps_count;
  std::vector<double> eps(ne);
  for (int j = 0; j < ne; ++j) eps[j] = opt.eps_min + (opt.eps_max - opt.eps_min) * j / (ne - 1);
  const double qmax = std::sqrt(42.0 / opt.eps_min);
  const int P = static_cast<int>(qmax / (2.0 * pi)) + 1;

  const int nq = opt.nodes;
  std::vector<double> cs(nq), sn(nq);
  for (int i = 0; i < nq; ++i) {
    cs[i] = R * std::cos(2.0 * pi * i / nq);
    sn[i] = R * std::sin(2.0 * pi * i / nq);
  }
  Eigen::MatrixXcd F(nq, n2);  // e^{-i m theta_i} / nq
  for (int i = 0; i < nq; ++i)
    for (int m = -N; m <= N; ++m) F(i, m + N) = std::polar(1.0 / nq, -m * 2.0 * pi * i / nq);

  std::vector<Eigen::MatrixXcd> acc(ne, Eigen::MatrixXcd::Zero(n2, n2));
  Eigen::RowVectorXcd plane(nq);
  for (int p1 = -P; p1 <= P; ++p1) {
    for (int p2 = -P; p2 <= P; ++p2) {
      const double qx = alpha.x + 2.0 * pi * p1, qy = alpha.y + 2.0 * pi * p2;
      const double q2 = qx * qx + qy * qy;
      if (q2 > qmax * qmax) continue;
      if (q2 == k * k) throw NearEmptyResonance("spectral reference on an empty-lattice resonance");
      for (int i = 0; i < nq; ++i) plane(i) = std::polar(1.0, qx * cs[i] + qy * sn[i]);
      // a_m = (1/2pi) int e^{iq.x} e^{-im theta}; the y-side is 2 pi R conj(a_n)
      const Eigen::RowVectorXcd a = plane * F;
      const Eigen::MatrixXcd outer = (2.0 * pi * R / (k * k - q2)) * (a.transpose() * a.conjugate());
      for (int j = 0; j < ne; ++j) {
        const double w = std::exp(-eps[j] * q2);
        if (w > 0.0) acc[j] += w * outer;
      }
    }
  }
  // least squares in t = sqrt(eps / eps_max)
  Eigen::MatrixXd V(ne, opt.fit_terms);
  for (int j = 0; j < ne; ++j) {
    const double t = std::sqrt(eps[j] / opt.eps_max);
    double p = 1.0;
    for (int c = 0; c < opt.fit_terms; ++c, p *= t) V(j, c) = p;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
  Eigen::MatrixXcd out(n2, n2);
  Eigen::VectorXd re(ne), im(ne);
  for (int r = 0; r < n2; ++r)
    for (int c = 0; c < n2; ++c) {
      for (int j = 0; j < ne; ++j) {
        re(j) = acc[j](r, c).real();
        im(j) = acc[j](r, c).imag();
      }
      out(r, c) = cplx(qr.solve(re)(0), qr.solve(im)(0));
    }
  return out;
}

cplx spectral_reference_entry(int m, int n, double k, BlochVector alpha, double R, const SpectralOptions& opt) {
  const int N = std::max(std::abs(m), std::abs(n));
  return spectral_reference_matrix(N, k, alpha, R, opt)(m + N, n + N);
}

BruteValue brute_lattice_sum(int n, double k, BlochVector alpha, int shell_count) {
  if (shell_count < 100) throw DomainError("brute_lattice_sum: shell_count must be >= 100");
  constexpr int ne = 5;
  const double eps_min = 38.0 / (static_cast<double>(shell_count) * shell_count);
  double eps[ne];
  for (int j = 0; j < ne; ++j) eps[j] = eps_min * (1.0 + 0.75 * j);
  cplx sum[ne] = {};
  const int L = shell_count;
  for (int a = -L; a <= L; ++a) {
    for (int b = -L; b <= L; ++b) {
      if (!a && !b) continue;
      const double r2 = static_cast<double>(a) * a + static_cast<double>(b) * b;
      if (eps_min * r2 > 38.0) continue;
      const double r = std::sqrt(r2);
      const cplx t = hn(n, k * r) * std::polar(1.0, n * std::atan2(static_cast<double>(b), a) + alpha.x * a + alpha.y * b);
      for (int j = 0; j < ne; ++j) sum[j] += std::exp(-eps[j] * r2) * t;
    }
  }
  // Neville extrapolation to eps = 0 with all points and with one fewer.
  auto neville = [&](int cnt) {
    std::vector<cplx> p(sum, sum + cnt);
    for (int lvl = 1; lvl < cnt; ++lvl)
      for (int i = 0; i + lvl < cnt; ++i)
        p[i] = (eps[i + lvl] * p[i] - eps[i] * p[i + 1]) / (eps[i + lvl] - eps[i]);
    return p[0];
  };
  BruteValue v;
  v.value = neville(ne);
  v.dispersion = std::abs(v.value - neville(ne - 1));
  return v;
}

}  // namespace phonon::oracle
