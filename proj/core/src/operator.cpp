#include "phonon/operator.hpp"

#include <algorithm>
#include <cmath>

#include "phonon/specfun.hpp"

namespace phonon::op {

namespace {

constexpr cplx I1{0.0, 1.0};

cplx ipow(int n) {  // i^n for any integer n
  switch (((n % 4) + 4) % 4) {
    case 0: return 1.0;
    case 1: return I1;
    case 2: return -1.0;
    default: return -I1;
  }
}

double sgn_pow(int n) { return (n & 1) ? -1.0 : 1.0; }

// E_1(z) + ln z + gamma, entire in z.
double ein(double z) {
  if (z == 0.0) return 0.0;
  if (z < 2.0) {
    double term = 1.0, sum = 0.0;
    for (int k = 1; k < 60; ++k) {
      term *= -z / k;
      sum -= term / k;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return -std::expint(-z) + std::log(z) + euler_gamma;
}

double e1(double z) { return -std::expint(-z); }

void fill_blocks(CharacteristicMatrix& A, const MaterialParams& mat, double k, double kb,
                 const lattice::LatticeSumTable& Q, const specfun::CylTable& in,
                 const specfun::CylTable& out) {
  const int N = A.N, n2 = A.block();
  const double R = A.R, delta = mat.delta();
  const cplx c(0.0, -pi * R / 2.0);
  for (int n = -N; n <= N; ++n) {
    const int j = n + N;
    A.entries(j, j) = c * in.J(n) * in.H(n);
    A.entries(n2 + j, j) = c * kb * in.H(n) * in.dJ(n);
  }
  for (int m = -N; m <= N; ++m) {
    for (int n = -N; n <= N; ++n) {
      const cplx lat = c * out.J(n) * sgn_pow(std::abs(n - m)) * Q(n - m);
      cplx s = lat * out.J(m);
      cplx ds = lat * k * out.dJ(m);
      if (m == n) {
        s += c * out.J(n) * out.H(n);
        ds += c * k * out.J(n) * out.dH(n);
      }
      A.entries(m + N, n2 + n + N) = -s;
      A.entries(n2 + m + N, n2 + n + N) = -delta * ds;
    }
  }
}

}  // namespace

void MaterialParams::validate() const {
  if (!(rho > 0 && kappa > 0 && rho_b > 0 && kappa_b > 0))
    throw DomainError("material parameters must be positive");
}

void DiskCrystal::validate() const {
  if (!(R > 0.0 && R < 0.5)) throw DomainError("disk radius must lie in (0, 1/2)");
}

std::pair<cplx, cplx> inner_block_diag(int n, double kb, double R) {
  if (!(kb * R > 0.0)) throw DomainError("inner_block_diag: k_b R must be positive");
  const double x = kb * R;
  const cplx c(0.0, -pi * R / 2.0);
  const double j = specfun::bessel_j(n, x);
  const cplx h = specfun::hankel1(n, x);
  const double dj = specfun::cyl_derivative(specfun::Kind::J, n, x).real();
  return {c * j * h, c * kb * h * dj};
}

std::pair<cplx, cplx> outer_block_entries(int m, int n, double k, double R,
                                          const lattice::LatticeSumTable& Q) {
  if (!(k * R > 0.0)) throw DomainError("outer_block_entries: k R must be positive");
  const double x = k * R;
  const cplx c(0.0, -pi * R / 2.0);
  const double jn = specfun::bessel_j(n, x), jm = specfun::bessel_j(m, x);
  const double djm = specfun::cyl_derivative(specfun::Kind::J, m, x).real();
  const cplx lat = c * jn * sgn_pow(std::abs(n - m)) * Q(n - m);
  cplx s = lat * jm, ds = lat * k * djm;
  if (m == n) {
    s += c * jn * specfun::hankel1(n, x);
    ds += c * k * jn * specfun::cyl_derivative(specfun::Kind::H1, n, x);
  }
  return {s, ds};
}

CharacteristicMatrix assemble_characteristic_matrix(double omega, const MaterialParams& mat,
                                                    BlochVector alpha, const DiskCrystal& crystal,
                                                    int N, const lattice::Options& lopt) {
  return assemble_bordered(omega, mat, alpha, crystal, N, {}, lopt);
}

CharacteristicMatrix assemble_bordered(double omega, const MaterialParams& mat, BlochVector alpha,
                                       const DiskCrystal& crystal, int N,
                                       std::span<const lattice::RecipPoint> deflated,
                                       const lattice::Options& lopt) {
  mat.validate();
  crystal.validate();
  if (!(omega > 0.0)) throw DomainError("assemble: omega must be positive");
  if (N < 0) throw DomainError("assemble: N must be >= 0");

  CharacteristicMatrix A;
  A.omega = omega;
  A.alpha = alpha;
  A.N = N;
  A.R = crystal.R;
  A.border = static_cast<int>(deflated.size());
  const int n2 = A.block();
  const int dim = 2 * n2 + A.border;
  A.entries = Eigen::MatrixXcd::Zero(dim, dim);

  const double k = omega / mat.v(), kb = omega / mat.v_b();
  const double R = crystal.R, delta = mat.delta();
  const auto Q = lattice::lattice_sum_table(2 * N, k, alpha, lopt, deflated);
  const auto in = specfun::cyl_table(N, kb * R);
  const auto out = specfun::cyl_table(N, k * R);
  fill_blocks(A, mat, k, kb, Q, in, out);

  for (int b = 0; b < A.border; ++b) {
    const auto p = deflated[b];
    const double qx = lattice::qx(alpha, p), qy = lattice::qy(alpha, p);
    const double q2 = qx * qx + qy * qy;
    const int col = 2 * n2 + b;
    A.entries(col, col) = -(k * k - q2);
    if (q2 == 0.0) {
      // Only Q_0 carries this pole; off the monopole it is regular, add it back.
      for (int n = -N; n <= N; ++n) {
        if (n == 0) continue;
        const double w = 2.0 * pi * R * out.J(n) / (k * k);
        A.entries(n + N, n2 + n + N) -= w * out.J(n);
        A.entries(n2 + n + N, n2 + n + N) -= delta * w * k * out.dJ(n);
      }
      A.entries(N, col) = -out.J(0);
      A.entries(n2 + N, col) = -delta * k * out.dJ(0);
      A.entries(col, n2 + N) = 2.0 * pi * R * out.J(0);
      continue;
    }
    const double th = std::atan2(qy, qx);
    for (int m = -N; m <= N; ++m) {
      const cplx ph = ipow(m) * std::polar(1.0, -m * th);
      A.entries(m + N, col) = -ph * out.J(m);
      A.entries(n2 + m + N, col) = -delta * ph * k * out.dJ(m);
      A.entries(col, n2 + m + N) = 2.0 * pi * R * ipow(-m) * std::polar(1.0, m * th) * out.J(m);
    }
  }
  return A;
}

Eigen::MatrixXcd quasistatic_matrix(BlochVector alpha, double R, int N, const QuasiStaticOptions& opt) {
  if (alpha.is_zero()) throw ZeroAlpha("quasistatic_matrix requires alpha != 0");
  if (!(R > 0.0 && R < 0.5)) throw DomainError("quasistatic_matrix: radius must lie in (0, 1/2)");
  if (N < 0) throw DomainError("quasistatic_matrix: N must be >= 0");
  const int n2 = 2 * N + 1;
  const double eta = opt.eta > 0.0 ? opt.eta : 6.0;
  const double eta2 = eta * eta;
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n2, n2);

  // reciprocal part: -2 pi R sum_q e^{-|q|^2/4eta^2} i^m (-i)^n J_m J_n e^{i(n-m)theta} / |q|^2
  int quiet = 0;
  bool converged = false;
  Eigen::VectorXcd u(n2);
  for (int s = 0; s <= opt.cutoff; ++s) {
    Eigen::MatrixXcd shell = Eigen::MatrixXcd::Zero(n2, n2);
    auto visit = [&](int p1, int p2) {
      const double x = alpha.x + 2.0 * pi * p1, y = alpha.y + 2.0 * pi * p2;
      const double q2 = x * x + y * y;
      const double w = -2.0 * pi * R * std::exp(-q2 / (4.0 * eta2)) / q2;
      if (w == 0.0) return;
      const auto j = specfun::bessel_j_seq(N, std::sqrt(q2) * R);
      const double th = std::atan2(y, x);
      for (int m = -N; m <= N; ++m) {
        const double jm = (m < 0 && (m & 1)) ? -j[-m] : j[std::abs(m)];
        u(m + N) = ipow(m) * std::polar(1.0, -m * th) * jm;
      }
      shell.noalias() += w * u * u.adjoint();
    };
    if (s == 0) {
      visit(0, 0);
    } else {
      for (int i = -s; i <= s; ++i) {
        visit(i, -s);
        visit(i, s);
      }
      for (int j = -s + 1; j <= s - 1; ++j) {
        visit(-s, j);
        visit(s, j);
      }
    }
    S += shell;
    const double rel = shell.cwiseAbs().maxCoeff() / std::max(1e-300, S.cwiseAbs().maxCoeff());
    quiet = rel < 1e-17 ? quiet + 1 : 0;
    if (s >= 2 && quiet >= 2) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NonConvergence("quasistatic reciprocal sum exceeded cutoff");

  // real-space part on a trapezoid grid
  const int nq = opt.nodes;
  std::vector<double> cx(nq), cy(nq);
  for (int i = 0; i < nq; ++i) {
    cx[i] = R * std::cos(2.0 * pi * i / nq);
    cy[i] = R * std::sin(2.0 * pi * i / nq);
  }
  const double reach = 2.0 * R + 6.5 / eta;
  std::vector<std::pair<int, int>> cells;
  const int L = static_cast<int>(std::ceil(reach));
  for (int a = -L; a <= L; ++a)
    for (int b = -L; b <= L; ++b)
      if ((a || b) && std::hypot(a, b) < reach) cells.emplace_back(a, b);

  Eigen::MatrixXcd K(nq, nq);
  for (int i = 0; i < nq; ++i) {
    for (int j = 0; j < nq; ++j) {
      const double dx = cx[i] - cx[j], dy = cy[i] - cy[j];
      cplx v = ein(eta2 * (dx * dx + dy * dy));
      for (auto [a, b] : cells) {
        const double ex = dx - a, ey = dy - b;
        v += std::polar(e1(eta2 * (ex * ex + ey * ey)), alpha.x * a + alpha.y * b);
      }
      K(i, j) = -v / (4.0 * pi);
    }
  }
  Eigen::MatrixXcd Ex(n2, nq), Ey(nq, n2);
  for (int m = -N; m <= N; ++m)
    for (int i = 0; i < nq; ++i) {
      Ex(m + N, i) = std::polar(1.0, -m * 2.0 * pi * i / nq);
      Ey(i, m + N) = std::polar(1.0, m * 2.0 * pi * i / nq);
    }
  const double h = 2.0 * pi / nq;
  S += (R / (2.0 * pi)) * h * h * (Ex * K * Ey);

  // analytic part: (1/2pi) ln|x-y| and the Ewald constant
  for (int n = -N; n <= N; ++n) S(n + N, n + N) += n == 0 ? R * std::log(R) : -R / (2.0 * std::abs(n));
  S(N, N) += 2.0 * pi * R * (euler_gamma + 2.0 * std::log(eta)) / (4.0 * pi);
  return S;
}

}  // namespace phonon::op
