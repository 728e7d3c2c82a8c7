#include "phonon/specfun.hpp"

#include <algorithm>
#include <cmath>

namespace phonon::specfun {

namespace {

// Unnormalized downward recurrence from an even start well above max(n, x),
// normalized with J_0 + 2 sum J_2k = 1. Returns J_0..J_top (top >= order_max).
std::vector<double> miller(int order_max, double x) {
  const double big = std::max<double>(order_max, x);
  int m = static_cast<int>(big + 20.0 + 12.0 * std::cbrt(std::max(x, 1.0)));
  m += m & 1;
  std::vector<double> f(m + 2, 0.0);
  f[m] = 1e-300;
  for (int k = m; k >= 1; --k) {
    f[k - 1] = (2.0 * k / x) * f[k] - f[k + 1];
    if (std::abs(f[k - 1]) > 1e250) {
      for (int i = k - 1; i <= m; ++i) f[i] *= 1e-250;
    }
  }
  double sum = f[0];
  for (int k = 2; k <= m; k += 2) sum += 2.0 * f[k];
  f.resize(m + 1);
  for (auto& v : f) v /= sum;
  return f;
}

void y_from_neumann(const std::vector<double>& j, double x, double& y0, double& y1) {
  const double lg = std::log(0.5 * x) + euler_gamma;
  const int top = static_cast<int>(j.size()) - 1;
  double s0 = 0.0, s1 = 0.0;
  for (int k = 1; 2 * k + 1 <= top; ++k) {
    const double sg = (k & 1) ? -1.0 : 1.0;
    s0 += sg * j[2 * k] / k;
    s1 += sg * (j[2 * k - 1] - j[2 * k + 1]) / k;
  }
  y0 = (2.0 / pi) * (lg * j[0] - 2.0 * s0);
  y1 = -(2.0 / pi) * (j[0] / x - lg * j[1] - s1);
}

double reflect(int n) { return (n < 0 && (n & 1)) ? -1.0 : 1.0; }

}  // namespace

std::vector<double> bessel_j_seq(int order_max, double x) {
  if (order_max < 0) throw DomainError("bessel_j_seq: negative order_max");
  if (!(x >= 0.0)) throw DomainError("bessel_j_seq: x must be >= 0");
  std::vector<double> out(order_max + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  auto f = miller(order_max, x);
  std::copy_n(f.begin(), order_max + 1, out.begin());
  return out;
}

std::vector<double> bessel_y_seq(int order_max, double x) {
  if (order_max < 0) throw DomainError("bessel_y_seq: negative order_max");
  if (!(x > 0.0)) throw DomainError("bessel_y_seq: x must be > 0");
  auto j = miller(std::max(order_max, 1), x);
  std::vector<double> y(order_max + 1);
  double y0, y1;
  y_from_neumann(j, x, y0, y1);
  y[0] = y0;
  if (order_max >= 1) y[1] = y1;
  for (int n = 1; n < order_max; ++n) y[n + 1] = (2.0 * n / x) * y[n] - y[n - 1];
  return y;
}

double bessel_j(int n, double x) {
  const int a = std::abs(n);
  return reflect(n) * bessel_j_seq(a, x)[a];
}

double bessel_y(int n, double x) {
  const int a = std::abs(n);
  return reflect(n) * bessel_y_seq(a, x)[a];
}

cplx hankel1(int n, double x) { return {bessel_j(n, x), bessel_y(n, x)}; }

cplx cyl_derivative(Kind kind, int n, double x) {
  auto c = [&](int m) -> cplx { return kind == Kind::J ? cplx(bessel_j(m, x)) : hankel1(m, x); };
  return 0.5 * (c(n - 1) - c(n + 1));
}

CylTable cyl_table(int N, double x, bool with_hankel) {
  CylTable t;
  t.N = N;
  t.x = x;
  const int sz = 2 * N + 1;
  t.j.resize(sz);
  t.dj.resize(sz);
  auto j = bessel_j_seq(N + 1, x);
  std::vector<double> y;
  if (with_hankel) {
    y = bessel_y_seq(N + 1, x);
    t.h.resize(sz);
    t.dh.resize(sz);
  }
  auto jm = [&](int m) { return m < 0 ? -j[1] : j[m]; };
  auto ym = [&](int m) { return m < 0 ? -y[1] : y[m]; };
  for (int n = 0; n <= N; ++n) {
    const double dj = 0.5 * (jm(n - 1) - j[n + 1]);
    for (int s : {n, -n}) {
      const double r = reflect(s);
      t.j[s + N] = r * j[n];
      t.dj[s + N] = r * dj;
      if (with_hankel) {
        const double dy = 0.5 * (ym(n - 1) - y[n + 1]);
        t.h[s + N] = r * cplx(j[n], y[n]);
        t.dh[s + N] = r * cplx(dj, dy);
      }
    }
  }
  return t;
}

// ---- complex argument ----

namespace {

using lcplx = std::complex<long double>;
constexpr double series_radius = 12.0;
constexpr int taylor_terms = 30;

void check_complex(cplx z) {
  if (std::abs(z.imag()) > 1.0 || std::abs(z) > 30.0 || std::abs(z) == 0.0)
    throw DomainError("complex Bessel: need 0 < |z| <= 30, |Im z| <= 1");
  if (z.real() <= 0.0) throw DomainError("complex Bessel: need Re z > 0");
}

lcplx series_j(int n, lcplx h) {  // h = z/2
  lcplx t = 1.0L;
  for (int i = 1; i <= n; ++i) t *= h / static_cast<long double>(i);
  const lcplx h2 = -h * h;
  lcplx s = t;
  for (int k = 1; k < 200; ++k) {
    t *= h2 / static_cast<long double>(k * (k + n));
    s += t;
    if (std::abs(t) < 1e-22L * std::abs(s) && k > std::abs(h)) break;
  }
  return s;
}

// Y_0, Y_1 from the ascending series with digamma coefficients.
void series_y01(lcplx z, lcplx& y0, lcplx& y1) {
  const lcplx h = z / 2.0L;
  const lcplx lg = std::log(h);
  const long double g = euler_gamma;
  const long double lpi = std::numbers::pi_v<long double>;
  const lcplx h2 = -h * h;
  // n = 0: sum over k of 2 psi(k+1) (-h^2)^k / (k!)^2
  lcplx t = 1.0L, s0 = -2.0L * g;
  long double harm = 0.0L;
  for (int k = 1; k < 200; ++k) {
    t *= h2 / static_cast<long double>(k * k);
    harm += 1.0L / k;
    const lcplx term = t * (2.0L * (harm - g));
    s0 += term;
    if (std::abs(term) < 1e-22L * std::abs(s0) && k > std::abs(h)) break;
  }
  y0 = (2.0L / lpi) * lg * series_j(0, h) - s0 / lpi;
  // n = 1: finite part -(1/pi)(1/h), series with psi(k+1) + psi(k+2)
  t = h;
  long double hk = 0.0L, hk1 = 1.0L;
  lcplx s1 = t * (-2.0L * g + 1.0L);
  for (int k = 1; k < 200; ++k) {
    t *= h2 / static_cast<long double>(k * (k + 1));
    hk += 1.0L / k;
    hk1 += 1.0L / (k + 1);
    const lcplx term = t * (hk + hk1 - 2.0L * g);
    s1 += term;
    if (std::abs(term) < 1e-22L * std::abs(s1) && k > std::abs(h)) break;
  }
  y1 = (2.0L / lpi) * lg * series_j(1, h) - 1.0L / (lpi * h) - s1 / lpi;
}

// f(x + iy) = sum_j (iy)^j / j! f^(j)(x), with f^(j)_n = 2^-j sum_i (-1)^i C(j,i) f_{n-j+2i}.
std::vector<cplx> taylor_from_axis(int order_max, cplx z, bool y_kind) {
  const double x = z.real();
  const int top = order_max + taylor_terms;
  auto seq = y_kind ? bessel_y_seq(top, x) : bessel_j_seq(top, x);
  auto at = [&](int m) { return reflect(m) * seq[std::abs(m)]; };
  std::vector<double> binom(taylor_terms + 1, 0.0);
  std::vector<cplx> out(order_max + 1, 0.0);
  for (int n = 0; n <= order_max; ++n) {
    cplx acc = 0.0;
    cplx w = 1.0;  // (iy)^j / j!
    std::fill(binom.begin(), binom.end(), 0.0);
    binom[0] = 1.0;
    for (int j = 0; j <= taylor_terms; ++j) {
      if (j > 0) {
        for (int i = j; i >= 1; --i) binom[i] += binom[i - 1];
        w *= cplx(0.0, z.imag()) / static_cast<double>(j);
      }
      double d = 0.0;
      for (int i = 0; i <= j; ++i) d += ((i & 1) ? -1.0 : 1.0) * binom[i] * at(n - j + 2 * i);
      acc += w * std::ldexp(d, -j);
      if (std::abs(w) < 1e-18) break;
    }
    out[n] = acc;
  }
  return out;
}

}  // namespace

std::vector<cplx> bessel_j_seq(int order_max, cplx z) {
  check_complex(z);
  if (std::abs(z) > series_radius) return taylor_from_axis(order_max, z, false);
  std::vector<cplx> out(order_max + 1);
  const lcplx h = lcplx(z) / 2.0L;
  for (int n = 0; n <= order_max; ++n) out[n] = cplx(series_j(n, h));
  return out;
}

std::vector<cplx> bessel_y_seq(int order_max, cplx z) {
  check_complex(z);
  if (std::abs(z) > series_radius) return taylor_from_axis(order_max, z, true);
  lcplx y0, y1;
  series_y01(lcplx(z), y0, y1);
  std::vector<lcplx> y(std::max(order_max, 1) + 1);
  y[0] = y0;
  y[1] = y1;
  const lcplx lz(z);
  for (int n = 1; n < order_max; ++n) y[n + 1] = (2.0L * n / lz) * y[n] - y[n - 1];
  std::vector<cplx> out(order_max + 1);
  for (int n = 0; n <= order_max; ++n) out[n] = cplx(y[n]);
  return out;
}

cplx hankel1(int n, cplx z) {
  const int a = std::abs(n);
  const cplx v = bessel_j_seq(a, z)[a] + cplx(0, 1) * bessel_y_seq(a, z)[a];
  return reflect(n) * v;
}

}  // namespace phonon::specfun
