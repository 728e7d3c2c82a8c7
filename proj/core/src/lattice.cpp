#include "phonon/lattice.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

#include "phonon/specfun.hpp"

namespace phonon::lattice {

namespace {

constexpr cplx I1{0.0, 1.0};
constexpr int laguerre_nodes = 80;
constexpr double shell_floor = 1e-17;

struct GaussLaguerre {
  std::vector<double> x, w;
};

// Golub-Welsch for the nodes, then Newton polish and the closed-form weight
// 1/(x L_n'(x)^2): eigenvector-based weights lose all relative accuracy at the
// large nodes, where they get multiplied by big polynomial factors.
GaussLaguerre make_gauss_laguerre(int n) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    T(i, i) = 2.0 * i + 1.0;
    if (i + 1 < n) T(i, i + 1) = T(i + 1, i) = i + 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
  GaussLaguerre g;
  g.x.resize(n);
  g.w.resize(n);
  auto eval = [n](double x, double& ln, double& dln) {
    double p0 = 1.0, p1 = 1.0 - x;
    for (int k = 1; k < n; ++k) {
      const double p2 = ((2.0 * k + 1.0 - x) * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    ln = p1;
    dln = n * (p1 - p0) / x;
  };
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()[i], ln, dln;
    for (int it = 0; it < 3; ++it) {
      eval(x, ln, dln);
      x -= ln / dln;
    }
    eval(x, ln, dln);
    g.x[i] = x;
    g.w[i] = 1.0 / (x * dln * dln);
  }
  return g;
}

const GaussLaguerre& gauss_laguerre() {
  static const GaussLaguerre g = make_gauss_laguerre(laguerre_nodes);
  return g;
}

template <class F>
void for_shell(int s, F&& f) {
  if (s == 0) {
    f(0, 0);
    return;
  }
  for (int i = -s; i <= s; ++i) {
    f(i, -s);
    f(i, s);
  }
  for (int j = -s + 1; j <= s - 1; ++j) {
    f(-s, j);
    f(s, j);
  }
}

bool contains(std::span<const RecipPoint> v, int p1, int p2) {
  return std::any_of(v.begin(), v.end(), [&](const RecipPoint& p) { return p.p1 == p1 && p.p2 == p2; });
}

}  // namespace

cplx LatticeSumTable::operator()(int n) const {
  if (std::abs(n) > order_max) throw MissingLatticeOrder("lattice table lacks order " + std::to_string(n));
  return values[n + order_max];
}

double empty_lattice_margin(double k, BlochVector alpha) { return empty_lattice_margin(k, alpha, {}); }

double empty_lattice_margin(double k, BlochVector alpha, std::span<const RecipPoint> skip) {
  const double reach = k + 2.0 * pi;
  double best = reach;
  for (const auto& p : reciprocal_points_within(alpha, reach)) {
    if (contains(skip, p.p1, p.p2)) continue;
    best = std::min(best, std::abs(k - qnorm(alpha, p)));
  }
  return best;
}

std::vector<RecipPoint> reciprocal_points_within(BlochVector alpha, double radius) {
  std::vector<RecipPoint> out;
  const int P = static_cast<int>((radius + alpha.norm()) / (2.0 * pi)) + 1;
  for (int i = -P; i <= P; ++i)
    for (int j = -P; j <= P; ++j)
      if (qnorm(alpha, {i, j}) <= radius) out.push_back({i, j});
  std::sort(out.begin(), out.end(), [&](const RecipPoint& a, const RecipPoint& b) {
    const double na = qnorm(alpha, a), nb = qnorm(alpha, b);
    if (na != nb) return na < nb;
    return a.p1 != b.p1 ? a.p1 < b.p1 : a.p2 < b.p2;
  });
  return out;
}

LatticeSumTable lattice_sum_table(int order_max, double k, BlochVector alpha, const Options& opt,
                                  std::span<const RecipPoint> deflated) {
  if (order_max < 0) throw DomainError("lattice_sum_table: negative order");
  if (!(k > 1e-8)) throw DomainError("lattice_sum_table: k must be positive");
  const double margin = empty_lattice_margin(k, alpha, deflated);
  if (margin < opt.guard)
    throw NearEmptyResonance("lattice sum within " + std::to_string(margin) + " of an empty-lattice resonance");

  const int nmax = order_max;
  const int sz = 2 * nmax + 1;
  const double eta = opt.eta > 0.0 ? opt.eta : std::max(std::sqrt(pi), k / std::sqrt(8.0));
  const double eta2 = eta * eta;
  const double k2 = k * k;

  std::vector<cplx> spec(sz, 0.0), real(sz, 0.0), shell(sz);
  std::vector<double> absum(sz, 0.0), tail(sz, 0.0);
  std::vector<cplx> ipow(nmax + 1);  // -4 i^{n+1}
  for (int n = 0; n <= nmax; ++n) ipow[n] = -4.0 * std::pow(I1, n + 1);

  auto shell_done = [&](const std::vector<cplx>& acc) {
    double worst = 0.0;
    for (int i = 0; i < sz; ++i) worst = std::max(worst, std::abs(shell[i]) / std::max(1.0, std::abs(acc[i])));
    return worst;
  };

  // spectral part
  {
    const int s_min = static_cast<int>(eta * std::sqrt(2.0 * nmax) / (2.0 * pi)) + 2;
    std::vector<double> base(nmax + 1);
    int quiet = 0;
    for (int s = 0; s <= opt.max_shells; ++s) {
      std::fill(shell.begin(), shell.end(), 0.0);
      for_shell(s, [&](int p1, int p2) {
        const double x = alpha.x + 2.0 * pi * p1, y = alpha.y + 2.0 * pi * p2;
        const double q2 = x * x + y * y;
        const bool defl = contains(deflated, p1, p2);
        if (q2 == 0.0) {
          const double a = k2 / (4.0 * eta2);
          shell[nmax] += -4.0 * I1 * (defl ? std::expm1(a) : std::exp(a)) / (-k2);
          return;
        }
        const double q = std::sqrt(q2);
        const double gap = q2 - k2;
        const double lq = std::log(q / k), g = (k2 - q2) / (4.0 * eta2);
        for (int n = 0; n <= nmax; ++n) {
          const double L = n * lq + g;
          if (!defl) {
            base[n] = std::exp(L) / gap;
          } else if (std::abs(gap) > 1e-9 * k2) {
            base[n] = std::expm1(L) / gap;
          } else {
            base[n] = n / (2.0 * k2) - 1.0 / (4.0 * eta2);
          }
        }
        const cplx e1 = std::polar(1.0, std::atan2(y, x));
        cplx ep = 1.0;
        for (int n = 0; n <= nmax; ++n) {
          const cplx c = ipow[n] * base[n];
          shell[nmax + n] += c * ep;
          if (n > 0) shell[nmax - n] += c * std::conj(ep);
          ep *= e1;
        }
      });
      for (int i = 0; i < sz; ++i) {
        spec[i] += shell[i];
        absum[i] += std::abs(shell[i]);
      }
      const double w = shell_done(spec);
      quiet = (w < shell_floor) ? quiet + 1 : 0;
      if (s >= s_min && quiet >= 2) {
        for (int i = 0; i < sz; ++i) tail[i] += std::abs(shell[i]);
        break;
      }
      if (s == opt.max_shells) throw NonConvergence("Ewald spectral sum did not converge");
    }
  }

  // spatial part, I_n(r) = int_eta^inf t^{2n-1} exp(-r^2 t^2 + k^2/(4t^2)) dt via Gauss-Laguerre
  {
    const auto& gl = gauss_laguerre();
    std::map<int, std::vector<double>> cache;  // keyed by |m|^2
    auto weights = [&](int r2i) -> const std::vector<double>& {
      auto it = cache.find(r2i);
      if (it != cache.end()) return it->second;
      const double r2 = r2i, r = std::sqrt(r2);
      std::vector<double> pref(nmax + 1, 0.0);
      const double lead = std::exp(-r2 * eta2) / (2.0 * r2);
      const double ratio = 2.0 * r / k;
      for (std::size_t j = 0; j < gl.x.size(); ++j) {
        const double t2 = eta2 + gl.x[j] / r2;
        double term = gl.w[j] * std::exp(k2 / (4.0 * t2)) / t2;
        for (int n = 0; n <= nmax; ++n) {
          pref[n] += term;
          term *= t2;
        }
      }
      double scale = lead;
      for (int n = 0; n <= nmax; ++n) {
        pref[n] *= scale;
        scale *= ratio;
      }
      return cache.emplace(r2i, std::move(pref)).first->second;
    };
    const int s_min = static_cast<int>(std::sqrt(static_cast<double>(nmax)) / eta) + 2;
    int quiet = 0;
    const cplx lead = 2.0 / (I1 * pi);
    for (int s = 1; s <= opt.max_shells; ++s) {
      std::fill(shell.begin(), shell.end(), 0.0);
      for_shell(s, [&](int m1, int m2) {
        const auto& pref = weights(m1 * m1 + m2 * m2);
        const cplx phase = lead * std::polar(1.0, alpha.x * m1 + alpha.y * m2);
        const cplx e1 = std::polar(1.0, std::atan2(static_cast<double>(m2), static_cast<double>(m1)));
        cplx ep = 1.0;
        for (int n = 0; n <= nmax; ++n) {
          const cplx c = phase * pref[n];
          shell[nmax + n] += c * ep;
          if (n > 0) shell[nmax - n] += c * std::conj(ep);
          ep *= e1;
        }
      });
      for (int i = 0; i < sz; ++i) {
        real[i] += shell[i];
        absum[i] += std::abs(shell[i]);
      }
      const double w = shell_done(real);
      quiet = (w < shell_floor) ? quiet + 1 : 0;
      if (s >= s_min && quiet >= 2) {
        for (int i = 0; i < sz; ++i) tail[i] += std::abs(shell[i]);
        break;
      }
      if (s == opt.max_shells) throw NonConvergence("Ewald spatial sum did not converge");
    }
  }

  LatticeSumTable t;
  t.k = k;
  t.alpha = alpha;
  t.order_max = nmax;
  t.deflated.assign(deflated.begin(), deflated.end());
  t.values.resize(sz);
  const double a = k2 / (4.0 * eta2);
  const auto jn = specfun::bessel_j_seq(nmax, k);
  const auto yn = specfun::bessel_y_seq(nmax, k);
  for (int i = 0; i < sz; ++i) {
    const int nu = i - nmax;
    cplx v = spec[i] + real[i];
    if (nu == 0) v -= 1.0 + I1 / pi * std::expint(a);
    // H_{-n} = (-1)^n H_n; the angular factor e^{i nu theta} is already in place.
    if (nu < 0 && (nu & 1)) v = -v;
    t.values[i] = v;
    // Orders that vanish by symmetry are pure rounding residue, so measure
    // against the size of one nearest-neighbour term instead of |Q_n|.
    const int an = std::abs(nu);
    const double scale = std::max(1.0, std::hypot(jn[an], yn[an]));
    t.est_error = std::max(t.est_error, (tail[i] + 1e-15 * absum[i]) / scale);
  }
  if (t.est_error > opt.tol)
    throw NonConvergence("lattice sum error estimate " + std::to_string(t.est_error) + " above tolerance");
  return t;
}

cplx lattice_sum(int n, double k, BlochVector alpha, const Options& opt) {
  return lattice_sum_table(std::abs(n), k, alpha, opt)(n);
}

}  // namespace phonon::lattice
