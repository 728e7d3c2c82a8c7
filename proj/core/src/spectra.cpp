#include "phonon/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace phonon::spectra {

double singular_value_indicator(const Eigen::MatrixXcd& A, Eigen::VectorXd* scales) {
  Eigen::VectorXd s = A.cwiseAbs().rowwise().maxCoeff();
  if (scales) *scales = s;
  if ((s.array() == 0.0).any()) return 0.0;
  const Eigen::MatrixXcd B = s.cwiseInverse().asDiagonal() * A;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
  return svd.singularValues().minCoeff();
}

double gram_indicator(const Eigen::MatrixXcd& A) {
  const Eigen::VectorXd s = A.cwiseAbs().rowwise().maxCoeff();
  if ((s.array() == 0.0).any()) return 0.0;
  const Eigen::MatrixXcd B = s.cwiseInverse().asDiagonal() * A;
  const Eigen::MatrixXcd G = B.adjoint() * B;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(0)));
}

LogDet log_determinant(const Eigen::MatrixXcd& A) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  LogDet d;
  d.phase = static_cast<double>(lu.permutationP().determinant());
  const auto& LU = lu.matrixLU();
  for (Eigen::Index i = 0; i < LU.rows(); ++i) {
    const cplx u = LU(i, i);
    const double a = std::abs(u);
    if (a == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};
    d.logabs += std::log(a);
    d.phase *= u / a;
  }
  return d;
}

std::vector<Bracket> bracket_minima(const std::vector<double>& grid, const std::vector<double>& values) {
  std::vector<Bracket> out;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i)
    if (values[i] < values[i - 1] && values[i] <= values[i + 1])
      out.push_back({grid[i - 1], grid[i], grid[i + 1], values[i]});
  return out;
}

MullerResult muller_refine(const std::function<cplx(cplx)>& f, cplx x0, cplx x1, cplx x2, double tol, int max_iter,
                           bool project_real) {
  if (x0 == x1 || x1 == x2 || x0 == x2) throw DomainError("muller_refine: starts must be distinct");
  cplx f0 = f(x0), f1 = f(x1), f2 = f(x2);
  MullerResult r;
  r.root = x2;
  for (int it = 1; it <= max_iter; ++it) {
    r.iterations = it;
    if (f2 == 0.0) {
      r.converged = true;
      return r;
    }
    const cplx h1 = x1 - x0, h2 = x2 - x1;
    const cplx d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
    const cplx a = (d2 - d1) / (h2 + h1);
    const cplx b = a * h2 + d2;
    const cplx disc = std::sqrt(b * b - 4.0 * f2 * a);
    const cplx den = std::abs(b + disc) >= std::abs(b - disc) ? b + disc : b - disc;
    cplx dx = den != 0.0 ? -2.0 * f2 / den : cplx(1e-3 * (1.0 + std::abs(x2)));
    cplx x3 = x2 + dx;
    if (project_real) x3 = x3.real();
    const double step = std::abs(x3 - x2);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
    x2 = x3;
    r.root = x2;
    if (step < tol + 1e-10 * std::abs(x2)) {
      r.converged = true;
      return r;
    }
    if (x2 == x1) {  // projection stalled on a repeated point
      r.converged = true;
      return r;
    }
    f2 = f(x2);
  }
  return r;
}

namespace {

std::vector<lattice::RecipPoint> deflation_set(BlochVector alpha, double kmax, double pad) {
  return lattice::reciprocal_points_within(alpha, kmax + pad);
}

}  // namespace

PointSolver::PointSolver(BlochVector alpha, op::MaterialParams mat, op::DiskCrystal crystal, int N,
                         double omega_max, Options opt)
    : alpha_(alpha), mat_(mat), crystal_(crystal), N_(N), omega_max_(omega_max), opt_(opt) {
  mat_.validate();
  crystal_.validate();
  if (!(omega_max > 0.0)) throw DomainError("omega_max must be positive");
  deflated_ = deflation_set(alpha_, omega_max_ / mat_.v(), opt_.deflate_pad);
}

Eigen::MatrixXcd PointSolver::matrix(double omega) const {
  return op::assemble_bordered(omega, mat_, alpha_, crystal_, N_, deflated_, opt_.lattice).entries;
}

double PointSolver::indicator(double omega) const { return singular_value_indicator(matrix(omega)); }

double PointSolver::scan_value(double omega) const { return gram_indicator(matrix(omega)); }

std::vector<double> PointSolver::grid(double lo, double hi) const {
  std::vector<double> g;
  // Integer stepping keeps the grid identical across runs and platforms.
  const long nlow = static_cast<long>(std::floor(opt_.step_split / opt_.step_low + 1e-9));
  for (long i = 1;; ++i) {
    const double w = i <= nlow ? i * opt_.step_low : opt_.step_split + (i - nlow) * opt_.step_high;
    if (w > hi + 1e-12) break;
    if (w >= lo - 1e-12) g.push_back(w);
  }
  return g;
}

std::optional<Root> PointSolver::refine(const Bracket& b) const {
  Eigen::VectorXd s;
  singular_value_indicator(matrix(b.mid), &s);
  const Eigen::VectorXd inv = s.cwiseInverse();
  bool have_ref = false;
  double ref = 0.0;
  auto f = [&](cplx w) -> cplx {
    if (!(w.real() > 0.0) || w.real() > 2.0 * omega_max_) throw DomainError("iterate left the search range");
    const Eigen::MatrixXcd B = inv.asDiagonal() * matrix(w.real());
    const auto d = log_determinant(B);
    if (!std::isfinite(d.logabs)) return 0.0;
    if (!have_ref) {
      ref = d.logabs;
      have_ref = true;
    }
    return d.phase * std::exp(d.logabs - ref);
  };
  MullerResult m;
  try {
    m = muller_refine(f, b.lo, b.hi, b.mid, opt_.muller_tol, opt_.max_iter, true);
  } catch (const Error&) {
    return std::nullopt;
  }
  const double w = m.root.real();
  const double slack = 1e-9 * (1.0 + w);
  if (!(w >= b.lo - slack && w <= b.hi + slack)) return std::nullopt;
  const double ind = indicator(w);
  if (!(ind <= opt_.accept)) return std::nullopt;
  return Root{w, ind, m.iterations, m.converged};
}

std::vector<Root> PointSolver::roots(int count) const {
  std::vector<Root> out;
  if (count <= 0) return out;
  const bool gamma = alpha_.is_zero();
  if (gamma) {
    out.push_back({0.0, 0.0, 0, true});
    if (static_cast<int>(out.size()) >= count) return out;
  }
  const auto g = grid(0.0, omega_max_);
  std::vector<double> v;
  v.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    v.push_back(scan_value(g[i]));
    if (i < 2) continue;
    if (!(v[i - 1] < v[i - 2] && v[i - 1] <= v[i])) continue;
    auto r = refine({g[i - 2], g[i - 1], g[i], v[i - 1]});
    if (!r) continue;
    if (gamma && r->omega < opt_.step_low) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Root& x) {
      return std::abs(x.omega - r->omega) <= 1e-8 * (1.0 + r->omega);
    });
    if (dup) continue;
    out.push_back(*r);
    if (static_cast<int>(out.size()) >= count) break;
  }
  std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) { return a.omega < b.omega; });
  return out;
}

ScanResult scan_and_bracket(BlochVector alpha, const op::MaterialParams& mat, const op::DiskCrystal& crystal, int N,
                            double omega_lo, double omega_hi, const Options& opt) {
  ScanResult res;
  if (!(omega_hi > omega_lo)) return res;
  PointSolver ps(alpha, mat, crystal, N, omega_hi, opt);
  const auto g = ps.grid(omega_lo, omega_hi);
  std::vector<double> v;
  v.reserve(g.size());
  for (double w : g) v.push_back(ps.scan_value(w));
  res.brackets = bracket_minima(g, v);
  // Flag stretches near empty-lattice resonances; deflation keeps them usable.
  std::optional<double> start;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const bool near = lattice::empty_lattice_margin(g[i] / mat.v(), alpha) < opt.guard;
    if (near && !start) start = g[i];
    if (!near && start) {
      res.flagged.emplace_back(*start, g[i - 1]);
      start.reset();
    }
  }
  if (start) res.flagged.emplace_back(*start, g.back());
  return res;
}

std::pair<double, double> first_two_bands(BlochVector alpha, const op::MaterialParams& mat,
                                          const op::DiskCrystal& crystal, int N, double omega_max,
                                          const Options& opt) {
  PointSolver ps(alpha, mat, crystal, N, omega_max, opt);
  const auto r = ps.roots(2);
  if (r.size() < 2) throw BandNotFound("fewer than two bands below omega_max");
  return {r[0].omega, r[1].omega};
}

std::vector<std::pair<double, BlochVector>> path_samples(int resolution) {
  if (resolution < 3) throw DomainError("path resolution must be >= 3 per edge");
  std::vector<std::pair<double, BlochVector>> out;
  const double r = resolution;
  for (int j = 0; j < resolution; ++j) out.push_back({j / (3.0 * r), {pi * j / r, 0.0}});
  for (int j = 0; j < resolution; ++j) out.push_back({(1.0 + j / r) / 3.0, {pi, pi * j / r}});
  for (int j = 0; j < resolution; ++j) {
    const double t = 1.0 - j / r;
    out.push_back({(2.0 + j / r) / 3.0, {pi * t, pi * t}});
  }
  out.push_back({1.0, {0.0, 0.0}});
  return out;
}

std::pair<double, std::optional<Gap>> extract_gap_and_star(const BandStructure& bs) {
  double star = -1.0, low2 = std::numeric_limits<double>::infinity();
  bool two = false;
  for (const auto& p : bs.points) {
    if (!p.omegas.empty()) star = std::max(star, p.omegas[0]);
    if (p.omegas.size() >= 2) {
      low2 = std::min(low2, p.omegas[1]);
      two = true;
    }
  }
  std::optional<Gap> gap;
  if (two && low2 > star) gap = Gap{star, low2};
  return {star, gap};
}

BandStructure band_structure(const op::MaterialParams& mat, const op::DiskCrystal& crystal, int N, int resolution,
                             int band_count, double omega_max, const Options& opt, int threads) {
  if (band_count < 1 || band_count > 5) throw DomainError("band_count must lie in [1, 5]");
  const auto samples = path_samples(resolution);
  BandStructure bs;
  bs.points.resize(samples.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < samples.size();) {
      auto& p = bs.points[i];
      p.s = samples[i].first;
      p.alpha = samples[i].second;
      try {
        PointSolver ps(p.alpha, mat, crystal, N, omega_max, opt);
        p.roots = ps.roots(band_count);
        for (const auto& r : p.roots) p.omegas.push_back(r.omega);
        if (static_cast<int>(p.omegas.size()) < band_count)
          p.error = "found " + std::to_string(p.omegas.size()) + " of " + std::to_string(band_count) +
                    " bands below omega_max";
      } catch (const Error& e) {
        p.error = e.what();
      }
    }
  };
  const int nt = std::max(1, threads);
  if (nt == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(work);
  }
  for (const auto& p : bs.points)
    if (!p.error.empty())
      bs.failures.push_back("s=" + std::to_string(p.s) + " alpha=(" + std::to_string(p.alpha.x) + "," +
                            std::to_string(p.alpha.y) + "): " + p.error);
  auto [star, gap] = extract_gap_and_star(bs);
  bs.omega_star = star;
  bs.gap = gap;
  for (const auto& p : bs.points)
    if (!p.omegas.empty() && p.omegas[0] == star) {
      bs.argmax_alpha = p.alpha;
      break;
    }
  return bs;
}

}  // namespace phonon::spectra
