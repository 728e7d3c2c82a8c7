#include <doctest.h>

#include <algorithm>

#include "phonon/capacity.hpp"
#include "phonon/spectra.hpp"

using namespace phonon;
namespace sp = phonon::spectra;

namespace {
const op::MaterialParams dilute{5000, 5000, 1, 1};
const op::MaterialParams nondilute{1000, 1000, 1, 1};

// non-dilute sweep shared by several cases; small enough to stay quick
const sp::BandStructure& coarse_sweep() {
  static const sp::BandStructure bs = sp::band_structure(nondilute, {0.25}, 3, 10, 2, 6.0);
  return bs;
}
}  // namespace

TEST_SUITE("spectra") {
  TEST_CASE("indicator basics") {
    CHECK(sp::singular_value_indicator(Eigen::MatrixXcd::Identity(5, 5)) == doctest::Approx(1.0));
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Random(6, 6);
    A.row(2).setZero();
    CHECK(sp::singular_value_indicator(A) == 0.0);
    Eigen::VectorXd scales;
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Random(6, 6);
    B.row(0) *= 1e6;
    sp::singular_value_indicator(B, &scales);
    CHECK(scales.size() == 6);
    CHECK(scales(0) == doctest::Approx(B.row(0).cwiseAbs().maxCoeff()));
    CHECK(sp::gram_indicator(B) == doctest::Approx(sp::singular_value_indicator(B)).epsilon(1e-6));
  }

  TEST_CASE("log determinant") {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(3, 3);
    A(0, 0) = 2.0;
    A(1, 1) = cplx(0.0, 3.0);
    A(2, 2) = -1e200;
    const auto ld = sp::log_determinant(A);
    CHECK(ld.logabs == doctest::Approx(std::log(6.0) + 200 * std::log(10.0)));
    CHECK(std::abs(ld.phase - cplx(0.0, -1.0)) < 1e-14);
  }

  TEST_CASE("Muller on scalar functions") {
    const auto r = sp::muller_refine([](cplx w) { return w * w - 2.0; }, 1.0, 1.5, 2.0);
    CHECK(r.converged);
    CHECK(r.root.real() == doctest::Approx(1.4142135624).epsilon(1e-10));
    const auto s = sp::muller_refine([](cplx w) { return (w - 0.3) * (w + 5.0); }, 0.25, 0.28, 0.33);
    CHECK(std::abs(s.root - 0.3) < 1e-10);
    const auto p = sp::muller_refine([](cplx w) { return w * w + 1.0; }, 0.1, 0.2, 0.3, 1e-10, 50, true);
    CHECK(p.root.imag() == 0.0);
  }

  TEST_CASE("bracketing local minima") {
    const std::vector<double> g{0, 1, 2, 3, 4, 5, 6};
    const auto b = sp::bracket_minima(g, {5, 3, 4, 4, 1, 2, 0});
    REQUIRE(b.size() == 2);
    CHECK(b[0].mid == 1);
    CHECK(b[1].lo == 3);
    CHECK(b[1].hi == 5);
    CHECK(sp::bracket_minima({}, {}).empty());
  }

  TEST_CASE("scan finds a single band below 0.3 in the dilute case") {
    const auto s = sp::scan_and_bracket(points::M, dilute, {0.05}, 7, 1e-3, 0.3);
    REQUIRE(s.brackets.size() == 1);
    sp::Options fine;
    fine.step_low /= 2;
    const auto f = sp::scan_and_bracket(points::M, dilute, {0.05}, 7, 1e-3, 0.3, fine);
    REQUIRE(f.brackets.size() == 1);
    CHECK(std::abs(f.brackets[0].mid - s.brackets[0].mid) <= 2e-3);
    CHECK(sp::scan_and_bracket(points::M, dilute, {0.05}, 7, 0.3, 0.3).brackets.empty());
  }

  TEST_CASE("refined dilute root at M") {
    sp::PointSolver ps(points::M, dilute, {0.05}, 7, 1.0);
    const auto scan = sp::scan_and_bracket(points::M, dilute, {0.05}, 7, 1e-3, 0.3);
    REQUIRE(scan.brackets.size() == 1);
    const auto r = ps.refine(scan.brackets[0]);
    REQUIRE(r.has_value());
    CHECK(r->indicator <= 1e-6);
    CHECK(r->omega >= scan.brackets[0].lo);
    CHECK(r->omega <= scan.brackets[0].hi);
    CHECK(r->omega > 0.15);
    CHECK(r->omega < 0.3);
  }

  TEST_CASE("first two bands") {
    const auto g = sp::first_two_bands(points::Gamma, nondilute, {0.25}, 3, 6.0);
    CHECK(g.first == 0.0);
    CHECK(g.second > 0.0);
    for (BlochVector a : {points::X, points::M, BlochVector{1.0, 0.4}}) {
      const auto [w1, w2] = sp::first_two_bands(a, nondilute, {0.25}, 3, 6.0);
      CHECK(w1 > 0.0);
      CHECK(w1 < w2);
    }
    CHECK_THROWS_AS(sp::first_two_bands(points::M, nondilute, {0.25}, 3, 0.1), BandNotFound);
  }

  TEST_CASE("roots are stable when the truncation grows") {
    sp::PointSolver a(points::X, dilute, {0.05}, 7, 6.0);
    sp::PointSolver b(points::X, dilute, {0.05}, 9, 6.0);
    const auto ra = a.roots(2), rb = b.roots(2);
    REQUIRE(ra.size() == 2);
    REQUIRE(rb.size() == 2);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(ra[i].omega - rb[i].omega) <= 1e-6 * (1 + ra[i].omega));
  }

  TEST_CASE("gap extraction") {
    sp::BandStructure bs;
    for (int i = 0; i < 4; ++i) bs.points.push_back({i / 3.0, {}, {1.0, 2.0}, {}, {}});
    auto [star, gap] = sp::extract_gap_and_star(bs);
    CHECK(star == 1.0);
    REQUIRE(gap.has_value());
    CHECK(gap->lo == 1.0);
    CHECK(gap->hi == 2.0);
    bs.points[1].omegas = {1.5, 1.7};
    bs.points[2].omegas = {0.5, 1.2};
    std::tie(star, gap) = sp::extract_gap_and_star(bs);
    CHECK(star == 1.5);
    CHECK_FALSE(gap.has_value());
  }

  TEST_CASE("path sampling") {
    const auto p = sp::path_samples(4);
    REQUIRE(p.size() == 13);
    CHECK(p.front().second == points::Gamma);
    CHECK(p[4].second == points::X);
    CHECK(p[8].second == points::M);
    CHECK(p.back().second == points::Gamma);
    CHECK(p.back().first == 1.0);
  }

  TEST_CASE("sweep invariants on a coarse non-dilute path") {
    const auto& bs = coarse_sweep();
    CHECK(bs.failures.empty());
    REQUIRE(bs.gap.has_value());
    CHECK(bs.gap->hi > bs.gap->lo);
    CHECK(bs.argmax_alpha == points::M);
    double mx = 0.0;
    for (const auto& p : bs.points) {
      REQUIRE(p.omegas.size() == 2);
      CHECK(p.omegas[0] < p.omegas[1]);
      mx = std::max(mx, p.omegas[0]);
      for (const auto& r : p.roots)
        if (!p.alpha.is_zero() || r.omega > 0) CHECK(r.indicator <= 1e-6);
    }
    CHECK(bs.omega_star == mx);
  }

  TEST_CASE("path reversal leaves omega_star and the gap unchanged") {
    auto rev = coarse_sweep();
    std::reverse(rev.points.begin(), rev.points.end());
    const auto [star, gap] = sp::extract_gap_and_star(rev);
    CHECK(std::abs(star - coarse_sweep().omega_star) < 1e-8);
    REQUIRE(gap.has_value());
    CHECK(std::abs(gap->lo - coarse_sweep().gap->lo) < 1e-8);
    CHECK(std::abs(gap->hi - coarse_sweep().gap->hi) < 1e-8);
  }

  TEST_CASE("first band falls to zero towards Gamma on both edges") {
    const auto& pts = coarse_sweep().points;
    // Gamma -> X edge read backwards, and the closing M -> Gamma edge
    for (int i = 1; i < 5; ++i) CHECK(pts[i].omegas[0] < pts[i + 1].omegas[0]);
    const std::size_t last = pts.size() - 1;
    for (std::size_t i = last - 4; i < last; ++i) CHECK(pts[i + 1].omegas[0] < pts[i].omegas[0]);
    CHECK(pts.front().omegas[0] == 0.0);
    CHECK(pts.back().omegas[0] == 0.0);
  }

  TEST_CASE("thread count does not change the sweep") {
    const auto one = sp::band_structure(nondilute, {0.25}, 3, 3, 2, 6.0, {}, 1);
    const auto two = sp::band_structure(nondilute, {0.25}, 3, 3, 2, 6.0, {}, 3);
    REQUIRE(one.points.size() == two.points.size());
    for (std::size_t i = 0; i < one.points.size(); ++i) CHECK(one.points[i].omegas == two.points[i].omegas);
  }

  TEST_CASE("invalid requests") {
    CHECK_THROWS_AS(sp::band_structure(nondilute, {0.25}, 3, 2, 2, 6.0), DomainError);
    CHECK_THROWS_AS(sp::band_structure(nondilute, {0.25}, 3, 5, 6, 6.0), DomainError);
  }
}
