#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "phonon/operator.hpp"
#include "phonon/spectra.hpp"

using namespace phonon;

namespace {
lattice::LatticeSumTable zero_table(int order_max) {
  lattice::LatticeSumTable t;
  t.order_max = order_max;
  t.values.assign(2 * order_max + 1, 0.0);
  return t;
}
}  // namespace

TEST_SUITE("operator") {
  TEST_CASE("inner block example and order symmetry") {
    const auto [s, ds] = op::inner_block_diag(0, 1.0, 1.0);
    const cplx ref = cplx(0.0, -pi / 2) * std::cyl_bessel_j(0.0, 1.0) *
                     cplx(std::cyl_bessel_j(0.0, 1.0), std::cyl_neumann(0.0, 1.0));
    CHECK(std::abs(s - ref) < 1e-14);
    CHECK(s.real() == doctest::Approx(0.10614).epsilon(1e-4));
    CHECK(s.imag() == doctest::Approx(-0.91975).epsilon(1e-4));
    for (int n = 1; n <= 6; ++n) {
      const auto p = op::inner_block_diag(n, 2.3, 0.2);
      const auto q = op::inner_block_diag(-n, 2.3, 0.2);
      CHECK(std::abs(p.first - q.first) < 1e-15 * std::abs(p.first));
      CHECK(std::abs(p.second - q.second) < 1e-15 * std::abs(p.second));
    }
    CHECK_THROWS_AS(op::inner_block_diag(0, 0.0, 0.1), DomainError);
  }

  TEST_CASE("jump identity: exterior minus interior derivative is one") {
    const auto Q = zero_table(30);
    for (double x : {0.05, 0.2, 1.0, 3.7, 12.0, 55.0, 140.0, 300.0}) {
      for (int n = -15; n <= 15; ++n) {
        const auto out = op::outer_block_entries(n, n, x, 1.0, Q);
        const auto in = op::inner_block_diag(n, x, 1.0);
        CHECK_MESSAGE(std::abs(out.second - in.second - 1.0) < 1e-10, "n=" << n << " x=" << x);
        CHECK(std::abs(out.first - in.first) < 1e-12 * std::abs(in.first));
      }
    }
  }

  TEST_CASE("odd order differences carry no lattice part at M") {
    const double k = 1.1, R = 0.1;
    const auto Q = lattice::lattice_sum_table(8, k, points::M);
    for (int m = -4; m <= 4; ++m)
      for (int n = -4; n <= 4; ++n)
        if ((n - m) % 2) CHECK(std::abs(op::outer_block_entries(m, n, k, R, Q).first) < 1e-9);
    CHECK_THROWS_AS(op::outer_block_entries(-4, 5, k, R, lattice::lattice_sum_table(6, k, points::M)),
                    MissingLatticeOrder);
  }

  TEST_CASE("matrix shape and contrast scaling") {
    const op::MaterialParams m1{5000, 5000, 1, 1}, m2{10000, 10000, 1, 1};  // same v, delta halves
    const auto A = op::assemble_characteristic_matrix(0.2, m1, points::M, {0.05}, 3);
    const auto B = op::assemble_characteristic_matrix(0.2, m2, points::M, {0.05}, 3);
    CHECK(A.entries.rows() == 14);
    CHECK(A.entries.cols() == 14);
    CHECK(A.border == 0);
    const int b = A.block();
    CHECK((A.entries.topRows(b) - B.entries.topRows(b)).norm() < 1e-14);
    CHECK((A.entries.bottomLeftCorner(b, b) - B.entries.bottomLeftCorner(b, b)).norm() < 1e-14);
    CHECK((A.entries.bottomRightCorner(b, b) - 2.0 * B.entries.bottomRightCorner(b, b)).norm() <
          1e-12 * A.entries.bottomRightCorner(b, b).norm());
  }

  TEST_CASE("dilute matrix at omega = 0.2 is regular") {
    const auto A = op::assemble_characteristic_matrix(0.2, {5000, 5000, 1, 1}, points::M, {0.05}, 7);
    const double s = spectra::singular_value_indicator(A.entries);
    CHECK(s > 1e-6);
    CHECK(std::isfinite(s));
  }

  TEST_CASE("bordering preserves the determinant up to the pole factor") {
    const op::MaterialParams mat{1000, 1000, 1, 1};
    const BlochVector a{0.7, 0.3};
    const double omega = 3.0;  // k = 3, away from every |q|
    const std::vector<lattice::RecipPoint> d{{0, 0}, {-1, 0}};
    const auto A = op::assemble_characteristic_matrix(omega, mat, a, {0.2}, 3);
    const auto B = op::assemble_bordered(omega, mat, a, {0.2}, 3, d);
    CHECK(B.border == 2);
    CHECK(B.entries.rows() == A.entries.rows() + 2);
    const auto la = spectra::log_determinant(A.entries);
    const auto lb = spectra::log_determinant(B.entries);
    double lpole = 0.0;
    cplx phase = 1.0;
    for (const auto& p : d) {
      const double f = lattice::qnorm(a, p) * lattice::qnorm(a, p) - omega * omega;
      lpole += std::log(std::abs(f));
      phase *= f < 0 ? -1.0 : 1.0;
    }
    CHECK(lb.logabs == doctest::Approx(la.logabs + lpole).epsilon(1e-9));
    CHECK(std::abs(lb.phase - la.phase * phase) < 1e-8);
  }

  TEST_CASE("bordered matrix stays finite across an empty-lattice resonance") {
    const op::MaterialParams mat{1000, 1000, 1, 1};
    const BlochVector a{0.7, 0.3};
    const std::vector<lattice::RecipPoint> d{{0, 0}};
    const double k0 = lattice::qnorm(a, {0, 0});
    for (double w : {k0 - 1e-4, k0, k0 + 1e-4}) {
      const auto B = op::assemble_bordered(w, mat, a, {0.2}, 2, d);
      CHECK(B.entries.allFinite());
    }
  }

  TEST_CASE("quasi-static matrix") {
    const auto S = op::quasistatic_matrix(points::M, 0.05, 4);
    CHECK(S.rows() == 9);
    CHECK((S - S.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(S(4, 4).real() == doctest::Approx(-0.11891732641).epsilon(1e-9));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S);
    CHECK(es.eigenvalues().maxCoeff() < 0.0);

    op::QuasiStaticOptions o60, o120;
    o120.cutoff = 120;
    const auto S60 = op::quasistatic_matrix({1.2, 0.5}, 0.05, 3, o60);
    const auto S120 = op::quasistatic_matrix({1.2, 0.5}, 0.05, 3, o120);
    CHECK((S60 - S120).cwiseAbs().maxCoeff() < 1e-8);

    CHECK_THROWS_AS(op::quasistatic_matrix(points::Gamma, 0.05, 2), ZeroAlpha);
  }

  TEST_CASE("quasi-static matrix under alpha -> -alpha") {
    const int N = 3;
    const BlochVector a{1.2, -0.4};
    const auto S = op::quasistatic_matrix(a, 0.1, N);
    const auto T = op::quasistatic_matrix({-a.x, -a.y}, 0.1, N);
    for (int m = -N; m <= N; ++m)
      for (int n = -N; n <= N; ++n) CHECK(std::abs(T(m + N, n + N) - std::conj(S(-m + N, -n + N))) < 1e-12);
  }
}
