#pragma once

#include <vector>

#include "phonon/types.hpp"

namespace phonon::specfun {

// J_0..J_order_max by normalized downward recurrence.
std::vector<double> bessel_j_seq(int order_max, double x);

// Y_0..Y_order_max; Y_0, Y_1 from the Neumann series in J, then upward recurrence.
// Throws DomainError for x <= 0.
std::vector<double> bessel_y_seq(int order_max, double x);

// Integer order, any sign (reflection J_{-n} = (-1)^n J_n).
double bessel_j(int n, double x);
double bessel_y(int n, double x);
cplx hankel1(int n, double x);

enum class Kind { J, H1 };

// C_n'(x) = (C_{n-1} - C_{n+1})/2.
cplx cyl_derivative(Kind kind, int n, double x);

// Values and derivatives for orders -N..N at one argument, as used by the
// multipole blocks. Index with at(n).
struct CylTable {
  int N = 0;
  double x = 0.0;
  std::vector<double> j, dj;
  std::vector<cplx> h, dh;

  double J(int n) const { return j[n + N]; }
  double dJ(int n) const { return dj[n + N]; }
  cplx H(int n) const { return h[n + N]; }
  cplx dH(int n) const { return dh[n + N]; }
};
CylTable cyl_table(int N, double x, bool with_hankel = true);

// Complex argument, |Im z| <= 1 and |z| <= 30. Ascending series (long double)
// for |z| <= 12, otherwise a Taylor expansion about Re z built from real-axis
// sequences.
std::vector<cplx> bessel_j_seq(int order_max, cplx z);
std::vector<cplx> bessel_y_seq(int order_max, cplx z);
cplx hankel1(int n, cplx z);

}  // namespace phonon::specfun
