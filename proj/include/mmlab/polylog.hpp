#ifndef MMLAB_POLYLOG_HPP
#define MMLAB_POLYLOG_HPP

#include <complex>
#include <vector>

#include "mmlab/rational.hpp"

namespace mml::polylog {

using cplx = std::complex<double>;

constexpr int kBernoulliMax = 32;

/// B_j for 0 <= j <= 32, convention B_1 = -1/2. Exact.
Rational bernoulli(int j);

/// Immutable table B_0..B_32, built once from the defining recurrence
///   sum_{j=0}^{m} C(m+1, j) B_j = 0   (m >= 1).
const std::vector<Rational>& bernoulli_table();

/// Exact binomial coefficient; requires the result to fit in 64 bits.
long long binomial(int n, int k);

/// Li_n(z), principal branch of the analytic continuation to C minus (1, inf).
/// n = 1 is -log(1-z). Throws std::domain_error on the cut (n >= 2, z real > 1)
/// and at z = 1 for n = 1.
cplx li(int n, cplx z);

/// Bloch-Wigner dilogarithm. Total function: zero on the real axis and at
/// 0, 1, infinity; continuous everywhere.
double bloch_wigner(cplx z);

/// The exact coefficients 2^j B_j / j!, j = 0..n-1, of the one-valued
/// polylogarithm modification.
std::vector<Rational> zagier_coefficients(int n);

/// L_n(z) = re_n( sum_j 2^j B_j/j! log^j|z| Li_{n-j}(z) ), re_n = Re for odd n,
/// Im for even n. One-valued on the whole sphere; L_n(0) = L_n(inf) = 0.
double zagier_l(int n, cplx z);

/// L-hat: L_n(z) for odd n, i*L_n(z) for even n.
cplx zagier_l_hat(int n, cplx z);

/// beta_{k,p} = (-1)^p (p-1)!/(k+p+1)! sum_{j=0}^{[(p-1)/2]}
///              C(k+p+1, 2j+1) 2^{k+p-2j} B_{k+p-2j}.  Exact.
Rational beta_coeff(int k, int p);

/// D(x)+D(1-xy)+D(y)+D((1-y)/(1-xy))+D((1-x)/(1-xy)).
/// Throws std::domain_error when xy = 1 or x, y in {0, 1}.
double five_term_defect(cplx x, cplx y);

/// Left side of the nine-term trilogarithm relation
///   L3(x(1-y)^2/(y(1-x)^2)) + L3(xy) + L3(x/y)
///   - 2L3(x(1-y)/(y(1-x))) - 2L3(y(1-x)/(y-1)) - 2L3(x(1-y)/(x-1))
///   - 2L3((1-y)/(1-x)) - 2L3(x) - 2L3(y) + 2L3(1).
/// Valid region (mapped empirically): 0 < x <= y < 1.
double spence_kummer_defect(double x, double y);

/// zeta(s) for integer s >= 2 (Euler-Maclaurin; used internally by li).
double zeta_em(int s);

namespace detail {
/// Li_n without the cut check: for real z > 1 returns the limit from the
/// upper half-plane. The one-valued combinations (L_n, D) need this.
cplx li_unchecked(int n, cplx z);
}  // namespace detail

}  // namespace mml::polylog

#endif
