#ifndef MMLAB_CLOSEDFORMS_HPP
#define MMLAB_CLOSEDFORMS_HPP

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mmlab/mahler.hpp"

namespace mml::closedform {

/// Riemann zeta at integer s >= 2 via the accelerated alternating series.
double zeta(int s);

enum class Character { chi_minus3, chi_5 };

/// Dirichlet L(chi, s) for s >= 2 through the Hurwitz-zeta decomposition
/// L(chi, s) = q^{-s} sum_a chi(a) zeta(s, a/q).
double dirichlet_l(int s, Character chi);

/// Hurwitz zeta(s, x) for integer s >= 2 and x in (0, 1].
double hurwitz_zeta(int s, double x);

/// The distinguished real roots phi1 in [0,1] of x^{m+n} + x^n - 1 and
/// phi2 in [1, inf) of x^{m+n} - x^n - 1.
struct PhiRoots {
    int m = 1, n = 1;
    double phi1 = 0.0, phi2 = 0.0;
};
PhiRoots phi_roots(int m, int n);

/// (3 sqrt 3 / 4 pi) L(chi_{-3}, 2): the closed form of m(1+x+y).
double rhs_smyth();

/// (2n/pi^2)(L3(phi2^m) - L3(-phi1^m)) + (2m/pi^2)(L3(phi1^n) - L3(-phi2^n)).
double rhs_res(int m, int n);

/// 9 zeta(3) / (2 pi^2): the closed form of m((1-x)(1-y) - (1-w)(1-z)).
double rhs_det3();

/// zeta_{Q(sqrt 5)}(s) = zeta(s) L(chi_5, s).
double dedekind_zeta_sqrt5(int s);

/// A verifiable identity: a Mahler-measure recipe, a closed-form value, and
/// a tolerance (pass when |lhs - rhs| <= max(tolerance, 3 * std_error)).
struct Identity {
    std::string id;
    measure::MahlerRequest lhs;
    std::function<double()> rhs;
    double tolerance = 1e-6;
    std::string description;
};

const std::vector<Identity>& registry();
const Identity* find_identity(std::string_view id);

}  // namespace mml::closedform

#endif
