#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "mmlab/polylog.hpp"
#include "mmlab/quad.hpp"

using namespace mml;
using polylog::cplx;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Raw defining series, summed term by term. Oracle: independent of the
// continuation machinery.
cplx li_series_oracle(int n, cplx z, int kmax = 2000000) {
    cplx s = 0.0, p = 1.0;
    for (int k = 1; k <= kmax; ++k) {
        p *= z;
        cplx t = p / std::pow(static_cast<double>(k), n);
        s += t;
        if (std::abs(t) < 1e-19) break;
    }
    return s;
}

std::mt19937_64& rng() {
    static std::mt19937_64 gen(20260809);
    return gen;
}

cplx random_point(double rlo, double rhi) {
    std::uniform_real_distribution<double> rad(rlo, rhi), ang(0.0, 2.0 * kPi);
    double r = rad(rng()), t = ang(rng());
    return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace

TEST_CASE("bernoulli numbers: defining values and convention") {
    CHECK(polylog::bernoulli(0) == Rational(1));
    CHECK(polylog::bernoulli(1) == Rational(-1, 2));
    CHECK(polylog::bernoulli(2) == Rational(1, 6));
    for (int j = 3; j <= 31; j += 2) CHECK(polylog::bernoulli(j) == Rational(0));
    // frozen value obtained from the defining recurrence
    CHECK(polylog::bernoulli(12) == Rational(-691, 2730));
    CHECK(polylog::bernoulli(32) == Rational(-7709321041217LL, 510));
    CHECK_THROWS_AS(polylog::bernoulli(33), std::out_of_range);
    CHECK_THROWS_AS(polylog::bernoulli(-1), std::out_of_range);
}

TEST_CASE("bernoulli recurrence holds exactly") {
    for (int m = 1; m <= 31; ++m) {
        Rational s(0);
        for (int j = 0; j <= m; ++j)
            s += Rational(polylog::binomial(m + 1, j)) * polylog::bernoulli(j);
        CHECK(s == Rational(0));
    }
}

TEST_CASE("modification coefficients 2^j B_j / j!") {
    auto c2 = polylog::zagier_coefficients(2);
    REQUIRE(c2.size() == 2);
    CHECK(c2[0] == Rational(1));
    CHECK(c2[1] == Rational(-1));
    auto c3 = polylog::zagier_coefficients(3);
    REQUIRE(c3.size() == 3);
    CHECK(c3[0] == Rational(1));
    CHECK(c3[1] == Rational(-1));
    CHECK(c3[2] == Rational(1, 3));
}

TEST_CASE("li: basic values") {
    CHECK(std::abs(polylog::li(1, 0.5) - cplx(std::log(2.0))) < 1e-15);
    CHECK(std::abs(polylog::li(2, 1.0) - cplx(kPi * kPi / 6.0)) < 1e-14);
    // alternating series oracle for Li_3(-1) = -(3/4) zeta(3)
    cplx oracle = li_series_oracle(3, -1.0);
    CHECK(std::abs(polylog::li(3, -1.0) - oracle) < 1e-14);
    CHECK(std::abs(polylog::li(3, -1.0).real() + 0.75 * polylog::zeta_em(3)) < 1e-14);
}

TEST_CASE("li: continuation agrees with the raw series where both converge") {
    // covers the series/annulus boundary and the annulus up to |z| = 0.999
    for (int i = 0; i < 60; ++i) {
        cplx z = random_point(0.3, 0.999);
        for (int n = 1; n <= 5; ++n) {
            cplx a = polylog::li(n, z);
            cplx b = li_series_oracle(n, z);
            CHECK(std::abs(a - b) <= 1e-13 * std::max(1.0, std::abs(b)));
        }
    }
}

TEST_CASE("li: duplication ties the continuation regions together") {
    // Li_n(z^2) = 2^{n-1} (Li_n(z) + Li_n(-z)) holds identically; with
    // |z| in (1.05, 1.4) the left side goes through the inversion route and
    // the right side through the expansion around 1.
    int done = 0;
    while (done < 60) {
        cplx z = random_point(1.05, 1.4);
        cplx z2 = z * z;
        if (std::abs(z.imag()) < 0.05 || std::abs(z2.imag()) < 0.05) continue;
        for (int n = 2; n <= 5; ++n) {
            cplx lhs = polylog::li(n, z2);
            cplx rhs = std::pow(2.0, n - 1) * (polylog::li(n, z) + polylog::li(n, -z));
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
        }
        // and once more with |z^2| pushed above 2 so the inversion route runs
        cplx big = z2 * (2.3 / std::abs(z2));
        cplx sq = std::sqrt(big);
        for (int n = 2; n <= 5; ++n) {
            cplx lhs = polylog::li(n, big);
            cplx rhs = std::pow(2.0, n - 1) * (polylog::li(n, sq) + polylog::li(n, -sq));
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
        }
        ++done;
    }
}

TEST_CASE("li: domain errors") {
    CHECK_THROWS_AS(polylog::li(1, 1.0), std::domain_error);
    CHECK_THROWS_AS(polylog::li(2, 1.5), std::domain_error);
    CHECK_THROWS_AS(polylog::li(3, 100.0), std::domain_error);
    CHECK_NOTHROW(polylog::li(2, cplx(1.5, 1e-8)));
}

TEST_CASE("bloch_wigner: zero on the real axis, value at the hexagonal point") {
    CHECK(polylog::bloch_wigner(0.0) == 0.0);
    CHECK(polylog::bloch_wigner(1.0) == 0.0);
    CHECK(polylog::bloch_wigner(-3.7) == 0.0);
    CHECK(polylog::bloch_wigner(17.0) == 0.0);
    CHECK(polylog::bloch_wigner(cplx(1e308, 0.0)) == 0.0);

    // D(exp(i pi/3)) equals the Clausen integral -int_0^{pi/3} log|2 sin(t/2)| dt.
    quad::QuadResult cl = quad::adaptive_1d(
        [](double t) { return -std::log(2.0 * std::sin(0.5 * t)); }, 0.0, kPi / 3.0, 1e-13);
    cplx xi6(0.5, 0.5 * std::sqrt(3.0));
    double d = polylog::bloch_wigner(xi6);
    CHECK(std::abs(d - cl.value) < 1e-11);
    CHECK(d == doctest::Approx(1.0149416).epsilon(1e-6));
}

TEST_CASE("bloch_wigner: conjugation antisymmetry") {
    for (int i = 0; i < 100; ++i) {
        cplx z = random_point(0.05, 20.0);
        double a = polylog::bloch_wigner(z);
        double b = polylog::bloch_wigner(std::conj(z));
        CHECK(std::abs(a + b) < 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("bloch_wigner: continuity across (1, inf)") {
    for (double x : {1.2, 1.7, 2.3, 2.9}) {
        for (double eps : {1e-4, 1e-6}) {
            double up = polylog::bloch_wigner(cplx(x, eps));
            double dn = polylog::bloch_wigner(cplx(x, -eps));
            CHECK(std::abs(up - dn) < 10.0 * eps);  // slope-bounded collapse
        }
    }
}

TEST_CASE("zagier_l reduces to bloch_wigner at order 2") {
    for (int i = 0; i < 100; ++i) {
        cplx z = random_point(0.05, 20.0);
        CHECK(std::abs(polylog::zagier_l(2, z) - polylog::bloch_wigner(z)) < 1e-12);
    }
}

TEST_CASE("zagier_l: special values and degenerate points") {
    CHECK(std::abs(polylog::zagier_l(3, 1.0) - polylog::zeta_em(3)) < 1e-14);
    CHECK(polylog::zagier_l(3, 0.0) == 0.0);
    CHECK(polylog::zagier_l(2, 0.0) == 0.0);
    double inf = std::numeric_limits<double>::infinity();
    CHECK(polylog::zagier_l(4, cplx(inf, 0.0)) == 0.0);
    CHECK_THROWS_AS(polylog::zagier_l(1, 0.5), std::domain_error);
}

TEST_CASE("zagier_l: inversion and conjugation, orders 2..4") {
    for (int n = 2; n <= 4; ++n) {
        double sign = (n % 2 == 1) ? 1.0 : -1.0;
        for (int i = 0; i < 200; ++i) {
            cplx z = random_point(0.1, 10.0);
            double a = polylog::zagier_l(n, z);
            CHECK(std::abs(polylog::zagier_l(n, 1.0 / z) - sign * a) < 1e-11);
            CHECK(std::abs(polylog::zagier_l(n, std::conj(z)) - sign * a) < 1e-12);
        }
    }
}

TEST_CASE("zagier_l: one-valued across the cut") {
    for (double x : {1.5, 2.5, 7.0}) {
        for (int n = 2; n <= 4; ++n) {
            double on = polylog::zagier_l(n, cplx(x, 0.0));
            double up = polylog::zagier_l(n, cplx(x, 1e-9));
            double dn = polylog::zagier_l(n, cplx(x, -1e-9));
            CHECK(std::abs(up - dn) < 1e-7);
            CHECK(std::abs(on - up) < 1e-7);
        }
    }
}

TEST_CASE("zagier_l_hat") {
    CHECK(std::abs(polylog::zagier_l_hat(3, 1.0) - cplx(polylog::zeta_em(3), 0.0)) < 1e-14);
    CHECK(std::abs(polylog::zagier_l_hat(4, 1.0)) < 1e-14);  // Im Li_4(1) = 0
    for (int i = 0; i < 20; ++i) {
        cplx z = random_point(0.1, 5.0);
        cplx h = polylog::zagier_l_hat(2, z);
        CHECK(h.real() == 0.0);
        CHECK(std::abs(h.imag() - polylog::bloch_wigner(z)) < 1e-12);
    }
}

TEST_CASE("beta coefficients") {
    CHECK(polylog::beta_coeff(1, 1) == Rational(-1, 3));
    CHECK(polylog::beta_coeff(2, 1) == Rational(0));  // carries B_3 = 0
    // single-term sum when p <= 2: hand-evaluated (-1)(0!/5!) C(5,1) 2^4 B_4
    CHECK(polylog::beta_coeff(3, 1) == Rational(1, 45));
    CHECK(polylog::beta_coeff(1, 2) == Rational(0));
    CHECK_THROWS_AS(polylog::beta_coeff(0, 0), std::domain_error);
}

TEST_CASE("five-term relation") {
    CHECK(std::abs(polylog::five_term_defect(cplx(0.3, 0.2), cplx(0.5, -0.1))) < 1e-10);
    for (int i = 0; i < 50; ++i) {
        cplx t = random_point(0.1, 0.9);
        CHECK(std::abs(polylog::five_term_defect(t, std::conj(t))) < 1e-10);
    }
    double worst = 0.0;
    int done = 0;
    while (done < 1000) {
        cplx x = random_point(0.02, 0.98), y = random_point(0.02, 0.98);
        if (std::abs(1.0 - x * y) < 1e-3) continue;
        worst = std::max(worst, std::abs(polylog::five_term_defect(x, y)));
        ++done;
    }
    CHECK(worst < 1e-10);
    CHECK_THROWS_AS(polylog::five_term_defect(0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(polylog::five_term_defect(cplx(2.0, 0.0), cplx(0.5, 0.0)),
                    std::domain_error);
}

TEST_CASE("spence-kummer relation on 0 < x <= y < 1") {
    CHECK(std::abs(polylog::spence_kummer_defect(0.2, 0.5)) < 1e-9);
    CHECK(std::abs(polylog::spence_kummer_defect(0.3, 0.3)) < 1e-9);  // diagonal collapse
    double worst = 0.0;
    for (int i = 1; i < 25; ++i)
        for (int j = i; j < 25; ++j)
            worst = std::max(worst,
                             std::abs(polylog::spence_kummer_defect(i / 25.0, j / 25.0)));
    CHECK(worst < 1e-9);
    CHECK_THROWS_AS(polylog::spence_kummer_defect(0.5, 0.2), std::domain_error);
    CHECK_THROWS_AS(polylog::spence_kummer_defect(-0.1, 0.5), std::domain_error);
}
