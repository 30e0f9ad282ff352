#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mmlab/forms.hpp"
#include "mmlab/forms_checks.hpp"
#include "mmlab/polylog.hpp"
#include "mmlab/quad.hpp"

using namespace mml;
using forms::cplx;
using expr::LaurentExpr;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

LaurentExpr X() { return LaurentExpr::variable("x"); }
LaurentExpr Y() { return LaurentExpr::variable("y"); }
LaurentExpr Z() { return LaurentExpr::variable("z"); }
LaurentExpr W() { return LaurentExpr::variable("w"); }
}  // namespace

TEST_CASE("eta2 antisymmetry and normalization") {
    CHECK(forms::eta2(X(), X()).is_zero());
    auto d = forms::eta2(X(), Y()) + forms::eta2(Y(), X());
    CHECK(d.is_zero());
}

TEST_CASE("eta3 cyclic symmetry as normalized expressions") {
    auto a = forms::eta3(X(), Y(), Z());
    auto b = forms::eta3(Y(), Z(), X());
    CHECK((a - b).is_zero());
    // antisymmetry under swapping two slots
    auto c = forms::eta3(Y(), X(), Z());
    CHECK((a + c).is_zero());
}

TEST_CASE("wedge normalization never changes pullback values") {
    // build the same 2-form with wedge factors in both orders
    auto t1 = forms::FormExpr::from_terms(
        2, {forms::FormTerm{1.0,
                            {forms::CoefficientFn::log_abs(X())},
                            {forms::Basis1Form::dlog_abs(Y()), forms::Basis1Form::darg(X())}}});
    auto t2 = forms::FormExpr::from_terms(
        2, {forms::FormTerm{-1.0,
                            {forms::CoefficientFn::log_abs(X())},
                            {forms::Basis1Form::darg(X()), forms::Basis1Form::dlog_abs(Y())}}});
    forms::Patch p;
    p.dim = 2;
    p.vars = {"x", "y"};
    p.map = [](std::span<const double> u) {
        return std::vector<cplx>{cplx(1.1 + u[0], 0.3), cplx(0.7, 0.9 - u[1])};
    };
    std::vector<double> u{0.4, 0.5};
    std::vector<std::vector<double>> vecs{{0.2, 0.05}, {-0.1, 0.15}};
    cplx a = forms::pullback_eval(t1, p, u, vecs);
    cplx b = forms::pullback_eval(t2, p, u, vecs);
    CHECK(a == b);
}

TEST_CASE("pullback on the unit circle: winding and constancy") {
    forms::Patch circle;
    circle.dim = 1;
    circle.vars = {"x"};
    circle.map = [](std::span<const double> u) {
        return std::vector<cplx>{std::exp(cplx(0.0, kTwoPi * u[0]))};
    };
    auto darg = forms::FormExpr::from_terms(
        1, {forms::FormTerm{1.0, {}, {forms::Basis1Form::darg(X())}}});
    auto dlog = forms::FormExpr::from_terms(
        1, {forms::FormTerm{1.0, {}, {forms::Basis1Form::dlog_abs(X())}}});
    std::vector<double> u{0.3};
    std::vector<std::vector<double>> unit{{1.0}};
    CHECK(std::abs(forms::pullback_eval(darg, circle, u, unit) - cplx(kTwoPi)) < 1e-9);
    CHECK(std::abs(forms::pullback_eval(dlog, circle, u, unit)) < 1e-9);
}

TEST_CASE("pullback antisymmetry in the tangent vectors") {
    auto form = forms::eta3(X(), Y(), Z());
    forms::Patch p;
    p.dim = 2;
    p.vars = {"x", "y", "z"};
    p.map = [](std::span<const double> u) {
        return std::vector<cplx>{cplx(1.0 + 0.3 * u[0], 0.4), cplx(0.8, 0.5 + 0.2 * u[1]),
                                 cplx(1.3 - 0.2 * u[0], 0.6 * u[1] + 0.2)};
    };
    std::vector<double> u{0.45, 0.55};
    std::vector<std::vector<double>> v{{0.17, -0.08}, {0.05, 0.21}};
    std::vector<std::vector<double>> vswap{v[1], v[0]};
    cplx a = forms::pullback_eval(form, p, u, v);
    cplx b = forms::pullback_eval(form, p, u, vswap);
    CHECK(std::abs(a + b) < 1e-15 * std::max(1.0, std::abs(a)));
}

TEST_CASE("eta2 pullback along the circle equals the derivative of D") {
    // the exact-form identity on the arc x = e^{2 pi i t}, y = 1 - x
    auto form = forms::eta2(X(), LaurentExpr::constant(1) - X());
    forms::Patch circle;
    circle.dim = 1;
    circle.vars = {"x"};
    circle.map = [](std::span<const double> u) {
        return std::vector<cplx>{std::exp(cplx(0.0, kTwoPi * u[0]))};
    };
    std::vector<std::vector<double>> unit{{1.0}};
    for (double t : {0.2, 0.3, 0.45, 0.6, 0.75}) {
        std::vector<double> u{t};
        cplx v = forms::pullback_eval(form, circle, u, unit);
        double h = 1e-5;
        auto Dof = [&](double s) {
            return polylog::bloch_wigner(std::exp(cplx(0.0, kTwoPi * s)));
        };
        double dd = (Dof(t + h) - Dof(t - h)) / (2.0 * h);
        double dd2 = (Dof(t + 0.5 * h) - Dof(t - 0.5 * h)) / h;
        double deriv = (4.0 * dd2 - dd) / 3.0;
        CHECK(std::abs(v.real() - deriv) < 1e-8);
    }
}

TEST_CASE("general form: order-n head with empty tail is the one-valued polylog") {
    auto f = forms::general_eta(3, X(), {});
    REQUIRE(f.degree == 0);
    forms::Patch p;
    p.dim = 1;
    p.vars = {"x"};
    p.map = [](std::span<const double>) { return std::vector<cplx>{cplx(1.0, 0.0)}; };
    std::vector<double> u{0.5};
    cplx v = forms::pullback_eval(f, p, u, {});
    CHECK(std::abs(v - cplx(polylog::zeta_em(3), 0.0)) < 1e-13);
}

TEST_CASE("specialization sweep: the general form reproduces all printed forms") {
    auto r = forms::checks::specialization_suite(2026, 12, 1e-12);
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("stokes sweep on sampled smooth paths") {
    auto r = forms::checks::stokes_suite(5, 4, 1e-9);
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("differential chain by finite differences") {
    auto r = forms::checks::dchain_suite(9, 8, 1e-5);
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("omega3 path integral telescopes to the trilogarithm") {
    auto form = forms::omega3(X(), X());
    quad::PathSpec seg;
    seg.a = 0.0;
    seg.b = 1.0;
    seg.vars = {"x"};
    seg.map = [](double t) { return std::vector<cplx>{cplx(0.2 + 0.6 * t, 0.0)}; };
    auto r = quad::path_integral_1form(form, seg, 1e-11);
    double expect = polylog::zagier_l(3, cplx(0.8, 0.0)) - polylog::zagier_l(3, cplx(0.2, 0.0));
    CHECK(std::abs(r.value - expect) < 1e-9);
}

TEST_CASE("mu4 path integral telescopes to the 4-logarithm") {
    auto form = forms::mu4(X(), X());
    quad::PathSpec seg;
    seg.a = 0.0;
    seg.b = 1.0;
    seg.vars = {"x"};
    seg.map = [](double t) { return std::vector<cplx>{cplx(0.3 + 0.4 * t, 0.0)}; };
    auto r = quad::path_integral_1form(form, seg, 1e-11);
    double expect = polylog::zagier_l(4, cplx(0.7, 0.0)) - polylog::zagier_l(4, cplx(0.3, 0.0));
    CHECK(std::abs(r.value - expect) < 1e-9);
}

TEST_CASE("errors: degenerate constructor arguments and stencil failures") {
    CHECK_THROWS_AS(forms::omega3(LaurentExpr::constant(1), Y()), std::domain_error);
    CHECK_THROWS_AS(forms::omega3(LaurentExpr::constant(0), Y()), std::domain_error);
    CHECK_THROWS_AS(forms::mu4(LaurentExpr::constant(1), Y()), std::domain_error);

    // stencil crossing a zero of the argument function
    auto form = forms::eta2(X(), LaurentExpr::constant(1) - X());
    forms::Patch bad;
    bad.dim = 1;
    bad.vars = {"x"};
    bad.map = [](std::span<const double> u) {
        return std::vector<cplx>{cplx(1.0 + (u[0] - 0.5) * 1e-9, 0.0)};  // 1 - x ~ 0
    };
    std::vector<double> u{0.5};
    std::vector<std::vector<double>> unit{{1.0}};
    CHECK_THROWS_AS(forms::pullback_eval(form, bad, u, unit), std::domain_error);
}

TEST_CASE("exterior derivative of an exact constant-coefficient form is zero") {
    auto dlog = forms::FormExpr::from_terms(
        1, {forms::FormTerm{1.0, {}, {forms::Basis1Form::dlog_abs(X())}}});
    forms::Patch p;
    p.dim = 2;
    p.vars = {"x"};
    p.map = [](std::span<const double> u) {
        return std::vector<cplx>{cplx(1.2 + 0.4 * u[0] - 0.1 * u[1], 0.3 + 0.2 * u[1])};
    };
    std::vector<double> u{0.5, 0.5};
    std::vector<std::vector<double>> v{{1.0, 0.0}, {0.0, 1.0}};
    cplx d = forms::exterior_derivative_fd(dlog, p, u, 1e-3, v);
    CHECK(std::abs(d) < 1e-8);
}
