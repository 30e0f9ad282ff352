#include "mmlab/forms_checks.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <sstream>

#include "mmlab/polylog.hpp"
#include "mmlab/quad.hpp"

namespace mml::forms::checks {

namespace {

using expr::LaurentExpr;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(uint64_t seed) : gen(seed) {}
    double uniform(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(gen);
    }
    cplx point(double rlo, double rhi) {
        double r = uniform(rlo, rhi);
        double t = uniform(0.0, 2.0 * 3.14159265358979323846);
        return {r * std::cos(t), r * std::sin(t)};
    }
};

// Random affine patch u -> c0_i + sum_j c_ij u_j per variable, rejection
// sampled so that every function in `guards` has modulus in [lo, hi] at the
// evaluation point (singular-locus avoidance).
struct RandomPatch {
    Patch patch;
    std::vector<double> u;
    std::vector<std::vector<double>> vectors;
};

RandomPatch random_patch(Rng& rng, const std::vector<std::string>& vars, int dim, int nvectors,
                         const std::vector<LaurentExpr>& guards, double lo = 5e-2,
                         double hi = 1e3) {
    for (int attempt = 0; attempt < 500; ++attempt) {
        auto base = std::make_shared<std::vector<cplx>>();
        auto slope = std::make_shared<std::vector<std::vector<cplx>>>();
        for (size_t i = 0; i < vars.size(); ++i) {
            base->push_back(rng.point(0.35, 1.8));
            std::vector<cplx> row;
            for (int j = 0; j < dim; ++j) row.push_back(rng.point(0.05, 0.35));
            slope->push_back(std::move(row));
        }
        Patch p;
        p.dim = dim;
        p.vars = vars;
        p.map = [base, slope](std::span<const double> uu) {
            std::vector<cplx> out;
            out.reserve(base->size());
            for (size_t i = 0; i < base->size(); ++i) {
                cplx v = (*base)[i];
                for (size_t j = 0; j < uu.size(); ++j) v += (*slope)[i][j] * uu[j];
                out.push_back(v);
            }
            return out;
        };
        std::vector<double> u(dim);
        for (int j = 0; j < dim; ++j) u[j] = rng.uniform(0.35, 0.65);

        std::map<std::string, cplx> env;
        auto coords = p.map(u);
        for (size_t i = 0; i < vars.size(); ++i) env[vars[i]] = coords[i];
        bool ok = true;
        for (const auto& g : guards) {
            double a = std::abs(g.evaluate_env(env));
            if (!(a >= lo && a <= hi)) ok = false;
        }
        if (!ok) continue;

        RandomPatch rp;
        rp.patch = std::move(p);
        rp.u = std::move(u);
        for (int k = 0; k < nvectors; ++k) {
            std::vector<double> v(dim);
            double norm = 0.0;
            for (int j = 0; j < dim; ++j) {
                v[j] = rng.uniform(-1.0, 1.0);
                norm += v[j] * v[j];
            }
            norm = std::sqrt(norm);
            for (int j = 0; j < dim; ++j) v[j] = v[j] / (norm + 1e-12) * 0.2;
            rp.vectors.push_back(std::move(v));
        }
        return rp;
    }
    throw std::runtime_error("random_patch: rejection sampling failed");
}

FormExpr scalar_form(const CoefficientFn& c) {
    FormTerm t;
    t.scalar = 1.0;
    t.coeffs.push_back(c);
    return FormExpr::from_terms(0, {t});
}

void note(CheckResult& r, const std::string& name, double worst, double tol) {
    std::ostringstream os;
    os << (worst <= tol ? "pass " : "FAIL ") << name << "  worst=" << worst << "  tol=" << tol
       << "\n";
    r.detail += os.str();
    r.worst = std::max(r.worst, worst);
    if (worst > tol) r.pass = false;
}

}  // namespace

CheckResult specialization_suite(uint64_t seed, int points_per_form, double tol) {
    CheckResult result;
    Rng rng(seed);
    LaurentExpr X = LaurentExpr::variable("x");
    LaurentExpr Y = LaurentExpr::variable("y");
    LaurentExpr W = LaurentExpr::variable("w");
    LaurentExpr Z = LaurentExpr::variable("z");
    LaurentExpr omX = LaurentExpr::constant(1) - X;
    const cplx mi(0.0, -1.0);

    struct Case {
        std::string name;
        FormExpr general;
        FormExpr printed;
        std::vector<std::string> vars;
        std::vector<LaurentExpr> guards;
    };
    std::vector<LaurentExpr> t2{X, Y}, t3{X, Y, Z}, t4{X, Y, W, Z}, tyw{Y, W}, ty{Y};
    std::vector<Case> cases;
    cases.push_back({"eta2  = -i eta_2(2)", mi * general_eta_pure(t2), eta2(X, Y),
                     {"x", "y"}, {X, Y}});
    cases.push_back({"eta3  =    eta_3(3)", general_eta_pure(t3), eta3(X, Y, Z),
                     {"x", "y", "z"}, {X, Y, Z}});
    cases.push_back({"omega3 =   eta_3(2)", general_eta_head(2, X, ty), omega3(X, Y),
                     {"x", "y"}, {X, Y, omX}});
    cases.push_back({"eta4  = -i eta_4(4)", mi * general_eta_pure(t4), eta4(X, Y, W, Z),
                     {"x", "y", "w", "z"}, {X, Y, W, Z}});
    cases.push_back({"omega4 = -i eta_4(3)", mi * general_eta_head(2, X, tyw),
                     omega4(X, Y, W), {"x", "y", "w"}, {X, Y, W, omX}});
    cases.push_back({"mu4   = -i eta_4(2)", mi * general_eta_head(3, X, ty), mu4(X, Y),
                     {"x", "y"}, {X, Y, omX}});

    for (const auto& c : cases) {
        double worst = 0.0;
        int deg = c.printed.degree;
        for (int k = 0; k < points_per_form; ++k) {
            RandomPatch rp = random_patch(rng, c.vars, std::max(deg, 1), deg, c.guards);
            cplx a = pullback_eval(c.general, rp.patch, rp.u, rp.vectors);
            cplx b = pullback_eval(c.printed, rp.patch, rp.u, rp.vectors);
            worst = std::max(worst, std::abs(a - b));
            ++result.checks;
        }
        note(result, c.name, worst, tol);
    }
    return result;
}

CheckResult stokes_suite(uint64_t seed, int paths_per_pair, double tol) {
    CheckResult result;
    Rng rng(seed);
    LaurentExpr X = LaurentExpr::variable("x");
    LaurentExpr omX = LaurentExpr::constant(1) - X;

    struct Pair {
        std::string name;
        FormExpr form;
        std::function<double(cplx)> potential;
    };
    std::vector<Pair> pairs;
    pairs.push_back({"eta(x,1-x) vs D", eta2(X, omX),
                     [](cplx z) { return polylog::bloch_wigner(z); }});
    pairs.push_back({"omega(x,x) vs L3", omega3(X, X),
                     [](cplx z) { return polylog::zagier_l(3, z); }});
    pairs.push_back({"mu(x,x) vs L4", mu4(X, X),
                     [](cplx z) { return polylog::zagier_l(4, z); }});

    for (const auto& p : pairs) {
        double worst = 0.0;
        int done = 0;
        while (done < paths_per_pair) {
            cplx a = rng.point(0.3, 1.6);
            cplx b = rng.point(0.3, 1.6);
            // keep the whole segment away from 0 and 1
            bool ok = true;
            for (int i = 0; i <= 24; ++i) {
                cplx z = a + (b - a) * (i / 24.0);
                if (std::abs(z) < 0.08 || std::abs(z - 1.0) < 0.08 || std::abs(z) > 3.0)
                    ok = false;
            }
            if (!ok) continue;
            quad::PathSpec path;
            path.a = 0.0;
            path.b = 1.0;
            path.vars = {"x"};
            path.map = [a, b](double t) { return std::vector<cplx>{a + (b - a) * t}; };
            quad::QuadResult integral = quad::path_integral_1form(p.form, path, 1e-11);
            double expect = p.potential(b) - p.potential(a);
            worst = std::max(worst, std::abs(integral.value - expect));
            ++done;
            ++result.checks;
        }
        note(result, p.name, worst, tol);
    }
    return result;
}

CheckResult dchain_suite(uint64_t seed, int patches_per_identity, double rel_tol) {
    CheckResult result;
    Rng rng(seed);
    LaurentExpr X = LaurentExpr::variable("x");
    LaurentExpr Y = LaurentExpr::variable("y");
    LaurentExpr W = LaurentExpr::variable("w");
    LaurentExpr Z = LaurentExpr::variable("z");
    LaurentExpr omX = LaurentExpr::constant(1) - X;
    std::vector<LaurentExpr> t2{X, Y}, t3{X, Y, Z};

    struct Case {
        std::string name;
        FormExpr inner;   // d(inner) compared against target
        FormExpr target;
        std::vector<std::string> vars;
        std::vector<LaurentExpr> guards;
        int dim;
    };
    std::vector<Case> cases;
    cases.push_back({"eta(x,1-x) = dD(x)", scalar_form(CoefficientFn::bloch_wigner(X)),
                     eta2(X, omX), {"x"}, {X, omX}, 1});
    cases.push_back({"eta(x,1-x,y) = d omega(x,y)", omega3(X, Y), eta3(X, omX, Y),
                     {"x", "y"}, {X, omX, Y}, 2});
    cases.push_back({"omega(x,x) = dL3(x)", scalar_form(CoefficientFn::zagier_l(3, X)),
                     omega3(X, X), {"x"}, {X, omX}, 1});
    cases.push_back({"eta(x,1-x,y,w) = d omega(x,y,w)", omega4(X, Y, W), eta4(X, omX, Y, W),
                     {"x", "y", "w"}, {X, omX, Y, W}, 3});
    cases.push_back({"omega(x,x,y) = d mu(x,y)", mu4(X, Y), omega4(X, X, Y),
                     {"x", "y"}, {X, omX, Y}, 2});
    cases.push_back({"mu(x,x) = dL4(x)", scalar_form(CoefficientFn::zagier_l(4, X)),
                     mu4(X, X), {"x"}, {X, omX}, 1});
    cases.push_back({"d eta(x,y) = Im(dx/x ^ dy/y)", eta2(X, Y), im_dlog_wedge(t2),
                     {"x", "y"}, {X, Y}, 2});
    cases.push_back({"d eta(x,y,z) = Re(dx/x ^ dy/y ^ dz/z)", eta3(X, Y, Z),
                     re_dlog_wedge(t3), {"x", "y", "z"}, {X, Y, Z}, 3});

    const double outer_h = 1e-3;
    for (const auto& c : cases) {
        double worst = 0.0;
        int done = 0;
        int guard = 0;
        while (done < patches_per_identity && guard < patches_per_identity * 40) {
            ++guard;
            RandomPatch rp = random_patch(rng, c.vars, c.dim, c.inner.degree + 1, c.guards);
            cplx rhs, lhs;
            try {
                rhs = pullback_eval(c.target, rp.patch, rp.u, rp.vectors);
                if (std::abs(rhs) < 0.02) continue;  // keep the relative test meaningful
                lhs = exterior_derivative_fd(c.inner, rp.patch, rp.u, outer_h, rp.vectors);
            } catch (const std::domain_error&) {
                continue;  // stencil clipped a zero; resample
            }
            worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
            ++done;
            ++result.checks;
        }
        note(result, c.name, worst, rel_tol);
    }
    return result;
}

}  // namespace mml::forms::checks
