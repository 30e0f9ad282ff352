#include "mmlab/mahler.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mml::measure {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

// Laurent polynomial restricted to the unit torus: every monomial has
// modulus one, so a term is coeff * exp(2*pi*i <e, theta>).
struct TorusPoly {
    struct Term {
        double coeff;
        std::vector<int> exps;
    };
    std::vector<Term> terms;

    static TorusPoly from_map(const expr::TermMap& m, const std::vector<int>& var_slot,
                              int dim) {
        TorusPoly p;
        for (const auto& [e, c] : m) {
            Term t;
            t.coeff = static_cast<double>(c);
            t.exps.assign(dim, 0);
            for (size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (var_slot[i] < 0)
                    throw std::logic_error("TorusPoly: term uses an uneliminated variable");
                t.exps[var_slot[i]] += e[i];
            }
            p.terms.push_back(std::move(t));
        }
        return p;
    }

    cplx eval(std::span<const double> theta) const {
        double re = 0.0, im = 0.0;
        for (const auto& t : terms) {
            double phase = 0.0;
            for (size_t j = 0; j < t.exps.size(); ++j) phase += t.exps[j] * theta[j];
            phase *= kTwoPi;
            re += t.coeff * std::cos(phase);
            im += t.coeff * std::sin(phase);
        }
        return {re, im};
    }
};

void newton_polish(const std::vector<cplx>& coeffs, cplx& root, int steps) {
    for (int s = 0; s < steps; ++s) {
        cplx p = 0.0, dp = 0.0;
        for (size_t i = coeffs.size(); i-- > 0;) {
            dp = dp * root + p;
            p = p * root + coeffs[i];
        }
        if (dp == cplx(0.0, 0.0)) return;
        cplx step = p / dp;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return;
        root -= step;
    }
}

// Roots of a deflated polynomial with nonzero leading and trailing
// coefficients; closed forms for degrees 1 and 2, companion matrix above.
void roots_core(const std::vector<cplx>& c, std::vector<cplx>& out) {
    size_t d = c.size() - 1;
    if (d == 0) return;
    if (d == 1) {
        out.push_back(-c[0] / c[1]);
        return;
    }
    if (d == 2) {
        cplx a = c[2], b = c[1], cc = c[0];
        cplx disc = std::sqrt(b * b - 4.0 * a * cc);
        // pick the sign that avoids cancellation in b + disc
        cplx q = (std::norm(b + disc) >= std::norm(b - disc)) ? -0.5 * (b + disc)
                                                              : -0.5 * (b - disc);
        out.push_back(q / a);
        out.push_back(cc / q);
        return;
    }
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
    for (size_t i = 0; i + 1 < d; ++i) comp(i + 1, i) = 1.0;
    for (size_t i = 0; i < d; ++i) comp(i, d - 1) = -c[i] / c[d];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    for (size_t i = 0; i < d; ++i) {
        cplx r = es.eigenvalues()(static_cast<Eigen::Index>(i));
        newton_polish(c, r, 2);
        out.push_back(r);
    }
}

// sum of log+ |root| for a fiber polynomial given by ascending complex
// coefficients; NaN when the fiber is identically ~0.
double fiber_log_plus(std::vector<cplx>& c) {
    double maxabs = 0.0;
    for (const auto& v : c) maxabs = std::max(maxabs, std::abs(v));
    if (!(maxabs > 0.0) || !std::isfinite(maxabs))
        return std::numeric_limits<double>::quiet_NaN();
    // deflate a vanishing leading coefficient (measure-zero fibers)
    size_t hi = c.size();
    while (hi > 1 && std::abs(c[hi - 1]) <= 1e-300 * maxabs) --hi;
    size_t lo = 0;
    while (lo + 1 < hi && c[lo] == cplx(0.0, 0.0)) ++lo;  // roots at zero: log+ = 0
    if (hi - lo <= 1) return 0.0;
    std::vector<cplx> core(c.begin() + lo, c.begin() + hi);
    std::vector<cplx> roots;
    roots_core(core, roots);
    double s = 0.0;
    for (const auto& r : roots) {
        double a = std::abs(r);
        if (a > 1.0) s += std::log(a);
    }
    return s;
}

uint64_t mix_seed(uint64_t seed, uint64_t k) {
    uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<std::string> effective_order(const MahlerRequest& req) {
    const auto& vars = req.e.vars();
    if (req.var_order.empty()) return vars;
    if (req.var_order.size() != vars.size())
        throw std::invalid_argument("var_order must be a permutation of the variables");
    for (const auto& v : vars)
        if (std::find(req.var_order.begin(), req.var_order.end(), v) == req.var_order.end())
            throw std::invalid_argument("var_order must be a permutation of the variables");
    return req.var_order;
}

// Recursive Jensen reduction of a Laurent polynomial (denominator constant).
quad::QuadResult jensen_poly(const expr::LaurentExpr& p, std::vector<std::string> order,
                             const MahlerRequest& req, uint64_t& seed_counter) {
    quad::QuadResult out;
    out.method = quad::Method::qmc;
    out.seed = req.seed;
    if (p.is_zero()) throw std::domain_error("mm_jensen: zero polynomial");

    // Drop order entries the polynomial no longer uses.
    std::erase_if(order, [&](const std::string& v) { return !p.uses_var(v); });
    if (order.empty()) {
        out.value = std::log(std::abs(p.evaluate({})));
        out.n_samples = 1;
        return out;
    }

    std::string v = order.back();
    order.pop_back();
    expr::PolyInVar poly = expr::as_poly_in(p, v);

    if (order.empty()) {
        out.value = mm_univariate(poly);
        out.n_samples = 1;
        return out;
    }

    // Fiber coefficients as torus evaluators over the remaining variables.
    // Every coefficient carries a constant denominator (p itself has a
    // constant denominator, so the projection is constant as well).
    const int dim = static_cast<int>(order.size());
    std::vector<TorusPoly> ctab;
    std::vector<double> cden;
    for (const auto& c : poly.coeffs) {
        if (c.den().size() != 1 ||
            std::any_of(c.den().begin()->first.begin(), c.den().begin()->first.end(),
                        [](int32_t e) { return e != 0; }))
            throw std::logic_error("mm_jensen: non-constant coefficient denominator");
        cden.push_back(static_cast<double>(c.den().begin()->second));
        std::vector<int> slot(c.vars().size(), -1);
        for (size_t i = 0; i < c.vars().size(); ++i) {
            auto it = std::find(order.begin(), order.end(), c.vars()[i]);
            if (it != order.end()) slot[i] = static_cast<int>(it - order.begin());
        }
        ctab.push_back(TorusPoly::from_map(c.num(), slot, dim));
    }

    auto integrand_theta = [&](std::span<const double> theta) {
        thread_local std::vector<cplx> c;
        c.resize(ctab.size());
        for (size_t i = 0; i < ctab.size(); ++i) c[i] = ctab[i].eval(theta) / cden[i];
        return fiber_log_plus(c);
    };

    quad::QuadResult fiber;
    if (dim == 1) {
        fiber = quad::adaptive_1d(
            [&](double t) {
                double th[1] = {t};
                return integrand_theta(th);
            },
            0.0, 1.0, req.tol_1d);
    } else {
        quad::QmcOptions opt;
        opt.n = req.samples;
        opt.replications = req.replications;
        opt.seed = mix_seed(req.seed, seed_counter++);
        opt.workers = req.workers;
        fiber = quad::qmc_integrate(integrand_theta, dim, opt);
    }

    // m(P*) from the leading coefficient.
    quad::QuadResult lead = jensen_poly(poly.coeffs.back(), order, req, seed_counter);

    out.value = fiber.value + lead.value;
    out.std_error = std::hypot(fiber.std_error, lead.std_error);
    out.n_samples = fiber.n_samples + lead.n_samples;
    out.method = dim == 1 ? quad::Method::adaptive1d : quad::Method::qmc;
    out.n_rejected = fiber.n_rejected + lead.n_rejected;
    out.integrability_warning = fiber.integrability_warning || lead.integrability_warning;
    return out;
}

}  // namespace

std::string method_name(Method m) { return m == Method::direct ? "direct" : "jensen"; }

std::vector<cplx> poly_roots(std::vector<cplx> coeffs) {
    double maxabs = 0.0;
    for (const auto& v : coeffs) maxabs = std::max(maxabs, std::abs(v));
    if (!(maxabs > 0.0)) throw std::domain_error("poly_roots: zero polynomial");
    size_t hi = coeffs.size();
    while (hi > 1 && std::abs(coeffs[hi - 1]) <= 1e-300 * maxabs) --hi;
    coeffs.resize(hi);
    if (coeffs.size() - 1 > 64) throw std::domain_error("poly_roots: degree cap 64 exceeded");
    std::vector<cplx> roots;
    size_t lo = 0;
    while (lo + 1 < coeffs.size() && coeffs[lo] == cplx(0.0, 0.0)) {
        roots.push_back(0.0);
        ++lo;
    }
    std::vector<cplx> core(coeffs.begin() + lo, coeffs.end());
    roots_core(core, roots);
    return roots;
}

double mm_univariate(const expr::PolyInVar& p) {
    std::vector<cplx> c;
    for (const auto& coef : p.coeffs) {
        if (!coef.is_constant())
            throw std::invalid_argument("mm_univariate: coefficients must be constants");
        c.push_back(coef.is_zero() ? cplx(0.0, 0.0) : coef.evaluate({}));
    }
    double maxabs = 0.0;
    for (const auto& v : c) maxabs = std::max(maxabs, std::abs(v));
    if (!(maxabs > 0.0)) throw std::domain_error("mm_univariate: zero polynomial");
    size_t hi = c.size();
    while (hi > 1 && c[hi - 1] == cplx(0.0, 0.0)) --hi;
    c.resize(hi);
    double m = std::log(std::abs(c.back()));
    if (c.size() == 1) return m;
    std::vector<cplx> roots = poly_roots(c);
    for (const auto& r : roots) {
        double a = std::abs(r);
        if (a > 1.0) m += std::log(a);
    }
    return m;
}

quad::QuadResult mm_direct(const MahlerRequest& req) {
    auto order = effective_order(req);
    const int dim = static_cast<int>(order.size());
    const auto& e = req.e;
    if (dim == 0) {
        quad::QuadResult out;
        out.value = std::log(std::abs(e.evaluate({})));
        out.n_samples = 1;
        out.seed = req.seed;
        return out;
    }
    std::vector<int> slot(e.vars().size());
    for (size_t i = 0; i < e.vars().size(); ++i) {
        auto it = std::find(order.begin(), order.end(), e.vars()[i]);
        slot[i] = static_cast<int>(it - order.begin());
    }
    TorusPoly num = TorusPoly::from_map(e.num(), slot, dim);
    TorusPoly den = TorusPoly::from_map(e.den(), slot, dim);
    quad::QmcOptions opt;
    opt.n = req.samples;
    opt.replications = req.replications;
    opt.seed = req.seed;
    opt.workers = req.workers;
    return quad::qmc_integrate(
        [&](std::span<const double> theta) {
            double v = std::log(std::abs(num.eval(theta))) - std::log(std::abs(den.eval(theta)));
            return v;
        },
        dim, opt);
}

quad::QuadResult mm_jensen(const MahlerRequest& req) {
    auto order = effective_order(req);
    const auto& e = req.e;
    if (e.is_zero()) throw std::domain_error("mm_jensen: zero expression");

    std::string last = order.empty() ? std::string() : order.back();
    if (!last.empty()) {
        size_t vi = std::find(e.vars().begin(), e.vars().end(), last) - e.vars().begin();
        if (vi < e.vars().size())
            for (const auto& [exp, c] : e.den())
                if (exp[vi] != 0)
                    throw std::domain_error(
                        "mm_jensen: denominator involves the eliminated variable");
    }

    expr::LaurentExpr num = expr::LaurentExpr::from_parts(
        e.vars(), e.num(), expr::TermMap{{expr::Exponents(e.vars().size(), 0), 1}});
    expr::LaurentExpr den = expr::LaurentExpr::from_parts(
        e.vars(), e.den(), expr::TermMap{{expr::Exponents(e.vars().size(), 0), 1}});

    uint64_t counter = 0;
    quad::QuadResult pn = jensen_poly(num, order, req, counter);
    if (den.is_constant()) {
        double c = std::abs(den.evaluate({}));
        pn.value -= std::log(c);
        return pn;
    }
    quad::QuadResult pd = jensen_poly(den, order, req, counter);
    quad::QuadResult out = pn;
    out.value = pn.value - pd.value;
    out.std_error = std::hypot(pn.std_error, pd.std_error);
    out.n_samples = pn.n_samples + pd.n_samples;
    out.n_rejected = pn.n_rejected + pd.n_rejected;
    out.integrability_warning = pn.integrability_warning || pd.integrability_warning;
    return out;
}

quad::QuadResult mahler_measure(const MahlerRequest& req) {
    return req.method == Method::direct ? mm_direct(req) : mm_jensen(req);
}

}  // namespace mml::measure
