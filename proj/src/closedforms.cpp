#include "mmlab/closedforms.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "mmlab/polylog.hpp"

namespace mml::closedform {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Alternating-series acceleration (Chebyshev weights): error ~ 5.83^-n.
double alternating_sum(const std::function<double(int)>& a, int n) {
    double d = std::pow(3.0 + std::sqrt(8.0), n);
    d = 0.5 * (d + 1.0 / d);
    double b = -1.0, c = -d, s = 0.0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        s += c * a(k);
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0));
    }
    return s / d;
}

int chi_minus3(int a) {
    static const int v[3] = {0, 1, -1};
    return v[a % 3];
}

int chi_5(int a) {
    static const int v[5] = {0, 1, -1, -1, 1};
    return v[a % 5];
}

}  // namespace

double zeta(int s) {
    if (s < 2) throw std::domain_error("zeta: argument must be >= 2");
    double eta = alternating_sum([s](int k) { return std::pow(k + 1.0, -s); }, 28);
    return eta / (1.0 - std::pow(2.0, 1.0 - s));
}

double hurwitz_zeta(int s, double x) {
    if (s < 2) throw std::domain_error("hurwitz_zeta: s must be >= 2");
    if (!(x > 0.0 && x <= 1.0)) throw std::domain_error("hurwitz_zeta: x must be in (0, 1]");
    const int N = 24, J = 10;
    double acc = 0.0;
    for (int k = 0; k < N; ++k) acc += std::pow(k + x, -static_cast<double>(s));
    double Nx = N + x;
    double Ns = std::pow(Nx, -static_cast<double>(s));
    acc += Ns * Nx / (s - 1.0);
    acc += 0.5 * Ns;
    const auto& b = polylog::bernoulli_table();
    double rising = static_cast<double>(s);
    double npow = Ns / Nx;
    double fact = 2.0;  // (2j)!
    for (int j = 1; j <= J; ++j) {
        acc += b[2 * j].to_double() / fact * rising * npow;
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        npow /= Nx * Nx;
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    }
    return acc;
}

double dirichlet_l(int s, Character chi) {
    if (s < 2) throw std::domain_error("dirichlet_l: s must be >= 2");
    int q;
    int (*values)(int);
    switch (chi) {
        case Character::chi_minus3: q = 3; values = chi_minus3; break;
        case Character::chi_5: q = 5; values = chi_5; break;
        default: throw std::invalid_argument("dirichlet_l: unsupported character");
    }
    double acc = 0.0;
    for (int a = 1; a < q; ++a)
        if (int v = values(a); v != 0)
            acc += v * hurwitz_zeta(s, static_cast<double>(a) / q);
    return acc * std::pow(static_cast<double>(q), -static_cast<double>(s));
}

PhiRoots phi_roots(int m, int n) {
    if (m < 1 || n < 1) throw std::domain_error("phi_roots: m, n must be >= 1");
    auto solve = [&](double lo, double hi, double sign_n) {
        auto f = [&](double x) {
            return std::pow(x, m + n) + sign_n * std::pow(x, n) - 1.0;
        };
        for (int i = 0; i < 80; ++i) {
            double mid = 0.5 * (lo + hi);
            (f(mid) < 0.0 ? lo : hi) = mid;
        }
        double x = 0.5 * (lo + hi);
        for (int i = 0; i < 4; ++i) {
            double fx = f(x);
            double dfx = (m + n) * std::pow(x, m + n - 1) + sign_n * n * std::pow(x, n - 1);
            if (dfx == 0.0) break;
            x -= fx / dfx;
        }
        return x;
    };
    PhiRoots r;
    r.m = m;
    r.n = n;
    r.phi1 = solve(0.0, 1.0, +1.0);  // x^{m+n} + x^n - 1, increasing on [0,1]
    r.phi2 = solve(1.0, 2.0, -1.0);  // x^{m+n} - x^n - 1, root in [1,2]
    return r;
}

double rhs_smyth() {
    return 3.0 * std::sqrt(3.0) / (4.0 * kPi) * dirichlet_l(2, Character::chi_minus3);
}

double rhs_res(int m, int n) {
    PhiRoots r = phi_roots(m, n);
    auto L3 = [](double t) { return polylog::zagier_l(3, {t, 0.0}); };
    double pi2 = kPi * kPi;
    return 2.0 * n / pi2 * (L3(std::pow(r.phi2, m)) - L3(-std::pow(r.phi1, m))) +
           2.0 * m / pi2 * (L3(std::pow(r.phi1, n)) - L3(-std::pow(r.phi2, n)));
}

double rhs_det3() { return 9.0 * zeta(3) / (2.0 * kPi * kPi); }

double dedekind_zeta_sqrt5(int s) { return zeta(s) * dirichlet_l(s, Character::chi_5); }

namespace {

std::once_flag g_registry_once;
std::vector<Identity> g_registry;

Identity make_identity(const std::string& id, const std::string& src, long long samples,
                       double tol, std::function<double()> rhs, const std::string& desc) {
    Identity ident;
    ident.id = id;
    ident.lhs.e = expr::LaurentExpr::parse(src);
    ident.lhs.method = measure::Method::jensen;
    ident.lhs.samples = samples;
    ident.rhs = std::move(rhs);
    ident.tolerance = tol;
    ident.description = desc;
    return ident;
}

void build_registry() {
    g_registry.push_back(make_identity(
        "smyth", "1+x+y", 1LL << 22, 1e-6, [] { return rhs_smyth(); },
        "m(1+x+y) = (3*sqrt(3)/(4*pi)) L(chi_-3, 2)"));
    g_registry.push_back(make_identity(
        "res11", "z*(1-x*y)^2-(1-x)*(1-y)", 1LL << 22, 2e-3, [] { return rhs_res(1, 1); },
        "m(z(1-xy)^2 - (1-x)(1-y)) = (4/pi^2)(L3(phi) - L3(-phi)), phi the golden section"));
    g_registry.push_back(make_identity(
        "res12", "z*(1-x*y)^3-(1-x)*(1-y)^2", 1LL << 22, 2e-3, [] { return rhs_res(1, 2); },
        "m(z(1-xy)^3 - (1-x)(1-y)^2): trilogarithm values at the roots of x^3 +- x^2 = 1"));
    g_registry.push_back(make_identity(
        "res21", "z*(1-x*y)^3-(1-x)^2*(1-y)", 1LL << 22, 2e-3, [] { return rhs_res(2, 1); },
        "m(z(1-xy)^3 - (1-x)^2(1-y)): trilogarithm values at the roots of x^3 +- x = 1"));
    g_registry.push_back(make_identity(
        "det3", "(1-x)*(1-y)-(1-w)*(1-z)", 1LL << 24, 3e-3, [] { return rhs_det3(); },
        "m((1-x)(1-y) - (1-w)(1-z)) = 9 zeta(3) / (2 pi^2)"));
}

}  // namespace

const std::vector<Identity>& registry() {
    std::call_once(g_registry_once, build_registry);
    return g_registry;
}

const Identity* find_identity(std::string_view id) {
    for (const auto& ident : registry())
        if (ident.id == id) return &ident;
    return nullptr;
}

}  // namespace mml::closedform
