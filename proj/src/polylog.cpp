#include "mmlab/polylog.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace mml::polylog {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

struct KahanSumC {
    KahanSum re, im;
    void add(cplx x) {
        re.add(x.real());
        im.add(x.imag());
    }
    cplx value() const { return {re.value(), im.value()}; }
};

// zeta at any integer argument != 1, cached. Negative arguments via the
// functional equation; only odd negatives are nonzero.
double zeta_neg_odd(int m) {
    int q = m + 1;  // even
    double sign = (q % 4 == 0) ? 1.0 : -1.0;
    return 2.0 * sign * std::exp(std::lgamma(q) - q * std::log(2.0 * kPi)) * zeta_em(q);
}

constexpr int kZetaCache = 210;

double zeta_int(int k) {
    if (k == 1) throw std::domain_error("zeta_int: pole at 1");
    static const std::vector<double> pos = [] {
        std::vector<double> v(kZetaCache + 1, 0.0);
        for (int s = 2; s <= kZetaCache; ++s) v[s] = zeta_em(s);
        return v;
    }();
    static const std::vector<double> neg = [] {
        std::vector<double> v(kZetaCache + 1, 0.0);
        for (int m = 1; m <= kZetaCache; m += 2) v[m] = zeta_neg_odd(m);
        return v;
    }();
    if (k >= 2) return k <= kZetaCache ? pos[k] : 1.0 + std::pow(2.0, -k);
    if (k == 0) return -0.5;
    int m = -k;
    if (m % 2 == 0) return 0.0;
    return m <= kZetaCache ? neg[m] : zeta_neg_odd(m);
}

double factorial(int n) { return std::tgamma(n + 1.0); }

cplx li_series(int n, cplx z) {
    KahanSumC acc;
    cplx p = 1.0;
    for (int k = 1; k <= 300; ++k) {
        p *= z;
        cplx term = p / std::pow(static_cast<double>(k), n);
        acc.add(term);
        if (k > 3 && std::abs(term) < 1e-18 * (std::abs(acc.value()) + 1e-300)) break;
    }
    return acc.value();
}

// Negate preserving signed zeros, so one-sided limits at the cuts come out
// of the principal log consistently (upper limit for z = x + 0i).
cplx neg(cplx z) { return {-z.real(), -z.imag()}; }

// Bernoulli polynomial B_n(x) with exact coefficients.
cplx bernoulli_poly(int n, cplx x) {
    KahanSumC acc;
    cplx xp = 1.0;
    std::vector<cplx> pows(n + 1);
    for (int k = 0; k <= n; ++k) {
        pows[k] = xp;
        xp *= x;
    }
    const auto& b = bernoulli_table();
    for (int k = 0; k <= n; ++k)
        acc.add(static_cast<double>(binomial(n, k)) * b[k].to_double() * pows[n - k]);
    return acc.value();
}

// Expansion around z = 1 in powers of w = log z, valid for |w| < 2*pi:
//   Li_n(z) = sum_{k>=0, k != n-1} zeta(n-k) w^k/k!
//           + (H_{n-1} - log(-w)) w^{n-1}/(n-1)!.
cplx li_log_expansion(int n, cplx z) {
    cplx w = std::log(z);
    KahanSumC acc;
    cplx wk = 1.0;  // w^k / k!
    int small_run = 0;
    for (int k = 0; k <= 200; ++k) {
        if (k > 0) wk *= w / static_cast<double>(k);
        if (k == n - 1) {
            double h = 0.0;
            for (int j = 1; j <= n - 1; ++j) h += 1.0 / j;
            acc.add((h - std::log(neg(w))) * wk);
            continue;
        }
        cplx term = zeta_int(n - k) * wk;
        acc.add(term);
        // zeta vanishes at even negative integers, so require two small
        // terms in a row before stopping.
        if (k > n + 4 && std::abs(term) < 1e-18 * (std::abs(acc.value()) + 1e-300)) {
            if (++small_run >= 2) break;
        } else {
            small_run = 0;
        }
    }
    return acc.value();
}

// Inversion: Li_n(z) = (-1)^{n-1} Li_n(1/z) - (2*pi*i)^n/n! B_n(1/2 + log(-z)/(2*pi*i)).
cplx li_inversion(int n, cplx z) {
    cplx lmz = std::log(neg(z));
    const cplx two_pi_i(0.0, 2.0 * kPi);
    cplx u = 0.5 + lmz / two_pi_i;
    cplx corr = std::pow(two_pi_i, n) / factorial(n) * bernoulli_poly(n, u);
    cplx inv = li_series(n, 1.0 / z);
    double sign = (n % 2 == 0) ? -1.0 : 1.0;
    return sign * inv - corr;
}

std::once_flag g_bernoulli_once;
std::vector<Rational> g_bernoulli;

void build_bernoulli() {
    std::vector<Rational> b(kBernoulliMax + 1);
    b[0] = Rational(1);
    for (int m = 1; m <= kBernoulliMax; ++m) {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0  =>  B_m = -1/C(m+1,m) * sum_{j<m} ...
        Rational s(0);
        for (int j = 0; j < m; ++j) s += Rational(binomial(m + 1, j)) * b[j];
        b[m] = -s / Rational(binomial(m + 1, m));
    }
    g_bernoulli = std::move(b);
}

}  // namespace

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > static_cast<__int128>(std::numeric_limits<long long>::max()))
            throw std::overflow_error("binomial: result exceeds 64-bit range");
    }
    return static_cast<long long>(r);
}

const std::vector<Rational>& bernoulli_table() {
    std::call_once(g_bernoulli_once, build_bernoulli);
    return g_bernoulli;
}

Rational bernoulli(int j) {
    if (j < 0 || j > kBernoulliMax)
        throw std::out_of_range("bernoulli: index out of range [0, 32]");
    return bernoulli_table()[j];
}

double zeta_em(int s) {
    if (s < 2) throw std::domain_error("zeta_em: argument must be >= 2");
    const int N = 16;
    const int J = 10;
    KahanSum acc;
    for (int k = 1; k < N; ++k) acc.add(std::pow(static_cast<double>(k), -s));
    double Ns = std::pow(static_cast<double>(N), -s);
    acc.add(Ns * N / (s - 1.0));
    acc.add(0.5 * Ns);
    const auto& b = bernoulli_table();
    double rising = static_cast<double>(s);  // s (s+1) ... (s+2j-2)
    double npow = Ns / N;                    // N^{-s-2j+1}
    for (int j = 1; j <= J; ++j) {
        acc.add(b[2 * j].to_double() / factorial(2 * j) * rising * npow);
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        npow /= (N * static_cast<double>(N));
    }
    return acc.value();
}

namespace detail {

cplx li_unchecked(int n, cplx z) {
    if (n < 1) throw std::domain_error("li: order must be >= 1");
    if (n > kBernoulliMax) throw std::out_of_range("li: order too large");
    if (n == 1) {
        cplx w = 1.0 - z;
        if (w.real() < 0.0 && w.imag() == 0.0) w = cplx(w.real(), -0.0);
        return -std::log(w);
    }
    if (z == cplx(1.0, 0.0)) return zeta_em(n);
    double az = std::abs(z);
    if (az <= 0.5) return li_series(n, z);
    if (az >= 2.0) return li_inversion(n, z);
    return li_log_expansion(n, z);
}

}  // namespace detail

cplx li(int n, cplx z) {
    if (n == 1 && z == cplx(1.0, 0.0)) throw std::domain_error("li: logarithmic pole at z = 1");
    if (n >= 2 && z.imag() == 0.0 && z.real() > 1.0)
        throw std::domain_error("li: argument on the cut (1, inf)");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::domain_error("li: non-finite argument");
    return detail::li_unchecked(n, z);
}

double bloch_wigner(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return 0.0;  // D(inf) = 0
    if (z.imag() == 0.0) return 0.0;
    // Route large arguments through 1/z to avoid cancellation.
    if (std::abs(z) > 2.0) {
        cplx w = 1.0 / z;
        return -(std::imag(detail::li_unchecked(2, w)) +
                 std::log(std::abs(w)) * std::arg(1.0 - w));
    }
    return std::imag(detail::li_unchecked(2, z)) + std::log(std::abs(z)) * std::arg(1.0 - z);
}

std::vector<Rational> zagier_coefficients(int n) {
    if (n < 1 || n > 20) throw std::out_of_range("zagier_coefficients: order out of range");
    std::vector<Rational> c(n);
    const auto& b = bernoulli_table();
    Rational pw(1);  // 2^j / j!
    for (int j = 0; j < n; ++j) {
        if (j > 0) pw = pw * Rational(2, j);
        c[j] = pw * b[j];
    }
    return c;
}

double zagier_l(int n, cplx z) {
    if (n < 2) throw std::domain_error("zagier_l: order must be >= 2");
    if (z == cplx(0.0, 0.0)) return 0.0;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return 0.0;  // L_n(inf) = 0
    auto coeffs = zagier_coefficients(n);
    double lz = std::log(std::abs(z));
    KahanSumC acc;
    double lp = 1.0;
    for (int j = 0; j < n; ++j) {
        if (j > 0) {
            lp *= lz;
            if (lp == 0.0) break;  // |z| = 1: correction terms vanish (Li_1 may diverge)
        }
        if (!coeffs[j].is_zero()) acc.add(coeffs[j].to_double() * lp * detail::li_unchecked(n - j, z));
    }
    cplx v = acc.value();
    return (n % 2 == 1) ? v.real() : v.imag();
}

cplx zagier_l_hat(int n, cplx z) {
    double v = zagier_l(n, z);
    return (n % 2 == 1) ? cplx(v, 0.0) : cplx(0.0, v);
}

Rational beta_coeff(int k, int p) {
    if (k < 0 || p < 1) throw std::domain_error("beta_coeff: need k >= 0, p >= 1");
    if (k + p > kBernoulliMax - 1) throw std::out_of_range("beta_coeff: k + p too large");
    // Accumulate in a local 128-bit rational; the reduced result is small.
    __int128 num = 0, den = 1;
    auto reduce = [](__int128& a, __int128& b) {
        __int128 x = a < 0 ? -a : a, y = b;
        while (y != 0) { __int128 t = x % y; x = y; y = t; }
        if (x > 1) { a /= x; b /= x; }
    };
    const auto& bern = bernoulli_table();
    for (int j = 0; 2 * j + 1 <= p; ++j) {
        int bi = k + p - 2 * j;
        const Rational& B = bern[bi];
        if (B.is_zero()) continue;
        __int128 tn = static_cast<__int128>(binomial(k + p + 1, 2 * j + 1)) * B.num();
        for (int t = 0; t < bi; ++t) tn *= 2;
        __int128 td = B.den();
        reduce(tn, td);
        // num/den += tn/td
        __int128 nn = num * td + tn * den;
        __int128 nd = den * td;
        reduce(nn, nd);
        num = nn;
        den = nd;
    }
    // multiply by (-1)^p (p-1)!/(k+p+1)! = (-1)^p / (p (p+1) ... (k+p+1))
    for (int i = p; i <= k + p + 1; ++i) {
        den *= i;
        reduce(num, den);
    }
    if (p % 2 == 1) num = -num;
    if (num > std::numeric_limits<long long>::max() || num < std::numeric_limits<long long>::min() ||
        den > std::numeric_limits<long long>::max())
        throw std::overflow_error("beta_coeff: result exceeds 64-bit range");
    return Rational(static_cast<long long>(num), static_cast<long long>(den));
}

double five_term_defect(cplx x, cplx y) {
    cplx xy = x * y;
    if (x == cplx(0.0, 0.0) || x == cplx(1.0, 0.0) || y == cplx(0.0, 0.0) ||
        y == cplx(1.0, 0.0) || xy == cplx(1.0, 0.0))
        throw std::domain_error("five_term_defect: degenerate argument");
    cplx d = 1.0 - xy;
    return bloch_wigner(x) + bloch_wigner(1.0 - xy) + bloch_wigner(y) +
           bloch_wigner((1.0 - y) / d) + bloch_wigner((1.0 - x) / d);
}

double spence_kummer_defect(double x, double y) {
    if (!(0.0 < x && x <= y && y < 1.0))
        throw std::domain_error("spence_kummer_defect: need 0 < x <= y < 1");
    auto L3 = [](double t) { return zagier_l(3, cplx(t, 0.0)); };
    double omx = 1.0 - x, omy = 1.0 - y;
    KahanSum acc;
    acc.add(L3(x * omy * omy / (y * omx * omx)));
    acc.add(L3(x * y));
    acc.add(L3(x / y));
    acc.add(-2.0 * L3(x * omy / (y * omx)));
    acc.add(-2.0 * L3(y * omx / (y - 1.0)));
    acc.add(-2.0 * L3(x * omy / (x - 1.0)));
    acc.add(-2.0 * L3(omy / omx));
    acc.add(-2.0 * L3(x));
    acc.add(-2.0 * L3(y));
    acc.add(2.0 * L3(1.0));
    return acc.value();
}

}  // namespace mml::polylog
