#include "mmlab/forms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmlab/polylog.hpp"

namespace mml::forms {

namespace {

LaurentExpr one_minus(const LaurentExpr& f) { return LaurentExpr::constant(1) - f; }

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

cplx ipow(int t) {
    switch (((t % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

std::string coeff_key(const CoefficientFn& c) {
    switch (c.kind) {
        case CoefficientFn::Kind::log_abs_pow:
            return "L" + std::to_string(c.q) + "|" + c.f.print();
        case CoefficientFn::Kind::bloch_wigner:
            return "D|" + c.f.print();
        case CoefficientFn::Kind::zagier_l:
            return "Z" + std::to_string(c.n) + "|" + c.f.print();
    }
    return {};
}

std::string basis_key(const Basis1Form& b) {
    return (b.kind == Basis1Form::Kind::dlog_abs ? "l|" : "a|") + b.f.print();
}

}  // namespace

Basis1Form Basis1Form::dlog_abs(const LaurentExpr& f) {
    Basis1Form b{Kind::dlog_abs, f, {}};
    b.key = basis_key(b);
    return b;
}

Basis1Form Basis1Form::darg(const LaurentExpr& f) {
    Basis1Form b{Kind::darg, f, {}};
    b.key = basis_key(b);
    return b;
}

CoefficientFn CoefficientFn::log_abs(const LaurentExpr& f) { return log_abs_pow(f, 1); }

CoefficientFn CoefficientFn::log_abs_pow(const LaurentExpr& f, int q) {
    CoefficientFn c{Kind::log_abs_pow, f, 0, q, {}};
    c.key = coeff_key(c);
    return c;
}

CoefficientFn CoefficientFn::bloch_wigner(const LaurentExpr& f) {
    CoefficientFn c{Kind::bloch_wigner, f, 0, 1, {}};
    c.key = coeff_key(c);
    return c;
}

CoefficientFn CoefficientFn::zagier_l(int n, const LaurentExpr& f) {
    CoefficientFn c{Kind::zagier_l, f, n, 1, {}};
    c.key = coeff_key(c);
    return c;
}

double CoefficientFn::evaluate(const std::map<std::string, cplx>& env) const {
    cplx v = f.evaluate_env(env);
    switch (kind) {
        case Kind::log_abs_pow: {
            double a = std::abs(v);
            if (a == 0.0) throw std::domain_error("coefficient log|f| at a zero of f");
            return std::pow(std::log(a), q);
        }
        case Kind::bloch_wigner:
            return polylog::bloch_wigner(v);
        case Kind::zagier_l:
            return polylog::zagier_l(n, v);
    }
    return 0.0;
}

FormExpr FormExpr::zero(int degree) { return FormExpr{degree, {}}; }

FormExpr FormExpr::from_terms(int degree, std::vector<FormTerm> in) {
    // Canonical form: sort each wedge (sign into the scalar), drop terms with
    // a repeated basis form, sort the coefficient product, merge like terms.
    struct Slot {
        FormTerm term;
    };
    std::map<std::string, Slot> merged;
    for (auto& t : in) {
        if (t.scalar == cplx(0.0, 0.0)) continue;
        if (static_cast<int>(t.wedge.size()) != degree)
            throw std::invalid_argument("FormExpr: wedge length != degree");
        // insertion sort with sign tracking
        int swaps = 0;
        for (size_t i = 1; i < t.wedge.size(); ++i)
            for (size_t j = i; j > 0 && t.wedge[j].key < t.wedge[j - 1].key; --j) {
                std::swap(t.wedge[j], t.wedge[j - 1]);
                ++swaps;
            }
        bool degenerate = false;
        for (size_t i = 1; i < t.wedge.size(); ++i)
            if (t.wedge[i].key == t.wedge[i - 1].key) degenerate = true;
        if (degenerate) continue;
        if (swaps % 2 == 1) t.scalar = -t.scalar;
        std::sort(t.coeffs.begin(), t.coeffs.end(),
                  [](const CoefficientFn& a, const CoefficientFn& b) { return a.key < b.key; });
        std::string key;
        for (const auto& c : t.coeffs) key += c.key + ";";
        key += "#";
        for (const auto& w : t.wedge) key += w.key + ";";
        auto it = merged.find(key);
        if (it == merged.end())
            merged.emplace(key, Slot{std::move(t)});
        else
            it->second.term.scalar += t.scalar;
    }
    FormExpr out;
    out.degree = degree;
    for (auto& [k, slot] : merged)
        if (slot.term.scalar != cplx(0.0, 0.0)) out.terms.push_back(std::move(slot.term));
    return out;
}

FormExpr FormExpr::operator-() const {
    FormExpr out = *this;
    for (auto& t : out.terms) t.scalar = -t.scalar;
    return out;
}

FormExpr operator+(const FormExpr& a, const FormExpr& b) {
    if (a.degree != b.degree) throw std::invalid_argument("FormExpr: degree mismatch");
    std::vector<FormTerm> all = a.terms;
    all.insert(all.end(), b.terms.begin(), b.terms.end());
    return FormExpr::from_terms(a.degree, std::move(all));
}

FormExpr operator-(const FormExpr& a, const FormExpr& b) { return a + (-b); }

FormExpr operator*(cplx s, const FormExpr& a) {
    FormExpr out = a;
    for (auto& t : out.terms) t.scalar *= s;
    return FormExpr::from_terms(out.degree, std::move(out.terms));
}

FormExpr wedge(const FormExpr& a, const FormExpr& b) {
    std::vector<FormTerm> terms;
    for (const auto& ta : a.terms)
        for (const auto& tb : b.terms) {
            FormTerm t;
            t.scalar = ta.scalar * tb.scalar;
            t.coeffs = ta.coeffs;
            t.coeffs.insert(t.coeffs.end(), tb.coeffs.begin(), tb.coeffs.end());
            t.wedge = ta.wedge;
            t.wedge.insert(t.wedge.end(), tb.wedge.begin(), tb.wedge.end());
            terms.push_back(std::move(t));
        }
    return FormExpr::from_terms(a.degree + b.degree, std::move(terms));
}

// ---------------------------------------------------------------------------
// The explicit regulator forms.
// ---------------------------------------------------------------------------

FormExpr eta2(const LaurentExpr& x, const LaurentExpr& y) {
    std::vector<FormTerm> t;
    t.push_back({1.0, {CoefficientFn::log_abs(x)}, {Basis1Form::darg(y)}});
    t.push_back({-1.0, {CoefficientFn::log_abs(y)}, {Basis1Form::darg(x)}});
    return FormExpr::from_terms(1, std::move(t));
}

FormExpr eta3(const LaurentExpr& x, const LaurentExpr& y, const LaurentExpr& z) {
    std::vector<FormTerm> t;
    const LaurentExpr* c[3] = {&x, &y, &z};
    for (int i = 0; i < 3; ++i) {
        const LaurentExpr &a = *c[i], &b = *c[(i + 1) % 3], &d = *c[(i + 2) % 3];
        t.push_back({cplx(1.0 / 3.0), {CoefficientFn::log_abs(a)},
                     {Basis1Form::dlog_abs(b), Basis1Form::dlog_abs(d)}});
        t.push_back({-1.0, {CoefficientFn::log_abs(a)},
                     {Basis1Form::darg(b), Basis1Form::darg(d)}});
    }
    return FormExpr::from_terms(2, std::move(t));
}

FormExpr omega3(const LaurentExpr& x, const LaurentExpr& y) {
    if (x.is_zero() || one_minus(x).is_zero())
        throw std::domain_error("omega3: x must not be 0 or 1");
    LaurentExpr omx = one_minus(x);
    std::vector<FormTerm> t;
    t.push_back({-1.0, {CoefficientFn::bloch_wigner(x)}, {Basis1Form::darg(y)}});
    t.push_back({cplx(1.0 / 3.0), {CoefficientFn::log_abs(y), CoefficientFn::log_abs(omx)},
                 {Basis1Form::dlog_abs(x)}});
    t.push_back({cplx(-1.0 / 3.0), {CoefficientFn::log_abs(y), CoefficientFn::log_abs(x)},
                 {Basis1Form::dlog_abs(omx)}});
    return FormExpr::from_terms(1, std::move(t));
}

FormExpr eta4(const LaurentExpr& x, const LaurentExpr& y, const LaurentExpr& w,
              const LaurentExpr& z) {
    auto imw = [](const LaurentExpr& a, const LaurentExpr& b, const LaurentExpr& c) {
        LaurentExpr xs[3] = {a, b, c};
        return im_dlog_wedge(xs);
    };
    auto logc = [](const LaurentExpr& f) {
        std::vector<FormTerm> t;
        t.push_back({1.0, {CoefficientFn::log_abs(f)}, {}});
        return FormExpr::from_terms(0, std::move(t));
    };
    auto darg1 = [](const LaurentExpr& f) {
        std::vector<FormTerm> t;
        t.push_back({1.0, {}, {Basis1Form::darg(f)}});
        return FormExpr::from_terms(1, std::move(t));
    };
    FormExpr sum = -1.0 * wedge(logc(z), imw(x, y, w)) + wedge(logc(w), imw(x, y, z)) -
                   wedge(logc(y), imw(x, w, z)) + wedge(logc(x), imw(y, w, z)) +
                   wedge(eta3(x, y, w), darg1(z)) - wedge(eta3(x, y, z), darg1(w)) +
                   wedge(eta3(x, w, z), darg1(y)) - wedge(eta3(y, w, z), darg1(x));
    return cplx(0.25) * sum;
}

FormExpr omega4(const LaurentExpr& x, const LaurentExpr& y, const LaurentExpr& w) {
    if (x.is_zero() || one_minus(x).is_zero())
        throw std::domain_error("omega4: x must not be 0 or 1");
    LaurentExpr omx = one_minus(x);
    std::vector<FormTerm> t;
    t.push_back({cplx(1.0 / 3.0), {CoefficientFn::bloch_wigner(x)},
                 {Basis1Form::dlog_abs(y), Basis1Form::dlog_abs(w)}});
    t.push_back({-1.0, {CoefficientFn::bloch_wigner(x)},
                 {Basis1Form::darg(y), Basis1Form::darg(w)}});
    FormExpr first = FormExpr::from_terms(2, std::move(t));

    std::vector<FormTerm> s;
    s.push_back({1.0, {CoefficientFn::log_abs(x)}, {Basis1Form::dlog_abs(omx)}});
    s.push_back({-1.0, {CoefficientFn::log_abs(omx)}, {Basis1Form::dlog_abs(x)}});
    FormExpr leg = FormExpr::from_terms(1, std::move(s));
    return first + cplx(1.0 / 3.0) * wedge(eta2(y, w), leg);
}

FormExpr mu4(const LaurentExpr& x, const LaurentExpr& y) {
    if (x.is_zero() || one_minus(x).is_zero())
        throw std::domain_error("mu4: x must not be 0 or 1");
    std::vector<FormTerm> t;
    t.push_back({1.0, {CoefficientFn::zagier_l(3, x)}, {Basis1Form::darg(y)}});
    t.push_back({cplx(-1.0 / 3.0), {CoefficientFn::bloch_wigner(x), CoefficientFn::log_abs(y)},
                 {Basis1Form::dlog_abs(x)}});
    return FormExpr::from_terms(1, std::move(t));
}

// ---------------------------------------------------------------------------
// The general alternating-sum definition.
// ---------------------------------------------------------------------------

namespace {

// All permutations of {0..m-1} with signs.
std::vector<std::pair<std::vector<int>, int>> permutations_with_sign(int m) {
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::pair<std::vector<int>, int>> out;
    do {
        int inv = 0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (idx[i] > idx[j]) ++inv;
        out.emplace_back(idx, inv % 2 == 0 ? 1 : -1);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return out;
}

// L-hat-{p,q}(x): a 1-form (p >= 2 uses L-hat_p log^{q-1}|x| dlog|x|;
// p = 1 uses the log|x| dlog|1-x| - log|1-x| dlog|x| leg).
FormExpr lhat_pq(int p, int q, const LaurentExpr& x) {
    std::vector<FormTerm> t;
    if (p >= 2) {
        FormTerm term;
        term.scalar = (p % 2 == 0) ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
        term.coeffs.push_back(CoefficientFn::zagier_l(p, x));
        if (q >= 2) term.coeffs.push_back(CoefficientFn::log_abs_pow(x, q - 1));
        term.wedge.push_back(Basis1Form::dlog_abs(x));
        t.push_back(std::move(term));
    } else {
        LaurentExpr omx = one_minus(x);
        FormTerm t1;
        t1.scalar = 1.0;
        t1.coeffs.push_back(CoefficientFn::log_abs(x));
        if (q >= 2) t1.coeffs.push_back(CoefficientFn::log_abs_pow(x, q - 1));
        t1.wedge.push_back(Basis1Form::dlog_abs(omx));
        FormTerm t2;
        t2.scalar = -1.0;
        t2.coeffs.push_back(CoefficientFn::log_abs(omx));
        if (q >= 2) t2.coeffs.push_back(CoefficientFn::log_abs_pow(x, q - 1));
        t2.wedge.push_back(Basis1Form::dlog_abs(x));
        t.push_back(std::move(t1));
        t.push_back(std::move(t2));
    }
    return FormExpr::from_terms(1, std::move(t));
}

}  // namespace

FormExpr general_eta_head(int n, const LaurentExpr& head, std::span<const LaurentExpr> tail) {
    if (n < 2) throw std::invalid_argument("general_eta_head: order must be >= 2");
    const int m = static_cast<int>(tail.size());
    if (m > 6) throw std::invalid_argument("general_eta_head: too many wedge arguments");
    auto perms = permutations_with_sign(m);

    // First group: L-hat_n(head) * Alt_m sum_p 1/((2p+1)!(m-2p)!)
    //              dlog|x_1..x_2p| ^ (i darg x_{2p+1..m}).
    cplx hat_n = (n % 2 == 0) ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
    std::vector<FormTerm> terms;
    for (const auto& [perm, sgn] : perms) {
        for (int p = 0; 2 * p <= m; ++p) {
            FormTerm t;
            t.scalar = hat_n * ipow(m - 2 * p) *
                       (static_cast<double>(sgn) / (factorial(2 * p + 1) * factorial(m - 2 * p)));
            t.coeffs.push_back(CoefficientFn::zagier_l(n, head));
            for (int j = 0; j < 2 * p; ++j)
                t.wedge.push_back(Basis1Form::dlog_abs(tail[perm[j]]));
            for (int j = 2 * p; j < m; ++j)
                t.wedge.push_back(Basis1Form::darg(tail[perm[j]]));
            terms.push_back(std::move(t));
        }
    }
    FormExpr first = FormExpr::from_terms(m, std::move(terms));

    // Second group: sum over 1 <= k <= n-1, 1 <= p <= m of
    //   beta_{k,p} Lhat_{n-k,k}(head) ^ Alt_m( log|x_1|/((p-1)!(m-p)!)
    //   dlog|x_2..x_p| ^ (i darg x_{p+1..m}) ).
    // Terms whose polylog index n-k would drop below 1 are omitted.
    FormExpr second = FormExpr::zero(m);
    for (int k = 1; k <= n - 1; ++k) {
        for (int p = 1; p <= m; ++p) {
            double beta = polylog::beta_coeff(k, p).to_double();
            if (beta == 0.0) continue;
            std::vector<FormTerm> alt;
            for (const auto& [perm, sgn] : perms) {
                FormTerm t;
                t.scalar = ipow(m - p) *
                           (static_cast<double>(sgn) / (factorial(p - 1) * factorial(m - p)));
                t.coeffs.push_back(CoefficientFn::log_abs(tail[perm[0]]));
                for (int j = 1; j < p; ++j)
                    t.wedge.push_back(Basis1Form::dlog_abs(tail[perm[j]]));
                for (int j = p; j < m; ++j)
                    t.wedge.push_back(Basis1Form::darg(tail[perm[j]]));
                alt.push_back(std::move(t));
            }
            FormExpr alt_form = FormExpr::from_terms(m - 1, std::move(alt));
            second = second + cplx(beta) * wedge(lhat_pq(n - k, k, head), alt_form);
        }
    }
    return first + second;
}

FormExpr general_eta_pure(std::span<const LaurentExpr> tail) {
    const int m = static_cast<int>(tail.size());
    if (m < 1) throw std::invalid_argument("general_eta_pure: need at least one argument");
    if (m > 6) throw std::invalid_argument("general_eta_pure: too many wedge arguments");
    auto perms = permutations_with_sign(m);
    std::vector<FormTerm> terms;
    for (const auto& [perm, sgn] : perms) {
        for (int p = 0; 2 * p + 1 <= m; ++p) {
            FormTerm t;
            t.scalar = ipow(m - 2 * p - 1) *
                       (static_cast<double>(sgn) /
                        (factorial(2 * p + 1) * factorial(m - 2 * p - 1)));
            t.coeffs.push_back(CoefficientFn::log_abs(tail[perm[0]]));
            for (int j = 1; j <= 2 * p; ++j)
                t.wedge.push_back(Basis1Form::dlog_abs(tail[perm[j]]));
            for (int j = 2 * p + 1; j < m; ++j)
                t.wedge.push_back(Basis1Form::darg(tail[perm[j]]));
            terms.push_back(std::move(t));
        }
    }
    return FormExpr::from_terms(m - 1, std::move(terms));
}

FormExpr general_eta(int n, const std::optional<LaurentExpr>& head,
                     const std::vector<LaurentExpr>& tail) {
    if (head) return general_eta_head(n, *head, tail);
    return general_eta_pure(tail);
}

FormExpr re_dlog_wedge(std::span<const LaurentExpr> xs) {
    // Expand prod (dlog|x_j| + i darg x_j) and keep the real part.
    FormExpr acc = FormExpr::from_terms(0, {FormTerm{1.0, {}, {}}});
    for (const auto& x : xs) {
        std::vector<FormTerm> t;
        t.push_back({1.0, {}, {Basis1Form::dlog_abs(x)}});
        t.push_back({{0.0, 1.0}, {}, {Basis1Form::darg(x)}});
        acc = wedge(acc, FormExpr::from_terms(1, std::move(t)));
    }
    std::vector<FormTerm> re;
    for (const auto& t : acc.terms) {
        if (t.scalar.real() == 0.0) continue;
        FormTerm c = t;
        c.scalar = t.scalar.real();
        re.push_back(std::move(c));
    }
    return FormExpr::from_terms(acc.degree, std::move(re));
}

FormExpr im_dlog_wedge(std::span<const LaurentExpr> xs) {
    FormExpr acc = FormExpr::from_terms(0, {FormTerm{1.0, {}, {}}});
    for (const auto& x : xs) {
        std::vector<FormTerm> t;
        t.push_back({1.0, {}, {Basis1Form::dlog_abs(x)}});
        t.push_back({{0.0, 1.0}, {}, {Basis1Form::darg(x)}});
        acc = wedge(acc, FormExpr::from_terms(1, std::move(t)));
    }
    std::vector<FormTerm> im;
    for (const auto& t : acc.terms) {
        if (t.scalar.imag() == 0.0) continue;
        FormTerm c = t;
        c.scalar = t.scalar.imag();
        im.push_back(std::move(c));
    }
    return FormExpr::from_terms(acc.degree, std::move(im));
}

// ---------------------------------------------------------------------------
// Pullback evaluation with finite differences.
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, cplx> make_env(const Patch& patch, std::span<const double> u) {
    auto coords = patch.map(u);
    if (coords.size() != patch.vars.size())
        throw std::invalid_argument("Patch: coordinate count != variable count");
    std::map<std::string, cplx> env;
    for (size_t i = 0; i < coords.size(); ++i) env[patch.vars[i]] = coords[i];
    return env;
}

// Central difference of log|f| or a continuous branch of arg f along a
// stencil of four environments (u +/- h v, u +/- h/2 v), Richardson-combined.
double apply_basis(const Basis1Form& b, const std::map<std::string, cplx>& ep,
                   const std::map<std::string, cplx>& em,
                   const std::map<std::string, cplx>& ep2,
                   const std::map<std::string, cplx>& em2, double h) {
    cplx fp = b.f.evaluate_env(ep), fm = b.f.evaluate_env(em);
    cplx fp2 = b.f.evaluate_env(ep2), fm2 = b.f.evaluate_env(em2);
    if (fp == cplx(0.0, 0.0) || fm == cplx(0.0, 0.0) || fp2 == cplx(0.0, 0.0) ||
        fm2 == cplx(0.0, 0.0))
        throw std::domain_error("pullback stencil crosses a zero of an argument function");
    double d_h, d_h2;
    if (b.kind == Basis1Form::Kind::dlog_abs) {
        d_h = std::log(std::abs(fp / fm)) / (2.0 * h);
        d_h2 = std::log(std::abs(fp2 / fm2)) / h;
    } else {
        // principal argument of the ratio = continuous branch increment
        d_h = std::arg(fp / fm) / (2.0 * h);
        d_h2 = std::arg(fp2 / fm2) / h;
    }
    return (4.0 * d_h2 - d_h) / 3.0;
}

double det_small(std::vector<std::vector<double>>& a) {
    size_t n = a.size();
    if (n == 0) return 1.0;
    if (n == 1) return a[0][0];
    if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    // Gaussian elimination with partial pivoting.
    double det = 1.0;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        for (size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (a[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (size_t r = c + 1; r < n; ++r) {
            double f = a[r][c] / a[c][c];
            for (size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

}  // namespace

cplx pullback_eval(const FormExpr& form, const Patch& patch, std::span<const double> u,
                   std::span<const std::vector<double>> vectors) {
    if (static_cast<int>(vectors.size()) != form.degree)
        throw std::invalid_argument("pullback_eval: vector count != form degree");

    auto env0 = make_env(patch, u);
    const double h = patch.h;
    const int m = form.degree;

    // Four shifted environments per tangent vector, shared across all terms.
    std::vector<std::array<std::map<std::string, cplx>, 4>> stencils(m);
    std::vector<double> shifted(u.begin(), u.end());
    for (int b = 0; b < m; ++b) {
        const auto& v = vectors[b];
        if (v.size() != u.size())
            throw std::invalid_argument("pullback_eval: tangent vector dimension mismatch");
        auto at = [&](double s) {
            for (size_t i = 0; i < shifted.size(); ++i) shifted[i] = u[i] + s * v[i];
            return make_env(patch, shifted);
        };
        stencils[b] = {at(h), at(-h), at(0.5 * h), at(-0.5 * h)};
    }

    // Cache basis-form applications by (basis key, vector index).
    std::map<std::pair<std::string, int>, double> cache;
    auto apply = [&](const Basis1Form& bf, int vi) {
        auto key = std::make_pair(bf.key, vi);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        double val = apply_basis(bf, stencils[vi][0], stencils[vi][1], stencils[vi][2],
                                 stencils[vi][3], h);
        cache.emplace(key, val);
        return val;
    };

    cplx total = 0.0;
    for (const auto& term : form.terms) {
        double coeff = 1.0;
        for (const auto& c : term.coeffs) coeff *= c.evaluate(env0);
        std::vector<std::vector<double>> mat(m, std::vector<double>(m));
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) mat[a][b] = apply(term.wedge[a], b);
        total += term.scalar * coeff * det_small(mat);
    }
    return total;
}

cplx exterior_derivative_fd(const FormExpr& form, const Patch& patch, std::span<const double> u,
                            double h, std::span<const std::vector<double>> vectors) {
    const int m = form.degree;
    if (static_cast<int>(vectors.size()) != m + 1)
        throw std::invalid_argument("exterior_derivative_fd: need degree+1 vectors");
    if (m + 1 > patch.dim)
        throw std::invalid_argument("exterior_derivative_fd: patch dimension too small");

    // Nested differences: widen the inner stencil to balance cancellation
    // in the outer quotient against (Richardson-suppressed) truncation.
    Patch inner = patch;
    inner.h = std::max(patch.h, 1e-4);

    std::vector<double> shifted(u.begin(), u.end());
    auto directional = [&](int skip, double step) {
        std::vector<std::vector<double>> rest;
        for (int i = 0; i <= m; ++i)
            if (i != skip) rest.push_back(vectors[i]);
        auto eval_at = [&](double s) {
            for (size_t i = 0; i < shifted.size(); ++i)
                shifted[i] = u[i] + s * vectors[skip][i];
            return pullback_eval(form, inner, shifted, rest);
        };
        return (eval_at(step) - eval_at(-step)) / (2.0 * step);
    };

    cplx total = 0.0;
    for (int a = 0; a <= m; ++a) {
        cplx d_h = directional(a, h);
        cplx d_h2 = directional(a, 0.5 * h);
        cplx d = (4.0 * d_h2 - d_h) / 3.0;
        total += (a % 2 == 0) ? d : -d;
    }
    return total;
}

cplx pullback_on_path(const FormExpr& form, const std::vector<std::string>& vars,
                      const std::function<std::vector<cplx>(double)>& coords, double t,
                      double h) {
    if (form.degree != 1) throw std::invalid_argument("pullback_on_path: need a 1-form");
    auto env_at = [&](double s) {
        auto c = coords(s);
        if (c.size() != vars.size())
            throw std::invalid_argument("pullback_on_path: coordinate count mismatch");
        std::map<std::string, cplx> env;
        for (size_t i = 0; i < c.size(); ++i) env[vars[i]] = c[i];
        return env;
    };
    try {
        auto env0 = env_at(t);
        auto ep = env_at(t + h), em = env_at(t - h);
        auto ep2 = env_at(t + 0.5 * h), em2 = env_at(t - 0.5 * h);
        cplx total = 0.0;
        for (const auto& term : form.terms) {
            double coeff = 1.0;
            for (const auto& c : term.coeffs) coeff *= c.evaluate(env0);
            double basis = apply_basis(term.wedge[0], ep, em, ep2, em2, h);
            total += term.scalar * coeff * basis;
        }
        return total;
    } catch (const std::domain_error&) {
        return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    } catch (const expr::PoleError&) {
        return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    }
}

}  // namespace mml::forms
