#ifndef MMLAB_FORMS_HPP
#define MMLAB_FORMS_HPP

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmlab/expr.hpp"

namespace mml::forms {

using cplx = std::complex<double>;
using expr::LaurentExpr;

/// d log|f| or d arg f for a nonzero rational function f.
struct Basis1Form {
    enum class Kind { dlog_abs, darg } kind;
    LaurentExpr f;
    std::string key;  // canonical identity used for wedge sorting

    static Basis1Form dlog_abs(const LaurentExpr& f);
    static Basis1Form darg(const LaurentExpr& f);
};

/// Scalar coefficient function of one rational function: log|f| powers,
/// the Bloch-Wigner dilogarithm, or the one-valued polylogarithm L_n.
struct CoefficientFn {
    enum class Kind { log_abs_pow, bloch_wigner, zagier_l } kind;
    LaurentExpr f;
    int n = 0;  // polylog order (zagier_l)
    int q = 1;  // power (log_abs_pow)
    std::string key;

    static CoefficientFn log_abs(const LaurentExpr& f);
    static CoefficientFn log_abs_pow(const LaurentExpr& f, int q);
    static CoefficientFn bloch_wigner(const LaurentExpr& f);
    static CoefficientFn zagier_l(int n, const LaurentExpr& f);

    double evaluate(const std::map<std::string, cplx>& env) const;
};

struct FormTerm {
    cplx scalar = 1.0;
    std::vector<CoefficientFn> coeffs;  // product
    std::vector<Basis1Form> wedge;      // sorted, sign carried by scalar
};

/// Linear combination of coefficient-function times wedge-of-basis-1-forms
/// terms; all terms have the same wedge length (the degree). Normalized:
/// wedges sorted with sign tracking, like terms merged, zero terms dropped.
struct FormExpr {
    int degree = 0;
    std::vector<FormTerm> terms;

    static FormExpr zero(int degree);
    static FormExpr from_terms(int degree, std::vector<FormTerm> terms);

    bool is_zero() const { return terms.empty(); }

    FormExpr operator-() const;
    friend FormExpr operator+(const FormExpr& a, const FormExpr& b);
    friend FormExpr operator-(const FormExpr& a, const FormExpr& b);
    friend FormExpr operator*(cplx s, const FormExpr& a);

    /// Exterior (wedge) product.
    friend FormExpr wedge(const FormExpr& a, const FormExpr& b);
};

/// log|x| d arg y - log|y| d arg x.
FormExpr eta2(const LaurentExpr& x, const LaurentExpr& y);

/// Cyclic sum of log|x| (1/3 dlog|y| ^ dlog|z| - darg y ^ darg z).
FormExpr eta3(const LaurentExpr& x, const LaurentExpr& y, const LaurentExpr& z);

/// -D(x) darg y + (1/3) log|y| (log|1-x| dlog|x| - log|x| dlog|1-x|).
FormExpr omega3(const LaurentExpr& x, const LaurentExpr& y);

/// The three-form of the four-variable chain.
FormExpr eta4(const LaurentExpr& x, const LaurentExpr& y, const LaurentExpr& w,
              const LaurentExpr& z);

/// D(x)(1/3 dlog|y|^dlog|w| - darg y^darg w)
/// + (1/3) eta2(y,w) ^ (log|x| dlog|1-x| - log|1-x| dlog|x|).
FormExpr omega4(const LaurentExpr& x, const LaurentExpr& y, const LaurentExpr& w);

/// L_3(x) darg y - (1/3) D(x) log|y| dlog|x|.
FormExpr mu4(const LaurentExpr& x, const LaurentExpr& y);

/// The general alternating-sum form eta_{n+m}(m+1) on {head}_n (x) tail_1 ^ ... ^ tail_m.
FormExpr general_eta_head(int n, const LaurentExpr& head, std::span<const LaurentExpr> tail);

/// The general form eta_m(m) on tail_1 ^ ... ^ tail_m.
FormExpr general_eta_pure(std::span<const LaurentExpr> tail);

/// Dispatcher: head present selects eta_{n+m}(m+1), absent selects eta_m(m).
FormExpr general_eta(int n, const std::optional<LaurentExpr>& head,
                     const std::vector<LaurentExpr>& tail);

/// Re or Im of dx_1/x_1 ^ ... ^ dx_m/x_m expanded over the real basis.
FormExpr re_dlog_wedge(std::span<const LaurentExpr> xs);
FormExpr im_dlog_wedge(std::span<const LaurentExpr> xs);

/// Smooth map from [0,1]^k into nonzero coordinate values, one per named
/// variable; derivatives are taken by central differences with step h.
struct Patch {
    int dim = 1;
    std::vector<std::string> vars;
    std::function<std::vector<cplx>(std::span<const double>)> map;
    double h = 1e-5;
};

/// Multilinear antisymmetric evaluation of the pulled-back form at u on the
/// given tangent vectors (vectors.size() == form.degree).
cplx pullback_eval(const FormExpr& form, const Patch& patch, std::span<const double> u,
                   std::span<const std::vector<double>> vectors);

/// Central-difference exterior derivative of the pullback: a (degree+1)-
/// covector evaluated on vectors (size degree+1), outer step h.
cplx exterior_derivative_fd(const FormExpr& form, const Patch& patch, std::span<const double> u,
                            double h, std::span<const std::vector<double>> vectors);

/// Pullback of a 1-form along a parametrized path, evaluated at parameter t
/// with finite-difference step h: the integrand of the path integral.
cplx pullback_on_path(const FormExpr& form, const std::vector<std::string>& vars,
                      const std::function<std::vector<cplx>(double)>& coords, double t, double h);

}  // namespace mml::forms

#endif
