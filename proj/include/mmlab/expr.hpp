#ifndef MMLAB_EXPR_HPP
#define MMLAB_EXPR_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mml::expr {

using cplx = std::complex<double>;

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
    size_t position;
};

struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exponent vector aligned with a variable list; entries may be negative.
using Exponents = std::vector<int32_t>;
/// Sparse Laurent polynomial: exponent vector -> exact integer coefficient.
using TermMap = std::map<Exponents, long long>;

/// Rational expression num/den where both parts are sparse multivariate
/// Laurent polynomials with exact integer coefficients. Immutable in spirit:
/// all operations return new values.
class LaurentExpr {
  public:
    LaurentExpr();  // zero

    static LaurentExpr constant(long long c);
    static LaurentExpr variable(const std::string& name);
    static LaurentExpr parse(const std::string& src);

    const std::vector<std::string>& vars() const { return vars_; }
    const TermMap& num() const { return num_; }
    const TermMap& den() const { return den_; }

    bool is_zero() const { return num_.empty(); }
    bool den_is_one() const;
    bool is_constant() const;

    size_t num_terms() const { return num_.size(); }

    /// Canonical text form; parse(print()) reproduces the value exactly.
    std::string print() const;

    /// Evaluate at a point given in this expression's variable order.
    /// Throws std::domain_error for a zero coordinate with a negative
    /// exponent and PoleError when the denominator vanishes.
    cplx evaluate(std::span<const cplx> point) const;

    /// Evaluate with variables bound by name; unbound variables are an error.
    cplx evaluate_env(const std::map<std::string, cplx>& env) const;

    /// Substitute v -> 1/v for each listed variable.
    LaurentExpr invert_vars(const std::vector<std::string>& subset) const;

    LaurentExpr operator-() const;
    friend LaurentExpr operator+(const LaurentExpr& a, const LaurentExpr& b);
    friend LaurentExpr operator-(const LaurentExpr& a, const LaurentExpr& b);
    friend LaurentExpr operator*(const LaurentExpr& a, const LaurentExpr& b);
    friend LaurentExpr operator/(const LaurentExpr& a, const LaurentExpr& b);
    LaurentExpr pow(int e) const;

    /// Structural equality of the normalized representation.
    friend bool operator==(const LaurentExpr& a, const LaurentExpr& b);

    /// Value equality of rational expressions (cross multiplication).
    bool equivalent(const LaurentExpr& other) const;

    /// True when the variable occurs in the numerator or the denominator.
    bool uses_var(const std::string& name) const;

    static LaurentExpr from_parts(std::vector<std::string> vars, TermMap num, TermMap den);

  private:
    void normalize();

    std::vector<std::string> vars_;
    TermMap num_;
    TermMap den_;  // never empty
};

inline LaurentExpr operator-(long long a, const LaurentExpr& b) {
    return LaurentExpr::constant(a) - b;
}
inline LaurentExpr operator*(long long a, const LaurentExpr& b) {
    return LaurentExpr::constant(a) * b;
}

/// P viewed as a polynomial in one variable: coefficients in ascending
/// degree, leading coefficient not identically zero.
struct PolyInVar {
    std::string var;
    std::vector<LaurentExpr> coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// View of e as a polynomial in v. The denominator must be free of v;
/// negative powers of v are cleared by a monomial shift.
PolyInVar as_poly_in(const LaurentExpr& e, const std::string& v);

/// Determinant of the Sylvester matrix of p and q (same variable), exact.
LaurentExpr sylvester_resultant(const PolyInVar& p, const PolyInVar& q);

}  // namespace mml::expr

#endif
