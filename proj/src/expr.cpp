#include "mmlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace mml::expr {

namespace {

long long checked_add(long long a, long long b) {
    __int128 r = static_cast<__int128>(a) + b;
    if (r > INT64_MAX || r < INT64_MIN) throw std::overflow_error("coefficient overflow");
    return static_cast<long long>(r);
}

long long checked_mul(long long a, long long b) {
    __int128 r = static_cast<__int128>(a) * b;
    if (r > INT64_MAX || r < INT64_MIN) throw std::overflow_error("coefficient overflow");
    return static_cast<long long>(r);
}

// Merge two ordered variable lists, preserving first-appearance order.
std::vector<std::string> union_vars(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b) {
    std::vector<std::string> out = a;
    for (const auto& v : b)
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
}

TermMap remap(const TermMap& m, const std::vector<std::string>& from,
              const std::vector<std::string>& to) {
    std::vector<int> idx(from.size());
    for (size_t i = 0; i < from.size(); ++i) {
        auto it = std::find(to.begin(), to.end(), from[i]);
        idx[i] = static_cast<int>(it - to.begin());
    }
    TermMap out;
    for (const auto& [e, c] : m) {
        Exponents ne(to.size(), 0);
        for (size_t i = 0; i < e.size(); ++i) ne[idx[i]] = e[i];
        out[std::move(ne)] = c;
    }
    return out;
}

TermMap add_maps(const TermMap& a, const TermMap& b, int sign) {
    TermMap out = a;
    for (const auto& [e, c] : b) {
        long long& slot = out[e];
        slot = checked_add(slot, sign > 0 ? c : -c);
        if (slot == 0) out.erase(e);
    }
    return out;
}

TermMap mul_maps(const TermMap& a, const TermMap& b) {
    TermMap out;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            Exponents e(ea.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            long long& slot = out[e];
            slot = checked_add(slot, checked_mul(ca, cb));
            if (slot == 0) out.erase(e);
        }
    return out;
}

cplx pow_int(cplx z, long long e) {
    if (e == 0) return 1.0;
    bool inv = e < 0;
    unsigned long long k = inv ? -static_cast<unsigned long long>(e) : e;
    cplx base = z, acc = 1.0;
    while (k) {
        if (k & 1ULL) acc *= base;
        base *= base;
        k >>= 1;
    }
    return inv ? 1.0 / acc : acc;
}

cplx eval_map(const TermMap& m, std::span<const cplx> point) {
    cplx s = 0.0;
    for (const auto& [e, c] : m) {
        cplx t = static_cast<double>(c);
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (point[i] == cplx(0.0, 0.0) && e[i] < 0)
                throw std::domain_error("evaluate: zero coordinate with negative exponent");
            t *= pow_int(point[i], e[i]);
        }
        s += t;
    }
    return s;
}

}  // namespace

LaurentExpr::LaurentExpr() { den_[Exponents{}] = 1; }

LaurentExpr LaurentExpr::from_parts(std::vector<std::string> vars, TermMap num, TermMap den) {
    LaurentExpr e;
    e.vars_ = std::move(vars);
    e.num_ = std::move(num);
    e.den_ = std::move(den);
    e.normalize();
    return e;
}

LaurentExpr LaurentExpr::constant(long long c) {
    TermMap n;
    if (c != 0) n[Exponents{}] = c;
    TermMap d;
    d[Exponents{}] = 1;
    return from_parts({}, std::move(n), std::move(d));
}

LaurentExpr LaurentExpr::variable(const std::string& name) {
    TermMap n, d;
    n[Exponents{1}] = 1;
    d[Exponents{0}] = 1;
    return from_parts({name}, std::move(n), std::move(d));
}

bool LaurentExpr::den_is_one() const {
    return den_.size() == 1 && den_.begin()->second == 1 &&
           std::all_of(den_.begin()->first.begin(), den_.begin()->first.end(),
                       [](int32_t e) { return e == 0; });
}

bool LaurentExpr::is_constant() const {
    if (num_.size() > 1 || den_.size() > 1) return false;
    auto all_zero = [](const Exponents& e) {
        return std::all_of(e.begin(), e.end(), [](int32_t x) { return x == 0; });
    };
    if (!num_.empty() && !all_zero(num_.begin()->first)) return false;
    return all_zero(den_.begin()->first);
}

bool LaurentExpr::uses_var(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) return false;
    size_t i = it - vars_.begin();
    for (const auto& [e, c] : num_)
        if (e[i] != 0) return true;
    for (const auto& [e, c] : den_)
        if (e[i] != 0) return true;
    return false;
}

void LaurentExpr::normalize() {
    std::erase_if(num_, [](const auto& kv) { return kv.second == 0; });
    std::erase_if(den_, [](const auto& kv) { return kv.second == 0; });
    if (den_.empty()) throw std::domain_error("LaurentExpr: zero denominator");
    if (num_.empty()) {
        vars_.clear();
        den_.clear();
        den_[Exponents{}] = 1;
        return;
    }
    // Canonical variable order, so that printing and reparsing commute.
    if (!std::is_sorted(vars_.begin(), vars_.end())) {
        std::vector<std::string> sorted = vars_;
        std::sort(sorted.begin(), sorted.end());
        num_ = remap(num_, vars_, sorted);
        den_ = remap(den_, vars_, sorted);
        vars_ = std::move(sorted);
    }
    // Prune variables that occur nowhere.
    std::vector<bool> used(vars_.size(), false);
    for (const auto& m : {num_, den_})
        for (const auto& [e, c] : m)
            for (size_t i = 0; i < e.size(); ++i)
                if (e[i] != 0) used[i] = true;
    if (std::find(used.begin(), used.end(), false) != used.end()) {
        std::vector<std::string> nv;
        for (size_t i = 0; i < vars_.size(); ++i)
            if (used[i]) nv.push_back(vars_[i]);
        auto shrink = [&](const TermMap& m) {
            TermMap out;
            for (const auto& [e, c] : m) {
                Exponents ne;
                for (size_t i = 0; i < e.size(); ++i)
                    if (used[i]) ne.push_back(e[i]);
                out[std::move(ne)] = c;
            }
            return out;
        };
        num_ = shrink(num_);
        den_ = shrink(den_);
        vars_ = std::move(nv);
    }
    // Integer content.
    long long g = 0;
    for (const auto& m : {num_, den_})
        for (const auto& [e, c] : m) g = std::gcd(g, c < 0 ? -c : c);
    if (g > 1) {
        for (auto& [e, c] : num_) c /= g;
        for (auto& [e, c] : den_) c /= g;
    }
    // Sign: lexicographically greatest denominator term has positive coefficient.
    if (den_.rbegin()->second < 0) {
        for (auto& [e, c] : num_) c = -c;
        for (auto& [e, c] : den_) c = -c;
    }
    // A monomial denominator is a unit times a constant: fold the monomial
    // into the numerator.
    if (den_.size() == 1) {
        Exponents shift = den_.begin()->first;
        bool nonzero = std::any_of(shift.begin(), shift.end(), [](int32_t e) { return e != 0; });
        if (nonzero) {
            long long c = den_.begin()->second;
            TermMap nn;
            for (const auto& [e, coef] : num_) {
                Exponents ne(e.size());
                for (size_t i = 0; i < e.size(); ++i) ne[i] = e[i] - shift[i];
                nn[std::move(ne)] = coef;
            }
            num_ = std::move(nn);
            den_.clear();
            den_[Exponents(vars_.size(), 0)] = c;
        }
    }
}

LaurentExpr LaurentExpr::operator-() const {
    TermMap n = num_;
    for (auto& [e, c] : n) c = -c;
    return from_parts(vars_, std::move(n), den_);
}

LaurentExpr operator+(const LaurentExpr& a, const LaurentExpr& b) {
    auto vars = union_vars(a.vars_, b.vars_);
    TermMap an = remap(a.num_, a.vars_, vars), ad = remap(a.den_, a.vars_, vars);
    TermMap bn = remap(b.num_, b.vars_, vars), bd = remap(b.den_, b.vars_, vars);
    TermMap num = add_maps(mul_maps(an, bd), mul_maps(bn, ad), +1);
    return LaurentExpr::from_parts(std::move(vars), std::move(num), mul_maps(ad, bd));
}

LaurentExpr operator-(const LaurentExpr& a, const LaurentExpr& b) { return a + (-b); }

LaurentExpr operator*(const LaurentExpr& a, const LaurentExpr& b) {
    auto vars = union_vars(a.vars_, b.vars_);
    TermMap an = remap(a.num_, a.vars_, vars), ad = remap(a.den_, a.vars_, vars);
    TermMap bn = remap(b.num_, b.vars_, vars), bd = remap(b.den_, b.vars_, vars);
    return LaurentExpr::from_parts(std::move(vars), mul_maps(an, bn), mul_maps(ad, bd));
}

LaurentExpr operator/(const LaurentExpr& a, const LaurentExpr& b) {
    if (b.is_zero()) throw std::domain_error("division by zero expression");
    auto vars = union_vars(a.vars_, b.vars_);
    TermMap an = remap(a.num_, a.vars_, vars), ad = remap(a.den_, a.vars_, vars);
    TermMap bn = remap(b.num_, b.vars_, vars), bd = remap(b.den_, b.vars_, vars);
    return LaurentExpr::from_parts(std::move(vars), mul_maps(an, bd), mul_maps(ad, bn));
}

LaurentExpr LaurentExpr::pow(int e) const {
    if (e == 0) return constant(1);
    LaurentExpr base = *this;
    if (e < 0) {
        if (is_zero()) throw std::domain_error("division by zero expression");
        base = from_parts(vars_, den_, num_);
        e = -e;
    }
    LaurentExpr acc = constant(1);
    while (e) {
        if (e & 1) acc = acc * base;
        if (e >>= 1) base = base * base;
    }
    return acc;
}

bool operator==(const LaurentExpr& a, const LaurentExpr& b) {
    return a.vars_ == b.vars_ && a.num_ == b.num_ && a.den_ == b.den_;
}

bool LaurentExpr::equivalent(const LaurentExpr& other) const {
    return (*this - other).is_zero();
}

cplx LaurentExpr::evaluate(std::span<const cplx> point) const {
    if (point.size() != vars_.size())
        throw std::invalid_argument("evaluate: point dimension mismatch");
    cplx d = eval_map(den_, point);
    if (d == cplx(0.0, 0.0)) throw PoleError("evaluate: denominator vanishes at point");
    return eval_map(num_, point) / d;
}

cplx LaurentExpr::evaluate_env(const std::map<std::string, cplx>& env) const {
    std::vector<cplx> point(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) {
        auto it = env.find(vars_[i]);
        if (it == env.end())
            throw std::invalid_argument("evaluate_env: unbound variable " + vars_[i]);
        point[i] = it->second;
    }
    return evaluate(point);
}

LaurentExpr LaurentExpr::invert_vars(const std::vector<std::string>& subset) const {
    std::vector<bool> flip(vars_.size(), false);
    for (const auto& name : subset) {
        auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it != vars_.end()) flip[it - vars_.begin()] = true;
    }
    auto apply = [&](const TermMap& m) {
        TermMap out;
        for (const auto& [e, c] : m) {
            Exponents ne = e;
            for (size_t i = 0; i < ne.size(); ++i)
                if (flip[i]) ne[i] = -ne[i];
            out[std::move(ne)] = c;
        }
        return out;
    };
    return from_parts(vars_, apply(num_), apply(den_));
}

std::string LaurentExpr::print() const {
    auto print_map = [&](const TermMap& m) {
        std::ostringstream os;
        bool first = true;
        for (auto it = m.rbegin(); it != m.rend(); ++it) {
            const auto& [e, c] = *it;
            long long a = c;
            if (first) {
                if (a < 0) {
                    os << "-";
                    a = -a;
                }
            } else {
                os << (a < 0 ? " - " : " + ");
                if (a < 0) a = -a;
            }
            first = false;
            bool any_var = std::any_of(e.begin(), e.end(), [](int32_t x) { return x != 0; });
            if (!any_var) {
                os << a;
                continue;
            }
            bool lead = true;
            if (a != 1) {
                os << a;
                lead = false;
            }
            for (size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (!lead) os << "*";
                lead = false;
                os << vars_[i];
                if (e[i] != 1) os << "^" << e[i];
            }
        }
        if (first) os << "0";
        return os.str();
    };
    if (den_is_one()) return print_map(num_);
    return "(" + print_map(num_) + ")/(" + print_map(den_) + ")";
}

// ---------------------------------------------------------------------------
// Parser: expr := term (('+'|'-') term)*; term := factor (('*'|'/') factor)*;
// factor := base ('^' signed-int)?; base := ident | integer | '(' expr ')'
//         | '-' factor. Identifiers are single letters or letter+digits.
// ---------------------------------------------------------------------------

namespace {

class Parser {
  public:
    explicit Parser(const std::string& src) : src_(src), pos_(0) {}

    LaurentExpr run() {
        LaurentExpr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    int peek() {
        skip_ws();
        return pos_ < src_.size() ? static_cast<unsigned char>(src_[pos_]) : -1;
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    LaurentExpr parse_expr() {
        LaurentExpr e = parse_term();
        for (;;) {
            if (accept('+'))
                e = e + parse_term();
            else if (accept('-'))
                e = e - parse_term();
            else
                return e;
        }
    }

    LaurentExpr parse_term() {
        LaurentExpr e = parse_factor();
        for (;;) {
            if (accept('*')) {
                e = e * parse_factor();
            } else if (accept('/')) {
                size_t at = pos_;
                LaurentExpr d = parse_factor();
                if (d.is_zero()) throw ParseError("division by zero", at);
                e = e / d;
            } else {
                return e;
            }
        }
    }

    LaurentExpr parse_factor() {
        LaurentExpr e = parse_base();
        if (accept('^')) {
            long long ex = parse_signed_int();
            if (ex < INT32_MIN || ex > INT32_MAX) fail("exponent out of range");
            if (ex < 0 && e.is_zero()) fail("zero raised to a negative power");
            e = e.pow(static_cast<int>(ex));
        }
        return e;
    }

    LaurentExpr parse_base() {
        int c = peek();
        if (c == '-') {
            ++pos_;
            return -parse_factor();
        }
        if (c == '(') {
            ++pos_;
            LaurentExpr e = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isalpha(c)) return LaurentExpr::variable(parse_ident());
        if (std::isdigit(c)) return LaurentExpr::constant(parse_uint());
        fail("expected identifier, number, '(' or '-'");
    }

    std::string parse_ident() {
        skip_ws();
        std::string name(1, src_[pos_++]);
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            name += src_[pos_++];
        return name;
    }

    long long parse_uint() {
        skip_ws();
        size_t start = pos_;
        long long v = 0;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            int d = src_[pos_] - '0';
            if (v > (INT64_MAX - d) / 10) throw ParseError("integer literal too large", start);
            v = v * 10 + d;
            ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
            throw ParseError("non-integer numeric literal", pos_);
        return v;
    }

    long long parse_signed_int() {
        skip_ws();
        long long sign = 1;
        if (accept('-'))
            sign = -1;
        else
            accept('+');
        if (!std::isdigit(peek())) fail("expected integer exponent");
        return sign * parse_uint();
    }

    const std::string& src_;
    size_t pos_;
};

}  // namespace

LaurentExpr LaurentExpr::parse(const std::string& src) { return Parser(src).run(); }

// ---------------------------------------------------------------------------

PolyInVar as_poly_in(const LaurentExpr& e, const std::string& v) {
    if (e.is_zero()) throw std::domain_error("as_poly_in: zero expression");
    const auto& vars = e.vars();
    auto it = std::find(vars.begin(), vars.end(), v);
    if (it == vars.end()) return PolyInVar{v, {e}};
    size_t vi = it - vars.begin();
    for (const auto& [exp, c] : e.den())
        if (exp[vi] != 0)
            throw std::domain_error("as_poly_in: denominator involves the variable");

    int32_t lo = INT32_MAX, hi = INT32_MIN;
    for (const auto& [exp, c] : e.num()) {
        lo = std::min(lo, exp[vi]);
        hi = std::max(hi, exp[vi]);
    }
    int32_t shift = lo < 0 ? -lo : 0;  // clear negative powers of v

    std::vector<std::string> rest;
    for (size_t i = 0; i < vars.size(); ++i)
        if (i != vi) rest.push_back(vars[i]);
    auto project = [&](const Exponents& exp) {
        Exponents out;
        for (size_t i = 0; i < exp.size(); ++i)
            if (i != vi) out.push_back(exp[i]);
        return out;
    };

    TermMap den_rest;
    for (const auto& [exp, c] : e.den()) den_rest[project(exp)] = c;

    int degree = hi + shift;
    std::vector<TermMap> coeff(degree + 1);
    for (const auto& [exp, c] : e.num()) coeff[exp[vi] + shift][project(exp)] = c;

    PolyInVar p;
    p.var = v;
    for (int d = 0; d <= degree; ++d)
        p.coeffs.push_back(LaurentExpr::from_parts(rest, std::move(coeff[d]), den_rest));
    while (p.coeffs.size() > 1 && p.coeffs.back().is_zero()) p.coeffs.pop_back();
    return p;
}

namespace {

// Determinant by first-row expansion over column subsets, memoized. Exact;
// intended for the small Sylvester matrices that occur at desk scale.
class DetMemo {
  public:
    DetMemo(const std::vector<std::vector<LaurentExpr>>& m) : m_(m), n_(m.size()) {}

    LaurentExpr run() { return det((n_ >= 32 ? 0u : (1u << n_)) - 1u); }

  private:
    LaurentExpr det(uint32_t mask) {
        if (mask == 0) return LaurentExpr::constant(1);
        auto found = memo_.find(mask);
        if (found != memo_.end()) return found->second;
        size_t row = n_ - static_cast<size_t>(__builtin_popcount(mask));
        LaurentExpr acc;
        int parity = 0;
        for (size_t j = 0; j < n_; ++j) {
            if (!(mask & (1u << j))) continue;
            const LaurentExpr& entry = m_[row][j];
            if (!entry.is_zero()) {
                LaurentExpr sub = det(mask & ~(1u << j));
                LaurentExpr contrib = entry * sub;
                acc = (parity % 2 == 0) ? acc + contrib : acc - contrib;
            }
            ++parity;
        }
        memo_.emplace(mask, acc);
        return acc;
    }

    const std::vector<std::vector<LaurentExpr>>& m_;
    size_t n_;
    std::unordered_map<uint32_t, LaurentExpr> memo_;
};

}  // namespace

LaurentExpr sylvester_resultant(const PolyInVar& p, const PolyInVar& q) {
    if (p.var != q.var)
        throw std::invalid_argument("sylvester_resultant: different eliminated variables");
    int dp = p.degree(), dq = q.degree();
    if (dp < 1 || dq < 1)
        throw std::domain_error("sylvester_resultant: degree must be >= 1");
    size_t n = static_cast<size_t>(dp + dq);
    if (n > 20) throw std::domain_error("sylvester_resultant: matrix too large");
    std::vector<std::vector<LaurentExpr>> m(n, std::vector<LaurentExpr>(n));
    for (int i = 0; i < dq; ++i)
        for (int j = 0; j <= dp; ++j) m[i][i + j] = p.coeffs[dp - j];
    for (int i = 0; i < dp; ++i)
        for (int j = 0; j <= dq; ++j) m[dq + i][i + j] = q.coeffs[dq - j];
    return DetMemo(m).run();
}

}  // namespace mml::expr
