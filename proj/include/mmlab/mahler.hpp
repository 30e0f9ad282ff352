#ifndef MMLAB_MAHLER_HPP
#define MMLAB_MAHLER_HPP

#include <complex>
#include <string>
#include <vector>

#include "mmlab/expr.hpp"
#include "mmlab/quad.hpp"

namespace mml::measure {

using cplx = std::complex<double>;

enum class Method { direct, jensen };

std::string method_name(Method m);

struct MahlerRequest {
    expr::LaurentExpr e;
    Method method = Method::jensen;
    std::vector<std::string> var_order;  // empty -> declaration order
    long long samples = 1LL << 22;       // lattice size per replication
    int replications = 16;
    uint64_t seed = 42;
    int workers = 1;
    double tol_1d = 1e-9;  // tolerance of the 1-D reduction integral
};

/// Roots of c_0 + c_1 z + ... + c_d z^d (ascending coefficients): companion
/// matrix eigenvalues polished by two Newton steps. Degree cap 64.
std::vector<cplx> poly_roots(std::vector<cplx> coeffs);

/// One-variable measure from the roots: log|a_d| + sum log+ |alpha_i|.
/// Coefficients must be constants.
double mm_univariate(const expr::PolyInVar& p);

/// Direct torus sampling of log|num| - log|den|.
quad::QuadResult mm_direct(const MahlerRequest& req);

/// Jensen reduction: eliminate the last variable of var_order, integrate
/// sum log+ of the fiber-root moduli over the remaining torus, and recurse
/// on the leading coefficient; rational expressions use m(P/Q) = m(P) - m(Q).
quad::QuadResult mm_jensen(const MahlerRequest& req);

/// Dispatch on req.method.
quad::QuadResult mahler_measure(const MahlerRequest& req);

}  // namespace mml::measure

#endif
