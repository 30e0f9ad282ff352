#ifndef MMLAB_QUAD_HPP
#define MMLAB_QUAD_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mml::forms {
struct FormExpr;
}

namespace mml::quad {

using cplx = std::complex<double>;

enum class Method { qmc, adaptive1d, path };

std::string method_name(Method m);

struct QuadResult {
    double value = 0.0;
    double std_error = 0.0;
    long long n_samples = 0;
    uint64_t seed = 0;
    Method method = Method::qmc;
    long long n_rejected = 0;
    bool integrability_warning = false;
};

/// Thrown when the refinement budget is exhausted; carries the best estimate.
struct AccuracyError : std::runtime_error {
    AccuracyError(const std::string& msg, QuadResult best_so_far)
        : std::runtime_error(msg), best(best_so_far) {}
    QuadResult best;
};

struct QmcOptions {
    long long n = 1LL << 22;  // lattice size, power of two
    int replications = 16;
    uint64_t seed = 42;
    int workers = 1;
};

/// Randomly shifted rank-1 lattice rule on [0,1)^k. Deterministic for fixed
/// (seed, n, replications) regardless of worker count. Non-finite samples are
/// retried with deterministic jitter inside the same lattice cell; more than
/// 0.01% rejections sets the integrability warning flag.
QuadResult qmc_integrate(const std::function<double(std::span<const double>)>& f, int dim,
                         const QmcOptions& opt = {});

/// Adaptive quadrature on [a, b] built on tanh-sinh panels with recursive
/// bisection; integrable endpoint singularities (log type) are handled by
/// the variable transformation. Interior singular points should be listed so
/// the interval is split there first.
QuadResult adaptive_1d(const std::function<double(double)>& f, double a, double b,
                       double tol = 1e-10, const std::vector<double>& singular_points = {});

/// Smooth parametrized path t in [a, b] -> coordinate values (one complex
/// value per named variable). Breakpoints mark corner/singular parameter
/// values where the integration is split.
struct PathSpec {
    double a = 0.0;
    double b = 1.0;
    std::vector<std::string> vars;
    std::function<std::vector<cplx>(double)> map;
    std::vector<double> breakpoints;
    bool smooth = true;
};

/// Integral of a degree-1 FormExpr along the path: the form is pulled back
/// to f(t) dt with finite-difference stencils and integrated per segment.
QuadResult path_integral_1form(const forms::FormExpr& form, const PathSpec& path,
                               double tol = 1e-10);

}  // namespace mml::quad

#endif
