#include "mmlab/report.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "mmlab/forms_checks.hpp"

namespace mml::cli {

namespace {

using Clock = std::chrono::steady_clock;

long long ms_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

measure::MahlerRequest apply_options(measure::MahlerRequest req, const RunOptions& opt) {
    if (opt.method) req.method = *opt.method;
    if (opt.samples) req.samples = *opt.samples;
    if (opt.replications) req.replications = *opt.replications;
    if (!opt.var_order.empty()) req.var_order = opt.var_order;
    req.seed = opt.seed;
    req.workers = opt.workers;
    return req;
}

}  // namespace

nlohmann::ordered_json report_json(const Report& r) {
    nlohmann::ordered_json j;
    j["identity_id"] = r.identity_id;
    j["lhs_estimate"] = r.lhs_estimate;
    j["lhs_std_error"] = r.lhs_std_error;
    if (r.rhs_value) j["rhs_value"] = *r.rhs_value;
    if (r.abs_diff) j["abs_diff"] = *r.abs_diff;
    if (r.tolerance) j["tolerance"] = *r.tolerance;
    if (r.pass) j["pass"] = *r.pass;
    j["n_samples"] = r.n_samples;
    j["seed"] = r.seed;
    j["method"] = r.method;
    j["runtime_ms"] = r.runtime_ms;
    return j;
}

std::string report_text(const Report& r) {
    std::ostringstream os;
    os.precision(12);
    os << r.identity_id << ": m = " << r.lhs_estimate << " +- " << r.lhs_std_error;
    if (r.rhs_value) {
        os << "  rhs = " << *r.rhs_value << "  |diff| = " << *r.abs_diff
           << (r.pass && *r.pass ? "  PASS" : "  FAIL");
    }
    os << "  [" << r.method << ", n=" << r.n_samples << ", seed=" << r.seed << ", "
       << r.runtime_ms << " ms]";
    return os.str();
}

Report run_identity(const closedform::Identity& ident, const RunOptions& opt) {
    auto t0 = Clock::now();
    measure::MahlerRequest req = apply_options(ident.lhs, opt);
    quad::QuadResult lhs = measure::mahler_measure(req);
    double rhs = ident.rhs();
    Report r;
    r.identity_id = ident.id;
    r.lhs_estimate = lhs.value;
    r.lhs_std_error = lhs.std_error;
    r.rhs_value = rhs;
    r.abs_diff = std::abs(lhs.value - rhs);
    r.tolerance = opt.tol.value_or(ident.tolerance);
    r.pass = *r.abs_diff <= std::max(*r.tolerance, 3.0 * lhs.std_error);
    r.n_samples = lhs.n_samples;
    r.seed = req.seed;
    r.method = measure::method_name(req.method);
    r.runtime_ms = ms_since(t0);
    return r;
}

int cmd_compute(const std::string& src, const RunOptions& opt, std::ostream& out,
                std::ostream& err) {
    Report r;
    auto t0 = Clock::now();
    try {
        measure::MahlerRequest req;
        req.e = expr::LaurentExpr::parse(src);
        req = apply_options(std::move(req), opt);
        if (opt.method) req.method = *opt.method;
        quad::QuadResult q = measure::mahler_measure(req);
        r.identity_id = src;
        r.lhs_estimate = q.value;
        r.lhs_std_error = q.std_error;
        r.n_samples = q.n_samples;
        r.seed = req.seed;
        r.method = measure::method_name(req.method);
        r.runtime_ms = ms_since(t0);
    } catch (const expr::ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    if (opt.format == OutputFormat::json)
        out << report_json(r).dump(2) << "\n";
    else
        out << report_text(r) << "\n";
    return 0;
}

int cmd_verify(const std::vector<std::string>& ids, const RunOptions& opt, std::ostream& out,
               std::ostream& err) {
    std::vector<const closedform::Identity*> todo;
    if (ids.size() == 1 && ids[0] == "all") {
        for (const auto& ident : closedform::registry()) todo.push_back(&ident);
    } else {
        for (const auto& id : ids) {
            const auto* ident = closedform::find_identity(id);
            if (!ident) {
                err << "unknown identity: " << id << "\n";
                return 2;
            }
            todo.push_back(ident);
        }
    }
    bool all_pass = true;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto* ident : todo) {
        Report r;
        try {
            r = run_identity(*ident, opt);
        } catch (const std::exception& e) {
            err << "numeric failure on " << ident->id << ": " << e.what() << "\n";
            return 3;
        }
        all_pass = all_pass && r.pass.value_or(false);
        if (opt.format == OutputFormat::json)
            arr.push_back(report_json(r));
        else
            out << report_text(r) << "\n";
    }
    if (opt.format == OutputFormat::json) out << arr.dump(2) << "\n";
    return all_pass ? 0 : 1;
}

int cmd_forms_check(const std::string& suite, uint64_t seed, std::ostream& out,
                    std::ostream& err) {
    forms::checks::CheckResult r;
    try {
        if (suite == "specialize")
            r = forms::checks::specialization_suite(seed);
        else if (suite == "stokes")
            r = forms::checks::stokes_suite(seed);
        else if (suite == "chain")
            r = forms::checks::dchain_suite(seed);
        else {
            err << "unknown suite: " << suite << " (expected specialize|stokes|chain)\n";
            return 2;
        }
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    out << r.detail;
    out << (r.pass ? "OK" : "FAILED") << " (" << r.checks << " checks, worst deviation "
        << r.worst << ")\n";
    return r.pass ? 0 : 1;
}

int cmd_list_identities(OutputFormat format, std::ostream& out) {
    const auto& reg = closedform::registry();
    if (format == OutputFormat::json) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& ident : reg) {
            nlohmann::ordered_json j;
            j["id"] = ident.id;
            j["expr"] = ident.lhs.e.print();
            j["method"] = measure::method_name(ident.lhs.method);
            j["samples"] = ident.lhs.samples;
            j["replications"] = ident.lhs.replications;
            j["tolerance"] = ident.tolerance;
            j["rhs_value"] = ident.rhs();
            j["description"] = ident.description;
            arr.push_back(j);
        }
        out << arr.dump(2) << "\n";
    } else {
        for (const auto& ident : reg) {
            out.precision(12);
            out << ident.id << "  " << ident.lhs.e.print() << "  rhs = " << ident.rhs()
                << "  tol = " << ident.tolerance << "\n    " << ident.description << "\n";
        }
    }
    return 0;
}

}  // namespace mml::cli
