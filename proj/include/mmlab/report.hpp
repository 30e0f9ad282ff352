#ifndef MMLAB_REPORT_HPP
#define MMLAB_REPORT_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmlab/closedforms.hpp"

namespace mml::cli {

/// One verification or computation record. rhs-side fields are absent for
/// plain measure computations. pass <=> abs_diff <= max(tolerance, 3*std_error).
struct Report {
    std::string identity_id;
    double lhs_estimate = 0.0;
    double lhs_std_error = 0.0;
    std::optional<double> rhs_value;
    std::optional<double> abs_diff;
    std::optional<double> tolerance;
    std::optional<bool> pass;
    long long n_samples = 0;
    uint64_t seed = 0;
    std::string method;
    long long runtime_ms = 0;
};

nlohmann::ordered_json report_json(const Report& r);
std::string report_text(const Report& r);

enum class OutputFormat { text, json };

struct RunOptions {
    std::optional<measure::Method> method;
    std::optional<long long> samples;
    std::optional<int> replications;
    uint64_t seed = 42;
    std::optional<double> tol;
    std::vector<std::string> var_order;
    OutputFormat format = OutputFormat::text;
    int workers = 1;
};

/// Exit codes: 0 pass, 1 identity mismatch or assertion failure,
/// 2 usage/input error, 3 numeric failure.
int cmd_compute(const std::string& src, const RunOptions& opt, std::ostream& out,
                std::ostream& err);
int cmd_verify(const std::vector<std::string>& ids, const RunOptions& opt, std::ostream& out,
               std::ostream& err);
int cmd_forms_check(const std::string& suite, uint64_t seed, std::ostream& out,
                    std::ostream& err);
int cmd_list_identities(OutputFormat format, std::ostream& out);

/// Run one registry identity with option overrides applied.
Report run_identity(const closedform::Identity& ident, const RunOptions& opt);

}  // namespace mml::cli

#endif
