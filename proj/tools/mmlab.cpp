// Command-line front end: Mahler measures, identity verification, and the
// differential-form check suites.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmlab/report.hpp"

namespace {

void add_common_flags(CLI::App* cmd, mml::cli::RunOptions& opt, std::string& method,
                      std::string& format, std::string& var_order) {
    cmd->add_option("--method", method, "direct or jensen");
    cmd->add_option("--samples", "lattice size, a power of two (default 2^22)");
    cmd->add_option("--seed", opt.seed, "random seed (default 42)");
    cmd->add_option("--replications", "random shifts per estimate (default 16)");
    cmd->add_option("--tol", "pass tolerance override");
    cmd->add_option("--var-order", var_order, "comma separated variable elimination order");
    cmd->add_option("--report", format, "text or json");
    cmd->add_option("--workers", opt.workers, "worker threads (default 1)");
}

int finish_options(CLI::App* cmd, mml::cli::RunOptions& opt, const std::string& method,
                   const std::string& format, const std::string& var_order) {
    if (!method.empty()) {
        if (method == "direct")
            opt.method = mml::measure::Method::direct;
        else if (method == "jensen")
            opt.method = mml::measure::Method::jensen;
        else {
            std::cerr << "invalid --method: " << method << "\n";
            return 2;
        }
    }
    if (cmd->count("--samples")) opt.samples = cmd->get_option("--samples")->as<long long>();
    if (cmd->count("--replications"))
        opt.replications = cmd->get_option("--replications")->as<int>();
    if (cmd->count("--tol")) opt.tol = cmd->get_option("--tol")->as<double>();
    if (!format.empty()) {
        if (format == "json")
            opt.format = mml::cli::OutputFormat::json;
        else if (format == "text")
            opt.format = mml::cli::OutputFormat::text;
        else {
            std::cerr << "invalid --report: " << format << "\n";
            return 2;
        }
    }
    if (!var_order.empty()) {
        std::string cur;
        for (char c : var_order + ",") {
            if (c == ',') {
                if (!cur.empty()) opt.var_order.push_back(cur);
                cur.clear();
            } else if (!std::isspace(static_cast<unsigned char>(c))) {
                cur += c;
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmlab: a numerical laboratory for Mahler measures and polylogarithms"};
    app.require_subcommand(1);

    // compute
    auto* compute = app.add_subcommand("compute", "compute the Mahler measure of an expression");
    std::string compute_expr;
    compute->add_option("expr", compute_expr, "Laurent/rational expression")->required();
    mml::cli::RunOptions copt;
    std::string cmethod, cformat, cvars;
    add_common_flags(compute, copt, cmethod, cformat, cvars);

    // verify
    auto* verify = app.add_subcommand("verify", "verify registry identities");
    std::vector<std::string> verify_ids;
    verify->add_option("ids", verify_ids, "identity ids, or 'all'")->required();
    mml::cli::RunOptions vopt;
    std::string vmethod, vformat, vvars;
    add_common_flags(verify, vopt, vmethod, vformat, vvars);

    // forms check
    auto* forms = app.add_subcommand("forms", "differential-form check suites");
    auto* check = forms->add_subcommand("check", "run a check suite");
    std::string suite = "specialize";
    uint64_t fseed = 42;
    check->add_option("--suite", suite, "specialize, stokes, or chain")->required();
    check->add_option("--seed", fseed, "random seed (default 42)");

    // list-identities
    auto* list = app.add_subcommand("list-identities", "print the identity registry");
    std::string lformat;
    list->add_option("--report", lformat, "text or json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (compute->parsed()) {
        if (int rc = finish_options(compute, copt, cmethod, cformat, cvars)) return rc;
        return mml::cli::cmd_compute(compute_expr, copt, std::cout, std::cerr);
    }
    if (verify->parsed()) {
        if (int rc = finish_options(verify, vopt, vmethod, vformat, vvars)) return rc;
        return mml::cli::cmd_verify(verify_ids, vopt, std::cout, std::cerr);
    }
    if (forms->parsed()) {
        if (!check->parsed()) {
            std::cerr << "usage: mmlab forms check --suite <specialize|stokes|chain>\n";
            return 2;
        }
        return mml::cli::cmd_forms_check(suite, fseed, std::cout, std::cerr);
    }
    if (list->parsed()) {
        mml::cli::OutputFormat f =
            lformat == "json" ? mml::cli::OutputFormat::json : mml::cli::OutputFormat::text;
        return mml::cli::cmd_list_identities(f, std::cout);
    }
    return 2;
}
