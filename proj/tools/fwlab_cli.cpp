#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "fwlab/errors.hpp"
#include "fwlab/report.hpp"

namespace {

struct Flags {
    std::string config_file;
    int n = 0;
    double s = 0, p = 0, a = 0, truncation = 0;
    std::uint64_t seed = 0;
    std::int64_t samples = 0;
    int trials = 0;
    int workers = 0;
    std::string suite, out, format, functions;
};

int emit(const fwlab::ReportBundle& bundle, const fwlab::RunConfig& config) {
    const std::string text = config.format == "csv" ? bundle.csv_text() : bundle.json_text();
    if (config.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream file(config.out);
        if (!file) {
            std::cerr << "fwlab: cannot write " << config.out << "\n";
            return 2;
        }
        file << text;
    }
    std::cerr << "fwlab: " << bundle.results.size() << " results, " << bundle.violated << " violated, "
              << bundle.inconclusive << " inconclusive, " << bundle.errors << " failed jobs\n";
    return bundle.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted higher order fractional Sobolev toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    std::vector<CLI::Option*> given;
    auto* config_opt = app.add_option("--config", f.config_file, "key=value config file");
    auto* n_opt = app.add_option("--n", f.n, "dimension N");
    auto* s_opt = app.add_option("--s", f.s, "order s in (1,2)");
    auto* p_opt = app.add_option("--p", f.p, "integrability exponent p");
    auto* a_opt = app.add_option("--a", f.a, "weight exponent a");
    auto* seed_opt = app.add_option("--seed", f.seed, "base seed");
    auto* samples_opt = app.add_option("--samples", f.samples, "Monte Carlo samples per integral");
    auto* trials_opt = app.add_option("--trials", f.trials, "tuples per elementary-bounds case");
    auto* trunc_opt = app.add_option("--truncation", f.truncation, "truncation radius (0 = automatic)");
    auto* suite_opt = app.add_option("--suite", f.suite, "suite for `report`");
    auto* out_opt = app.add_option("--out", f.out, "output path (default stdout)");
    auto* format_opt = app.add_option("--format", f.format, "json or csv");
    auto* workers_opt = app.add_option("--workers", f.workers, "worker threads");
    auto* functions_opt = app.add_option("--functions", f.functions, "comma separated catalog names");

    std::string function, spec, verify_suite;
    bool all = false;
    auto* params_cmd = app.add_subcommand("params", "exponent table for the configured bundle");
    auto* norm_cmd = app.add_subcommand("norm", "evaluate one norm of one catalog function");
    norm_cmd->add_option("function", function, "catalog name")->required();
    norm_cmd->add_option("spec", spec, "weighted_lp[:q=..,beta=..] | gagliardo[:t=..,p=..,a=..] | homogeneous[:s=..,p=..,a=..]")
        ->required();
    auto* rearrange_cmd = app.add_subcommand("rearrange", "distribution, layer-cake identities and Lorentz norms");
    rearrange_cmd->add_option("function", function, "catalog name")->required();
    auto* approx_cmd = app.add_subcommand("approx", "mollify-and-cut approximation residuals for n = 1, 2, 4, 8");
    approx_cmd->add_option("function", function, "catalog name")->required();
    auto* verify_cmd = app.add_subcommand("verify", "run a check suite");
    verify_cmd->add_option("suite", verify_suite, "inequalities | orbits | elementary | probes | weak_young | all")
        ->required();
    auto* report_cmd = app.add_subcommand("report", "run a suite (or every suite with --all)");
    report_cmd->add_flag("--all", all, "every suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    fwlab::RunConfig config;
    try {
        if (config_opt->count()) fwlab::load_config_file(config, f.config_file);
        fwlab::apply_environment(config);
        if (n_opt->count()) config.dim = f.n;
        if (s_opt->count()) config.s = f.s;
        if (p_opt->count()) config.p = f.p;
        if (a_opt->count()) config.a = f.a;
        if (seed_opt->count()) config.seed = f.seed;
        if (samples_opt->count()) config.samples = f.samples;
        if (trials_opt->count()) config.trials = f.trials;
        if (trunc_opt->count()) config.truncation = f.truncation;
        if (suite_opt->count()) config.suite = f.suite;
        if (out_opt->count()) config.out = f.out;
        if (format_opt->count()) config.format = f.format;
        if (workers_opt->count()) config.workers = f.workers;
        if (functions_opt->count()) fwlab::apply_setting(config, "functions", f.functions);

        if (params_cmd->parsed()) {
            config.suite = "params";
        } else if (norm_cmd->parsed()) {
            config.suite = "norm";
            config.functions = {function};
            config.norm_spec = spec;
        } else if (rearrange_cmd->parsed()) {
            config.suite = "rearrange";
            config.functions = {function};
        } else if (approx_cmd->parsed()) {
            config.suite = "mollify-approx";
            config.functions = {function};
        } else if (verify_cmd->parsed()) {
            if (verify_suite == "all") {
                config.suite = "verify";
            } else if (verify_suite == "inequalities" || verify_suite == "orbits" || verify_suite == "elementary" ||
                       verify_suite == "probes" || verify_suite == "weak_young") {
                config.suite = verify_suite;
            } else {
                throw fwlab::UnknownName("unknown verify suite '" + verify_suite + "'");
            }
        } else if (report_cmd->parsed() && all) {
            config.suite = "all";
        }
        fwlab::check(config);
    } catch (const fwlab::Error& e) {
        std::cerr << "fwlab: configuration error: " << e.what() << "\n";
        return 2;
    }

    try {
        return emit(fwlab::run(config), config);
    } catch (const fwlab::Error& e) {
        std::cerr << "fwlab: configuration error: " << e.what() << "\n";
        return 2;
    }
}
