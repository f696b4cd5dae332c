#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fwlab/params.hpp"
#include "fwlab/quadrature.hpp"
#include "fwlab/rearrange.hpp"
#include "fwlab/verify.hpp"

namespace fwlab {

using Json = nlohmann::json;

/// Serialized forms used in report results (non-finite numbers become "inf", "-inf", "nan").
Json to_json(const Estimate& e);
Json to_json(const InequalityReport& r);
Json to_json(const SlopeReport& r);
Json to_json(const ScaleOrbitReport& r);
Json to_json(const IdentityReport& r, const std::string& function);

/// Everything a batch run depends on. Two equal configs give equal payloads.
struct RunConfig {
    int dim = 3;
    double s = 1.25;
    double p = 1.6;
    double a = 0.25;
    std::uint64_t seed = 20240101;
    /// Monte Carlo samples per integral; 0 picks the per-dimension default.
    std::int64_t samples = 0;
    /// Random tuples per (N, q) in the elementary-bounds sweep.
    int trials = 10000;
    /// Explicit truncation radius for sampled integrals; 0 keeps the automatic geometry.
    double truncation = 0.0;
    /// params, norms, norm, rearrange, mollify-approx, inequalities, orbits,
    /// elementary, probes, weak_young, verify (every check suite) or all.
    std::string suite = "all";
    /// Catalog entries the per-function suites run over; empty means the smooth catalog.
    std::vector<std::string> functions;
    /// Norm description for the `norm` suite, e.g. "gagliardo:t=0.5,p=1.4,a=0.1".
    std::string norm_spec;
    std::string out;
    std::string format = "json";
    int workers = 1;
};

/// Applies one key=value setting (config-file spelling). Throws ConstraintViolation
/// or UnknownName on bad input.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
/// Reads key=value lines ('#' starts a comment) on top of `config`.
void load_config_file(RunConfig& config, const std::string& path);
/// FWLAB_SEED and FWLAB_WORKERS; nothing else is read from the environment.
void apply_environment(RunConfig& config);
/// Throws on malformed suites, formats, worker counts or function names, and on
/// parameters that fail validation outside the weight window.
void check(const RunConfig& config);

std::vector<std::string> suite_names();

/// Bundle produced by run(): config, results in job order, warnings, timing.
struct ReportBundle {
    Json config;
    std::vector<Json> results;
    std::vector<std::string> warnings;
    Json timing;
    int violated = 0;
    int inconclusive = 0;
    int errors = 0;

    /// Everything except timing.
    Json payload() const;
    Json to_json() const;
    /// Sorted keys, two-space indentation.
    std::string json_text() const;
    /// One flat row per result; header is the sorted union of flattened keys.
    std::string csv_text() const;
    /// 0 ok, 1 when any check is violated.
    int exit_code() const { return violated > 0 ? 1 : 0; }
};

/// Parameters the run uses: validate() inside the window, relaxed() with a
/// warning when only the weight window fails.
Params run_params(const RunConfig& config, std::vector<std::string>* warnings = nullptr);

ReportBundle run(const RunConfig& config);

}  // namespace fwlab
