#include "fwlab/report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "fwlab/errors.hpp"
#include "fwlab/functions.hpp"
#include "fwlab/mollify.hpp"
#include "fwlab/norms.hpp"
#include "fwlab/quadrature.hpp"
#include "fwlab/rearrange.hpp"
#include "fwlab/verify.hpp"

#ifndef FWLAB_VERSION
#define FWLAB_VERSION "0.0.0"
#endif

namespace fwlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) {
        throw ConstraintViolation(key, std::nan(""), 0.0, key + ": expected a number, got '" + value + "'");
    }
    return v;
}

std::int64_t parse_integer(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) {
        throw ConstraintViolation(key, std::nan(""), 0.0, key + ": expected an integer, got '" + value + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string describe(const Params& p) {
    std::ostringstream os;
    os << "N=" << p.dim() << " s=" << p.s() << " p=" << p.p() << " a=" << p.a();
    return os.str();
}

Json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

Json diagnostics_json(const std::map<std::string, double>& d) {
    Json out = Json::object();
    for (const auto& [k, v] : d) out[k] = number(v);
    return out;
}

Json estimate_result(const std::string& name, const std::string& function, const std::string& params,
                     const Estimate& e) {
    return Json{{"kind", "estimate"}, {"name", name}, {"function", function}, {"params", params}, {"estimate", to_json(e)}};
}

NormSpec parse_norm_spec(const std::string& text, const Params& params) {
    const auto colon = text.find(':');
    const std::string kind = trim(text.substr(0, colon));
    std::map<std::string, double> fields;
    if (colon != std::string::npos) {
        for (const auto& item : split(text.substr(colon + 1), ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw UnknownName("norm spec field '" + item + "' is not key=value");
            const std::string key = trim(item.substr(0, eq));
            fields[key] = parse_real(key, trim(item.substr(eq + 1)));
        }
    }
    auto take = [&fields](const std::string& key, double fallback) {
        const auto it = fields.find(key);
        if (it == fields.end()) return fallback;
        const double v = it->second;
        fields.erase(it);
        return v;
    };
    NormSpec spec;
    if (kind == "weighted_lp") {
        spec.kind = NormKind::weighted_lp;
        spec.exponent = take("q", params.p());
        spec.weight_power = take("beta", params.a());
    } else if (kind == "gagliardo") {
        spec.kind = NormKind::gagliardo;
        spec.order = take("t", params.sigma());
        spec.exponent = take("p", params.p());
        spec.weight_power = take("a", params.a());
    } else if (kind == "homogeneous") {
        spec.kind = NormKind::homogeneous;
        spec.order = take("s", params.s()) - 1.0;
        spec.exponent = take("p", params.p());
        spec.weight_power = take("a", params.a());
    } else {
        throw UnknownName("unknown norm kind '" + kind + "' (weighted_lp, gagliardo, homogeneous)");
    }
    if (!fields.empty()) throw UnknownName("unknown norm spec field '" + fields.begin()->first + "' for " + kind);
    spec.check();
    return spec;
}

struct Job {
    std::string suite;
    std::string key;
    std::function<std::vector<Json>()> body;
};

class JobList {
public:
    JobList(const RunConfig& config, const Params& params, const McConfig& mc)
        : config_(config), params_(params), mc_(mc) {
        functions_ = config.functions.empty() ? smooth_catalog_names() : config.functions;
    }

    std::vector<Job> build() {
        const std::string& s = config_.suite;
        const bool all = s == "all";
        const bool checks = all || s == "verify";
        if (all || s == "params") add_params();
        if (all || s == "norms") add_norms();
        if (s == "norm") add_single_norm();
        if (all || s == "rearrange") add_rearrange();
        if (all || s == "mollify-approx") add_approx();
        if (checks || s == "inequalities") add_inequalities();
        if (checks || s == "orbits") add_orbits();
        if (checks || s == "elementary") add_elementary();
        if (checks || s == "probes") add_probes();
        if (checks || s == "weak_young") add_weak_young();
        return std::move(jobs_);
    }

private:
    void add(const std::string& suite, const std::string& key, std::function<std::vector<Json>()> body) {
        jobs_.push_back(Job{suite, suite + "/" + key, std::move(body)});
    }

    void add_params() {
        const Params p = params_;
        add("params", "exponents", [p] {
            Json values = Json::object();
            values["sigma"] = p.sigma();
            values["p_star_sigma"] = p.p_star_sigma();
            values["p_star_s"] = p.p_star_s();
            values["kappa"] = p.homogeneous_kappa();
            values["seminorm_scaling_exponent"] = p.seminorm_scaling_exponent();
            values["lebesgue_scaling_exponent"] = p.lebesgue_scaling_exponent();
            values["unit_ball_volume"] = unit_ball_volume(p.dim());
            values["in_window"] = p.in_window();
            bool chain = p.p() < p.p_star_sigma() && p.p_star_sigma() < p.p_star_s();
            try {
                const double target = p.p_lorentz();
                values["p_lorentz"] = target;
                chain = chain && p.p_star_s() < target;
            } catch (const DegenerateExponent&) {
                values["p_lorentz"] = nullptr;
            }
            const AdmissibilityReport adm = ckn_admissible(ckn_hardy_choice(p));
            values["ckn_hardy_admissible"] = adm.admissible;
            return std::vector<Json>{Json{{"kind", "table"},
                                          {"name", "exponents"},
                                          {"function", ""},
                                          {"params", describe(p)},
                                          {"values", values},
                                          {"verdict", chain ? "holds" : "violated"}}};
        });
    }

    void add_norms() {
        for (const auto& name : functions_) {
            const Params p = params_;
            const McConfig mc = mc_;
            add("norms", name, [name, p, mc] {
                const TestFunction u = catalog(name, p);
                const std::string ps = describe(p);
                std::vector<Json> out;
                out.push_back(estimate_result("lebesgue", name, ps, weighted_lp(u, p.p(), p.a(), mc)));
                const HomogeneousNorm h = homogeneous_norm(u, p, mc);
                out.push_back(estimate_result("gradient_critical", name, ps, h.gradient_part));
                out.push_back(estimate_result("seminorm", name, ps, h.seminorm_part));
                out.push_back(estimate_result("homogeneous", name, ps, h.total));
                const GradientSeminormReadings r = gradient_seminorm_readings(u, p.sigma(), p.p(), p.a(), mc);
                out.push_back(estimate_result("seminorm_euclidean_p", name, ps, r.euclidean));
                out.push_back(estimate_result("seminorm_componentwise_p", name, ps, r.componentwise));
                return out;
            });
        }
    }

    void add_single_norm() {
        const std::string name = functions_.front();
        const Params p = params_;
        const McConfig mc = mc_;
        const std::string text = config_.norm_spec.empty() ? "weighted_lp" : config_.norm_spec;
        add("norm", name + "/" + text, [name, p, mc, text] {
            const NormSpec spec = parse_norm_spec(text, p);
            const TestFunction u = catalog(name, p.dim());
            return std::vector<Json>{estimate_result(text, name, describe(p), evaluate(u, spec, mc))};
        });
    }

    void add_rearrange() {
        for (const auto& name : functions_) {
            const Params p = params_;
            const McConfig mc = mc_;
            add("rearrange", name + "/distribution", [name, p, mc] {
                const TestFunction u = catalog(name, p);
                const RearrangementProfile prof = distribution(u, DistributionMethod::automatic, mc);
                Json values = Json::object();
                values["source"] = to_string(prof.source());
                values["sup"] = number(prof.sup());
                values["support_measure"] = number(prof.support_measure());
                Json fs = Json::object();
                for (double tau : {0.01, 0.1, 1.0}) {
                    std::ostringstream k;
                    k << tau;
                    fs[k.str()] = number(prof.fstar(tau));
                }
                values["fstar"] = fs;
                return std::vector<Json>{
                    Json{{"kind", "table"}, {"name", "distribution"}, {"function", name}, {"params", describe(p)}, {"values", values}}};
            });
            add("rearrange", name + "/layer_cake", [name, p, mc] {
                return std::vector<Json>{to_json(layer_cake_check(catalog(name, p), mc), name)};
            });
            add("rearrange", name + "/hardy_layercake", [name, p, mc] {
                return std::vector<Json>{to_json(hardy_layercake_identity(catalog(name, p), p, mc), name)};
            });
            add("rearrange", name + "/sobolev_layercake", [name, p, mc] {
                return std::vector<Json>{to_json(sobolev_layercake_identity(catalog(name, p), p, mc), name)};
            });
            add("rearrange", name + "/lorentz", [name, p, mc] {
                const TestFunction u = catalog(name, p);
                return std::vector<Json>{
                    estimate_result("lorentz_critical", name, describe(p), lorentz_quasinorm(u, p.p_lorentz(), p.p(), mc))};
            });
        }
    }

    void add_approx() {
        for (const auto& name : functions_) {
            const Params p = params_;
            const McConfig mc = mc_;
            add("mollify-approx", name, [name, p, mc] {
                const TestFunction u = catalog(name, p);
                const Estimate base = higher_seminorm(u, p, mc);
                std::vector<Json> out;
                out.push_back(estimate_result("seminorm", name, describe(p), base));
                bool monotone = true;
                Estimate previous{};
                double terminal = 0.0;
                const std::vector<int> orders = {1, 2, 4, 8};
                for (std::size_t i = 0; i < orders.size(); ++i) {
                    const ApproximationStep step = approximation_sequence(u, orders[i], p, mc);
                    const double ratio = base.value > 0.0 ? step.residual.value / base.value : 0.0;
                    Json row = estimate_result("residual", name, describe(p), step.residual);
                    row["n"] = orders[i];
                    row["ratio"] = number(ratio);
                    out.push_back(row);
                    if (i > 0) {
                        const double slack = 3.0 * std::hypot(previous.uncertainty, step.residual.uncertainty);
                        if (step.residual.value > previous.value + slack) monotone = false;
                    }
                    previous = step.residual;
                    terminal = ratio;
                }
                out.push_back(Json{{"kind", "sequence"},
                                   {"name", "approximation_residuals"},
                                   {"function", name},
                                   {"params", describe(p)},
                                   {"nonincreasing", monotone},
                                   {"terminal_ratio", number(terminal)},
                                   {"verdict", monotone ? "holds" : "violated"}});
                return out;
            });
        }
    }

    void add_inequalities() {
        using Check = InequalityReport (*)(const TestFunction&, const Params&, const McConfig&);
        const std::vector<std::pair<std::string, Check>> checks = {
            {"hardy", [](const TestFunction& u, const Params& p, const McConfig& c) { return hardy_check(u, p, c); }},
            {"rellich", &rellich_check},
            {"ckn_first_order", &ckn_first_order_check},
            {"grad_equivalence", &grad_equivalence_check},
            {"lorentz_embedding", &lorentz_embedding_check},
        };
        for (const auto& name : functions_) {
            for (const auto& [check_name, fn] : checks) {
                const Params p = params_;
                const McConfig mc = mc_;
                const Check f = fn;
                add("inequalities", name + "/" + check_name,
                    [name, p, mc, f] { return std::vector<Json>{to_json(f(catalog(name, p), p, mc))}; });
            }
        }
    }

    void add_orbits() {
        for (const auto& name : functions_) {
            for (CheckKind kind : {CheckKind::hardy, CheckKind::rellich, CheckKind::ckn_hardy, CheckKind::ckn_sobolev,
                                   CheckKind::grad_equivalence, CheckKind::lorentz_embedding}) {
                const Params p = params_;
                const McConfig mc = mc_;
                add("orbits", name + "/" + to_string(kind), [name, p, mc, kind] {
                    return std::vector<Json>{to_json(scale_orbit(kind, catalog(name, p), p, {0.5, 2.0}, 0.0, mc))};
                });
            }
        }
    }

    void add_elementary() {
        for (int n = 2; n <= 5; ++n) {
            for (double q : {0.3, 0.5, 1.0, 2.0, 3.7}) {
                std::ostringstream key;
                key << "N=" << n << "/q=" << q;
                const int trials = config_.trials;
                const std::uint64_t seed = config_.seed;
                add("elementary", key.str(),
                    [n, q, trials, seed] { return std::vector<Json>{to_json(elementary_bounds_check(n, q, trials, seed))}; });
            }
        }
    }

    void add_probes() {
        const std::vector<double> lambdas = {0.25, 0.5, 1.0, 2.0, 4.0};
        for (const auto& name : functions_) {
            const Params p = params_;
            const McConfig mc = mc_;
            add("probes", name + "/poincare", [name, p, mc, lambdas] {
                return std::vector<Json>{to_json(poincare_failure_probe(catalog(name, p), p, lambdas, mc))};
            });
            add("probes", name + "/gradient_poincare", [name, p, mc, lambdas] {
                return std::vector<Json>{to_json(gradient_poincare_failure_probe(catalog(name, p), p, lambdas, mc))};
            });
        }
    }

    void add_weak_young() {
        // |x|^{-N/3} lies in weak L^3; q = 6/5 then gives r = 6 in every dimension
        for (const auto& name : functions_) {
            const int n = params_.dim();
            const McConfig mc = mc_;
            add("weak_young", name, [name, n, mc] {
                return std::vector<Json>{to_json(weak_young_check(n / 3.0, catalog(name, n), 1.2, mc))};
            });
        }
    }

    const RunConfig& config_;
    Params params_;
    McConfig mc_;
    std::vector<std::string> functions_;
    std::vector<Job> jobs_;
};

void flatten(const Json& j, const std::string& prefix, std::map<std::string, std::string>& row) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), row);
        }
    } else if (j.is_array()) {
        const bool scalars = std::all_of(j.begin(), j.end(), [](const Json& x) { return x.is_primitive(); });
        if (scalars) {
            std::string joined;
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) joined += ";";
                joined += j[i].is_string() ? j[i].get<std::string>() : j[i].dump();
            }
            row[prefix] = joined;
        } else {
            for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), row);
        }
    } else if (j.is_string()) {
        row[prefix] = j.get<std::string>();
    } else if (j.is_null()) {
        row[prefix] = "";
    } else {
        row[prefix] = j.dump();
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

Json to_json(const Estimate& e) {
    return Json{{"value", number(e.value)},
                {"uncertainty", number(e.uncertainty)},
                {"samples", e.samples},
                {"method", to_string(e.method)}};
}

Json to_json(const InequalityReport& r) {
    Json parts = Json::array();
    for (const auto& part : r.parts) parts.push_back(to_json(part));
    return Json{{"kind", "inequality"},
                {"name", r.name},
                {"function", r.function},
                {"params", r.params},
                {"lhs", to_json(r.lhs)},
                {"rhs", to_json(r.rhs)},
                {"ratio", number(r.ratio)},
                {"ratio_uncertainty", number(r.ratio_uncertainty)},
                {"combined_uncertainty", number(r.combined_uncertainty)},
                {"slack", number(r.slack)},
                {"verdict", to_string(r.verdict)},
                {"lambda", r.lambda ? Json(*r.lambda) : Json(nullptr)},
                {"diagnostics", diagnostics_json(r.diagnostics)},
                {"parts", parts}};
}

Json to_json(const SlopeReport& r) {
    Json values = Json::array();
    for (const auto& v : r.values) values.push_back(to_json(v));
    return Json{{"kind", "slope"},
                {"name", r.name},
                {"function", r.function},
                {"params", r.params},
                {"lambdas", r.lambdas},
                {"values", values},
                {"slope", number(r.slope)},
                {"expected_slope", number(r.expected_slope)},
                {"relative_slope_error", number(r.relative_slope_error)},
                {"growth", number(r.growth)},
                {"required_growth", number(r.required_growth)},
                {"worst_doubling_z", number(r.worst_doubling_z)},
                {"verdict", to_string(r.verdict)}};
}

Json to_json(const ScaleOrbitReport& r) {
    Json reports = Json::array();
    for (const auto& x : r.reports) reports.push_back(to_json(x));
    return Json{{"kind", "orbit"},
                {"name", "scale_orbit/" + r.name},
                {"function", r.function},
                {"kappa", number(r.kappa)},
                {"lhs_exponent", number(r.exponents.lhs)},
                {"rhs_exponent", number(r.exponents.rhs)},
                {"lambdas", r.lambdas},
                {"reports", reports},
                {"worst_z", number(r.worst_z)},
                {"worst_relative", number(r.worst_relative)},
                {"verdict", r.invariant ? "holds" : "violated"}};
}

Json to_json(const IdentityReport& r, const std::string& function) {
    return Json{{"kind", "identity"},
                {"name", r.name},
                {"function", function},
                {"lhs", to_json(r.lhs)},
                {"rhs", to_json(r.rhs)},
                {"relative_gap", number(r.relative_gap)},
                {"tolerance", number(r.tolerance)},
                {"equality", r.equality},
                {"verdict", r.holds ? "holds" : "violated"}};
}

std::vector<std::string> suite_names() {
    return {"params", "norms", "norm", "rearrange", "mollify-approx", "inequalities", "orbits",
            "elementary", "probes", "weak_young", "verify", "all"};
}

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    if (key == "n" || key == "dim") {
        c.dim = static_cast<int>(parse_integer(key, value));
    } else if (key == "s") {
        c.s = parse_real(key, value);
    } else if (key == "p") {
        c.p = parse_real(key, value);
    } else if (key == "a") {
        c.a = parse_real(key, value);
    } else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    } else if (key == "samples") {
        c.samples = parse_integer(key, value);
    } else if (key == "trials") {
        c.trials = static_cast<int>(parse_integer(key, value));
    } else if (key == "truncation") {
        c.truncation = parse_real(key, value);
    } else if (key == "suite") {
        c.suite = value;
    } else if (key == "functions") {
        c.functions = split(value, ',');
    } else if (key == "norm_spec") {
        c.norm_spec = value;
    } else if (key == "out") {
        c.out = value;
    } else if (key == "format") {
        c.format = value;
    } else if (key == "workers") {
        c.workers = static_cast<int>(parse_integer(key, value));
    } else {
        throw UnknownName("unknown config key '" + key + "'");
    }
}

void load_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnknownName("cannot read config file '" + path + "'");
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UnknownName(path + ":" + std::to_string(number) + ": expected key = value");
        }
        apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    }
}

void apply_environment(RunConfig& config) {
    if (const char* seed = std::getenv("FWLAB_SEED"); seed && *seed) apply_setting(config, "seed", seed);
    if (const char* workers = std::getenv("FWLAB_WORKERS"); workers && *workers) apply_setting(config, "workers", workers);
}

Params run_params(const RunConfig& config, std::vector<std::string>* warnings) {
    try {
        return validate(config.dim, config.s, config.p, config.a);
    } catch (const ConstraintViolation& e) {
        if (e.name() != "a-window") throw;
        Params p = relaxed(config.dim, config.s, config.p, config.a);
        if (warnings) {
            warnings->push_back("a = " + std::to_string(config.a) +
                                " lies outside [0, (N - sp)/2); embedding checks may fail on this bundle");
        }
        return p;
    }
}

void check(const RunConfig& config) {
    run_params(config);
    const auto suites = suite_names();
    if (std::find(suites.begin(), suites.end(), config.suite) == suites.end()) {
        throw UnknownName("unknown suite '" + config.suite + "'");
    }
    if (config.format != "json" && config.format != "csv") {
        throw UnknownName("unknown format '" + config.format + "' (json, csv)");
    }
    if (config.workers < 1) throw ConstraintViolation("workers", config.workers, 1, "workers must be >= 1");
    if (config.trials < 1) throw ConstraintViolation("trials", config.trials, 1, "trials must be >= 1");
    if (config.samples != 0 && config.samples < 1000) {
        throw ConstraintViolation("samples", static_cast<double>(config.samples), 1000, "samples must be >= 1000");
    }
    if (config.truncation < 0.0) throw ConstraintViolation("truncation", config.truncation, 0.0, "truncation must be >= 0");
    for (const auto& f : config.functions) catalog(f, config.dim);
    if (config.suite == "norm") {
        if (config.functions.size() != 1) throw UnknownName("the norm suite takes exactly one function");
        parse_norm_spec(config.norm_spec.empty() ? "weighted_lp" : config.norm_spec, run_params(config));
    }
}

Json ReportBundle::payload() const {
    Json out = Json::object();
    out["config"] = config;
    out["results"] = results;
    out["warnings"] = warnings;
    return out;
}

Json ReportBundle::to_json() const {
    Json out = payload();
    out["timing"] = timing;
    return out;
}

std::string ReportBundle::json_text() const { return to_json().dump(2) + "\n"; }

std::string ReportBundle::csv_text() const {
    std::vector<std::map<std::string, std::string>> rows;
    std::set<std::string> columns;
    for (const auto& r : results) {
        std::map<std::string, std::string> row;
        flatten(r, "", row);
        for (const auto& [k, v] : row) columns.insert(k);
        rows.push_back(std::move(row));
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& c : columns) {
        os << (first ? "" : ",") << csv_field(c);
        first = false;
    }
    os << "\n";
    for (const auto& row : rows) {
        first = true;
        for (const auto& c : columns) {
            const auto it = row.find(c);
            os << (first ? "" : ",") << (it == row.end() ? "" : csv_field(it->second));
            first = false;
        }
        os << "\n";
    }
    return os.str();
}

ReportBundle run(const RunConfig& config) {
    check(config);
    const auto start = std::chrono::steady_clock::now();
    ReportBundle bundle;
    const Params params = run_params(config, &bundle.warnings);

    McConfig mc = McConfig::for_dimension(config.dim, config.seed);
    if (config.samples > 0) mc.sample_count = config.samples;
    mc.truncation_radius = config.truncation;
    mc.workers = 1;

    bundle.config = Json{{"dim", config.dim},
                         {"s", config.s},
                         {"p", config.p},
                         {"a", config.a},
                         {"seed", config.seed},
                         {"samples", mc.sample_count},
                         {"trials", config.trials},
                         {"truncation", config.truncation},
                         {"suite", config.suite},
                         {"functions", config.functions.empty() ? smooth_catalog_names() : config.functions},
                         {"norm_spec", config.norm_spec},
                         {"format", config.format},
                         {"workers", config.workers},
                         {"version", FWLAB_VERSION}};

    JobList list(config, params, mc);
    const std::vector<Job> jobs = list.build();
    std::vector<std::vector<Json>> outputs(jobs.size());
    std::vector<std::string> failures(jobs.size());
    std::vector<double> seconds(jobs.size(), 0.0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                outputs[i] = jobs[i].body();
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
            seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const int threads = std::max(1, std::min<int>(config.workers, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Json job_times = Json::object();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        job_times[jobs[i].key] = seconds[i];
        if (!failures[i].empty()) {
            ++bundle.errors;
            bundle.warnings.push_back(jobs[i].key + " failed: " + failures[i]);
            bundle.results.push_back(Json{{"kind", "error"},
                                          {"suite", jobs[i].suite},
                                          {"job", jobs[i].key},
                                          {"name", jobs[i].key},
                                          {"message", failures[i]},
                                          {"verdict", "error"}});
            continue;
        }
        for (auto& r : outputs[i]) {
            r["suite"] = jobs[i].suite;
            r["job"] = jobs[i].key;
            const std::string verdict = r.value("verdict", "");
            if (verdict == "violated") ++bundle.violated;
            if (verdict == "inconclusive") {
                ++bundle.inconclusive;
                bundle.warnings.push_back(jobs[i].key + ": " + r.value("name", "") + " inconclusive");
            }
            bundle.results.push_back(std::move(r));
        }
    }
    bundle.timing = Json{{"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
                         {"jobs", job_times}};
    return bundle;
}

}  // namespace fwlab
