#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fwlab/functions.hpp"
#include "fwlab/params.hpp"
#include "fwlab/quadrature.hpp"

namespace fwlab {

enum class Verdict { holds, violated, inconclusive };

std::string to_string(Verdict v);

/// One inequality lhs <= C rhs evaluated numerically.
struct InequalityReport {
    std::string name;
    Estimate lhs;
    Estimate rhs;
    /// lhs / rhs (zero when both sides vanish, infinite when only rhs does).
    double ratio = 0.0;
    double ratio_uncertainty = 0.0;
    /// hypot(lhs.uncertainty, slack * rhs.uncertainty).
    double combined_uncertainty = 0.0;
    /// Explicit constant the check enforces; infinite for unknown constants.
    double slack = kInfinity;
    Verdict verdict = Verdict::inconclusive;

    std::string function;
    std::string params;
    std::optional<double> lambda;
    std::map<std::string, double> diagnostics;
    std::vector<InequalityReport> parts;
};

/// Verdict rule shared by every check: explicit constants compare against
/// rhs * slack + 3 combined uncertainties; unknown constants (slack = inf)
/// hold when the ratio is finite and resolved.
InequalityReport make_report(std::string name, const Estimate& lhs, const Estimate& rhs, double slack = kInfinity);

/// Constants of (a_1 + ... + a_N)^q <= A (a_1^q + ... + a_N^q) and
/// B (a_1^q + ... + a_N^q) <= (a_1 + ... + a_N)^q.
struct ElementaryConstants {
    double A = 1.0;
    double B = 1.0;
};
ElementaryConstants elementary_constants(int dim, double q);

/// Random log-uniform tuples on [1e-6, 1e6] plus single-entry and equal-entry tuples.
/// lhs = worst normalized upper ratio, rhs = 1; diagnostics carry violation counts
/// and the tightest ratios observed.
InequalityReport elementary_bounds_check(int dim, double q, int trials, std::uint64_t seed = 20240101);

/// int |u|^p / |x|^{tp+2a} <= C [u]_{t,p,a}^p for an order t in (0,1).
InequalityReport hardy_check(const TestFunction& u, double t, double p, double a, const McConfig& cfg);
/// Same with t = sigma.
InequalityReport hardy_check(const TestFunction& u, const Params& params, const McConfig& cfg);

/// int |u|^p / |x|^{sp+2a} <= C [grad u]_{sigma,p,a}^p.
InequalityReport rellich_check(const TestFunction& u, const Params& params, const McConfig& cfg);

/// Two parts: int |u|^p |x|^{-(sp+2a)} <= C int |grad u|^p |x|^{-(sigma p+2a)} and
/// ||u||_{L^{p*_s}_a} <= C ||grad u||_{L^{p*_sigma}_a}.
InequalityReport ckn_first_order_check(const TestFunction& u, const Params& params, const McConfig& cfg);

/// ||grad u||_{L^{p*_sigma}_a} <= C [u]_{s,p,a}.
InequalityReport grad_equivalence_check(const TestFunction& u, const Params& params, const McConfig& cfg);

/// |u|_{p_lorentz, p} <= C [u]_{s,p,a}, cross-validated against the weighted
/// integral through the layer-cake constant.
InequalityReport lorentz_embedding_check(const TestFunction& u, const Params& params, const McConfig& cfg);

/// ||f * h||_r <= C |f|_{p,inf} ||h||_q for f = |x|^{-d}, p = N/d, 1 + 1/r = 1/p + 1/q.
/// Throws ExponentMismatch unless p = N/d, the relation holds and 1 < p, q, r < inf.
InequalityReport weak_young_check(double d, const TestFunction& h, double p, double q, double r, const McConfig& cfg);
/// r computed from (p = N/d, q).
InequalityReport weak_young_check(double d, const TestFunction& h, double q, const McConfig& cfg);

/// Value of (f * h)(x) for f = |x|^{-d} by Monte Carlo over y.
Estimate riesz_convolution(double d, const TestFunction& h, std::span<const double> x, const McConfig& cfg);

struct SlopeReport {
    std::string name;
    std::string function;
    std::string params;
    std::vector<double> lambdas;
    std::vector<Estimate> values;
    double slope = 0.0;
    double expected_slope = 0.0;
    double relative_slope_error = 0.0;
    /// R(lambda_min) / R(lambda_max).
    double growth = 0.0;
    double required_growth = 10.0;
    /// R(lambda/2) / R(lambda) against 2^{-expected_slope}, in standard errors (worst case).
    double worst_doubling_z = 0.0;
    Verdict verdict = Verdict::inconclusive;
};

/// R(lambda) = ||u_lambda||_{p,a}^p / [u_lambda]_{s,p,a}^p; expected slope -(a + sp).
SlopeReport poincare_failure_probe(const TestFunction& u, const Params& params, std::vector<double> lambdas,
                                   const McConfig& cfg);
/// R(lambda) = int |grad u_lambda|^p |x|^{-a} / [u_lambda]_{s,p,a}^p; expected slope -(a + sigma p).
SlopeReport gradient_poincare_failure_probe(const TestFunction& u, const Params& params, std::vector<double> lambdas,
                                            const McConfig& cfg);

enum class CheckKind { hardy, rellich, ckn_hardy, ckn_sobolev, grad_equivalence, lorentz_embedding };

std::string to_string(CheckKind k);
InequalityReport run_check(CheckKind kind, const TestFunction& u, const Params& params, const McConfig& cfg);

/// Exponents of lambda picked up by each side under u_lambda = lambda^kappa u(lambda x).
struct SideExponents {
    double lhs = 0.0;
    double rhs = 0.0;
};
SideExponents scaling_exponents(CheckKind kind, const Params& params, double kappa);

struct ScaleOrbitReport {
    std::string name;
    std::string function;
    double kappa = 0.0;
    SideExponents exponents;
    std::vector<double> lambdas;
    std::vector<InequalityReport> reports;
    /// Largest |ratio(lambda) - ratio(1)| in combined standard errors.
    double worst_z = 0.0;
    /// Largest relative deviation of ratio(lambda) from ratio(1).
    double worst_relative = 0.0;
    bool invariant = false;
};

/// Runs the check on u and on each u_lambda (same cfg) and compares ratios.
ScaleOrbitReport scale_orbit(CheckKind kind, const TestFunction& u, const Params& params,
                             const std::vector<double>& lambdas, double kappa, const McConfig& cfg);

}  // namespace fwlab
