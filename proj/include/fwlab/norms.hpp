#pragma once

#include <functional>
#include <span>
#include <string>

#include "fwlab/functions.hpp"
#include "fwlab/params.hpp"
#include "fwlab/quadrature.hpp"

namespace fwlab {

enum class NormKind { weighted_lp, gagliardo, homogeneous };

/// Which norm, at which order / exponent / weight.
struct NormSpec {
    NormKind kind = NormKind::weighted_lp;
    /// Fractional order t in (0,1) (gagliardo only).
    double order = 0.5;
    /// Integrability exponent q >= 1 (p for gagliardo).
    double exponent = 2.0;
    /// |x|^{-beta} for weighted_lp; the per-variable |x|^{-a}|y|^{-a} for gagliardo.
    double weight_power = 0.0;

    /// Throws ConstraintViolation when gagliardo order leaves (0,1) or exponent < 1.
    void check() const;
};

/// Scalar or vector field that a Gagliardo seminorm acts on.
struct Field {
    std::string name;
    int dim = 2;
    int components = 1;
    std::function<void(std::span<const double>, std::span<double>)> values;
    double length_scale = 1.0;

    static Field scalar(const TestFunction& u);
    static Field gradient(const TestFunction& u);
    /// Componentwise a - b (dimensions and component counts must agree).
    static Field difference(const Field& a, const Field& b);
};

/// int |u|^q |x|^{-beta} dx (no root taken). Radial path for radial u, Monte Carlo otherwise.
Estimate weighted_lp_integral(const TestFunction& u, double q, double beta, const McConfig& cfg);
/// (int |u|^q |x|^{-beta} dx)^{1/q}.
Estimate weighted_lp(const TestFunction& u, double q, double beta, const McConfig& cfg);

/// int int |f(x) - f(y)|^p / |x-y|^{N+tp} |x|^{-a} |y|^{-a} dx dy with the
/// Euclidean norm of the difference for vector fields (no root taken).
Estimate gagliardo_integral(const Field& f, double t, double p, double a, const McConfig& cfg);
/// Seminorm (p-th root of gagliardo_integral).
Estimate gagliardo(const Field& f, double t, double p, double a, const McConfig& cfg);
/// Seminorm of a scalar test function; rejects rearrangement-only entries.
Estimate gagliardo(const TestFunction& u, double t, double p, double a, const McConfig& cfg);

/// sum_i int int |d_i u(x) - d_i u(y)|^p ... : the componentwise reading of the
/// gradient seminorm, sampled on the same points as the Euclidean one.
struct GradientSeminormReadings {
    Estimate euclidean;
    Estimate componentwise;
};
GradientSeminormReadings gradient_seminorm_readings(const TestFunction& u, double t, double p, double a,
                                                    const McConfig& cfg);

/// [u]_{s,p,a}: the order-sigma seminorm of grad u.
Estimate higher_seminorm(const TestFunction& u, const Params& params, const McConfig& cfg);

struct HomogeneousNorm {
    Estimate gradient_part;  // || grad u ||_{L^{p*_sigma}_a}
    Estimate seminorm_part;  // [u]_{s,p,a}
    Estimate total;
};
HomogeneousNorm homogeneous_norm(const TestFunction& u, const Params& params, const McConfig& cfg);

/// Evaluates a NormSpec on u (gagliardo specs act on u itself).
Estimate evaluate(const TestFunction& u, const NormSpec& spec, const McConfig& cfg);

}  // namespace fwlab
