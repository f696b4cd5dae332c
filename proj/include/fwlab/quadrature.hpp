#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fwlab {

enum class Method { radial, mc, mc2n, deterministic };

std::string to_string(Method m);

/// A numerical value with one standard error (zero for deterministic paths).
struct Estimate {
    double value = 0.0;
    double uncertainty = 0.0;
    std::int64_t samples = 0;
    Method method = Method::deterministic;

    static Estimate exact(double v, Method m = Method::deterministic) { return {v, 0.0, 0, m}; }
};

/// Average of k independent estimates of the same quantity; uncertainty is RMS / sqrt(k).
Estimate average(std::span<const Estimate> estimates);
/// Sum of independent estimates; uncertainties add in quadrature.
Estimate sum(const Estimate& lhs, const Estimate& rhs);
/// e^q with first order error propagation.
Estimate power(const Estimate& e, double q);
Estimate scaled(const Estimate& e, double c);

struct McConfig {
    std::uint64_t seed = 20240101;
    std::int64_t sample_count = 200000;
    /// Radius of the sampled x-domain; 0 picks the integrand's length scale.
    double truncation_radius = 0.0;
    /// Inner/outer stratification radius for |x - y|; 0 picks a quarter of the length scale.
    double singular_split_radius = 0.0;
    /// Share of samples spent on the inner (near-diagonal) stratum.
    double inner_fraction = 0.5;
    int workers = 1;

    /// Default sample count for the dimension (2e5 for N = 2, 1e6 for N >= 3).
    static McConfig for_dimension(int dim, std::uint64_t seed = 20240101);

    /// Throws ConstraintViolation unless sample_count >= 1000 and, when both
    /// radii are explicit, truncation_radius > singular_split_radius > 0.
    void check() const;
};

/// N omega_N int_0^rmax g(r) r^{N-1-beta} dr = int_{B_rmax} g(|x|) |x|^{-beta} dx.
///
/// Graded mesh toward r = 0, adaptive Gauss-Kronrod on every panel, analytic
/// power-law corrections for the innermost panel and (rmax = inf) the tail.
/// Throws NonIntegrableSingularity when the local exponent at 0 is not
/// integrable, NoConvergence when the tail does not decay.
Estimate integrate_radial(const std::function<double(double)>& profile, double beta, int dim, double rmax,
                          std::span<const double> breakpoints = {}, double scale_hint = 1.0);

/// Plain 1-D integral on [lo, hi] (hi may be +inf) with the same panel machinery.
double integrate_1d(const std::function<double(double)>& f, double lo, double hi, std::span<const double> breakpoints = {},
                    double scale_hint = 1.0);

/// Importance density for integrate_mc.
struct Importance {
    enum class Kind { uniform_ball, gaussian, radial_power };
    Kind kind = Kind::uniform_ball;
    /// Ball radius (uniform_ball, radial_power) or standard deviation (gaussian).
    double radius = 1.0;
    /// Density proportional to |x|^{-exponent} on the ball (radial_power only); exponent < N.
    double exponent = 0.0;

    static Importance uniform_ball(double radius) { return {Kind::uniform_ball, radius, 0.0}; }
    static Importance gaussian(double sd) { return {Kind::gaussian, sd, 0.0}; }
    static Importance radial_power(double exponent, double radius) { return {Kind::radial_power, radius, exponent}; }
};

/// Unbiased importance-sampled estimate of int_{R^N} f. The result depends only
/// on (f, cfg.seed, cfg.sample_count), never on the worker count.
/// Throws ZeroDensityRegion when f is seen to be nonzero outside the density's support.
Estimate integrate_mc(const std::function<double(std::span<const double>)>& f, int dim, const McConfig& cfg,
                      const Importance& importance);

/// Symmetric two-point integrand for Gagliardo-type double integrals.
struct PairIntegrand {
    int dim = 2;
    /// F(x, y); must satisfy F(x, y) = F(y, x) and vanish when both points lie
    /// outside the truncation ball.
    std::function<double(std::span<const double>, std::span<const double>)> numerator;
    /// F(x, y) = O(|x - y|^{difference_order}) near the diagonal.
    double difference_order = 1.0;
    /// Unit for the automatic truncation / split radii.
    double length_scale = 1.0;
    /// Optional pointwise size of the underlying field, used to detect mass
    /// outside the truncation ball.
    std::function<double(std::span<const double>)> magnitude;
};

/// Estimates int int F(x, y) |x - y|^{-kernel_exponent} |x|^{-a} |y|^{-a} dx dy
/// with x drawn from a |x|^{-a} density on the truncation ball and z = y - x
/// drawn from a stratified radial density (power law r^{gamma-1} below the
/// split radius, Pareto tail above). Pairs with y outside the ball are counted
/// twice, which is exact for symmetric F supported in the ball.
Estimate gagliardo_mc(const PairIntegrand& integrand, double kernel_exponent, double weight_a, const McConfig& cfg);

namespace detail {

/// Streaming mean/variance accumulator (Chan/Welford), merged in a fixed order.
struct Moments {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v);
    void merge(const Moments& other);
    double variance_of_mean() const;
};

/// Runs body(index, moments) for index in [begin, end) in fixed-size blocks and
/// merges the block results in index order.
Moments reduce_blocks(std::int64_t begin, std::int64_t end, int workers,
                      const std::function<void(std::int64_t, Moments&)>& body);

}  // namespace detail

}  // namespace fwlab
