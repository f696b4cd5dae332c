#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fwlab {

class Params;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Smoothness {
    compact,          // C_c^infinity
    decaying,         // smooth with rapid decay, unbounded support
    rearrangement,    // not weakly differentiable; distribution functions only
};

/// One-dimensional radial profile g with f(x) = g(|x|).
struct RadialProfile {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    /// Radii where g is not smooth (quadrature splits there).
    std::vector<double> breakpoints;
    /// g is nonincreasing on (0, inf).
    bool decreasing = false;
};

/// Analytic function R^N -> R with exact gradient and the metadata the
/// integrators need (support, length scale, radial profile).
class TestFunction {
public:
    using Eval = std::function<double(std::span<const double>)>;
    using Grad = std::function<void(std::span<const double>, std::span<double>)>;

    TestFunction() = default;
    TestFunction(std::string name, int dim, Eval eval, Grad grad, double support_radius, double length_scale,
                 Smoothness smoothness, std::optional<RadialProfile> profile = std::nullopt);

    double operator()(std::span<const double> x) const { return eval_(x); }
    /// Writes grad f(x) into out (size dim). Throws RearrangementOnlyFunction if unavailable.
    void gradient(std::span<const double> x, std::span<double> out) const;

    const std::string& name() const noexcept { return name_; }
    int dim() const noexcept { return dim_; }
    /// Infinite when the function has unbounded support.
    double support_radius() const noexcept { return support_radius_; }
    /// Characteristic radius: support radius when compact, otherwise the radius
    /// beyond which |f| and |grad f| are below 1e-8 of their peak.
    double length_scale() const noexcept { return length_scale_; }
    Smoothness smoothness() const noexcept { return smoothness_; }
    bool smooth() const noexcept { return smoothness_ != Smoothness::rearrangement; }
    bool radial() const noexcept { return profile_.has_value(); }
    bool radially_decreasing() const noexcept { return profile_ && profile_->decreasing; }
    const std::optional<RadialProfile>& profile() const noexcept { return profile_; }
    bool compact() const noexcept { return support_radius_ < kInfinity; }

    TestFunction renamed(std::string name) const;

private:
    std::string name_;
    int dim_ = 0;
    Eval eval_;
    Grad grad_;
    double support_radius_ = kInfinity;
    double length_scale_ = 1.0;
    Smoothness smoothness_ = Smoothness::compact;
    std::optional<RadialProfile> profile_;
};

/// Names accepted by catalog(): bump, plateau_bump, gaussian, poly_bump,
/// power_singular(d), ball_indicator(R), zero.
std::vector<std::string> catalog_names();
/// The smooth-tagged entries (usable in every norm).
std::vector<std::string> smooth_catalog_names();

/// Throws UnknownName for anything outside the closed catalog.
TestFunction catalog(std::string_view name, int dim);
TestFunction catalog(std::string_view name, const Params& params);

/// u_lambda(x) = lambda^kappa u(lambda x), grad u_lambda(x) = lambda^{kappa+1} grad u(lambda x).
TestFunction scale(const TestFunction& u, double lambda, double kappa);

/// c_u u + c_v v on a common dimension.
TestFunction linear_combination(const TestFunction& u, double cu, const TestFunction& v, double cv);
TestFunction multiply(const TestFunction& u, double c);
/// x -> u(x - shift).
TestFunction translate(const TestFunction& u, std::vector<double> shift);
/// x -> u(Q x) for an orthogonal row-major matrix Q.
TestFunction rotate(const TestFunction& u, std::vector<double> rotation);
/// |grad u| as a (non-differentiable) scalar function; radial when u is.
TestFunction gradient_magnitude(const TestFunction& u);

/// Smooth monotone transition: 1 on [0,1], 0 on [2,inf), built by integrating
/// the standard bump exp(-1/((t-1)(2-t))) over [r, 2].
double smooth_transition(double r);
double smooth_transition_derivative(double r);
double smooth_transition_second_derivative(double r);

/// Maximum of componentwise |grad_i - FD_i| / (1 + |grad_i|) over the given points,
/// with central differences at step h.
double gradient_fd_discrepancy(const TestFunction& u, std::span<const std::vector<double>> points, double h = 1e-4);

}  // namespace fwlab
