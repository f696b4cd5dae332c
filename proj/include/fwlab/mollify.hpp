#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fwlab/functions.hpp"
#include "fwlab/norms.hpp"
#include "fwlab/params.hpp"
#include "fwlab/quadrature.hpp"

namespace fwlab {

/// rho_n(x) = n^N rho(n x), rho = c_N^{-1} exp(-1/(1-|x|^2)) on B_1.
class Mollifier {
public:
    Mollifier(int n, int dim, int rule_order = 0);

    int n() const noexcept { return n_; }
    int dim() const noexcept { return dim_; }
    double support_radius() const noexcept { return 1.0 / n_; }
    double operator()(std::span<const double> x) const;
    /// Radial profile of rho_n.
    double profile(double r) const;
    /// int rho_n by radial quadrature (1 up to quadrature error).
    double mass() const;
    /// int_{R^N} exp(-1/(1-|x|^2)) dx, computed once per dimension.
    static double normalization(int dim);

    /// Discrete rule for z -> rho_n(z) dz: tensor Gauss-Legendre nodes of the
    /// cube [-1/n, 1/n]^N inside the ball, weights rescaled to sum to 1.
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    /// Sum of the raw weights before rescaling.
    double rule_mass() const noexcept { return rule_mass_; }

private:
    int n_;
    int dim_;
    double scale_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    double rule_mass_ = 0.0;
};

Mollifier mollifier(int n, int dim);

/// zeta_n(x) = T(|x|/n) with the smooth transition T (1 on [0,1], 0 on [2, inf)).
class Cutoff {
public:
    Cutoff(int n, int dim);

    int n() const noexcept { return n_; }
    int dim() const noexcept { return dim_; }
    double plateau_radius() const noexcept { return n_; }
    double support_radius() const noexcept { return 2.0 * n_; }
    double operator()(std::span<const double> x) const;
    void gradient(std::span<const double> x, std::span<double> out) const;
    /// Operator norm of the Hessian at x: max(|f''(r)|, |f'(r)/r|) for f(r) = T(r/n).
    double hessian_norm(std::span<const double> x) const;
    /// max |grad zeta_n| and max ||Hess zeta_n|| sampled on `samples` radii in (n, 2n).
    double gradient_bound(int samples = 4096) const;
    double hessian_bound(int samples = 4096) const;
    TestFunction as_function() const;

private:
    int n_;
    int dim_;
};

Cutoff cutoff(int n, int dim);

/// u * rho_n evaluated pointwise with the mollifier's discrete rule. Values and
/// gradients are memoized per evaluation point; copies share the memo.
TestFunction convolve(const TestFunction& u, const Mollifier& m);

struct ApproximationStep {
    int n = 0;
    /// v_n = (u * rho_n) zeta_n, gradient by the product rule.
    TestFunction v;
    /// [u - v_n]_{s,p,a} = seminorm of grad u - grad v_n at order sigma.
    Estimate residual;
};

ApproximationStep approximation_sequence(const TestFunction& u, int n, const Params& params, const McConfig& cfg);

}  // namespace fwlab
