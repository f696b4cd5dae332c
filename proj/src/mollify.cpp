#include "fwlab/mollify.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>

#include <boost/math/quadrature/gauss.hpp>

#include "fwlab/errors.hpp"
#include "point_buffer.hpp"

namespace fwlab {

namespace {

double bump_profile(double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; }

// Full Gauss-Legendre rule on [-1, 1].
template <unsigned M>
void legendre(std::vector<double>& x, std::vector<double>& w) {
    using G = boost::math::quadrature::gauss<double, M>;
    const auto& a = G::abscissa();
    const auto& b = G::weights();
    x.clear();
    w.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            x.push_back(0.0);
            w.push_back(b[i]);
        } else {
            x.push_back(a[i]);
            w.push_back(b[i]);
            x.push_back(-a[i]);
            w.push_back(b[i]);
        }
    }
}

void legendre_rule(int order, std::vector<double>& x, std::vector<double>& w) {
    switch (order) {
        case 8: legendre<8>(x, w); break;
        case 12: legendre<12>(x, w); break;
        case 16: legendre<16>(x, w); break;
        case 20: legendre<20>(x, w); break;
        case 24: legendre<24>(x, w); break;
        case 32: legendre<32>(x, w); break;
        default: throw ConstraintViolation("rule-order", order, 8, "mollifier rule order must be one of 8, 12, 16, 20, 24, 32");
    }
}

int default_order(int dim) {
    if (dim <= 2) return 20;
    if (dim == 3) return 12;
    return 8;
}

// Point-keyed cache with sharded locks; insert-if-absent.
class PointMemo {
public:
    bool find(std::span<const double> x, std::span<double> out) {
        const std::string key = make_key(x);
        Shard& s = shard(key);
        std::lock_guard lock(s.mutex);
        auto it = s.map.find(key);
        if (it == s.map.end()) return false;
        std::copy(it->second.begin(), it->second.end(), out.begin());
        return true;
    }
    void insert(std::span<const double> x, std::span<const double> value) {
        std::string key = make_key(x);
        Shard& s = shard(key);
        std::lock_guard lock(s.mutex);
        if (s.map.size() >= kShardCapacity) s.map.clear();
        s.map.try_emplace(std::move(key), value.begin(), value.end());
    }

private:
    static constexpr std::size_t kShards = 16;
    static constexpr std::size_t kShardCapacity = 1u << 15;
    struct Shard {
        std::mutex mutex;
        std::unordered_map<std::string, std::vector<double>> map;
    };

    static std::string make_key(std::span<const double> x) {
        std::string key(x.size() * sizeof(double), '\0');
        std::memcpy(key.data(), x.data(), key.size());
        return key;
    }
    Shard& shard(const std::string& key) { return shards_[std::hash<std::string>{}(key) % kShards]; }

    std::array<Shard, kShards> shards_;
};

}  // namespace

Mollifier::Mollifier(int n, int dim, int rule_order) : n_(n), dim_(dim) {
    if (n < 1) throw ConstraintViolation("n", n, 1, "mollifier index must be >= 1");
    if (dim < 1) throw ConstraintViolation("dimension", dim, 1, "dimension must be >= 1");
    scale_ = std::pow(static_cast<double>(n), dim) / normalization(dim);

    std::vector<double> x, w;
    legendre_rule(rule_order > 0 ? rule_order : default_order(dim), x, w);
    const double h = 1.0 / n;
    const std::size_t m = x.size();
    std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
    std::vector<double> z(static_cast<std::size_t>(dim));
    while (true) {
        double weight = std::pow(h, dim);
        for (int k = 0; k < dim; ++k) {
            z[k] = h * x[idx[k]];
            weight *= w[idx[k]];
        }
        const double rho = (*this)(z);
        if (rho > 0.0) {
            nodes_.insert(nodes_.end(), z.begin(), z.end());
            weights_.push_back(rho * weight);
            rule_mass_ += rho * weight;
        }
        int k = 0;
        while (k < dim && ++idx[k] == m) idx[k++] = 0;
        if (k == dim) break;
    }
    for (double& v : weights_) v /= rule_mass_;
}

double Mollifier::normalization(int dim) {
    static std::mutex mutex;
    static std::map<int, double> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(dim);
    if (it != cache.end()) return it->second;
    const double one[] = {1.0};
    const double c = integrate_radial(bump_profile, 0.0, dim, 1.0, one).value;
    cache.emplace(dim, c);
    return c;
}

double Mollifier::profile(double r) const { return scale_ * bump_profile(n_ * r); }

double Mollifier::operator()(std::span<const double> x) const {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return profile(std::sqrt(r2));
}

double Mollifier::mass() const {
    const double edge[] = {support_radius()};
    return integrate_radial([this](double r) { return profile(r); }, 0.0, dim_, support_radius(), edge,
                            support_radius())
        .value;
}

Mollifier mollifier(int n, int dim) { return Mollifier(n, dim); }

Cutoff::Cutoff(int n, int dim) : n_(n), dim_(dim) {
    if (n < 1) throw ConstraintViolation("n", n, 1, "cutoff index must be >= 1");
}

Cutoff cutoff(int n, int dim) { return Cutoff(n, dim); }

double Cutoff::operator()(std::span<const double> x) const {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return smooth_transition(std::sqrt(r2) / n_);
}

void Cutoff::gradient(std::span<const double> x, std::span<double> out) const {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double r = std::sqrt(r2);
    const double d = r > 0.0 ? smooth_transition_derivative(r / n_) / (n_ * r) : 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = d * x[i];
}

double Cutoff::hessian_norm(std::span<const double> x) const {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double r = std::sqrt(r2);
    if (r == 0.0) return 0.0;
    const double radial = smooth_transition_second_derivative(r / n_) / (static_cast<double>(n_) * n_);
    const double tangential = smooth_transition_derivative(r / n_) / (n_ * r);
    return std::max(std::abs(radial), std::abs(tangential));
}

double Cutoff::gradient_bound(int samples) const {
    double best = 0.0;
    for (int k = 1; k < samples; ++k) {
        const double t = 1.0 + static_cast<double>(k) / samples;
        best = std::max(best, std::abs(smooth_transition_derivative(t)) / n_);
    }
    return best;
}

double Cutoff::hessian_bound(int samples) const {
    double best = 0.0;
    std::vector<double> x(static_cast<std::size_t>(dim_), 0.0);
    for (int k = 1; k < samples; ++k) {
        x[0] = n_ * (1.0 + static_cast<double>(k) / samples);
        best = std::max(best, hessian_norm(x));
    }
    return best;
}

TestFunction Cutoff::as_function() const {
    const Cutoff c = *this;
    RadialProfile prof;
    const double nn = n_;
    prof.value = [nn](double r) { return smooth_transition(r / nn); };
    prof.derivative = [nn](double r) { return smooth_transition_derivative(r / nn) / nn; };
    prof.breakpoints = {nn, 2.0 * nn};
    prof.decreasing = true;
    return TestFunction(
        "cutoff(" + std::to_string(n_) + ")", dim_, [c](std::span<const double> x) { return c(x); },
        [c](std::span<const double> x, std::span<double> out) { c.gradient(x, out); }, 2.0 * n_, 2.0 * n_,
        Smoothness::compact, std::move(prof));
}

TestFunction convolve(const TestFunction& u, const Mollifier& m) {
    if (!u.smooth()) throw RearrangementOnlyFunction(u.name() + " is rearrangement-only; convolution gradients need a smooth input");
    if (u.dim() != m.dim()) throw ConstraintViolation("dimension", m.dim(), u.dim(), "mollifier dimension mismatch");
    const int dim = u.dim();
    auto nodes = std::make_shared<const std::vector<double>>(m.nodes().begin(), m.nodes().end());
    auto weights = std::make_shared<const std::vector<double>>(m.weights().begin(), m.weights().end());
    auto value_memo = std::make_shared<PointMemo>();
    auto grad_memo = std::make_shared<PointMemo>();

    auto eval = [u, dim, nodes, weights, value_memo](std::span<const double> x) {
        double cached = 0.0;
        if (value_memo->find(x, std::span<double>(&cached, 1))) return cached;
        detail::PointBuffer y(static_cast<std::size_t>(dim));
        double total = 0.0;
        const std::size_t count = weights->size();
        for (std::size_t k = 0; k < count; ++k) {
            const double* z = nodes->data() + k * dim;
            for (int i = 0; i < dim; ++i) y[i] = x[i] - z[i];
            total += (*weights)[k] * u(y.cspan());
        }
        value_memo->insert(x, std::span<const double>(&total, 1));
        return total;
    };
    auto grad = [u, dim, nodes, weights, grad_memo](std::span<const double> x, std::span<double> out) {
        if (grad_memo->find(x, out)) return;
        detail::PointBuffer y(static_cast<std::size_t>(dim));
        detail::PointBuffer g(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) out[i] = 0.0;
        const std::size_t count = weights->size();
        for (std::size_t k = 0; k < count; ++k) {
            const double* z = nodes->data() + k * dim;
            for (int i = 0; i < dim; ++i) y[i] = x[i] - z[i];
            u.gradient(y.cspan(), g.span());
            for (int i = 0; i < dim; ++i) out[i] += (*weights)[k] * g[i];
        }
        grad_memo->insert(x, out);
    };

    std::optional<RadialProfile> profile;
    if (u.radial()) {
        RadialProfile prof;
        prof.value = [eval, dim](double r) {
            detail::PointBuffer x(static_cast<std::size_t>(dim));
            for (int i = 0; i < dim; ++i) x[i] = 0.0;
            x[0] = r;
            return eval(x.cspan());
        };
        prof.derivative = [grad, dim](double r) {
            detail::PointBuffer x(static_cast<std::size_t>(dim));
            detail::PointBuffer g(static_cast<std::size_t>(dim));
            for (int i = 0; i < dim; ++i) x[i] = 0.0;
            x[0] = r;
            grad(x.cspan(), g.span());
            return g[0];
        };
        for (double b : u.profile()->breakpoints) {
            prof.breakpoints.push_back(b + m.support_radius());
        }
        prof.decreasing = u.radially_decreasing();
        profile = std::move(prof);
    }
    const double support = u.support_radius() + m.support_radius();
    return TestFunction(u.name() + "*rho_" + std::to_string(m.n()), dim, eval, grad, support,
                        u.length_scale() + m.support_radius(), u.smoothness(), std::move(profile));
}

ApproximationStep approximation_sequence(const TestFunction& u, int n, const Params& params, const McConfig& cfg) {
    if (u.dim() != params.dim()) throw ConstraintViolation("dimension", u.dim(), params.dim(), "function / parameter dimension mismatch");
    const Mollifier m(n, u.dim());
    const Cutoff z(n, u.dim());
    const TestFunction w = convolve(u, m);
    const int dim = u.dim();

    auto eval = [w, z](std::span<const double> x) {
        const double c = z(x);
        return c == 0.0 ? 0.0 : w(x) * c;
    };
    auto grad = [w, z, dim](std::span<const double> x, std::span<double> out) {
        detail::PointBuffer gz(static_cast<std::size_t>(dim));
        z.gradient(x, gz.span());
        const double c = z(x);
        bool cut = false;
        for (int i = 0; i < dim; ++i) cut = cut || gz[i] != 0.0;
        if (c == 0.0 && !cut) {
            for (int i = 0; i < dim; ++i) out[i] = 0.0;
            return;
        }
        w.gradient(x, out);
        for (int i = 0; i < dim; ++i) out[i] *= c;
        if (cut) {
            const double wx = w(x);
            for (int i = 0; i < dim; ++i) out[i] += wx * gz[i];
        }
    };
    const double support = std::min(w.support_radius(), z.support_radius());
    const double length = std::min(w.length_scale(), z.support_radius());
    ApproximationStep step;
    step.n = n;
    step.v = TestFunction("v_" + std::to_string(n) + "[" + u.name() + "]", dim, eval, grad, support, length,
                          Smoothness::compact);
    const Field diff = Field::difference(Field::gradient(u), Field::gradient(step.v));
    step.residual = gagliardo(diff, params.sigma(), params.p(), params.a(), cfg);
    return step;
}

}  // namespace fwlab
