#include "kdl/quadrature.hpp"

#include <mutex>
#include <numbers>

namespace kdl {

QuadratureRule gauss_legendre_rule(int order) {
    if (order < 1) throw PreconditionError("quadrature order must be positive");
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-like initial guess, then Newton on P_order.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= order; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int j = 2; j <= order; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = order == 1 ? 1.0 : order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

const QuadratureRule& gauss_legendre15() {
    static const QuadratureRule rule = gauss_legendre_rule(15);
    return rule;
}

double primitive(const ExprFn& f, double t, double tol) {
    if (!std::isfinite(t)) throw PreconditionError("primitive: non-finite upper limit");
    if (t == 0.0) return 0.0;
    return integrate(f, 0.0, t, tol * (1.0 + std::abs(t)));
}

Primitive::Primitive(ExprFn integrand, QuadratureConfig config)
    : Primitive(std::move(integrand), std::nullopt, config) {}

Primitive::Primitive(ExprFn integrand, std::optional<ExprFn> closed_form, QuadratureConfig config)
    : integrand_(std::move(integrand)), closed_form_(std::move(closed_form)), config_(config) {
    if (!(config_.tol > 0.0)) throw PreconditionError("quadrature tolerance must be positive");
    if (closed_form_) closed_at_zero_ = (*closed_form_)(0.0);
}

Primitive::Primitive(const Primitive& other)
    : integrand_(other.integrand_),
      closed_form_(other.closed_form_),
      closed_at_zero_(other.closed_at_zero_),
      config_(other.config_) {
    std::shared_lock lock(other.mutex_);
    cache_ = other.cache_;
}

Primitive& Primitive::operator=(const Primitive& other) {
    if (this == &other) return *this;
    std::map<std::pair<int, int>, double> copy;
    {
        std::shared_lock lock(other.mutex_);
        copy = other.cache_;
    }
    integrand_ = other.integrand_;
    closed_form_ = other.closed_form_;
    closed_at_zero_ = other.closed_at_zero_;
    config_ = other.config_;
    std::unique_lock lock(mutex_);
    cache_ = std::move(copy);
    return *this;
}

std::size_t Primitive::checkpoint_count() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
}

double Primitive::nearest_checkpoint(double t) {
    const double a = std::abs(t);
    if (a < 1.0) return 0.0;
    int exp = 0;
    std::frexp(a, &exp);  // a in [2^(exp-1), 2^exp)
    return std::copysign(std::ldexp(1.0, exp - 1), t);
}

double Primitive::segment(double a, double b, double tol) const {
    return integrate(integrand_, a, b, tol, config_.max_depth);
}

double Primitive::checkpoint(int sign, int k) const {
    const auto key = std::make_pair(sign, k);
    {
        std::shared_lock lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    double value = 0.0;
    if (k == 0) {
        value = segment(0.0, static_cast<double>(sign), 0.5 * config_.tol);
    } else {
        const double lo = std::ldexp(static_cast<double>(sign), k - 1);
        const double hi = std::ldexp(static_cast<double>(sign), k);
        value = checkpoint(sign, k - 1) + segment(lo, hi, 0.5 * config_.tol * std::abs(hi - lo));
    }
    std::unique_lock lock(mutex_);
    return cache_.emplace(key, value).first->second;
}

double Primitive::operator()(double t) const {
    if (!std::isfinite(t)) throw PreconditionError("primitive: non-finite upper limit");
    if (t == 0.0) return 0.0;
    if (closed_form_) return (*closed_form_)(t) - closed_at_zero_;

    const double a = std::abs(t);
    if (a < 1.0) return segment(0.0, t, 0.5 * config_.tol * (1.0 + a));

    int exp = 0;
    std::frexp(a, &exp);
    const int k = exp - 1;
    const int sign = t > 0 ? 1 : -1;
    const double c = std::ldexp(static_cast<double>(sign), k);
    const double base = checkpoint(sign, k);
    if (c == t) return base;
    return base + segment(c, t, 0.5 * config_.tol * std::max(std::abs(t - c), 1e-300));
}

}  // namespace kdl
