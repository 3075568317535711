#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "kdl/error.hpp"
#include "kdl/expr.hpp"

namespace kdl {

struct QuadratureRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order, nodes from Newton iteration on
/// the Legendre recurrence.
QuadratureRule gauss_legendre_rule(int order);

/// The 15-point rule used by the adaptive integrator (computed once).
const QuadratureRule& gauss_legendre15();

struct QuadratureConfig {
    double tol = 1e-10;
    int max_depth = 40;
};

namespace detail {

template <class F>
double gl15_panel(const F& f, double a, double b) {
    const auto& rule = gauss_legendre15();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

template <class F>
double adapt(const F& f, double a, double b, double whole, double tol, int depth, int max_depth) {
    const double m = 0.5 * (a + b);
    const double left = gl15_panel(f, a, m);
    const double right = gl15_panel(f, m, b);
    const double refined = left + right;
    const double diff = std::abs(refined - whole);
    // Roundoff floor: below this the bisection cannot make progress.
    const double floor = 64.0 * 2.220446049250313e-16 * (std::abs(left) + std::abs(right));
    if (diff <= tol || diff <= floor) return refined;
    if (depth >= max_depth) {
        throw ConvergenceError("adaptive quadrature exceeded depth cap on [" + std::to_string(a) +
                               ", " + std::to_string(b) + "]");
    }
    return adapt(f, a, m, left, 0.5 * tol, depth + 1, max_depth) +
           adapt(f, m, b, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

/// Adaptive composite Gauss-Legendre quadrature of `f` over [a, b] (either
/// orientation) with absolute tolerance `abs_tol`.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol, int max_depth = 40) {
    if (a == b) return 0.0;
    if (!(abs_tol > 0.0)) throw PreconditionError("quadrature tolerance must be positive");
    const double sign = a < b ? 1.0 : -1.0;
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const double whole = detail::gl15_panel(f, lo, hi);
    return sign * detail::adapt(f, lo, hi, whole, abs_tol, 0, max_depth);
}

/// One-shot t -> int_0^t f(s) ds with absolute error <= tol * (1 + |t|).
double primitive(const ExprFn& f, double t, double tol = 1e-10);

/// Memoised primitive t -> int_0^t f(s) ds.
///
/// Checkpoints sit at +-2^k (k >= 0); a query integrates from the nearest
/// checkpoint below |t|. Each checkpoint is built only from the one below it,
/// so the cached values do not depend on query order and concurrent
/// insertion is idempotent. If a closed-form primitive is supplied it takes
/// precedence (shifted so that the value at 0 is exactly 0).
class Primitive {
public:
    explicit Primitive(ExprFn integrand, QuadratureConfig config = {});
    Primitive(ExprFn integrand, std::optional<ExprFn> closed_form, QuadratureConfig config = {});

    Primitive(const Primitive& other);
    Primitive& operator=(const Primitive& other);

    double operator()(double t) const;

    const ExprFn& integrand() const noexcept { return integrand_; }
    const std::optional<ExprFn>& closed_form() const noexcept { return closed_form_; }
    const QuadratureConfig& config() const noexcept { return config_; }
    std::size_t checkpoint_count() const;

    /// Largest checkpoint with magnitude <= |t| (0 if |t| < 1), i.e. the
    /// point from which a query at t integrates.
    static double nearest_checkpoint(double t);

private:
    double checkpoint(int sign, int k) const;
    double segment(double a, double b, double tol) const;

    ExprFn integrand_;
    std::optional<ExprFn> closed_form_;
    double closed_at_zero_ = 0.0;
    QuadratureConfig config_;

    mutable std::shared_mutex mutex_;
    mutable std::map<std::pair<int, int>, double> cache_;
};

}  // namespace kdl
