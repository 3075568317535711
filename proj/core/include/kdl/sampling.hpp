#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "kdl/error.hpp"

namespace kdl {

/// `count` points evenly spaced on [lo, hi], endpoints included.
std::vector<double> lin_space(double lo, double hi, int count);

/// `count` points log-spaced on [lo, hi] (both > 0), endpoints included.
std::vector<double> log_space(double lo, double hi, int count);

/// Golden-section search for a local minimiser of a unimodal `f` on [a, b].
/// Returns the abscissa.
template <class F>
double golden_section_minimize(const F& f, double a, double b, int iterations = 120) {
    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < iterations && std::abs(b - a) > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

/// Bisection root of `f` on [a, b] where f(a) and f(b) have opposite signs.
template <class F>
double bisect_root(const F& f, double a, double b, int iterations = 200) {
    double fa = f(a);
    if (fa == 0.0) return a;
    if (f(b) == 0.0) return b;
    for (int i = 0; i < iterations; ++i) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

/// Radical inverse of `index` in the given prime base.
double radical_inverse(std::uint64_t index, int base);

/// The first `count` points of the Halton sequence (skipping `offset`
/// leading indices) mapped into the closed ball of radius `radius` in R^dim,
/// by rejection from the enclosing cube.
std::vector<Eigen::VectorXd> halton_ball(int dim, int count, double radius, std::uint64_t offset = 0);

}  // namespace kdl
