#include "kdl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kdl/energy.hpp"
#include "kdl/sampling.hpp"

namespace kdl {

double compute_gamma(int n) {
    if (n < 1) throw PreconditionError("compute_gamma: n must be >= 1");
    const double s = std::sin(std::numbers::pi / (2.0 * (n + 1)));
    return 1.0 / std::sqrt(4.0 * s * s);
}

Eta12 fit_eta12(const Primitive& K_primitive, double eta1_target, double t_max, int samples) {
    if (!(eta1_target > 0.0)) throw PreconditionError("fit_eta12: eta1 must be positive");
    if (!(t_max > 0.0) || samples < 2) throw PreconditionError("fit_eta12: need t_max > 0 and samples >= 2");

    auto ts = lin_space(0.0, t_max, samples);
    const auto logs = log_space(t_max * 1e-8, t_max, samples);
    ts.insert(ts.end(), logs.begin(), logs.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    auto slack = [&](double t) { return eta1_target * t - K_primitive(t); };
    std::size_t best = 0;
    double best_val = slack(ts[0]);
    double last = best_val;
    double second_last = best_val;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double v = slack(ts[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
        second_last = last;
        last = v;
    }
    if (best + 1 == ts.size() && last > second_last) {
        throw PreconditionError("fit_eta12: sup of eta1*t - int_0^t K still growing at t_max; choose a smaller eta1");
    }

    const double lo = best == 0 ? ts[0] : ts[best - 1];
    const double hi = best + 1 < ts.size() ? ts[best + 1] : ts[best];
    const double t_star = golden_section_minimize([&](double t) { return -slack(t); }, lo, hi);
    best_val = std::max(best_val, slack(t_star));
    return {eta1_target, std::max(0.0, best_val)};
}

double fit_eta3(std::span<const Primitive> F, double t_max, int samples, double safety) {
    if (!(t_max > 0.0) || samples < 2) throw PreconditionError("fit_eta3: need t_max > 0 and samples >= 2");
    if (!(safety >= 1.0)) throw PreconditionError("fit_eta3: safety factor must be >= 1");

    auto ts = lin_space(0.0, t_max, samples);
    const auto logs = log_space(t_max * 1e-6, t_max, samples);
    ts.insert(ts.end(), logs.begin(), logs.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    double eta3 = 0.0;
    for (const auto& Fk : F) {
        for (double sign : {1.0, -1.0}) {
            auto ratio = [&](double t) { return std::abs(Fk(sign * t)) / (t * t + 1.0); };
            std::size_t best = 0;
            double best_val = -1.0;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const double v = ratio(ts[i]);
                if (v > best_val) {
                    best_val = v;
                    best = i;
                }
            }
            const double lo = best == 0 ? ts[0] : ts[best - 1];
            const double hi = best + 1 < ts.size() ? ts[best + 1] : ts[best];
            const double t_star = golden_section_minimize([&](double t) { return -ratio(t); }, lo, hi);
            eta3 = std::max({eta3, best_val, ratio(t_star)});
        }
    }
    return std::max(safety * eta3, 1e-12);
}

double choose_sigma(double eta1, double eta3, double gamma, double r, double margin) {
    if (!(margin > 0.0 && margin < 1.0)) {
        throw PreconditionError("choose_sigma: margin must lie in (0, 1); the bound on sigma is strict");
    }
    if (!(eta1 > 0.0 && eta3 > 0.0 && gamma > 0.0 && r > 0.0)) {
        throw PreconditionError("choose_sigma: eta1, eta3, gamma and r must be positive");
    }
    return (1.0 - margin) * std::min(eta1 / (2.0 * eta3 * gamma * gamma), r);
}

double coercivity_bound(const ConstantBundle& bundle, int n, double norm1_sq, double mu_norm) {
    return 0.5 * bundle.eta1 * norm1_sq -
           mu_norm * bundle.eta3 * (bundle.gamma * bundle.gamma * norm1_sq + n) - 0.5 * bundle.eta2;
}

double coercivity_bound(const ConstantBundle& bundle, const StateVector& x, const MuVector& mu) {
    return coercivity_bound(bundle, x.size(), norm1_sq(x.values()), mu.norm2());
}

double certified_radius(const ConstantBundle& bundle, int n, double level) {
    const double rate = bundle.coercivity_rate();
    if (!(rate > 0.0)) throw PreconditionError("certified_radius: coercivity rate is not positive");
    const double rhs = level + bundle.sigma * bundle.eta3 * n + 0.5 * bundle.eta2;
    return std::sqrt(std::max(rhs, 0.0) / rate);
}

ConstantBundle build_bundle(const Problem& problem, const BoundsSettings& settings) {
    const auto cond_a = check_condition_a(problem.K_primitive_fn(), settings.t_max, settings.samples);
    if (cond_a.verdict != Verdict::verified) {
        throw PreconditionError("build_bundle: condition (a) is " + std::string(to_string(cond_a.verdict)) +
                                " (" + cond_a.note + ")");
    }
    ConstantBundle b;
    b.t_max = settings.t_max;
    b.r = problem.spec().r;
    b.gamma = compute_gamma(problem.n());
    // Half the sampled tail ratio; the minimum over the last decade when it
    // is positive keeps eta2 (and with it R*) moderate.
    const double tail_min = cond_a.witness.at("tail_min");
    const double tail = tail_min > 0.0 ? tail_min : cond_a.witness.at("tail_lower_bound");
    const double eta1 = settings.eta1_target.value_or(0.5 * tail);
    const auto eta12 = fit_eta12(problem.K_primitive_fn(), eta1, settings.t_max, settings.samples);
    b.eta1 = eta12.eta1;
    b.eta2 = eta12.eta2;
    b.eta3 = fit_eta3(problem.F_fns(), settings.t_max, settings.samples, settings.eta3_safety);
    b.sigma = choose_sigma(b.eta1, b.eta3, b.gamma, b.r, settings.sigma_margin);
    return b;
}

}  // namespace kdl
