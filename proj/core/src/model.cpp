#include "kdl/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "kdl/sampling.hpp"

namespace kdl {
namespace {

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

/// "c*t^p" terms joined with explicit signs, e.g. "2*t - 1".
std::string affine(double slope, double intercept) {
    std::string s = format_number(slope) + "*t";
    if (intercept < 0) {
        s += " - " + format_number(-intercept);
    } else {
        s += " + " + format_number(intercept);
    }
    return s;
}

std::vector<Primitive> make_primitives(const std::vector<ExprFn>& fns,
                                       const std::vector<std::optional<ExprFn>>& closed,
                                       const QuadratureConfig& quadrature) {
    std::vector<Primitive> out;
    out.reserve(fns.size());
    for (std::size_t k = 0; k < fns.size(); ++k) {
        std::optional<ExprFn> cf = closed.empty() ? std::nullopt : closed[k];
        out.emplace_back(fns[k], cf, quadrature);
    }
    return out;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void ProblemSpec::validate() const {
    if (n < 1) throw PreconditionError("problem: n must be >= 1");
    if (!(r > 0.0) || !std::isfinite(r)) throw PreconditionError("problem: r must be a positive finite number");
    const auto sn = static_cast<std::size_t>(n);
    if (f.size() != sn) throw PreconditionError("problem: expected " + std::to_string(n) + " functions f");
    if (g.size() != sn) throw PreconditionError("problem: expected " + std::to_string(n) + " functions g");
    if (!f_primitive.empty() && f_primitive.size() != sn) {
        throw PreconditionError("problem: f_primitive must be empty or have n entries");
    }
    if (!g_primitive.empty() && g_primitive.size() != sn) {
        throw PreconditionError("problem: g_primitive must be empty or have n entries");
    }
}

Problem::Problem(ProblemSpec spec, QuadratureConfig quadrature)
    : spec_((spec.validate(), std::move(spec))),
      quadrature_(quadrature),
      K_prim_(spec_.K, spec_.K_primitive, quadrature),
      F_(make_primitives(spec_.f, spec_.f_primitive, quadrature)),
      G_(make_primitives(spec_.g, spec_.g_primitive, quadrature)) {}

ProblemSpec canonical_spec(int n, double a, double b, double eps, double r) {
    ProblemSpec spec;
    spec.n = n;
    spec.r = r;
    spec.K = ExprFn::parse(affine(a, b));
    spec.K_primitive = ExprFn::parse(format_number(0.5 * a) + "*t^2" +
                                     (b < 0 ? " - " + format_number(-b) : " + " + format_number(b)) + "*t");
    const auto f = ExprFn::parse("1/(1+t^2)");
    const auto F = ExprFn::parse("atan(t)");
    const auto g = eps == 0.0 ? ExprFn::parse("0") : ExprFn::parse(format_number(eps) + "*cos(t)");
    const auto G = eps == 0.0 ? ExprFn::parse("0") : ExprFn::parse(format_number(eps) + "*sin(t)");
    spec.f.assign(n, f);
    spec.g.assign(n, g);
    spec.f_primitive.assign(n, F);
    spec.g_primitive.assign(n, G);
    return spec;
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::verified: return "verified";
        case Verdict::refuted: return "refuted";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict HypothesisReport::overall() const {
    bool any_inconclusive = a.verdict == Verdict::inconclusive;
    if (a.verdict == Verdict::refuted) return Verdict::refuted;
    for (const auto* list : {&b, &c}) {
        for (const auto& r : *list) {
            if (r.verdict == Verdict::refuted) return Verdict::refuted;
            if (r.verdict == Verdict::inconclusive) any_inconclusive = true;
        }
    }
    return any_inconclusive ? Verdict::inconclusive : Verdict::verified;
}

ConditionResult check_condition_a(const Primitive& K_primitive, double t_max, int samples) {
    if (!(t_max > 0.0)) throw PreconditionError("check_condition_a: t_max must be positive");
    if (samples < 2) throw PreconditionError("check_condition_a: need at least 2 samples");

    const auto ts = log_space(t_max * 1e-8, t_max, samples);
    std::vector<double> values(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) values[i] = K_primitive(ts[i]);

    ConditionResult result;
    const auto imin = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());

    // liminf estimate over the last decade
    const double tail_start = t_max / 10.0;
    bool non_decreasing = true;
    double tail_min = std::numeric_limits<double>::infinity();
    double prev = -std::numeric_limits<double>::infinity();
    double last_ratio = values.back() / ts.back();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < tail_start) continue;
        const double ratio = values[i] / ts[i];
        tail_min = std::min(tail_min, ratio);
        if (ratio < prev - 1e-12 * std::abs(prev)) non_decreasing = false;
        prev = ratio;
    }
    const double tail_estimate = non_decreasing ? last_ratio : tail_min;
    result.witness["tail_lower_bound"] = tail_estimate;
    result.witness["tail_min"] = tail_min;

    if (!(values[imin] < 0.0)) {
        result.verdict = Verdict::refuted;
        result.note = "int_0^t K >= 0 on all sampled t in (0, t_max]";
        result.witness["t"] = ts[imin];
        result.witness["integral"] = values[imin];
        return result;
    }

    const double lo = imin == 0 ? 0.0 : ts[imin - 1];
    const double hi = imin + 1 < ts.size() ? ts[imin + 1] : ts[imin];
    double t_star = golden_section_minimize([&](double t) { return t <= 0.0 ? 0.0 : K_primitive(t); }, lo, hi);
    double v_star = t_star > 0.0 ? K_primitive(t_star) : 0.0;
    if (!(v_star <= values[imin])) {
        t_star = ts[imin];
        v_star = values[imin];
    }
    result.witness["t"] = t_star;
    result.witness["integral"] = v_star;

    if (tail_estimate > 0.0) {
        result.verdict = Verdict::verified;
        result.note = "negative integral found; tail ratio bounded below by a positive constant";
    } else {
        result.verdict = Verdict::inconclusive;
        result.note = "negative integral found; liminf of int_0^t K / t not positive on sampled tail";
    }
    return result;
}

ConditionResult check_condition_a(const ExprFn& K, double t_max, int samples) {
    return check_condition_a(Primitive(K), t_max, samples);
}

ConditionResult check_condition_b(const Primitive& F, double t_max, int samples) {
    if (!(t_max > 1.0)) throw PreconditionError("check_condition_b: t_max must exceed 1");
    if (samples < 4) throw PreconditionError("check_condition_b: need at least 4 samples");

    const auto ts = log_space(1.0, t_max, samples);
    std::vector<double> ratio(ts.size());
    double sup = 0.0;
    double sup_t = ts.front();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i];
        ratio[i] = std::max(std::abs(F(t)), std::abs(F(-t))) / (t * t);
        if (ratio[i] > sup) {
            sup = ratio[i];
            sup_t = t;
        }
    }

    const double window_lo = std::max(1.0, t_max / 100.0);
    const double window_mid = std::sqrt(window_lo * t_max);
    bool monotone_up = true;
    double first_in_window = std::numeric_limits<double>::quiet_NaN();
    double max_first = 0.0;
    double max_second = 0.0;
    double prev = -1.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < window_lo) continue;
        if (std::isnan(first_in_window)) first_in_window = ratio[i];
        if (ratio[i] < prev) monotone_up = false;
        prev = ratio[i];
        if (ts[i] < window_mid) {
            max_first = std::max(max_first, ratio[i]);
        } else {
            max_second = std::max(max_second, ratio[i]);
        }
    }

    ConditionResult result;
    result.witness["sup_ratio"] = sup;
    result.witness["sup_t"] = sup_t;
    result.witness["ratio_at_t_max"] = ratio.back();
    if (monotone_up && ratio.back() > first_in_window * (1.0 + 1e-9) + 1e-300) {
        result.verdict = Verdict::refuted;
        result.note = "|F(t)|/t^2 grows monotonically over the last two decades";
        result.witness["t"] = ts.back();
        result.witness["ratio"] = ratio.back();
    } else if (max_second <= max_first * (1.0 + 1e-9) + 1e-300) {
        result.verdict = Verdict::verified;
        result.note = "|F(t)|/t^2 bounded with non-increasing trend";
    } else {
        result.verdict = Verdict::inconclusive;
        result.note = "|F(t)|/t^2 trend undecided on sampled range";
    }
    return result;
}

ConditionResult check_condition_b(const ExprFn& f, double t_max, int samples) {
    return check_condition_b(Primitive(f), t_max, samples);
}

ConditionResult check_condition_c(const Primitive& F, double t_max, int samples, double odd_tol) {
    if (!(t_max > 0.0)) throw PreconditionError("check_condition_c: t_max must be positive");
    if (samples < 2) throw PreconditionError("check_condition_c: need at least 2 samples");

    ConditionResult result;
    const auto ts = lin_space(t_max / samples, t_max, samples);

    std::vector<double> pos(ts.size());
    std::vector<double> neg(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        pos[i] = F(ts[i]);
        neg[i] = F(-ts[i]);
    }

    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double defect = std::abs(pos[i] + neg[i]);
        if (defect > odd_tol * (1.0 + ts[i])) {
            result.verdict = Verdict::refuted;
            result.note = "F(t) + F(-t) != 0: primitive is not odd";
            result.witness["t"] = ts[i];
            result.witness["odd_defect"] = defect;
            return result;
        }
    }

    auto find_root = [&](const std::vector<double>& vals, double sign) -> double {
        if (vals.front() == 0.0) return sign * ts.front();
        for (std::size_t i = 1; i < vals.size(); ++i) {
            if (vals[i] == 0.0 || (vals[i] < 0.0) != (vals[i - 1] < 0.0)) {
                const double root = bisect_root([&](double t) { return F(sign * t); }, ts[i - 1], ts[i]);
                return sign * root;
            }
        }
        return kNaN;
    };
    for (double sign : {1.0, -1.0}) {
        const double root = find_root(sign > 0 ? pos : neg, sign);
        if (!std::isnan(root)) {
            result.verdict = Verdict::refuted;
            result.note = "F vanishes away from 0";
            result.witness["t"] = root;
            result.witness["F"] = F(root);
            return result;
        }
    }

    double min_abs = std::numeric_limits<double>::infinity();
    for (double v : pos) min_abs = std::min(min_abs, std::abs(v));
    result.witness["min_abs_F"] = min_abs;
    if (min_abs < 1e-12) {
        result.verdict = Verdict::inconclusive;
        result.note = "F comes within 1e-12 of zero without a sampled sign change";
    } else {
        result.verdict = Verdict::verified;
        result.note = "F odd and sign-definite on sampled (0, t_max]";
    }
    return result;
}

ConditionResult check_condition_c(const ExprFn& f, double t_max, int samples, double odd_tol) {
    return check_condition_c(Primitive(f), t_max, samples, odd_tol);
}

HypothesisReport check_hypotheses(const Problem& problem, const CheckSettings& settings) {
    HypothesisReport report;
    report.a = check_condition_a(problem.K_primitive_fn(), settings.t_max, settings.samples);
    for (const auto& F : problem.F_fns()) {
        report.b.push_back(check_condition_b(F, settings.t_max, settings.samples));
        report.c.push_back(check_condition_c(F, settings.t_max, settings.samples, settings.odd_tol));
    }
    return report;
}

}  // namespace kdl
