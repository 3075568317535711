#include "kdl/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "kdl/energy.hpp"
#include "kdl/error.hpp"
#include "kdl/sampling.hpp"

namespace kdl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tie_tolerance(const SolveSettings& s, double J) { return s.tie_rel_tol * (1.0 + std::abs(J)); }

double distinct_threshold(const SolveSettings& s) { return std::max(10.0 * s.cert_tol, 1e-6); }

Eigen::VectorXd project_ball(const Eigen::VectorXd& v, double radius) {
    const double norm = v.norm();
    if (norm <= radius) return v;
    return v * (radius / norm);
}

ObjectiveFn j_objective(const Problem& problem, const Eigen::VectorXd& mu) {
    return [&problem, mu](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        return energy::value_and_gradient(problem, x, mu, grad);
    };
}

VectorFieldFn j_gradient(const Problem& problem, const Eigen::VectorXd& mu) {
    return [&problem, mu](const Eigen::VectorXd& x) {
        Eigen::VectorXd g(x.size());
        energy::value_and_gradient(problem, x, mu, &g);
        return g;
    };
}

double j_value(const Problem& problem, const Eigen::VectorXd& mu, const Eigen::VectorXd& x) {
    return energy::value_and_gradient(problem, x, mu, nullptr);
}

// Two basins with (nearly) equal values and no barrier on the segment
// between them are the same flat minimum, split by finite precision.
std::vector<Basin> merge_flat_basins(const Problem& problem, const Eigen::VectorXd& mu, std::vector<Basin> basins,
                                     const SolveSettings& s) {
    std::vector<Basin> out;
    for (auto& b : basins) {
        bool merged = false;
        for (auto& kept : out) {
            const double tol = tie_tolerance(s, kept.value);
            if (std::abs(b.value - kept.value) > tol) continue;
            double top = -kInf;
            for (int i = 1; i < 16; ++i) {
                const double w = i / 16.0;
                top = std::max(top, j_value(problem, mu, (1.0 - w) * kept.x + w * b.x));
            }
            if (top <= std::max(kept.value, b.value) + tol) {
                kept.hits += b.hits;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(std::move(b));
    }
    return out;
}

struct MuEval {
    Eigen::VectorXd mu;
    std::vector<Basin> basins;
    long evaluations = 0;

    bool two() const { return basins.size() >= 2; }
    double best() const { return basins.empty() ? kInf : basins[0].value; }
    double tie() const { return two() ? basins[1].value - basins[0].value : kInf; }
};

// Points with two basins rank by tie score; the others by min J_mu, larger first.
bool better(const MuEval& a, const MuEval& b) {
    if (a.basins.empty() != b.basins.empty()) return !a.basins.empty();
    if (a.two() != b.two()) return a.two();
    const double ka = a.two() ? a.tie() : -a.best();
    const double kb = b.two() ? b.tie() : -b.best();
    if (ka != kb) return ka < kb;
    return std::lexicographical_compare(a.mu.data(), a.mu.data() + a.mu.size(), b.mu.data(),
                                        b.mu.data() + b.mu.size());
}

class MuEvaluator {
public:
    MuEvaluator(const Problem& problem, const SolveSettings& settings, double radius)
        : problem_(problem), settings_(settings),
          starts_(make_starts(problem.n(), settings.starts, radius, settings.seed)) {}

    MuEval operator()(const Eigen::VectorXd& mu, const std::vector<Eigen::VectorXd>& warm) const {
        std::vector<Eigen::VectorXd> starts = starts_;
        starts.insert(starts.end(), warm.begin(), warm.end());
        const auto ms = multistart(j_objective(problem_, mu), starts, settings_.local, 1, settings_.basin_radius,
                                   10.0 * settings_.local.grad_tol);
        MuEval e;
        e.mu = mu;
        e.basins = merge_flat_basins(problem_, mu, ms.basins, settings_);
        e.evaluations = ms.evaluations;
        return e;
    }

    std::vector<MuEval> batch(const std::vector<Eigen::VectorXd>& mus, const std::vector<Eigen::VectorXd>& warm) const {
        std::vector<MuEval> out(mus.size());
        parallel_for(mus.size(), settings_.jobs, [&](std::size_t i) { out[i] = (*this)(mus[i], warm); });
        return out;
    }

private:
    const Problem& problem_;
    const SolveSettings& settings_;
    std::vector<Eigen::VectorXd> starts_;
};

std::vector<Eigen::VectorXd> warm_starts(const MuEval& e) {
    std::vector<Eigen::VectorXd> warm;
    for (std::size_t i = 0; i < e.basins.size() && i < 4; ++i) warm.push_back(e.basins[i].x);
    return warm;
}

CriticalPoint make_point(const Problem& problem, const Eigen::VectorXd& mu, const Eigen::VectorXd& x, PointKind kind,
                         int basin_id) {
    Eigen::VectorXd g(x.size());
    CriticalPoint p;
    p.J = energy::value_and_gradient(problem, x, mu, &g);
    p.x = StateVector(x);
    p.grad_norm = g.lpNorm<Eigen::Infinity>();
    p.kind = kind;
    p.basin_id = basin_id;
    return p;
}

Eigen::VectorXd polish(const Problem& problem, const Eigen::VectorXd& mu, const Eigen::VectorXd& x,
                       const SolveSettings& s) {
    const auto field = j_gradient(problem, mu);
    const double before = field(x).lpNorm<Eigen::Infinity>();
    try {
        const auto r = newton_solve(field, x, 1e-2 * s.cert_tol, 50);
        if (r.residual < before && distance1(r.x, x) <= s.basin_radius) return r.x;
    } catch (const DomainError&) {
    }
    return x;
}

PointKind classify(const Problem& problem, const Eigen::VectorXd& mu, const Eigen::VectorXd& x) {
    const Eigen::MatrixXd jac = fd_jacobian(j_gradient(problem, mu), x);
    const Eigen::MatrixXd sym = 0.5 * (jac + jac.transpose());
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues()[0];
    return lo > 0.0 ? PointKind::local_min : PointKind::saddle_like;
}

// Piecewise-linear resampling of nodes [first, last] to equal Euclidean arc length.
void reparametrize(std::vector<Eigen::VectorXd>& nodes, std::size_t first, std::size_t last) {
    if (last <= first + 1) return;
    std::vector<double> arc(last - first + 1, 0.0);
    for (std::size_t i = first + 1; i <= last; ++i) {
        arc[i - first] = arc[i - first - 1] + (nodes[i] - nodes[i - 1]).norm();
    }
    const double total = arc.back();
    if (!(total > 0.0)) return;
    std::vector<Eigen::VectorXd> old(nodes.begin() + static_cast<std::ptrdiff_t>(first),
                                     nodes.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    std::size_t seg = 0;
    for (std::size_t i = first + 1; i < last; ++i) {
        const double target = total * static_cast<double>(i - first) / static_cast<double>(last - first);
        while (seg + 1 < arc.size() - 1 && arc[seg + 1] < target) ++seg;
        const double len = arc[seg + 1] - arc[seg];
        const double w = len > 0.0 ? (target - arc[seg]) / len : 0.0;
        nodes[i] = (1.0 - w) * old[seg] + w * old[seg + 1];
    }
}

double spectral_bound(const Problem& problem, const Eigen::VectorXd& mu, const std::vector<Eigen::VectorXd>& at) {
    double L = 1e-8;
    for (const auto& x : at) {
        const Eigen::MatrixXd jac = fd_jacobian(j_gradient(problem, mu), x);
        const Eigen::MatrixXd sym = 0.5 * (jac + jac.transpose());
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues();
        L = std::max(L, ev.cwiseAbs().maxCoeff());
    }
    return L;
}

}  // namespace

std::string_view to_string(PointKind k) noexcept {
    switch (k) {
        case PointKind::global_min: return "global_min";
        case PointKind::local_min: return "local_min";
        case PointKind::saddle_like: return "saddle_like";
    }
    return "saddle_like";
}

double oscillation(const Primitive& G, double t_max, int samples) {
    if (!(t_max > 0.0) || samples < 2) throw PreconditionError("oscillation: need t_max > 0 and samples >= 2");
    const auto ts = lin_space(-t_max, t_max, samples % 2 == 0 ? samples + 1 : samples);
    std::vector<double> v(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) v[i] = G(ts[i]);
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    double lo = std::min(*lo_it, 0.0);
    double hi = std::max(*hi_it, 0.0);
    auto bracket = [&](std::size_t i) {
        return std::pair{ts[i == 0 ? 0 : i - 1], ts[std::min(i + 1, ts.size() - 1)]};
    };
    {
        const auto [a, b] = bracket(static_cast<std::size_t>(hi_it - v.begin()));
        const double t = golden_section_minimize([&](double s) { return -G(s); }, a, b);
        hi = std::max(hi, G(t));
    }
    {
        const auto [a, b] = bracket(static_cast<std::size_t>(lo_it - v.begin()));
        const double t = golden_section_minimize([&](double s) { return G(s); }, a, b);
        lo = std::min(lo, G(t));
    }
    return hi - lo;
}

double oscillation(const ExprFn& g, double t_max, int samples) {
    return oscillation(Primitive(g), t_max, samples);
}

OscillationReport oscillation_report(const Problem& problem, double delta, const SolveSettings& settings) {
    OscillationReport report;
    for (const auto& G : problem.G_fns()) {
        report.per_k.push_back(oscillation(G, settings.t_max, settings.samples));
    }
    report.max = *std::max_element(report.per_k.begin(), report.per_k.end());
    report.budget = settings.oscillation_safety * delta;
    return report;
}

TieSearchResult find_mu_tilde(const Problem& problem, const ConstantBundle& bundle, const GapReport& gap,
                              const SolveSettings& settings) {
    const int n = problem.n();
    if (gap.flagged || !(gap.delta > 0.0)) {
        throw PreconditionError("find_mu_tilde: the minimax gap delta is not positive");
    }
    const auto osc = oscillation_report(problem, gap.delta, settings);
    if (!(osc.max < osc.budget)) {
        std::ostringstream msg;
        msg << "find_mu_tilde: max oscillation of the perturbation primitives " << osc.max
            << " is not below " << settings.oscillation_safety << " * delta = " << osc.budget;
        throw PreconditionError(msg.str());
    }

    const double sigma = bundle.sigma;
    const double level = std::accumulate(osc.per_k.begin(), osc.per_k.end(), 0.0);
    const double radius = certified_radius(bundle, n, level);
    const MuEvaluator evaluate(problem, settings, radius);

    TieSearchResult result;
    std::vector<Eigen::VectorXd> sweep{Eigen::VectorXd::Zero(n)};
    for (auto& p : halton_ball(n, settings.sweep_points, sigma)) sweep.push_back(std::move(p));
    auto evals = evaluate.batch(sweep, {});
    result.mu_evaluations += static_cast<int>(evals.size());
    MuEval best = *std::min_element(evals.begin(), evals.end(), better);
    if (best.basins.empty()) throw ConvergenceError("find_mu_tilde: no local run converged during the sweep");
    result.score_history.push_back(best.tie());

    double rho = 2.0 * sigma * std::pow(1.0 / std::max(1, settings.sweep_points), 1.0 / n);
    const double rho_floor = 1e-15 * std::max(sigma, 1e-300);
    int round = 0;
    for (; round < settings.max_rounds; ++round) {
        if (best.two() && best.tie() <= tie_tolerance(settings, best.best())) break;
        if (rho < rho_floor) break;

        std::vector<Eigen::VectorXd> candidates;
        if (best.two()) {
            const Eigen::VectorXd& b1 = best.basins[0].x;
            const Eigen::VectorXd& b2 = best.basins[1].x;
            const Eigen::VectorXd dd = energy::psi(problem, b1) - energy::psi(problem, b2);
            const double sq = dd.squaredNorm();
            if (sq > 0.0) {
                const Eigen::VectorXd step = best.tie() * dd / sq;
                candidates.push_back(project_ball(best.mu - step, sigma));
                candidates.push_back(project_ball(best.mu - 0.5 * step, sigma));
            }
        } else {
            const Eigen::VectorXd ps = energy::psi(problem, best.basins[0].x);
            if (ps.norm() > 0.0) candidates.push_back(project_ball(best.mu - rho * ps / ps.norm(), sigma));
        }
        const auto offset = static_cast<std::uint64_t>(1 + round) * static_cast<std::uint64_t>(settings.refine_points);
        for (const auto& p : halton_ball(n, settings.refine_points, rho, offset)) {
            candidates.push_back(project_ball(best.mu + p, sigma));
        }

        const auto round_evals = evaluate.batch(candidates, warm_starts(best));
        result.mu_evaluations += static_cast<int>(round_evals.size());
        const MuEval& cand = *std::min_element(round_evals.begin(), round_evals.end(), better);
        if (better(cand, best)) {
            best = cand;
        } else {
            rho *= 0.5;
        }
        result.score_history.push_back(best.tie());
    }
    result.rounds = round;

    if (!best.two() || best.tie() > tie_tolerance(settings, best.best())) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "find_mu_tilde: no tie within tolerance after " << round << " rounds; best mu = [";
        for (int k = 0; k < n; ++k) msg << (k ? ", " : "") << best.mu[k];
        msg << "], basins = " << best.basins.size();
        if (best.two()) msg << ", tie score = " << best.tie();
        throw BudgetExhausted(msg.str());
    }

    const Eigen::VectorXd x1 = polish(problem, best.mu, best.basins[0].x, settings);
    const Eigen::VectorXd x2 = polish(problem, best.mu, best.basins[1].x, settings);
    result.mu = MuVector(best.mu);
    result.m1 = make_point(problem, best.mu, x1, PointKind::global_min, 0);
    result.m2 = make_point(problem, best.mu, x2, PointKind::global_min, 1);
    if (result.m2.J < result.m1.J) {
        std::swap(result.m1, result.m2);
        std::swap(result.m1.basin_id, result.m2.basin_id);
    }
    result.tie_score = result.m2.J - result.m1.J;
    result.tie_tolerance = tie_tolerance(settings, result.m1.J);
    return result;
}

CriticalPoint third_critical_point(const Problem& problem, const MuVector& mu, const StateVector& m1,
                                   const StateVector& m2, const SolveSettings& settings, double box_radius) {
    const int n = problem.n();
    if (mu.size() != n || m1.size() != n || m2.size() != n) {
        throw PreconditionError("third_critical_point: dimension mismatch");
    }
    const double sep = distinct_threshold(settings);
    if (distance1(m1.values(), m2.values()) < sep) {
        throw PreconditionError("third_critical_point: the two minima coincide");
    }
    const Eigen::VectorXd m = mu.values();
    const auto field = j_gradient(problem, m);

    auto accept = [&](const Eigen::VectorXd& x) -> std::optional<CriticalPoint> {
        NewtonResult r;
        try {
            r = newton_solve(field, x, 1e-2 * settings.cert_tol, 60);
        } catch (const DomainError&) {
            return std::nullopt;
        }
        if (r.residual > settings.cert_tol) return std::nullopt;
        if (distance1(r.x, m1.values()) < sep || distance1(r.x, m2.values()) < sep) return std::nullopt;
        return make_point(problem, m, r.x, classify(problem, m, r.x), -1);
    };

    // Climbing string between the minima.
    const int N = std::max(3, settings.path_nodes);
    std::vector<Eigen::VectorXd> nodes(N);
    for (int i = 0; i < N; ++i) {
        const double w = static_cast<double>(i) / (N - 1);
        nodes[i] = (1.0 - w) * m1.values() + w * m2.values();
    }
    const double spacing = (m2.values() - m1.values()).norm() / (N - 1);
    const double dt = 0.5 / spectral_bound(problem, m, {nodes[0], nodes[N / 2], nodes[N - 1]});
    std::vector<double> J(N);
    std::vector<Eigen::VectorXd> G(N);
    int next_try = 50;
    for (int it = 1; it <= settings.string_iterations; ++it) {
        int c = 1;
        for (int i = 1; i < N - 1; ++i) {
            G[i].resize(n);
            J[i] = energy::value_and_gradient(problem, nodes[i], m, &G[i]);
            if (J[i] > J[c]) c = i;
        }
        for (int i = 1; i < N - 1; ++i) {
            Eigen::VectorXd tau = nodes[i + 1] - nodes[i - 1];
            const double tn = tau.norm();
            if (tn > 0.0) tau /= tn;
            const double gt = G[i].dot(tau);
            Eigen::VectorXd dir = -(G[i] - gt * tau);
            if (i == c) dir += gt * tau;
            Eigen::VectorXd step = dt * dir;
            const double len = step.norm();
            if (len > 0.5 * spacing) step *= 0.5 * spacing / len;
            nodes[i] += step;
        }
        reparametrize(nodes, 0, static_cast<std::size_t>(c));
        reparametrize(nodes, static_cast<std::size_t>(c), static_cast<std::size_t>(N - 1));

        if (it == next_try || it == settings.string_iterations) {
            next_try *= 2;
            if (auto p = accept(nodes[c])) return *p;
        }
    }

    // Deflated Newton: M(x) grad J(x) with M = prod_i (1 / ||x - m_i||^2 + 1).
    const VectorFieldFn deflated = [&](const Eigen::VectorXd& x) {
        double M = 1.0;
        for (const auto* mi : {&m1, &m2}) M *= 1.0 / (x - mi->values()).squaredNorm() + 1.0;
        return Eigen::VectorXd(M * field(x));
    };
    const double radius =
        box_radius > 0.0 ? box_radius
                         : 2.0 * std::max(std::sqrt(norm1_sq(m1.values())), std::sqrt(norm1_sq(m2.values()))) + 1.0;
    auto starts = make_starts(n, settings.starts, radius, settings.seed + 1);
    starts.insert(starts.begin(), 0.5 * (m1.values() + m2.values()));
    for (const auto& s : starts) {
        NewtonResult r;
        try {
            r = newton_solve(deflated, s, 1e-2 * settings.cert_tol, 100);
        } catch (const DomainError&) {
            continue;
        }
        if (!r.x.allFinite()) continue;
        if (auto p = accept(r.x)) return *p;
    }
    throw ConvergenceError("third_critical_point: neither the climbing string nor deflated Newton found a third point");
}

Certificate certify(const Problem& problem, const ConstantBundle& bundle, const GapReport& gap, const MuVector& mu,
                    std::vector<CriticalPoint> points, const SolveSettings& settings) {
    const int n = problem.n();
    QuadratureConfig tight = problem.quadrature();
    tight.tol *= settings.quad_tighten;
    const Problem strict = problem.with_quadrature(tight);

    Certificate cert;
    cert.problem = problem.spec();
    cert.constants = bundle;
    cert.constants.delta = gap.delta;
    cert.gap = gap;
    cert.mu_tilde = mu;
    cert.cert_tol = settings.cert_tol;
    cert.seed = settings.seed;
    cert.oscillation = oscillation_report(strict, gap.delta, settings);
    const double level = std::accumulate(cert.oscillation.per_k.begin(), cert.oscillation.per_k.end(), 0.0);
    cert.certified_radius = certified_radius(bundle, n, level);

    std::vector<std::string> violations;
    auto fail = [&](std::string what) { violations.push_back(std::move(what)); };

    if (mu.size() != n) throw PreconditionError("certify: mu has the wrong dimension");
    if (!(bundle.sigma < bundle.r)) fail("sigma < r");
    if (!(mu.norm2() <= bundle.sigma * (1.0 + 1e-12))) fail("||mu_tilde|| <= sigma");
    if (gap.flagged || !(gap.delta > 0.0)) fail("delta > 0");
    if (!(cert.oscillation.max < cert.oscillation.budget)) fail("max oscillation < safety * delta");
    if (points.size() < 3) fail("at least three critical points");

    for (auto& p : points) {
        if (p.x.size() != n) throw PreconditionError("certify: point has the wrong dimension");
        const auto e = evaluate(strict, p.x, mu);
        const auto res = residual(strict, p.x, mu);
        p.J = e.J;
        p.grad_norm = res.max_abs;
        cert.residual_max = std::max(cert.residual_max, res.max_abs);
    }
    if (!(cert.residual_max <= settings.cert_tol)) fail("residual_max <= tol");

    const double sep = 10.0 * settings.cert_tol;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (!(distance1(points[i].x.values(), points[j].x.values()) >= sep)) {
                fail("points " + std::to_string(i) + " and " + std::to_string(j) + " are not distinct");
            }
        }
    }

    std::vector<const CriticalPoint*> minima;
    for (const auto& p : points) {
        if (p.kind == PointKind::global_min) minima.push_back(&p);
    }
    if (minima.size() < 2) {
        fail("two global minima");
    } else {
        double lo = kInf;
        double hi = -kInf;
        for (const auto* p : minima) {
            lo = std::min(lo, p->J);
            hi = std::max(hi, p->J);
        }
        cert.tie_score = hi - lo;
        cert.tie_tolerance = tie_tolerance(settings, lo);
        if (!(cert.tie_score <= cert.tie_tolerance)) fail("global minima tie");
        for (const auto& p : points) {
            if (p.kind != PointKind::global_min && p.J < lo - cert.tie_tolerance) {
                fail("a non-minimum point lies below the global minima");
            }
        }
        for (const auto* p : minima) {
            if (!(std::sqrt(norm1_sq(p->x.values())) <= cert.certified_radius)) fail("global minima inside R*");
        }
    }

    if (!violations.empty()) {
        std::string msg = "certification failed:";
        for (const auto& v : violations) msg += " [" + v + "]";
        throw CertificationError(msg);
    }
    cert.solutions = std::move(points);
    cert.caveats = gap.caveats;
    cert.caveats.push_back("global minimality is relative to the multi-start search, not proven");
    return cert;
}

Certificate solve(const Problem& problem, const ConstantBundle& bundle, const GapReport& gap,
                  const SolveSettings& settings) {
    const auto tie = find_mu_tilde(problem, bundle, gap, settings);
    const auto level = [&] {
        const auto osc = oscillation_report(problem, gap.delta, settings);
        return std::accumulate(osc.per_k.begin(), osc.per_k.end(), 0.0);
    }();
    auto third = third_critical_point(problem, tie.mu, tie.m1.x, tie.m2.x, settings,
                                      compute_gamma(problem.n()) * certified_radius(bundle, problem.n(), level));
    auto cert = certify(problem, bundle, gap, tie.mu, {tie.m1, tie.m2, std::move(third)}, settings);
    cert.search_rounds = tie.rounds;
    return cert;
}

}  // namespace kdl
