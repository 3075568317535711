#include "kdl/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include <Eigen/Dense>

#include "kdl/energy.hpp"
#include "kdl/error.hpp"

namespace kdl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const ObjectiveFn& f, const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    try {
        const double v = f(x, g);
        if (!std::isfinite(v) || (g != nullptr && !g->allFinite())) return kInf;
        return v;
    } catch (const DomainError&) {
        return kInf;
    }
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

unsigned resolve_jobs(unsigned jobs) {
    if (jobs != 0) return jobs;
    return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_jobs(jobs), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_index = count;
    std::exception_ptr error;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
}

std::string_view to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::gradient: return "gradient";
        case StopReason::stalled: return "stalled";
        case StopReason::iteration_cap: return "iteration_cap";
    }
    return "stalled";
}

Eigen::MatrixXd fd_jacobian(const VectorFieldFn& field, const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    const double base_step = std::cbrt(std::numeric_limits<double>::epsilon());
    Eigen::MatrixXd jac(n, n);
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = base_step * std::max(1.0, std::abs(x[j]));
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        jac.col(j) = (field(xp) - field(xm)) / (xp[j] - xm[j]);
        xp[j] = x[j];
        xm[j] = x[j];
    }
    return jac;
}

NewtonResult newton_solve(const VectorFieldFn& field, Eigen::VectorXd x0, double tol, int max_iter) {
    NewtonResult result;
    result.x = std::move(x0);
    Eigen::VectorXd F = field(result.x);
    double norm = F.norm();
    for (; result.iterations < max_iter; ++result.iterations) {
        result.residual = F.lpNorm<Eigen::Infinity>();
        if (result.residual <= tol) {
            result.converged = true;
            return result;
        }
        const Eigen::MatrixXd jac = fd_jacobian(field, result.x);
        Eigen::VectorXd step = jac.fullPivLu().solve(-F);
        if (!step.allFinite()) step = jac.completeOrthogonalDecomposition().solve(-F);
        if (!step.allFinite()) break;

        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
            const Eigen::VectorXd trial = result.x + t * step;
            Eigen::VectorXd Ft;
            try {
                Ft = field(trial);
            } catch (const DomainError&) {
                continue;
            }
            if (!Ft.allFinite()) continue;
            const double tn = Ft.norm();
            if (tn < (1.0 - 1e-4 * t) * norm) {
                result.x = trial;
                F = std::move(Ft);
                norm = tn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    result.residual = F.lpNorm<Eigen::Infinity>();
    result.converged = result.residual <= tol;
    return result;
}

LocalResult minimize_bfgs(const ObjectiveFn& objective, Eigen::VectorXd x0, const LocalSettings& settings) {
    const Eigen::Index n = x0.size();
    LocalResult result;
    result.x = std::move(x0);
    Eigen::VectorXd g(n);
    double f = safe_eval(objective, result.x, &g);
    result.evaluations = 1;
    if (!std::isfinite(f)) throw DomainError("minimize_bfgs: objective not finite at the start point");

    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    bool fresh = true;
    int flat_steps = 0;
    result.reason = StopReason::iteration_cap;
    Eigen::VectorXd x_new(n);
    Eigen::VectorXd g_new(n);

    for (; result.iterations < settings.max_iter; ++result.iterations) {
        if (g.lpNorm<Eigen::Infinity>() <= settings.grad_tol) {
            result.reason = StopReason::gradient;
            break;
        }
        Eigen::VectorXd d = -H * g;
        double slope = g.dot(d);
        if (!(slope < -1e-14 * g.norm() * d.norm())) {
            H.setIdentity();
            fresh = true;
            d = -g;
            slope = g.dot(d);
        }
        double t = 1.0;
        if (fresh) t = std::min(1.0, settings.max_step / d.norm());

        bool accepted = false;
        double f_new = kInf;
        for (int bt = 0; bt < settings.max_backtracks; ++bt, t *= settings.shrink) {
            x_new = result.x + t * d;
            f_new = safe_eval(objective, x_new, &g_new);
            ++result.evaluations;
            if (f_new <= f + settings.armijo * t * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!fresh) {
                H.setIdentity();
                fresh = true;
                continue;
            }
            result.reason = StopReason::stalled;
            break;
        }

        // f resolves x only to about sqrt(eps); past that, accepted steps stop lowering f
        if (f_new >= f) {
            if (++flat_steps >= 3) {
                result.reason = StopReason::stalled;
                break;
            }
        } else {
            flat_steps = 0;
        }

        const Eigen::VectorXd s = x_new - result.x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh) H *= sy / y.squaredNorm();
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n) - rho * y * s.transpose();
            H = V.transpose() * H * V + rho * s * s.transpose();
            fresh = false;
        }
        result.x = x_new;
        f = f_new;
        g = g_new;
    }

    result.value = f;
    result.grad_norm = g.lpNorm<Eigen::Infinity>();

    if (settings.newton_polish && result.grad_norm > settings.polish_tol && result.grad_norm <= 1e-3) {
        const VectorFieldFn field = [&](const Eigen::VectorXd& x) {
            Eigen::VectorXd gx(n);
            objective(x, &gx);
            return gx;
        };
        try {
            const auto polished = newton_solve(field, result.x, settings.polish_tol, 30);
            Eigen::VectorXd gp(n);
            const double fp = safe_eval(objective, polished.x, &gp);
            result.evaluations += 1 + polished.iterations * static_cast<int>(2 * n + 1);
            if (std::isfinite(fp) && fp <= f + 1e-12 * (1.0 + std::abs(f)) &&
                gp.lpNorm<Eigen::Infinity>() < result.grad_norm) {
                result.x = polished.x;
                result.value = fp;
                result.grad_norm = gp.lpNorm<Eigen::Infinity>();
                if (result.grad_norm <= settings.grad_tol) result.reason = StopReason::gradient;
            }
        } catch (const DomainError&) {
            // keep the unpolished point
        }
    }
    return result;
}

std::vector<Basin> cluster_basins(const std::vector<LocalResult>& results, double radius, double max_grad_norm) {
    std::vector<const LocalResult*> sorted;
    for (const auto& r : results) {
        if (r.grad_norm <= max_grad_norm && std::isfinite(r.value)) sorted.push_back(&r);
    }
    std::sort(sorted.begin(), sorted.end(), [](const LocalResult* a, const LocalResult* b) {
        if (a->value != b->value) return a->value < b->value;
        return lex_less(a->x, b->x);
    });
    std::vector<Basin> basins;
    for (const auto* r : sorted) {
        bool merged = false;
        for (auto& b : basins) {
            if (distance1(r->x, b.x) <= radius) {
                ++b.hits;
                merged = true;
                break;
            }
        }
        if (!merged) basins.push_back(Basin{r->x, r->value, r->grad_norm, 1});
    }
    return basins;
}

std::vector<Eigen::VectorXd> make_starts(int n, int count, double radius, std::uint64_t seed) {
    std::vector<Eigen::VectorXd> starts;
    if (count <= 0) return starts;
    starts.reserve(count);
    starts.push_back(Eigen::VectorXd::Zero(n));

    Eigen::VectorXd v1(n);
    for (int k = 0; k < n; ++k) v1[k] = std::sin((k + 1) * std::numbers::pi / (n + 1));
    v1 *= 0.5 * radius / std::sqrt(norm1_sq(v1));
    if (static_cast<int>(starts.size()) < count) starts.push_back(v1);
    if (static_cast<int>(starts.size()) < count) starts.push_back(-v1);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = 0.5 * radius / std::sqrt(2.0 * n);
    while (static_cast<int>(starts.size()) < count) {
        Eigen::VectorXd z(n);
        for (int k = 0; k < n; ++k) z[k] = scale * normal(rng);
        starts.push_back(std::move(z));
    }
    return starts;
}

MultiStartResult multistart(const ObjectiveFn& objective, const std::vector<Eigen::VectorXd>& starts,
                            const LocalSettings& settings, unsigned jobs, double basin_radius,
                            double basin_grad_tol) {
    MultiStartResult out;
    out.runs.resize(starts.size());
    parallel_for(starts.size(), jobs, [&](std::size_t i) {
        out.runs[i] = minimize_bfgs(objective, starts[i], settings);
    });
    for (const auto& r : out.runs) {
        if (r.converged()) ++out.converged;
        out.evaluations += r.evaluations;
    }
    out.basins = cluster_basins(out.runs, basin_radius, basin_grad_tol);
    return out;
}

}  // namespace kdl
