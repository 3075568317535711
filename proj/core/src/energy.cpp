#include "kdl/energy.hpp"

#include <cmath>

#include "kdl/error.hpp"

namespace kdl {
namespace {

void require_same_size(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size()) {
        throw PreconditionError("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()));
    }
}

void require_problem_size(const Problem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& mu) {
    if (x.size() != problem.n() || mu.size() != problem.n()) {
        throw PreconditionError("state and multiplier must have n = " + std::to_string(problem.n()) + " entries");
    }
}

}  // namespace

double norm1_sq(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    double prev = 0.0;
    double sum = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double d = x[k] - prev;
        sum += d * d;
        prev = x[k];
    }
    return sum + prev * prev;
}

double inner1(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    require_same_size(x, y);
    const Eigen::Index n = x.size();
    double px = 0.0;
    double py = 0.0;
    double sum = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        sum += (x[k] - px) * (y[k] - py);
        px = x[k];
        py = y[k];
    }
    return sum + px * py;
}

Eigen::VectorXd laplacian(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd out(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double left = k > 0 ? x[k - 1] : 0.0;
        const double right = k + 1 < n ? x[k + 1] : 0.0;
        out[k] = right - 2.0 * x[k] + left;
    }
    return out;
}

double inner1(const StateVector& x, const StateVector& y) { return inner1(x.values(), y.values()); }

Eigen::VectorXd laplacian(const StateVector& x) { return laplacian(x.values()); }

double summation_by_parts_check(const StateVector& x, const StateVector& y) {
    require_same_size(x.values(), y.values());
    return std::abs(inner1(x, y) + laplacian(x).dot(y.values()));
}

double distance1(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    require_same_size(x, y);
    return std::sqrt(norm1_sq(x - y));
}

namespace energy {

double Q(const Problem& problem, const Eigen::VectorXd& x) {
    return 0.5 * problem.K_primitive(norm1_sq(x));
}

Eigen::VectorXd psi(const Problem& problem, const Eigen::VectorXd& x) {
    Eigen::VectorXd out(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) out[k] = problem.F(static_cast<int>(k), x[k]);
    return out;
}

double h_value_and_gradient(const Problem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                            Eigen::VectorXd* grad) {
    require_problem_size(problem, x, mu);
    const int n = problem.n();
    const double t = norm1_sq(x);
    double value = 0.5 * problem.K_primitive(t);
    for (int k = 0; k < n; ++k) {
        if (mu[k] != 0.0) value -= mu[k] * problem.F(k, x[k]);
    }
    if (grad != nullptr) {
        grad->resize(n);
        const double Kt = problem.K(t);
        for (int k = 0; k < n; ++k) {
            const double left = k > 0 ? x[k - 1] : 0.0;
            const double right = k + 1 < n ? x[k + 1] : 0.0;
            double gk = -Kt * (right - 2.0 * x[k] + left);
            if (mu[k] != 0.0) gk -= mu[k] * problem.f(k, x[k]);
            (*grad)[k] = gk;
        }
    }
    return value;
}

double value_and_gradient(const Problem& problem, const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                          Eigen::VectorXd* grad) {
    double value = h_value_and_gradient(problem, x, mu, grad);
    const int n = problem.n();
    for (int k = 0; k < n; ++k) {
        value -= problem.G(k, x[k]);
        if (grad != nullptr) (*grad)[k] -= problem.g(k, x[k]);
    }
    return value;
}

}  // namespace energy

EnergyBreakdown evaluate(const Problem& problem, const StateVector& x, const MuVector& mu) {
    require_problem_size(problem, x.values(), mu.values());
    EnergyBreakdown e;
    e.norm1_sq = norm1_sq(x.values());
    e.Q = 0.5 * problem.K_primitive(e.norm1_sq);
    e.psi = energy::psi(problem, x.values());
    e.phi = 0.0;
    for (int k = 0; k < problem.n(); ++k) e.phi -= problem.G(k, x[k]);
    e.h = e.Q - e.psi.dot(mu.values());
    e.J = e.h + e.phi;
    return e;
}

Eigen::VectorXd gradient(const Problem& problem, const StateVector& x, const MuVector& mu) {
    require_problem_size(problem, x.values(), mu.values());
    const int n = problem.n();
    const Eigen::VectorXd lap = laplacian(x.values());
    const double Kt = problem.K(norm1_sq(x.values()));
    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k) {
        out[k] = -Kt * lap[k] - problem.g(k, x[k]) - mu[k] * problem.f(k, x[k]);
    }
    return out;
}

Residual residual(const Problem& problem, const StateVector& x, const MuVector& mu) {
    Residual r;
    r.components = gradient(problem, x, mu);
    r.max_abs = r.components.size() == 0 ? 0.0 : r.components.cwiseAbs().maxCoeff();
    return r;
}

}  // namespace kdl
