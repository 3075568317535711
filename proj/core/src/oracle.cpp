#include "kdl/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "kdl/energy.hpp"
#include "kdl/error.hpp"
#include "kdl/minimax.hpp"
#include "kdl/optimize.hpp"

namespace kdl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Grid make_grid(int n, double radius, int points_per_dim, int max_n, const char* who) {
    if (n < 1 || n > max_n) {
        throw PreconditionError(std::string(who) + ": grid oracles need 1 <= n <= " + std::to_string(max_n));
    }
    if (points_per_dim < 1 || points_per_dim > 2001) {
        throw PreconditionError(std::string(who) + ": points_per_dim must lie in [1, 2001]");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw PreconditionError(std::string(who) + ": box radius must be positive and finite");
    }
    Grid grid{n, radius, points_per_dim};
    double total = 1.0;
    for (int k = 0; k < n; ++k) total *= points_per_dim;
    if (total > static_cast<double>(Grid::kMaxGridNodes)) {
        throw PreconditionError(std::string(who) + ": grid exceeds " + std::to_string(Grid::kMaxGridNodes) + " nodes");
    }
    return grid;
}

// Runs body(node) for every node, one task per index of the leading axis.
template <class Body>
void for_each_node(const Grid& grid, unsigned jobs, const Body& body) {
    const long per_slice = grid.size() / grid.points_per_dim;
    parallel_for(static_cast<std::size_t>(grid.points_per_dim), jobs, [&](std::size_t slice) {
        const long first = static_cast<long>(slice) * per_slice;
        for (long node = first; node < first + per_slice; ++node) body(node);
    });
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

}  // namespace

long Grid::size() const {
    long total = 1;
    for (int k = 0; k < n; ++k) total *= points_per_dim;
    return total;
}

double Grid::spacing() const { return points_per_dim > 1 ? 2.0 * radius / (points_per_dim - 1) : 0.0; }

double Grid::coordinate(int i) const {
    if (points_per_dim == 1) return 0.0;
    // symmetric formula so that the middle node is exactly 0
    return radius * (2.0 * i - (points_per_dim - 1)) / (points_per_dim - 1);
}

std::vector<int> Grid::multi_index(long node) const {
    std::vector<int> idx(n);
    for (int k = n - 1; k >= 0; --k) {
        idx[k] = static_cast<int>(node % points_per_dim);
        node /= points_per_dim;
    }
    return idx;
}

Eigen::VectorXd Grid::point(long node) const {
    Eigen::VectorXd x(n);
    for (int k = n - 1; k >= 0; --k) {
        x[k] = coordinate(static_cast<int>(node % points_per_dim));
        node /= points_per_dim;
    }
    return x;
}

bool GridCell::contains(const Eigen::VectorXd& x, double slack) const {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        if (x[k] < lo[k] - slack || x[k] > hi[k] + slack) return false;
    }
    return true;
}

double oracle_box_radius(const ConstantBundle& bundle, int n, double level) {
    return bundle.gamma * certified_radius(bundle, n, level);
}

GridMinResult grid_min(const Problem& problem, const MuVector& mu, double box_radius, int points_per_dim,
                       double tie_rel_tol, unsigned jobs) {
    const Grid grid = make_grid(problem.n(), box_radius, points_per_dim, 3, "grid_min");
    const Eigen::VectorXd m = mu.values();
    std::vector<double> J(static_cast<std::size_t>(grid.size()), kInf);
    for_each_node(grid, jobs, [&](long node) {
        try {
            J[node] = energy::value_and_gradient(problem, grid.point(node), m, nullptr);
        } catch (const DomainError&) {
        }
        if (!std::isfinite(J[node])) J[node] = kInf;
    });

    const auto best = std::min_element(J.begin(), J.end());
    if (!std::isfinite(*best)) throw DomainError("grid_min: J is not finite on any grid node");
    GridMinResult out;
    out.J = *best;
    out.x = StateVector(grid.point(best - J.begin()));
    const double tol = tie_rel_tol * (1.0 + std::abs(out.J));
    for (long node = 0; node < grid.size(); ++node) {
        if (J[node] <= out.J + tol) out.argmins.emplace_back(grid.point(node));
    }
    out.nodes = grid.size();
    out.spacing = grid.spacing();
    return out;
}

std::vector<GridCell> grid_critical_points(const Problem& problem, const MuVector& mu, double box_radius,
                                           int points_per_dim, unsigned jobs) {
    const Grid grid = make_grid(problem.n(), box_radius, points_per_dim, 3, "grid_critical_points");
    const int n = grid.n;
    const int p = grid.points_per_dim;
    const Eigen::VectorXd m = mu.values();
    std::vector<GridCell> cells;
    if (p < 2) return cells;

    Eigen::MatrixXd grads(n, grid.size());
    for_each_node(grid, jobs, [&](long node) {
        Eigen::VectorXd g(n);
        energy::value_and_gradient(problem, grid.point(node), m, &g);
        grads.col(node) = g;
    });

    std::vector<long> stride(n);
    stride[n - 1] = 1;
    for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * p;
    const int corners = 1 << n;

    for (long node = 0; node < grid.size(); ++node) {
        const auto idx = grid.multi_index(node);
        if (std::any_of(idx.begin(), idx.end(), [&](int i) { return i == p - 1; })) continue;
        bool all = true;
        for (int comp = 0; comp < n && all; ++comp) {
            double lo = kInf;
            double hi = -kInf;
            for (int c = 0; c < corners; ++c) {
                long corner = node;
                for (int k = 0; k < n; ++k) {
                    if (c & (1 << k)) corner += stride[k];
                }
                lo = std::min(lo, grads(comp, corner));
                hi = std::max(hi, grads(comp, corner));
            }
            all = lo <= 0.0 && hi >= 0.0;
        }
        if (!all) continue;
        GridCell cell;
        cell.index = idx;
        cell.lo.resize(n);
        cell.hi.resize(n);
        for (int k = 0; k < n; ++k) {
            cell.lo[k] = grid.coordinate(idx[k]);
            cell.hi[k] = grid.coordinate(idx[k] + 1);
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

GridGapResult grid_gap(const Problem& problem, const ConstantBundle& bundle, double box_radius,
                       int points_per_dim, int mu_points_per_dim, unsigned jobs) {
    const Grid grid = make_grid(problem.n(), box_radius, points_per_dim, 2, "grid_gap");
    if (mu_points_per_dim < 1 || mu_points_per_dim % 2 == 0) {
        throw PreconditionError("grid_gap: mu_points_per_dim must be odd and positive");
    }
    const int n = grid.n;
    const double sigma = bundle.sigma;
    if (!(sigma >= 0.0)) throw PreconditionError("grid_gap: sigma must be non-negative");

    std::vector<double> Q(static_cast<std::size_t>(grid.size()));
    Eigen::MatrixXd psi(n, grid.size());
    for_each_node(grid, jobs, [&](long node) {
        const Eigen::VectorXd x = grid.point(node);
        Q[node] = energy::Q(problem, x);
        psi.col(node) = energy::psi(problem, x);
    });

    GridGapResult out;
    out.alpha = kInf;
    for (long node = 0; node < grid.size(); ++node) {
        out.alpha = std::min(out.alpha, sup_over_ball(psi.col(node), Q[node], sigma));
    }
    out.x_nodes = grid.size();

    std::vector<Eigen::VectorXd> mus;
    if (sigma == 0.0) {
        mus.push_back(Eigen::VectorXd::Zero(n));
    } else {
        const Grid mu_grid{n, sigma, mu_points_per_dim};
        for (long j = 0; j < mu_grid.size(); ++j) {
            Eigen::VectorXd mu = mu_grid.point(j);
            if (mu.norm() <= sigma) mus.push_back(std::move(mu));
        }
    }
    std::vector<double> inner(mus.size(), kInf);
    parallel_for(mus.size(), jobs, [&](std::size_t j) {
        for (long node = 0; node < grid.size(); ++node) {
            inner[j] = std::min(inner[j], Q[node] - psi.col(node).dot(mus[j]));
        }
    });
    out.mu_nodes = static_cast<long>(mus.size());
    out.beta = *std::max_element(inner.begin(), inner.end());
    out.delta = (out.alpha - out.beta) / n;
    return out;
}

void write_landscape_csv(std::ostream& out, const Problem& problem, const MuVector& mu, double box_radius,
                         int points_per_dim) {
    const Grid grid = make_grid(problem.n(), box_radius, points_per_dim, 3, "landscape");
    const Eigen::VectorXd m = mu.values();
    std::string line;
    for (int k = 0; k < grid.n; ++k) line += "x" + std::to_string(k + 1) + ",";
    line += "J\n";
    out << line;
    for (long node = 0; node < grid.size(); ++node) {
        const Eigen::VectorXd x = grid.point(node);
        line.clear();
        for (int k = 0; k < grid.n; ++k) {
            append_double(line, x[k]);
            line += ',';
        }
        double J = std::numeric_limits<double>::quiet_NaN();
        try {
            J = energy::value_and_gradient(problem, x, m, nullptr);
        } catch (const DomainError&) {
        }
        if (std::isfinite(J)) {
            append_double(line, J);
        } else {
            line += "nan";
        }
        line += '\n';
        out << line;
    }
}

}  // namespace kdl
