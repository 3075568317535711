#include "kdl_app/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "kdl/energy.hpp"
#include "kdl/error.hpp"
#include "kdl/oracle.hpp"
#include "kdl_app/config.hpp"
#include "kdl_app/serialize.hpp"

namespace kdl::app {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Context {
    Config config;
    fs::path out_dir;
};

Context load(const Options& o) {
    Context ctx{load_config(o.config), {}};
    auto& s = ctx.config.solver;
    if (o.seed) s.seed = *o.seed;
    if (o.jobs) s.jobs = *o.jobs;
    if (o.tol) {
        if (!(*o.tol > 0.0)) throw ConfigError("--tol", "must be positive");
        s.cert_tol = *o.tol;
    }
    if (o.points_per_dim) {
        if (*o.points_per_dim < 1 || *o.points_per_dim > 2001) {
            throw ConfigError("--points", "points per dimension must lie in [1, 2001]");
        }
        ctx.config.oracle.points_per_dim = *o.points_per_dim;
    }
    ctx.out_dir = o.out ? fs::path(*o.out) : fs::path(ctx.config.output_dir);
    fs::create_directories(ctx.out_dir);
    spdlog::debug("config {} hash {}", o.config, ctx.config.hash);
    return ctx;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
    if (!f) throw Error("write failed for " + path.string());
    spdlog::info("wrote {}", path.string());
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw PreconditionError(path.string() + ": invalid JSON: " + e.what());
    }
}

std::string fmt_vec(const Eigen::VectorXd& v) {
    std::ostringstream s;
    s.precision(10);
    s << "[";
    for (Eigen::Index k = 0; k < v.size(); ++k) s << (k ? ", " : "") << v[k];
    s << "]";
    return s.str();
}

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::verified: return kExitOk;
        case Verdict::refuted: return kExitRefuted;
        case Verdict::inconclusive: return kExitInconclusive;
    }
    return kExitInternal;
}

void print_condition(std::ostream& out, const std::string& label, const ConditionResult& c) {
    out << "  " << label << ": " << to_string(c.verdict);
    if (!c.note.empty()) out << " (" << c.note << ")";
    out << "\n";
}

HypothesisReport run_checks(const Problem& problem, const Config& c, std::ostream& out) {
    const auto report = check_hypotheses(problem, check_settings(c));
    out << "hypotheses: " << to_string(report.overall()) << "\n";
    print_condition(out, "(a)", report.a);
    for (std::size_t k = 0; k < report.b.size(); ++k) {
        print_condition(out, "(b) k=" + std::to_string(k + 1), report.b[k]);
        print_condition(out, "(c) k=" + std::to_string(k + 1), report.c[k]);
    }
    return report;
}

int cmd_validate(const Options& o, std::ostream& out) {
    const auto ctx = load(o);
    const Problem problem(ctx.config.problem, quadrature_config(ctx.config));
    const auto report = run_checks(problem, ctx.config, out);
    write_json(ctx.out_dir / "validate.json", {{"config_hash", ctx.config.hash}, {"hypotheses", report}});
    return verdict_exit(report.overall());
}

void print_gap(std::ostream& out, const ConstantBundle& b, const GapReport& g) {
    out.precision(12);
    out << "gamma " << b.gamma << "  eta1 " << b.eta1 << "  eta2 " << b.eta2 << "  eta3 " << b.eta3 << "  sigma "
        << b.sigma << "\n";
    out << "alpha " << g.alpha << "  beta " << g.beta << "  delta " << g.delta << (g.flagged ? "  [flagged]" : "")
        << (g.weak_duality_ok ? "" : "  [weak duality violated]") << "\n";
}

int cmd_gap(const Options& o, std::ostream& out) {
    const auto ctx = load(o);
    const auto& c = ctx.config;
    const Problem problem(c.problem, quadrature_config(c));
    const auto bundle = build_bundle(problem, bounds_settings(c));
    spdlog::info("constants: sigma {} R* {}", bundle.sigma, certified_radius(bundle, problem.n(), 0.0));
    auto gap = compute_delta(problem, bundle, gap_settings(c));
    auto constants = bundle;
    constants.delta = gap.delta;
    print_gap(out, constants, gap);
    write_json(ctx.out_dir / "gap.json",
               {{"config_hash", c.hash}, {"seed", c.solver.seed}, {"constants", constants}, {"gap", gap}});
    if (!gap.weak_duality_ok) return kExitInternal;
    return gap.flagged ? kExitRefuted : kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
    const auto ctx = load(o);
    const auto& c = ctx.config;
    const Problem problem(c.problem, quadrature_config(c));
    const auto report = run_checks(problem, c, out);
    if (report.overall() != Verdict::verified) return verdict_exit(report.overall());

    const auto bundle = build_bundle(problem, bounds_settings(c));
    const auto gap = compute_delta(problem, bundle, gap_settings(c));
    print_gap(out, bundle, gap);
    if (!gap.weak_duality_ok) return kExitInternal;
    if (gap.flagged) {
        out << "delta is not positive; nothing to solve\n";
        return kExitRefuted;
    }

    auto cert = solve(problem, bundle, gap, solve_settings(c));
    cert.config_hash = c.hash;
    cert.seed = c.solver.seed;
    json j = cert;
    j["generated_at"] = utc_timestamp();
    write_json(ctx.out_dir / "certificate.json", j);

    out << "mu_tilde " << fmt_vec(cert.mu_tilde.values()) << "  |mu_tilde| " << cert.mu_tilde.norm2() << "\n";
    for (const auto& p : cert.solutions) {
        out << "  " << to_string(p.kind) << "  x " << fmt_vec(p.x.values()) << "  J " << p.J << "  |grad| "
            << p.grad_norm << "\n";
    }
    out << "residual_max " << cert.residual_max << "\n";
    return kExitOk;
}

struct LoadedCertificate {
    MuVector mu;
    std::vector<CriticalPoint> points;
    GapReport gap;
    json raw;
};

LoadedCertificate load_certificate(const fs::path& path, const Config& c) {
    LoadedCertificate out;
    out.raw = load_json(path);
    try {
        const auto hash = out.raw.at("config_hash").get<std::string>();
        if (hash != c.hash) {
            throw PreconditionError(path.string() + ": config_hash " + hash + " does not match the config (" +
                                    c.hash + ")");
        }
        out.mu = out.raw.at("mu_tilde").get<MuVector>();
        out.points = out.raw.at("solutions").get<std::vector<CriticalPoint>>();
        out.gap = out.raw.at("gap").get<GapReport>();
    } catch (const json::exception& e) {
        throw PreconditionError(path.string() + ": malformed certificate: " + e.what());
    }
    if (out.mu.size() != c.problem.n) throw PreconditionError(path.string() + ": mu_tilde has the wrong dimension");
    return out;
}

fs::path input_path(const Options& o, const Context& ctx) {
    return o.input ? fs::path(*o.input) : ctx.out_dir / "certificate.json";
}

int cmd_certify(const Options& o, std::ostream& out) {
    const auto ctx = load(o);
    const auto& c = ctx.config;
    const Problem problem(c.problem, quadrature_config(c));
    const auto loaded = load_certificate(input_path(o, ctx), c);
    const auto bundle = build_bundle(problem, bounds_settings(c));
    auto settings = solve_settings(c);
    auto cert = certify(problem, bundle, loaded.gap, loaded.mu, loaded.points, settings);
    cert.config_hash = c.hash;
    cert.seed = loaded.raw.value("seed", c.solver.seed);
    cert.search_rounds = loaded.raw.value("search_rounds", 0);
    json j = cert;
    j["generated_at"] = utc_timestamp();
    write_json(ctx.out_dir / "certify.json", j);
    out << "certified: " << cert.solutions.size() << " points, residual_max " << cert.residual_max
        << " <= " << settings.cert_tol << "\n";
    return kExitOk;
}

// gamma R* at the level sum_k osc(G_k): contains every global minimiser of J_mu.
double default_box(const Problem& problem, const ConstantBundle& bundle, const Config& c) {
    if (c.oracle.box_radius) return *c.oracle.box_radius;
    const auto osc = oscillation_report(problem, 0.0, solve_settings(c));
    const double level = std::accumulate(osc.per_k.begin(), osc.per_k.end(), 0.0);
    return oracle_box_radius(bundle, problem.n(), level);
}

int cmd_oracle(const Options& o, std::ostream& out) {
    const auto ctx = load(o);
    const auto& c = ctx.config;
    const Problem problem(c.problem, quadrature_config(c));
    const int n = problem.n();
    if (n > 3) throw PreconditionError("oracle: brute force is limited to n <= 3");
    const auto bundle = build_bundle(problem, bounds_settings(c));
    const int ppd = c.oracle.points_per_dim;
    json report = {{"config_hash", c.hash}, {"points_per_dim", ppd}};
    out.precision(12);

    std::optional<LoadedCertificate> cert;
    if (o.input) cert = load_certificate(*o.input, c);
    const MuVector mu = cert ? cert->mu : MuVector::zeros(n);
    report["mu"] = mu;

    if (n <= 2) {
        const double box = c.oracle.box_radius.value_or(oracle_box_radius(bundle, n, 0.0));
        const auto grid = grid_gap(problem, bundle, box, ppd, c.oracle.mu_points_per_dim, c.solver.jobs);
        const auto gap = compute_delta(problem, bundle, gap_settings(c));
        report["gap"] = {{"grid", grid},
                         {"solver", {{"alpha", gap.alpha}, {"beta", gap.beta}, {"delta", gap.delta}}},
                         {"box_radius", box},
                         {"alpha_diff", std::abs(grid.alpha - gap.alpha)},
                         {"beta_diff", std::abs(grid.beta - gap.beta)},
                         {"delta_diff", std::abs(grid.delta - gap.delta)}};
        out << "grid   alpha " << grid.alpha << "  beta " << grid.beta << "  delta " << grid.delta << "\n";
        out << "solver alpha " << gap.alpha << "  beta " << gap.beta << "  delta " << gap.delta << "\n";
    }

    const double box = default_box(problem, bundle, c);
    const auto gmin = grid_min(problem, mu, box, ppd, c.solver.tie_rel_tol, c.solver.jobs);
    report["grid_min"] = {
        {"x", gmin.x}, {"J", gmin.J}, {"argmins", gmin.argmins}, {"spacing", gmin.spacing}, {"box_radius", box}};
    out << "grid min J " << gmin.J << " at " << fmt_vec(gmin.x.values()) << "\n";

    const auto cells = grid_critical_points(problem, mu, box, ppd, c.solver.jobs);
    std::string csv;
    for (int k = 0; k < n; ++k) csv += "lo" + std::to_string(k + 1) + ",";
    for (int k = 0; k < n; ++k) csv += "hi" + std::to_string(k + 1) + (k + 1 < n ? "," : "\n");
    for (const auto& cell : cells) {
        std::ostringstream row;
        row.precision(17);
        for (int k = 0; k < n; ++k) row << cell.lo[k] << ",";
        for (int k = 0; k < n; ++k) row << cell.hi[k] << (k + 1 < n ? "," : "\n");
        csv += row.str();
    }
    write_file(ctx.out_dir / "critical_cells.csv", csv);
    report["critical_cells"] = cells.size();
    out << "critical cells " << cells.size() << "\n";

    if (cert) {
        json contained = json::array();
        bool all = true;
        for (const auto& p : cert->points) {
            const bool in = std::any_of(cells.begin(), cells.end(),
                                        [&](const GridCell& cell) { return cell.contains(p.x.values()); });
            contained.push_back(in);
            all = all && in;
        }
        report["certified_points_in_cells"] = contained;
        out << "certified points inside critical cells: " << (all ? "all" : "not all") << "\n";
    }
    write_json(ctx.out_dir / "oracle.json", report);
    return kExitOk;
}

int cmd_landscape(const Options& o, std::ostream& out) {
    const auto ctx = load(o);
    const auto& c = ctx.config;
    const Problem problem(c.problem, quadrature_config(c));
    const int n = problem.n();
    if (n > 3) throw PreconditionError("landscape: grids are limited to n <= 3");
    std::optional<LoadedCertificate> cert;
    if (o.input) cert = load_certificate(*o.input, c);
    const MuVector mu = cert ? cert->mu : MuVector::zeros(n);
    double box = 0.0;
    if (c.oracle.box_radius) {
        box = *c.oracle.box_radius;
    } else {
        const auto bundle = build_bundle(problem, bounds_settings(c));
        box = default_box(problem, bundle, c);
    }
    const fs::path path = ctx.out_dir / "landscape.csv";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    write_landscape_csv(f, problem, mu, box, c.oracle.points_per_dim);
    out << "landscape: " << path.string() << "\n";
    return kExitOk;
}

}  // namespace

void configure_logging() {
    auto logger = spdlog::get("kdl");
    if (!logger) logger = spdlog::stderr_color_mt("kdl");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("KDL_LOG")) {
        const auto level = spdlog::level::from_str(env);
        if (level == spdlog::level::off && std::string(env) != "off") {
            spdlog::warn("KDL_LOG={} not recognised; keeping 'warn'", env);
        } else {
            spdlog::set_level(level);
        }
    }
}

int run_command(std::string_view name, const Options& options, std::ostream& out, std::ostream& err) {
    try {
        if (name == "validate") return cmd_validate(options, out);
        if (name == "gap") return cmd_gap(options, out);
        if (name == "solve") return cmd_solve(options, out);
        if (name == "certify") return cmd_certify(options, out);
        if (name == "oracle") return cmd_oracle(options, out);
        if (name == "landscape") return cmd_landscape(options, out);
        err << "kdl: unknown subcommand '" << name << "'\n";
        return kExitRefuted;
    } catch (const CertificationError& e) {
        err << "kdl: " << e.what() << "\n";
        return kExitInconclusive;
    } catch (const BudgetExhausted& e) {
        err << "kdl: budget exhausted: " << e.what() << "\n";
        return kExitBudget;
    } catch (const ConvergenceError& e) {
        err << "kdl: solver failed: " << e.what() << "\n";
        return kExitBudget;
    } catch (const PreconditionError& e) {
        err << "kdl: " << e.what() << "\n";
        return kExitRefuted;
    } catch (const DomainError& e) {
        err << "kdl: problem functions not defined everywhere: " << e.what() << "\n";
        return kExitRefuted;
    } catch (const std::exception& e) {
        err << "kdl: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace kdl::app
