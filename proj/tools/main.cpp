#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kdl_app/commands.hpp"

int main(int argc, char** argv) {
    kdl::app::configure_logging();

    CLI::App app{"Three-solution finder for discrete nonlocal Kirchhoff problems", "kdl"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "kdl 0.1.0");

    kdl::app::Options options;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
    std::string out;
    double tol = 0.0;
    std::string input;
    int points = 0;

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"validate", "check the hypotheses on K and f_k (exit 0 verified, 2 refuted, 3 inconclusive)"},
        {"gap", "estimate alpha, beta and the minimax gap delta"},
        {"solve", "search mu_tilde, three critical points and write certificate.json"},
        {"certify", "re-check a certificate (--input) against the config"},
        {"oracle", "brute-force grid comparison (n <= 3) and critical_cells.csv"},
        {"landscape", "write landscape.csv with J on a tensor grid (n <= 3)"},
    };
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", options.config, "problem config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "seed override (default: solver.seed, else 0)");
        sub->add_option("--jobs", jobs, "worker threads (0: available parallelism)");
        sub->add_option("--out", out, "output directory (default: output.dir)");
        sub->add_option("--tol", tol, "certification tolerance for residuals (default: solver.cert_tol)");
        if (std::string(s.name) == "certify" || std::string(s.name) == "oracle" ||
            std::string(s.name) == "landscape") {
            sub->add_option("--input", input, "certificate JSON produced by solve");
        }
        if (std::string(s.name) == "oracle" || std::string(s.name) == "landscape") {
            sub->add_option("--points", points, "grid points per dimension (1..2001)");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kdl::app::kExitRefuted;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed") > 0) options.seed = seed;
    if (sub->count("--jobs") > 0) options.jobs = jobs;
    if (sub->count("--out") > 0) options.out = out;
    if (sub->count("--tol") > 0) options.tol = tol;
    if (sub->get_option_no_throw("--input") != nullptr && sub->count("--input") > 0) options.input = input;
    if (sub->get_option_no_throw("--points") != nullptr && sub->count("--points") > 0) options.points_per_dim = points;

    return kdl::app::run_command(sub->get_name(), options, std::cout, std::cerr);
}
