#include "kdl_app/config.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "kdl/error.hpp"

namespace kdl::app {
namespace {

using nlohmann::json;

// Reads one JSON object field by field and rejects whatever is left over.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where(), "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const json* take(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) return nullptr;
        return &j_.at(key);
    }

    double number(const std::string& key, double fallback, double lo, double hi) {
        const json* v = take(key);
        if (v == nullptr) return fallback;
        return as_number(*v, key, lo, hi);
    }

    std::optional<double> optional_number(const std::string& key, double lo, double hi) {
        const json* v = take(key);
        if (v == nullptr || v->is_null()) return std::nullopt;
        return as_number(*v, key, lo, hi);
    }

    long long integer(const std::string& key, long long fallback, long long lo, long long hi) {
        const json* v = take(key);
        if (v == nullptr) return fallback;
        if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
        const bool too_big =
            v->is_number_unsigned() && v->get<unsigned long long>() > static_cast<unsigned long long>(hi);
        const long long x = too_big ? hi : v->get<long long>();
        if (too_big || x < lo || x > hi) {
            throw ConfigError(field(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        return x;
    }

    std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
        const json* v = take(key);
        if (v == nullptr) return fallback;
        const bool non_negative = v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0);
        if (!non_negative) throw ConfigError(field(key), "expected a non-negative integer");
        return v->get<std::uint64_t>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = take(key);
        if (v == nullptr) return fallback;
        if (!v->is_string()) throw ConfigError(field(key), "expected a string");
        return v->get<std::string>();
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) throw ConfigError(field(key), "unknown key");
        }
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    std::string where() const { return path_.empty() ? "<root>" : path_; }

private:
    double as_number(const json& v, const std::string& key, double lo, double hi) const {
        if (!v.is_number()) throw ConfigError(field(key), "expected a number");
        const double x = v.get<double>();
        if (!(x >= lo && x <= hi)) {
            std::ostringstream msg;
            msg << "must lie in [" << lo << ", " << hi << "]";
            throw ConfigError(field(key), msg.str());
        }
        return x;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

ExprFn expression(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected an expression string");
    try {
        return ExprFn::parse(v.get<std::string>());
    } catch (const ParseError& e) {
        throw ConfigError(path, e.what());
    }
}

// A single expression applies to every k; a list must have n entries.
std::vector<ExprFn> expression_list(const json& v, const std::string& path, int n) {
    if (v.is_string()) return std::vector<ExprFn>(n, expression(v, path));
    if (!v.is_array()) throw ConfigError(path, "expected an expression string or a list of them");
    if (v.size() != static_cast<std::size_t>(n)) {
        throw ConfigError(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
    }
    std::vector<ExprFn> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(expression(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::optional<ExprFn>> primitive_list(const json* v, const std::string& path, int n) {
    std::vector<std::optional<ExprFn>> out;
    if (v == nullptr || v->is_null()) return out;
    if (v->is_string()) {
        out.assign(n, expression(*v, path));
        return out;
    }
    if (!v->is_array()) throw ConfigError(path, "expected an expression string, null or a list");
    if (v->size() != static_cast<std::size_t>(n)) {
        throw ConfigError(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(v->size()));
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
        const auto& e = (*v)[i];
        if (e.is_null()) {
            out.emplace_back();
        } else {
            out.emplace_back(expression(e, path + "[" + std::to_string(i) + "]"));
        }
    }
    return out;
}

json sources(const std::vector<ExprFn>& fs) {
    json out = json::array();
    for (const auto& f : fs) out.push_back(f.source());
    return out;
}

json sources(const std::vector<std::optional<ExprFn>>& fs) {
    if (fs.empty()) return nullptr;
    json out = json::array();
    for (const auto& f : fs) out.push_back(f ? json(f->source()) : json(nullptr));
    return out;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json normalize(const Config& c) {
    const auto& p = c.problem;
    json j;
    j["problem"] = {
        {"n", p.n},
        {"K", p.K.source()},
        {"K_primitive", p.K_primitive ? json(p.K_primitive->source()) : json(nullptr)},
        {"f", sources(p.f)},
        {"f_primitive", sources(p.f_primitive)},
        {"g", sources(p.g)},
        {"g_primitive", sources(p.g_primitive)},
        {"r", p.r},
    };
    const auto& k = c.constants;
    j["constants"] = {
        {"eta1_target", optional_json(k.eta1_target)}, {"eta3_safety", k.eta3_safety},
        {"sigma_margin", k.sigma_margin},              {"t_max", k.t_max},
        {"samples", k.samples},                        {"odd_tol", k.odd_tol},
        {"oscillation_safety", k.oscillation_safety},
    };
    const auto& s = c.solver;
    j["solver"] = {
        {"seed", s.seed},
        {"starts", s.starts},
        {"quad_tol", s.quad_tol},
        {"grad_tol", s.grad_tol},
        {"max_iter", s.max_iter},
        {"sweep", s.sweep},
        {"refine_points", s.refine_points},
        {"max_rounds", s.max_rounds},
        {"path_nodes", s.path_nodes},
        {"string_iterations", s.string_iterations},
        {"cert_tol", s.cert_tol},
        {"tie_rel_tol", s.tie_rel_tol},
        {"ascent_iterations", s.ascent_iterations},
        {"ascent_patience", s.ascent_patience},
        {"jobs", s.jobs},
    };
    j["oracle"] = {
        {"points_per_dim", c.oracle.points_per_dim},
        {"mu_points_per_dim", c.oracle.mu_points_per_dim},
        {"box_radius", optional_json(c.oracle.box_radius)},
    };
    j["output"] = {{"dir", c.output_dir}};
    return j;
}

constexpr double kHuge = std::numeric_limits<double>::max();

}  // namespace

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256: digest failed");
    }
    std::ostringstream hex;
    hex << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < length; ++i) hex << std::setw(2) << static_cast<int>(digest[i]);
    return hex.str();
}

Config parse_config(const json& doc) {
    Config c;
    Reader root(doc, "");

    const json* problem = root.take("problem");
    if (problem == nullptr) throw ConfigError("problem", "missing");
    {
        Reader r(*problem, "problem");
        const json* n = r.take("n");
        if (n == nullptr) throw ConfigError("problem.n", "missing");
        if (!n->is_number_integer() || n->get<long long>() < 1 || n->get<long long>() > 1000) {
            throw ConfigError("problem.n", "expected an integer in [1, 1000]");
        }
        auto& p = c.problem;
        p.n = n->get<int>();
        for (const char* key : {"K", "f", "g"}) {
            if (!r.has(key)) throw ConfigError(r.field(key), "missing");
        }
        p.K = expression(*r.take("K"), "problem.K");
        if (const json* kp = r.take("K_primitive"); kp != nullptr && !kp->is_null()) {
            p.K_primitive = expression(*kp, "problem.K_primitive");
        }
        p.f = expression_list(*r.take("f"), "problem.f", p.n);
        p.g = expression_list(*r.take("g"), "problem.g", p.n);
        p.f_primitive = primitive_list(r.take("f_primitive"), "problem.f_primitive", p.n);
        p.g_primitive = primitive_list(r.take("g_primitive"), "problem.g_primitive", p.n);
        if (!r.has("r")) throw ConfigError("problem.r", "missing");
        p.r = r.number("r", 1.0, std::numeric_limits<double>::min(), kHuge);
        r.finish();
    }

    if (const json* constants = root.take("constants")) {
        Reader r(*constants, "constants");
        auto& k = c.constants;
        k.eta1_target = r.optional_number("eta1_target", std::numeric_limits<double>::min(), kHuge);
        k.eta3_safety = r.number("eta3_safety", k.eta3_safety, 1.0, kHuge);
        k.sigma_margin = r.number("sigma_margin", k.sigma_margin, 1e-12, 1.0 - 1e-12);
        k.t_max = r.number("t_max", k.t_max, 1.0, 1e12);
        k.samples = static_cast<int>(r.integer("samples", k.samples, 16, 10'000'000));
        k.odd_tol = r.number("odd_tol", k.odd_tol, 0.0, kHuge);
        k.oscillation_safety = r.number("oscillation_safety", k.oscillation_safety, 1e-12, 1.0);
        r.finish();
    }

    if (const json* solver = root.take("solver")) {
        Reader r(*solver, "solver");
        auto& s = c.solver;
        s.seed = r.unsigned64("seed", s.seed);
        s.starts = static_cast<int>(r.integer("starts", s.starts, 1, 100000));
        s.quad_tol = r.number("quad_tol", s.quad_tol, 1e-15, 1e-2);
        s.grad_tol = r.number("grad_tol", s.grad_tol, 1e-15, 1e-2);
        s.max_iter = static_cast<int>(r.integer("max_iter", s.max_iter, 1, 100'000'000));
        s.sweep = static_cast<int>(r.integer("sweep", s.sweep, 0, 1'000'000));
        s.refine_points = static_cast<int>(r.integer("refine_points", s.refine_points, 1, 100000));
        s.max_rounds = static_cast<int>(r.integer("max_rounds", s.max_rounds, 0, 1'000'000));
        s.path_nodes = static_cast<int>(r.integer("path_nodes", s.path_nodes, 3, 10000));
        s.string_iterations = static_cast<int>(r.integer("string_iterations", s.string_iterations, 1, 10'000'000));
        s.cert_tol = r.number("cert_tol", s.cert_tol, 1e-15, 1.0);
        s.tie_rel_tol = r.number("tie_rel_tol", s.tie_rel_tol, 0.0, 1.0);
        s.ascent_iterations = static_cast<int>(r.integer("ascent_iterations", s.ascent_iterations, 1, 1'000'000));
        s.ascent_patience = static_cast<int>(r.integer("ascent_patience", s.ascent_patience, 1, 1'000'000));
        s.jobs = static_cast<unsigned>(r.integer("jobs", s.jobs, 0, 4096));
        r.finish();
    }

    if (const json* oracle = root.take("oracle")) {
        Reader r(*oracle, "oracle");
        auto& o = c.oracle;
        o.points_per_dim = static_cast<int>(r.integer("points_per_dim", o.points_per_dim, 1, 2001));
        o.mu_points_per_dim = static_cast<int>(r.integer("mu_points_per_dim", o.mu_points_per_dim, 1, 2001));
        if (o.mu_points_per_dim % 2 == 0) throw ConfigError("oracle.mu_points_per_dim", "must be odd");
        o.box_radius = r.optional_number("box_radius", std::numeric_limits<double>::min(), kHuge);
        r.finish();
    }

    if (const json* output = root.take("output")) {
        Reader r(*output, "output");
        c.output_dir = r.string("dir", c.output_dir);
        r.finish();
    }
    root.finish();

    try {
        c.problem.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError("problem", e.what());
    }

    c.normalized = normalize(c);
    json hashed = c.normalized;
    hashed["solver"].erase("jobs");
    hashed.erase("output");
    c.hash = sha256_hex(hashed.dump());
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

QuadratureConfig quadrature_config(const Config& c) {
    QuadratureConfig q;
    q.tol = c.solver.quad_tol;
    return q;
}

CheckSettings check_settings(const Config& c) {
    CheckSettings s;
    s.t_max = c.constants.t_max;
    s.samples = c.constants.samples;
    s.odd_tol = c.constants.odd_tol;
    return s;
}

BoundsSettings bounds_settings(const Config& c) {
    BoundsSettings s;
    s.eta1_target = c.constants.eta1_target;
    s.eta3_safety = c.constants.eta3_safety;
    s.sigma_margin = c.constants.sigma_margin;
    s.t_max = c.constants.t_max;
    s.samples = c.constants.samples;
    return s;
}

namespace {

LocalSettings local_settings(const Config& c) {
    LocalSettings l;
    l.grad_tol = c.solver.grad_tol;
    l.max_iter = c.solver.max_iter;
    return l;
}

}  // namespace

GapSettings gap_settings(const Config& c) {
    GapSettings s;
    s.starts = c.solver.starts;
    s.seed = c.solver.seed;
    s.local = local_settings(c);
    s.ascent_iterations = c.solver.ascent_iterations;
    s.ascent_patience = c.solver.ascent_patience;
    s.jobs = c.solver.jobs;
    return s;
}

SolveSettings solve_settings(const Config& c) {
    SolveSettings s;
    s.starts = c.solver.starts;
    s.seed = c.solver.seed;
    s.local = local_settings(c);
    s.jobs = c.solver.jobs;
    s.sweep_points = c.solver.sweep;
    s.refine_points = c.solver.refine_points;
    s.max_rounds = c.solver.max_rounds;
    s.tie_rel_tol = c.solver.tie_rel_tol;
    s.oscillation_safety = c.constants.oscillation_safety;
    s.cert_tol = c.solver.cert_tol;
    s.path_nodes = c.solver.path_nodes;
    s.string_iterations = c.solver.string_iterations;
    s.t_max = c.constants.t_max;
    s.samples = c.constants.samples;
    return s;
}

}  // namespace kdl::app
