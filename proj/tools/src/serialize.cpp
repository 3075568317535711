#include "kdl_app/serialize.hpp"

#include "kdl/error.hpp"

namespace kdl {

using nlohmann::json;

namespace {

json optional_exprs(const std::vector<std::optional<ExprFn>>& fs) {
    if (fs.empty()) return nullptr;
    json out = json::array();
    for (const auto& f : fs) out.push_back(f ? json(f->source()) : json(nullptr));
    return out;
}

}  // namespace

void to_json(json& j, const ConditionResult& c) {
    j = {{"verdict", std::string(to_string(c.verdict))}, {"note", c.note}, {"witness", c.witness}};
}

void to_json(json& j, const HypothesisReport& r) {
    j = {{"overall", std::string(to_string(r.overall()))}, {"a", r.a}, {"b", r.b}, {"c", r.c}};
}

void to_json(json& j, const ProblemSpec& p) {
    json f = json::array();
    json g = json::array();
    for (const auto& e : p.f) f.push_back(e.source());
    for (const auto& e : p.g) g.push_back(e.source());
    j = {
        {"n", p.n},
        {"K", p.K.source()},
        {"K_primitive", p.K_primitive ? json(p.K_primitive->source()) : json(nullptr)},
        {"f", f},
        {"f_primitive", optional_exprs(p.f_primitive)},
        {"g", g},
        {"g_primitive", optional_exprs(p.g_primitive)},
        {"r", p.r},
    };
}

void to_json(json& j, const ConstantBundle& b) {
    j = {
        {"gamma", b.gamma}, {"eta1", b.eta1}, {"eta2", b.eta2},   {"eta3", b.eta3},
        {"sigma", b.sigma}, {"r", b.r},       {"t_max", b.t_max}, {"delta", b.delta ? json(*b.delta) : json(nullptr)},
    };
}

void from_json(const json& j, ConstantBundle& b) {
    b.gamma = j.at("gamma").get<double>();
    b.eta1 = j.at("eta1").get<double>();
    b.eta2 = j.at("eta2").get<double>();
    b.eta3 = j.at("eta3").get<double>();
    b.sigma = j.at("sigma").get<double>();
    b.r = j.at("r").get<double>();
    b.t_max = j.at("t_max").get<double>();
    if (j.contains("delta") && !j.at("delta").is_null()) b.delta = j.at("delta").get<double>();
}

void to_json(json& j, const SolverStats& s) {
    j = {{"local_runs", s.local_runs}, {"converged_runs", s.converged_runs}, {"evaluations", s.evaluations}};
}

void to_json(json& j, const GapReport& g) {
    j = {
        {"alpha", g.alpha},
        {"beta", g.beta},
        {"delta", g.delta},
        {"alpha_minimizer", g.alpha_minimizer},
        {"beta_maximizer", g.beta_maximizer},
        {"flagged", g.flagged},
        {"weak_duality_ok", g.weak_duality_ok},
        {"ascent_iterations", g.ascent_iterations},
        {"alpha_stats", g.alpha_stats},
        {"beta_stats", g.beta_stats},
        {"caveats", g.caveats},
    };
}

void from_json(const json& j, GapReport& g) {
    g.alpha = j.at("alpha").get<double>();
    g.beta = j.at("beta").get<double>();
    g.delta = j.at("delta").get<double>();
    g.flagged = j.at("flagged").get<bool>();
    g.weak_duality_ok = j.at("weak_duality_ok").get<bool>();
    if (j.contains("alpha_minimizer")) g.alpha_minimizer = j.at("alpha_minimizer").get<StateVector>();
    if (j.contains("beta_maximizer")) g.beta_maximizer = j.at("beta_maximizer").get<MuVector>();
    if (j.contains("ascent_iterations")) g.ascent_iterations = j.at("ascent_iterations").get<int>();
    if (j.contains("caveats")) g.caveats = j.at("caveats").get<std::vector<std::string>>();
}

void to_json(json& j, const OscillationReport& o) {
    j = {{"per_k", o.per_k}, {"max", o.max}, {"budget", o.budget}};
}

void to_json(json& j, const CriticalPoint& p) {
    j = {
        {"x", p.x},
        {"J", p.J},
        {"grad_norm", p.grad_norm},
        {"kind", std::string(to_string(p.kind))},
        {"basin_id", p.basin_id},
    };
}

PointKind point_kind_from_string(const std::string& s) {
    if (s == "global_min") return PointKind::global_min;
    if (s == "local_min") return PointKind::local_min;
    if (s == "saddle_like") return PointKind::saddle_like;
    throw PreconditionError("unknown point kind '" + s + "'");
}

void from_json(const json& j, CriticalPoint& p) {
    p.x = j.at("x").get<StateVector>();
    p.J = j.at("J").get<double>();
    p.grad_norm = j.at("grad_norm").get<double>();
    p.kind = j.contains("kind") ? point_kind_from_string(j.at("kind").get<std::string>()) : PointKind::saddle_like;
    p.basin_id = j.value("basin_id", -1);
}

void to_json(json& j, const Certificate& c) {
    j = {
        {"problem", c.problem},
        {"constants", c.constants},
        {"gap", c.gap},
        {"oscillation", c.oscillation},
        {"mu_tilde", c.mu_tilde},
        {"mu_tilde_norm", c.mu_tilde.norm2()},
        {"solutions", c.solutions},
        {"residual_max", c.residual_max},
        {"tie", {{"score", c.tie_score}, {"tolerance", c.tie_tolerance}}},
        {"certified_radius", c.certified_radius},
        {"cert_tol", c.cert_tol},
        {"search_rounds", c.search_rounds},
        {"seed", c.seed},
        {"config_hash", c.config_hash},
        {"caveats", c.caveats},
    };
}

void to_json(json& j, const GridGapResult& g) {
    j = {{"alpha", g.alpha}, {"beta", g.beta}, {"delta", g.delta}, {"x_nodes", g.x_nodes}, {"mu_nodes", g.mu_nodes}};
}

}  // namespace kdl
