#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kdl/expr.hpp"
#include "kdl/quadrature.hpp"

namespace kdl {

/// Fixed-size real vector tagged with its role so that states and
/// multipliers cannot be mixed up at call sites. Entries are always finite.
template <class Tag>
class TaggedVector {
public:
    TaggedVector() = default;
    explicit TaggedVector(Eigen::VectorXd values) : values_(std::move(values)) {
        if (!values_.allFinite()) throw PreconditionError("vector entries must be finite");
    }
    TaggedVector(std::initializer_list<double> values)
        : TaggedVector(Eigen::Map<const Eigen::VectorXd>(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

    static TaggedVector zeros(int n) { return TaggedVector(Eigen::VectorXd::Zero(n)); }

    int size() const noexcept { return static_cast<int>(values_.size()); }
    double operator[](int k) const { return values_[k]; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    double norm2() const { return values_.norm(); }

    TaggedVector operator-() const { return TaggedVector(Eigen::VectorXd(-values_)); }

    friend bool operator==(const TaggedVector& a, const TaggedVector& b) {
        return a.values_.size() == b.values_.size() && a.values_ == b.values_;
    }

private:
    Eigen::VectorXd values_;
};

/// Interior values x_1..x_n; the boundary values x_0 = x_{n+1} = 0 are implicit.
using StateVector = TaggedVector<struct StateTag>;
/// Multiplier vector mu in R^n.
using MuVector = TaggedVector<struct MuTag>;

/// User-facing description of a discrete Kirchhoff problem.
struct ProblemSpec {
    int n = 1;
    ExprFn K = ExprFn::parse("2*t - 1");
    std::vector<ExprFn> f;
    std::vector<ExprFn> g;
    double r = 1.0;
    std::optional<ExprFn> K_primitive;
    std::vector<std::optional<ExprFn>> f_primitive;  // empty or n entries
    std::vector<std::optional<ExprFn>> g_primitive;  // empty or n entries

    /// Throws PreconditionError unless n >= 1, r > 0 and the lists have n entries.
    void validate() const;
};

/// A validated problem with its primitives t -> int_0^t ready for evaluation.
class Problem {
public:
    explicit Problem(ProblemSpec spec, QuadratureConfig quadrature = {});

    int n() const noexcept { return spec_.n; }
    const ProblemSpec& spec() const noexcept { return spec_; }
    const QuadratureConfig& quadrature() const noexcept { return quadrature_; }

    double K(double t) const { return spec_.K(t); }
    double f(int k, double t) const { return spec_.f[k](t); }
    double g(int k, double t) const { return spec_.g[k](t); }

    /// int_0^t K(s) ds
    double K_primitive(double t) const { return K_prim_(t); }
    /// int_0^t f_k(s) ds
    double F(int k, double t) const { return F_[k](t); }
    /// int_0^t g_k(s) ds
    double G(int k, double t) const { return G_[k](t); }

    const Primitive& K_primitive_fn() const noexcept { return K_prim_; }
    std::span<const Primitive> F_fns() const noexcept { return F_; }
    std::span<const Primitive> G_fns() const noexcept { return G_; }

    /// Same problem with a different quadrature configuration.
    Problem with_quadrature(QuadratureConfig quadrature) const { return Problem(spec_, quadrature); }

private:
    ProblemSpec spec_;
    QuadratureConfig quadrature_;
    Primitive K_prim_;
    std::vector<Primitive> F_;
    std::vector<Primitive> G_;
};

/// Canonical family K(t) = a t + b with f_k = 1/(1+t^2) and g_k = eps cos(t),
/// closed-form primitives attached.
ProblemSpec canonical_spec(int n, double a = 2.0, double b = -1.0, double eps = 0.0, double r = 1.0);

// ---------------------------------------------------------------------------
// Hypothesis checks
// ---------------------------------------------------------------------------

enum class Verdict { verified, refuted, inconclusive };

std::string_view to_string(Verdict v) noexcept;

struct ConditionResult {
    Verdict verdict = Verdict::inconclusive;
    std::string note;
    /// Named numerical witnesses (e.g. "t", "integral", "ratio").
    std::map<std::string, double> witness;
};

struct HypothesisReport {
    ConditionResult a;
    std::vector<ConditionResult> b;  // one per f_k
    std::vector<ConditionResult> c;  // one per f_k

    /// refuted if any clause is refuted, else inconclusive if any is, else verified.
    Verdict overall() const;
};

struct CheckSettings {
    double t_max = 1e3;
    int samples = 10000;
    double odd_tol = 1e-8;
};

/// Condition (a): int_0^t K < 0 for some t > 0 and liminf int_0^t K / t > 0.
///
/// The first clause is decided on `samples` log-spaced points of (0, t_max]
/// and the best sample is refined by golden section. The liminf is estimated
/// over the last decade [t_max/10, t_max]: if the ratio is non-decreasing
/// there its final value is taken, otherwise its minimum. A positive estimate
/// verifies; a non-positive one is inconclusive. witness["tail_lower_bound"]
/// always carries the estimate.
ConditionResult check_condition_a(const Primitive& K_primitive, double t_max = 1e3, int samples = 10000);
ConditionResult check_condition_a(const ExprFn& K, double t_max = 1e3, int samples = 10000);

/// Condition (b): limsup |F_k(t)| / t^2 < infinity, judged on the trend of
/// the ratio over the last two decades of |t| in [1, t_max].
ConditionResult check_condition_b(const Primitive& F, double t_max = 1e3, int samples = 10000);
ConditionResult check_condition_b(const ExprFn& f, double t_max = 1e3, int samples = 10000);

/// Condition (c): F_k odd and vanishing only at 0. Sampled heuristic; any
/// zero crossing on (0, t_max] is refined by bisection and reported.
ConditionResult check_condition_c(const Primitive& F, double t_max = 1e3, int samples = 10000,
                                  double odd_tol = 1e-8);
ConditionResult check_condition_c(const ExprFn& f, double t_max = 1e3, int samples = 10000,
                                  double odd_tol = 1e-8);

HypothesisReport check_hypotheses(const Problem& problem, const CheckSettings& settings = {});

}  // namespace kdl
