#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace kdl {

/// Built-in functions of the expression language.
enum class Func { sin, cos, tan, atan, exp, log, abs, sqrt, min, max };

/// Immutable node of a parsed expression tree.
struct ExprNode {
    enum class Kind { number, variable, negate, add, sub, mul, div, pow, call };

    Kind kind = Kind::number;
    double value = 0.0;  // number literal
    int exponent = 0;    // pow
    Func func = Func::sin;  // call
    std::vector<std::shared_ptr<const ExprNode>> args;
};

/// A scalar function of the single variable `t`, parsed from a small
/// arithmetic language (see docs/expression_grammar.md).
///
/// Instances are immutable and cheap to copy; evaluation is pure and may be
/// called concurrently.
class ExprFn {
public:
    /// Parses `source`. Throws ParseError (with byte offset) on malformed
    /// input, unknown identifiers and wrong function arity.
    static ExprFn parse(std::string_view source);

    /// Tree-walk evaluation. Throws DomainError instead of ever returning a
    /// non-finite value.
    double operator()(double t) const;
    double eval(double t) const { return (*this)(t); }

    const std::string& source() const noexcept { return source_; }
    const ExprNode& root() const noexcept { return *root_; }

    /// Canonical, fully parenthesised rendering. Parsing the result yields a
    /// tree equal to this one.
    std::string to_string() const;

    /// Structural equality of the trees (the source text is ignored).
    friend bool operator==(const ExprFn& lhs, const ExprFn& rhs);

private:
    ExprFn(std::string source, std::shared_ptr<const ExprNode> root)
        : source_(std::move(source)), root_(std::move(root)) {}

    std::string source_;
    std::shared_ptr<const ExprNode> root_;
};

inline ExprFn parse(std::string_view source) { return ExprFn::parse(source); }
inline double eval(const ExprFn& f, double t) { return f(t); }

std::string_view func_name(Func f) noexcept;
int func_arity(Func f) noexcept;

}  // namespace kdl
