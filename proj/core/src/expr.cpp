#include "kdl/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>

#include "kdl/error.hpp"

namespace kdl {
namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

struct FuncInfo {
    std::string_view name;
    Func func;
    int arity;
};

constexpr std::array<FuncInfo, 10> kFunctions{{
    {"sin", Func::sin, 1},
    {"cos", Func::cos, 1},
    {"tan", Func::tan, 1},
    {"atan", Func::atan, 1},
    {"exp", Func::exp, 1},
    {"log", Func::log, 1},
    {"abs", Func::abs, 1},
    {"sqrt", Func::sqrt, 1},
    {"min", Func::min, 2},
    {"max", Func::max, 2},
}};

std::optional<FuncInfo> lookup(std::string_view name) {
    for (const auto& info : kFunctions) {
        if (info.name == name) return info;
    }
    return std::nullopt;
}

NodePtr make_number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::number;
    n->value = v;
    return n;
}

NodePtr make_node(ExprNode::Kind kind, std::vector<NodePtr> args) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->args = std::move(args);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse_all() {
        skip_ws();
        if (at_end()) throw ParseError("empty expression", pos_);
        auto node = expr();
        skip_ws();
        if (!at_end()) throw ParseError(unexpected(), pos_);
        return node;
    }

private:
    // expr := term { ('+' | '-') term }
    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                lhs = make_node(ExprNode::Kind::add, {lhs, term()});
            } else if (accept('-')) {
                lhs = make_node(ExprNode::Kind::sub, {lhs, term()});
            } else {
                return lhs;
            }
        }
    }

    // term := unary { ('*' | '/') unary }
    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                lhs = make_node(ExprNode::Kind::mul, {lhs, unary()});
            } else if (accept('/')) {
                lhs = make_node(ExprNode::Kind::div, {lhs, unary()});
            } else {
                return lhs;
            }
        }
    }

    // unary := ('-' | '+') unary | power
    NodePtr unary() {
        skip_ws();
        if (accept('-')) return make_node(ExprNode::Kind::negate, {unary()});
        if (accept('+')) return unary();
        return power();
    }

    // power := primary [ '^' integer ]
    NodePtr power() {
        auto base = primary();
        skip_ws();
        if (!accept('^')) return base;
        skip_ws();
        const std::size_t start = pos_;
        bool negative = false;
        if (accept('-')) {
            negative = true;
        } else {
            accept('+');
        }
        const std::size_t digits_begin = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (digits_begin == pos_) {
            throw ParseError("exponent must be an integer literal", start);
        }
        int k = 0;
        const auto [ptr, ec] = std::from_chars(src_.data() + digits_begin, src_.data() + pos_, k);
        if (ec != std::errc{}) throw ParseError("exponent out of range", digits_begin);
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprNode::Kind::pow;
        node->exponent = negative ? -k : k;
        node->args = {base};
        return node;
    }

    // primary := number | 't' | ident '(' expr { ',' expr } ')' | '(' expr ')'
    NodePtr primary() {
        skip_ws();
        if (at_end()) throw ParseError("unexpected end of expression", pos_);
        const char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (accept('(')) {
            auto inner = expr();
            skip_ws();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        throw ParseError(unexpected(), pos_);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
        if (!at_end() && (peek() == 'e' || peek() == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            }
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc{} || ptr != src_.data() + pos_) {
            throw ParseError("malformed number", start);
        }
        if (!std::isfinite(v)) throw ParseError("number out of range", start);
        return make_number(v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "t") {
            auto n = std::make_shared<ExprNode>();
            n->kind = ExprNode::Kind::variable;
            return n;
        }
        const auto info = lookup(name);
        if (!info) throw ParseError("unknown identifier '" + std::string(name) + "'", start);
        skip_ws();
        if (!accept('(')) {
            throw ParseError("function '" + std::string(name) + "' must be called", pos_);
        }
        std::vector<NodePtr> args;
        skip_ws();
        if (!accept(')')) {
            for (;;) {
                args.push_back(expr());
                skip_ws();
                if (accept(',')) continue;
                if (accept(')')) break;
                throw ParseError("expected ',' or ')'", pos_);
            }
        }
        if (static_cast<int>(args.size()) != info->arity) {
            throw ParseError("function '" + std::string(name) + "' takes " +
                                 std::to_string(info->arity) + " argument(s), got " +
                                 std::to_string(args.size()),
                             start);
        }
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::call;
        n->func = info->func;
        n->args = std::move(args);
        return n;
    }

    std::string unexpected() const {
        if (at_end()) return "unexpected end of expression";
        return std::string("unexpected '") + peek() + "'";
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }
    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }
    bool accept(char c) {
        if (!at_end() && peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

double ipow(double base, int k) {
    if (k < 0) {
        if (base == 0.0) throw DomainError("division by zero in negative power");
        return 1.0 / ipow(base, -k);
    }
    double result = 1.0;
    unsigned e = static_cast<unsigned>(k);
    while (e != 0) {
        if (e & 1U) result *= base;
        base *= base;
        e >>= 1U;
    }
    return result;
}

double eval_node(const ExprNode& n, double t) {
    using K = ExprNode::Kind;
    switch (n.kind) {
        case K::number:
            return n.value;
        case K::variable:
            return t;
        case K::negate:
            return -eval_node(*n.args[0], t);
        case K::add:
            return checked(eval_node(*n.args[0], t) + eval_node(*n.args[1], t), "addition");
        case K::sub:
            return checked(eval_node(*n.args[0], t) - eval_node(*n.args[1], t), "subtraction");
        case K::mul:
            return checked(eval_node(*n.args[0], t) * eval_node(*n.args[1], t), "multiplication");
        case K::div: {
            const double num = eval_node(*n.args[0], t);
            const double den = eval_node(*n.args[1], t);
            if (den == 0.0) throw DomainError("division by zero");
            return checked(num / den, "division");
        }
        case K::pow:
            return checked(ipow(eval_node(*n.args[0], t), n.exponent), "power");
        case K::call: {
            const double a = eval_node(*n.args[0], t);
            switch (n.func) {
                case Func::sin: return std::sin(a);
                case Func::cos: return std::cos(a);
                case Func::tan: return checked(std::tan(a), "tan");
                case Func::atan: return std::atan(a);
                case Func::exp: return checked(std::exp(a), "exp");
                case Func::log:
                    if (a <= 0.0) throw DomainError("log of non-positive argument");
                    return std::log(a);
                case Func::abs: return std::abs(a);
                case Func::sqrt:
                    if (a < 0.0) throw DomainError("sqrt of negative argument");
                    return std::sqrt(a);
                case Func::min: return std::min(a, eval_node(*n.args[1], t));
                case Func::max: return std::max(a, eval_node(*n.args[1], t));
            }
            break;
        }
    }
    throw DomainError("corrupt expression tree");
}

void render(const ExprNode& n, std::string& out) {
    using K = ExprNode::Kind;
    auto binary = [&](const char* op) {
        out += '(';
        render(*n.args[0], out);
        out += op;
        render(*n.args[1], out);
        out += ')';
    };
    switch (n.kind) {
        case K::number: {
            std::array<char, 64> buf{};
            const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
            out.append(buf.data(), res.ptr);
            return;
        }
        case K::variable:
            out += 't';
            return;
        case K::negate:
            out += "(-";
            render(*n.args[0], out);
            out += ')';
            return;
        case K::add: binary(" + "); return;
        case K::sub: binary(" - "); return;
        case K::mul: binary(" * "); return;
        case K::div: binary(" / "); return;
        case K::pow:
            out += '(';
            render(*n.args[0], out);
            out += '^';
            out += std::to_string(n.exponent);
            out += ')';
            return;
        case K::call:
            out += func_name(n.func);
            out += '(';
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i != 0) out += ", ";
                render(*n.args[i], out);
            }
            out += ')';
            return;
    }
}

bool equal_nodes(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    switch (a.kind) {
        case ExprNode::Kind::number:
            if (a.value != b.value) return false;
            break;
        case ExprNode::Kind::pow:
            if (a.exponent != b.exponent) return false;
            break;
        case ExprNode::Kind::call:
            if (a.func != b.func) return false;
            break;
        default:
            break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!equal_nodes(*a.args[i], *b.args[i])) return false;
    }
    return true;
}

}  // namespace

std::string_view func_name(Func f) noexcept {
    for (const auto& info : kFunctions) {
        if (info.func == f) return info.name;
    }
    return "?";
}

int func_arity(Func f) noexcept {
    for (const auto& info : kFunctions) {
        if (info.func == f) return info.arity;
    }
    return 0;
}

ExprFn ExprFn::parse(std::string_view source) {
    Parser parser(source);
    auto root = parser.parse_all();
    return ExprFn(std::string(source), std::move(root));
}

double ExprFn::operator()(double t) const {
    if (!std::isfinite(t)) throw DomainError("non-finite argument");
    return eval_node(*root_, t);
}

std::string ExprFn::to_string() const {
    std::string out;
    render(*root_, out);
    return out;
}

bool operator==(const ExprFn& lhs, const ExprFn& rhs) {
    return equal_nodes(*lhs.root_, *rhs.root_);
}

}  // namespace kdl
