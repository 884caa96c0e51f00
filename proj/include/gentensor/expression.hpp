#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "gentensor/chart.hpp"
#include "gentensor/dual.hpp"

namespace gentensor {

/// Parsed arithmetic expression over named variables (default x1..xn).
/// Supported: + - * / ^, unary minus, parentheses, exp sin cos tanh log sqrt
/// abs, numeric literals, pi.
class Expression {
public:
    enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Fun };
    enum class Fn { Exp, Sin, Cos, Tanh, Log, Sqrt, Abs };

    struct Node {
        Kind kind;
        double cval = 0.0;
        int var = -1;
        Fn fn = Fn::Exp;
        int a = -1, b = -1;  // child indices
    };

    Expression() = default;

    static Expression parse(const std::string& text, const std::vector<std::string>& vars);
    static Expression parse(const std::string& text, int nvars) {
        std::vector<std::string> names;
        for (int i = 1; i <= nvars; ++i) names.push_back("x" + std::to_string(i));
        return parse(text, names);
    }

    int nvars() const { return nvars_; }
    const std::string& text() const { return text_; }

    template <class T>
    T eval(const std::vector<T>& x) const {
        return eval_node<T>(root_, x);
    }
    double operator()(const Vec& x) const {
        std::vector<double> v(x.data(), x.data() + x.size());
        return eval(v);
    }

private:
    std::vector<Node> nodes_;
    int root_ = -1;
    int nvars_ = 0;
    std::string text_;

    template <class T>
    T eval_node(int id, const std::vector<T>& x) const {
        const Node& nd = nodes_[id];
        switch (nd.kind) {
            case Kind::Const: return T(nd.cval);
            case Kind::Var: return x[nd.var];
            case Kind::Add: return eval_node<T>(nd.a, x) + eval_node<T>(nd.b, x);
            case Kind::Sub: return eval_node<T>(nd.a, x) - eval_node<T>(nd.b, x);
            case Kind::Mul: return eval_node<T>(nd.a, x) * eval_node<T>(nd.b, x);
            case Kind::Div: return eval_node<T>(nd.a, x) / eval_node<T>(nd.b, x);
            case Kind::Neg: return T(-1.0) * eval_node<T>(nd.a, x);
            case Kind::Pow: {
                // exponent restricted to constants at parse time
                return pow_scalar(eval_node<T>(nd.a, x), nodes_[nd.b].cval);
            }
            case Kind::Fun: {
                T u = eval_node<T>(nd.a, x);
                switch (nd.fn) {
                    case Fn::Exp: return exp(u);
                    case Fn::Sin: return sin(u);
                    case Fn::Cos: return cos(u);
                    case Fn::Tanh: return tanh(u);
                    case Fn::Log: return log(u);
                    case Fn::Sqrt: return sqrt(u);
                    case Fn::Abs: return abs_smooth(u);
                }
            }
        }
        throw Error("Expression: corrupt node");
    }

    // --- recursive-descent parser ---
    struct Parser {
        const std::string& s;
        size_t i = 0;
        Expression& e;
        const std::vector<std::string>& vars;

        void skip() {
            while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        }
        bool eat(char c) {
            skip();
            if (i < s.size() && s[i] == c) {
                ++i;
                return true;
            }
            return false;
        }
        [[noreturn]] void fail(const std::string& msg) const {
            throw Error("Expression parse error at position " + std::to_string(i) + ": " +
                        msg + " in \"" + s + "\"");
        }
        int push(Node nd) {
            e.nodes_.push_back(nd);
            return static_cast<int>(e.nodes_.size()) - 1;
        }
        int expr() {
            int a = term();
            for (;;) {
                skip();
                if (eat('+'))
                    a = push({Kind::Add, 0, -1, Fn::Exp, a, term()});
                else if (eat('-'))
                    a = push({Kind::Sub, 0, -1, Fn::Exp, a, term()});
                else
                    return a;
            }
        }
        int term() {
            int a = factor();
            for (;;) {
                skip();
                if (eat('*'))
                    a = push({Kind::Mul, 0, -1, Fn::Exp, a, factor()});
                else if (eat('/'))
                    a = push({Kind::Div, 0, -1, Fn::Exp, a, factor()});
                else
                    return a;
            }
        }
        int factor() {
            skip();
            if (eat('-')) return push({Kind::Neg, 0, -1, Fn::Exp, factor(), -1});
            int a = atom();
            skip();
            if (eat('^')) {
                skip();
                bool neg = eat('-');
                int b = atom();
                if (e.nodes_[b].kind != Kind::Const)
                    fail("exponent must be a numeric constant");
                if (neg) e.nodes_[b].cval = -e.nodes_[b].cval;
                a = push({Kind::Pow, 0, -1, Fn::Exp, a, b});
            }
            return a;
        }
        int atom() {
            skip();
            if (i >= s.size()) fail("unexpected end of input");
            if (eat('(')) {
                int a = expr();
                if (!eat(')')) fail("expected ')'");
                return a;
            }
            char c = s[i];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                size_t end;
                double v = std::stod(s.substr(i), &end);
                i += end;
                return push({Kind::Const, v, -1, Fn::Exp, -1, -1});
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                size_t j = i;
                while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                                        s[j] == '_'))
                    ++j;
                std::string name = s.substr(i, j - i);
                i = j;
                if (name == "pi")
                    return push({Kind::Const, M_PI, -1, Fn::Exp, -1, -1});
                for (size_t k = 0; k < vars.size(); ++k)
                    if (vars[k] == name)
                        return push({Kind::Var, 0, static_cast<int>(k), Fn::Exp, -1, -1});
                Fn fn;
                if (name == "exp") fn = Fn::Exp;
                else if (name == "sin") fn = Fn::Sin;
                else if (name == "cos") fn = Fn::Cos;
                else if (name == "tanh") fn = Fn::Tanh;
                else if (name == "log") fn = Fn::Log;
                else if (name == "sqrt") fn = Fn::Sqrt;
                else if (name == "abs") fn = Fn::Abs;
                else fail("unknown identifier '" + name + "'");
                if (!eat('(')) fail("expected '(' after function name");
                int a = expr();
                if (!eat(')')) fail("expected ')'");
                return push({Kind::Fun, 0, -1, fn, a, -1});
            }
            fail(std::string("unexpected character '") + c + "'");
        }
    };
};

inline Expression Expression::parse(const std::string& text,
                                    const std::vector<std::string>& vars) {
    Expression e;
    e.nvars_ = static_cast<int>(vars.size());
    e.text_ = text;
    Parser p{text, 0, e, vars};
    e.root_ = p.expr();
    p.skip();
    if (p.i != text.size()) p.fail("trailing input");
    return e;
}

}  // namespace gentensor
