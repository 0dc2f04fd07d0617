#include "sosreg/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace sosreg {

namespace {

Expr make(Op op, std::vector<Expr> args, double value = 0.0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = value;
    n->args = std::move(args);
    return n;
}

bool is_integer(double p) { return std::isfinite(p) && p == std::round(p) && std::fabs(p) < 1e9; }

double reduce_half_turns(double u) {
    // u mod 2, computed before multiplying by pi so integers give exact zeros
    double r = std::fmod(u, 2.0);
    if (r < 0) r += 2.0;
    return r;
}

double sinpi_value(double u) {
    double r = reduce_half_turns(u);
    if (r == 0.0 || r == 1.0) return 0.0;
    if (r == 0.5) return 1.0;
    if (r == 1.5) return -1.0;
    return std::sin(std::numbers::pi * r);
}

double cospi_value(double u) {
    double r = reduce_half_turns(u);
    if (r == 0.5 || r == 1.5) return 0.0;
    if (r == 0.0) return 1.0;
    if (r == 1.0) return -1.0;
    return std::cos(std::numbers::pi * r);
}

double pow_value(double a, double p) {
    if (is_integer(p)) return std::pow(a, static_cast<int>(p));
    return std::pow(a, p);
}

double apply(Op op, double value, double a, double b, double c) {
    switch (op) {
        case Op::Add: return a + b;
        case Op::Mul: return a * b;
        case Op::Div: return a / b;
        case Op::Neg: return -a;
        case Op::Pow: return pow_value(a, value);
        case Op::Exp: return std::exp(a);
        case Op::Log: return std::log(a);
        case Op::Sin: return std::sin(a);
        case Op::Cos: return std::cos(a);
        case Op::SinPi: return sinpi_value(a);
        case Op::CosPi: return cospi_value(a);
        case Op::Select: return a > 0.0 ? b : c;
        default: return value;
    }
}

}  // namespace

Expr constant(double v) { return make(Op::Const, {}, v); }

Expr variable(const std::string& name) {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->name = name;
    return n;
}

bool is_constant(const Expr& e, double* v) {
    if (e->op != Op::Const) return false;
    if (v) *v = e->value;
    return true;
}

Expr add(const Expr& a, const Expr& b) {
    double x, y;
    bool ca = is_constant(a, &x), cb = is_constant(b, &y);
    if (ca && cb) return constant(x + y);
    if (ca && x == 0.0) return b;
    if (cb && y == 0.0) return a;
    return make(Op::Add, {a, b});
}

Expr neg(const Expr& a) {
    double x;
    if (is_constant(a, &x)) return constant(-x);
    if (a->op == Op::Neg) return a->args[0];
    return make(Op::Neg, {a});
}

Expr sub(const Expr& a, const Expr& b) { return add(a, neg(b)); }

Expr mul(const Expr& a, const Expr& b) {
    double x, y;
    bool ca = is_constant(a, &x), cb = is_constant(b, &y);
    if (ca && cb) return constant(x * y);
    if ((ca && x == 0.0) || (cb && y == 0.0)) return constant(0.0);
    if (ca && x == 1.0) return b;
    if (cb && y == 1.0) return a;
    if (ca && x == -1.0) return neg(b);
    if (cb && y == -1.0) return neg(a);
    return make(Op::Mul, {a, b});
}

Expr div(const Expr& a, const Expr& b) {
    double x, y;
    bool ca = is_constant(a, &x), cb = is_constant(b, &y);
    if (ca && cb && y != 0.0) return constant(x / y);
    if (ca && x == 0.0) return constant(0.0);
    if (cb && y == 1.0) return a;
    return make(Op::Div, {a, b});
}

Expr pow(const Expr& a, double p) {
    double x;
    if (p == 0.0) return constant(1.0);
    if (p == 1.0) return a;
    if (is_constant(a, &x)) {
        double v = pow_value(x, p);
        if (std::isfinite(v)) return constant(v);
    }
    return make(Op::Pow, {a}, p);
}

namespace {

Expr unary(Op op, const Expr& a) {
    double x;
    if (is_constant(a, &x)) {
        double v = apply(op, 0.0, x, 0.0, 0.0);
        if (std::isfinite(v)) return constant(v);
    }
    return make(op, {a});
}

}  // namespace

Expr exp(const Expr& a) { return unary(Op::Exp, a); }
Expr log(const Expr& a) { return unary(Op::Log, a); }
Expr sin(const Expr& a) { return unary(Op::Sin, a); }
Expr cos(const Expr& a) { return unary(Op::Cos, a); }
Expr sinpi(const Expr& a) { return unary(Op::SinPi, a); }
Expr cospi(const Expr& a) { return unary(Op::CosPi, a); }

Expr select(const Expr& cond, const Expr& if_pos, const Expr& otherwise) {
    double c;
    if (is_constant(cond, &c)) return c > 0.0 ? if_pos : otherwise;
    if (structurally_equal(if_pos, otherwise)) return if_pos;
    return make(Op::Select, {cond, if_pos, otherwise});
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a == b) return true;
    if (a->op != b->op || a->args.size() != b->args.size()) return false;
    if (a->op == Op::Const || a->op == Op::Pow) {
        if (!(a->value == b->value || (std::isnan(a->value) && std::isnan(b->value)))) return false;
    }
    if (a->op == Op::Var && a->name != b->name) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!structurally_equal(a->args[i], b->args[i])) return false;
    return true;
}

bool contains_select(const Expr& e) {
    if (e->op == Op::Select) return true;
    return std::any_of(e->args.begin(), e->args.end(), contains_select);
}

namespace {

void collect_vars(const Expr& e, std::set<std::string>& out) {
    if (e->op == Op::Var) out.insert(e->name);
    for (const auto& c : e->args) collect_vars(c, out);
}

Expr rebuild(const Expr& e, std::vector<Expr> args) {
    switch (e->op) {
        case Op::Add: return add(args[0], args[1]);
        case Op::Mul: return mul(args[0], args[1]);
        case Op::Div: return div(args[0], args[1]);
        case Op::Neg: return neg(args[0]);
        case Op::Pow: return pow(args[0], e->value);
        case Op::Exp: return exp(args[0]);
        case Op::Log: return log(args[0]);
        case Op::Sin: return sin(args[0]);
        case Op::Cos: return cos(args[0]);
        case Op::SinPi: return sinpi(args[0]);
        case Op::CosPi: return cospi(args[0]);
        case Op::Select: return select(args[0], args[1], args[2]);
        default: return e;
    }
}

using DerivCache = std::unordered_map<const Node*, Expr>;

Expr diff(const Expr& e, const std::string& v, DerivCache& cache) {
    auto it = cache.find(e.get());
    if (it != cache.end()) return it->second;
    Expr r;
    const auto& a = e->args;
    switch (e->op) {
        case Op::Const: r = constant(0.0); break;
        case Op::Var: r = constant(e->name == v ? 1.0 : 0.0); break;
        case Op::Add: r = add(diff(a[0], v, cache), diff(a[1], v, cache)); break;
        case Op::Mul:
            r = add(mul(diff(a[0], v, cache), a[1]), mul(a[0], diff(a[1], v, cache)));
            break;
        case Op::Div: {
            Expr da = diff(a[0], v, cache), db = diff(a[1], v, cache);
            r = sub(div(da, a[1]), div(mul(a[0], db), pow(a[1], 2.0)));
            break;
        }
        case Op::Neg: r = neg(diff(a[0], v, cache)); break;
        case Op::Pow:
            r = mul(mul(constant(e->value), pow(a[0], e->value - 1.0)), diff(a[0], v, cache));
            break;
        case Op::Exp: r = mul(e, diff(a[0], v, cache)); break;
        case Op::Log: r = div(diff(a[0], v, cache), a[0]); break;
        case Op::Sin: r = mul(cos(a[0]), diff(a[0], v, cache)); break;
        case Op::Cos: r = neg(mul(sin(a[0]), diff(a[0], v, cache))); break;
        case Op::SinPi:
            r = mul(mul(constant(std::numbers::pi), cospi(a[0])), diff(a[0], v, cache));
            break;
        case Op::CosPi:
            r = neg(mul(mul(constant(std::numbers::pi), sinpi(a[0])), diff(a[0], v, cache)));
            break;
        case Op::Select:
            r = select(a[0], diff(a[1], v, cache), diff(a[2], v, cache));
            break;
    }
    cache.emplace(e.get(), r);
    return r;
}

}  // namespace

std::vector<std::string> free_variables(const Expr& e) {
    std::set<std::string> s;
    collect_vars(e, s);
    return {s.begin(), s.end()};
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
    if (e->op == Op::Var) {
        auto it = bindings.find(e->name);
        return it == bindings.end() ? e : it->second;
    }
    if (e->args.empty()) return e;
    std::vector<Expr> args;
    args.reserve(e->args.size());
    for (const auto& c : e->args) args.push_back(substitute(c, bindings));
    return rebuild(e, std::move(args));
}

std::size_t node_count(const Expr& e) {
    std::size_t n = 1;
    for (const auto& c : e->args) n += node_count(c);
    return n;
}

Expr differentiate(const Expr& e, const std::string& var, int order) {
    if (order < 0) throw PreconditionError("differentiate: negative order");
    if (order > 8) throw PreconditionError("differentiate: order above 8");
    Expr r = e;
    for (int k = 0; k < order; ++k) {
        DerivCache cache;
        r = diff(r, var, cache);
    }
    return r;
}

namespace {

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    // shortest representation that still round-trips
    for (int prec = 1; prec < 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            s = buf;
            break;
        }
    }
    return s;
}

// Precedence: 1 sum or leading minus, 2 product, 4 power, 5 atom.
int precedence(const Expr& e) {
    switch (e->op) {
        case Op::Add:
        case Op::Neg: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Pow: return 4;
        case Op::Const: return e->value < 0 ? 1 : 5;
        default: return 5;
    }
}

std::string print(const Expr& e);

std::string wrap(const Expr& e, int min_prec) {
    std::string s = print(e);
    return precedence(e) < min_prec ? "(" + s + ")" : s;
}

std::string call(const char* f, const Expr& e) { return std::string(f) + "(" + print(e->args[0]) + ")"; }

std::string print(const Expr& e) {
    const auto& a = e->args;
    switch (e->op) {
        case Op::Const: return number(e->value);
        case Op::Var: return e->name;
        case Op::Add: {
            const Expr& rhs = a[1];
            if (rhs->op == Op::Neg) return print(a[0]) + " - " + wrap(rhs->args[0], 2);
            if (rhs->op == Op::Const && rhs->value < 0) return print(a[0]) + " - " + number(-rhs->value);
            return print(a[0]) + " + " + wrap(rhs, 2);
        }
        case Op::Mul: return wrap(a[0], 2) + "*" + wrap(a[1], 3);
        case Op::Div: return wrap(a[0], 2) + "/" + wrap(a[1], 3);
        case Op::Neg: return "-" + wrap(a[0], 2);
        case Op::Pow: {
            std::string p = e->value < 0 ? "(" + number(e->value) + ")" : number(e->value);
            return wrap(a[0], 5) + "^" + p;
        }
        case Op::Exp: return call("exp", e);
        case Op::Log: return call("ln", e);
        case Op::Sin: return call("sin", e);
        case Op::Cos: return call("cos", e);
        case Op::SinPi: return call("sinpi", e);
        case Op::CosPi: return call("cospi", e);
        case Op::Select:
            return "ifpos(" + print(a[0]) + ", " + print(a[1]) + ", " + print(a[2]) + ")";
    }
    return "?";
}

}  // namespace

std::string to_string(const Expr& e) { return print(e); }

namespace {

double eval_rec(const Expr& e, const std::vector<std::string>& names, const Point& x) {
    switch (e->op) {
        case Op::Const: return e->value;
        case Op::Var: {
            for (std::size_t i = 0; i < names.size(); ++i)
                if (names[i] == e->name) return x.at(i);
            throw PreconditionError("evaluate: unbound variable '" + e->name + "'");
        }
        case Op::Select: {
            double c = eval_rec(e->args[0], names, x);
            return eval_rec(e->args[c > 0.0 ? 1 : 2], names, x);
        }
        default: break;
    }
    double a = eval_rec(e->args[0], names, x);
    double b = e->args.size() > 1 ? eval_rec(e->args[1], names, x) : 0.0;
    return apply(e->op, e->value, a, b, 0.0);
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

SignedLog log_rec(const Expr& e, const std::vector<std::string>& names, const Point& x) {
    const auto& a = e->args;
    switch (e->op) {
        case Op::Exp: return SignedLog{eval_rec(a[0], names, x), 1};
        case Op::Mul: {
            SignedLog l = log_rec(a[0], names, x), r = log_rec(a[1], names, x);
            if (l.sign == 0 || r.sign == 0) return SignedLog{};
            return SignedLog{l.log_abs + r.log_abs, l.sign * r.sign};
        }
        case Op::Div: {
            SignedLog l = log_rec(a[0], names, x), r = log_rec(a[1], names, x);
            if (l.sign == 0) return SignedLog{};
            return SignedLog{l.log_abs - r.log_abs, l.sign * r.sign};
        }
        case Op::Neg: {
            SignedLog l = log_rec(a[0], names, x);
            return SignedLog{l.log_abs, -l.sign};
        }
        case Op::Pow: {
            SignedLog l = log_rec(a[0], names, x);
            double p = e->value;
            if (l.sign == 0) return SignedLog::of(p > 0 ? 0.0 : std::numeric_limits<double>::infinity());
            int sign = 1;
            if (l.sign < 0) {
                if (!is_integer(p)) return SignedLog{std::numeric_limits<double>::quiet_NaN(), 1};
                if (static_cast<long long>(p) % 2 != 0) sign = -1;
            }
            return SignedLog{p * l.log_abs, sign};
        }
        case Op::Add: {
            SignedLog l = log_rec(a[0], names, x), r = log_rec(a[1], names, x);
            if (l.sign == 0) return r;
            if (r.sign == 0) return l;
            double m = std::max(l.log_abs, r.log_abs);
            double s = l.sign * std::exp(l.log_abs - m) + r.sign * std::exp(r.log_abs - m);
            if (s == 0.0) return SignedLog{};
            return SignedLog{m + std::log(std::fabs(s)), s > 0 ? 1 : -1};
        }
        case Op::Select: {
            double c = eval_rec(a[0], names, x);
            return log_rec(a[c > 0.0 ? 1 : 2], names, x);
        }
        case Op::Log: {
            SignedLog l = log_rec(a[0], names, x);
            if (l.sign <= 0) return SignedLog::of(std::numeric_limits<double>::quiet_NaN());
            return SignedLog::of(l.log_abs);
        }
        default: return SignedLog::of(eval_rec(e, names, x));
    }
}

}  // namespace

double evaluate(const Expr& e, const std::vector<std::string>& names, const Point& point) {
    return eval_rec(e, names, point);
}

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

SignedLog SignedLog::of(double v) {
    if (v == 0.0) return SignedLog{kNegInf, 0};
    if (std::isnan(v)) return SignedLog{v, 1};
    return SignedLog{std::log(std::fabs(v)), v > 0 ? 1 : -1};
}

SignedLog evaluate_log(const Expr& e, const std::vector<std::string>& names, const Point& point) {
    return log_rec(e, names, point);
}

Tape::Tape(const std::vector<Expr>& outputs, const std::vector<std::string>& names) {
    std::unordered_map<const Node*, int> slot;
    // iterative post-order to survive deep derivative trees
    for (const Expr& root : outputs) {
        std::vector<std::pair<const Node*, std::size_t>> stack{{root.get(), 0}};
        while (!stack.empty()) {
            auto& [node, child] = stack.back();
            if (slot.count(node)) {
                stack.pop_back();
                continue;
            }
            if (child < node->args.size()) {
                const Node* next = node->args[child++].get();
                if (!slot.count(next)) stack.push_back({next, 0});
                continue;
            }
            Instr ins{node->op, node->value, -1, -1, -1};
            if (node->op == Op::Var) {
                auto it = std::find(names.begin(), names.end(), node->name);
                if (it == names.end())
                    throw PreconditionError("tape: unbound variable '" + node->name + "'");
                ins.a = static_cast<int>(it - names.begin());
            } else {
                int* dst[3] = {&ins.a, &ins.b, &ins.c};
                for (std::size_t i = 0; i < node->args.size(); ++i) *dst[i] = slot.at(node->args[i].get());
            }
            slot.emplace(node, static_cast<int>(code_.size()));
            code_.push_back(ins);
            stack.pop_back();
        }
        out_slots_.push_back(slot.at(root.get()));
    }
}

void Tape::evaluate(const double* point, double* out) const {
    thread_local std::vector<double> reg;
    reg.resize(code_.size());
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instr& in = code_[i];
        switch (in.op) {
            case Op::Const: reg[i] = in.value; break;
            case Op::Var: reg[i] = point[in.a]; break;
            case Op::Select: reg[i] = reg[in.a] > 0.0 ? reg[in.b] : reg[in.c]; break;
            default:
                reg[i] = apply(in.op, in.value, reg[in.a], in.b >= 0 ? reg[in.b] : 0.0, 0.0);
        }
    }
    for (std::size_t k = 0; k < out_slots_.size(); ++k) out[k] = reg[out_slots_[k]];
}

double Tape::evaluate1(const Point& point) const {
    double out = 0.0;
    evaluate(point.data(), &out);
    return out;
}

}  // namespace sosreg
