#include "sosreg/function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sosreg/faa_di_bruno.hpp"

namespace sosreg {

double fd_step(const FdOptions& opt, int p) {
    const double base = std::max(opt.min_step, std::cbrt(std::numeric_limits<double>::epsilon()));
    return base * opt.scale * std::ldexp(1.0, std::max(p, 1) - 1);
}

namespace {

double binomial(int k, int j) {
    double c = 1.0;
    for (int i = 1; i <= j; ++i) c = c * (k - j + i) / i;
    return c;
}

double stencil(const std::function<double(const Point&)>& f, const Point& x, const MultiIndex& alpha, double h) {
    const std::size_t n = alpha.size();
    std::vector<int> j(n, 0);
    double acc = 0.0;
    Point y(n);
    while (true) {
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            int k = alpha[i];
            w *= ((k - j[i]) % 2 ? -1.0 : 1.0) * binomial(k, j[i]);
            y[i] = x[i] + (j[i] - 0.5 * k) * h;
        }
        acc += w * f(y);
        std::size_t i = 0;
        while (i < n && ++j[i] > alpha[i]) j[i++] = 0;
        if (i == n) break;
    }
    return acc / std::pow(h, order(alpha));
}

}  // namespace

double fd_derivative(const std::function<double(const Point&)>& f, const Point& x, const MultiIndex& alpha,
                     const FdOptions& opt) {
    const int p = order(alpha);
    if (p == 0) return f(x);
    const double h = fd_step(opt, p);
    const double coarse = stencil(f, x, alpha, h);
    if (!opt.richardson) return coarse;
    const double fine = stencil(f, x, alpha, 0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

FunctionHandle::FunctionHandle(std::string name, std::size_t arity, Ball domain)
    : name_(std::move(name)), arity_(arity), domain_(std::move(domain)) {
    if (domain_.dim() != arity_) throw PreconditionError("function domain dimension does not match arity");
}

std::vector<double> FunctionHandle::derivatives(const Point& x, int m) const {
    std::vector<double> out;
    for (const auto& a : indices_of_order(arity_, m)) out.push_back(derivative(x, a));
    return out;
}

std::vector<double> FunctionHandle::gradient(const Point& x) const {
    // indices_of_order(n, 1) lists e_0, e_1, ... in order
    return derivatives(x, 1);
}

std::vector<double> FunctionHandle::hessian(const Point& x) const {
    const std::size_t n = arity_;
    const auto idx = indices_of_order(n, 2);
    const auto d = derivatives(x, 2);
    std::vector<double> h(n * n);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        std::size_t i = 0;
        while (idx[k][i] == 0) ++i;
        std::size_t j = i;
        if (idx[k][i] == 1) {
            j = i + 1;
            while (idx[k][j] == 0) ++j;
        }
        h[i * n + j] = h[j * n + i] = d[k];
    }
    return h;
}

double FunctionHandle::max_derivative(const Point& x, int m) const {
    double best = 0.0;
    for (double v : derivatives(x, m)) best = std::max(best, std::fabs(v));
    return best;
}

SymbolicFunction::SymbolicFunction(FunctionDef def)
    : FunctionHandle(def.name, def.variables.size(), def.domain), def_(std::move(def)) {
    for (const auto& v : free_variables(def_.body)) {
        if (std::find(def_.variables.begin(), def_.variables.end(), v) == def_.variables.end())
            throw PreconditionError("function '" + def_.name + "': free variable '" + v + "' is not declared");
    }
    body_ = Tape({def_.body}, def_.variables);
}

Expr SymbolicFunction::derivative_expr(const MultiIndex& alpha) const {
    if (alpha.size() != arity()) throw PreconditionError("derivative: multi-index has wrong length");
    std::lock_guard<std::recursive_mutex> lock(mu_);
    if (order(alpha) == 0) return def_.body;
    auto it = exprs_.find(alpha);
    if (it != exprs_.end()) return it->second;
    std::size_t i = 0;
    while (alpha[i] == 0) ++i;
    MultiIndex parent = alpha;
    parent[i] -= 1;
    Expr e = differentiate(derivative_expr(parent), def_.variables[i]);
    exprs_.emplace(alpha, e);
    return e;
}

const Tape& SymbolicFunction::tape_for(const MultiIndex& alpha) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto it = tapes_.find(alpha);
    if (it != tapes_.end()) return *it->second;
    auto t = std::make_unique<Tape>(std::vector<Expr>{derivative_expr(alpha)}, def_.variables);
    return *tapes_.emplace(alpha, std::move(t)).first->second;
}

const Tape& SymbolicFunction::order_tape(int m) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto it = order_tapes_.find(m);
    if (it != order_tapes_.end()) return *it->second;
    std::vector<Expr> outs;
    for (const auto& a : indices_of_order(arity(), m)) outs.push_back(derivative_expr(a));
    auto t = std::make_unique<Tape>(outs, def_.variables);
    return *order_tapes_.emplace(m, std::move(t)).first->second;
}

double SymbolicFunction::value(const Point& x) const { return body_.evaluate1(x); }

double SymbolicFunction::derivative(const Point& x, const MultiIndex& alpha) const {
    if (order(alpha) == 0) return value(x);
    return tape_for(alpha).evaluate1(x);
}

std::vector<double> SymbolicFunction::derivatives(const Point& x, int m) const {
    const Tape& t = order_tape(m);
    std::vector<double> out(t.outputs());
    t.evaluate(x.data(), out.data());
    return out;
}

SignedLog SymbolicFunction::log_value(const Point& x) const { return evaluate_log(def_.body, def_.variables, x); }

Expr SymbolicFunction::exp_argument(const Point& x) const {
    Expr e = def_.body;
    while (e->op == Op::Select) e = e->args[evaluate(e->args[0], def_.variables, x) > 0.0 ? 1 : 2];
    return e->op == Op::Exp ? e->args[0] : nullptr;
}

SignedLog SymbolicFunction::log_derivative(const Point& x, const MultiIndex& alpha) const {
    if (order(alpha) == 0) return log_value(x);
    Expr g = exp_argument(x);
    if (!g) return SignedLog::of(derivative(x, alpha));
    std::shared_ptr<SymbolicFunction> gf;
    {
        std::lock_guard<std::recursive_mutex> lock(mu_);
        auto& slot = exponents_[g.get()];
        if (!slot) {
            FunctionDef d = def_;
            d.body = g;
            d.name = def_.name + ".exponent";
            slot = std::make_shared<SymbolicFunction>(d);
        }
        gf = slot;
    }
    // D^alpha exp(g) = exp(g) * sum over composition terms of prod D^beta g
    double sum = 0.0;
    for (const auto& term : composition_terms(alpha)) {
        double p = term.coef;
        for (const auto& b : term.factors) p *= gf->derivative(x, b);
        sum += p;
    }
    SignedLog s = SignedLog::of(sum);
    if (s.sign == 0) return s;
    return SignedLog{gf->value(x) + s.log_abs, s.sign};
}

ProcedureFunction::ProcedureFunction(std::string name, std::size_t arity, Ball domain, Value f, Derivative d,
                                     FdOptions fd)
    : FunctionHandle(std::move(name), arity, std::move(domain)), f_(std::move(f)), d_(std::move(d)), fd_(fd) {}

std::vector<double> ProcedureFunction::derivatives(const Point& x, int m) const {
    if (jet_) {
        if (auto v = jet_(x, m)) return *v;
    }
    return FunctionHandle::derivatives(x, m);
}

double ProcedureFunction::derivative(const Point& x, const MultiIndex& alpha) const {
    if (order(alpha) == 0) return f_(x);
    if (d_) {
        if (auto v = d_(x, alpha)) return *v;
    }
    return fd_derivative(f_, x, alpha, fd_);
}

FunctionPtr make_function(FunctionDef def) { return std::make_shared<SymbolicFunction>(std::move(def)); }

FunctionPtr make_function(const std::string& expression, std::vector<std::string> variables) {
    FunctionDef def;
    def.name = expression;
    def.body = parse_expression(expression, variables, true, nullptr);
    def.variables = variables;
    def.domain = unit_ball(variables.size());
    return make_function(std::move(def));
}

}  // namespace sosreg
