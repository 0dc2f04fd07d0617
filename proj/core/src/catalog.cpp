#include <algorithm>
#include <cmath>

#include "sosreg/catalog.hpp"

namespace sosreg {

namespace {

double param(const CatalogParams& p, const std::string& key, double fallback) {
    auto it = p.values.find(key);
    return it == p.values.end() ? fallback : it->second;
}

void reject_unknown(const CatalogParams& p, const std::string& name, std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : p.values) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
            throw PreconditionError("catalog entry '" + name + "' has no parameter '" + k + "'");
    }
    for (const auto& [k, v] : p.expressions) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
            throw PreconditionError("catalog entry '" + name + "' has no parameter '" + k + "'");
    }
}

Expr sq(const Expr& e) { return pow(e, 2.0); }

// exp(-1/u) for u > 0, else 0
Expr flat_of(const Expr& u) { return select(u, exp(neg(div(constant(1.0), u))), constant(0.0)); }

Expr quartic_L_expr(const Expr& w, const Expr& x, const Expr& y, const Expr& z) {
    Expr e = pow(w, 4.0);
    e = add(e, mul(sq(x), sq(y)));
    e = add(e, mul(sq(y), sq(z)));
    e = add(e, mul(sq(z), sq(x)));
    e = sub(e, mul(constant(2.0), mul(mul(w, x), mul(y, z))));
    return e;
}

FunctionDef make(const std::string& name, std::vector<std::string> vars, Expr body, bool nonneg) {
    FunctionDef d;
    d.name = name;
    d.domain = unit_ball(vars.size());
    d.variables = std::move(vars);
    d.body = std::move(body);
    d.nonnegative = nonneg;
    return d;
}

}  // namespace

Expr smooth_step(const Expr& u) {
    Expr a = exp(neg(div(constant(1.0), u)));
    Expr b = exp(neg(div(constant(1.0), sub(constant(1.0), u))));
    Expr mid = div(a, add(a, b));
    return select(u, select(sub(constant(1.0), u), mid, constant(1.0)), constant(0.0));
}

Expr plateau(const Expr& u, double rho) {
    Expr v = select(u, u, neg(u));
    return sub(constant(1.0), smooth_step(div(sub(v, constant(rho)), constant(1.0 - rho))));
}

FunctionDef catalog_function(const std::string& name, const CatalogParams& params) {
    if (name == "motzkin_M") {
        reject_unknown(params, name, {"lambda"});
        double lambda = param(params, "lambda", 1.0);
        if (!(lambda >= 0.0 && lambda <= 1.0)) throw PreconditionError("motzkin_M: lambda must lie in [0,1]");
        Expr x = variable("x"), y = variable("y"), z = variable("z");
        Expr inner = sub(add(sq(x), sq(y)), mul(constant(3.0 * lambda), sq(z)));
        return make(name, {"x", "y", "z"}, add(pow(z, 6.0), mul(mul(sq(x), sq(y)), inner)), true);
    }
    if (name == "quartic_L") {
        reject_unknown(params, name, {});
        return make(name, {"w", "x", "y", "z"},
                    quartic_L_expr(variable("w"), variable("x"), variable("y"), variable("z")), true);
    }
    if (name == "flat_exp_sq") {
        reject_unknown(params, name, {});
        return make(name, {"t"}, flat_of(sq(variable("t"))), true);
    }
    if (name == "flat_exp") {
        reject_unknown(params, name, {});
        return make(name, {"t"}, flat_of(variable("t")), true);
    }
    if (name == "bump_h") {
        reject_unknown(params, name, {"rho"});
        double rho = param(params, "rho", 0.5);
        if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("bump_h: rho must lie in (0,1)");
        return make(name, {"u"}, plateau(variable("u"), rho), true);
    }
    if (name == "glaeser_stub") {
        reject_unknown(params, name, {"g"});
        auto it = params.expressions.find("g");
        std::string g_text = it == params.expressions.end() ? "x^2" : it->second;
        std::vector<std::string> vars;
        Expr g = parse_expression(g_text, vars, true, nullptr);
        if (vars.empty()) vars.push_back("x");
        return make(name, vars, flat_of(g), true);
    }
    if (name == "family_f") {
        reject_unknown(params, name, {"s_prime", "rho"});
        double sp = param(params, "s_prime", 0.6);
        double rho = param(params, "rho", 0.5);
        if (!(sp > 0.0 && sp <= 1.0)) throw PreconditionError("family_f: s_prime must lie in (0,1]");
        if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("family_f: rho must lie in (0,1)");
        Expr w = variable("w"), x = variable("x"), y = variable("y"), z = variable("z"), t = variable("t");
        Expr t2 = sq(t);
        Expr r2 = add(add(sq(w), sq(x)), add(sq(y), sq(z)));
        Expr phi_t = exp(neg(div(constant(1.0), t2)));
        // phi(t/2)^(1/s') * |t|^(4/s')
        Expr psi_t = mul(exp(neg(div(constant(4.0 / sp), t2))), pow(t2, 2.0 / sp));
        Expr core = select(t2, add(mul(phi_t, quartic_L_expr(w, x, y, z)), psi_t), constant(0.0));
        Expr phi_r = exp(neg(div(constant(1.0), r2)));
        Expr h = plateau(div(t, pow(r2, 0.5)), rho);
        Expr body = add(core, select(r2, mul(phi_r, h), constant(0.0)));
        auto d = make(name, {"w", "x", "y", "z", "t"}, body, true);
        d.domain = Ball{Point(5, 0.0), 1.0};
        return d;
    }
    throw PreconditionError("unknown catalog function '" + name + "'");
}

std::vector<CatalogEntry> list_catalog() {
    return {
        {"motzkin_M", "lambda in [0,1], default 1", "z^6 + x^2*y^2*(x^2 + y^2 - 3*lambda*z^2)",
         "homogeneous Motzkin polynomial, nonnegative for 0 <= lambda <= 1"},
        {"quartic_L", "none", "w^4 + x^2*y^2 + y^2*z^2 + z^2*x^2 - 2*w*x*y*z",
         "nonnegative quartic that is not a sum of squares of quadratic forms"},
        {"flat_exp_sq", "none", "exp(-1/t^2), 0 at t = 0", "flat at the origin, even"},
        {"flat_exp", "none", "exp(-1/t) for t > 0, else 0", "flat and nondecreasing"},
        {"bump_h", "rho in (0,1), default 0.5", "1 on |u| <= rho, 0 on |u| >= 1, exp-transition between",
         "smooth even plateau"},
        {"glaeser_stub", "g: expression, default x^2", "exp(-1/g) where g > 0, else 0",
         "hook for plateau-type constructions with a user supplied g"},
        {"family_f", "s_prime in (0,1] default 0.6, rho in (0,1) default 0.5",
         "phi(t)*L(w,x,y,z) + psi(t) + phi(r)*h_rho(t/r), phi = exp(-1/t^2), psi = phi(t/2)^(1/s')*|t|^(4/s')",
         "five-variable counterexample family, r = |(w,x,y,z)|"},
    };
}

bool is_catalog_name(const std::string& name) {
    auto c = list_catalog();
    return std::any_of(c.begin(), c.end(), [&](const CatalogEntry& e) { return e.name == name; });
}

}  // namespace sosreg
