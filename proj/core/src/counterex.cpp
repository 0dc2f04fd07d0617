#include "sosreg/counterex.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <random>

namespace sosreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

double log_expr_at(const Expr& e, double t, const char* what) {
    t = std::fabs(t);
    if (t == 0.0) return -kInf;
    SignedLog v = evaluate_log(e, {"t"}, {t});
    if (v.sign < 0) throw PreconditionError(std::string(what) + " is negative at t = " + fmt(t));
    return v.sign == 0 ? -kInf : v.log_abs;
}

// log h_rho(u) for the even plateau 1 - smooth_step((|u| - rho)/(1 - rho)).
double log_plateau(double u, double rho) {
    u = std::fabs(u);
    if (u <= rho) return 0.0;
    if (u >= 1.0) return -kInf;
    const double v = (u - rho) / (1.0 - rho);
    const double a = -1.0 / v, b = -1.0 / (1.0 - v);
    return b - log_add(a, b);
}

Expr abs_t() {
    Expr t = variable("t");
    return select(t, t, neg(t));
}

void require_psi(const FamilyParams& p, const char* op) {
    if (!p.psi) throw PreconditionError(std::string(op) + ": psi is required");
}

Point join(const Point& W, double t) {
    Point x = W;
    x.push_back(t);
    return x;
}

Point scaled(const Point& e, double c) {
    Point v(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) v[i] = c * e[i];
    return v;
}

double log_family_at(const FamilyParams& p, const Point& x) {
    return family_log_value(p, Point(x.begin(), x.begin() + 4), x[4]);
}

// Uniform points on the unit sphere of R^4 from a 3D Halton sequence.
Point sphere_point(std::size_t i) {
    const Point u = halton(i, 3);
    const double a = 2.0 * M_PI * u[0], b = 2.0 * M_PI * u[1];
    const double c = std::sqrt(1.0 - u[2]), d = std::sqrt(u[2]);
    return {c * std::cos(a), c * std::sin(a), d * std::cos(b), d * std::sin(b)};
}

}  // namespace

Expr default_phi() { return parse_expression("exp(-1/t^2)"); }

Expr default_psi(double s_prime) {
    if (!(s_prime > 0.0 && s_prime <= 1.0)) throw PreconditionError("default_psi: s' must lie in (0,1]");
    Expr t = variable("t");
    // phi(t/2)^(1/s') t^(4/s')
    return mul(exp(neg(div(constant(4.0 / s_prime), pow(t, 2.0)))), pow(t, 4.0 / s_prime));
}

FamilyParams default_family(double s_prime, double rho) {
    FamilyParams p;
    p.phi = default_phi();
    p.psi = default_psi(s_prime);
    p.rho = rho;
    p.s_prime = s_prime;
    return p;
}

double quartic_L(const Point& v) {
    if (v.size() != 4) throw PreconditionError("quartic_L: expects a point of R^4");
    const double w = v[0], x = v[1], y = v[2], z = v[3];
    const double w2 = w * w;
    return w2 * w2 + x * x * y * y + y * y * z * z + z * z * x * x - 2.0 * w * x * y * z;
}

double log_phi(const FamilyParams& p, double t) {
    if (!p.phi) throw PreconditionError("family: phi is required");
    return log_expr_at(p.phi, t, "phi");
}

double log_psi(const FamilyParams& p, double t) {
    require_psi(p, "family");
    return log_expr_at(p.psi, t, "psi");
}

std::vector<double> dyadic_grid(double t_min, int per_octave) {
    if (!(t_min > 0.0 && t_min <= 1.0)) throw PreconditionError("dyadic_grid: t_min must lie in (0,1]");
    if (per_octave < 1) throw PreconditionError("dyadic_grid: per_octave must be positive");
    return descending_geometric(1.0, t_min, per_octave);
}

void check_family(const FamilyParams& p) {
    if (!p.phi) throw PreconditionError("family: phi is required");
    if (!(p.rho > 0.0 && p.rho < 1.0)) throw PreconditionError("family: rho must lie in (0,1)");
    if (!p.psi) return;
    const auto grid = dyadic_grid();
    std::vector<double> lr;
    for (double t : grid) lr.push_back(log_psi(p, t) - log_phi(p, t) - 4.0 * std::log(t));
    const std::size_t n = lr.size();
    bool ok = lr.back() < std::log(1e-2);
    for (std::size_t i = n - 5; i + 1 < n; ++i) ok = ok && lr[i + 1] <= lr[i] + 1e-12 * (1.0 + std::fabs(lr[i]));
    if (!ok)
        throw PreconditionError("family: psi is not o(phi t^4) on the grid (log ratio " + fmt(lr.back()) +
                                " at t = " + fmt(grid.back()) + ")");
}

double family_log_value(const FamilyParams& p, const Point& W, double t) {
    if (W.size() != 4) throw PreconditionError("family: W must lie in R^4");
    const double L = quartic_L(W);
    double acc = -kInf;
    const double lphi = log_phi(p, t);
    if (L > 0.0) acc = lphi + std::log(L);
    if (p.psi) acc = log_add(acc, log_psi(p, t));
    const double r = norm(W);
    if (r > 0.0) acc = log_add(acc, log_phi(p, r) + log_plateau(t / r, p.rho));
    return acc;
}

FunctionPtr build_family(const FamilyParams& p) {
    check_family(p);
    Expr w = variable("w"), x = variable("x"), y = variable("y"), z = variable("z"), t = variable("t");
    std::vector<std::string> vars = {"w", "x", "y", "z", "t"};
    Expr L = parse_expression("w^4 + x^2*y^2 + y^2*z^2 + z^2*x^2 - 2*w*x*y*z", vars, false);
    Expr r2 = add(add(pow(w, 2.0), pow(x, 2.0)), add(pow(y, 2.0), pow(z, 2.0)));
    Expr r = pow(r2, 0.5);
    Expr phi_t = substitute(p.phi, {{"t", abs_t()}});
    Expr core = mul(phi_t, L);
    if (p.psi) core = add(core, substitute(p.psi, {{"t", abs_t()}}));
    Expr phi_r = substitute(p.phi, {{"t", r}});
    Expr bump = mul(phi_r, plateau(div(t, r), p.rho));
    FunctionDef d;
    d.name = "family(rho=" + fmt(p.rho) + ")";
    d.variables = vars;
    d.body = add(select(pow(t, 2.0), core, constant(0.0)), select(r2, bump, constant(0.0)));
    d.domain = Ball{Point(5, 0.0), 1.0};
    d.nonnegative = true;
    auto f = make_function(d);
    return f;
}

double functional_log_integrand(const FamilyParams& p, char name, double gamma, const Modulus& m, double t) {
    const double lt = std::log(t);
    switch (name) {
        case 'T': {
            const double den = m.log_eval(log_phi(p, t) + 4.0 * lt);
            const double num = log_phi(p, gamma * t) + 4.0 * lt;
            return den == -kInf ? (num == -kInf ? -kInf : kInf) : num - den;
        }
        case 'S': {
            const double den = m.log_eval(log_psi(p, t));
            const double num = log_phi(p, gamma * t) + 4.0 * lt;
            return den == -kInf ? (num == -kInf ? -kInf : kInf) : num - den;
        }
        case 'R': {
            const double lpsi = log_psi(p, t);
            if (lpsi == -kInf) return -kInf;
            const double den = m.log_eval(lpsi);
            return lpsi - log_phi(p, t) + log_phi(p, gamma * t) - den;
        }
        default:
            throw PreconditionError(std::string("functional: unknown name '") + name + "'");
    }
}

FunctionalReport functional(const FamilyParams& p, char name, double gamma, const Modulus& m,
                            const std::vector<double>& t_grid) {
    if (!(gamma > 0.0)) throw PreconditionError("functional: gamma must be positive");
    if (t_grid.empty()) throw PreconditionError("functional: empty grid");
    if (name != 'T') require_psi(p, "functional");
    double t_min = 1.0;
    for (double t : t_grid) {
        if (!(t > 0.0 && t <= 1.0)) throw PreconditionError("functional: grid must lie in (0,1]");
        t_min = std::min(t_min, t);
    }
    FunctionalReport rep;
    rep.name = name;
    rep.gamma = gamma;
    rep.modulus = m.describe();
    rep.log_sup = -kInf;
    for (double t : t_grid) {
        const double v = functional_log_integrand(p, name, gamma, m, t);
        if (v > rep.log_sup || rep.argmax == 0.0) {
            rep.log_sup = std::max(rep.log_sup, v);
            rep.argmax = t;
        }
    }
    rep.log_sup_extended = rep.log_sup;
    for (double t : descending_geometric(t_min, t_min / 4.0, 8))
        rep.log_sup_extended = std::max(rep.log_sup_extended, functional_log_integrand(p, name, gamma, m, t));
    rep.sup = std::exp(rep.log_sup);
    rep.divergent = rep.log_sup == kInf || rep.log_sup_extended - rep.log_sup > std::log(10.0);
    return rep;
}

double gamma_alpha(double alpha) {
    if (!(alpha > 0.0)) throw PreconditionError("gamma_alpha: alpha must be positive");
    return (1.0 + std::sqrt(1.0 + alpha * alpha)) / (2.0 * alpha);
}

double threshold_s0() {
    const double g = gamma_alpha(1.0);
    return 1.0 / (g * g);
}

WitnessPair witness_s(double t, const Point& e) {
    return {join(Point(4, 0.0), t), join(scaled(e, t / 2.0), t / 2.0)};
}

WitnessPair witness_t(double r, const Point& e) {
    return {join(scaled(e, r), r), join(scaled(e, r / 2.0), gamma_alpha(1.0) * r)};
}

double witness_log_ratio(const FamilyParams& p, const Modulus& m, const WitnessPair& w) {
    const double lp = log_family_at(p, w.P), lq = log_family_at(p, w.Q);
    if (lp == -kInf) return lq == -kInf ? -kInf : kInf;
    return lq - m.log_eval(lp);
}

WitnessPair boundary_pair(double r, double t, double theta, const Point& e) {
    const double R = 0.5 * std::hypot(r, t);
    const double z = 0.5 * r + R * std::cos(theta), u = 0.5 * t + R * std::sin(theta);
    return {join(scaled(e, r), t), join(scaled(e, z), u)};
}

MonotoneBounds monotone_bounds(const FamilyParams& p, const Modulus& m, double delta, const BoundsOptions& opt) {
    if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("monotone_bounds: delta must lie in (0,1)");
    require_psi(p, "monotone_bounds");
    check_family(p);
    MonotoneBounds out;
    const double g1 = gamma_alpha(1.0);
    out.lower_S = functional(p, 'S', 0.5, m);
    out.lower_T = functional(p, 'T', g1, m);
    out.upper_R = functional(p, 'R', 1.0 + delta, m);
    out.upper_S = functional(p, 'S', 0.5 + delta, m);
    out.upper_T = functional(p, 'T', gamma_alpha(p.rho) + delta, m);

    std::vector<double> grid = opt.grid;
    if (grid.empty()) {
        grid = dyadic_grid(std::pow(10.0, -2.5), 4);
        grid.push_back(0.0);
    }
    double g_min = 1.0;
    for (double g : grid) {
        if (!(g >= 0.0 && g <= 1.0)) throw PreconditionError("monotone_bounds: grid must lie in [0,1]");
        if (g > 0.0) g_min = std::min(g_min, g);
    }
    std::vector<double> extended = grid;
    for (double t = g_min * std::pow(2.0, -0.25); t >= g_min / 4.0 * (1.0 - 1e-12); t *= std::pow(2.0, -0.25))
        extended.push_back(t);
    std::vector<Point> dirs = {{1.0, 0.0, 0.0, 0.0}};
    for (std::size_t i = 1; dirs.size() < std::max<std::size_t>(opt.directions, 1); ++i) dirs.push_back(sphere_point(i));

    auto in_omega = [](const Point& x) {
        return x[4] >= 0.0 && x[4] <= 1.0 && norm(Point(x.begin(), x.begin() + 4)) <= 1.0 + 1e-12;
    };

    // f is divided by its largest sampled value when that exceeds 1
    double ls = 0.0;
    for (const auto& e : dirs)
        for (double r : grid)
            for (double t : grid) ls = std::max(ls, family_log_value(p, scaled(e, r), t));
    out.scale = std::exp(ls);
    if (ls > 0.0) out.notes.push_back("f rescaled by " + fmt(out.scale));

    auto search = [&](const std::vector<double>& g, WitnessPair* arg) {
        double best = -kInf;
        auto consider = [&](const WitnessPair& w, double lp) {
            const double lq = log_family_at(p, w.Q);
            if (lq == -kInf) return;
            const double v = lp == -kInf ? kInf : (lq - ls) - m.log_eval(lp - ls);
            if (v > best) {
                best = v;
                if (arg) *arg = w;
            }
        };
        for (const auto& e : dirs)
            for (double t : g) {
                if (t <= 0.0) continue;
                for (const WitnessPair& w : {witness_s(t, e), witness_t(t, e)})
                    if (in_omega(w.P) && in_omega(w.Q)) consider(w, log_family_at(p, w.P));
            }
        for (const auto& e : dirs)
            for (double r : g)
                for (double t : g) {
                    if (r == 0.0 && t == 0.0) continue;
                    const double lp = family_log_value(p, scaled(e, r), t);
                    for (std::size_t k = 0; k < opt.angles; ++k) {
                        WitnessPair w = boundary_pair(r, t, 2.0 * M_PI * k / opt.angles, e);
                        if (in_omega(w.Q)) consider(w, lp);
                    }
                }
        return best;
    };
    out.log_estimate = search(grid, &out.argmax);
    out.log_estimate_extended = std::max(out.log_estimate, search(extended, nullptr));
    out.divergent =
        out.log_estimate == kInf || out.log_estimate_extended - out.log_estimate > std::log(10.0);
    const double best = out.log_estimate;
    if (out.divergent) out.notes.push_back("boundary search grows under grid extension");

    out.evaluated = !(out.divergent || out.lower_S.divergent || out.lower_T.divergent || out.upper_R.divergent ||
                      out.upper_S.divergent || out.upper_T.divergent);
    if (!out.evaluated) {
        out.notes.push_back("divergence on one side; sandwich not evaluated");
        return out;
    }
    const double est = std::exp(best);
    out.fitted_lower = est / (out.lower_S.sup + out.lower_T.sup);
    out.fitted_upper = est / (out.upper_R.sup + out.upper_S.sup + out.upper_T.sup);
    out.sandwich = out.fitted_lower >= 1e-3 && out.fitted_upper <= 1e3;
    return out;
}

std::string to_string(SosVerdict v) {
    switch (v) {
        case SosVerdict::FailsSOS: return "fails-SOS";
        case SosVerdict::DoesNotTrigger: return "does-not-trigger";
        default: return "inconclusive";
    }
}

SosFailureReport sos_failure_criterion(const FamilyParams& p, double beta, const std::vector<double>& t_grid) {
    if (!(beta > 0.0 && beta < 1.0)) throw PreconditionError("sos_failure_criterion: beta must lie in (0,1)");
    require_psi(p, "sos_failure_criterion");
    if (t_grid.size() < 4) throw PreconditionError("sos_failure_criterion: grid needs at least 4 points");
    SosFailureReport rep;
    rep.beta = beta;
    rep.t = t_grid;
    std::sort(rep.t.begin(), rep.t.end(), std::greater<>());
    for (double t : rep.t) {
        if (!(t > 0.0 && t <= 1.0)) throw PreconditionError("sos_failure_criterion: grid must lie in (0,1]");
        rep.log_ratio.push_back(log_psi(p, t) - (4.0 / beta) * log_phi(p, t) - (16.0 / beta) * std::log(t));
    }
    const auto& l = rep.log_ratio;
    const std::size_t mid = l.size() / 2;
    bool down = true, up = true;
    for (std::size_t i = mid; i + 1 < l.size(); ++i) {
        const double slack = 1e-9 * (1.0 + std::fabs(l[i]));
        down = down && l[i + 1] <= l[i] + slack;
        up = up && l[i + 1] >= l[i] - slack;
    }
    const double drop = l.back() - l[mid];
    if (down && drop < -std::log(10.0))
        rep.verdict = SosVerdict::FailsSOS;
    else if (up && drop > std::log(10.0))
        rep.verdict = SosVerdict::DoesNotTrigger;
    return rep;
}

double eval_form(const QuadForm& q, const Point& w) {
    double s = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i; j < 4; ++j) s += q[k++] * w[i] * w[j];
    return s;
}

namespace {

struct MisfitProblem {
    std::vector<Point> pts;
    std::vector<double> L;
    std::vector<std::array<double, 10>> mono;  // monomials of each point
    double c0;

    std::size_t size() const { return pts.size(); }

    // Residuals L - sum Q^2 and the per-form values Q(W_k).
    void residuals(const std::vector<double>& x, int nu, std::vector<double>& e, std::vector<double>& q) const {
        e.assign(size(), 0.0);
        q.assign(size() * nu, 0.0);
        for (std::size_t k = 0; k < size(); ++k) {
            double s = 0.0;
            for (int l = 0; l < nu; ++l) {
                double v = 0.0;
                for (int j = 0; j < 10; ++j) v += x[10 * l + j] * mono[k][j];
                q[k * nu + l] = v;
                s += v * v;
            }
            e[k] = L[k] - s;
        }
    }

    double max_misfit(const std::vector<double>& x, int nu) const {
        std::vector<double> e, q;
        residuals(x, nu, e, q);
        double m = 0.0;
        for (double v : e) m = std::max(m, std::fabs(v));
        return m;
    }

    // (mean |e|^p)^(1/p) and its gradient.
    double surrogate(const std::vector<double>& x, int nu, double p, std::vector<double>* grad) const {
        std::vector<double> e, q;
        residuals(x, nu, e, q);
        double emax = 0.0;
        for (double v : e) emax = std::max(emax, std::fabs(v));
        if (emax == 0.0) {
            if (grad) grad->assign(x.size(), 0.0);
            return 0.0;
        }
        double sum = 0.0;
        for (double v : e) sum += std::pow(std::fabs(v) / emax, p);
        const double mean = sum / size();
        const double J = emax * std::pow(mean, 1.0 / p);
        if (grad) {
            grad->assign(x.size(), 0.0);
            // dJ/de_k = J^(1-p) |e_k|^(p-1) sign(e_k) / K, scaled through emax
            const double c = std::pow(mean, 1.0 / p - 1.0) / size();
            for (std::size_t k = 0; k < size(); ++k) {
                const double w = c * std::pow(std::fabs(e[k]) / emax, p - 1.0) * (e[k] < 0 ? -1.0 : 1.0);
                if (w == 0.0) continue;
                for (int l = 0; l < nu; ++l) {
                    const double a = -2.0 * q[k * nu + l] * w;
                    for (int j = 0; j < 10; ++j) (*grad)[10 * l + j] += a * mono[k][j];
                }
            }
        }
        return J;
    }

    void project(std::vector<double>& x) const {
        for (double& v : x) v = std::clamp(v, -c0, c0);
    }

    // Projected gradient with backtracking, sharpening the surrogate toward the max.
    std::vector<double> descend(std::vector<double> x, int nu) const {
        project(x);
        std::vector<double> g, trial(x.size());
        for (double p : {4.0, 16.0, 64.0, 256.0}) {
            double step = 0.5;
            double J = surrogate(x, nu, p, &g);
            for (int it = 0; it < 150; ++it) {
                bool moved = false;
                while (step > 1e-10) {
                    for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - step * g[i];
                    project(trial);
                    double dec = 0.0;
                    for (std::size_t i = 0; i < x.size(); ++i) dec += g[i] * (x[i] - trial[i]);
                    const double Jt = surrogate(trial, nu, p, nullptr);
                    if (Jt <= J - 1e-4 * dec && Jt < J) {
                        x.swap(trial);
                        J = surrogate(x, nu, p, &g);
                        step *= 2.0;
                        moved = true;
                        break;
                    }
                    step *= 0.5;
                }
                if (!moved) break;
            }
        }
        return x;
    }
};

}  // namespace

DeltaNuReport estimate_delta_nu(int nu, double c0, const DeltaNuOptions& opt) {
    if (nu < 0 || nu > 4) throw PreconditionError("estimate_delta_nu: nu must lie in 0..4");
    if (!(c0 > 0.0)) throw PreconditionError("estimate_delta_nu: C0 must be positive");
    if (opt.sphere_samples < 10) throw PreconditionError("estimate_delta_nu: too few sphere samples");
    if (opt.restarts < 1) throw PreconditionError("estimate_delta_nu: at least one restart is needed");

    MisfitProblem prob;
    prob.c0 = c0;
    for (std::size_t i = 0; i < 4; ++i)
        for (double sgn : {1.0, -1.0}) {
            Point e(4, 0.0);
            e[i] = sgn;
            prob.pts.push_back(e);
        }
    for (std::size_t i = 1; prob.pts.size() < opt.sphere_samples; ++i) prob.pts.push_back(sphere_point(i));
    for (const auto& w : prob.pts) {
        prob.L.push_back(quartic_L(w));
        std::array<double, 10> m{};
        std::size_t k = 0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i; j < 4; ++j) m[k++] = w[i] * w[j];
        prob.mono.push_back(m);
    }

    DeltaNuReport rep;
    rep.nu = nu;
    rep.c0 = c0;
    rep.min_abs_L = kInf;
    for (double v : prob.L) rep.min_abs_L = std::min(rep.min_abs_L, std::fabs(v));

    std::vector<double> best;  // coefficients of the current level
    double best_val = prob.max_misfit(best, 0);
    std::vector<double> values = {best_val};
    for (int level = 1; level <= nu; ++level) {
        std::vector<double> warm = best;
        warm.resize(10 * level, 0.0);
        std::vector<double> lvl_best = warm;
        double lvl_val = prob.max_misfit(warm, level);
        values.clear();
        for (int k = 0; k < opt.restarts; ++k) {
            std::mt19937_64 rng(opt.seed * 1000003ULL + 1000ULL * level + k);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            std::vector<double> x0(10 * level);
            if (k == 0) {
                x0 = warm;
                for (std::size_t i = 10 * (level - 1); i < x0.size(); ++i) x0[i] = 0.1 * u(rng);
            } else {
                for (double& v : x0) v = std::min(1.0, c0) * u(rng);
            }
            std::vector<double> x = prob.descend(x0, level);
            const double v = prob.max_misfit(x, level);
            values.push_back(v);
            if (v < lvl_val) {
                lvl_val = v;
                lvl_best = x;
            }
        }
        best = lvl_best;
        best_val = lvl_val;
    }

    rep.estimate = best_val;
    rep.restart_values = values;
    std::size_t close = 0;
    for (double v : values) close += v <= 1.2 * best_val;
    rep.stable_fraction = static_cast<double>(close) / values.size();
    rep.stalled = close < 3;
    for (int l = 0; l < nu; ++l) {
        QuadForm q{};
        std::copy(best.begin() + 10 * l, best.begin() + 10 * (l + 1), q.begin());
        rep.forms.push_back(q);
    }
    std::vector<double> e, q;
    prob.residuals(best, nu, e, q);
    for (std::size_t k = 0; k < prob.size(); ++k)
        if (std::fabs(e[k]) >= best_val * (1.0 - 1e-6)) rep.certificate.push_back(prob.pts[k]);
    return rep;
}

CrucialCurve crucial_lower_bound(double delta_nu, double beta, const std::vector<double>& tau_grid, double C) {
    if (!(delta_nu > 0.0)) throw PreconditionError("crucial_lower_bound: delta_nu must be positive");
    if (!(beta > 0.0 && beta < 1.0)) throw PreconditionError("crucial_lower_bound: beta must lie in (0,1)");
    if (!(C > 0.0)) throw PreconditionError("crucial_lower_bound: C must be positive");
    CrucialCurve c;
    c.exponent = -beta / (8.0 - 2.0 * beta);
    const double pre = std::pow(delta_nu / C, 2.0 / (4.0 - beta));
    for (double tau : tau_grid) {
        if (!(tau > 0.0)) throw PreconditionError("crucial_lower_bound: tau must be positive");
        c.tau.push_back(tau);
        c.bound.push_back(pre * std::pow(tau, c.exponent));
    }
    return c;
}

}  // namespace sosreg
