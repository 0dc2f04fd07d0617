#include "sosreg/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sosreg/calculus.hpp"

namespace sosreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log f with zeros and tiny negative round-off mapped to -inf.
double log_f(const FunctionHandle& f, const Point& x) {
    SignedLog v = f.log_value(x);
    if (v.sign < 0 && v.log_abs > std::log(1e-12))
        throw PreconditionError("monotone: f is negative at " + format_point(x));
    return v.sign > 0 ? v.log_abs : -kInf;
}

double log_ratio(const Modulus& m, double log_fx, double log_fy, double log_scale) {
    if (log_fy == -kInf) return -kInf;
    if (log_fx == -kInf) return kInf;
    return (log_fy - log_scale) - m.log_eval(std::min(log_fx - log_scale, 0.0));
}

Point outer_point(std::size_t i, std::size_t n, double t_min, bool one_sided) {
    Point h = halton(i, n + 1);
    const double u = h[n];
    const double r = i % 2 ? std::pow(t_min, u) : t_min + (1.0 - t_min) * u;
    Point x(n);
    if (n == 1) {
        x[0] = (one_sided || h[0] < 0.5) ? r : -r;
        return x;
    }
    double len = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        x[d] = 2.0 * h[d] - 1.0;
        len += x[d] * x[d];
    }
    len = std::sqrt(len);
    if (len < 1e-9) {
        x.assign(n, 0.0);
        x[0] = r;
        return x;
    }
    for (double& v : x) v *= r / len;
    return x;
}

// Offsets z in the closed unit ball; y = x/2 + (|x|/2) z.
std::vector<Point> inner_offsets(std::size_t n, std::size_t count) {
    std::vector<Point> z;
    if (n == 1) {
        z.push_back({1.0});
        z.push_back({-1.0});
        for (std::size_t j = 0; z.size() < count; ++j) z.push_back({2.0 * halton(j, 1, 7)[0] - 1.0});
    } else {
        auto interior = ball_samples(unit_ball(n), count, 7);
        for (std::size_t j = 0; z.size() < count; ++j) {
            Point p = interior[j / 2];
            if (j % 2 == 0) {
                const double len = norm(p);
                if (len < 1e-9) continue;
                for (double& v : p) v /= len;
            }
            z.push_back(std::move(p));
        }
    }
    z.resize(std::min(z.size(), count));
    return z;
}

Point inner_point(const Point& x, const Point& z) {
    const double half = 0.5 * norm(x);
    Point y(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) y[d] = 0.5 * x[d] + half * z[d];
    return y;
}

void project_outer(Point& x, double t_min, bool one_sided) {
    const double r = norm(x);
    if (x.size() == 1 && one_sided) {
        x[0] = std::clamp(x[0], t_min, 1.0);
        return;
    }
    if (r < 1e-300) {
        x[0] = t_min;
        return;
    }
    const double target = std::clamp(r, t_min, 1.0);
    if (target != r)
        for (double& v : x) v *= target / r;
}

void project_inner(Point& z) {
    const double r = norm(z);
    if (r > 1.0)
        for (double& v : z) v /= r;
}

}  // namespace

double monotone_log_ratio(const FunctionHandle& f, const Modulus& m, const Point& x, const Point& y, double scale) {
    return log_ratio(m, log_f(f, x), log_f(f, y), std::log(scale));
}

MonotoneReport monotone_functional(const FunctionHandle& f, const Modulus& m, const MonotoneOptions& opt) {
    const std::size_t n = f.arity();
    if (n == 0) throw PreconditionError("monotone_functional: function has no variables");
    if (!(opt.t_min > 0.0 && opt.t_min < 1.0)) throw PreconditionError("monotone_functional: t_min must lie in (0,1)");
    if (opt.outer == 0 || opt.inner == 0) throw PreconditionError("monotone_functional: need outer and inner samples");
    if (opt.one_sided && n != 1) throw PreconditionError("monotone_functional: one_sided needs one variable");

    MonotoneReport rep;
    rep.modulus = m.describe();

    std::vector<Point> xs;
    xs.reserve(opt.outer + opt.seeds.size());
    for (std::size_t i = 0; i < opt.outer; ++i) xs.push_back(outer_point(i, n, opt.t_min, opt.one_sided));
    for (const auto& s : opt.seeds) {
        if (s.size() != n) throw PreconditionError("monotone_functional: seed dimension mismatch");
        const double r = norm(s);
        if (r >= opt.t_min && r <= 1.0 && !(opt.one_sided && s[0] < 0.0)) xs.push_back(s);
    }
    const std::vector<Point> zs = inner_offsets(n, opt.inner);
    rep.outer_used = xs.size();
    rep.inner_used = zs.size();

    std::vector<double> lx(xs.size());
    double top = -kInf;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        lx[i] = log_f(f, xs[i]);
        top = std::max(top, lx[i]);
    }
    double log_scale = 0.0;
    if (top > 0.0) {
        log_scale = top;
        rep.scale = std::exp(top);
        rep.notes.push_back("f rescaled by its sampled supremum " + std::to_string(rep.scale));
    }

    double best = -kInf;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double ly = -kInf;
        std::size_t jy = 0;
        for (std::size_t j = 0; j < zs.size(); ++j) {
            const double v = log_f(f, inner_point(xs[i], zs[j]));
            if (v > ly) {
                ly = v;
                jy = j;
            }
        }
        const double r = log_ratio(m, lx[i], ly, log_scale);
        if (r > best) {
            best = r;
            bi = i;
            bj = jy;
        }
        if (r == kInf) break;
    }
    rep.x = xs[bi];
    rep.y = inner_point(xs[bi], zs[bj]);
    rep.grid_estimate = std::exp(best);
    if (best == kInf) {
        rep.divergent = true;
        rep.log_estimate = kInf;
        rep.estimate = kInf;
        rep.notes.push_back("f vanishes at x while f(y) > 0");
        return rep;
    }

    // coordinate ascent on (x, z) from the best grid pair
    Point x = xs[bi], z = zs[bj];
    auto objective = [&](const Point& a, const Point& b) {
        return log_ratio(m, log_f(f, a), log_f(f, inner_point(a, b)), log_scale);
    };
    double hx = 0.05 * std::max(norm(x), opt.t_min), hz = 0.05;
    for (int step = 0; step < opt.ascent_steps && best != kInf; ++step) {
        double cand_best = best;
        Point cx = x, cz = z;
        for (std::size_t k = 0; k < 2 * n; ++k)
            for (double sgn : {-1.0, 1.0}) {
                Point a = x, b = z;
                if (k < n) {
                    a[k] += sgn * hx;
                    project_outer(a, opt.t_min, opt.one_sided);
                } else {
                    b[k - n] += sgn * hz;
                    project_inner(b);
                }
                const double v = objective(a, b);
                if (v > cand_best) {
                    cand_best = v;
                    cx = std::move(a);
                    cz = std::move(b);
                }
            }
        if (cand_best > best) {
            best = cand_best;
            x = std::move(cx);
            z = std::move(cz);
        } else {
            hx *= 0.5;
            hz *= 0.5;
        }
    }
    rep.x = x;
    rep.y = inner_point(x, z);
    rep.log_estimate = best;
    rep.estimate = std::exp(best);
    if (best == kInf) {
        rep.divergent = true;
        rep.notes.push_back("f vanishes at x while f(y) > 0");
    }
    return rep;
}

MonotoneReport monotone_functional(const FunctionHandle& f, const Modulus& m, std::size_t outer, std::size_t inner,
                                   double t_min) {
    MonotoneOptions opt;
    opt.outer = outer;
    opt.inner = inner;
    opt.t_min = t_min;
    return monotone_functional(f, m, opt);
}

MonotoneClassification classify_monotonicity(const FunctionHandle& f, const std::vector<double>& s_grid, double c_max,
                                             const MonotoneOptions& opt) {
    if (s_grid.empty()) throw PreconditionError("classify_monotonicity: empty s grid");
    MonotoneClassification out;
    out.c_max = c_max;
    out.nearly_monotone = true;
    MonotoneOptions fine = opt;
    fine.outer *= 2;
    fine.inner *= 2;
    fine.t_min *= 0.5;
    for (double s : s_grid) {
        if (!(s > 0.0 && s < 1.0)) throw PreconditionError("classify_monotonicity: s must lie in (0,1)");
        MonotoneVerdict v;
        v.s = s;
        const Modulus m = Modulus::power(s);
        v.coarse = monotone_functional(f, m, opt);
        v.refined = monotone_functional(f, m, fine);
        v.finite = !v.coarse.divergent && !v.refined.divergent && v.refined.estimate <= c_max &&
                   std::fabs(v.refined.log_estimate - v.coarse.log_estimate) <= std::log(1.05);
        out.nearly_monotone = out.nearly_monotone && v.finite;
        out.holder_monotone = out.holder_monotone || v.finite;
        out.verdicts.push_back(std::move(v));
    }
    return out;
}

Report verify_power_bound(const FunctionHandle& f, double s, double s_prime, int m_max, const Ball& region,
                          std::size_t samples) {
    if (!(s_prime > 0.0 && s_prime < s && s < 1.0))
        throw PreconditionError("verify_power_bound: need 0 < s' < s < 1");
    if (m_max < 1) throw PreconditionError("verify_power_bound: m_max must be at least 1");
    if (region.dim() != f.arity()) throw PreconditionError("verify_power_bound: region dimension mismatch");
    Report rep;
    rep.op = "power_bound";
    rep.function = f.name();
    rep.region = region;

    struct Pass {
        std::vector<double> log_const;
        std::vector<Point> worst;
    };
    const std::size_t n = f.arity();
    double log_scale = 0.0;
    for (const auto& x : region_samples(region, 2 * samples)) log_scale = std::max(log_scale, log_f(f, x));
    auto run = [&](std::size_t count) {
        Pass p;
        p.log_const.assign(m_max + 1, -kInf);
        p.worst.assign(m_max + 1, Point{});
        bool any_positive = false;
        const auto pts = region_samples(region, count);
        std::vector<double> lf(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) lf[i] = log_f(f, pts[i]);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            any_positive = any_positive || lf[i] > -kInf;
            for (int m = 1; m <= m_max; ++m) {
                double ld = -kInf;
                for (const auto& a : indices_of_order(n, m)) {
                    SignedLog d = f.log_derivative(pts[i], a);
                    if (d.sign != 0) ld = std::max(ld, d.log_abs);
                }
                if (ld == -kInf) continue;
                const double e = std::pow(s_prime, m);
                const double c = lf[i] == -kInf ? kInf : (ld - log_scale) - e * (lf[i] - log_scale);
                if (c > p.log_const[m]) {
                    p.log_const[m] = c;
                    p.worst[m] = pts[i];
                }
            }
        }
        if (!any_positive) throw PreconditionError("verify_power_bound: f vanishes at every sample");
        return p;
    };
    const Pass coarse = run(samples);
    const Pass fine = run(2 * samples);
    if (log_scale > 0.0) rep.notes.push_back("f rescaled by " + std::to_string(std::exp(log_scale)));
    rep.passed = true;
    for (int m = 1; m <= m_max; ++m) {
        const std::string key = "constant_m" + std::to_string(m);
        const double c = std::exp(fine.log_const[m]);
        rep.constants[key] = c;
        rep.constants[key + "_coarse"] = std::exp(coarse.log_const[m]);
        const bool stable = std::isfinite(fine.log_const[m]) && fine.log_const[m] <= coarse.log_const[m] + std::log(1.05);
        if (!stable) {
            rep.passed = false;
            rep.record_violation(fine.worst[m]);
            rep.notes.push_back("order " + std::to_string(m) + " constant is not stable under refinement");
        }
        if (c > rep.ratio) {
            rep.ratio = c;
            rep.worst_point = fine.worst[m];
        }
    }
    return rep;
}

}  // namespace sosreg
