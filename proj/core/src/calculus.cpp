#include "sosreg/calculus.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace sosreg {

std::vector<Point> region_samples(const Ball& region, std::size_t samples) {
    if (region.dim() == 1) {
        std::vector<Point> out;
        for (double t : linspace(region.center[0] - region.radius, region.center[0] + region.radius, samples))
            out.push_back(Point{t});
        return out;
    }
    return ball_samples(region, samples);
}

HolderEstimate holder_seminorm(const FunctionHandle& f, int k, double delta, const Ball& region, std::size_t samples,
                               const HolderOptions& opt) {
    if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("holder_seminorm: exponent must lie in (0,1]");
    if (k < 0) throw PreconditionError("holder_seminorm: negative order");
    if (samples < 2 && opt.points.empty()) throw PreconditionError("holder_seminorm: need at least two samples");
    if (region.dim() != f.arity()) throw PreconditionError("holder_seminorm: region dimension mismatch");

    std::vector<Point> pts = opt.points.empty() ? region_samples(region, samples) : opt.points;
    if (opt.keep) pts.erase(std::remove_if(pts.begin(), pts.end(), [&](const Point& p) { return !opt.keep(p); }),
                            pts.end());

    HolderEstimate est;
    est.order = k;
    est.exponent = delta;
    est.sup_norms.assign(k + 1, 0.0);
    est.min_separation = opt.h_min >= 0.0
                             ? opt.h_min
                             : (f.exact_derivatives() ? 0.0 : 10.0 * fd_step(FdOptions{f.length_scale()}, k));

    std::vector<std::vector<double>> top(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (int l = 0; l <= k; ++l) {
            std::vector<double> d = f.derivatives(pts[i], l);
            for (double v : d) {
                if (!std::isfinite(v)) throw NumericalError("holder_seminorm: derivative is not finite at " +
                                                            format_point(pts[i]));
                est.sup_norms[l] = std::max(est.sup_norms[l], std::fabs(v));
            }
            if (l == k) top[i] = std::move(d);
        }
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double d = distance(pts[i], pts[j]);
            if (d <= 0.0 || d < est.min_separation) continue;
            if (opt.max_separation > 0.0 && d > opt.max_separation) continue;
            ++est.pairs;
            double diff = 0.0;
            for (std::size_t a = 0; a < top[i].size(); ++a) diff = std::max(diff, std::fabs(top[i][a] - top[j][a]));
            double q = diff / std::pow(d, delta);
            if (q > est.seminorm) {
                est.seminorm = q;
                est.y = pts[i];
                est.z = pts[j];
            }
        }
    }
    return est;
}

double lambda_max(const std::vector<double>& sym, std::size_t n) {
    if (n == 1) return sym[0];
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = sym[i * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double directional_hessian_plus(const FunctionHandle& f, const Point& x) {
    std::vector<double> h = f.hessian(x);
    for (double v : h)
        if (!std::isfinite(v)) throw NumericalError("directional_hessian_plus: Hessian not finite at " + format_point(x));
    return std::max(0.0, lambda_max(h, f.arity()));
}

namespace {

double safe_ratio(double lhs, double rhs) {
    if (lhs <= 0.0) return 0.0;
    if (rhs <= 0.0) return std::numeric_limits<double>::infinity();
    return lhs / rhs;
}

struct Worst {
    double ratio = 0.0;
    Point at;
    void update(double r, const Point& x) {
        if (r > ratio) {
            ratio = r;
            at = x;
        }
    }
};

}  // namespace

Report verify_odd_even_control(const FunctionHandle& f, const Ball& region, std::size_t samples) {
    const std::size_t n = f.arity();
    Report rep;
    rep.op = "odd_even_control";
    rep.function = f.name();
    rep.region = region;

    // Normalize to sup |D^4 f| <= 1 over a neighbourhood of the region.
    Ball wide{region.center, region.radius * 1.25};
    double m4 = 0.0;
    for (const auto& p : region_samples(wide, std::max<std::size_t>(samples / 2, 400)))
        m4 = std::max(m4, f.max_derivative(p, 4));
    const double scale = m4 > 0.0 ? m4 : 1.0;
    rep.constants["fourth_derivative_sup"] = m4;
    rep.notes.push_back("amplitude normalized by sup|D^4 f| over the region enlarged by 25%");

    Worst first, third, second, first_c, third_c, grad_n, third_n, hess_n;
    const double tol_abs = 1e-13;
    // below tol_abs both sides are at the underflow floor and the ratio means nothing
    auto check = [&](double lhs, double rhs, Worst& w, const Point& x) {
        if (lhs > tol_abs) w.update(safe_ratio(lhs, rhs), x);
        if (lhs > rhs * (1.0 + 1e-9) + tol_abs) rep.record_violation(x);
    };

    for (const auto& x : region_samples(region, samples)) {
        const double g = f.value(x) / scale;
        if (g < -1e-12) throw PreconditionError("odd_even_control: function is negative at " + format_point(x));
        const double gp = std::max(g, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            MultiIndex a(n, 0);
            a[i] = 1;
            const double d1 = f.derivative(x, a) / scale;
            a[i] = 2;
            const double d2 = f.derivative(x, a) / scale;
            a[i] = 3;
            const double d3 = f.derivative(x, a) / scale;
            const double d2p = std::max(d2, 0.0);
            check(std::fabs(d1), 8.0 / 3.0 * std::pow(gp, 0.75) + 8.0 / 3.0 * std::sqrt(gp * std::fabs(d2)), first, x);
            check(std::fabs(d3), 8.0 * std::pow(gp, 0.25) + 8.0 * std::sqrt(std::fabs(d2)), third, x);
            check(-d2, 5.0 / 3.0 * std::sqrt(gp), second, x);
            if (gp <= 1.0) {
                check(std::fabs(d1), 8.0 * std::pow(gp, 0.75) + 8.0 / 3.0 * std::sqrt(gp * d2p), first_c, x);
                check(std::fabs(d3), 24.0 * std::pow(gp, 0.25) + 8.0 * std::sqrt(d2p), third_c, x);
            }
        }
        // n-dimensional forms, constants reported rather than checked
        const double grad = f.max_derivative(x, 1) / scale;
        const double hess = f.max_derivative(x, 2) / scale;
        const double d3n = f.max_derivative(x, 3) / scale;
        const double lam = directional_hessian_plus(f, x) / scale;
        if (grad > tol_abs) grad_n.update(safe_ratio(grad, std::pow(gp, 0.75) + std::sqrt(gp * hess)), x);
        if (d3n > tol_abs) third_n.update(safe_ratio(d3n, std::pow(gp, 0.25) + std::sqrt(hess)), x);
        if (hess > tol_abs) hess_n.update(safe_ratio(hess, lam + std::sqrt(gp)), x);
    }
    rep.constants["ratio_first_derivative"] = first.ratio;
    rep.constants["ratio_third_derivative"] = third.ratio;
    rep.constants["ratio_negative_second"] = second.ratio;
    rep.constants["ratio_first_derivative_combined"] = first_c.ratio;
    rep.constants["ratio_third_derivative_combined"] = third_c.ratio;
    rep.constants["implicit_constant_gradient"] = grad_n.ratio;
    rep.constants["implicit_constant_third"] = third_n.ratio;
    rep.constants["implicit_constant_hessian"] = hess_n.ratio;
    rep.constants["violations"] = static_cast<double>(rep.violations);
    const Worst* worst = &first;
    for (const Worst* w : {&third, &second, &first_c, &third_c})
        if (w->ratio > worst->ratio) worst = w;
    rep.ratio = worst->ratio;
    rep.worst_point = worst->at;
    rep.passed = rep.violations == 0;
    return rep;
}

Report verify_interpolation_bound(const FunctionHandle& f, const Ball& region, int m, int k, std::size_t samples) {
    if (m < 1 || k < m) throw PreconditionError("interpolation bound: need k >= m >= 1");
    if (!(region.radius > 0.0)) throw PreconditionError("interpolation bound: degenerate ball");
    const std::size_t n = f.arity();
    Report rep;
    rep.op = "interpolation_bound";
    rep.function = f.name();
    rep.region = region;

    std::vector<Point> pts = region_samples(region, samples);
    double lhs = 0.0, top = 0.0;
    std::vector<std::vector<std::vector<double>>> jets(pts.size());
    std::vector<std::vector<MultiIndex>> idx(m);
    for (int j = 0; j < m; ++j) idx[j] = indices_of_order(n, j);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        lhs = std::max(lhs, f.max_derivative(pts[i], m));
        top = std::max(top, f.max_derivative(pts[i], k));
        for (int j = 0; j < m; ++j) jets[i].push_back(f.derivatives(pts[i], j));
    }
    double taylor = 0.0;
    Point h(n);
    for (std::size_t a = 0; a < pts.size(); ++a) {
        const double fa = jets[a][0][0];
        for (std::size_t b = 0; b < pts.size(); ++b) {
            for (std::size_t d = 0; d < n; ++d) h[d] = pts[a][d] - pts[b][d];
            double poly = 0.0;
            for (int j = 0; j < m; ++j) {
                for (std::size_t q = 0; q < idx[j].size(); ++q) {
                    double c = jets[b][j][q];
                    for (std::size_t d = 0; d < n; ++d) {
                        for (int e = 1; e <= idx[j][q][d]; ++e) c *= h[d] / e;
                    }
                    poly += c;
                }
            }
            double r = std::fabs(fa - poly);
            if (r > taylor) {
                taylor = r;
                rep.worst_point = pts[a];
            }
        }
    }
    const double ell = 2.0 * region.radius;
    const double bound = taylor / std::pow(ell, m) + std::pow(taylor, 1.0 - double(m) / k) * std::pow(top, double(m) / k);
    rep.constants["max_derivative_m"] = lhs;
    rep.constants["taylor_difference_max"] = taylor;
    rep.constants["max_derivative_k"] = top;
    rep.constants["diameter"] = ell;
    rep.constants["constant"] = safe_ratio(lhs, bound);
    rep.ratio = rep.constants["constant"];
    rep.passed = std::isfinite(rep.ratio);
    return rep;
}

Report is_flat(const FunctionHandle& f, int n_max, const std::vector<double>& t_grid, bool first_derivatives) {
    const std::size_t n = f.arity();
    Report rep;
    rep.op = "is_flat";
    rep.function = f.name();
    rep.constants["failing_N"] = -1;
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] < t_grid[i - 1])) throw PreconditionError("is_flat: t_grid must be descending");

    std::vector<Point> dirs;
    for (std::size_t i = 0; i < n; ++i) {
        for (double s : {1.0, -1.0}) {
            Point d(n, 0.0);
            d[i] = s;
            dirs.push_back(d);
        }
    }
    if (n > 1) {
        Point d(n, 1.0 / std::sqrt(double(n)));
        dirs.push_back(d);
    }
    std::vector<MultiIndex> channels{MultiIndex(n, 0)};
    if (first_derivatives)
        for (std::size_t i = 0; i < n; ++i) channels.push_back(unit_index(n, i));

    const double floor = 1e-14;
    for (int N = 0; N <= n_max; ++N) {
        for (const auto& alpha : channels) {
            for (const auto& dir : dirs) {
                double prev = std::numeric_limits<double>::infinity();
                for (double t : t_grid) {
                    Point x(n);
                    for (std::size_t d = 0; d < n; ++d) x[d] = t * dir[d];
                    SignedLog l = f.log_derivative(x, alpha);
                    double v = l.sign == 0 ? 0.0 : std::exp(l.log_abs - N * std::log(t));
                    if (v > prev * (1.0 + 1e-12) + floor) {
                        rep.passed = false;
                        rep.constants["failing_N"] = N;
                        rep.constants["failing_t"] = t;
                        rep.worst_point = x;
                        rep.notes.push_back(order(alpha) == 0 ? "function" : "first derivative");
                        return rep;
                    }
                    prev = v;
                }
            }
        }
    }
    return rep;
}

}  // namespace sosreg
