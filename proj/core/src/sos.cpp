#include "sosreg/sos.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <unordered_map>

namespace sosreg {

namespace {

double safe_ratio(double lhs, double rhs) {
    if (!(lhs > 1e-300)) return 0.0;
    if (!(rhs > 0.0)) return std::numeric_limits<double>::infinity();
    return lhs / rhs;
}

}  // namespace

Report check_differential_inequalities(const FunctionHandle& f, double delta, double eta, const Ball& region,
                                       std::size_t samples) {
    if (!(delta > 0.0 && delta <= 0.5)) throw PreconditionError("differential inequalities: delta must lie in (0, 1/2]");
    if (!(eta > 0.0 && eta <= 1.0)) throw PreconditionError("differential inequalities: eta must lie in (0, 1]");
    if (region.dim() != f.arity()) throw PreconditionError("differential inequalities: region dimension mismatch");
    Report rep;
    rep.op = "diff_ineq";
    rep.function = f.name();
    rep.region = region;

    struct Constants {
        double fourth = 0.0, hessian = 0.0;
        Point w4, w2;
    };
    auto run = [&](std::size_t count) {
        Constants k;
        for (const auto& x : region_samples(region, count)) {
            const double v = f.value(x);
            if (v < -1e-12) throw PreconditionError("differential inequalities: f is negative at " + format_point(x));
            const double fp = std::max(v, 0.0);
            const double r4 = safe_ratio(f.max_derivative(x, 4), std::pow(fp, delta / (2.0 + delta)));
            const double r2 = safe_ratio(directional_hessian_plus(f, x), std::pow(fp, eta));
            if (r4 > k.fourth) {
                k.fourth = r4;
                k.w4 = x;
            }
            if (r2 > k.hessian) {
                k.hessian = r2;
                k.w2 = x;
            }
        }
        return k;
    };
    const Constants coarse = run(samples);
    const Constants fine = run(2 * samples);
    rep.constants["fourth_constant"] = fine.fourth;
    rep.constants["hessian_constant"] = fine.hessian;
    rep.constants["fourth_constant_coarse"] = coarse.fourth;
    rep.constants["hessian_constant_coarse"] = coarse.hessian;
    auto stable = [](double a, double b) { return std::isfinite(b) && b <= 1.25 * a + 1e-12; };
    const bool ok4 = stable(coarse.fourth, fine.fourth);
    const bool ok2 = stable(coarse.hessian, fine.hessian);
    if (!ok4) {
        rep.record_violation(fine.w4);
        rep.notes.push_back("fourth-derivative constant grows under refinement");
    }
    if (!ok2) {
        rep.record_violation(fine.w2);
        rep.notes.push_back("Hessian constant grows under refinement");
    }
    rep.ratio = std::max(fine.fourth, fine.hessian);
    rep.worst_point = fine.hessian >= fine.fourth ? fine.w2 : fine.w4;
    rep.passed = ok4 && ok2;
    return rep;
}

std::vector<double> delta_sequence(double delta, double eta, int n) {
    if (!(delta > 0.0 && delta <= 0.5)) throw PreconditionError("delta_sequence: delta must lie in (0, 1/2]");
    if (!(eta > 0.0 && eta < 0.5)) throw PreconditionError("delta_sequence: eta must lie in (0, 1/2)");
    if (n < 1) throw PreconditionError("delta_sequence: n must be at least 1");
    std::vector<double> d{delta};
    for (int k = 1; k < n; ++k) {
        const double u = eta * d.back() / (1.0 + d.back());
        d.push_back(2.0 * u / (1.0 - u));
    }
    return d;
}

namespace {

double ball_minimum(const FunctionHandle& f, const Point& c, double r) {
    const std::size_t n = c.size();
    double lo = f.value(c);
    for (std::size_t i = 0; i < n; ++i)
        for (double t : {-1.0, -0.5, 0.5, 1.0}) {
            Point x = c;
            x[i] += t * r;
            lo = std::min(lo, f.value(x));
        }
    for (const auto& x : ball_samples(Ball{c, r}, 16 + 8 * (std::size_t{1} << n))) lo = std::min(lo, f.value(x));
    return lo;
}

}  // namespace

CellClass classify_cell(const FunctionHandle& f, const CoverCell& cell, double delta, double c) {
    const std::size_t n = f.arity();
    CellClass cls;
    cls.terms = control_distance_terms(f, cell.center, ControlDistanceParams{delta, RhoVariant::full});
    cls.value = f.value(cell.center);
    const double rho = cls.terms.rho;
    cls.center_case_i = cls.value >= c * std::pow(rho, 4.0 + 2.0 * delta);
    const double r = cell.radius > 0.0 ? cell.radius : rho / 200.0;
    // the center comparison alone does not keep zeros of f out of the ball
    auto positive_on_ball = [&] { return cls.value > 0.0 && ball_minimum(f, cell.center, r) >= cls.value / 4.0; };
    if (cls.center_case_i && positive_on_ball()) {
        cls.kind = CellCase::I;
        return cls;
    }
    if (cls.terms.dominant == 2 && positive_on_ball()) {
        cls.kind = CellCase::I;
        cls.fourth_order = true;
        return cls;
    }

    std::vector<double> h = f.hessian(cell.center);
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = 0.5 * (h[i * n + j] + h[j * n + i]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const double lam = es.eigenvalues()(n - 1);
    if (!(lam > 0.0))
        throw NumericalError("classify_cell: Case II without a positive Hessian direction at " +
                             format_point(cell.center));
    Eigen::MatrixXd q = es.eigenvectors();
    for (std::size_t a = 0; a < n; ++a) {
        Eigen::Index k = 0;
        q.col(a).cwiseAbs().maxCoeff(&k);
        if (q(k, a) < 0.0) q.col(a) *= -1.0;
    }
    cls.kind = CellCase::II;
    cls.frame.resize(n * n);
    cls.axis.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < n; ++a) cls.frame[i * n + a] = q(i, a);
        cls.axis[i] = q(i, n - 1);
    }
    return cls;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int n) {
    if (n < 1) throw PreconditionError("gauss_legendre01: need at least one node");
    static std::mutex mu;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    // Golub-Welsch on the Jacobi matrix of the Legendre recurrence
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        j(k, k - 1) = b;
        j(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    std::vector<double> x(n), w(n);
    for (int k = 0; k < n; ++k) {
        x[k] = 0.5 * (es.eigenvalues()(k) + 1.0);
        const double v = es.eigenvectors()(0, k);
        w[k] = v * v;  // 2 v^2 on [-1,1], halved on [0,1]
    }
    return cache[n] = {x, w};
}

ImplicitDerivatives implicit_derivatives(const ImplicitPartials& p) {
    if (!(std::fabs(p.g_x) > 0.0)) throw NumericalError("implicit_derivatives: dG/dx vanishes");
    const std::size_t m = p.g_i.size();
    ImplicitDerivatives d;
    d.first.resize(m);
    d.second.resize(m * m);
    for (std::size_t i = 0; i < m; ++i) d.first[i] = -p.g_i[i] / p.g_x;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            d.second[i * m + j] = -(p.g_ij[i * m + j] + p.g_ix[i] * d.first[j] + p.g_ix[j] * d.first[i] +
                                    p.g_xx * d.first[i] * d.first[j]) /
                                  p.g_x;
    return d;
}

ImplicitPartials implicit_partials(const FunctionHandle& g, const Point& at) {
    const std::size_t n = g.arity();
    if (n < 1 || at.size() != n) throw PreconditionError("implicit_partials: dimension mismatch");
    const std::size_t m = n - 1;
    const auto grad = g.gradient(at);
    const auto hess = g.hessian(at);
    ImplicitPartials p;
    p.g_x = grad[m];
    p.g_xx = hess[m * n + m];
    p.g_i.assign(grad.begin(), grad.begin() + static_cast<long>(m));
    p.g_ix.resize(m);
    p.g_ij.resize(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        p.g_ix[i] = hess[i * n + m];
        for (std::size_t j = 0; j < m; ++j) p.g_ij[i * m + j] = hess[i * n + j];
    }
    return p;
}

double bracketed_root(const std::function<std::pair<double, double>(double)>& g, double lo, double hi, double guess) {
    if (!(lo < hi)) throw PreconditionError("bracketed_root: empty bracket");
    const double width = hi - lo;
    double x = std::clamp(guess, lo, hi);
    for (int it = 0; it < 30; ++it) {
        const auto [gx, dx] = g(x);
        if (gx == 0.0) return x;
        if (!(dx > 0.0)) break;
        const double xn = x - gx / dx;
        if (!(xn > lo && xn < hi)) break;
        if (std::fabs(xn - x) <= 1e-15 * (std::fabs(x) + width)) return xn;
        x = xn;
    }
    const double glo = g(lo).first, ghi = g(hi).first;
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if (glo > 0.0 || ghi < 0.0) throw NumericalError("bracketed_root: no sign change on the bracket");
    x = std::clamp(guess, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const auto [gx, dx] = g(x);
        if (gx == 0.0) return x;
        if (gx < 0.0)
            lo = x;
        else
            hi = x;
        double xn = x - gx / dx;
        if (!(dx > 0.0) || !(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= 1e-15 * (std::fabs(x) + width) || hi - lo <= 1e-16 * width) return xn;
        x = xn;
    }
    return x;
}

ImplicitFrame::ImplicitFrame(FunctionPtr f, Point center, std::vector<double> rotation, double radius, double bracket)
    : f_(std::move(f)), center_(std::move(center)), q_(std::move(rotation)), n_(center_.size()), radius_(radius),
      bracket_(bracket) {
    static std::atomic<std::uint64_t> next{1};
    id_ = next++;
    if (!f_ || f_->arity() != n_) throw PreconditionError("ImplicitFrame: dimension mismatch");
    if (q_.size() != n_ * n_) throw PreconditionError("ImplicitFrame: rotation must be n x n");
    for (int k = 1; k <= 4; ++k) {
        const auto idx = indices_of_order(n_, k);
        for (std::size_t i = 0; i < idx.size(); ++i) pos_[k][idx[i]] = i;
    }
}

Point ImplicitFrame::to_local(const Point& x) const {
    Point y(n_, 0.0);
    for (std::size_t a = 0; a < n_; ++a)
        for (std::size_t i = 0; i < n_; ++i) y[a] += q_[i * n_ + a] * (x[i] - center_[i]);
    return y;
}

Point ImplicitFrame::to_global(const Point& y) const {
    Point x = center_;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t a = 0; a < n_; ++a) x[i] += q_[i * n_ + a] * y[a];
    return x;
}

double ImplicitFrame::f_local(const Point& y) const { return f_->value(to_global(y)); }

std::vector<double> ImplicitFrame::local_tensor(const Point& y, int k) const {
    if (k < 0 || k > 4) throw PreconditionError("local_tensor: order must lie in [0, 4]");
    const Point x = to_global(y);
    if (k == 0) return {f_->value(x)};
    const auto d = f_->derivatives(x, k);
    std::size_t total = 1;
    for (int i = 0; i < k; ++i) total *= n_;
    std::vector<double> t(total);
    std::vector<std::size_t> tuple(k, 0);
    MultiIndex alpha(n_);
    for (std::size_t e = 0; e < total; ++e) {
        std::fill(alpha.begin(), alpha.end(), 0);
        std::size_t r = e;
        for (int m = k - 1; m >= 0; --m) {
            tuple[m] = r % n_;
            r /= n_;
            ++alpha[tuple[m]];
        }
        t[e] = d[pos_[k].at(alpha)];
    }
    // contract each mode with Q
    std::vector<double> next(total);
    std::size_t stride = 1;
    for (int mode = k - 1; mode >= 0; --mode) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t e = 0; e < total; ++e) {
            const std::size_t a = (e / stride) % n_;
            const std::size_t base = e - a * stride;
            double s = 0.0;
            for (std::size_t i = 0; i < n_; ++i) s += t[base + i * stride] * q_[i * n_ + a];
            next[e] = s;
        }
        t.swap(next);
        stride *= n_;
    }
    return t;
}

Point ImplicitFrame::join(const Point& xi, double yn) const {
    if (xi.size() + 1 != n_) throw PreconditionError("ImplicitFrame: cross-section dimension mismatch");
    Point y = xi;
    y.push_back(yn);
    return y;
}

double ImplicitFrame::X(const Point& xi) const {
    // consecutive requests at the same cross-section point (gradient, then Hessian) share one solve
    thread_local std::uint64_t owner = 0;
    thread_local Point last_xi;
    thread_local double last_x = 0.0;
    if (owner == id_ && last_xi == xi) return last_x;
    const std::size_t last = n_ - 1;
    auto fiber = [&](double t) {
        const Point x = to_global(join(xi, t));
        const auto g = f_->gradient(x);
        const auto h = f_->hessian(x);
        double s = 0.0, c = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            s += q_[i * n_ + last] * g[i];
            for (std::size_t j = 0; j < n_; ++j) c += q_[i * n_ + last] * h[i * n_ + j] * q_[j * n_ + last];
        }
        return std::make_pair(s, c);
    };
    double r = 0.0;
    try {
        r = bracketed_root(fiber, -bracket_, bracket_, 0.0);
    } catch (const NumericalError&) {
        throw NumericalError("implicit_minimizer: fiber minimum not interior to the bracket at " +
                             format_point(to_global(join(xi, 0.0))));
    }
    if (!(r > -bracket_ && r < bracket_))
        throw NumericalError("implicit_minimizer: fiber minimum on the bracket boundary at " +
                             format_point(to_global(join(xi, 0.0))));
    owner = id_;
    last_xi = xi;
    last_x = r;
    return r;
}

double ImplicitFrame::F(const Point& xi) const { return f_local(join(xi, X(xi))); }

double ImplicitFrame::H(const Point& xi, double yn, int nodes) const {
    const std::size_t last = n_ - 1;
    const double x0 = X(xi);
    const auto& [t, w] = gauss_legendre01(nodes);
    double sum = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const auto h = f_->hessian(to_global(join(xi, x0 + t[k] * (yn - x0))));
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) s += q_[i * n_ + last] * h[i * n_ + j] * q_[j * n_ + last];
        sum += w[k] * (1.0 - t[k]) * s;
    }
    return sum;
}

ImplicitDerivatives ImplicitFrame::X_derivatives(const Point& xi) const {
    const std::size_t m = n_ - 1;
    const Point y = join(xi, X(xi));
    const auto t2 = local_tensor(y, 2);
    const auto t3 = local_tensor(y, 3);
    auto at2 = [&](std::size_t a, std::size_t b) { return t2[a * n_ + b]; };
    auto at3 = [&](std::size_t a, std::size_t b, std::size_t c) { return t3[(a * n_ + b) * n_ + c]; };
    ImplicitPartials p;
    p.g_x = at2(m, m);
    p.g_xx = at3(m, m, m);
    p.g_i.resize(m);
    p.g_ix.resize(m);
    p.g_ij.resize(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        p.g_i[i] = at2(i, m);
        p.g_ix[i] = at3(i, m, m);
        for (std::size_t j = 0; j < m; ++j) p.g_ij[i * m + j] = at3(i, j, m);
    }
    return implicit_derivatives(p);
}

std::vector<double> ImplicitFrame::F_gradient(const Point& xi) const {
    const auto t1 = local_tensor(join(xi, X(xi)), 1);
    return std::vector<double>(t1.begin(), t1.end() - 1);
}

std::vector<double> ImplicitFrame::F_hessian(const Point& xi) const {
    const std::size_t m = n_ - 1;
    const auto t2 = local_tensor(join(xi, X(xi)), 2);
    const double fnn = t2[m * n_ + m];
    std::vector<double> out(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) out[i * m + j] = t2[i * n_ + j] - t2[i * n_ + m] * t2[j * n_ + m] / fnn;
    return out;
}

FunctionPtr ImplicitFrame::profile() const {
    const std::size_t m = n_ - 1;
    auto self = std::make_shared<const ImplicitFrame>(*this);
    auto value = [self](const Point& xi) { return self->F(xi); };
    auto deriv = [self, m](const Point& xi, const MultiIndex& a) -> std::optional<double> {
        const int k = order(a);
        if (k == 0) return self->F(xi);
        std::size_t i = 0;
        while (a[i] == 0) ++i;
        if (k == 1) return self->F_gradient(xi)[i];
        if (k == 2) {
            std::size_t j = i;
            if (a[i] == 1) {
                j = i + 1;
                while (a[j] == 0) ++j;
            }
            return self->F_hessian(xi)[i * m + j];
        }
        return std::nullopt;
    };
    auto handle = std::make_shared<ProcedureFunction>("profile", m, Ball{Point(m, 0.0), radius_}, value, deriv,
                                                      FdOptions{radius_, 0.02, true});
    handle->set_jet([self, m](const Point& xi, int k) -> std::optional<std::vector<double>> {
        if (k == 1) return self->F_gradient(xi);
        if (k != 2) return std::nullopt;
        const auto h = self->F_hessian(xi);
        std::vector<double> out;
        for (const auto& a : indices_of_order(m, 2)) {
            std::size_t i = 0;
            while (a[i] == 0) ++i;
            std::size_t j = i;
            if (a[i] == 1) {
                j = i + 1;
                while (a[j] == 0) ++j;
            }
            out.push_back(h[i * m + j]);
        }
        return out;
    });
    return handle;
}

double DecomposeParams::c() const { return std::min(c0, s * s / 8.0); }

std::size_t Decomposition::group_of(int color, int slot) const { return index.at({color, slot}); }

void Decomposition::evaluate(const Point& x, std::vector<double>& g) const {
    g.assign(groups(), 0.0);
    const auto loc = partition->at(x);
    const std::size_t n = f->arity();
    std::vector<double> sub;
    for (std::size_t k = 0; k < loc.cells.size(); ++k) {
        const auto& cd = cells[loc.cells[k]];
        const double phi = loc.phi[k];
        const int color = partition->cells()[cd.cell].color;
        if (cd.cls.kind == CellCase::I) {
            g[group_of(color, 0)] += phi * std::sqrt(std::max(f->value(x), 0.0));
            continue;
        }
        const Point y = cd.frame->to_local(x);
        const Point xi(y.begin(), y.end() - 1);
        const double yn = y.back();
        const double x0 = cd.frame->X(xi);
        g[group_of(color, 0)] += phi * (yn - x0) * std::sqrt(std::max(cd.frame->H(xi, yn), 0.0));
        if (cd.remainder) {
            cd.remainder->evaluate(xi, sub);
            for (std::size_t j = 0; j < sub.size(); ++j) g[group_of(color, static_cast<int>(j) + 1)] += phi * sub[j];
        } else if (n == 1 && cd.constant > 0.0) {
            g[group_of(color, 1)] += phi * std::sqrt(cd.constant);
        }
    }
}

double Decomposition::sum_squares(const Point& x) const {
    std::vector<double> g;
    evaluate(x, g);
    double s = 0.0;
    for (double v : g) s += v * v;
    return s;
}

bool Decomposition::covered(const Point& x) const { return !partition->at(x).cells.empty(); }

int Decomposition::depth() const {
    int d = 1;
    for (const auto& c : cells)
        if (c.remainder) d = std::max(d, 1 + c.remainder->depth());
    return d;
}

std::size_t Decomposition::count(CellCase k) const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [k](const CellDecomposition& c) { return c.cls.kind == k; }));
}

double Decomposition::min_radius() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& c : partition->cells()) r = std::min(r, c.radius);
    for (const auto& c : cells)
        if (c.remainder) r = std::min(r, c.remainder->min_radius());
    return r;
}

double Decomposition::final_delta() const { return deltas.back(); }

FunctionPtr Decomposition::root(std::size_t group) const {
    auto me = self.lock();
    if (!me) throw PreconditionError("Decomposition::root: decomposition is not shared");
    if (group >= groups()) throw PreconditionError("Decomposition::root: no such group");
    const auto key = group_keys[group];
    auto value = [me, group](const Point& x) {
        std::vector<double> g;
        me->evaluate(x, g);
        return g[group];
    };
    const double r = std::isfinite(min_radius()) ? min_radius() : 1.0;
    return std::make_shared<ProcedureFunction>(
        "g[" + std::to_string(key.first) + "," + std::to_string(key.second) + "]", f->arity(), params.region, value,
        nullptr, FdOptions{r, 0.02, true});
}

namespace {

std::shared_ptr<Decomposition> build_level(FunctionPtr f, const DecomposeParams& p, int level,
                                           std::vector<double> deltas) {
    const std::size_t n = f->arity();
    auto d = std::make_shared<Decomposition>();
    d->f = f;
    d->params = p;
    d->level = level;
    d->deltas = deltas;
    d->self = d;

    auto cells = build_cover(*f, ControlDistanceParams{p.delta, RhoVariant::full}, p.region, p.s, p.floor,
                             CoverOptions{p.budget});
    d->classes = color_classes(cells);
    d->partition = std::make_shared<Partition>(cells);
    const double c = p.c();

    std::set<std::pair<int, int>> keys;
    for (const auto& cell : cells) {
        CellDecomposition cd;
        cd.cell = cell.index;
        cd.cls = classify_cell(*f, cell, p.delta, c);
        keys.insert({cell.color, 0});
        if (cd.cls.fourth_order && d->notes.empty())
            d->notes.push_back("fourth-derivative dominated cells with f bounded below on the ball use Case I");
        if (cd.cls.kind == CellCase::II) {
            auto frame = std::make_shared<ImplicitFrame>(f, cell.center, cd.cls.frame, cell.radius, 4.0 * cell.radius);
            cd.frame = frame;
            if (n == 1) {
                const double v = frame->F({});
                if (v < -p.tol) d->notes.push_back("negative reduced constant at " + format_point(cell.center));
                cd.constant = std::max(v, 0.0);
                if (cd.constant > 0.0) keys.insert({cell.color, 1});
            } else {
                if (level + 1 >= p.max_depth) throw BudgetError("decompose: recursion depth exceeded", level + 1);
                DecomposeParams sub = p;
                sub.delta = deltas.at(1);
                sub.region = Ball{Point(n - 1, 0.0), cell.radius};
                auto F = frame->profile();
                if (!p.override_inequalities) {
                    Report r = check_differential_inequalities(*F, sub.delta, p.eta, sub.region,
                                                               std::max<std::size_t>(p.inequality_samples / 8, 16));
                    if (!r.passed)
                        d->notes.push_back("remainder profile fails its inherited inequality on cell " +
                                           std::to_string(cell.index));
                }
                cd.remainder = build_level(F, sub, level + 1, std::vector<double>(deltas.begin() + 1, deltas.end()));
                for (std::size_t j = 0; j < cd.remainder->groups(); ++j)
                    keys.insert({cell.color, static_cast<int>(j) + 1});
            }
        }
        d->cells.push_back(std::move(cd));
    }
    d->group_keys.assign(keys.begin(), keys.end());
    for (std::size_t i = 0; i < d->group_keys.size(); ++i) d->index[d->group_keys[i]] = i;
    return d;
}

}  // namespace

std::shared_ptr<const Decomposition> decompose(FunctionPtr f, const DecomposeParams& p) {
    if (!f) throw PreconditionError("decompose: null function");
    const std::size_t n = f->arity();
    if (p.region.dim() != n) throw PreconditionError("decompose: region dimension mismatch");
    if (!(p.s > 0.0 && p.s <= 1.0 / 200.0)) throw PreconditionError("decompose: s must lie in (0, 1/200]");
    if (!(p.floor > 0.0)) throw PreconditionError("decompose: floor must be positive");
    auto deltas = delta_sequence(p.delta, p.eta, static_cast<int>(n));
    if (!p.override_inequalities) {
        Report r = check_differential_inequalities(*f, p.delta, p.eta, p.region, p.inequality_samples);
        if (!r.passed)
            throw PreconditionError("decompose: differential inequalities fail near " + format_point(r.worst_point) +
                                    " (override to proceed)");
    }
    return build_level(f, p, 0, deltas);
}

std::vector<std::vector<double>> root_hessians(const Decomposition& d, const std::vector<Point>& pts) {
    const std::size_t n = d.f->arity();
    const std::size_t comps = n * (n + 1) / 2;
    const std::size_t G = d.groups();
    const double h0 = 0.04 * d.min_radius();
    std::vector<std::vector<double>> out(pts.size(), std::vector<double>(G * comps, 0.0));
    std::vector<double> g0, gp, gm, a, b, c, e;
    auto shifted = [&](const Point& x, std::size_t i, double si, std::size_t j, double sj, std::vector<double>& g) {
        Point y = x;
        y[i] += si;
        if (sj != 0.0) y[j] += sj;
        d.evaluate(y, g);
    };
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const Point& x = pts[p];
        d.evaluate(x, g0);
        for (double h : {h0, 0.5 * h0}) {
            const double w = h == h0 ? -1.0 / 3.0 : 4.0 / 3.0;
            std::size_t comp = 0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j, ++comp) {
                    if (i == j) {
                        shifted(x, i, h, i, 0.0, gp);
                        shifted(x, i, -h, i, 0.0, gm);
                        for (std::size_t k = 0; k < G; ++k)
                            out[p][k * comps + comp] += w * (gp[k] - 2.0 * g0[k] + gm[k]) / (h * h);
                    } else {
                        shifted(x, i, h, j, h, a);
                        shifted(x, i, h, j, -h, b);
                        shifted(x, i, -h, j, h, c);
                        shifted(x, i, -h, j, -h, e);
                        for (std::size_t k = 0; k < G; ++k)
                            out[p][k * comps + comp] += w * (a[k] - b[k] - c[k] + e[k]) / (4.0 * h * h);
                    }
                }
            }
        }
    }
    return out;
}

namespace {

// Uniform bucket grid over a fixed point set for nearest-neighbour ring searches.
class PointGrid {
public:
    PointGrid(const std::vector<Point>& pts, double cell) : pts_(pts), cell_(cell) {
        const std::size_t n = pts.empty() ? 0 : pts[0].size();
        lo_.assign(n, std::numeric_limits<std::int64_t>::max());
        hi_.assign(n, std::numeric_limits<std::int64_t>::min());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto k = key(pts[i]);
            for (std::size_t a = 0; a < n; ++a) {
                lo_[a] = std::min(lo_[a], k[a]);
                hi_[a] = std::max(hi_[a], k[a]);
            }
            buckets_[k].push_back(i);
        }
    }

    // Nearest point to pts[i] (other than i) accepted by the predicate; distance in *d.
    template <class Pred>
    bool nearest(std::size_t i, Pred accept, double* d) const {
        const std::size_t n = lo_.size();
        const auto c = key(pts_[i]);
        std::int64_t reach = 0;
        for (std::size_t a = 0; a < n; ++a) reach = std::max({reach, c[a] - lo_[a], hi_[a] - c[a]});
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::int64_t> off(n), cur(n);
        for (std::int64_t ring = 0; ring <= reach; ++ring) {
            if (ring >= 1 && static_cast<double>(ring - 1) * cell_ > best) break;
            std::fill(off.begin(), off.end(), -ring);
            while (true) {
                std::int64_t cheb = 0;
                for (std::size_t a = 0; a < n; ++a) cheb = std::max<std::int64_t>(cheb, off[a] < 0 ? -off[a] : off[a]);
                if (cheb == ring) {
                    for (std::size_t a = 0; a < n; ++a) cur[a] = c[a] + off[a];
                    auto it = buckets_.find(cur);
                    if (it != buckets_.end())
                        for (auto j : it->second) {
                            if (j == i || !accept(j)) continue;
                            best = std::min(best, distance(pts_[i], pts_[j]));
                        }
                }
                std::size_t a = 0;
                while (a < n && off[a] == ring) off[a++] = -ring;
                if (a == n) break;
                ++off[a];
            }
        }
        *d = best;
        return std::isfinite(best);
    }

private:
    std::vector<std::int64_t> key(const Point& x) const {
        std::vector<std::int64_t> k(x.size());
        for (std::size_t a = 0; a < x.size(); ++a) k[a] = static_cast<std::int64_t>(std::floor(x[a] / cell_));
        return k;
    }
    struct Hash {
        std::size_t operator()(const std::vector<std::int64_t>& k) const {
            std::size_t h = 1469598103934665603ULL;
            for (auto v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
            return h;
        }
    };
    const std::vector<Point>& pts_;
    double cell_;
    std::vector<std::int64_t> lo_, hi_;
    std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, Hash> buckets_;
};

}  // namespace

std::vector<HolderEstimate> root_holder(const Decomposition& d, const std::vector<Point>& pts, double exponent) {
    const std::size_t n = d.f->arity();
    const std::size_t comps = n * (n + 1) / 2;
    const std::size_t G = d.groups();
    const auto hess = root_hessians(d, pts);
    std::vector<std::vector<double>> vals(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) d.evaluate(pts[p], vals[p]);

    // bucket size near the mean spacing
    double extent = 0.0;
    for (const auto& x : pts) extent = std::max(extent, distance(x, d.params.region.center));
    const double cell = std::max(2.0 * extent / std::pow(static_cast<double>(std::max<std::size_t>(pts.size(), 1)),
                                                         1.0 / static_cast<double>(n)),
                                 1e-12);
    PointGrid grid(pts, cell);

    std::vector<HolderEstimate> est(G);
    std::vector<char> active(pts.size());
    auto update = [&](HolderEstimate& e, std::size_t i, std::size_t j, double diff, double dist) {
        ++e.pairs;
        const double q = diff / std::pow(dist, exponent);
        if (q > e.seminorm) {
            e.seminorm = q;
            e.y = pts[i];
            e.z = pts[j];
        }
    };
    for (std::size_t k = 0; k < G; ++k) {
        auto& e = est[k];
        e.order = 2;
        e.exponent = exponent;
        e.sup_norms.assign(3, 0.0);
        std::vector<std::size_t> act;
        for (std::size_t p = 0; p < pts.size(); ++p) {
            bool any = false;
            e.sup_norms[0] = std::max(e.sup_norms[0], std::fabs(vals[p][k]));
            for (std::size_t c = 0; c < comps; ++c) {
                const double v = hess[p][k * comps + c];
                any = any || v != 0.0;
                e.sup_norms[2] = std::max(e.sup_norms[2], std::fabs(v));
            }
            active[p] = any;
            if (any) act.push_back(p);
        }
        for (std::size_t a = 0; a < act.size(); ++a) {
            const std::size_t i = act[a];
            for (std::size_t b = a + 1; b < act.size(); ++b) {
                const std::size_t j = act[b];
                const double dist = distance(pts[i], pts[j]);
                if (dist <= 0.0) continue;
                double diff = 0.0;
                for (std::size_t c = 0; c < comps; ++c)
                    diff = std::max(diff, std::fabs(hess[i][k * comps + c] - hess[j][k * comps + c]));
                update(e, i, j, diff, dist);
            }
            // against points where D^2 g vanishes the quotient only falls with distance,
            // so the nearest such point attains the sup over all of them
            double dist = 0.0;
            if (act.size() < pts.size() && grid.nearest(i, [&](std::size_t j) { return !active[j]; }, &dist) &&
                dist > 0.0) {
                double mag = 0.0;
                for (std::size_t c = 0; c < comps; ++c) mag = std::max(mag, std::fabs(hess[i][k * comps + c]));
                e.pairs += pts.size() - act.size();
                const double q = mag / std::pow(dist, exponent);
                if (q > e.seminorm) {
                    e.seminorm = q;
                    e.y = pts[i];
                }
            }
        }
    }
    return est;
}

VerificationStats verify_decomposition(const Decomposition& d, const std::vector<Point>& grid,
                                       std::size_t holder_samples) {
    VerificationStats st;
    const ControlDistanceParams cp{d.params.delta, RhoVariant::full};
    double total = 0.0;
    for (const auto& x : grid) {
        const double fx = d.f->value(x);
        if (control_distance(*d.f, x, cp) < d.params.floor) {
            ++st.points_excluded;
            st.boundary_layer = std::max(st.boundary_layer, std::fabs(fx));
            continue;
        }
        const double r = std::fabs(fx - d.sum_squares(x));
        ++st.points_used;
        total += r;
        st.sup_residual = std::max(st.sup_residual, r);
        st.sup_f = std::max(st.sup_f, std::fabs(fx));
    }
    st.empty = st.points_used == 0;
    st.mean_residual = st.empty ? 0.0 : total / static_cast<double>(st.points_used);
    if (holder_samples > 0) {
        std::vector<Point> pts;
        for (auto& x : region_samples(d.params.region, holder_samples))
            if (control_distance(*d.f, x, cp) >= d.params.floor) pts.push_back(std::move(x));
        st.holder = root_holder(d, pts, d.final_delta());
    }
    return st;
}

Report verify_case_ii_identity(const ImplicitFrame& frame, std::size_t samples) {
    Report rep;
    rep.op = "case_ii_identity";
    const std::size_t n = frame.dim();
    double hmin = std::numeric_limits<double>::infinity();
    Ball local{Point(n, 0.0), frame.radius()};
    for (const auto& y : region_samples(local, samples)) {
        const Point xi(y.begin(), y.end() - 1);
        const double x0 = frame.X(xi);
        const double h = frame.H(xi, y.back());
        hmin = std::min(hmin, h);
        const double lhs = frame.f_local(y) - frame.F(xi) - h * (y.back() - x0) * (y.back() - x0);
        if (std::fabs(lhs) > rep.ratio) {
            rep.ratio = std::fabs(lhs);
            rep.worst_point = frame.to_global(y);
        }
        if (std::fabs(lhs) > 1e-10) rep.record_violation(frame.to_global(y));
    }
    rep.constants["max_abs_defect"] = rep.ratio;
    rep.constants["H_min"] = hmin;
    rep.passed = rep.violations == 0;
    return rep;
}

Report verify_crucial_inequality(const Decomposition& d, std::size_t samples_per_cell) {
    Report rep;
    rep.op = "crucial_inequality";
    rep.function = d.f->name();
    for (const auto& cd : d.cells) {
        if (cd.cls.kind != CellCase::II || d.f->arity() < 2) continue;
        const std::size_t m = d.f->arity() - 1;
        Ball local{Point(m, 0.0), cd.frame->radius()};
        for (const auto& xi : region_samples(local, samples_per_cell)) {
            const double lhs = std::max(0.0, lambda_max(cd.frame->F_hessian(xi), m));
            Point y = xi;
            y.push_back(cd.frame->X(xi));
            const double rhs = directional_hessian_plus(*d.f, cd.frame->to_global(y));
            const double r = safe_ratio(lhs, rhs);
            if (r > rep.ratio) {
                rep.ratio = r;
                rep.worst_point = cd.frame->to_global(y);
            }
        }
    }
    rep.constants["C"] = rep.ratio;
    rep.passed = std::isfinite(rep.ratio);
    return rep;
}

}  // namespace sosreg
