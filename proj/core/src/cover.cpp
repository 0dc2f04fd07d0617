#include "sosreg/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sosreg/calculus.hpp"

namespace sosreg {

void ControlDistanceParams::validate() const {
    if (!(delta > 0.0 && delta <= 0.5)) throw PreconditionError("control distance: delta must lie in (0, 1/2]");
}

RhoTerms control_distance_terms(const FunctionHandle& f, const Point& x, const ControlDistanceParams& p,
                                double amplitude) {
    p.validate();
    const double d = p.delta;
    RhoTerms t;
    const double v = f.value(x) / amplitude;
    if (!std::isfinite(v)) throw NumericalError("control distance: value not finite at " + format_point(x));
    t.value = std::pow(std::max(v, 0.0), 1.0 / (4.0 + 2.0 * d));
    t.hessian = std::pow(directional_hessian_plus(f, x) / amplitude, 1.0 / (2.0 + 2.0 * d));
    if (p.variant == RhoVariant::full) {
        const double m4 = f.max_derivative(x, 4) / amplitude;
        if (!std::isfinite(m4)) throw NumericalError("control distance: D^4 f not finite at " + format_point(x));
        t.fourth = std::pow(m4, 1.0 / (2.0 * d));
    }
    t.rho = t.value;
    if (t.hessian > t.rho) {
        t.rho = t.hessian;
        t.dominant = 1;
    }
    if (t.fourth > t.rho) {
        t.rho = t.fourth;
        t.dominant = 2;
    }
    return t;
}

double control_distance(const FunctionHandle& f, const Point& x, const ControlDistanceParams& p) {
    return control_distance_terms(f, x, p).rho;
}

double slow_variation_constant(double delta) { return std::pow(0.5, 1.0 / (4.0 + 2.0 * delta)); }

Report verify_slowly_varying(const FunctionHandle& f, const ControlDistanceParams& p, const Ball& region,
                             std::size_t samples) {
    p.validate();
    const std::size_t n = f.arity();
    Report rep;
    rep.op = "slowly_varying";
    rep.function = f.name();
    rep.region = region;

    double m4 = 0.0;
    Ball wide{region.center, region.radius * 1.05};
    for (const auto& x : region_samples(wide, std::max<std::size_t>(samples / 2, 400))) {
        double v = f.max_derivative(x, 4);
        if (!std::isfinite(v)) throw PreconditionError("slowly_varying: D^4 f unbounded near " + format_point(x));
        m4 = std::max(m4, v);
    }
    const double amp = m4 > 0.0 ? m4 : 1.0;
    rep.constants["fourth_derivative_sup"] = m4;
    rep.notes.push_back("amplitude normalized by sup|D^4 f|; r_delta uses the value and Hessian terms");

    const ControlDistanceParams q{p.delta, RhoVariant::reduced};
    const double c = slow_variation_constant(p.delta);
    rep.constants["bound_constant"] = c;

    std::size_t pairs = 0;
    const auto xs = region_samples(region, samples);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Point& x = xs[i];
        const double rx = control_distance_terms(f, x, q, amp).rho;
        if (rx <= 0.0) continue;
        Point h = halton(i + 1, n + 1, 7);
        Point u(n);
        double len = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            u[k] = 2.0 * h[k] - 1.0;
            len += u[k] * u[k];
        }
        len = std::sqrt(len);
        if (n == 1) {
            u[0] = (i % 2 == 0) ? 1.0 : -1.0;
            len = 1.0;
        }
        if (len < 1e-12) continue;
        const double step = rx / 200.0 * std::max(h[n], 1e-3);
        Point y = x;
        for (std::size_t k = 0; k < n; ++k) y[k] += step * u[k] / len;
        const double ry = control_distance_terms(f, y, q, amp).rho;
        ++pairs;
        const double lhs = std::fabs(rx - ry);
        const double rhs = c * rx;
        const double ratio = lhs / rhs;
        if (ratio > rep.ratio) {
            rep.ratio = ratio;
            rep.worst_point = x;
        }
        if (lhs > rhs * (1.0 + 1e-9) + 1e-15) rep.record_violation(x);
    }
    rep.constants["pairs"] = static_cast<double>(pairs);
    rep.passed = rep.violations == 0;
    return rep;
}

std::size_t BallIndex::KeyHash::operator()(const Key& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto v : k) {
        std::uint64_t z = static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        h ^= z ^ (z >> 31);
    }
    return static_cast<std::size_t>(h);
}

void BallIndex::insert(const Point& center, double radius, std::uint32_t id) {
    if (center.size() != dim_) throw PreconditionError("BallIndex: dimension mismatch");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw PreconditionError("BallIndex: radius must be positive");
    const int lvl = static_cast<int>(std::ceil(std::log2(radius)));
    Level& L = levels_[lvl];
    L.cell = std::ldexp(1.0, lvl);
    L.max_radius = std::max(L.max_radius, radius);
    Key k(dim_);
    for (std::size_t i = 0; i < dim_; ++i) k[i] = static_cast<std::int64_t>(std::floor(center[i] / L.cell));
    L.buckets[k].push_back(static_cast<std::uint32_t>(L.entries.size()));
    L.entries.push_back(Entry{center, radius, id});
    ++count_;
}

void BallIndex::query(const Point& x, double extra, const std::function<void(std::uint32_t)>& visit) const {
    for (const auto& [lvl, L] : levels_) {
        (void)lvl;
        auto test = [&](const Entry& e) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) d2 += (x[i] - e.center[i]) * (x[i] - e.center[i]);
            const double reach = e.radius + extra;
            if (d2 < reach * reach) visit(e.id);
        };
        const auto k = static_cast<std::int64_t>(std::ceil((L.max_radius + extra) / L.cell));
        const double span = std::pow(2.0 * static_cast<double>(k) + 1.0, static_cast<double>(dim_));
        if (span >= static_cast<double>(L.buckets.size())) {
            for (const auto& e : L.entries) test(e);
            continue;
        }
        Key base(dim_), cur(dim_);
        for (std::size_t i = 0; i < dim_; ++i) base[i] = static_cast<std::int64_t>(std::floor(x[i] / L.cell));
        std::vector<std::int64_t> off(dim_, -k);
        while (true) {
            for (std::size_t i = 0; i < dim_; ++i) cur[i] = base[i] + off[i];
            auto it = L.buckets.find(cur);
            if (it != L.buckets.end())
                for (auto e : it->second) test(L.entries[e]);
            std::size_t i = 0;
            while (i < dim_ && off[i] == k) off[i++] = -k;
            if (i == dim_) break;
            ++off[i];
        }
    }
}

namespace {

Point project_to_ball(const Point& c, const Ball& b) {
    const double d = distance(c, b.center);
    if (d <= b.radius) return c;
    Point p = b.center;
    for (std::size_t i = 0; i < c.size(); ++i) p[i] += (c[i] - b.center[i]) * (b.radius / d);
    return p;
}

}  // namespace

std::vector<CoverCell> build_cover(const FunctionHandle& f, const ControlDistanceParams& p, const Ball& region,
                                   double s, double floor, const CoverOptions& opt) {
    p.validate();
    if (!(s > 0.0 && s <= 1.0 / 200.0)) throw PreconditionError("build_cover: s must lie in (0, 1/200]");
    if (!(floor > 0.0)) throw PreconditionError("build_cover: floor must be positive");
    const std::size_t n = region.dim();
    if (n != f.arity()) throw PreconditionError("build_cover: region dimension mismatch");

    struct Cube {
        Point c;
        double half;
    };
    struct Candidate {
        Point x;
        double rho;
    };
    const double diag = std::sqrt(static_cast<double>(n));
    std::vector<Cube> stack{Cube{region.center, region.radius}};
    std::vector<Candidate> cand;
    std::size_t visited = 0;
    while (!stack.empty()) {
        Cube q = std::move(stack.back());
        stack.pop_back();
        if (++visited > 4 * opt.budget || cand.size() > opt.budget)
            throw BudgetError("build_cover: cell budget exceeded (floor too small?)", cand.size());
        double gap2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double g = std::max(std::fabs(q.c[i] - region.center[i]) - q.half, 0.0);
            gap2 += g * g;
        }
        if (std::sqrt(gap2) >= region.radius) continue;
        const Point x = project_to_ball(q.c, region);
        const double rho = control_distance(f, x, p);
        const double half_diag = q.half * diag;
        if (half_diag <= s * rho / 4.0) {
            if (rho >= floor / 2.0) cand.push_back(Candidate{x, rho});
            continue;
        }
        if (half_diag <= s * floor / 8.0) continue;
        const double h = q.half / 2.0;
        for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
            Cube child{q.c, h};
            for (std::size_t i = 0; i < n; ++i) child.c[i] += ((m >> i) & 1U) ? h : -h;
            stack.push_back(std::move(child));
        }
    }

    std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) { return a.rho > b.rho; });
    std::vector<CoverCell> cells;
    BallIndex index(n);
    for (auto& c : cand) {
        bool covered = false;
        index.query(c.x, 0.0, [&](std::uint32_t id) {
            if (distance(c.x, cells[id].center) < cells[id].radius / 2.0) covered = true;
        });
        if (covered) continue;
        CoverCell cell;
        cell.index = cells.size();
        cell.center = c.x;
        cell.rho = c.rho;
        cell.radius = s * c.rho;
        index.insert(cell.center, cell.radius, static_cast<std::uint32_t>(cell.index));
        cells.push_back(std::move(cell));
    }
    return cells;
}

double bump_profile(double u) {
    if (u <= 0.5) return 1.0;
    if (u >= 1.0) return 0.0;
    const double v = 2.0 * u - 1.0;
    const double e = 1.0 / (1.0 - v) - 1.0 / v;
    if (e > 700.0) return 0.0;
    return 1.0 / (1.0 + std::exp(e));
}

Partition::Partition(std::vector<CoverCell> cells)
    : cells_(std::move(cells)), dim_(cells_.empty() ? 0 : cells_.front().center.size()), index_(dim_) {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i].center.size() != dim_) throw PreconditionError("Partition: mixed cell dimensions");
        index_.insert(cells_[i].center, cells_[i].radius, static_cast<std::uint32_t>(i));
    }
}

double Partition::chi(std::size_t nu, const Point& x) const {
    const auto& c = cells_.at(nu);
    return bump_profile(distance(x, c.center) / c.radius);
}

void Partition::for_each_cell_near(const Point& x, double extra, const std::function<void(std::size_t)>& visit) const {
    index_.query(x, extra, [&](std::uint32_t id) { visit(id); });
}

Partition::Local Partition::at(const Point& x, bool require) const {
    Local loc;
    index_.query(x, 0.0, [&](std::uint32_t id) {
        const double c = chi(id, x);
        if (c > 0.0) {
            loc.cells.push_back(id);
            loc.phi.push_back(c);
        }
    });
    // index order is not deterministic across levels; sort by cell id
    std::vector<std::size_t> perm(loc.cells.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return loc.cells[a] < loc.cells[b]; });
    Local out;
    for (auto i : perm) {
        out.cells.push_back(loc.cells[i]);
        out.phi.push_back(loc.phi[i]);
        out.sum_chi2 += loc.phi[i] * loc.phi[i];
    }
    if (out.sum_chi2 <= 0.0) {
        if (require) throw NumericalError("partition: coverage hole at " + format_point(x));
        out.cells.clear();
        out.phi.clear();
        return out;
    }
    const double norm = std::sqrt(out.sum_chi2);
    for (double& v : out.phi) v /= norm;
    return out;
}

double Partition::phi(std::size_t nu, const Point& x) const {
    if (chi(nu, x) == 0.0) return 0.0;
    Local loc = at(x);
    for (std::size_t i = 0; i < loc.cells.size(); ++i)
        if (loc.cells[i] == nu) return loc.phi[i];
    return 0.0;
}

Report verify_partition(const Partition& part, const std::vector<Point>& points) {
    Report rep;
    rep.op = "partition";
    double dev = 0.0;
    std::size_t overlap = 0;
    for (const auto& x : points) {
        auto loc = part.at(x);
        if (loc.cells.empty()) {
            rep.record_violation(x);
            continue;
        }
        double s = 0.0;
        for (double v : loc.phi) s += v * v;
        if (std::fabs(s - 1.0) > dev) {
            dev = std::fabs(s - 1.0);
            rep.worst_point = x;
        }
        overlap = std::max(overlap, loc.cells.size());
    }
    rep.ratio = dev;
    rep.constants["max_sum_deviation"] = dev;
    rep.constants["max_overlap"] = static_cast<double>(overlap);
    rep.constants["holes"] = static_cast<double>(rep.violations);
    rep.constants["cells"] = static_cast<double>(part.size());
    if (dev > 1e-10) rep.notes.push_back("sum of squares deviates from 1 beyond 1e-10");
    rep.passed = rep.violations == 0 && dev <= 1e-10;
    return rep;
}

int color_classes(std::vector<CoverCell>& cells) {
    if (cells.empty()) return 0;
    BallIndex index(cells.front().center.size());
    int classes = 0;
    std::vector<char> used;
    for (std::size_t nu = 0; nu < cells.size(); ++nu) {
        auto& c = cells[nu];
        used.assign(static_cast<std::size_t>(classes) + 1, 0);
        // closed tripled balls: touching counts as intersecting
        const double extra = 3.0 * c.radius * (1.0 + 1e-12);
        index.query(c.center, extra, [&](std::uint32_t id) { used[static_cast<std::size_t>(cells[id].color)] = 1; });
        int col = 0;
        while (used[static_cast<std::size_t>(col)]) ++col;
        c.color = col;
        classes = std::max(classes, col + 1);
        index.insert(c.center, 3.0 * c.radius * (1.0 + 1e-12), static_cast<std::uint32_t>(nu));
    }
    return classes;
}

}  // namespace sosreg
