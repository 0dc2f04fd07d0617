// Runs the twelve acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ld_catalog.hpp"
#include "oracle.hpp"
#include "sosreg/calculus.hpp"
#include "sosreg/catalog.hpp"
#include "sosreg/counterex.hpp"
#include "sosreg/cover.hpp"
#include "sosreg/monotone.hpp"
#include "sosreg/roots.hpp"
#include "sosreg/sos.hpp"

using namespace sosreg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Result {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

FunctionPtr fn(const std::string& text, std::vector<std::string> vars) { return make_function(text, vars); }

std::vector<Point> line_grid(double a, double b, std::size_t n) {
    std::vector<Point> pts;
    for (double t : linspace(a, b, n)) pts.push_back({t});
    return pts;
}

// The four decomposition cases shared by criteria 2, 3 and 12.
struct Case {
    std::string label;
    FunctionPtr f;
    DecomposeParams params;
    std::vector<Point> grid;
    std::shared_ptr<const Decomposition> d;
    double build_seconds = 0.0;
};

std::vector<Case> decomposition_cases() {
    std::vector<Case> cases;
    auto add = [&](std::string label, FunctionPtr f, Ball region, bool override_ineq, std::vector<Point> grid) {
        Case c;
        c.label = std::move(label);
        c.f = std::move(f);
        c.params.delta = 0.25;
        c.params.eta = 0.3;
        c.params.floor = 1e-3;
        c.params.region = std::move(region);
        c.params.override_inequalities = override_ineq;
        c.grid = std::move(grid);
        cases.push_back(std::move(c));
    };
    add("4", fn("4 + 0*x", {"x"}), Ball{{0.0}, 1.0}, false, line_grid(-0.999, 0.999, 4001));
    // x^2 and x^2+y^2 fail the Hessian inequality at the zero, so the precondition is overridden
    add("x^2", fn("x^2", {"x"}), Ball{{0.0}, 1.0}, true, line_grid(-0.999, 0.999, 4001));
    add("x^2+y^2", fn("x^2 + y^2", {"x", "y"}), Ball{{0.0, 0.0}, 0.03}, true,
        region_samples(Ball{{0.0, 0.0}, 0.03}, 4000));
    add("x^4+y^4+0.1", fn("x^4 + y^4 + 0.1", {"x", "y"}), Ball{{0.0, 0.0}, 1.0}, false,
        region_samples(Ball{{0.0, 0.0}, 1.0}, 4000));
    return cases;
}

void build(Case& c) {
    if (c.d) return;
    const auto t0 = Clock::now();
    c.d = decompose(c.f, c.params);
    c.build_seconds = seconds_since(t0);
}

// 1. Sum of Phi^2 on three covers.
Result partition_of_unity() {
    Result r;
    const auto t0 = Clock::now();
    const double s = 1.0 / 200.0, floor = 1e-3;
    const ControlDistanceParams p{0.25};
    struct Cover {
        std::string label;
        FunctionPtr f;
        Ball region;
    };
    const std::vector<Cover> covers = {{"constant", fn("1 + 0*x", {"x"}), Ball{{0.0}, 1.0}},
                                       {"x^2", fn("x^2", {"x"}), Ball{{0.0}, 1.0}},
                                       {"x^2+y^2", fn("x^2 + y^2", {"x", "y"}), Ball{{0.0, 0.0}, 0.25}}};
    double worst = 0.0;
    for (const auto& c : covers) {
        Partition part(build_cover(*c.f, p, c.region, s, floor));
        std::vector<Point> pts = c.region.dim() == 1 ? line_grid(-1.0, 1.0, 10000) : ball_grid(c.region, 114);
        // the covered region is where the control distance reaches the floor
        std::erase_if(pts, [&](const Point& x) { return control_distance(*c.f, x, p) < floor; });
        double dev = 0.0;
        std::size_t holes = 0;
        for (const auto& x : pts) {
            const auto loc = part.at(x);
            if (loc.cells.empty()) {
                ++holes;
                continue;
            }
            double sum = 0.0;
            for (double v : loc.phi) sum += v * v;
            dev = std::max(dev, std::fabs(sum - 1.0));
        }
        worst = std::max(worst, dev);
        r.detail << " " << c.label << ": " << part.size() << " cells, " << pts.size() << " points, max|sum-1| "
                 << dev << ";";
        r.require(pts.size() >= 10000, c.label + " has fewer than 10^4 covered grid points");
        r.require(holes == 0, c.label + " has uncovered points");
        r.require(dev <= 1e-10, c.label + " deviation above 1e-10");
    }
    const double secs = seconds_since(t0);
    r.detail << " " << secs << " s";
    r.require(secs < 10.0, "runtime");
    return r;
}

// 2. Residual of the decomposition.
Result residual(std::vector<Case>& cases) {
    Result r;
    for (auto& c : cases) {
        const auto t0 = Clock::now();
        build(c);
        const VerificationStats v = verify_decomposition(*c.d, c.grid);
        const double secs = c.build_seconds + seconds_since(t0);
        const double bound = 1e-6 * (1.0 + v.sup_f);
        r.detail << " " << c.label << ": " << v.sup_residual << " <= " << bound << " (" << v.points_used << " pts, "
                 << c.d->groups() << " groups, " << secs << " s);";
        r.require(!v.empty, c.label + " empty verification grid");
        r.require(v.sup_residual <= bound, c.label + " residual");
        r.require(secs < 60.0, c.label + " runtime");
    }
    return r;
}

void case_ii_frames(const Decomposition& d, std::vector<std::shared_ptr<const ImplicitFrame>>& out) {
    for (const auto& cell : d.cells) {
        if (cell.frame) out.push_back(cell.frame);
        if (cell.remainder) case_ii_frames(*cell.remainder, out);
    }
}

// 3. f - F - H (y_n - X)^2 on every Case II cell of the 2D test.
Result case_ii_identity(std::vector<Case>& cases) {
    Result r;
    Case& c = cases[2];
    build(c);
    std::vector<std::shared_ptr<const ImplicitFrame>> frames;
    case_ii_frames(*c.d, frames);
    double worst = 0.0;
    std::size_t top = 0;
    for (const auto& fr : frames) {
        const Report rep = verify_case_ii_identity(*fr, 1000);
        worst = std::max(worst, rep.constants.at("max_abs_defect"));
        top += fr->dim() == 2;
    }
    r.detail << " " << frames.size() << " Case II frames (" << top << " in 2D), max defect " << worst;
    r.require(top > 0, "no Case II cell in 2D");
    r.require(worst <= 1e-10, "defect above 1e-10");
    return r;
}

// 4. Inequalities with constants 8/3, 8 (24 combined) and 5/3.
Result odd_even() {
    Result r;
    for (const char* name : {"motzkin_M", "quartic_L", "flat_exp_sq", "flat_exp", "bump_h"}) {
        auto f = make_function(catalog_function(name));
        const Report rep = verify_odd_even_control(*f, f->domain(), 10000);
        r.detail << " " << name << ": ratio " << rep.ratio << ", " << rep.violations << " violations;";
        r.require(rep.violations == 0, std::string(name) + " violations");
    }
    return r;
}

// 5. Slow variation of r_delta.
Result slow_variation() {
    Result r;
    struct Item {
        std::string label;
        FunctionPtr f;
        Ball region;
    };
    const std::vector<Item> items = {{"x^4/24", fn("x^4/24", {"x"}), Ball{{0.0}, 1.0}},
                                     {"exp(-1/t^2) on [0.05,1]", make_function(catalog_function("flat_exp_sq")),
                                      Ball{{0.525}, 0.475}}};
    for (const auto& it : items)
        for (double delta : {0.1, 0.25, 0.45}) {
            const Report rep = verify_slowly_varying(*it.f, {delta}, it.region, 10000);
            const double pairs = rep.constants.at("pairs");
            r.detail << " " << it.label << " d=" << delta << ": " << pairs << " pairs, " << rep.violations
                     << " violations;";
            r.require(pairs >= 9990, "pair count");
            r.require(rep.violations == 0, it.label + " violations");
        }
    return r;
}

// 6. delta_sequence(0.4, 0.3, 5).
Result delta_recursion() {
    Result r;
    const auto t0 = Clock::now();
    const std::vector<double> d = delta_sequence(0.4, 0.3, 5);
    const double secs = seconds_since(t0);
    const double lo = 0.8 * std::pow(0.5, 4) * 0.4, hi = 1.25 * std::pow(0.6, 4) * 0.4;
    r.detail << " delta_4 = " << d.back() << " in [" << lo << ", " << hi << "], " << secs * 1e3 << " ms";
    r.require(d.size() == 5, "length");
    r.require(d.back() >= lo && d.back() <= hi, "outside the sandwich");
    r.require(secs < 1e-3, "runtime");
    return r;
}

// 7. s0 and the T verdict flip.
Result threshold() {
    Result r;
    const auto t0 = Clock::now();
    const double s0 = threshold_s0();
    FamilyParams p;
    p.phi = default_phi();
    const double g1 = gamma_alpha(1.0);
    const auto grid = dyadic_grid(std::pow(10.0, -2.5));
    const FunctionalReport lo = functional(p, 'T', g1, Modulus::power(0.6), grid);
    const FunctionalReport hi = functional(p, 'T', g1, Modulus::power(0.75), grid);
    const double secs = seconds_since(t0);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5f", s0);
    r.detail << " s0 = " << buf << ", T(s=0.6) " << (lo.divergent ? "divergent" : "finite") << ", T(s=0.75) "
             << (hi.divergent ? "divergent" : "finite") << ", " << secs << " s";
    r.require(std::fabs(s0 - 0.68629) <= 1e-5, "s0");
    r.require(!lo.divergent && hi.divergent, "verdict flip");
    r.require(secs < 5.0, "runtime");
    return r;
}

// 8. Symbolic and composition derivatives against long double finite differences.
Result derivative_oracles() {
    Result r;
    const auto t0 = Clock::now();
    std::size_t checked = 0, bad = 0;
    double worst = 0.0;
    std::string worst_at;
    auto compare = [&](double v, double ref, const std::string& where) {
        ++checked;
        const double err = std::fabs(v - ref) / std::max(1.0, std::fabs(ref));
        if (err > worst) {
            worst = err;
            worst_at = where;
        }
        if (!(err <= 1e-5)) ++bad;
    };
    for (const auto& entry : list_catalog()) {
        const std::string name = entry.name;
        auto f = make_function(catalog_function(name));
        const Ball inner{f->domain().center, 0.9 * f->domain().radius};
        auto raw = [&](const auto& x) { return ldcat::value(name, x); };
        for (const auto& x : ball_samples(inner, 100)) {
            const ldcat::LPoint lx(x.begin(), x.end());
            compare(f->value(x), static_cast<double>(ldcat::value(name, lx)), name + " value");
            for (int m = 1; m <= 4; ++m)
                for (const auto& a : indices_of_order(f->arity(), m))
                    compare(f->derivative(x, a), ldcat::fd_reference(raw, x, std::vector<int>(a.begin(), a.end())),
                            name + " " + format_point(x));
        }
        // composition formula for f^gamma where f is bounded away from zero
        std::vector<Point> pos;
        for (const auto& x : ball_samples(inner, 4000)) {
            if (f->value(x) > 0.05) pos.push_back(x);
            if (pos.size() == 100) break;
        }
        for (double gamma : {0.5, 1.0 / 3.0}) {
            PowerHandle ph(f, gamma, 4);
            auto pw = [&](const auto& x) {
                using T = typename std::decay_t<decltype(x)>::value_type;
                return ldcat::m_pow(ldcat::value(name, x), T(gamma));
            };
            for (const auto& x : pos)
                for (int m = 1; m <= 4; ++m)
                    for (const auto& a : indices_of_order(f->arity(), m))
                        compare(power_derivative(ph, x, a),
                                ldcat::fd_reference(pw, x, std::vector<int>(a.begin(), a.end())),
                                name + "^" + std::to_string(gamma) + " " + format_point(x));
        }
    }
    const double secs = seconds_since(t0);
    r.detail << " " << checked << " comparisons, " << bad << " above 1e-5, worst " << worst << " (" << worst_at
             << "), " << secs << " s";
    r.require(bad == 0, "derivative mismatch");
    r.require(secs < 30.0, "runtime");
    return r;
}

double newton(const std::function<double(double)>& g, double x) {
    for (int i = 0; i < 100; ++i) {
        const double h = 1e-7 * std::max(1.0, std::fabs(x));
        const double dx = g(x) / ((g(x + h) - g(x - h)) / (2.0 * h));
        x -= dx;
        if (std::fabs(dx) < 1e-15 * std::max(1.0, std::fabs(x))) break;
    }
    return x;
}

// 9. Second derivatives of implicit roots.
Result implicit_function() {
    Result r;
    double worst = 0.0;
    std::size_t checked = 0;
    auto compare = [&](double v, double ref) {
        ++checked;
        worst = std::max(worst, std::fabs(v - ref) / (1.0 + std::fabs(ref)));
    };
    {
        auto G = fn("x^3 + xi*x - xi^2", {"xi", "x"});
        auto root = [](double xi) { return newton([xi](double x) { return x * x * x + xi * x - xi * xi; }, 0.7); };
        oracle::Fn hf = [&](const std::vector<double>& v) { return root(v[0]); };
        for (double xi : {0.6, 1.0, 1.4}) {
            const ImplicitDerivatives d = implicit_derivatives(implicit_partials(*G, {xi, root(xi)}));
            compare(d.second[0], oracle::extrapolated(hf, {xi}, {2}, 0.05));
        }
    }
    {
        auto G = fn("x + 0.5*sin(x) + x^3 - a*b - 0.3*b^2 + 0.2*a", {"a", "b", "x"});
        auto root = [](double a, double b) {
            return newton([=](double x) { return x + 0.5 * std::sin(x) + x * x * x - a * b - 0.3 * b * b + 0.2 * a; },
                          0.0);
        };
        oracle::Fn hf = [&](const std::vector<double>& v) { return root(v[0], v[1]); };
        const std::vector<std::vector<int>> second{{2, 0}, {1, 1}, {1, 1}, {0, 2}};
        for (const Point& p : std::vector<Point>{{0.3, 0.7}, {-0.5, 0.2}, {1.1, -0.9}}) {
            const ImplicitDerivatives d = implicit_derivatives(implicit_partials(*G, {p[0], p[1], root(p[0], p[1])}));
            for (int k = 0; k < 4; ++k) compare(d.second[k], oracle::extrapolated(hf, p, second[k], 0.05));
        }
    }
    r.detail << " " << checked << " second derivatives on 2 cases, worst " << worst;
    r.require(worst <= 1e-6, "mismatch above 1e-6");
    return r;
}

// 10. Closed form of the monotone functional and the witness shapes.
Result monotone_closed_form() {
    Result r;
    MonotoneOptions o;
    o.one_sided = true;
    const MonotoneReport m = monotone_functional(*fn("x", {"x"}), Modulus::power(0.5), o);
    r.detail << " f=x, omega_0.5: " << m.estimate << ";";
    r.require(std::fabs(m.estimate - 1.0) <= 1e-3, "closed form");

    const FamilyParams p = default_family(0.6, 0.5);
    const Point e1{1.0, 0.0, 0.0, 0.0};
    const double g1 = gamma_alpha(1.0);
    struct Shape {
        std::string label;
        double s;
        std::function<WitnessPair(double)> pair;
        std::function<double(const Modulus&, double)> integrand;
    };
    const std::vector<Shape> shapes = {
        {"S(1/2)", 0.5, [&](double t) { return witness_s(t, e1); },
         [&](const Modulus& mo, double t) { return functional_log_integrand(p, 'S', 0.5, mo, t); }},
        {"T(gamma_1)", 0.6, [&](double t) { return witness_t(t, e1); },
         [&](const Modulus& mo, double t) { return functional_log_integrand(p, 'T', g1, mo, t); }}};
    for (const auto& sh : shapes) {
        const Modulus mo = Modulus::power(sh.s);
        std::vector<double> gap;
        for (double t : descending_geometric(0.5, 0.05, 4))
            gap.push_back(witness_log_ratio(p, mo, sh.pair(t)) - sh.integrand(mo, t));
        std::vector<double> sorted = gap;
        std::sort(sorted.begin(), sorted.end());
        const double fitted = sorted[sorted.size() / 2];
        double spread = 0.0;
        for (double v : gap) spread = std::max(spread, std::fabs(v - fitted));
        r.detail << " " << sh.label << ": fitted constant " << std::exp(fitted) << ", max log deviation " << spread
                 << " over " << gap.size() << " t in [0.05, 0.5];";
        r.require(spread <= std::log(2.0), sh.label + " shape");
    }
    return r;
}

double quartic(const Point& v) { return quartic_L(v); }

Point quartic_gradient(const Point& v) {
    const double w = v[0], x = v[1], y = v[2], z = v[3];
    return {4 * w * w * w - 2 * x * y * z, 2 * x * (y * y + z * z) - 2 * w * y * z, 2 * y * (x * x + z * z) - 2 * w * x * z,
            2 * z * (x * x + y * y) - 2 * w * x * y};
}

// 11. delta_nu positivity and the zero set of L on the sphere.
Result delta_nu() {
    Result r;
    const auto t0 = Clock::now();
    DeltaNuOptions o;
    o.restarts = 20;
    o.seed = 1;
    const DeltaNuReport a = estimate_delta_nu(1, 3.0, o);
    o.seed = 2;
    const DeltaNuReport b = estimate_delta_nu(1, 3.0, o);
    r.detail << " delta_1 = " << a.estimate << " / " << b.estimate << " (seeds 1, 2), stable fractions "
             << a.stable_fraction << " / " << b.stable_fraction << ";";
    r.require(a.estimate > 0.0 && b.estimate > 0.0, "positivity");
    r.require(std::fabs(a.estimate - b.estimate) <= 0.2 * std::min(a.estimate, b.estimate), "seed stability");
    r.require(!a.stalled && !b.stalled, "restart stability");

    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss;
    std::vector<std::pair<double, Point>> samples;
    for (int i = 0; i < 10000; ++i) {
        Point v(4);
        for (auto& c : v) c = gauss(rng);
        const double n = norm(v);
        for (auto& c : v) c /= n;
        samples.emplace_back(quartic(v), v);
    }
    std::sort(samples.begin(), samples.end(), [](const auto& l, const auto& rr) { return l.first < rr.first; });
    r.detail << " min L over 10^4 sphere samples " << samples.front().first << ";";
    r.require(samples.front().first >= 0.0, "negative sample");

    // descend on the sphere from the lowest samples; every zero found must have w = 0
    // and at most one of x, y, z nonzero
    std::size_t zeros = 0, structured = 0;
    double lowest = 1.0;
    for (std::size_t k = 0; k < 50; ++k) {
        Point v = samples[k].second;
        for (int it = 0; it < 20000; ++it) {
            Point g = quartic_gradient(v);
            double radial = 0.0;
            for (int i = 0; i < 4; ++i) radial += g[i] * v[i];
            for (int i = 0; i < 4; ++i) v[i] -= 0.05 * (g[i] - radial * v[i]);
            const double n = norm(v);
            for (auto& c : v) c /= n;
        }
        const double L = quartic(v);
        lowest = std::min(lowest, L);
        if (L < 1e-10) {
            ++zeros;
            std::vector<double> xyz{std::fabs(v[1]), std::fabs(v[2]), std::fabs(v[3])};
            std::sort(xyz.begin(), xyz.end());
            if (std::fabs(v[0]) <= 1e-2 && xyz[1] <= 1e-3) ++structured;
        }
    }
    const double secs = seconds_since(t0);
    r.detail << " 50 local descents: min " << lowest << ", " << zeros << " zeros, " << structured
             << " at +-e_x, +-e_y, +-e_z; " << secs << " s";
    r.require(lowest >= -1e-14, "negative local minimum");
    r.require(zeros == structured, "zero off the expected set");
    r.require(secs < 120.0, "runtime");
    return r;
}

// Sample count whose mean spacing is about 1/8 of the smallest cell radius, kept in [1000, 8000].
std::size_t resolving_samples(const Decomposition& d) {
    const Ball& b = d.params.region;
    const double ratio = 8.0 * b.radius / d.min_radius();
    const double n = b.dim() == 1 ? 2.0 * ratio : M_PI * ratio * ratio;
    return static_cast<std::size_t>(std::clamp(std::ceil(n), 1000.0, 8000.0));
}

// 12. Holder seminorm of every root under quadrupled pair counts.
Result holder_stability(std::vector<Case>& cases) {
    Result r;
    for (auto& c : cases) {
        build(c);
        // pairs grow with the square of the sample count
        const std::size_t n = resolving_samples(*c.d);
        const VerificationStats a = verify_decomposition(*c.d, {}, n);
        const VerificationStats b = verify_decomposition(*c.d, {}, 2 * n);
        double worst = 0.0;
        std::size_t pairs_a = 0, pairs_b = 0;
        for (std::size_t k = 0; k < a.holder.size(); ++k) {
            const double s1 = a.holder[k].seminorm, s2 = b.holder[k].seminorm;
            pairs_a += a.holder[k].pairs;
            pairs_b += b.holder[k].pairs;
            const double growth = s1 > 0.0 ? s2 / s1 - 1.0 : (s2 > 0.0 ? INFINITY : 0.0);
            worst = std::max(worst, growth);
        }
        r.detail << " " << c.label << ": " << a.holder.size() << " roots, exponent " << c.d->final_delta()
                 << ", samples " << n << " -> " << 2 * n << ", pairs x" << (pairs_a ? static_cast<double>(pairs_b) / pairs_a : 0.0) << ", max growth "
                 << 100.0 * worst << "%;";
        r.require(a.holder.size() == c.d->groups(), c.label + " missing estimates");
        r.require(worst < 0.5, c.label + " growth");
    }
    return r;
}

}  // namespace

int main() {
    std::vector<Case> cases = decomposition_cases();
    const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
        {"partition of unity", partition_of_unity},
        {"decomposition residual", [&] { return residual(cases); }},
        {"Case II identity", [&] { return case_ii_identity(cases); }},
        {"odd-even control constants", odd_even},
        {"slow variation", slow_variation},
        {"delta recursion", delta_recursion},
        {"threshold s0", threshold},
        {"derivative oracles", derivative_oracles},
        {"implicit function derivatives", implicit_function},
        {"monotone closed form and witnesses", monotone_closed_form},
        {"delta_nu positivity", delta_nu},
        {"Holder stability", [&] { return holder_stability(cases); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Result r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail << " [exception: " << e.what() << "]";
        }
        failed += r.pass ? 0 : 1;
        std::cout << "criterion " << i + 1 << " " << criteria[i].first << ": " << (r.pass ? "PASS" : "FAIL") << " |"
                  << r.detail.str() << std::endl;
    }
    return failed;
}
