#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "sosreg/catalog.hpp"
#include "sosreg/sos.hpp"

using namespace sosreg;

namespace {

FunctionPtr fn(const std::string& text, std::vector<std::string> vars) { return make_function(text, vars); }

CoverCell cell_at(Point c, double r) {
    CoverCell k;
    k.center = std::move(c);
    k.radius = r;
    k.rho = r * 200.0;
    return k;
}

const std::vector<double> kIdentity2{1.0, 0.0, 0.0, 1.0};

// Newton on a scalar equation with numerically differentiated slope; independent of the library.
double newton(const std::function<double(double)>& g, double x) {
    for (int i = 0; i < 100; ++i) {
        const double h = 1e-6 * (1.0 + std::fabs(x));
        const double slope = (g(x + h) - g(x - h)) / (2.0 * h);
        const double step = g(x) / slope;
        x -= step;
        if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(x))) break;
    }
    return x;
}

}  // namespace

TEST_CASE("differential inequality examples") {
    auto c = fn("3 + 0*x", {"x"});
    Report rc = check_differential_inequalities(*c, 0.25, 0.3, Ball{{0.0}, 1.0}, 200);
    CHECK(rc.passed);
    CHECK(rc.constants.at("fourth_constant") == 0.0);
    CHECK(rc.constants.at("hessian_constant") == 0.0);

    auto flat = make_function(catalog_function("flat_exp_sq"));
    Report rf = check_differential_inequalities(*flat, 0.1, 0.25, Ball{{0.505}, 0.495}, 400);
    CHECK(rf.passed);
    CHECK(std::isfinite(rf.constants.at("hessian_constant")));

    auto sq = fn("x^2", {"x"});
    Report rs = check_differential_inequalities(*sq, 0.25, 0.5, Ball{{0.0}, 1.0}, 400);
    CHECK_FALSE(rs.passed);
    CHECK(rs.violations > 0);

    CHECK_THROWS_AS(check_differential_inequalities(*sq, 0.0, 0.3, Ball{{0.0}, 1.0}, 10), PreconditionError);
    CHECK_THROWS_AS(check_differential_inequalities(*sq, 0.25, 1.5, Ball{{0.0}, 1.0}, 10), PreconditionError);
}

TEST_CASE("flat exponential ratios on a dyadic grid stay bounded") {
    // independent evaluation of f''/f^eta and f''''/f^(d/(2+d)) for exp(-1/t^2)
    double worst2 = 0.0, worst4 = 0.0;
    for (double t = 1e-2; t <= 1.0; t *= std::sqrt(2.0)) {
        const double f = std::exp(-1.0 / (t * t));
        const double d2 = f * (4.0 - 6.0 * t * t) / std::pow(t, 6);
        const double d4 = f * (16.0 - 240.0 * std::pow(t, 2) + 780.0 * std::pow(t, 4) - 360.0 * std::pow(t, 6)) /
                          std::pow(t, 12);
        if (f > 0.0) {
            worst2 = std::max(worst2, std::max(d2, 0.0) / std::pow(f, 0.25));
            worst4 = std::max(worst4, std::fabs(d4) / std::pow(f, 0.1 / 2.1));
        }
    }
    CHECK(std::isfinite(worst2));
    CHECK(std::isfinite(worst4));
    auto flat = make_function(catalog_function("flat_exp_sq"));
    Report r = check_differential_inequalities(*flat, 0.1, 0.25, Ball{{0.505}, 0.495}, 400);
    CHECK(r.constants.at("hessian_constant") <= 1.01 * worst2 + 1.0);
}

TEST_CASE("delta sequence") {
    auto d = delta_sequence(0.5, 0.25, 2);
    REQUIRE(d.size() == 2);
    CHECK(d[1] == doctest::Approx(2.0 / 11.0).epsilon(1e-14));
    CHECK(delta_sequence(0.3, 0.2, 1) == std::vector<double>{0.3});

    const double delta = 0.4, eta = 0.3;
    auto s = delta_sequence(delta, eta, 5);
    CHECK(s.back() >= 0.8 * std::pow(5.0 * eta / 3.0, 4) * delta);
    CHECK(s.back() <= 1.25 * std::pow(2.0 * eta, 4) * delta);
    for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k] < s[k - 1]);

    CHECK_THROWS_AS(delta_sequence(0.0, 0.3, 2), PreconditionError);
    CHECK_THROWS_AS(delta_sequence(0.3, 0.5, 2), PreconditionError);
    CHECK_THROWS_AS(delta_sequence(0.3, 0.3, 0), PreconditionError);
}

TEST_CASE("delta sequence ratio bounds hold across parameters") {
    for (double delta : {0.05, 0.2, 0.4, 0.5})
        for (double eta : {0.05, 0.2, 0.3, 0.45})
            for (int n = 1; n <= 6; ++n) {
                auto d = delta_sequence(delta, eta, n);
                const double s0 = delta / (2.0 + delta);
                const double sn = d.back() / (2.0 + d.back());
                CHECK(sn / s0 >= std::pow(5.0 * eta / 3.0, n - 1) * (1.0 - 1e-12));
                CHECK(sn / s0 <= std::pow(2.0 * eta, n - 1) * (1.0 + 1e-12));
                // each step solves the recursion in the s variables
                for (int k = 1; k < n; ++k)
                    CHECK(d[k] / (2.0 + d[k]) == doctest::Approx(eta * d[k - 1] / (1.0 + d[k - 1])).epsilon(1e-13));
            }
}

TEST_CASE("cell classification") {
    const double c = 1.0 / (200.0 * 200.0 * 8.0);
    auto one = fn("1 + 0*x", {"x"});
    CHECK(classify_cell(*one, cell_at({0.3}, 0.001), 0.25, c).kind == CellCase::I);

    auto sq = fn("x^2", {"x"});
    CellClass k = classify_cell(*sq, cell_at({0.0}, 0.005), 0.25, c);
    CHECK(k.kind == CellCase::II);
    REQUIRE(k.axis.size() == 1);
    CHECK(k.axis[0] == doctest::Approx(1.0));
    CHECK(k.terms.rho == doctest::Approx(std::pow(2.0, 1.0 / 2.5)));

    auto q = fn("x^4 + 1", {"x"});
    CellClass kq = classify_cell(*q, cell_at({0.0}, 0.005), 0.25, c);
    CHECK(kq.kind == CellCase::I);
    CHECK(kq.fourth_order);

    // the center comparison alone would accept a ball that reaches the zero of f
    CellClass near = classify_cell(*sq, cell_at({0.004}, 0.005), 0.25, c);
    CHECK(near.center_case_i);
    CHECK(near.kind == CellCase::II);

    auto saddle = fn("x^2 + 3*y^2", {"x", "y"});
    CellClass ks = classify_cell(*saddle, cell_at({0.0, 0.0}, 0.005), 0.25, c);
    CHECK(ks.kind == CellCase::II);
    CHECK(std::fabs(ks.axis[1]) == doctest::Approx(1.0));

    auto degenerate = fn("x^4/12 + y^4", {"y", "x"});
    CHECK_THROWS_AS(classify_cell(*degenerate, cell_at({0.0, 0.0}, 0.005), 0.25, c), NumericalError);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
    auto [x, w] = gauss_legendre01(12);
    for (int p = 0; p <= 23; ++p) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], p);
        CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(gauss_legendre01(0), PreconditionError);
}

TEST_CASE("implicit minimizer examples") {
    auto sq = fn("x^2", {"x"});
    ImplicitFrame f1(sq, {0.0}, {1.0}, 0.005, 0.02);
    CHECK(std::fabs(f1.X({})) < 1e-15);
    CHECK(std::fabs(f1.F({})) < 1e-15);
    CHECK(f1.H({}, 0.003) == doctest::Approx(1.0).epsilon(1e-14));

    auto q = fn("xi^2 + (x - xi)^2", {"xi", "x"});
    ImplicitFrame f2(q, {0.0, 0.0}, kIdentity2, 0.1, 0.4);
    for (double xi : {-0.08, -0.01, 0.0, 0.05, 0.09}) {
        CHECK(f2.X({xi}) == doctest::Approx(xi).epsilon(1e-14));
        CHECK(f2.F({xi}) == doctest::Approx(xi * xi).epsilon(1e-13));
        for (double y : {-0.07, 0.02, 0.06}) CHECK(f2.H({xi}, y) == doctest::Approx(1.0).epsilon(1e-13));
    }
    auto g = f2.F_gradient({0.03});
    auto h = f2.F_hessian({0.03});
    CHECK(g[0] == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(h[0] == doctest::Approx(2.0).epsilon(1e-12));

    // a minimizer pushed against the bracket is rejected
    auto slope = fn("(x - 1)^2", {"x"});
    ImplicitFrame f3(slope, {0.0}, {1.0}, 0.01, 0.04);
    CHECK_THROWS_AS(f3.X({}), NumericalError);
}

TEST_CASE("bracketed root") {
    auto g = [](double x) { return std::make_pair(x * x * x + x - 1.0, 3.0 * x * x + 1.0); };
    const double r = bracketed_root(g, 0.0, 1.0, 0.9);
    CHECK(r * r * r + r - 1.0 == doctest::Approx(0.0).epsilon(1e-14));
    // a flat start sends plain Newton outside; the bracket still holds the root
    auto steep = [](double x) { return std::make_pair(std::atan(10.0 * x), 10.0 / (1.0 + 100.0 * x * x)); };
    CHECK(std::fabs(bracketed_root(steep, -1.0, 1.0, 0.9)) < 1e-12);
    auto none = [](double x) { return std::make_pair(x + 5.0, 1.0); };
    CHECK_THROWS_AS(bracketed_root(none, -1.0, 1.0, 0.0), NumericalError);
}

TEST_CASE("implicit function second derivative of x^3 + xi x - xi^2") {
    auto G = fn("x^3 + xi*x - xi^2", {"xi", "x"});
    auto root = [](double xi) { return newton([xi](double x) { return x * x * x + xi * x - xi * xi; }, 0.7); };
    for (double xi : {0.6, 1.0, 1.4}) {
        const double h = root(xi);
        ImplicitDerivatives d = implicit_derivatives(implicit_partials(*G, {xi, h}));
        oracle::Fn hf = [&](const std::vector<double>& v) { return root(v[0]); };
        const double d1 = oracle::extrapolated(hf, {xi}, {1}, 0.05);
        const double d2 = oracle::extrapolated(hf, {xi}, {2}, 0.05);
        CHECK(std::fabs(d.first[0] - d1) <= 1e-6 * (1.0 + std::fabs(d1)));
        CHECK(std::fabs(d.second[0] - d2) <= 1e-6 * (1.0 + std::fabs(d2)));
    }
}

TEST_CASE("implicit function derivatives with two parameters") {
    auto G = fn("x + 0.5*sin(x) + x^3 - a*b - 0.3*b^2 + 0.2*a", {"a", "b", "x"});
    auto root = [](double a, double b) {
        return newton([=](double x) { return x + 0.5 * std::sin(x) + x * x * x - a * b - 0.3 * b * b + 0.2 * a; },
                      0.0);
    };
    oracle::Fn hf = [&](const std::vector<double>& v) { return root(v[0], v[1]); };
    for (const Point& p : std::vector<Point>{{0.3, 0.7}, {-0.5, 0.2}, {1.1, -0.9}}) {
        ImplicitDerivatives d = implicit_derivatives(implicit_partials(*G, {p[0], p[1], root(p[0], p[1])}));
        const std::vector<std::vector<int>> second{{2, 0}, {1, 1}, {1, 1}, {0, 2}};
        for (int i = 0; i < 2; ++i) {
            std::vector<int> a(2, 0);
            a[i] = 1;
            const double ref = oracle::extrapolated(hf, p, a, 0.05);
            CHECK(std::fabs(d.first[i] - ref) <= 1e-6 * (1.0 + std::fabs(ref)));
        }
        for (int k = 0; k < 4; ++k) {
            const double ref = oracle::extrapolated(hf, p, second[k], 0.05);
            CHECK(std::fabs(d.second[k] - ref) <= 1e-6 * (1.0 + std::fabs(ref)));
        }
    }
}

TEST_CASE("fiber minimizer derivatives match finite differences") {
    auto f = fn("(x - sin(xi))^2 + 0.2*x^4 + xi^2", {"xi", "x"});
    ImplicitFrame fr(f, {0.0, 0.0}, kIdentity2, 0.2, 0.8);
    auto X = [](double xi) {
        return newton([xi](double x) { return 2.0 * (x - std::sin(xi)) + 0.8 * x * x * x; }, 0.0);
    };
    oracle::Fn Xf = [&](const std::vector<double>& v) { return X(v[0]); };
    oracle::Fn Ff = [&](const std::vector<double>& v) {
        const double x = X(v[0]);
        return (x - std::sin(v[0])) * (x - std::sin(v[0])) + 0.2 * std::pow(x, 4) + v[0] * v[0];
    };
    for (double xi : {-0.15, 0.0, 0.1}) {
        CHECK(fr.X({xi}) == doctest::Approx(X(xi)).epsilon(1e-13));
        auto d = fr.X_derivatives({xi});
        const double x1 = oracle::extrapolated(Xf, {xi}, {1}, 0.02);
        const double x2 = oracle::extrapolated(Xf, {xi}, {2}, 0.02);
        CHECK(std::fabs(d.first[0] - x1) <= 1e-6 * (1.0 + std::fabs(x1)));
        CHECK(std::fabs(d.second[0] - x2) <= 1e-6 * (1.0 + std::fabs(x2)));
        const double f2 = oracle::extrapolated(Ff, {xi}, {2}, 0.02);
        CHECK(std::fabs(fr.F_hessian({xi})[0] - f2) <= 1e-6 * (1.0 + std::fabs(f2)));
        auto prof = fr.profile();
        CHECK(prof->derivative({xi}, {2}) == doctest::Approx(fr.F_hessian({xi})[0]).epsilon(1e-12));
    }
}

TEST_CASE("exact local identity on a rotated frame") {
    auto f = fn("(y + 0.2 + 0.3*sin(x - 0.1))^2*(1 + 0.5*x^2) + 0.1*x^4 + exp(0.3*x)", {"x", "y"});
    const Point c{0.1, -0.2};
    // the fibers along the tilted axis cross the valley of f transversally
    const double a = 0.15;
    const std::vector<double> rot{std::cos(a), -std::sin(a), std::sin(a), std::cos(a)};
    ImplicitFrame fr(f, c, rot, 0.02, 0.08);
    Report r = verify_case_ii_identity(fr, 1000);
    CHECK(r.passed);
    CHECK(r.constants.at("max_abs_defect") <= 1e-10);
    CHECK(r.constants.at("H_min") > 0.0);
    for (const auto& x : ball_samples(Ball{c, 0.02}, 20)) {
        Point y = fr.to_local(x);
        Point back = fr.to_global(y);
        CHECK(distance(back, x) < 1e-15);
    }
}

TEST_CASE("reduced profile of x^2") {
    auto sq = fn("x^2", {"x"});
    ImplicitFrame fr(sq, {0.0}, {1.0}, 0.005, 0.02);
    for (double y : {-0.004, 0.001, 0.0049}) {
        CHECK(fr.H({}, y) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(fr.f_local({y}) == doctest::Approx(fr.F({}) + fr.H({}, y) * y * y).epsilon(1e-14));
    }
}

TEST_CASE("decompose a positive constant") {
    auto four = fn("4 + 0*x", {"x"});
    DecomposeParams p;
    p.region = Ball{{0.0}, 1.0};
    auto d = decompose(four, p);
    CHECK(d->count(CellCase::II) == 0);
    CHECK(d->depth() == 1);
    std::vector<Point> grid;
    for (double t : linspace(-0.999, 0.999, 2001)) grid.push_back({t});
    VerificationStats st = verify_decomposition(*d, grid);
    CHECK_FALSE(st.empty);
    CHECK(st.sup_residual <= 1e-12);
    CHECK(st.points_excluded == 0);
}

TEST_CASE("decompose x^2 in one variable") {
    auto sq = fn("x^2", {"x"});
    DecomposeParams p;
    p.region = Ball{{0.0}, 1.0};
    CHECK_THROWS_AS(decompose(sq, p), PreconditionError);
    p.override_inequalities = true;
    auto d = decompose(sq, p);
    CHECK(d->count(CellCase::II) > 0);
    CHECK(d->count(CellCase::I) > 0);
    std::vector<Point> grid;
    for (double t : linspace(-0.999, 0.999, 4001)) grid.push_back({t});
    VerificationStats st = verify_decomposition(*d, grid, 600);
    CHECK(st.sup_residual <= 1e-8);
    CHECK(st.points_excluded == 0);
    REQUIRE(st.holder.size() == d->groups());
    for (const auto& h : st.holder) {
        CHECK(std::isfinite(h.seminorm));
        CHECK(h.exponent == doctest::Approx(0.25));
    }
    // each square is dominated by f
    std::vector<double> g;
    for (const auto& x : grid) {
        d->evaluate(x, g);
        for (double v : g) CHECK(v * v <= x[0] * x[0] + 1e-12);
    }
}

TEST_CASE("decompose x^2 + y^2 with one recursion level") {
    auto f = fn("x^2 + y^2", {"x", "y"});
    DecomposeParams p;
    p.region = Ball{{0.0, 0.0}, 0.03};
    p.override_inequalities = true;
    auto d = decompose(f, p);
    CHECK(d->depth() == 2);
    CHECK(d->count(CellCase::II) > 0);
    REQUIRE(d->deltas.size() == 2);
    CHECK(d->final_delta() == doctest::Approx(delta_sequence(0.25, 0.3, 2)[1]));
    CHECK(d->groups() <= static_cast<std::size_t>(d->classes) * 8);

    VerificationStats st = verify_decomposition(*d, region_samples(p.region, 3000));
    CHECK(st.sup_residual <= 1e-6);

    // remainder profiles of the cells at the origin reduce to a parabola in the cross variable
    for (const auto& cd : d->cells) {
        if (cd.cls.kind != CellCase::II) continue;
        REQUIRE(cd.remainder);
        for (double xi : {-0.5, 0.5}) {
            const double t = xi * cd.frame->radius();
            const Point xc = d->partition->cells()[cd.cell].center;
            // F(xi) = min over the fiber of |x|^2, i.e. the squared distance of the fiber line to 0
            const auto& q = cd.frame->rotation();
            const double off = (xc[0] * q[0] + xc[1] * q[2]) + t;
            CHECK(cd.frame->F({t}) == doctest::Approx(off * off).epsilon(1e-10));
        }
    }

    Report crucial = verify_crucial_inequality(*d, 20);
    CHECK(crucial.passed);
    CHECK(crucial.constants.at("C") <= 1.0 + 1e-9);

    for (const auto& cd : d->cells) {
        if (cd.cls.kind != CellCase::II) continue;
        Report id = verify_case_ii_identity(*cd.frame, 1000);
        CHECK(id.constants.at("max_abs_defect") <= 1e-10);
        break;
    }
}

TEST_CASE("verification flags an empty truncated grid") {
    auto flat = make_function(catalog_function("flat_exp_sq"));
    DecomposeParams p;
    p.region = Ball{{0.0}, 0.05};
    p.override_inequalities = true;
    auto d = decompose(flat, p);
    CHECK(d->partition->size() == 0);
    std::vector<Point> grid;
    for (double t : linspace(-0.04, 0.04, 50)) grid.push_back({t});
    VerificationStats st = verify_decomposition(*d, grid);
    CHECK(st.empty);
    CHECK(st.points_used == 0);
    CHECK(st.points_excluded == 50);
}

TEST_CASE("root derivatives scale with the control distance") {
    auto sq = fn("x^2", {"x"});
    DecomposeParams p;
    p.region = Ball{{0.0}, 1.0};
    p.override_inequalities = true;
    auto d = decompose(sq, p);
    const ControlDistanceParams cp{0.25, RhoVariant::full};
    std::vector<Point> pts;
    for (double t : linspace(-0.95, 0.95, 301)) pts.push_back({t});
    auto hs = root_hessians(*d, pts);
    double worst = 0.0;
    std::vector<double> g;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double rho = control_distance(*sq, pts[i], cp);
        d->evaluate(pts[i], g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            worst = std::max(worst, std::fabs(g[k]) / std::pow(rho, 2.25));
            worst = std::max(worst, std::fabs(hs[i][k]) / std::pow(rho, 0.25));
        }
    }
    // cutoff derivatives bring a factor s^-2 into the constant
    CHECK(std::isfinite(worst));
    CHECK(worst * p.s * p.s < 100.0);
}
