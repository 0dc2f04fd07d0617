#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "sosreg/calculus.hpp"

using namespace sosreg;

namespace {

FunctionPtr fn(const std::string& text, std::vector<std::string> vars) { return make_function(text, vars); }

}  // namespace

TEST_CASE("symbolic handles match the finite difference oracle") {
    auto f = fn("exp(-x^2)*sin(3*y) + x*y^3", {"x", "y"});
    oracle::Fn raw = [&](const std::vector<double>& p) { return f->value(p); };
    for (int m = 0; m <= 4; ++m) {
        for (const auto& a : indices_of_order(2, m)) {
            std::vector<int> alpha(a.begin(), a.end());
            double ref = oracle::extrapolated(raw, {0.3, -0.2}, alpha, 0.05);
            double v = f->derivative({0.3, -0.2}, a);
            CHECK(std::fabs(v - ref) <= 1e-6 * std::max(1.0, std::fabs(ref)));
        }
    }
}

TEST_CASE("procedure handles fall back to finite differences") {
    ProcedureFunction p("cube", 1, unit_ball(1), [](const Point& x) { return x[0] * x[0] * x[0]; });
    CHECK(p.derivative({0.5}, {1}) == doctest::Approx(0.75).epsilon(1e-8));
    CHECK(p.derivative({0.5}, {2}) == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(p.derivative({0.5}, {3}) == doctest::Approx(6.0).epsilon(1e-6));
    CHECK(p.derivative({0.5}, {4}) == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(fd_step(FdOptions{}, 1) == doctest::Approx(1e-3));
    CHECK(fd_step(FdOptions{}, 3) == doctest::Approx(4e-3));
}

TEST_CASE("holder seminorm examples") {
    auto sq = fn("x^2", {"x"});
    HolderEstimate e = holder_seminorm(*sq, 2, 0.5, unit_ball(1), 200);
    CHECK(e.seminorm == doctest::Approx(0.0));
    CHECK(e.sup_norms[2] == doctest::Approx(2.0));

    auto cube = fn("x^3", {"x"});
    CHECK(holder_seminorm(*cube, 2, 1.0, unit_ball(1), 200).seminorm == doctest::Approx(6.0));

    // |x|^2.5 regularized: (x^2 + eps)^1.25
    auto reg = fn("(x^2 + 0.0001)^1.25", {"x"});
    double a = holder_seminorm(*reg, 2, 0.5, unit_ball(1), 400).seminorm;
    double b = holder_seminorm(*reg, 2, 0.5, unit_ball(1), 800).seminorm;
    CHECK(a > 0.0);
    CHECK(std::fabs(b - a) <= 0.2 * a);

    // all separations below 1, so |y-z|^delta shrinks as delta grows and the
    // estimate is nondecreasing in delta at fixed samples
    auto prof = fn("x^2*(x^2 + 0.0001)^0.15", {"x"});
    Ball small{{0.0}, 0.45};
    double prev = 0.0;
    for (double d : {0.1, 0.3, 0.5, 0.8}) {
        double v = holder_seminorm(*prof, 2, d, small, 300).seminorm;
        CHECK(v >= prev * (1 - 1e-12));
        prev = v;
    }
    CHECK_THROWS_AS(holder_seminorm(*sq, 2, 0.0, unit_ball(1), 10), PreconditionError);
}

TEST_CASE("directional hessian positive part") {
    CHECK(directional_hessian_plus(*fn("x^2 + y^2", {"x", "y"}), {0.3, 0.1}) == doctest::Approx(2.0));
    CHECK(directional_hessian_plus(*fn("x^2 - y^2", {"x", "y"}), {0.0, 0.0}) == doctest::Approx(2.0));
    CHECK(directional_hessian_plus(*fn("-x^2 - y^2", {"x", "y"}), {0.0, 0.0}) == 0.0);

    // brute force over random directions, n <= 4
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    auto f = fn("x^2*y - 3*y*z + z^2*w + sin(w*x) - 0.4*w^2", {"x", "y", "z", "w"});
    for (int trial = 0; trial < 5; ++trial) {
        Point x(4);
        for (auto& v : x) v = 0.5 * g(rng);
        auto h = f->hessian(x);
        double best = 0.0;
        for (int k = 0; k < 1000; ++k) {
            Point d(4);
            double r = 0;
            for (auto& v : d) {
                v = g(rng);
                r += v * v;
            }
            double q = 0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) q += d[i] * h[i * 4 + j] * d[j] / r;
            best = std::max(best, q);
        }
        double lam = directional_hessian_plus(*f, x);
        CHECK(best <= lam + 1e-8);
        CHECK(best >= lam - 0.05 * std::max(1.0, lam));
    }
}

TEST_CASE("odd-even control examples") {
    Report r4 = verify_odd_even_control(*fn("x^4", {"x"}), unit_ball(1), 1000);
    CHECK(r4.passed);
    CHECK(r4.constants["ratio_negative_second"] == 0.0);

    Report r2 = verify_odd_even_control(*fn("x^2", {"x"}), unit_ball(1), 1000);
    CHECK(r2.passed);
    CHECK(r2.constants["ratio_first_derivative"] <= 1.0);

    Report r1 = verify_odd_even_control(*fn("1 + 0*x", {"x"}), unit_ball(1), 100);
    CHECK(r1.ratio == 0.0);

    CHECK_THROWS_AS(verify_odd_even_control(*fn("x", {"x"}), unit_ball(1), 100), PreconditionError);
}

TEST_CASE("interpolation bound examples") {
    Report q = verify_interpolation_bound(*fn("x^2", {"x"}), unit_ball(1), 1, 2, 33);
    CHECK(q.constants["max_derivative_m"] == doctest::Approx(2.0));
    CHECK(q.constants["taylor_difference_max"] == doctest::Approx(1.0));
    CHECK(q.constants["diameter"] == 2.0);
    CHECK(q.constants["constant"] <= 3.0);

    Report lin = verify_interpolation_bound(*fn("3*x + 1", {"x"}), unit_ball(1), 1, 2, 32);
    CHECK(lin.constants["max_derivative_k"] == 0.0);
    CHECK(lin.constants["constant"] == doctest::Approx(6.0 / 2.0 * 2.0 / 6.0 * 1.0).epsilon(1e-9));

    Report c = verify_interpolation_bound(*fn("2 + 0*x", {"x"}), unit_ball(1), 2, 3, 16);
    CHECK(c.constants["max_derivative_m"] == 0.0);
    CHECK(c.constants["constant"] == 0.0);
    CHECK_THROWS_AS(verify_interpolation_bound(*fn("x", {"x"}), unit_ball(1), 3, 2), PreconditionError);
}

TEST_CASE("flatness") {
    std::vector<double> grid;
    for (int k = 1; k <= 10; ++k) grid.push_back(std::ldexp(1.0, -k));
    auto flat = make_function(catalog_function("flat_exp_sq"));
    CHECK(is_flat(*flat, 8, grid).passed);
    CHECK(is_flat(*flat, 8, grid, true).passed);
    Report quartic = is_flat(*fn("t^4", {"t"}), 8, grid);
    CHECK_FALSE(quartic.passed);
    CHECK(quartic.constants["failing_N"] == 5);
    CHECK(is_flat(*fn("0*t", {"t"}), 8, grid).passed);
}
