#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sosreg/expr.hpp"
#include "sosreg/function.hpp"
#include "sosreg/modulus.hpp"
#include "sosreg/report.hpp"

namespace sosreg {

// f(W,t) = phi(t) L(W) + psi(t) + phi(r) h_rho(t/r), r = |W|, W in R^4.
// phi and psi are expressions in the variable t, flat at 0 and evaluated at |t|.
struct FamilyParams {
    Expr phi;  // default exp(-1/t^2)
    Expr psi;  // default phi(t/2)^(1/s') t^(4/s'); may be null when only T is needed
    double rho = 0.5;
    double s_prime = 0.6;
};

Expr default_phi();
Expr default_psi(double s_prime);
FamilyParams default_family(double s_prime = 0.6, double rho = 0.5);

// L(w,x,y,z) = w^4 + x^2y^2 + y^2z^2 + z^2x^2 - 2wxyz.
double quartic_L(const Point& w);

// log phi(|t|) and log psi(|t|); -inf at t = 0.
double log_phi(const FamilyParams& p, double t);
double log_psi(const FamilyParams& p, double t);

// Checks psi = o(phi t^4) on a dyadic grid: the log ratio at the smallest t is below
// log(1e-2) and nonincreasing over the last five grid points.
void check_family(const FamilyParams& p);

// The family on R^5 (variables w,x,y,z,t). Throws PreconditionError when check_family fails.
FunctionPtr build_family(const FamilyParams& p);
// log f(r e, t) with e a unit vector in R^4, without leaving log space.
double family_log_value(const FamilyParams& p, const Point& W, double t);

// Points 1, 2^(-1/k), ... down to t_min, t_min included.
std::vector<double> dyadic_grid(double t_min = std::pow(10.0, -2.5), int per_octave = 8);

struct FunctionalReport {
    char name = 'T';  // 'R', 'S' or 'T'
    double gamma = 0.0;
    std::string modulus;
    double log_sup = 0.0;
    double sup = 0.0;           // exp(log_sup), may be inf
    double argmax = 0.0;        // t attaining the grid sup
    double log_sup_extended = 0.0;  // with t_min divided by 4
    bool divergent = false;     // the sup grows by more than 10x on the extended grid
};

// Log of the R, S or T integrand at t.
double functional_log_integrand(const FamilyParams& p, char name, double gamma, const Modulus& m, double t);
FunctionalReport functional(const FamilyParams& p, char name, double gamma, const Modulus& m,
                            const std::vector<double>& t_grid = dyadic_grid());

// (1 + sqrt(1 + a^2)) / (2a).
double gamma_alpha(double alpha);
// 1 / gamma_1^2.
double threshold_s0();

struct WitnessPair {
    Point P, Q;  // in R^5, t last
};
// P1 = (0,t), Q1 = (t/2 e, t/2); the S(1/2) witness.
WitnessPair witness_s(double t, const Point& e);
// P2 = (r e, r), Q2 = (r/2 e, gamma_1 r); the T(gamma_1) witness.
WitnessPair witness_t(double r, const Point& e);
// log f(Q) - log omega(f(P)).
double witness_log_ratio(const FamilyParams& p, const Modulus& m, const WitnessPair& w);

// Q on the boundary of B(P/2, |P|/2) with V parallel to W: P = (r e, t), Q = (z e, u),
// z = r/2 + R cos(theta), u = t/2 + R sin(theta), R = |P|/2.
WitnessPair boundary_pair(double r, double t, double theta, const Point& e);

struct BoundsOptions {
    std::vector<double> grid = {};  // r and t values in [0,1]; default dyadic_grid(10^-2.5, 4) plus 0
    std::size_t directions = 8;     // unit vectors e in R^4, e = (1,0,0,0) first
    std::size_t angles = 96;
};

struct MonotoneBounds {
    FunctionalReport lower_S, lower_T;                   // S(1/2), T(gamma_1)
    FunctionalReport upper_R, upper_S, upper_T;          // R(1+d), S(1/2+d), T(gamma_rho+d)
    double log_estimate = 0.0;  // parallel boundary search, witness pairs included
    double log_estimate_extended = 0.0;  // grid continued down to t_min/4
    bool divergent = false;              // the search grows by more than 10x on the extended grid
    WitnessPair argmax;
    double scale = 1.0;
    bool evaluated = false;     // false when any functional or the search diverges
    double fitted_lower = 0.0;  // estimate / (S(1/2) + T(gamma_1))
    double fitted_upper = 0.0;  // estimate / (R + S + T upper terms)
    bool sandwich = false;      // fitted_lower >= 1e-3 and fitted_upper <= 1e3
    std::vector<std::string> notes;
};

MonotoneBounds monotone_bounds(const FamilyParams& p, const Modulus& m, double delta, const BoundsOptions& opt = {});

enum class SosVerdict { FailsSOS, Inconclusive, DoesNotTrigger };
std::string to_string(SosVerdict v);

struct SosFailureReport {
    SosVerdict verdict = SosVerdict::Inconclusive;
    double beta = 0.0;
    std::vector<double> t;
    std::vector<double> log_ratio;  // log psi - (4/beta) log phi - (16/beta) log t
};

// FailsSOS when the log ratio is nonincreasing toward t -> 0 on the second half of the
// grid and drops by more than log 10 there; DoesNotTrigger in the mirrored case.
SosFailureReport sos_failure_criterion(const FamilyParams& p, double beta,
                                       const std::vector<double>& t_grid = dyadic_grid());

// Quadratic form on R^4 with monomial coefficients, order w^2 wx wy wz x^2 xy xz y^2 yz z^2.
using QuadForm = std::array<double, 10>;
double eval_form(const QuadForm& q, const Point& w);

struct DeltaNuOptions {
    std::size_t sphere_samples = 2000;
    int restarts = 20;
    std::uint64_t seed = 1;
};

struct DeltaNuReport {
    int nu = 0;
    double c0 = 0.0;
    double estimate = 0.0;   // min over forms of max over samples |L - sum Q^2|
    std::vector<double> restart_values;
    double stable_fraction = 0.0;  // restarts within 20% of the best
    bool stalled = false;          // fewer than 3 restarts within 20% of the best
    std::vector<QuadForm> forms;
    std::vector<Point> certificate;  // samples where the misfit attains the estimate
    double min_abs_L = 0.0;          // min over samples of |L|
};

// Multi-start projected descent; forms for nu are warm-started from the nu - 1 optimum,
// so the estimate is nonincreasing in nu.
DeltaNuReport estimate_delta_nu(int nu, double c0, const DeltaNuOptions& opt = {});

struct CrucialCurve {
    double exponent = 0.0;  // -beta / (8 - 2 beta)
    std::vector<double> tau, bound;
};

// (delta/C)^(2/(4-beta)) tau^(-beta/(8-2beta)).
CrucialCurve crucial_lower_bound(double delta_nu, double beta, const std::vector<double>& tau_grid, double C = 1.0);

}  // namespace sosreg
