#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "sosreg/calculus.hpp"
#include "sosreg/cover.hpp"

namespace sosreg {

// Empirical constants of |D^4 f| <= C f^(d/(2+d)) and sup_T [d_T^2 f]_+ <= C f^eta.
// Passes when both constants are finite and stable under doubling the samples.
Report check_differential_inequalities(const FunctionHandle& f, double delta, double eta, const Ball& region,
                                       std::size_t samples);

// delta_0 = delta, delta_{k+1} = 2u/(1-u) with u = eta * delta_k / (1 + delta_k).
std::vector<double> delta_sequence(double delta, double eta, int n);

enum class CellCase { I, II };

struct CellClass {
    CellCase kind = CellCase::I;
    Point axis;                  // unit Hessian eigenvector, Case II
    std::vector<double> frame;   // row-major orthonormal basis, last column = axis
    RhoTerms terms;
    double value = 0.0;          // f at the center
    bool fourth_order = false;   // Case I taken because D^4 f dominates rho
    bool center_case_i = false;  // the comparison at the center alone says Case I
};

CellClass classify_cell(const FunctionHandle& f, const CoverCell& cell, double delta, double c);

// Gauss-Legendre nodes and weights on [0, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int n);

// Partials at (xi, x) of a function G whose last argument is the implicit variable.
struct ImplicitPartials {
    double g_x = 0.0;
    double g_xx = 0.0;
    std::vector<double> g_i;   // d/dxi_i
    std::vector<double> g_ix;  // d^2/dxi_i dx
    std::vector<double> g_ij;  // row-major
};

struct ImplicitDerivatives {
    std::vector<double> first;
    std::vector<double> second;  // row-major
};

// First and second derivatives of the root h(xi) of G(xi, h(xi)) = 0.
ImplicitDerivatives implicit_derivatives(const ImplicitPartials& p);
ImplicitPartials implicit_partials(const FunctionHandle& g, const Point& at);

// Root of an increasing g on [lo, hi]; g returns (value, slope). Plain Newton from
// the guess, then safeguarded Newton with bisection once an iterate leaves the bracket.
double bracketed_root(const std::function<std::pair<double, double>(double)>& g, double lo, double hi, double guess);

// Local coordinates y = Q^T (x - center) of a Case II cell, with fiber minimizer
// X(xi), profile F(xi) = f(xi, X(xi)) and Taylor factor H so that
// f = F + H (y_n - X)^2 exactly.
class ImplicitFrame {
public:
    ImplicitFrame(FunctionPtr f, Point center, std::vector<double> rotation, double radius, double bracket);

    std::size_t dim() const { return n_; }
    double radius() const { return radius_; }
    double bracket() const { return bracket_; }
    const Point& center() const { return center_; }
    const std::vector<double>& rotation() const { return q_; }

    Point to_local(const Point& x) const;
    Point to_global(const Point& y) const;
    double f_local(const Point& y) const;
    // Full local derivative tensor of order k (n^k entries).
    std::vector<double> local_tensor(const Point& y, int k) const;

    double X(const Point& xi) const;
    double F(const Point& xi) const;
    double H(const Point& xi, double yn, int nodes = 12) const;
    ImplicitDerivatives X_derivatives(const Point& xi) const;
    std::vector<double> F_gradient(const Point& xi) const;
    std::vector<double> F_hessian(const Point& xi) const;
    // F as a handle over B(0, radius) in xi; derivatives of order <= 2 in closed form.
    FunctionPtr profile() const;

private:
    Point join(const Point& xi, double yn) const;

    FunctionPtr f_;
    Point center_;
    std::vector<double> q_;
    std::size_t n_;
    double radius_;
    double bracket_;
    std::map<MultiIndex, std::size_t> pos_[5];
    std::uint64_t id_;  // copies share it, they describe the same frame
};

struct DecomposeParams {
    double delta = 0.25;
    double eta = 0.3;
    Ball region{{0.0}, 1.0};
    double s = 1.0 / 200.0;
    double c0 = 1.0;  // c = min(c0, s^2/8)
    double floor = 1e-3;
    double tol = 1e-6;
    bool override_inequalities = false;
    int max_depth = 6;
    std::size_t budget = 400000;
    std::size_t inequality_samples = 400;

    double c() const;
};

class Decomposition;

struct CellDecomposition {
    std::size_t cell = 0;
    CellClass cls;
    std::shared_ptr<const ImplicitFrame> frame;      // Case II
    std::shared_ptr<const Decomposition> remainder;  // Case II with n >= 2
    double constant = 0.0;                           // Case II with n == 1: F
};

class Decomposition {
public:
    FunctionPtr f;
    DecomposeParams params;
    int level = 0;
    std::vector<double> deltas;  // delta_level, delta_level+1, ...
    std::shared_ptr<const Partition> partition;
    int classes = 0;
    std::vector<CellDecomposition> cells;
    std::vector<std::pair<int, int>> group_keys;  // (color class, slot)
    std::vector<std::string> notes;

    std::size_t groups() const { return group_keys.size(); }
    std::size_t group_of(int color, int slot) const;
    // All root values at x, indexed by group.
    void evaluate(const Point& x, std::vector<double>& g) const;
    double sum_squares(const Point& x) const;
    bool covered(const Point& x) const;
    int depth() const;
    std::size_t count(CellCase k) const;
    double min_radius() const;
    // Exponent of the final roots: delta_{n-1} of the top level.
    double final_delta() const;
    FunctionPtr root(std::size_t group) const;

    std::map<std::pair<int, int>, std::size_t> index;
    std::weak_ptr<const Decomposition> self;
};

std::shared_ptr<const Decomposition> decompose(FunctionPtr f, const DecomposeParams& p);

struct VerificationStats {
    std::size_t points_used = 0;
    std::size_t points_excluded = 0;
    double sup_residual = 0.0;
    double mean_residual = 0.0;
    double sup_f = 0.0;
    double boundary_layer = 0.0;  // sup f over excluded points
    bool empty = true;
    std::vector<HolderEstimate> holder;  // per group, order 2, exponent final_delta()
};

// Second derivatives of every root group by vector-valued central differences.
std::vector<std::vector<double>> root_hessians(const Decomposition& d, const std::vector<Point>& pts);

VerificationStats verify_decomposition(const Decomposition& d, const std::vector<Point>& grid,
                                       std::size_t holder_samples = 0);

// Order-2 Holder seminorm of every root group on the given points.
std::vector<HolderEstimate> root_holder(const Decomposition& d, const std::vector<Point>& pts, double exponent);

// Sup of |f - F - H (y_n - X)^2| at samples in the Case II cell ball.
Report verify_case_ii_identity(const ImplicitFrame& frame, std::size_t samples);

// [lambda_max Hess F]_+ against sup_T [d_T^2 f]_+ at matched fiber points on every Case II cell.
Report verify_crucial_inequality(const Decomposition& d, std::size_t samples_per_cell);

}  // namespace sosreg
