#pragma once

#include <vector>

#include "sosreg/function.hpp"
#include "sosreg/modulus.hpp"
#include "sosreg/report.hpp"

namespace sosreg {

struct HolderEstimate {
    int order = 0;
    double exponent = 1.0;
    std::vector<double> sup_norms;  // max |D^alpha f| for |alpha| = 0..order
    double seminorm = 0.0;
    std::size_t pairs = 0;
    double min_separation = 0.0;
    Point y, z;  // maximizing pair
};

struct HolderOptions {
    double h_min = -1.0;          // negative: derived from the FD step of the handle
    double max_separation = -1.0; // negative: unlimited
    std::vector<Point> points;    // replaces the default sample set when nonempty
    // Skip points where this returns false (e.g. outside a truncated region).
    std::function<bool(const Point&)> keep;
};

std::vector<Point> region_samples(const Ball& region, std::size_t samples);

HolderEstimate holder_seminorm(const FunctionHandle& f, int k, double delta, const Ball& region, std::size_t samples,
                               const HolderOptions& opt = {});

// Largest eigenvalue of a symmetric row-major n x n matrix.
double lambda_max(const std::vector<double>& sym, std::size_t n);
double directional_hessian_plus(const FunctionHandle& f, const Point& x);

Report verify_odd_even_control(const FunctionHandle& f, const Ball& region, std::size_t samples);
Report verify_interpolation_bound(const FunctionHandle& f, const Ball& region, int m, int k,
                                  std::size_t samples = 1000);
Report is_flat(const FunctionHandle& f, int n_max, const std::vector<double>& t_grid, bool first_derivatives = false);

}  // namespace sosreg
