#pragma once

#include <string>
#include <vector>

#include "sosreg/function.hpp"
#include "sosreg/modulus.hpp"
#include "sosreg/report.hpp"

namespace sosreg {

struct MonotoneOptions {
    std::size_t outer = 2000;  // samples of x in B(0,1) \ B(0, t_min)
    std::size_t inner = 64;    // samples of y in the closed ball B(x/2, |x|/2)
    double t_min = 1e-3;
    int ascent_steps = 50;
    bool one_sided = false;    // 1D only: x in [t_min, 1]
    std::vector<Point> seeds;  // extra outer points, kept when t_min <= |x| <= 1
};

struct MonotoneReport {
    std::string modulus;
    double estimate = 0.0;
    double log_estimate = -1.0 / 0.0;
    double grid_estimate = 0.0;  // before local ascent
    Point x, y;                  // maximizing pair
    std::size_t outer_used = 0;
    std::size_t inner_used = 0;
    bool divergent = false;  // f(x) = 0 < f(y) at a sampled pair
    double scale = 1.0;      // f was divided by this to bring it below 1
    std::vector<std::string> notes;
};

// log of f(y)/omega(f(x)) after dividing f by scale; +inf when f(x) = 0 < f(y).
double monotone_log_ratio(const FunctionHandle& f, const Modulus& m, const Point& x, const Point& y,
                          double scale = 1.0);

MonotoneReport monotone_functional(const FunctionHandle& f, const Modulus& m, const MonotoneOptions& opt = {});
MonotoneReport monotone_functional(const FunctionHandle& f, const Modulus& m, std::size_t outer, std::size_t inner,
                                   double t_min);

struct MonotoneVerdict {
    double s = 0.0;
    MonotoneReport coarse;
    MonotoneReport refined;  // doubled samples, halved t_min
    bool finite = false;
};

struct MonotoneClassification {
    std::vector<MonotoneVerdict> verdicts;
    double c_max = 0.0;
    bool nearly_monotone = false;  // finite for every s in the grid
    bool holder_monotone = false;  // finite for some s in the grid
};

MonotoneClassification classify_monotonicity(const FunctionHandle& f, const std::vector<double>& s_grid, double c_max,
                                             const MonotoneOptions& opt = {});

// Constants sup |D^m f| / f^((s')^m), m = 1..m_max, each checked for stability
// under doubling the samples. The derivative norm is the largest entry.
Report verify_power_bound(const FunctionHandle& f, double s, double s_prime, int m_max, const Ball& region,
                          std::size_t samples = 2000);

}  // namespace sosreg
