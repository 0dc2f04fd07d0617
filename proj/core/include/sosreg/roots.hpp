#pragma once

#include <vector>

#include "sosreg/calculus.hpp"
#include "sosreg/function.hpp"
#include "sosreg/report.hpp"

namespace sosreg {

// x -> f(x)^gamma with derivatives up to max_order by the composition formula.
class PowerHandle : public FunctionHandle {
public:
    PowerHandle(FunctionPtr base, double gamma, int max_order = 4);

    const FunctionPtr& base() const { return base_; }
    double gamma() const { return gamma_; }
    int max_order() const { return max_order_; }

    double value(const Point& x) const override;
    double derivative(const Point& x, const MultiIndex& alpha) const override;
    SignedLog log_value(const Point& x) const override;
    // Sum over composition terms of C(gamma,k) f^(gamma-k) prod D^beta f, formed as
    // f^gamma * sum C(gamma,k) prod (D^beta f / f) so flat bases stay representable.
    SignedLog log_derivative(const Point& x, const MultiIndex& alpha) const override;
    bool exact_derivatives() const override { return base_->exact_derivatives(); }
    double length_scale() const override { return base_->length_scale(); }

private:
    FunctionPtr base_;
    double gamma_;
    int max_order_;
};

// Requires f(x) > 0 and |alpha| <= max_order.
double power_derivative(const PowerHandle& p, const Point& x, const MultiIndex& alpha);

// Largest delta in delta_search for which the order-M Holder seminorm of sqrt(f)
// is finite and grows by at most 5% when the samples double. Zeros of f are dropped.
Report verify_root_regularity(FunctionPtr f, double s, int M, const std::vector<double>& delta_search,
                              const Ball& region, std::size_t samples = 1000);

// Condition |D^m f| <= C f^s (s = 0.9) for m <= m_max, then boundedness of D^m (f^gamma)
// for every gamma in the grid, and whether the first implies the second on the samples.
Report verify_power_smoothness_chain(FunctionPtr f, const std::vector<double>& gamma_grid, int m_max,
                                     const Ball& region, std::size_t samples = 2000);

}  // namespace sosreg
