#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosreg {

using Point = std::vector<double>;
using MultiIndex = std::vector<int>;

struct Ball {
    Point center;
    double radius = 1.0;

    std::size_t dim() const { return center.size(); }
    bool contains(const Point& x, double slack = 0.0) const;
};

Ball unit_ball(std::size_t dim);

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Caller broke an operation precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not produce a trustworthy value.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BudgetError : public std::runtime_error {
public:
    BudgetError(const std::string& msg, std::size_t reached)
        : std::runtime_error(msg), reached_(reached) {}
    std::size_t reached() const { return reached_; }

private:
    std::size_t reached_;
};

int order(const MultiIndex& alpha);
MultiIndex unit_index(std::size_t dim, std::size_t i);
// All multi-indices of total order m in dim variables, lexicographically descending.
std::vector<MultiIndex> indices_of_order(std::size_t dim, int m);

double norm(const Point& x);
double distance(const Point& a, const Point& b);

// Halton sequence point with index i (i >= 1 recommended) in [0,1)^dim.
Point halton(std::size_t i, std::size_t dim, std::size_t skip = 20);
// Deterministic low-discrepancy points in a ball (rejection from the bounding cube).
std::vector<Point> ball_samples(const Ball& b, std::size_t count, std::size_t offset = 0);
// Regular grid of the bounding cube restricted to the ball; per_axis points per axis.
std::vector<Point> ball_grid(const Ball& b, std::size_t per_axis);

std::vector<double> linspace(double a, double b, std::size_t n);
// Geometric grid from hi down to lo (descending), ratio 2^(-1/per_octave).
std::vector<double> descending_geometric(double hi, double lo, int per_octave);

std::string format_point(const Point& x);

}  // namespace sosreg
