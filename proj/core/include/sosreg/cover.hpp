#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <unordered_map>
#include <vector>

#include "sosreg/function.hpp"
#include "sosreg/report.hpp"

namespace sosreg {

enum class RhoVariant {
    full,     // max of the value, Hessian and fourth-derivative terms
    reduced,  // value and Hessian terms only (r_delta)
};

struct ControlDistanceParams {
    double delta = 0.25;
    RhoVariant variant = RhoVariant::full;

    void validate() const;
};

struct RhoTerms {
    double value = 0.0;    // f^(1/(4+2d))
    double hessian = 0.0;  // [lambda_max]_+^(1/(2+2d))
    double fourth = 0.0;   // |D^4 f|^(1/(2d)), zero for the reduced variant
    double rho = 0.0;
    int dominant = 0;  // 0, 1, 2 for the three terms above
};

// amplitude divides f before the terms are formed.
RhoTerms control_distance_terms(const FunctionHandle& f, const Point& x, const ControlDistanceParams& p,
                                double amplitude = 1.0);
double control_distance(const FunctionHandle& f, const Point& x, const ControlDistanceParams& p);

// Bound constant (1/2)^(1/(4+2d)) of the slow variation inequality.
double slow_variation_constant(double delta);

Report verify_slowly_varying(const FunctionHandle& f, const ControlDistanceParams& p, const Ball& region,
                             std::size_t samples);

// Spatial hash of balls bucketed by dyadic radius level.
class BallIndex {
public:
    explicit BallIndex(std::size_t dim) : dim_(dim) {}

    void insert(const Point& center, double radius, std::uint32_t id);
    // Calls visit(id) for every stored ball with |x - c| < r + extra.
    void query(const Point& x, double extra, const std::function<void(std::uint32_t)>& visit) const;
    std::size_t size() const { return count_; }

private:
    struct Entry {
        Point center;
        double radius;
        std::uint32_t id;
    };
    using Key = std::vector<std::int64_t>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const;
    };
    struct Level {
        double cell = 1.0;
        double max_radius = 0.0;
        std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> buckets;
        std::vector<Entry> entries;
    };

    std::size_t dim_;
    std::size_t count_ = 0;
    std::map<int, Level> levels_;
};

struct CoverCell {
    std::size_t index = 0;
    Point center;
    double radius = 0.0;
    double rho = 0.0;
    int color = -1;
};

struct CoverOptions {
    std::size_t budget = 400000;  // maximum number of candidate leaves
};

// Greedy ball cover of {x in region : rho(x) >= floor} with radii s * rho(center).
std::vector<CoverCell> build_cover(const FunctionHandle& f, const ControlDistanceParams& p, const Ball& region,
                                   double s, double floor, const CoverOptions& opt = {});

// Plateau profile: 1 on [0, 1/2], 0 on [1, inf), smooth in between.
double bump_profile(double u);

class Partition {
public:
    explicit Partition(std::vector<CoverCell> cells);

    const std::vector<CoverCell>& cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }
    std::size_t dim() const { return dim_; }

    double chi(std::size_t nu, const Point& x) const;

    struct Local {
        std::vector<std::size_t> cells;
        std::vector<double> phi;
        double sum_chi2 = 0.0;
    };
    // Cells whose support contains x and their normalized Phi values.
    // When require is set a point outside every support raises NumericalError.
    Local at(const Point& x, bool require = false) const;
    double phi(std::size_t nu, const Point& x) const;

    void for_each_cell_near(const Point& x, double extra, const std::function<void(std::size_t)>& visit) const;

private:
    std::vector<CoverCell> cells_;
    std::size_t dim_ = 0;
    BallIndex index_;
};

// Sum of Phi^2 deviation, holes and overlap multiplicity on the given points.
Report verify_partition(const Partition& part, const std::vector<Point>& points);

// Greedy coloring so that tripled balls within a class are pairwise disjoint.
// Writes CoverCell::color and returns the number of classes.
int color_classes(std::vector<CoverCell>& cells);

}  // namespace sosreg
