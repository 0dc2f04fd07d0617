#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sosreg/common.hpp"

namespace sosreg {

// Outcome of a numerical check: named empirical constants, the worst sample
// and a pass flag.
struct Report {
    std::string op;
    std::string function;
    std::optional<Ball> region;
    std::map<std::string, double> constants;
    Point worst_point;
    double ratio = 0.0;
    bool passed = true;
    std::size_t violations = 0;
    std::vector<Point> violation_points;  // first few only
    std::vector<std::string> notes;

    void record_violation(const Point& x, std::size_t keep = 8) {
        ++violations;
        if (violation_points.size() < keep) violation_points.push_back(x);
    }
};

}  // namespace sosreg
