#include "sosreg/common.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace sosreg {

bool Ball::contains(const Point& x, double slack) const {
    return distance(x, center) <= radius * (1.0 + slack);
}

Ball unit_ball(std::size_t dim) { return Ball{Point(dim, 0.0), 1.0}; }

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + msg),
      line_(line),
      column_(column) {}

int order(const MultiIndex& alpha) { return std::accumulate(alpha.begin(), alpha.end(), 0); }

MultiIndex unit_index(std::size_t dim, std::size_t i) {
    MultiIndex a(dim, 0);
    a.at(i) = 1;
    return a;
}

namespace {

void fill_indices(std::size_t pos, int remaining, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (pos + 1 == cur.size()) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
    }
    for (int k = remaining; k >= 0; --k) {
        cur[pos] = k;
        fill_indices(pos + 1, remaining - k, cur, out);
    }
}

}  // namespace

std::vector<MultiIndex> indices_of_order(std::size_t dim, int m) {
    std::vector<MultiIndex> out;
    if (dim == 0) {
        if (m == 0) out.emplace_back();
        return out;
    }
    MultiIndex cur(dim, 0);
    fill_indices(0, m, cur, out);
    return out;
}

double norm(const Point& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

namespace {

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::size_t i, unsigned base) {
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

}  // namespace

Point halton(std::size_t i, std::size_t dim, std::size_t skip) {
    if (dim > std::size(kPrimes)) throw PreconditionError("halton: dimension too large");
    Point p(dim);
    for (std::size_t d = 0; d < dim; ++d) p[d] = radical_inverse(i + skip, kPrimes[d]);
    return p;
}

std::vector<Point> ball_samples(const Ball& b, std::size_t count, std::size_t offset) {
    std::vector<Point> out;
    out.reserve(count);
    const std::size_t n = b.dim();
    if (n == 0) {
        out.assign(count, Point{});
        return out;
    }
    std::size_t i = offset;
    while (out.size() < count) {
        Point u = halton(i++, n);
        double r2 = 0.0;
        for (double& v : u) {
            v = 2.0 * v - 1.0;
            r2 += v * v;
        }
        if (r2 > 1.0) continue;
        for (std::size_t d = 0; d < n; ++d) u[d] = b.center[d] + b.radius * u[d];
        out.push_back(std::move(u));
    }
    return out;
}

std::vector<Point> ball_grid(const Ball& b, std::size_t per_axis) {
    const std::size_t n = b.dim();
    std::vector<Point> out;
    if (n == 0 || per_axis == 0) return out;
    std::vector<double> axis = linspace(-1.0, 1.0, per_axis);
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        Point u(n);
        double r2 = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            u[d] = axis[idx[d]];
            r2 += u[d] * u[d];
        }
        if (r2 <= 1.0 + 1e-12) {
            for (std::size_t d = 0; d < n; ++d) u[d] = b.center[d] + b.radius * u[d];
            out.push_back(std::move(u));
        }
        std::size_t d = 0;
        while (d < n && ++idx[d] == per_axis) idx[d++] = 0;
        if (d == n) break;
    }
    return out;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = 0.5 * (a + b);
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
    return v;
}

std::vector<double> descending_geometric(double hi, double lo, int per_octave) {
    std::vector<double> v;
    const double q = std::pow(2.0, -1.0 / per_octave);
    for (double t = hi; t >= lo * (1.0 - 1e-12); t *= q) v.push_back(t);
    if (v.empty() || v.back() > lo * (1.0 + 1e-12)) v.push_back(lo);
    return v;
}

std::string format_point(const Point& x) {
    std::string s = "(";
    char buf[32];
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6g", x[i]);
        if (i) s += ", ";
        s += buf;
    }
    return s + ")";
}

}  // namespace sosreg
