#include "sosreg/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sosreg/common.hpp"

namespace sosreg {

Modulus Modulus::power(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw PreconditionError("modulus: s must lie in [0,1]");
    Modulus m;
    m.s_ = s;
    return m;
}

Modulus Modulus::table(std::vector<double> t, std::vector<double> w) {
    if (t.size() != w.size() || t.size() < 2) throw PreconditionError("modulus table: need matching t and w arrays");
    if (t.front() != 0.0 || w.front() != 0.0 || t.back() != 1.0 || w.back() != 1.0)
        throw PreconditionError("modulus table: must run from (0,0) to (1,1)");
    double prev_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw PreconditionError("modulus table: t must be increasing");
        double slope = (w[i] - w[i - 1]) / (t[i] - t[i - 1]);
        if (slope < 0.0) throw PreconditionError("modulus table: must be nondecreasing");
        if (slope > prev_slope * (1.0 + 1e-12)) throw PreconditionError("modulus table: must be concave");
        prev_slope = slope;
    }
    Modulus m;
    m.s_ = -1.0;
    m.ts_ = std::move(t);
    m.ws_ = std::move(w);
    return m;
}

double Modulus::operator()(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw PreconditionError("modulus: argument outside [0,1]");
    if (is_table()) {
        auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
        if (it == ts_.end()) return 1.0;
        std::size_t i = static_cast<std::size_t>(it - ts_.begin());
        double u = (t - ts_[i - 1]) / (ts_[i] - ts_[i - 1]);
        return ws_[i - 1] + u * (ws_[i] - ws_[i - 1]);
    }
    if (t == 0.0) return 0.0;
    if (s_ == 1.0) return t * (1.0 - std::log(t));
    if (s_ == 0.0) return 1.0 / (1.0 - std::log(t));
    return std::pow(t, s_);
}

double Modulus::log_eval(double log_t) const {
    if (log_t > 1e-12) throw PreconditionError("modulus: argument outside [0,1]");
    log_t = std::min(log_t, 0.0);
    if (std::isinf(log_t)) return -std::numeric_limits<double>::infinity();
    if (is_table()) return std::log((*this)(std::exp(log_t)));
    if (s_ == 1.0) return log_t + std::log1p(-log_t);
    if (s_ == 0.0) return -std::log1p(-log_t);
    return s_ * log_t;
}

std::string Modulus::describe() const {
    if (is_table()) return "table(" + std::to_string(ts_.size()) + " knots)";
    char buf[48];
    std::snprintf(buf, sizeof buf, "omega_s(s=%g)", s_);
    return buf;
}

double modulus_eval(const Modulus& m, double t) { return m(t); }

}  // namespace sosreg
