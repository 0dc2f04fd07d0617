#pragma once

#include <string>
#include <vector>

namespace sosreg {

// Modulus of continuity on [0,1]: the omega_s scale, or a concave table.
class Modulus {
public:
    // s = 1: t(1 + ln(1/t)); 0 < s < 1: t^s; s = 0: 1/(1 + ln(1/t)).
    static Modulus power(double s);
    // Piecewise linear through (t_i, w_i); must start at (0,0), end at (1,1),
    // be nondecreasing and concave.
    static Modulus table(std::vector<double> t, std::vector<double> w);

    double operator()(double t) const;
    // log(omega(exp(log_t))) without forming exp(log_t) where possible.
    double log_eval(double log_t) const;

    bool is_table() const { return !ts_.empty(); }
    double s() const { return s_; }
    std::string describe() const;

private:
    double s_ = 1.0;
    std::vector<double> ts_, ws_;
};

double modulus_eval(const Modulus& m, double t);

}  // namespace sosreg
