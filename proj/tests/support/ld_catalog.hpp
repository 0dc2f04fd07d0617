#pragma once
// Catalog functions coded by hand (default parameters) in long double or __float128,
// and a Richardson finite-difference reference built on them. Used as derivative oracles.

#include <quadmath.h>

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "oracle.hpp"

namespace ldcat {

using LPoint = std::vector<long double>;
using QPoint = std::vector<__float128>;

inline long double m_exp(long double x) { return std::exp(x); }
inline long double m_pow(long double x, long double y) { return std::pow(x, y); }
inline long double m_sqrt(long double x) { return std::sqrt(x); }
inline long double m_abs(long double x) { return std::fabs(x); }
inline __float128 m_exp(__float128 x) { return expq(x); }
inline __float128 m_pow(__float128 x, __float128 y) { return powq(x, y); }
inline __float128 m_sqrt(__float128 x) { return sqrtq(x); }
inline __float128 m_abs(__float128 x) { return fabsq(x); }

template <class T>
T flat(T u) {
    return u > 0 ? m_exp(-1 / u) : T(0);
}

template <class T>
T smooth_step(T u) {
    if (u <= 0) return 0;
    if (u >= 1) return 1;
    const T a = flat(u), b = flat(1 - u);
    return a / (a + b);
}

template <class T>
T plateau(T u, T rho) {
    return 1 - smooth_step((m_abs(u) - rho) / (1 - rho));
}

template <class T>
T quartic_L(T w, T x, T y, T z) {
    return w * w * w * w + x * x * y * y + y * y * z * z + z * z * x * x - 2 * w * x * y * z;
}

template <class T>
T value(const std::string& name, const std::vector<T>& v) {
    if (name == "motzkin_M") {
        const T x = v[0], y = v[1], z = v[2];
        return z * z * z * z * z * z + x * x * y * y * (x * x + y * y - 3 * z * z);
    }
    if (name == "quartic_L") return quartic_L(v[0], v[1], v[2], v[3]);
    if (name == "flat_exp_sq" || name == "glaeser_stub") return flat(v[0] * v[0]);
    if (name == "flat_exp") return flat(v[0]);
    if (name == "bump_h") return plateau(v[0], T(0.5));
    if (name == "family_f") {
        const T sp = T(6) / 10, rho = T(1) / 2, t2 = v[4] * v[4];
        const T r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
        T f = 0;
        if (t2 > 0) f += flat(t2) * quartic_L(v[0], v[1], v[2], v[3]) + m_exp(-(4 / sp) / t2) * m_pow(t2, 2 / sp);
        if (r2 > 0) f += flat(r2) * plateau(v[4] / m_sqrt(r2), rho);
        return f;
    }
    return T(NAN);
}

// Central differences at h, h/2, h/4 with two Richardson steps (error O(h^6)).
template <class T, class F>
T richardson(const F& f, const std::vector<T>& x, const std::vector<int>& alpha, T h) {
    const T d1 = oracle::central_in<T>(f, x, alpha, h);
    const T d2 = oracle::central_in<T>(f, x, alpha, h / 2);
    const T d3 = oracle::central_in<T>(f, x, alpha, h / 4);
    const T r1 = (4 * d2 - d1) / 3, r2 = (4 * d3 - d2) / 3;
    return (16 * r2 - r1) / 15;
}

// Richardson values for starting steps h_max, h_max/2, ... > h_min; the adjacent
// pair that agrees best gives the estimate and its spread.
template <class T, class F>
std::pair<double, double> best_pair(const F& f, const std::vector<double>& x, const std::vector<int>& alpha, T h_max,
                                    T h_min) {
    const std::vector<T> tx(x.begin(), x.end());
    std::vector<T> r;
    for (T h = h_max; h > h_min; h /= 2) r.push_back(richardson<T>(f, tx, alpha, h));
    std::size_t best = 0;
    auto gap = [&](std::size_t i) { return m_abs(r[i] - r[i + 1]); };
    for (std::size_t i = 1; i + 1 < r.size(); ++i)
        if (gap(i) < gap(best)) best = i;
    return {static_cast<double>((r[best] + r[best + 1]) / 2), static_cast<double>(gap(best))};
}

// f is called with std::vector<long double> and, when the long double steps do not
// settle, with std::vector<__float128> and steps down to 1e-5.
template <class F>
double fd_reference(const F& f, const std::vector<double>& x, const std::vector<int>& alpha) {
    const auto [v, spread] = best_pair<long double>(f, x, alpha, 0.04L, 0.002L);
    if (spread <= 1e-8 * std::max(1.0, std::fabs(v))) return v;
    return best_pair<__float128>(f, x, alpha, __float128(0.01), __float128(1e-5)).first;
}

}  // namespace ldcat
