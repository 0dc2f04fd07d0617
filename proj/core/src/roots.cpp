#include "sosreg/roots.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "sosreg/faa_di_bruno.hpp"

namespace sosreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double log_positive(const FunctionHandle& f, const Point& x) {
    SignedLog v = f.log_value(x);
    return v.sign > 0 ? v.log_abs : -kInf;
}

// log max |D^alpha f| over |alpha| = m, -inf when all vanish.
double log_max_derivative(const FunctionHandle& f, const Point& x, int m) {
    double best = -kInf;
    for (const auto& a : indices_of_order(f.arity(), m)) {
        SignedLog d = f.log_derivative(x, a);
        if (d.sign != 0) best = std::max(best, d.log_abs);
    }
    return best;
}

}  // namespace

PowerHandle::PowerHandle(FunctionPtr base, double gamma, int max_order)
    : FunctionHandle(base ? base->name() + "^" + fmt(gamma) : "", base ? base->arity() : 0,
                     base ? base->domain() : Ball{}),
      base_(std::move(base)),
      gamma_(gamma),
      max_order_(max_order) {
    if (!base_) throw PreconditionError("PowerHandle: null base");
    if (!(gamma > 0.0)) throw PreconditionError("PowerHandle: exponent must be positive");
    if (max_order < 0) throw PreconditionError("PowerHandle: negative order cap");
}

SignedLog PowerHandle::log_value(const Point& x) const {
    SignedLog v = base_->log_value(x);
    if (v.sign < 0) throw PreconditionError("PowerHandle: base is negative at " + format_point(x));
    if (v.sign == 0) return SignedLog{};
    return SignedLog{gamma_ * v.log_abs, 1};
}

double PowerHandle::value(const Point& x) const { return log_value(x).value(); }

SignedLog PowerHandle::log_derivative(const Point& x, const MultiIndex& alpha) const {
    const int k = order(alpha);
    if (k > max_order_) throw PreconditionError("power_derivative: order exceeds the cap");
    if (k == 0) return log_value(x);
    SignedLog lf = base_->log_value(x);
    if (lf.sign <= 0) throw PreconditionError("power_derivative: f must be positive at " + format_point(x));
    std::map<MultiIndex, double> ratio;  // D^beta f / f
    auto r = [&](const MultiIndex& b) {
        auto it = ratio.find(b);
        if (it != ratio.end()) return it->second;
        SignedLog d = base_->log_derivative(x, b);
        const double v = d.sign == 0 ? 0.0 : d.sign * std::exp(d.log_abs - lf.log_abs);
        ratio.emplace(b, v);
        return v;
    };
    double sum = 0.0;
    for (const auto& term : composition_terms(alpha)) {
        double p = term.coef * falling_factorial(gamma_, static_cast<int>(term.factors.size()));
        for (const auto& b : term.factors) {
            if (p == 0.0) break;
            p *= r(b);
        }
        sum += p;
    }
    SignedLog s = SignedLog::of(sum);
    if (s.sign == 0) return s;
    return SignedLog{gamma_ * lf.log_abs + s.log_abs, s.sign};
}

double PowerHandle::derivative(const Point& x, const MultiIndex& alpha) const {
    return log_derivative(x, alpha).value();
}

double power_derivative(const PowerHandle& p, const Point& x, const MultiIndex& alpha) {
    if (alpha.size() != p.arity()) throw PreconditionError("power_derivative: multi-index dimension mismatch");
    if (order(alpha) > p.max_order()) throw PreconditionError("power_derivative: order exceeds the cap");
    if (p.base()->log_value(x).sign <= 0)
        throw PreconditionError("power_derivative: f must be positive at " + format_point(x));
    return p.derivative(x, alpha);
}

Report verify_root_regularity(FunctionPtr f, double s, int M, const std::vector<double>& delta_search,
                              const Ball& region, std::size_t samples) {
    if (!f) throw PreconditionError("verify_root_regularity: null function");
    if (M < 1) throw PreconditionError("verify_root_regularity: M must be at least 1");
    if (!(s > 1.0 - 1.0 / (2.0 * M) && s <= 1.0))
        throw PreconditionError("verify_root_regularity: s must lie in (1 - 1/(2M), 1]");
    if (delta_search.empty()) throw PreconditionError("verify_root_regularity: empty delta grid");
    if (region.dim() != f->arity()) throw PreconditionError("verify_root_regularity: region dimension mismatch");

    Report rep;
    rep.op = "root_regularity";
    rep.function = f->name();
    rep.region = region;
    PowerHandle root(f, 0.5, M);

    std::size_t dropped = 0;
    HolderOptions opt;
    opt.keep = [&](const Point& x) {
        const bool ok = f->log_value(x).sign > 0;
        if (!ok) ++dropped;
        return ok;
    };
    double best = 0.0;
    for (double d : delta_search) {
        HolderEstimate coarse = holder_seminorm(root, M, d, region, samples, opt);
        HolderEstimate fine = holder_seminorm(root, M, d, region, 2 * samples, opt);
        rep.constants["seminorm_delta_" + fmt(d)] = fine.seminorm;
        rep.constants["seminorm_delta_" + fmt(d) + "_coarse"] = coarse.seminorm;
        const bool stable = std::isfinite(fine.seminorm) && fine.seminorm <= 1.05 * coarse.seminorm + 1e-12;
        if (stable) {
            best = std::max(best, d);
        } else {
            rep.record_violation(fine.y);
            rep.notes.push_back("order-" + std::to_string(M) + " seminorm with exponent " + fmt(d) +
                                " grows under refinement");
        }
        if (fine.seminorm > rep.ratio) {
            rep.ratio = fine.seminorm;
            rep.worst_point = fine.y;
        }
    }
    if (dropped > 0) rep.notes.push_back("dropped " + std::to_string(dropped) + " samples where f vanishes");
    rep.constants["best_delta"] = best;
    rep.passed = best > 0.0;
    return rep;
}

Report verify_power_smoothness_chain(FunctionPtr f, const std::vector<double>& gamma_grid, int m_max,
                                     const Ball& region, std::size_t samples) {
    if (!f) throw PreconditionError("verify_power_smoothness_chain: null function");
    if (m_max < 1) throw PreconditionError("verify_power_smoothness_chain: m_max must be at least 1");
    if (region.dim() != f->arity()) throw PreconditionError("verify_power_smoothness_chain: region dimension mismatch");
    for (double g : gamma_grid)
        if (!(g > 0.0 && g <= 1.0)) throw PreconditionError("verify_power_smoothness_chain: gamma must lie in (0,1]");
    constexpr double s = 0.9;
    Report rep;
    rep.op = "power_smoothness_chain";
    rep.function = f->name();
    rep.region = region;

    double log_scale = 0.0;
    for (const auto& x : region_samples(region, 2 * samples)) log_scale = std::max(log_scale, log_positive(*f, x));
    if (log_scale > 0.0) rep.notes.push_back("f rescaled by " + std::to_string(std::exp(log_scale)));

    // log sup over samples of |D^m h| * f^(-e), per m, with h = f^gamma (gamma = 0: h = f)
    auto sweep = [&](std::size_t count, double gamma, double e) {
        std::vector<double> c(m_max + 1, -kInf);
        PowerHandle h(f, gamma > 0.0 ? gamma : 1.0, m_max);
        for (const auto& x : region_samples(region, count)) {
            const double lf = log_positive(*f, x) - log_scale;
            for (int m = 1; m <= m_max; ++m) {
                if (lf == -kInf) {
                    if (gamma == 0.0 && log_max_derivative(*f, x, m) > -kInf) c[m] = kInf;
                    continue;
                }
                const double ld = gamma > 0.0 ? log_max_derivative(h, x, m) - gamma * log_scale
                                              : log_max_derivative(*f, x, m) - log_scale;
                if (ld == -kInf) continue;
                c[m] = std::max(c[m], ld - e * lf);
            }
        }
        return c;
    };
    auto stable = [](double coarse, double fine) { return fine < kInf && fine <= coarse + std::log(1.05); };

    bool cond2 = true;
    {
        auto coarse = sweep(samples, 0.0, s);
        auto fine = sweep(2 * samples, 0.0, s);
        for (int m = 1; m <= m_max; ++m) {
            rep.constants["condition2_m" + std::to_string(m)] = std::exp(fine[m]);
            if (!stable(coarse[m], fine[m])) {
                cond2 = false;
                rep.notes.push_back("derivative bound with f^0.9 fails at order " + std::to_string(m));
            }
        }
    }
    bool cond3 = true;
    for (double g : gamma_grid) {
        auto coarse = sweep(samples, g, 0.0);
        auto fine = sweep(2 * samples, g, 0.0);
        for (int m = 1; m <= m_max; ++m) {
            rep.constants["condition3_gamma" + fmt(g) + "_m" + std::to_string(m)] = std::exp(fine[m]);
            if (!stable(coarse[m], fine[m])) {
                cond3 = false;
                rep.notes.push_back("order " + std::to_string(m) + " derivatives of f^" + fmt(g) +
                                    " are not bounded on the samples");
            }
        }
    }
    rep.constants["condition2"] = cond2 ? 1.0 : 0.0;
    rep.constants["condition3"] = cond3 ? 1.0 : 0.0;
    rep.passed = !cond2 || cond3;
    if (!rep.passed) rep.notes.push_back("condition (2) holds on the samples but some power is not smooth");
    return rep;
}

}  // namespace sosreg
