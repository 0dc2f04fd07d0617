#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sosreg/catalog.hpp"
#include "sosreg/common.hpp"
#include "sosreg/expr.hpp"

namespace sosreg {

struct FdOptions {
    double scale = 1.0;     // characteristic length of the function
    double min_step = 1e-3; // relative to scale
    bool richardson = true;
};

// Step used for an order-p derivative: max(min_step, cbrt(eps)) * scale * 2^(p-1).
double fd_step(const FdOptions& opt, int p);

// Tensor product of central difference stencils, optionally Richardson extrapolated.
double fd_derivative(const std::function<double(const Point&)>& f, const Point& x, const MultiIndex& alpha,
                     const FdOptions& opt = {});

class FunctionHandle {
public:
    FunctionHandle(std::string name, std::size_t arity, Ball domain);
    virtual ~FunctionHandle() = default;

    const std::string& name() const { return name_; }
    std::size_t arity() const { return arity_; }
    const Ball& domain() const { return domain_; }

    virtual double value(const Point& x) const = 0;
    virtual double derivative(const Point& x, const MultiIndex& alpha) const = 0;
    // All D^alpha f with |alpha| = m, ordered as indices_of_order(arity(), m).
    virtual std::vector<double> derivatives(const Point& x, int m) const;
    virtual SignedLog log_value(const Point& x) const { return SignedLog::of(value(x)); }
    virtual SignedLog log_derivative(const Point& x, const MultiIndex& alpha) const {
        return SignedLog::of(derivative(x, alpha));
    }
    // True when derivatives do not depend on any step schedule.
    virtual bool exact_derivatives() const { return false; }
    // Step scale a finite-difference consumer should respect.
    virtual double length_scale() const { return 1.0; }

    std::vector<double> gradient(const Point& x) const;
    std::vector<double> hessian(const Point& x) const;  // row-major
    double max_derivative(const Point& x, int m) const;  // max |D^alpha f|, |alpha| = m

    std::optional<bool> flat;

private:
    std::string name_;
    std::size_t arity_;
    Ball domain_;
};

using FunctionPtr = std::shared_ptr<const FunctionHandle>;

class SymbolicFunction : public FunctionHandle {
public:
    explicit SymbolicFunction(FunctionDef def);

    double value(const Point& x) const override;
    double derivative(const Point& x, const MultiIndex& alpha) const override;
    std::vector<double> derivatives(const Point& x, int m) const override;
    SignedLog log_value(const Point& x) const override;
    SignedLog log_derivative(const Point& x, const MultiIndex& alpha) const override;
    bool exact_derivatives() const override { return true; }

    const FunctionDef& definition() const { return def_; }
    Expr derivative_expr(const MultiIndex& alpha) const;

private:
    const Tape& tape_for(const MultiIndex& alpha) const;
    const Tape& order_tape(int m) const;
    // The exponent g of the active exp(g) branch at x, if any.
    Expr exp_argument(const Point& x) const;

    FunctionDef def_;
    Tape body_;
    mutable std::recursive_mutex mu_;
    mutable std::map<MultiIndex, Expr> exprs_;
    mutable std::map<MultiIndex, std::unique_ptr<Tape>> tapes_;
    mutable std::map<int, std::unique_ptr<Tape>> order_tapes_;
    mutable std::map<const Node*, std::shared_ptr<SymbolicFunction>> exponents_;
};

class ProcedureFunction : public FunctionHandle {
public:
    using Value = std::function<double(const Point&)>;
    // Returns a value when the derivative is known in closed form, otherwise nullopt.
    using Derivative = std::function<std::optional<double>(const Point&, const MultiIndex&)>;
    // All derivatives of order m in indices_of_order layout, when available in one pass.
    using Jet = std::function<std::optional<std::vector<double>>(const Point&, int)>;

    ProcedureFunction(std::string name, std::size_t arity, Ball domain, Value f, Derivative d = nullptr,
                      FdOptions fd = {});

    double value(const Point& x) const override { return f_(x); }
    double derivative(const Point& x, const MultiIndex& alpha) const override;
    std::vector<double> derivatives(const Point& x, int m) const override;
    double length_scale() const override { return fd_.scale; }
    const FdOptions& fd_options() const { return fd_; }
    void set_jet(Jet j) { jet_ = std::move(j); }

private:
    Value f_;
    Derivative d_;
    Jet jet_;
    FdOptions fd_;
};

FunctionPtr make_function(FunctionDef def);
FunctionPtr make_function(const std::string& expression, std::vector<std::string> variables);

}  // namespace sosreg
