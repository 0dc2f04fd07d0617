#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sosreg/common.hpp"

namespace sosreg {

enum class Op { Const, Var, Add, Mul, Div, Neg, Pow, Exp, Log, Sin, Cos, SinPi, CosPi, Select };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Const;
    double value = 0.0;  // constant value, or the exponent of Pow
    std::string name;    // variable name
    std::vector<Expr> args;
};

// Smart constructors fold constants and drop neutral elements.
Expr constant(double v);
Expr variable(const std::string& name);
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr pow(const Expr& a, double p);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr sinpi(const Expr& a);
Expr cospi(const Expr& a);
// cond > 0 ? if_pos : otherwise
Expr select(const Expr& cond, const Expr& if_pos, const Expr& otherwise);

bool is_constant(const Expr& e, double* v = nullptr);
bool structurally_equal(const Expr& a, const Expr& b);
bool contains_select(const Expr& e);
std::vector<std::string> free_variables(const Expr& e);
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);
std::size_t node_count(const Expr& e);

Expr differentiate(const Expr& e, const std::string& var, int order = 1);

std::string to_string(const Expr& e);

// Variables are looked up by name in `names`; point[i] is the value of names[i].
double evaluate(const Expr& e, const std::vector<std::string>& names, const Point& point);

// log|value| and sign, with exp() arguments kept in log form so flat functions
// do not underflow.
struct SignedLog {
    double log_abs = -1.0 / 0.0;
    int sign = 0;

    double value() const;
    static SignedLog of(double v);
};

SignedLog evaluate_log(const Expr& e, const std::vector<std::string>& names, const Point& point);

// Linearized evaluation of several expressions sharing subtrees.
class Tape {
public:
    Tape() = default;
    Tape(const std::vector<Expr>& outputs, const std::vector<std::string>& names);

    std::size_t outputs() const { return out_slots_.size(); }
    void evaluate(const double* point, double* out) const;
    double evaluate1(const Point& point) const;

private:
    struct Instr {
        Op op;
        double value;
        int a, b, c;
    };
    std::vector<Instr> code_;
    std::vector<int> out_slots_;
};

}  // namespace sosreg
