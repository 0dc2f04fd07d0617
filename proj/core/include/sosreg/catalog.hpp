#pragma once

#include <map>
#include <string>
#include <vector>

#include "sosreg/common.hpp"
#include "sosreg/expr.hpp"

namespace sosreg {

struct FunctionDef {
    std::string name;
    std::vector<std::string> variables;
    Expr body;
    Ball domain;
    int smoothness = 4;
    bool nonnegative = false;
};

// Previously defined functions callable by name inside expressions.
using FunctionTable = std::map<std::string, FunctionDef>;

// Parse an expression. Identifiers not in `variables` are errors unless
// `allow_new_variables` is set, in which case they are appended in order of
// first appearance.
Expr parse_expression(const std::string& source, std::vector<std::string>& variables,
                      bool allow_new_variables = true, const FunctionTable* functions = nullptr);
Expr parse_expression(const std::string& source);

// One `def name(vars) = expr` per line; '#' starts a comment.
FunctionTable parse_function_file(const std::string& text);
FunctionTable load_function_file(const std::string& path);

struct CatalogParams {
    std::map<std::string, double> values;
    std::map<std::string, std::string> expressions;  // e.g. g for glaeser_stub
};

FunctionDef catalog_function(const std::string& name, const CatalogParams& params = {});

struct CatalogEntry {
    std::string name;
    std::string parameters;
    std::string formula;
    std::string note;
};

std::vector<CatalogEntry> list_catalog();
bool is_catalog_name(const std::string& name);

// exp(-1/u) / (exp(-1/u) + exp(-1/(1-u))) glued to 0 and 1 outside (0,1).
Expr smooth_step(const Expr& u);
// Even plateau: 1 on [0, rho], 0 beyond 1.
Expr plateau(const Expr& u, double rho);

}  // namespace sosreg
