#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sosreg::cli {

// Exit codes: 0 check passed, 2 check failed (report still written), 1 could not run.
enum Exit { kPass = 0, kError = 1, kFail = 2 };

struct RunConfig {
    std::string command;  // "decompose", "counterex scan", ...

    std::string function;
    std::string vars;           // comma list, expression input only
    std::string function_file;  // file of `def name(vars) = expr` lines
    std::vector<std::string> params;  // catalog key=value
    int dim = 0;                      // 0: inferred
    std::string region_center;        // comma list; empty: the function's domain
    double region_radius = -1.0;      // negative: the function's domain

    double delta = 0.25;
    double eta = 0.3;
    double s = 0.5;
    std::string s_grid;
    double s_prime = 0.6;
    double beta = 0.5;
    double rho = 0.5;
    double gamma = 0.5;
    std::string gamma_grid = "0.5,0.25,0.1";
    int order = 2;
    int M = 2;
    std::string delta_grid = "0.5,0.25,0.1";
    bool root_regularity = false;
    bool chain = false;
    int m = 1;
    int k = 2;
    std::size_t samples = 0;  // 0: per-command default
    double tol = 1e-6;
    double floor = 1e-3;
    double cover_s = 1.0 / 200.0;
    int max_depth = 6;
    bool strict_inequalities = false;  // default: record the inequality check and continue
    std::size_t holder_samples = 0;
    std::size_t identity_samples = 200;
    std::size_t outer = 2000;
    std::size_t inner = 64;
    double t_min = 1e-3;
    bool one_sided = false;
    double c_max = 1e3;
    std::string modulus_table;  // "t:w,t:w,..."
    std::string s_range;        // "a:b:step"
    double gamma_alpha = 1.0;
    int nu = 1;
    double c0 = 3.0;
    std::size_t sphere_samples = 2000;
    int restarts = 20;
    std::string variant = "full";

    std::uint64_t seed = 1;
    int threads = 1;
    std::string format = "json";
    std::string output;
    std::string csv;
};

// Parses argv (program name first) and runs the command. JSON goes to `out` unless
// --output is given; one-line summaries and errors go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sosreg::cli
