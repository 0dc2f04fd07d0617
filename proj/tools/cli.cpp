#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "sosreg/calculus.hpp"
#include "sosreg/catalog.hpp"
#include "sosreg/counterex.hpp"
#include "sosreg/cover.hpp"
#include "sosreg/monotone.hpp"
#include "sosreg/roots.hpp"
#include "sosreg/sos.hpp"

namespace sosreg::cli {
namespace {

using json = nlohmann::ordered_json;

// Invalid configuration value; `field` is the option name without dashes.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& msg)
        : std::runtime_error(field + ": " + msg) {}
};

json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

json to_json(const Point& x) {
    json a = json::array();
    for (double v : x) a.push_back(num(v));
    return a;
}

json to_json(const std::vector<double>& x, int) { return to_json(Point(x)); }

json to_json(const Ball& b) { return json{{"center", to_json(b.center)}, {"radius", num(b.radius)}}; }

json to_json(const Report& r) {
    json j;
    j["op"] = r.op;
    j["function"] = r.function;
    if (r.region) j["region"] = to_json(*r.region);
    json c = json::object();
    for (const auto& [k, v] : r.constants) c[k] = num(v);
    j["constants"] = c;
    j["worst_point"] = to_json(r.worst_point);
    j["ratio"] = num(r.ratio);
    j["passed"] = r.passed;
    j["violations"] = r.violations;
    json vp = json::array();
    for (const auto& p : r.violation_points) vp.push_back(to_json(p));
    j["violation_points"] = vp;
    j["notes"] = r.notes;
    return j;
}

json to_json(const HolderEstimate& h) {
    return json{{"order", h.order},
                {"exponent", num(h.exponent)},
                {"sup_norms", to_json(h.sup_norms, 0)},
                {"seminorm", num(h.seminorm)},
                {"pairs", h.pairs},
                {"min_separation", num(h.min_separation)},
                {"y", to_json(h.y)},
                {"z", to_json(h.z)}};
}

json to_json(const MonotoneReport& r) {
    return json{{"modulus", r.modulus},
                {"estimate", num(r.estimate)},
                {"log_estimate", num(r.log_estimate)},
                {"grid_estimate", num(r.grid_estimate)},
                {"x", to_json(r.x)},
                {"y", to_json(r.y)},
                {"outer_used", r.outer_used},
                {"inner_used", r.inner_used},
                {"divergent", r.divergent},
                {"scale", num(r.scale)},
                {"notes", r.notes}};
}

json to_json(const FunctionalReport& r) {
    return json{{"name", std::string(1, r.name)},
                {"gamma", num(r.gamma)},
                {"modulus", r.modulus},
                {"log_sup", num(r.log_sup)},
                {"sup", num(r.sup)},
                {"argmax", num(r.argmax)},
                {"log_sup_extended", num(r.log_sup_extended)},
                {"divergent", r.divergent}};
}

json to_json(const WitnessPair& w) { return json{{"P", to_json(w.P)}, {"Q", to_json(w.Q)}}; }

json to_json(const RunConfig& c) {
    return json{{"command", c.command},
                {"function", c.function},
                {"vars", c.vars},
                {"function_file", c.function_file},
                {"params", c.params},
                {"dim", c.dim},
                {"region_center", c.region_center},
                {"region_radius", num(c.region_radius)},
                {"delta", num(c.delta)},
                {"eta", num(c.eta)},
                {"s", num(c.s)},
                {"s_grid", c.s_grid},
                {"s_prime", num(c.s_prime)},
                {"beta", num(c.beta)},
                {"rho", num(c.rho)},
                {"gamma", num(c.gamma)},
                {"gamma_grid", c.gamma_grid},
                {"order", c.order},
                {"M", c.M},
                {"delta_grid", c.delta_grid},
                {"root_regularity", c.root_regularity},
                {"chain", c.chain},
                {"m", c.m},
                {"k", c.k},
                {"samples", c.samples},
                {"tol", num(c.tol)},
                {"floor", num(c.floor)},
                {"cover_s", num(c.cover_s)},
                {"max_depth", c.max_depth},
                {"strict_inequalities", c.strict_inequalities},
                {"holder_samples", c.holder_samples},
                {"identity_samples", c.identity_samples},
                {"outer", c.outer},
                {"inner", c.inner},
                {"t_min", num(c.t_min)},
                {"one_sided", c.one_sided},
                {"c_max", num(c.c_max)},
                {"modulus_table", c.modulus_table},
                {"s_range", c.s_range},
                {"gamma_alpha", num(c.gamma_alpha)},
                {"nu", c.nu},
                {"c0", num(c.c0)},
                {"sphere_samples", c.sphere_samples},
                {"restarts", c.restarts},
                {"variant", c.variant},
                {"seed", c.seed},
                {"threads", c.threads},
                {"format", c.format},
                {"output", c.output},
                {"csv", c.csv}};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        const auto a = cur.find_first_not_of(" \t"), b = cur.find_last_not_of(" \t");
        if (a != std::string::npos) out.push_back(cur.substr(a, b - a + 1));
    }
    return out;
}

double parse_number(const std::string& text, const std::string& field) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(field, "'" + text + "' is not a number");
    }
    if (used != text.size()) throw ConfigError(field, "'" + text + "' is not a number");
    return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_number(item, field));
    if (out.empty()) throw ConfigError(field, "empty list");
    return out;
}

// "a:b:step", both ends included up to rounding.
std::vector<double> parse_range(const std::string& text, const std::string& field) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError(field, "expected a:b:step");
    const double a = parse_number(parts[0], field), b = parse_number(parts[1], field),
                 step = parse_number(parts[2], field);
    if (!(step > 0.0) || b < a) throw ConfigError(field, "expected a <= b and step > 0");
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
}

Modulus resolve_modulus(const RunConfig& c, double s) {
    if (c.modulus_table.empty()) return Modulus::power(s);
    std::vector<double> t, w;
    for (const auto& pair : split(c.modulus_table, ',')) {
        const auto tw = split(pair, ':');
        if (tw.size() != 2) throw ConfigError("modulus-table", "expected t:w pairs");
        t.push_back(parse_number(tw[0], "modulus-table"));
        w.push_back(parse_number(tw[1], "modulus-table"));
    }
    try {
        return Modulus::table(t, w);
    } catch (const PreconditionError& e) {
        throw ConfigError("modulus-table", e.what());
    }
}

struct Target {
    FunctionPtr f;
    Ball region;
};

Target resolve_function(const RunConfig& c) {
    FunctionDef def;
    if (!c.function_file.empty()) {
        const FunctionTable table = load_function_file(c.function_file);
        if (c.function.empty()) {
            if (table.size() != 1) throw ConfigError("function", "name a definition of " + c.function_file);
            def = table.begin()->second;
        } else {
            const auto it = table.find(c.function);
            if (it == table.end()) throw ConfigError("function", "'" + c.function + "' is not defined in " + c.function_file);
            def = it->second;
        }
    } else if (c.function.empty()) {
        throw ConfigError("function", "required");
    } else if (is_catalog_name(c.function)) {
        CatalogParams params;
        for (const auto& kv : c.params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("param", "expected key=value, got '" + kv + "'");
            const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
            try {
                params.values[key] = parse_number(value, "param");
            } catch (const ConfigError&) {
                params.expressions[key] = value;
            }
        }
        def = catalog_function(c.function, params);
    } else {
        if (!c.params.empty()) throw ConfigError("param", "only catalog functions take parameters");
        std::vector<std::string> vars = split(c.vars, ',');
        const bool infer = vars.empty();
        def.name = c.function;
        def.body = parse_expression(c.function, vars, infer);
        if (infer && c.dim > 0 && static_cast<std::size_t>(c.dim) > vars.size()) {
            for (const char* name : {"x", "y", "z", "w", "u", "v"}) {
                if (vars.size() == static_cast<std::size_t>(c.dim)) break;
                if (std::find(vars.begin(), vars.end(), name) == vars.end()) vars.push_back(name);
            }
        }
        if (vars.empty()) throw ConfigError("dim", "the expression has no variables; give --dim or --vars");
        def.variables = vars;
        def.domain = unit_ball(vars.size());
    }
    if (c.dim > 0 && static_cast<std::size_t>(c.dim) != def.variables.size())
        throw ConfigError("dim", "'" + def.name + "' has " + std::to_string(def.variables.size()) + " variables");

    Ball region = def.domain;
    if (!c.region_center.empty()) {
        region.center = parse_list(c.region_center, "region-center");
        if (region.center.size() != def.variables.size())
            throw ConfigError("region-center", "expected " + std::to_string(def.variables.size()) + " coordinates");
    }
    if (c.region_radius >= 0.0) {
        if (!(c.region_radius > 0.0)) throw ConfigError("region-radius", "must be positive");
        region.radius = c.region_radius;
    }
    return {make_function(def), region};
}

// Verification points: a line grid in 1D, low-discrepancy samples otherwise.
std::vector<Point> verification_grid(const Ball& region, std::size_t samples) {
    if (region.dim() == 1) {
        const std::size_t n = samples ? samples : 4001;
        std::vector<Point> pts;
        for (double x : linspace(region.center[0] - 0.999 * region.radius, region.center[0] + 0.999 * region.radius, n))
            pts.push_back({x});
        return pts;
    }
    return region_samples(region, samples ? samples : 3000);
}

struct Outcome {
    json result;
    bool passed = true;
    std::string summary;
    std::string csv;  // header plus rows, written when --csv is given
};

std::string fmt(double v, int digits = 6) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

// Shortest text that reads back to the same double.
std::string csv_number(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

DecomposeParams decompose_params(const RunConfig& c, const Ball& region) {
    DecomposeParams p;
    p.delta = c.delta;
    p.eta = c.eta;
    p.region = region;
    p.s = c.cover_s;
    p.floor = c.floor;
    p.tol = c.tol;
    p.override_inequalities = true;
    p.max_depth = c.max_depth;
    return p;
}

json decomposition_json(const Decomposition& d) {
    return json{{"groups", d.groups()},
                {"depth", d.depth()},
                {"cells", d.cells.size()},
                {"case_i", d.count(CellCase::I)},
                {"case_ii", d.count(CellCase::II)},
                {"color_classes", d.classes},
                {"final_delta", num(d.final_delta())},
                {"deltas", to_json(d.deltas, 0)},
                {"min_radius", num(d.min_radius())},
                {"notes", d.notes}};
}

json stats_json(const VerificationStats& v) {
    json h = json::array();
    for (const auto& e : v.holder) h.push_back(to_json(e));
    return json{{"points_used", v.points_used},
                {"points_excluded", v.points_excluded},
                {"sup_residual", num(v.sup_residual)},
                {"mean_residual", num(v.mean_residual)},
                {"sup_f", num(v.sup_f)},
                {"boundary_layer", num(v.boundary_layer)},
                {"holder", h}};
}

std::string grid_csv(const Decomposition& d, const std::vector<Point>& grid) {
    std::ostringstream out;
    const std::size_t n = d.f->arity();
    for (std::size_t i = 0; i < n; ++i) out << "x" << i + 1 << ",";
    out << "covered,f,sum_squares,residual\n";
    for (const auto& x : grid) {
        for (double v : x) out << csv_number(v) << ",";
        const bool cov = d.covered(x);
        const double fx = d.f->value(x);
        const double ss = cov ? d.sum_squares(x) : std::nan("");
        out << (cov ? 1 : 0) << "," << csv_number(fx) << "," << csv_number(ss) << ","
            << csv_number(cov ? std::fabs(fx - ss) : std::nan("")) << "\n";
    }
    return out.str();
}

Outcome cmd_decompose(const RunConfig& c, bool full_verify) {
    const Target t = resolve_function(c);
    const Report ineq = check_differential_inequalities(*t.f, c.delta, c.eta, t.region, 400);
    if (c.strict_inequalities && !ineq.passed)
        throw PreconditionError("differential inequalities fail near " + format_point(ineq.worst_point));
    const auto d = decompose(t.f, decompose_params(c, t.region));
    const auto grid = verification_grid(t.region, c.samples);
    const std::size_t holder = c.holder_samples ? c.holder_samples : (full_verify ? 600 : 0);
    const VerificationStats v = verify_decomposition(*d, grid, holder);
    const double bound = c.tol * (1.0 + v.sup_f);

    Outcome o;
    o.passed = !v.empty && v.sup_residual <= bound;
    o.result["function"] = t.f->name();
    o.result["region"] = to_json(t.region);
    o.result["inequalities"] = to_json(ineq);
    o.result["decomposition"] = decomposition_json(*d);
    o.result["verification"] = stats_json(v);
    o.result["residual_bound"] = num(bound);
    o.result["residual_ok"] = o.passed;
    o.summary = "residual " + fmt(v.sup_residual, 3) + " (bound " + fmt(bound, 3) + "), " +
                std::to_string(d->groups()) + " groups" + (ineq.passed ? "" : ", inequalities not verified");

    if (full_verify) {
        const Report part = verify_partition(*d->partition, grid);
        const Report crucial = verify_crucial_inequality(*d, c.identity_samples);
        json ids = json::array();
        bool ids_ok = true;
        double worst = 0.0;
        for (const auto& cell : d->cells) {
            if (!cell.frame) continue;
            const Report r = verify_case_ii_identity(*cell.frame, c.identity_samples);
            ids_ok = ids_ok && r.passed;
            worst = std::max(worst, r.ratio);
            ids.push_back(json{{"cell", cell.cell}, {"passed", r.passed}, {"ratio", num(r.ratio)}});
        }
        o.result["partition"] = to_json(part);
        o.result["crucial_inequality"] = to_json(crucial);
        o.result["case_ii_identity"] = json{{"passed", ids_ok}, {"worst", num(worst)}, {"cells", ids}};
        o.passed = o.passed && part.passed && crucial.passed && ids_ok;
        o.summary += ", partition " + std::string(part.passed ? "ok" : "FAIL") + ", identity " +
                     (ids_ok ? "ok" : "FAIL") + ", crucial " + (crucial.passed ? "ok" : "FAIL");
    }
    if (!c.csv.empty()) o.csv = grid_csv(*d, grid);
    return o;
}

MonotoneOptions monotone_options(const RunConfig& c) {
    MonotoneOptions o;
    o.outer = c.outer;
    o.inner = c.inner;
    o.t_min = c.t_min;
    o.one_sided = c.one_sided;
    return o;
}

Outcome cmd_monotone(const RunConfig& c) {
    const Target t = resolve_function(c);
    Outcome o;
    o.result["function"] = t.f->name();
    if (!c.modulus_table.empty()) {
        const MonotoneReport r = monotone_functional(*t.f, resolve_modulus(c, c.s), monotone_options(c));
        o.passed = !r.divergent && std::isfinite(r.estimate) && r.estimate <= c.c_max;
        o.result["report"] = to_json(r);
        o.summary = std::string(o.passed ? "finite" : "not finite") + ", estimate " + fmt(r.estimate);
        return o;
    }
    const std::vector<double> grid = c.s_grid.empty() ? std::vector<double>{c.s} : parse_list(c.s_grid, "s-grid");
    const MonotoneClassification cls = classify_monotonicity(*t.f, grid, c.c_max, monotone_options(c));
    json verdicts = json::array();
    std::string line;
    for (const auto& v : cls.verdicts) {
        verdicts.push_back(json{{"s", num(v.s)},
                                {"finite", v.finite},
                                {"verdict", v.finite ? "finite" : "divergent"},
                                {"coarse", to_json(v.coarse)},
                                {"refined", to_json(v.refined)}});
        line += (line.empty() ? "" : ", ") + ("s=" + fmt(v.s) + " " + (v.finite ? "finite" : "divergent") +
                                              " (" + fmt(v.refined.estimate) + ")");
    }
    o.result["c_max"] = num(cls.c_max);
    o.result["verdicts"] = verdicts;
    o.result["nearly_monotone"] = cls.nearly_monotone;
    o.result["holder_monotone"] = cls.holder_monotone;
    o.passed = cls.nearly_monotone;
    o.summary = line;
    return o;
}

Outcome cmd_roots(const RunConfig& c) {
    const Target t = resolve_function(c);
    Outcome o;
    Report r;
    if (c.root_regularity) {
        r = verify_root_regularity(t.f, c.s, c.M, parse_list(c.delta_grid, "delta-grid"), t.region,
                                   c.samples ? c.samples : 1000);
    } else {
        const std::vector<double> gammas =
            c.chain ? parse_list(c.gamma_grid, "gamma-grid") : std::vector<double>{c.gamma};
        r = verify_power_smoothness_chain(t.f, gammas, c.order, t.region, c.samples ? c.samples : 2000);
    }
    o.result["report"] = to_json(r);
    o.passed = r.passed;
    o.summary = r.op + (r.passed ? " passed" : " failed");
    return o;
}

Outcome cmd_check(const RunConfig& c, const std::string& which) {
    const Target t = resolve_function(c);
    Report r;
    if (which == "odd-even") {
        r = verify_odd_even_control(*t.f, t.region, c.samples ? c.samples : 2000);
    } else if (which == "interp") {
        r = verify_interpolation_bound(*t.f, t.region, c.m, c.k, c.samples ? c.samples : 1000);
    } else if (which == "slow-vary") {
        ControlDistanceParams p;
        p.delta = c.delta;
        p.variant = c.variant == "reduced" ? RhoVariant::reduced : RhoVariant::full;
        r = verify_slowly_varying(*t.f, p, t.region, c.samples ? c.samples : 2000);
    } else {
        r = check_differential_inequalities(*t.f, c.delta, c.eta, t.region, c.samples ? c.samples : 400);
    }
    Outcome o;
    o.result["report"] = to_json(r);
    o.passed = r.passed;
    o.summary = r.op + (r.passed ? " passed" : " failed") + ", ratio " + fmt(r.ratio);
    return o;
}

Outcome cmd_threshold(const RunConfig& c) {
    if (!(c.gamma_alpha > 0.0)) throw ConfigError("gamma-alpha", "must be positive");
    const double g = gamma_alpha(c.gamma_alpha);
    const double s0 = 1.0 / (g * g);
    Outcome o;
    o.result["alpha"] = num(c.gamma_alpha);
    o.result["gamma"] = num(g);
    o.result["s0"] = num(s0);
    std::ostringstream s;
    s << std::fixed << std::setprecision(5) << "s0 = " << s0 << " (gamma = " << g << ")";
    o.summary = s.str();
    return o;
}

Outcome cmd_scan(const RunConfig& c) {
    if (c.s_range.empty()) throw ConfigError("s-range", "required for counterex scan");
    const std::vector<double> ss = parse_range(c.s_range, "s-range");
    const FamilyParams p = default_family(c.s_prime, c.rho);
    const SosFailureReport sos = sos_failure_criterion(p, c.beta);

    Outcome o;
    std::ostringstream csv;
    csv << "s,beta,rho,S,T,verdictSOS,verdictMonotone\n";
    json rows = json::array();
    int finite = 0;
    for (double s : ss) {
        const MonotoneBounds b = monotone_bounds(p, Modulus::power(s), c.delta);
        const bool div = b.divergent || b.lower_S.divergent || b.lower_T.divergent;
        const std::string verdict = div ? "divergent" : "finite";
        finite += div ? 0 : 1;
        rows.push_back(json{{"s", num(s)},
                            {"beta", num(c.beta)},
                            {"rho", num(c.rho)},
                            {"S", to_json(b.lower_S)},
                            {"T", to_json(b.lower_T)},
                            {"log_estimate", num(b.log_estimate)},
                            {"log_estimate_extended", num(b.log_estimate_extended)},
                            {"argmax", to_json(b.argmax)},
                            {"fitted_lower", num(b.fitted_lower)},
                            {"fitted_upper", num(b.fitted_upper)},
                            {"sandwich", b.sandwich},
                            {"verdictSOS", to_string(sos.verdict)},
                            {"verdictMonotone", verdict},
                            {"notes", b.notes}});
        csv << csv_number(s) << "," << csv_number(c.beta) << "," << csv_number(c.rho) << ","
            << csv_number(b.lower_S.sup) << "," << csv_number(b.lower_T.sup) << "," << to_string(sos.verdict) << ","
            << verdict << "\n";
    }
    o.result["s_prime"] = num(c.s_prime);
    o.result["threshold_s0"] = num(threshold_s0());
    o.result["sos"] = json{{"verdict", to_string(sos.verdict)}, {"beta", num(sos.beta)}};
    o.result["rows"] = rows;
    o.summary = std::to_string(ss.size()) + " values of s, " + std::to_string(finite) + " finite, SOS " +
                to_string(sos.verdict);
    o.csv = csv.str();
    return o;
}

Outcome cmd_delta_nu(const RunConfig& c) {
    if (c.nu < 0) throw ConfigError("nu", "must be nonnegative");
    if (!(c.c0 > 0.0)) throw ConfigError("c0", "must be positive");
    if (c.restarts < 1) throw ConfigError("restarts", "must be at least 1");
    DeltaNuOptions opt;
    opt.sphere_samples = c.sphere_samples;
    opt.restarts = c.restarts;
    opt.seed = c.seed;
    const DeltaNuReport r = estimate_delta_nu(c.nu, c.c0, opt);
    const CrucialCurve curve = crucial_lower_bound(r.estimate, c.beta, {1.0, 1e-1, 1e-2, 1e-3, 1e-4});

    Outcome o;
    json forms = json::array();
    for (const auto& q : r.forms) forms.push_back(to_json(Point(q.begin(), q.end())));
    json cert = json::array();
    for (const auto& x : r.certificate) cert.push_back(to_json(x));
    o.result["nu"] = r.nu;
    o.result["c0"] = num(r.c0);
    o.result["estimate"] = num(r.estimate);
    o.result["restart_values"] = to_json(r.restart_values, 0);
    o.result["stable_fraction"] = num(r.stable_fraction);
    o.result["stalled"] = r.stalled;
    o.result["min_abs_L"] = num(r.min_abs_L);
    o.result["forms"] = forms;
    o.result["certificate"] = cert;
    o.result["crucial_curve"] = json{
        {"beta", num(c.beta)}, {"exponent", num(curve.exponent)}, {"tau", to_json(curve.tau, 0)},
        {"bound", to_json(curve.bound, 0)}};
    o.passed = r.estimate > 0.0 && !r.stalled;
    o.summary = "delta_" + std::to_string(r.nu) + " ~ " + fmt(r.estimate) + (r.stalled ? " (stalled)" : "");
    return o;
}

Outcome cmd_catalog(const RunConfig&) {
    Outcome o;
    json rows = json::array();
    std::ostringstream table;
    for (const auto& e : list_catalog()) {
        rows.push_back(json{{"name", e.name}, {"parameters", e.parameters}, {"formula", e.formula}, {"note", e.note}});
        table << std::left << std::setw(14) << e.name << "  " << e.formula << "\n";
    }
    o.result["functions"] = rows;
    o.summary = table.str();
    if (!o.summary.empty()) o.summary.pop_back();
    return o;
}

void validate(const RunConfig& c) {
    if (c.format != "json" && c.format != "text") throw ConfigError("format", "expected json or text");
    if (c.variant != "full" && c.variant != "reduced") throw ConfigError("variant", "expected full or reduced");
    if (c.threads < 1) throw ConfigError("threads", "must be at least 1");
    if (!(c.delta > 0.0 && c.delta <= 0.5)) throw ConfigError("delta", "must lie in (0, 1/2]");
    if (!(c.eta > 0.0 && c.eta < 1.0)) throw ConfigError("eta", "must lie in (0, 1)");
    if (!(c.s >= 0.0 && c.s <= 1.0)) throw ConfigError("s", "must lie in [0, 1]");
    if (!(c.s_prime > 0.0 && c.s_prime <= 1.0)) throw ConfigError("s-prime", "must lie in (0, 1]");
    if (!(c.rho > 0.0 && c.rho < 1.0)) throw ConfigError("rho", "must lie in (0, 1)");
    if (!(c.beta > 0.0 && c.beta < 4.0)) throw ConfigError("beta", "must lie in (0, 4)");
    if (!(c.gamma > 0.0)) throw ConfigError("gamma", "must be positive");
    if (c.order < 1 || c.order > 4) throw ConfigError("order", "must lie in 1..4");
    if (!(c.tol > 0.0)) throw ConfigError("tol", "must be positive");
    if (!(c.floor >= 0.0)) throw ConfigError("floor", "must be nonnegative");
    if (!(c.t_min > 0.0 && c.t_min < 1.0)) throw ConfigError("t-min", "must lie in (0, 1)");
    if (c.outer == 0 || c.inner == 0) throw ConfigError(c.outer == 0 ? "outer" : "inner", "must be positive");
}

Outcome dispatch(const RunConfig& c) {
    validate(c);
    if (c.command == "decompose") return cmd_decompose(c, false);
    if (c.command == "verify") return cmd_decompose(c, true);
    if (c.command == "monotone") return cmd_monotone(c);
    if (c.command == "roots") return cmd_roots(c);
    if (c.command == "counterex scan") return cmd_scan(c);
    if (c.command == "counterex threshold") return cmd_threshold(c);
    if (c.command == "counterex delta-nu") return cmd_delta_nu(c);
    if (c.command.rfind("check ", 0) == 0) return cmd_check(c, c.command.substr(6));
    if (c.command == "catalog") return cmd_catalog(c);
    throw ConfigError("command", "unknown command '" + c.command + "'");
}

void add_options(CLI::App& app, RunConfig& c) {
    app.add_option("--function", c.function, "catalog name, expression, or a name from --function-file");
    app.add_option("--vars", c.vars, "comma separated variable order for an expression");
    app.add_option("--function-file", c.function_file, "file of `def name(vars) = expr` lines");
    app.add_option("--param", c.params, "catalog parameter key=value")->expected(1)->take_all();
    app.add_option("--dim", c.dim, "number of variables");
    app.add_option("--region-center", c.region_center, "comma separated center of the region ball");
    app.add_option("--region-radius", c.region_radius, "radius of the region ball");

    app.add_option("--delta", c.delta, "Holder exponent delta");
    app.add_option("--eta", c.eta, "Hessian exponent eta");
    app.add_option("--s", c.s, "modulus exponent s");
    app.add_option("--s-grid", c.s_grid, "comma separated exponents s");
    app.add_option("--s-prime", c.s_prime, "family exponent s'");
    app.add_option("--beta", c.beta, "SOS exponent beta");
    app.add_option("--rho", c.rho, "plateau radius rho");
    app.add_option("--gamma", c.gamma, "power gamma");
    app.add_option("--gamma-grid", c.gamma_grid, "comma separated powers for --chain");
    app.add_option("--order", c.order, "derivative order");
    app.add_option("--M", c.M, "derivative order for --root-regularity");
    app.add_option("--delta-grid", c.delta_grid, "comma separated exponents for --root-regularity");
    app.add_flag("--root-regularity", c.root_regularity, "check the square root regularity instead");
    app.add_flag("--chain", c.chain, "run the power smoothness chain over --gamma-grid");
    app.add_option("--m", c.m, "lower order for check interp");
    app.add_option("--k", c.k, "upper order for check interp");
    app.add_option("--samples", c.samples, "sample or grid size; 0 picks a command default");
    app.add_option("--tol", c.tol, "relative residual tolerance");
    app.add_option("--floor", c.floor, "truncation floor for f");
    app.add_option("--cover-s", c.cover_s, "cover scale s");
    app.add_option("--max-depth", c.max_depth, "induction depth limit");
    app.add_flag("--strict-inequalities", c.strict_inequalities,
                 "stop when the differential inequalities are not verified");
    app.add_option("--holder-samples", c.holder_samples, "samples for the Holder estimates of the roots");
    app.add_option("--identity-samples", c.identity_samples, "samples per cell for the Case II checks");
    app.add_option("--outer", c.outer, "outer samples for the monotone functional");
    app.add_option("--inner", c.inner, "inner samples per outer point");
    app.add_option("--t-min", c.t_min, "smallest |x| for the monotone functional");
    app.add_flag("--one-sided", c.one_sided, "1D only: x in [t-min, 1]");
    app.add_option("--c-max", c.c_max, "largest constant counted as finite");
    app.add_option("--modulus-table", c.modulus_table, "concave modulus as t:w pairs");
    app.add_option("--s-range", c.s_range, "a:b:step for counterex scan");
    app.add_option("--gamma-alpha", c.gamma_alpha, "alpha in gamma_alpha");
    app.add_option("--nu", c.nu, "number of squares for delta-nu");
    app.add_option("--c0", c.c0, "coefficient bound for delta-nu");
    app.add_option("--sphere-samples", c.sphere_samples, "sphere samples for delta-nu");
    app.add_option("--restarts", c.restarts, "optimizer restarts for delta-nu");
    app.add_option("--variant", c.variant, "control distance variant: full or reduced");

    app.add_option("--seed", c.seed, "random seed");
    app.add_option("--threads", c.threads, "worker cap");
    app.add_option("--format", c.format, "json or text");
    app.add_option("--output", c.output, "write the JSON report here");
    app.add_option("--csv", c.csv, "write grid or sweep rows here");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"sosreg: sums of squares and regularity of nonnegative functions"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file; flags override it");
    add_options(app, c);

    auto* decompose_cmd = app.add_subcommand("decompose", "decompose f into squares and report the residual");
    auto* verify_cmd = app.add_subcommand("verify", "decompose and run every verification check");
    auto* monotone_cmd = app.add_subcommand("monotone", "monotone functional and its verdict");
    auto* roots_cmd = app.add_subcommand("roots", "smoothness of powers and square roots");
    auto* counterex = app.add_subcommand("counterex", "the counterexample family");
    counterex->require_subcommand(1);
    auto* scan = counterex->add_subcommand("scan", "sweep s and report S, T and the verdicts");
    auto* threshold = counterex->add_subcommand("threshold", "s0 = 1/gamma_alpha^2");
    auto* delta_nu = counterex->add_subcommand("delta-nu", "estimate delta_nu");
    auto* check = app.add_subcommand("check", "pointwise calculus checks");
    check->require_subcommand(1);
    std::vector<std::pair<CLI::App*, std::string>> leaves = {
        {decompose_cmd, "decompose"}, {verify_cmd, "verify"}, {monotone_cmd, "monotone"},
        {roots_cmd, "roots"}, {scan, "counterex scan"}, {threshold, "counterex threshold"},
        {delta_nu, "counterex delta-nu"}, {app.add_subcommand("catalog", "list the function catalog"), "catalog"}};
    for (const char* name : {"odd-even", "interp", "slow-vary", "diff-ineq"})
        leaves.emplace_back(check->add_subcommand(name), std::string("check ") + name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kError;
    }
    for (const auto& [sub, name] : leaves)
        if (sub->parsed()) c.command = name;

    Outcome o;
    try {
        o = dispatch(c);
    } catch (const ConfigError& e) {
        err << "error: invalid config, " << e.what() << "\n";
        return kError;
    } catch (const ParseError& e) {
        err << "error: function: " << e.what() << "\n";
        return kError;
    } catch (const PreconditionError& e) {
        err << "error: " << c.command << ": precondition failed: " << e.what() << "\n";
        return kError;
    } catch (const std::exception& e) {
        err << "error: " << c.command << ": " << e.what() << "\n";
        return kError;
    }

    json report;
    report["command"] = c.command;
    report["status"] = o.passed ? "pass" : "fail";
    report["config"] = to_json(c);
    report["result"] = o.result;
    const std::string text = report.dump(2) + "\n";

    if (!c.output.empty()) {
        std::ofstream f(c.output, std::ios::binary);
        if (!(f << text)) {
            err << "error: output: cannot write " << c.output << "\n";
            return kError;
        }
    }
    if (!c.csv.empty() && !o.csv.empty()) {
        std::ofstream f(c.csv, std::ios::binary);
        if (!(f << o.csv)) {
            err << "error: csv: cannot write " << c.csv << "\n";
            return kError;
        }
    }
    const std::string line = o.summary + "\n" + c.command + ": " + (o.passed ? "PASS" : "FAIL") + "\n";
    if (c.format == "text" || !c.output.empty())
        out << line;
    else {
        out << text;
        err << line;
    }
    return o.passed ? kPass : kFail;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"sosreg"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace sosreg::cli
