#ifndef FOCKLIFT_CLI_HPP
#define FOCKLIFT_CLI_HPP

// Problem dispatch behind the command-line tool.  Every entry point returns
// a JSON report together with the process exit code:
//   0 success / feasible, 1 well-posed but infeasible, 2 invalid input,
//   3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "focklift/focklift.hpp"

namespace focklift::cli {

using json = nlohmann::json;

enum Exit { ok = 0, infeasible = 1, invalid = 2, numerical = 3 };

struct Outcome {
    json report;
    int code = ok;
};

struct Params {
    double tol = 1e-9;
    int degree = -1;
    bool quiet = false;
};

inline double default_tol(double fallback = 1e-9)
{
    if (const char* env = std::getenv("FOCKLIFT_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && *end == '\0' && v > 0.0)
            return v;
        throw InvalidInput(std::string("FOCKLIFT_TOL is not a positive number: ") + env);
    }
    return fallback;
}

inline json read_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open spec file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("malformed JSON: ") + e.what());
    }
}

inline json error_object(const std::string& kind, const std::string& message)
{
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

// certificates live under one key so --quiet can drop them
inline void finish(Outcome& o, const Params& p)
{
    if (p.quiet)
        o.report.erase("certificates");
}

inline double tol_field(const json& spec, const Params& p)
{
    if (spec.contains("tol")) {
        if (!spec["tol"].is_number() || spec["tol"].get<double>() <= 0.0)
            throw InvalidInput("tol must be a positive number");
        return spec["tol"].get<double>();
    }
    if (spec.contains("params") && spec["params"].contains("tol"))
        return tol_field(spec["params"], p);
    return p.tol;
}

inline int int_param(const json& spec, const char* key, int fallback)
{
    if (spec.contains(key))
        return io::int_field(spec, key, "spec");
    if (spec.contains("params") && spec["params"].contains(key))
        return io::int_field(spec["params"], key, "spec.params");
    return fallback;
}

// ---------------------------------------------------------------------------

inline Outcome fock_info(int n, int D, const Params& p)
{
    Outcome o;
    o.report = {{"kind", "fock_info"}, {"n", n}, {"degree", D}, {"dim", fock_dim(n, D)}};
    if (fock_dim(n, D) <= 512) {
        json words = json::array();
        for (const auto& w : enumerate_words(n, D))
            words.push_back(w.to_string());
        o.report["words"] = words;
    }
    finish(o, p);
    return o;
}

// {T, A, Y} commutator; {T, A, C, Q} intertwining; {T, A, J, R} subspace
inline Outcome lift_verify(const json& spec, const Params& p)
{
    const double tol = spec.contains("tol") ? tol_field(spec, p) : 1e-8;
    const int D = p.degree >= 0 ? p.degree : int_param(spec, "degree", 12);
    const RowTuple T = io::tuple_from_json(io::field(spec, "T", "lift"), "lift.T");
    const Matrix A = io::matrix_from_json(io::field(spec, "A", "lift"), "lift.A");
    Outcome o;
    json cert;
    LiftOptions lo;
    lo.tol = tol;
    VerificationReport rep;
    LiftResult res;
    std::string mode;
    if (spec.contains("Y")) {
        mode = "commutator";
        CommutatorOptions co;
        co.lift = lo;
        co.equal_norm = spec.value("equal_norm", false);
        if (spec.contains("y_degree"))
            co.y_degree = io::int_field(spec, "y_degree", "lift");
        const auto cr = lift_commutator(T, io::tuple_from_json(spec["Y"], "lift.Y"), A, D, co);
        rep = verify_lifting(cr.lift, cr.problem, tol);
        res = cr.lift;
        cert["diff_norm"] = cr.diff_norm;
        cert["rhs_direct"] = cr.rhs_direct;
        cert["y_degree"] = cr.y_degree;
        cert["commutator_residuals"] = cr.commutator_residuals;
    } else if (spec.contains("C") || spec.contains("Q")) {
        mode = "intertwining";
        std::vector<Matrix> Cs, Qs;
        for (const auto& m : io::tuple_from_json(io::field(spec, "C", "lift"), "lift.C"))
            Cs.push_back(m);
        for (const auto& m : io::tuple_from_json(io::field(spec, "Q", "lift"), "lift.Q"))
            Qs.push_back(m);
        const auto prob = intertwining_problem(T, A, Cs, Qs, D, lo);
        res = lift_intertwining(prob, lo);
        rep = verify_lifting(res, prob, tol);
    } else {
        mode = "subspace";
        LiftProblem prob;
        prob.T = T;
        prob.A = A;
        prob.degree = D;
        for (const auto& m : io::tuple_from_json(io::field(spec, "J", "lift"), "lift.J"))
            prob.J.push_back(m);
        for (const auto& m : io::tuple_from_json(io::field(spec, "R", "lift"), "lift.R"))
            prob.R.push_back(m);
        lo.normalize = spec.value("normalize", false);
        res = lift_subspace(prob, lo);
        rep = verify_lifting(res, prob, tol);
    }
    o.report = {{"kind", "lift"}, {"mode", mode}, {"degree", D}, {"verdict", rep.all_pass ? "pass" : "fail"}};
    o.report["result"] = io::to_json(res, spec.value("include_B", false));
    cert["verification"] = io::to_json(rep);
    o.report["certificates"] = cert;
    o.code = rep.all_pass ? ok : infeasible;
    finish(o, p);
    return o;
}

inline json to_json(const SweepRecord& r)
{
    return {{"index", r.index}, {"n", r.n}, {"dim_h", r.dim_h}, {"dim_y", r.dim_y}, {"degree", r.degree},
            {"exit_code", r.exit_code}, {"pass", r.pass}, {"ratio", r.ratio}, {"max_residual", r.max_residual},
            {"rhs", r.rhs}, {"tail_bound", r.tail_bound}, {"norm_B", r.norm_B}, {"degenerate", r.degenerate},
            {"message", r.message}};
}

inline Outcome sweep(const SweepConfig& cfg, const Params& p)
{
    const auto rep = verify_sweep(cfg);
    Outcome o;
    json recs = json::array();
    for (const auto& r : rep.records)
        recs.push_back(to_json(r));
    o.report = {{"kind", "verify_sweep"},
                {"config", {{"seed", cfg.seed}, {"count", cfg.count}, {"n_min", cfg.n_min}, {"n_max", cfg.n_max},
                            {"dims_max", cfg.dims_max}, {"degree", cfg.degree},
                            {"inject", std::vector<int>(cfg.inject_noncontraction.begin(),
                                                        cfg.inject_noncontraction.end())}}},
                {"passed", rep.passed},
                {"failed", rep.failed},
                {"errors", rep.errors},
                {"max_ratio", rep.max_ratio},
                {"sqrt2", std::sqrt(2.0)}};
    o.report["certificates"] = {{"records", recs}};
    o.code = rep.failed ? infeasible : ok;
    finish(o, p);
    return o;
}

inline SweepConfig sweep_config(const json& spec)
{
    SweepConfig c;
    if (spec.contains("seed")) {
        if (!spec["seed"].is_number_unsigned() && !spec["seed"].is_number_integer())
            throw InvalidInput("seed must be an integer");
        c.seed = spec["seed"].get<std::uint64_t>();
    }
    c.count = int_param(spec, "count", c.count);
    c.n_min = int_param(spec, "n_min", c.n_min);
    c.n_max = int_param(spec, "n_max", c.n_max);
    c.dims_max = int_param(spec, "dims_max", c.dims_max);
    c.degree = int_param(spec, "degree", c.degree);
    if (spec.contains("inject"))
        for (const auto& i : spec["inject"])
            c.inject_noncontraction.insert(i.get<int>());
    return c;
}

inline Outcome np(const json& spec, bool solve, const Params& p)
{
    const double tol = tol_field(spec, p);
    const NPData data = io::npdata_from_json(spec);
    Outcome o;
    const auto f = np_feasible(data, tol);
    const auto mn = np_min_norm(data);
    o.report = {{"kind", io::is_scalar_np(spec) ? "scalar_np" : "np"},
                {"k", data.k},
                {"feasible", f.feasible},
                {"marginal", f.marginal},
                {"min_eig", f.min_eig},
                {"min_norm", mn.value}};
    json cert = {{"threshold", f.threshold}, {"lyapunov_residual", f.lyapunov_residual},
                 {"condition", mn.condition}, {"fallback", mn.fallback}};
    if (solve && f.feasible) {
        CharacterizationOptions co;
        co.cutoff = p.degree >= 0 ? p.degree : int_param(spec, "degree", co.cutoff);
        const auto s = np_solve(data, co, tol);
        o.report["phi"] = io::to_json(*s.phi);
        o.report["residuals"] = s.constraint_residuals;
        cert["series_residuals"] = s.series_residuals;
        cert["series_bounds"] = s.series_bounds;
        cert["printed_residuals"] = s.printed_residuals;
        cert["printed_bounds"] = s.printed_bounds;
        cert["pk_norm"] = {s.pk_norm_lo, s.pk_norm_hi};
        double worst = 0.0;
        for (double r : s.constraint_residuals)
            worst = std::max(worst, r);
        if (worst > 1e-7)
            throw NumericalFailure("np_solve: constraint residual " + std::to_string(worst) + " after construction");
    }
    o.report["certificates"] = cert;
    o.code = f.feasible ? ok : infeasible;
    finish(o, p);
    return o;
}

inline Outcome pick(const json& spec, const Params& p)
{
    const double tol = tol_field(spec, p);
    const int k = io::int_field(spec, "k", "pick");
    const auto pts = io::points_from_json(io::field(spec, "points", "pick"), "pick.points");
    PickPair pp;
    if (spec.contains("values")) {
        pp = scalar_pick_matrices(pts, io::values_from_json(spec["values"], "pick.values"), k, tol);
    } else {
        std::vector<Matrix> Bs, Cs;
        for (const auto& m : io::tuple_from_json(io::field(spec, "B", "pick"), "pick.B"))
            Bs.push_back(m);
        for (const auto& m : io::tuple_from_json(io::field(spec, "C", "pick"), "pick.C"))
            Cs.push_back(m);
        pp = scalar_pick_matrices(pts, Bs, Cs, k, tol);
    }
    Outcome o;
    o.report = {{"kind", "pick"}, {"k", k}, {"feasible", pp.verdict.feasible}, {"marginal", pp.verdict.marginal},
                {"min_eig", pp.verdict.min_eig}};
    o.report["certificates"] = {{"lhs", io::to_json(pp.lhs)}, {"rhs", io::to_json(pp.rhs)},
                                {"threshold", pp.verdict.threshold}, {"threshold_scale", pp.threshold_scale}};
    o.code = pp.verdict.feasible ? ok : infeasible;
    finish(o, p);
    return o;
}

inline Outcome schur(const json& spec, const Params& p)
{
    const int k = io::int_field(spec, "k", "schur");
    const Symbol Theta = io::symbol_from_json(io::field(spec, "coefficients", "schur"), "schur.coefficients");
    CharacterizationOptions co;
    co.cutoff = p.degree >= 0 ? p.degree : int_param(spec, "degree", co.cutoff);
    const double tol = spec.contains("tol") ? tol_field(spec, p) : 1e-12;
    const auto r = schur_caratheodory(Theta, k, spec.value("completion", true), tol, co);
    Outcome o;
    o.report = {{"kind", "schur"}, {"k", k}, {"m", r.m}, {"feasible", r.feasible}, {"min_norm", r.min_norm}};
    if (r.phi)
        o.report["phi"] = io::to_json(*r.phi);
    o.report["certificates"] = {{"coefficient_residual", r.coefficient_residual},
                                {"pk_norm", {r.pk_norm_lo, r.pk_norm_hi}}};
    o.code = r.feasible ? ok : infeasible;
    finish(o, p);
    return o;
}

inline Outcome sarason(const json& spec, const Params& p)
{
    const int k = io::int_field(spec, "k", "sarason");
    const Symbol phi = io::symbol_from_json(io::field(spec, "phi", "sarason"), "sarason.phi");
    const Symbol theta = io::symbol_from_json(io::field(spec, "theta", "sarason"), "sarason.theta");
    const int need = k + phi.degree() + theta.degree();
    const int D = p.degree >= 0 ? p.degree : int_param(spec, "degree", need);
    CharacterizationOptions co;
    co.cutoff = int_param(spec, "cutoff", co.cutoff);
    const auto r = sarason_distance(phi, theta, k, D, spec.value("want_psi", false), co);
    Outcome o;
    o.report = {{"kind", "sarason"}, {"k", k}, {"degree", D}, {"distance", r.distance}};
    json cert = {{"h_dim", r.h_dim}};
    if (r.psi) {
        o.report["psi"] = io::to_json(*r.psi);
        cert["achieved"] = {r.achieved_lo, r.achieved_hi};
        cert["reproduce_residual"] = r.reproduce_residual;
    }
    o.report["certificates"] = cert;
    finish(o, p);
    return o;
}

// {kind, ...payload, params?}
inline Outcome run(const json& spec, const Params& p)
{
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string())
        throw InvalidInput("spec needs a string field 'kind'");
    const std::string kind = spec["kind"];
    Params q = p;
    if (q.degree < 0)
        q.degree = int_param(spec, "degree", -1);
    if (kind == "fock_info")
        return fock_info(io::int_field(spec, "n", "spec"), io::int_field(spec, "degree", "spec"), q);
    if (kind == "lift")
        return lift_verify(spec, q);
    if (kind == "np" || kind == "scalar_np")
        return np(spec, spec.value("solve", false), q);
    if (kind == "pick")
        return pick(spec, q);
    if (kind == "schur")
        return schur(spec, q);
    if (kind == "sarason")
        return sarason(spec, q);
    if (kind == "verify_sweep")
        return sweep(sweep_config(spec), q);
    throw InvalidInput("unknown kind '" + kind + "'");
}

// Runs f, mapping exceptions to exit codes and error objects.
template <class F>
Outcome guarded(F&& f)
{
    try {
        return f();
    } catch (const InvalidInput& e) {
        return {error_object("invalid_input", e.what()), invalid};
    } catch (const json::exception& e) {
        return {error_object("invalid_input", e.what()), invalid};
    } catch (const NumericalFailure& e) {
        return {error_object("numerical_failure", e.what()), numerical};
    }
}

} // namespace focklift::cli

#endif // FOCKLIFT_CLI_HPP
