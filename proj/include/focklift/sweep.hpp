#ifndef FOCKLIFT_SWEEP_HPP
#define FOCKLIFT_SWEEP_HPP

// Randomized check of the commutator lifting inequality.

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "focklift/dilation.hpp"
#include "focklift/random.hpp"

namespace focklift {

struct SweepConfig {
    std::uint64_t seed = 42;
    int count = 100;
    int n_min = 1;
    int n_max = 2;
    int dims_max = 3;
    int degree = -1;                 // -1: 12 for n <= 2, 8 for n = 3
    std::set<int> inject_noncontraction;   // instance indices whose A gets norm > 1
    double tol = 1e-8;
};

struct SweepRecord {
    int index = 0;
    int n = 0;
    int dim_h = 0;
    int dim_y = 0;
    int degree = 0;
    int exit_code = 0;               // 0 pass, 1 check failed, 2 invalid input, 3 numerical failure
    bool pass = false;
    double ratio = 0.0;              // max residual / ||[T_i A - A Y_i]||^{1/2}
    double max_residual = 0.0;
    double rhs = 0.0;
    double tail_bound = 0.0;
    double norm_B = 0.0;
    bool degenerate = false;
    std::string message;
};

struct SweepReport {
    SweepConfig config;
    std::vector<SweepRecord> records;
    int passed = 0;
    int failed = 0;
    int errors = 0;
    double max_ratio = 0.0;
};

inline int sweep_degree(const SweepConfig& c, int n) { return c.degree >= 0 ? c.degree : (n <= 2 ? 12 : 8); }

inline SweepRecord sweep_instance(const SweepConfig& cfg, int index)
{
    auto rng = rnd::stream(cfg.seed, static_cast<std::uint64_t>(index));
    SweepRecord rec;
    rec.index = index;
    rec.n = rnd::uniform_int(rng, cfg.n_min, cfg.n_max);
    rec.dim_h = rnd::uniform_int(rng, 1, cfg.dims_max);
    rec.dim_y = rnd::uniform_int(rng, 1, cfg.dims_max);
    rec.degree = sweep_degree(cfg, rec.n);
    const RowTuple T = rnd::row_contraction(rng, rec.n, rec.dim_h);
    const RowTuple Y = rnd::row_contraction(rng, rec.n, rec.dim_y);
    Matrix A = rnd::contraction(rng, rec.dim_h, rec.dim_y);
    if (cfg.inject_noncontraction.count(index))
        A *= 1.5 / op_norm(A);
    try {
        CommutatorOptions opt;
        opt.lift.tol = cfg.tol;
        const auto res = lift_commutator(T, Y, A, rec.degree, opt);
        const auto rep = verify_lifting(res.lift, res.problem, cfg.tol);
        rec.pass = rep.all_pass;
        rec.exit_code = rep.all_pass ? 0 : 1;
        rec.ratio = rep.ratio;
        rec.degenerate = rep.degenerate;
        rec.max_residual = std::max(rep.max_residual, rep.max_pair_residual);
        rec.rhs = res.rhs_direct;
        rec.tail_bound = res.lift.tail_bound;
        rec.norm_B = res.lift.norm_B;
        if (!rep.all_pass)
            for (const auto& c : rep.checks)
                if (!c.pass)
                    rec.message += (rec.message.empty() ? "" : ", ") + c.name;
    } catch (const InvalidInput& e) {
        rec.exit_code = 2;
        rec.message = e.what();
    } catch (const NumericalFailure& e) {
        rec.exit_code = 3;
        rec.message = e.what();
    }
    return rec;
}

inline SweepReport verify_sweep(const SweepConfig& cfg)
{
    if (cfg.count < 0 || cfg.n_min < 1 || cfg.n_max < cfg.n_min || cfg.dims_max < 1)
        throw InvalidInput("sweep: bad configuration");
    SweepReport rep;
    rep.config = cfg;
    for (int i = 0; i < cfg.count; ++i) {
        auto rec = sweep_instance(cfg, i);
        if (rec.exit_code == 0)
            ++rep.passed;
        else if (rec.exit_code == 1)
            ++rep.failed;
        else
            ++rep.errors;
        if (rec.exit_code <= 1)
            rep.max_ratio = std::max(rep.max_ratio, rec.ratio);
        rep.records.push_back(std::move(rec));
    }
    return rep;
}

} // namespace focklift

#endif // FOCKLIFT_SWEEP_HPP
