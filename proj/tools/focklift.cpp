#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "focklift/cli.hpp"

using namespace focklift;
using focklift::cli::json;
using focklift::cli::Outcome;

namespace {

int emit(const Outcome& o)
{
    if (o.report.contains("error"))
        std::cerr << o.report.dump() << "\n";
    else
        std::cout << o.report.dump(2) << "\n";
    return o.code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Commutator lifting and interpolation on truncated Fock spaces"};
    app.require_subcommand(1);

    cli::Params params;
    bool quiet = false;
    double tol = -1.0;
    app.add_flag("--quiet", quiet, "drop certificates from the report");
    app.add_option("--tol", tol, "tolerance (overrides FOCKLIFT_TOL)");

    // fock info
    auto* fock = app.add_subcommand("fock", "truncated Fock space facts");
    auto* fock_info = fock->add_subcommand("info", "dimension and word order");
    int n = 1, degree = 0;
    fock_info->add_option("--n", n, "letter count")->required();
    fock_info->add_option("--degree", degree, "maximal word length")->required();
    fock->require_subcommand(1);

    // lift verify / sweep
    auto* lift = app.add_subcommand("lift", "lifting construction and checks");
    lift->require_subcommand(1);
    auto* lift_verify = lift->add_subcommand("verify", "lift one problem and verify the certificates");
    std::string spec_path;
    int lift_degree = -1;
    lift_verify->add_option("--spec", spec_path, "problem JSON")->required();
    lift_verify->add_option("--degree", lift_degree, "dilation truncation degree");
    auto* lift_sweep = lift->add_subcommand("sweep", "randomized check of the lifting inequality");
    SweepConfig sc;
    std::vector<int> inject;
    lift_sweep->add_option("--seed", sc.seed, "PRNG seed");
    lift_sweep->add_option("--count", sc.count, "number of instances");
    lift_sweep->add_option("--n-min", sc.n_min);
    lift_sweep->add_option("--n-max", sc.n_max);
    lift_sweep->add_option("--dims-max", sc.dims_max);
    lift_sweep->add_option("--degree", sc.degree, "dilation degree (default 12 for n <= 2, 8 for n = 3)");
    lift_sweep->add_option("--inject", inject, "instance indices that get a non-contractive A");

    // np check / solve
    auto* np = app.add_subcommand("np", "Nevanlinna-Pick with operator arguments");
    np->require_subcommand(1);
    auto* np_check = np->add_subcommand("check", "feasibility and minimal norm");
    auto* np_solve = np->add_subcommand("solve", "feasibility and an interpolant");
    int np_degree = -1;
    for (auto* s : {np_check, np_solve}) {
        s->add_option("--spec", spec_path, "NP JSON")->required();
        s->add_option("--degree", np_degree, "symbol cutoff for the interpolant");
    }

    auto* pick = app.add_subcommand("pick", "Pick matrices for points of the ball");
    pick->require_subcommand(1);
    auto* pick_check = pick->add_subcommand("check", "positivity of the Pick difference");
    pick_check->add_option("--spec", spec_path)->required();

    auto* schur = app.add_subcommand("schur", "Schur-Caratheodory completion");
    schur->add_option("--spec", spec_path)->required();
    auto* sarason = app.add_subcommand("sarason", "Sarason distance");
    sarason->add_option("--spec", spec_path)->required();
    auto* run = app.add_subcommand("run", "dispatch a spec on its 'kind' field");
    run->add_option("--spec", spec_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::invalid;
    }

    const Outcome out = cli::guarded([&]() -> Outcome {
        params.quiet = quiet;
        params.tol = tol > 0.0 ? tol : cli::default_tol();
        if (fock_info->parsed())
            return cli::fock_info(n, degree, params);
        if (lift_sweep->parsed()) {
            sc.inject_noncontraction.insert(inject.begin(), inject.end());
            return cli::sweep(sc, params);
        }
        const json spec = cli::read_spec(spec_path);
        if (lift_verify->parsed()) {
            params.degree = lift_degree;
            return cli::lift_verify(spec, params);
        }
        if (np_check->parsed() || np_solve->parsed()) {
            params.degree = np_degree;
            return cli::np(spec, np_solve->parsed(), params);
        }
        if (pick_check->parsed())
            return cli::pick(spec, params);
        if (schur->parsed())
            return cli::schur(spec, params);
        if (sarason->parsed())
            return cli::sarason(spec, params);
        return cli::run(spec, params);
    });
    return emit(out);
}
