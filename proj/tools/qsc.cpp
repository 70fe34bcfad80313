#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <random>

#include "qsc/io.hpp"
#include "qsc/sweeps.hpp"

namespace fs = std::filesystem;
using namespace qsc;

namespace {

struct Tolerances {
    double exact;
    double derived;
};

Tolerances tolerances(const ExperimentConfig& cfg, const std::string& profile)
{
    if (profile == "strict")
        return {cfg.tol_exact * 0.1, cfg.tol_derived * 0.1};
    return {cfg.tol_exact, cfg.tol_derived};
}

ResultRow order_row(const std::string& name, const SweepResult& sweep,
                    const ExperimentConfig& cfg, const Tolerances& tol)
{
    ResultRow r;
    r.name = name;
    r.n_modes = cfg.n_modes;
    r.n_steps = cfg.n_steps;
    r.seed = cfg.seed;
    r.abs_error = sweep.errors.empty() ? 0.0 : sweep.errors.back();
    r.rel_error = r.abs_error;
    r.order = sweep.order;
    // a defect that is identically at machine scale has no measurable order
    r.pass = sweep.passes_order(tol.exact);
    return r;
}

Vec random_field(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Vec z(n);
    for (int i = 0; i < n; ++i)
        z(i) = cplx(g(rng), g(rng));
    return z;
}

// ---------------------------------------------------------------- car-check

std::vector<ResultRow> run_car_check(const ExperimentConfig& cfg, const Tolerances& tol)
{
    const int n = cfg.n_modes;
    const ModeGrid grid(cfg.horizon, std::max(n, 1));
    const Eigen::Index dim = Eigen::Index{1} << grid.n_modes();
    std::mt19937_64 rng(cfg.seed);
    double car_worst = 0.0;
    double norm_worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const Vec z = random_field(grid.n_modes(), rng);
        const Vec zp = random_field(grid.n_modes(), rng);
        const Mat psi = field_op(grid, z);
        const Mat psip = field_op(grid, zp);
        const cplx pair = 2.0 * field_inner(grid, field_conj(zp), z);
        const double defect =
            op_norm(psi * psip + psip * psi - pair * Mat::Identity(dim, dim));
        car_worst = std::max(car_worst,
                             defect / (field_norm(grid, z) * field_norm(grid, zp)));
        const double nz = field_norm(grid, z);
        norm_worst = std::max(norm_worst, std::abs(op_norm(creation_op(grid, z)) - nz) / nz);
    }
    ExperimentConfig c = cfg;
    return {ResultRow::from_report(IdentityReport::defect("car", car_worst, 1.0, tol.exact),
                                   c.n_modes, c.n_steps, c.seed),
            ResultRow::from_report(
                IdentityReport::defect("creation-norm", norm_worst, 1.0, tol.derived),
                c.n_modes, c.n_steps, c.seed)};
}

// ----------------------------------------------------------------- isometry

std::vector<ResultRow> run_isometry(const ExperimentConfig& cfg, const Tolerances& tol)
{
    const ModeGrid grid(cfg.horizon, cfg.n_steps);
    double left = 0.0, right = 0.0, hs = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
        const uint64_t s = cfg.seed + 1000 * static_cast<uint64_t>(t);
        const VectorProcess phi = vector_source_preset(grid, "random", 1.0, s);
        left = std::max(left, vector_isometry_check(phi, false).rel_error);
        right = std::max(right, vector_isometry_check(phi, true).rel_error);
        const OperatorProcess op = operator_source_preset(grid, "dense", 1.0, s + 7);
        hs = std::max(hs, hs_isometry_check(op).rel_error);
    }
    return {ResultRow::from_report(
                IdentityReport::defect("ito-isometry-left", left, 1.0, tol.derived),
                cfg.n_modes, cfg.n_steps, cfg.seed),
            ResultRow::from_report(
                IdentityReport::defect("ito-isometry-right", right, 1.0, tol.derived),
                cfg.n_modes, cfg.n_steps, cfg.seed),
            ResultRow::from_report(
                IdentityReport::defect("ito-isometry-hs", hs, 1.0, tol.derived),
                cfg.n_modes, cfg.n_steps, cfg.seed)};
}

// ------------------------------------------------------------ forward-sweep

std::vector<ResultRow> run_forward_sweep(const ExperimentConfig& cfg, const Tolerances& tol)
{
    std::vector<ResultRow> rows;

    // superposition x = U xi + V u + Xi v, exact per scheme run
    {
        const ModeGrid grid(cfg.horizon, cfg.n_steps);
        const LinearCoefficients coeffs =
            coefficient_pair(grid, cfg.data.d_name, cfg.data.d_lambda, cfg.data.f_name,
                             cfg.data.f_lambda, cfg.seed);
        const ProbeTuple p = probe_preset(grid, 0, cfg.seed + 5, cfg.probe_kind != "random");
        const Path x = solve_linear(p.xi, p.u, p.v, coeffs, 0, cfg.make_scheme());
        const InitialFlow fu = flow_U(coeffs, 0, cfg.make_scheme());
        const SourceFlow fv = flow_V(coeffs, 0, cfg.make_scheme());
        const SourceFlow fx = flow_Xi(coeffs, 0, cfg.make_scheme());
        const AnchorSpace sp{&grid, 0};
        const Vec su = sp.stack(p.u);
        const Vec sv = sp.stack(p.v);
        double defect = 0.0, scale = 1.0;
        for (int j = 0; j <= grid.n_steps(); ++j) {
            const size_t js = static_cast<size_t>(j);
            defect = std::max(defect,
                              (x.at(j) - (fu.at[js] * p.xi + fv.at[js] * su + fx.at[js] * sv))
                                  .norm());
            scale = std::max(scale, x.at(j).norm());
        }
        rows.push_back(ResultRow::from_report(
            IdentityReport::defect("superposition", defect, scale, tol.exact), cfg.n_modes,
            cfg.n_steps, cfg.seed));

        // Euler and Picard land on the same discrete fixed point
        const Path xp = solve_linear(p.xi, p.u, p.v, coeffs, 0, SchemeOptions::picard());
        double diff = 0.0;
        for (int j = 0; j <= grid.n_steps(); ++j)
            diff = std::max(diff, (x.at(j) - xp.at(j)).norm());
        rows.push_back(ResultRow::from_report(
            IdentityReport::defect("euler-picard-agreement", diff, scale, tol.exact),
            cfg.n_modes, cfg.n_steps, cfg.seed));
    }

    // scalar benchmark x(T) -> e^{lambda T} Omega, dyadic refinement
    rows.push_back(order_row("scalar-forward-order",
                             scalar_forward_sweep({3, 4, 6, 8}, cfg.horizon, 0.4), cfg,
                             tol));
    return rows;
}

// ------------------------------------------------------------ adjoint-solve

std::vector<ResultRow> run_adjoint_solve(const ExperimentConfig& cfg, const Tolerances& tol)
{
    std::vector<ResultRow> rows;

    // scalar benchmark: P(0) -> e^{2 lambda T} on the vacuum block
    {
        const double lambda = 0.3;
        const int n = cfg.n_steps;
        const double err = scalar_p0_error(n, lambda);
        const double bound = 3.0 * lambda * lambda / n;
        IdentityReport r = IdentityReport::defect("scalar-P0-benchmark", err, 1.0, bound);
        rows.push_back(ResultRow::from_report(r, cfg.n_modes, n, cfg.seed));
    }

    // representation vs recursion, dyadic refinement on intrinsic data
    rows.push_back(order_row("p-consistency-order",
                             p_consistency_sweep({2, 3, 4, 6, 8}, cfg.horizon, cfg.data,
                                                 cfg.make_driver(), cfg.make_scheme()),
                             cfg, tol));

    // residual of the martingale decomposition is first-class data
    {
        const ModeGrid grid(cfg.horizon, cfg.n_steps);
        const AdjointData data = make_adjoint_data(grid, cfg.data);
        const TranspositionSolution sol = solve_adjoint_bqsde(data, cfg.make_driver());
        ResultRow r;
        r.name = "martingale-residual";
        r.n_modes = cfg.n_modes;
        r.n_steps = cfg.n_steps;
        r.seed = cfg.seed;
        r.abs_error = sol.residual_l1(grid);
        r.rel_error = r.abs_error;
        r.pass = std::isfinite(r.abs_error);
        rows.push_back(r);
    }
    return rows;
}

// ------------------------------------------------------------ duality-check

std::vector<ResultRow> run_duality_check(const ExperimentConfig& cfg, const Tolerances& tol)
{
    std::vector<ResultRow> rows;

    // martingale case (g = 0, w = 0): identity is exact
    {
        const ModeGrid grid(cfg.horizon, cfg.n_steps);
        const Mat p_term = terminal_preset(grid, "dense", 1.0, cfg.seed + 1);
        const OperatorProcess g = OperatorProcess::zero(grid);
        const TranspositionSolution sol = solve_linear_bqsde(p_term, g);
        const Mat x0 = conditional_expectation(terminal_preset(grid, "dense", 1.0,
                                                               cfg.seed + 2),
                                               0);
        const OperatorProcess z = operator_source_preset(grid, "dense", 1.0, cfg.seed + 3);
        const IdentityReport r = check_linear_duality(sol, p_term, g, x0, z,
                                                      OperatorProcess::zero(grid), 0,
                                                      tol.derived);
        ResultRow row = ResultRow::from_report(r, cfg.n_modes, cfg.n_steps, cfg.seed);
        row.name = "linear-duality-no-w";
        rows.push_back(row);
    }

    // full random data, refinement with several independent draws per level
    rows.push_back(order_row(
        "linear-duality-order",
        duality_defect_sweep({2, 3, 4, 5, 6, 8}, cfg.horizon, cfg.seed, 3), cfg, tol));

    // pointwise rank-one algebra and the trace dictionary are exact at n = 6
    {
        const ModeGrid grid(cfg.horizon, 6);
        const LinearCoefficients coeffs =
            coefficient_pair(grid, "random", 0.3, "random", 0.3, cfg.seed);
        const ProbeTuple p1 = probe_preset(grid, 0, cfg.seed + 31);
        const ProbeTuple p2 = probe_preset(grid, 0, cfg.seed + 32);
        const IdentityReport ra = check_rank_one_algebra(p1.xi, p2.xi, coeffs.D.at(0),
                                                         coeffs.F.at(0), tol.derived);
        ResultRow row = ResultRow::from_report(ra, 6, 6, cfg.seed);
        row.name = "rank-one-algebra";
        rows.push_back(row);

        const OperatorProcess q = operator_source_preset(grid, "word", 1.0, cfg.seed + 33);
        const IdentityReport rt =
            check_trace_dictionary(q, p1, p2, coeffs, 0, tol.derived);
        row = ResultRow::from_report(rt, 6, 6, cfg.seed);
        row.name = "trace-dictionary";
        rows.push_back(row);
    }

    rows.push_back(order_row(
        "rank-one-propagation-order",
        propagation_defect_sweep({4, 6, 8}, cfg.horizon, cfg.seed, 10), cfg, tol));
    return rows;
}

// ----------------------------------------------------------- relaxed-verify

std::vector<ResultRow> run_relaxed_verify(const ExperimentConfig& cfg, const Tolerances& tol)
{
    std::vector<ResultRow> rows;

    // transposition identity: exact degenerate case
    {
        const ModeGrid grid(cfg.horizon, cfg.n_steps);
        AdjointData data = AdjointData::zero(grid);
        data.P_T = Mat::Identity(Eigen::Index{1} << grid.n_modes(),
                                 Eigen::Index{1} << grid.n_modes());
        const TranspositionSolution sol = solve_adjoint_bqsde(data, cfg.make_driver());
        const int t0 = 1 < grid.n_steps() ? 1 : 0;
        ProbeTuple p1 = probe_preset(grid, t0, cfg.seed + 21);
        ProbeTuple p2 = probe_preset(grid, t0, cfg.seed + 22);
        p1.u = VectorProcess::zero(grid);
        p1.v = VectorProcess::zero(grid);
        p2.u = VectorProcess::zero(grid);
        p2.v = VectorProcess::zero(grid);
        IdentityReport r =
            check_transposition_identity(sol, data, t0, p1, p2, tol.derived);
        ResultRow row = ResultRow::from_report(r, cfg.n_modes, cfg.n_steps, cfg.seed);
        row.name = "transposition-degenerate";
        rows.push_back(row);
    }

    // transposition + relaxed defect orders, adjoint condition, a priori monitor
    const int probes = std::max(10, cfg.trials / 5);
    const RelaxedSweep sweep = relaxed_identity_sweep(
        {3, 4, 5, 6}, cfg.horizon, cfg.data, probes, cfg.make_driver(), cfg.make_scheme());

    rows.push_back(order_row("transposition-order", sweep.transposition, cfg, tol));
    rows.push_back(order_row("relaxed-order", sweep.relaxed, cfg, tol));
    rows.push_back(order_row("uniqueness-probe-order", sweep.uniqueness, cfg, tol));
    rows.push_back(ResultRow::from_report(
        IdentityReport::defect("q-adjoint-condition", sweep.adjoint_defect, 1.0,
                               tol.derived),
        cfg.n_modes, cfg.n_steps, cfg.seed));

    {
        // stability of the monitored a priori constant across the refinement
        ResultRow r;
        r.name = "apriori-stability";
        r.n_modes = cfg.n_modes;
        r.n_steps = cfg.n_steps;
        r.seed = cfg.seed;
        r.abs_error = sweep.apriori_max;
        r.rel_error = sweep.apriori_max / std::max(sweep.apriori_min, 1e-300);
        r.pass = std::isfinite(r.rel_error) && r.rel_error <= 2.0;
        rows.push_back(r);
    }
    {
        ResultRow r;
        r.name = "gram-discrepancy";
        r.n_modes = cfg.n_modes;
        r.n_steps = cfg.n_steps;
        r.seed = cfg.seed;
        r.abs_error = sweep.gram_gap;
        r.rel_error = sweep.gram_gap;
        r.pass = std::isfinite(sweep.gram_gap);
        rows.push_back(r);
    }
    return rows;
}

// ----------------------------------------------------------- galerkin-sweep

std::vector<ResultRow> run_galerkin_sweep(const ExperimentConfig& cfg, const Tolerances& tol)
{
    const int n = std::min(cfg.n_modes, 3);
    const GalerkinResult g = galerkin_sweep(n, cfg.horizon, cfg.data, 10,
                                            cfg.make_driver());
    const bool monotone = g.monotone;
    const double full_rank_err = g.full_rank_error;

    std::vector<ResultRow> rows;
    ResultRow m;
    m.name = "galerkin-monotone";
    m.n_modes = n;
    m.n_steps = n;
    m.seed = cfg.seed;
    m.abs_error = full_rank_err;
    m.rel_error = full_rank_err;
    m.pass = monotone;
    rows.push_back(m);
    rows.push_back(ResultRow::from_report(
        IdentityReport::defect("galerkin-full-rank", full_rank_err, 1.0, tol.derived), n, n,
        cfg.seed));
    return rows;
}

// ------------------------------------------------------------------- report

int run_report(const std::string& dir, const Tolerances& tol)
{
    if (!fs::exists(dir) || fs::is_empty(dir)) {
        std::cout << "no runs\n";
        return 0;
    }
    std::vector<ResultRow> all;
    bool found_any = false;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.path().filename() != "results.csv")
            continue;
        if (!fs::exists(entry.path().parent_path() / "manifest.json")) {
            std::cerr << "{\"error\":\"missing manifest\",\"dir\":\""
                      << entry.path().parent_path().string() << "\"}\n";
            return 2;
        }
        found_any = true;
        for (auto& r : read_results_csv(entry.path().string()))
            all.push_back(std::move(r));
    }
    if (!found_any) {
        std::cout << "no runs\n";
        return 0;
    }
    // recompute pass flags idempotently from the stored raw numbers
    bool ok = true;
    int dups = 0;
    std::map<std::string, ResultRow> seen;
    for (auto& r : all) {
        const std::string key = r.name + "/" + std::to_string(r.n_modes) + "/" +
                                std::to_string(r.n_steps) + "/" + std::to_string(r.seed);
        if (seen.count(key))
            ++dups;
        seen[key] = r;
        const bool informational =
            r.name == "martingale-residual" || r.name == "gram-discrepancy";
        if (r.name == "apriori-stability")
            r.pass = std::isfinite(r.rel_error) && r.rel_error <= 2.0;
        else if (r.order != 0.0)
            r.pass = r.order >= 0.9 || r.abs_error <= tol.exact;
        else if (!informational && r.name != "galerkin-monotone" &&
                 r.name != "scalar-P0-benchmark")
            r.pass = r.rel_error <= tol.derived;
        ok = ok && r.pass;
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  n=" << r.n_modes
                  << " N=" << r.n_steps << " abs=" << r.abs_error << " rel=" << r.rel_error
                  << " order=" << r.order << "\n";
    }
    if (dups > 0)
        std::cout << "note: " << dups << " duplicate row(s) deduplicated\n";
    std::cout << (ok ? "all checks passed" : "FAILURES present") << "\n";
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"finite-mode fermionic QSDE laboratory"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::string config_path;
    std::string out_dir;
    std::string profile = "default";
    int64_t seed = -1;
    int jobs = 0;
    app.add_option("--config", config_path, "configuration file");
    app.add_option("--seed", seed, "override RNG seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "parallelism bound");
    app.add_option("--tolerance-profile", profile, "strict|default")
        ->check(CLI::IsMember({"strict", "default"}));

    const std::vector<std::string> names{"car-check",     "isometry",      "forward-sweep",
                                         "adjoint-solve", "duality-check", "relaxed-verify",
                                         "galerkin-sweep", "all"};
    for (const auto& n : names)
        app.add_subcommand(n, "");
    auto* report_cmd = app.add_subcommand("report", "consolidate a run directory");
    std::string report_dir;
    report_cmd->add_option("dir", report_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = parse_config_file(config_path);
        } else {
            // default experiment: bounded random intrinsic data
            cfg.data.d_name = "random";
            cfg.data.d_lambda = 0.3;
            cfg.data.f_name = "random";
            cfg.data.f_lambda = 0.3;
            cfg.data.terminal_name = "word";
            cfg.data.source_name = "word";
        }
        if (seed >= 0) {
            cfg.seed = static_cast<uint64_t>(seed);
            cfg.data.seed = cfg.seed;
        }
        if (!out_dir.empty())
            cfg.out_dir = out_dir;
        if (jobs > 0)
            cfg.jobs = jobs;
        const Tolerances tol = tolerances(cfg, profile);

        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "report")
            return run_report(report_dir, tol);

        std::vector<ResultRow> rows;
        auto append = [&rows](std::vector<ResultRow> more) {
            for (auto& r : more)
                rows.push_back(std::move(r));
        };
        if (sub == "car-check" || sub == "all")
            append(run_car_check(cfg, tol));
        if (sub == "isometry" || sub == "all")
            append(run_isometry(cfg, tol));
        if (sub == "forward-sweep" || sub == "all")
            append(run_forward_sweep(cfg, tol));
        if (sub == "adjoint-solve" || sub == "all")
            append(run_adjoint_solve(cfg, tol));
        if (sub == "duality-check" || sub == "all")
            append(run_duality_check(cfg, tol));
        if (sub == "relaxed-verify" || sub == "all")
            append(run_relaxed_verify(cfg, tol));
        if (sub == "galerkin-sweep" || sub == "all")
            append(run_galerkin_sweep(cfg, tol));

        fs::create_directories(cfg.out_dir);
        fs::create_directories(fs::path(cfg.out_dir) / "raw");
        write_manifest((fs::path(cfg.out_dir) / "manifest.json").string(), sub, cfg);
        write_results_csv((fs::path(cfg.out_dir) / "results.csv").string(), rows);

        bool ok = true;
        for (const auto& r : rows) {
            std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name
                      << "  abs=" << r.abs_error << " rel=" << r.rel_error
                      << " order=" << r.order << "\n";
            ok = ok && r.pass;
        }
        return ok ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "{\"error\":\"config\",\"detail\":\"" << e.what() << "\"}\n";
        return 2;
    } catch (const PresetError& e) {
        std::cerr << "{\"error\":\"config\",\"detail\":\"" << e.what() << "\"}\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":\"runtime\",\"detail\":\"" << e.what() << "\"}\n";
        return 1;
    }
}
