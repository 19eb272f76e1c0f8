#include "clup/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clup/baselines.hpp"
#include "clup/contraction.hpp"
#include "clup/errors.hpp"
#include "clup/exact_solver.hpp"
#include "clup/harness.hpp"
#include "clup/model.hpp"
#include "clup/rdt_theory.hpp"
#include "clup/rephasing.hpp"
#include "clup/rng.hpp"

namespace clup {

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string output;
    std::string format = "csv";
    std::string tables_path;
};

// Writes to --output when given, stdout otherwise.
void emit(const GlobalOpts& g, const std::string& text) {
    if (g.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(g.output);
    if (!out) throw DataError("cannot write output file: " + g.output);
    out << text;
    if (!out) throw DataError("write failed for output file: " + g.output);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int cmd_theory_curve(const GlobalOpts& g, double alpha, double lo, double hi,
                     double step, const std::string& branch) {
    std::vector<double> grid;
    for (double s = lo; s <= hi + 1e-12; s += step) grid.push_back(s);
    const CurveBranch mode = (branch == "global") ? CurveBranch::global
                                                  : CurveBranch::local_high_branch;
    const auto curve = ml_curve(alpha, grid, mode);
    std::ostringstream os;
    if (g.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : curve) {
            arr.push_back({{"snr_db", p.snr_db},
                           {"c1", p.c1},
                           {"xi", p.xi},
                           {"branch", to_string(p.branch)}});
        }
        os << arr.dump(2) << '\n';
    } else {
        os << "snr_db,c1,xi,branch\n";
        for (const auto& p : curve) {
            os << fmt(p.snr_db) << ',' << fmt(p.c1) << ',' << fmt(p.xi) << ','
               << to_string(p.branch) << '\n';
        }
    }
    emit(g, os.str());
    return 0;
}

int cmd_glitch(const GlobalOpts& g, double alpha, double lo, double hi,
               double tol) {
    const double snr = find_glitch_snr(alpha, lo, hi, tol);
    emit(g, "glitch_snr_db = " + fmt(snr) + "\n");
    return 0;
}

int cmd_stationary(const GlobalOpts& g, double alpha, double snr_db) {
    const double sigma = snr_db_to_sigma(snr_db);
    const auto pts = find_stationary_points(alpha, sigma);
    std::ostringstream os;
    if (g.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : pts) {
            arr.push_back({{"c1", p.c1},
                           {"xi", p.xi},
                           {"d1", p.d1},
                           {"d2", p.d2},
                           {"kind", to_string(p.kind)}});
        }
        os << arr.dump(2) << '\n';
    } else {
        os << "c1,xi,d1,d2,kind\n";
        for (const auto& p : pts) {
            os << fmt(p.c1) << ',' << fmt(p.xi) << ',' << fmt(p.d1) << ','
               << fmt(p.d2) << ',' << to_string(p.kind) << '\n';
        }
    }
    emit(g, os.str());
    return 0;
}

int cmd_run(const GlobalOpts& g, const std::string& algorithm, double alpha,
            int n, double snr_db) {
    const Algorithm alg = algorithm_from_string(algorithm);
    const SystemInstance inst = generate_instance(
        SystemDims::from_alpha(n, alpha), snr_db_to_sigma(snr_db), g.seed);
    std::ostringstream os;
    os << "instance: n=" << n << " m=" << inst.dims.m << " snr_db=" << fmt(snr_db)
       << " seed=" << g.seed << "\n";

    auto print_trajectory = [&](const ClupResult& res, const std::string& tag) {
        os << tag << ": iterations=" << res.iterations
           << " converged=" << (res.converged ? "yes" : "no")
           << " non_convergent=" << (res.non_convergent ? "yes" : "no") << "\n";
        os << "iter,c1,c2\n";
        for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
            os << (i + 1) << ',' << fmt(res.trajectory[i].c1) << ','
               << fmt(res.trajectory[i].c2) << '\n';
        }
    };

    if (alg == Algorithm::polytope) {
        const RelaxationResult rr = polytope_relax(inst);
        os << "polytope: iterations=" << rr.iterations
           << " residual=" << fmt(rr.residual)
           << " r_plt_norm=" << fmt(rr.r_plt_norm) << " p_err="
           << fmt(bit_error_fraction(round_to_corner(rr.x_relaxed, n), inst.x_sol))
           << "\n";
    } else if (alg == Algorithm::clup_exact) {
        const Schedule sched = bundled_schedule(
            alpha, snr_db, ScheduleVariant::standard_r0, g.tables_path);
        const PhaseConfig& ph = sched.phases.front();
        const double r = ph.r_norm * std::sqrt(static_cast<double>(n));
        const ClupResult res = clup_run(
            inst, r, random_corner_init(n, derive_seed(g.seed, 1, 0)), ph.i_max,
            ph.step_tol);
        print_trajectory(res, "clup_exact");
        os << "p_err=" << fmt(bit_error_fraction(
                              round_to_corner(res.x_final, n), inst.x_sol))
           << "\n";
    } else {
        ScheduleVariant variant = ScheduleVariant::standard_r0;
        if (alg == Algorithm::rephased_r1) variant = ScheduleVariant::rephased_r1;
        if (alg == Algorithm::rephased_r3) variant = ScheduleVariant::rephased_r3;
        const Schedule sched = bundled_schedule(alpha, snr_db, variant, g.tables_path);
        const RephasedResult rr =
            run_rephased(inst, sched, Vector::Zero(n));
        for (std::size_t p = 0; p < rr.per_phase.size(); ++p) {
            print_trajectory(rr.per_phase[p], "phase " + std::to_string(p));
        }
        os << "final: c1=" << fmt(rr.final_stats.c1)
           << " c2=" << fmt(rr.final_stats.c2)
           << " p_err=" << fmt(rr.p_err_observed) << "\n";
    }
    emit(g, os.str());
    return 0;
}

int cmd_sweep(const GlobalOpts& g, const std::string& config_path) {
    ExperimentConfig cfg = read_config(config_path);
    if (g.threads > 1) cfg.threads = g.threads;
    if (!g.tables_path.empty()) cfg.tables_path = g.tables_path;
    if (!g.output.empty()) cfg.output_path = g.output;
    if (cfg.output_path.empty()) cfg.output_path = "sweep_report.json";
    const SweepReport report = run_ber_sweep(cfg);
    write_report(report, cfg.output_path);
    std::cout << "report written to " << cfg.output_path << "\n";
    return 0;
}

int cmd_tables(const GlobalOpts& g, const std::string& table_id) {
    const BundledDataset ds = load_bundled_dataset(g.tables_path);
    std::ostringstream os;
    if (g.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : ds.stationary) {
            if (!table_id.empty() && r.table_id != table_id) continue;
            arr.push_back({{"table_id", r.table_id}, {"role", to_string(r.role)},
                           {"snr_db", r.snr_db},    {"c2", r.c2},
                           {"c1", r.c1},            {"nu", r.nu},
                           {"gamma", r.gamma},      {"gamma1", r.gamma1},
                           {"p_err", r.p_err},      {"r_norm", r.r_norm}});
        }
        for (const auto& r : ds.phase_summaries) {
            if (!table_id.empty() && r.table_id != table_id) continue;
            arr.push_back({{"table_id", r.table_id}, {"snr_db", r.snr_db},
                           {"phase", r.phase},
                           {"source", r.simulated ? "simulated" : "theory"},
                           {"gamma1", r.gamma1},    {"c2", r.c2},
                           {"c1", r.c1},            {"p_err", r.p_err},
                           {"r_norm", r.r_norm},    {"n", r.n}});
        }
        for (const auto& r : ds.radii) {
            if (!table_id.empty() && r.table_id != table_id) continue;
            arr.push_back({{"table_id", r.table_id}, {"snr_db", r.snr_db},
                           {"r_norm", r.r_norm},     {"p_err", r.p_err}});
        }
        os << arr.dump(2) << '\n';
    } else {
        bool any = false;
        os << "table_id,kind,snr_db,role_or_phase,c2,c1,nu,gamma,gamma1,p_err,r_norm\n";
        for (const auto& r : ds.stationary) {
            if (!table_id.empty() && r.table_id != table_id) continue;
            any = true;
            os << r.table_id << ",stationary," << fmt(r.snr_db) << ','
               << to_string(r.role) << ',' << fmt(r.c2) << ',' << fmt(r.c1) << ','
               << fmt(r.nu) << ',' << fmt(r.gamma) << ',' << fmt(r.gamma1) << ','
               << fmt(r.p_err) << ',' << fmt(r.r_norm) << '\n';
        }
        for (const auto& r : ds.phase_summaries) {
            if (!table_id.empty() && r.table_id != table_id) continue;
            any = true;
            os << r.table_id << ",phase_summary," << fmt(r.snr_db) << ",phase"
               << r.phase << (r.simulated ? "/sim" : "/theory") << ','
               << fmt(r.c2) << ',' << fmt(r.c1) << ",,," << fmt(r.gamma1) << ','
               << fmt(r.p_err) << ',' << fmt(r.r_norm) << '\n';
        }
        for (const auto& r : ds.radii) {
            if (!table_id.empty() && r.table_id != table_id) continue;
            any = true;
            os << r.table_id << ",radius_summary," << fmt(r.snr_db)
               << ",,,,,,," << fmt(r.p_err) << ',' << fmt(r.r_norm) << '\n';
        }
        if (!any && !table_id.empty()) {
            throw ConfigError("tables: no rows for table id '" + table_id + "'");
        }
    }
    emit(g, os.str());
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"CLuP toolkit: controlled loosening-up detection for binary MIMO ML"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "Base seed for instance generation");
    app.add_option("--threads", g.threads, "Worker threads for sweeps");
    app.add_option("--output", g.output, "Write output to this file instead of stdout");
    app.add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--tables-path", g.tables_path,
                   "Override the bundled parameter-tables file");

    double alpha = 0.6, lo = 12.0, hi = 16.0, tol = 0.01, step = 0.25, snr = 13.0;
    std::string branch = "global", algorithm = "clup_r0", config_path, table_id;
    int n = 1000;

    auto* curve = app.add_subcommand("theory-curve", "ML theory curve c1/xi vs SNR");
    curve->add_option("--alpha", alpha, "Aspect ratio m/n");
    curve->add_option("--lo", lo, "Lowest SNR [dB]");
    curve->add_option("--hi", hi, "Highest SNR [dB]");
    curve->add_option("--step", step, "SNR grid step [dB]");
    curve->add_option("--branch", branch, "Minimizer branch")
        ->check(CLI::IsMember({"global", "local_high_branch"}));

    auto* glitch = app.add_subcommand("glitch", "Locate the glitch SNR");
    glitch->add_option("--alpha", alpha, "Aspect ratio m/n");
    glitch->add_option("--lo", lo, "Bracket low end [dB]");
    glitch->add_option("--hi", hi, "Bracket high end [dB]");
    glitch->add_option("--tol", tol, "Bisection tolerance [dB]");

    auto* stat = app.add_subcommand("stationary", "Stationary points of xi_ml");
    stat->add_option("--alpha", alpha, "Aspect ratio m/n");
    stat->add_option("--snr", snr, "SNR [dB]");

    auto* run = app.add_subcommand("run", "Single instance, prints trajectory");
    run->add_option("--algorithm", algorithm, "Algorithm")
        ->check(CLI::IsMember({"polytope", "clup_exact", "clup_r0",
                               "rephased_r1", "rephased_r3"}));
    run->add_option("--alpha", alpha, "Aspect ratio m/n");
    run->add_option("--n", n, "Problem size");
    run->add_option("--snr", snr, "SNR [dB]");

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep from a config file");
    sweep->add_option("config", config_path, "ExperimentConfig JSON file")->required();

    auto* tables = app.add_subcommand("tables", "Dump/query the bundled dataset");
    tables->add_option("--table", table_id, "Restrict to one table id");

    // Let global flags (--seed, --output, ...) appear after the subcommand.
    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (curve->parsed()) return cmd_theory_curve(g, alpha, lo, hi, step, branch);
        if (glitch->parsed()) return cmd_glitch(g, alpha, lo, hi, tol);
        if (stat->parsed()) return cmd_stationary(g, alpha, snr);
        if (run->parsed()) return cmd_run(g, algorithm, alpha, n, snr);
        if (sweep->parsed()) return cmd_sweep(g, config_path);
        if (tables->parsed()) return cmd_tables(g, table_id);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace clup
