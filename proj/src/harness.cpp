#include "clup/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "clup/baselines.hpp"
#include "clup/errors.hpp"
#include "clup/exact_solver.hpp"

namespace clup {

namespace {

using nlohmann::json;

constexpr const char* kArtifactVersion = "1.0.0";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

PhaseOutcome phase_outcome(const ClupResult& res, const SystemInstance& inst) {
    PhaseOutcome out;
    const OverlapStats st = overlap_stats(res.x_final, inst.x_sol);
    out.c1 = st.c1;
    out.c2 = st.c2;
    out.p_err = bit_error_fraction(
        round_to_corner(res.x_final, inst.dims.n), inst.x_sol);
    out.iterations = res.iterations;
    out.converged = res.converged;
    out.non_convergent = res.non_convergent;
    return out;
}

Schedule schedule_for(const ExperimentConfig& cfg, double snr_db, Algorithm alg) {
    if (cfg.schedule_overrides.has_value()) {
        Schedule s;
        s.alpha = cfg.alpha;
        s.snr_db = snr_db;
        s.source = ScheduleSource::user;
        s.phases = *cfg.schedule_overrides;
        return s;
    }
    ScheduleVariant variant = ScheduleVariant::standard_r0;
    if (alg == Algorithm::rephased_r1) variant = ScheduleVariant::rephased_r1;
    if (alg == Algorithm::rephased_r3) variant = ScheduleVariant::rephased_r3;
    return bundled_schedule(cfg.alpha, snr_db, variant, cfg.tables_path);
}

TrialRecord run_trial(const ExperimentConfig& cfg, double snr_db, Algorithm alg,
                      const Schedule* schedule, int trial_index,
                      std::uint64_t seed) {
    TrialRecord rec;
    rec.snr_db = snr_db;
    rec.algorithm = alg;
    rec.trial_index = trial_index;
    rec.seed = seed;

    const SystemInstance inst = generate_instance(
        SystemDims::from_alpha(cfg.n, cfg.alpha), snr_db_to_sigma(snr_db), seed);

    if (alg == Algorithm::polytope) {
        const RelaxationResult rr = polytope_relax(inst);
        PhaseOutcome out;
        const OverlapStats st = overlap_stats(rr.x_relaxed, inst.x_sol);
        out.c1 = st.c1;
        out.c2 = st.c2;
        out.p_err = bit_error_fraction(
            round_to_corner(rr.x_relaxed, inst.dims.n), inst.x_sol);
        out.iterations = rr.iterations;
        out.converged = rr.converged;
        out.non_convergent = !rr.converged;
        rec.phases.push_back(out);
        rec.p_err = out.p_err;
        rec.non_convergent = out.non_convergent;
        return rec;
    }

    if (alg == Algorithm::clup_exact) {
        const PhaseConfig& ph = schedule->phases.front();
        const double r = ph.r_norm * std::sqrt(static_cast<double>(cfg.n));
        const Vector x0 = random_corner_init(cfg.n, derive_seed(seed, 1, 0));
        const ClupResult res = clup_run(inst, r, x0, ph.i_max, ph.step_tol);
        rec.phases.push_back(phase_outcome(res, inst));
        rec.p_err = rec.phases.back().p_err;
        rec.non_convergent = res.non_convergent;
        return rec;
    }

    // Contraction-based algorithms start from the center of the box.
    const RephasedResult rr = run_rephased(inst, *schedule, Vector::Zero(cfg.n),
                                           PhaseEngine::contraction,
                                           AbortPolicy::continue_run);
    for (const ClupResult& res : rr.per_phase) {
        rec.phases.push_back(phase_outcome(res, inst));
        rec.non_convergent = rec.non_convergent || res.non_convergent;
    }
    rec.p_err = rr.p_err_observed;
    return rec;
}

BerSummary summarize(const ExperimentConfig& cfg, double snr_db, Algorithm alg,
                     const std::vector<TrialRecord>& trials, double wall_time_s) {
    BerSummary s;
    s.snr_db = snr_db;
    s.algorithm = to_string(alg);
    s.trials = static_cast<int>(trials.size());
    s.bits = static_cast<long long>(trials.size()) * cfg.n;
    std::vector<double> perrs;
    perrs.reserve(trials.size());
    for (const TrialRecord& t : trials) {
        s.bit_errors += std::llround(t.p_err * cfg.n);
        s.c1_mean += t.phases.back().c1;
        s.c2_mean += t.phases.back().c2;
        s.non_convergent_count += t.non_convergent ? 1 : 0;
        perrs.push_back(t.p_err);
    }
    s.p_err_mean = static_cast<double>(s.bit_errors) / static_cast<double>(s.bits);
    s.c1_mean /= static_cast<double>(trials.size());
    s.c2_mean /= static_cast<double>(trials.size());
    std::sort(perrs.begin(), perrs.end());
    const std::size_t k = perrs.size();
    s.p_err_median = (k % 2 == 1) ? perrs[k / 2]
                                  : 0.5 * (perrs[k / 2 - 1] + perrs[k / 2]);
    s.wall_time_s = cfg.record_timing ? wall_time_s : 0.0;
    return s;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n < 1) throw ConfigError("ExperimentConfig: n must be >= 1");
    if (trials < 1) throw ConfigError("ExperimentConfig: trials must be >= 1");
    if (snr_grid_db.empty())
        throw ConfigError("ExperimentConfig: snr_grid_db must be nonempty");
    if (algorithms.empty())
        throw ConfigError("ExperimentConfig: algorithms must be nonempty");
    if (threads < 1) throw ConfigError("ExperimentConfig: threads must be >= 1");
    if (!(alpha > 0.0)) throw ConfigError("ExperimentConfig: alpha must be > 0");
    if (schedule_overrides.has_value()) {
        if (schedule_overrides->empty())
            throw ConfigError("ExperimentConfig: schedule_overrides is empty");
        for (const PhaseConfig& p : *schedule_overrides) p.validate();
    }
}

SweepReport run_ber_sweep(const ExperimentConfig& config) {
    config.validate();

    // Resolve every schedule up front so configuration errors surface before
    // any trial runs.
    struct Cell {
        double snr_db;
        std::size_t snr_index;
        Algorithm alg;
        Schedule schedule;  // unused by polytope
    };
    std::vector<Cell> cells;
    for (std::size_t si = 0; si < config.snr_grid_db.size(); ++si) {
        for (Algorithm alg : config.algorithms) {
            Cell c{config.snr_grid_db[si], si, alg, Schedule{}};
            if (alg != Algorithm::polytope) {
                c.schedule = schedule_for(config, c.snr_db, alg);
            }
            cells.push_back(std::move(c));
        }
    }

    SweepReport report;
    report.config = config;
    report.artifact_version = kArtifactVersion;
    if (!config.schedule_overrides.has_value()) {
        bool needs_dataset = false;
        for (Algorithm a : config.algorithms) {
            if (a != Algorithm::polytope) needs_dataset = true;
        }
        if (needs_dataset) {
            report.dataset_checksum = load_bundled_dataset(config.tables_path).checksum;
        }
    }

    for (const Cell& cell : cells) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<TrialRecord> trials(config.trials);
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                const int ti = next.fetch_add(1);
                if (ti >= config.trials) break;
                const std::uint64_t seed =
                    derive_seed(config.base_seed, cell.snr_index,
                                static_cast<std::uint64_t>(ti));
                trials[ti] = run_trial(config, cell.snr_db, cell.alg,
                                       &cell.schedule, ti, seed);
            }
        };
        const int nthreads = std::min(config.threads, config.trials);
        if (nthreads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(nthreads);
            for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
            for (std::thread& t : pool) t.join();
        }
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        report.summaries.push_back(
            summarize(config, cell.snr_db, cell.alg, trials, wall));
        for (TrialRecord& t : trials) report.trials_detail.push_back(std::move(t));
    }
    return report;
}

namespace {

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["alpha"] = c.alpha;
    j["n"] = c.n;
    j["snr_grid_db"] = c.snr_grid_db;
    json algs = json::array();
    for (Algorithm a : c.algorithms) algs.push_back(to_string(a));
    j["algorithms"] = algs;
    j["trials"] = c.trials;
    j["base_seed"] = c.base_seed;
    j["output_path"] = c.output_path;
    j["record_timing"] = c.record_timing;
    // threads is an execution detail, not part of the experiment identity;
    // echoing it would break byte-identity of reports across thread counts.
    if (!c.tables_path.empty()) j["tables_path"] = c.tables_path;
    if (c.schedule_overrides.has_value()) {
        json phases = json::array();
        for (const PhaseConfig& p : *c.schedule_overrides) {
            json jp;
            jp["r_norm"] = p.r_norm;
            jp["gamma1_scaled"] = p.gamma1_scaled;
            jp["c2_hat"] = p.c2_hat;
            jp["c_q2"] = p.c_q2;
            jp["safety"] = p.safety;
            jp["i_max"] = p.i_max;
            jp["step_tol"] = p.step_tol;
            jp["label"] = p.label;
            phases.push_back(std::move(jp));
        }
        j["schedule_overrides"] = phases;
    }
    return j;
}

}  // namespace

void write_report(const SweepReport& report, const std::string& path) {
    json j;
    j["artifact_version"] = report.artifact_version;
    j["config"] = config_to_json(report.config);
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(report.dataset_checksum));
        j["dataset_checksum_fnv1a64"] = buf;
    }
    json summaries = json::array();
    for (const BerSummary& s : report.summaries) {
        json js;
        js["snr_db"] = s.snr_db;
        js["algorithm"] = s.algorithm;
        js["trials"] = s.trials;
        js["bits"] = s.bits;
        js["bit_errors"] = s.bit_errors;
        js["p_err_mean"] = s.p_err_mean;
        js["p_err_median"] = s.p_err_median;
        js["c1_mean"] = s.c1_mean;
        js["c2_mean"] = s.c2_mean;
        js["non_convergent"] = s.non_convergent_count;
        js["wall_time_s"] = s.wall_time_s;
        summaries.push_back(std::move(js));
    }
    j["summaries"] = std::move(summaries);
    json trials = json::array();
    for (const TrialRecord& t : report.trials_detail) {
        json jt;
        jt["snr_db"] = t.snr_db;
        jt["algorithm"] = to_string(t.algorithm);
        jt["trial_index"] = t.trial_index;
        jt["seed"] = t.seed;
        jt["p_err"] = t.p_err;
        jt["non_convergent"] = t.non_convergent;
        json phases = json::array();
        for (const PhaseOutcome& p : t.phases) {
            json jp;
            jp["c1"] = p.c1;
            jp["c2"] = p.c2;
            jp["p_err"] = p.p_err;
            jp["iterations"] = p.iterations;
            jp["converged"] = p.converged;
            jp["non_convergent"] = p.non_convergent;
            phases.push_back(std::move(jp));
        }
        jt["phases"] = std::move(phases);
        trials.push_back(std::move(jt));
    }
    j["trials"] = std::move(trials);

    std::ofstream out(path);
    if (!out) throw DataError("cannot write report file: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed for report file: " + path);

    std::string csv_path = path;
    const std::size_t dot = csv_path.find_last_of('.');
    const std::size_t slash = csv_path.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
        csv_path.resize(dot);
    }
    csv_path += ".csv";
    std::ofstream csv(csv_path);
    if (!csv) throw DataError("cannot write summary CSV: " + csv_path);
    csv << "snr_db,algorithm,trials,bits,bit_errors,p_err_mean,p_err_median,"
           "c1_mean,c2_mean,non_convergent,wall_time_s\n";
    for (const BerSummary& s : report.summaries) {
        csv << fmt_double(s.snr_db) << ',' << s.algorithm << ',' << s.trials
            << ',' << s.bits << ',' << s.bit_errors << ','
            << fmt_double(s.p_err_mean) << ',' << fmt_double(s.p_err_median)
            << ',' << fmt_double(s.c1_mean) << ',' << fmt_double(s.c2_mean)
            << ',' << s.non_convergent_count << ',' << fmt_double(s.wall_time_s)
            << '\n';
    }
    if (!csv) throw DataError("write failed for summary CSV: " + csv_path);
}

ExperimentConfig read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("malformed JSON in " + path + ": " + e.what());
    }
    ExperimentConfig c;
    auto require = [&](const char* field) -> const json& {
        if (!j.contains(field)) {
            throw DataError("config " + path + ": missing required field '" +
                            field + "'");
        }
        return j.at(field);
    };
    try {
        c.alpha = require("alpha").get<double>();
        c.n = require("n").get<int>();
        c.snr_grid_db = require("snr_grid_db").get<std::vector<double>>();
        for (const auto& a : require("algorithms")) {
            c.algorithms.push_back(algorithm_from_string(a.get<std::string>()));
        }
        c.trials = require("trials").get<int>();
        c.base_seed = require("base_seed").get<std::uint64_t>();
        if (j.contains("output_path")) c.output_path = j["output_path"].get<std::string>();
        if (j.contains("record_timing")) c.record_timing = j["record_timing"].get<bool>();
        if (j.contains("threads")) c.threads = j["threads"].get<int>();
        if (j.contains("tables_path")) c.tables_path = j["tables_path"].get<std::string>();
        if (j.contains("schedule_overrides")) {
            std::vector<PhaseConfig> phases;
            for (const auto& jp : j["schedule_overrides"]) {
                PhaseConfig p;
                p.r_norm = jp.at("r_norm").get<double>();
                p.gamma1_scaled = jp.at("gamma1_scaled").get<double>();
                if (jp.contains("c2_hat")) p.c2_hat = jp["c2_hat"].get<double>();
                if (jp.contains("c_q2")) p.c_q2 = jp["c_q2"].get<double>();
                if (jp.contains("safety")) p.safety = jp["safety"].get<double>();
                if (jp.contains("i_max")) p.i_max = jp["i_max"].get<int>();
                if (jp.contains("step_tol")) p.step_tol = jp["step_tol"].get<double>();
                if (jp.contains("label")) p.label = jp["label"].get<std::string>();
                phases.push_back(std::move(p));
            }
            c.schedule_overrides = std::move(phases);
        }
    } catch (const json::exception& e) {
        throw DataError("config " + path + ": schema error: " + e.what());
    }
    c.validate();
    return c;
}

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::polytope: return "polytope";
        case Algorithm::clup_exact: return "clup_exact";
        case Algorithm::clup_r0: return "clup_r0";
        case Algorithm::rephased_r1: return "rephased_r1";
        case Algorithm::rephased_r3: return "rephased_r3";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "polytope") return Algorithm::polytope;
    if (s == "clup_exact") return Algorithm::clup_exact;
    if (s == "clup_r0") return Algorithm::clup_r0;
    if (s == "rephased_r1") return Algorithm::rephased_r1;
    if (s == "rephased_r3") return Algorithm::rephased_r3;
    throw ConfigError("unknown algorithm: '" + s +
                      "' (expected polytope, clup_exact, clup_r0, rephased_r1, "
                      "or rephased_r3)");
}

}  // namespace clup
