#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clup/contraction.hpp"
#include "clup/model.hpp"
#include "clup/rephasing.hpp"
#include "clup/rng.hpp"

namespace clup {

// Monte Carlo BER experiment orchestration: sweeps (snr, algorithm) cells,
// each cell running `trials` independent instances with derived per-trial
// seeds, and aggregates deterministic summaries regardless of thread count.

enum class Algorithm { polytope, clup_exact, clup_r0, rephased_r1, rephased_r3 };

struct ExperimentConfig {
    double alpha = 0.6;
    int n = 0;
    std::vector<double> snr_grid_db;
    std::vector<Algorithm> algorithms;
    int trials = 1;
    std::uint64_t base_seed = 0;
    std::optional<std::vector<PhaseConfig>> schedule_overrides;
    std::string output_path;
    // When false (default), wall_time_s is reported as 0 so that reports are
    // byte-identical across runs and thread counts.
    bool record_timing = false;
    int threads = 1;
    std::string tables_path;  // empty = bundled default

    void validate() const;
};

struct PhaseOutcome {
    double c1 = 0.0;
    double c2 = 0.0;
    double p_err = 0.0;  // decoded error fraction after this phase
    int iterations = 0;
    bool converged = false;
    bool non_convergent = false;
};

struct TrialRecord {
    double snr_db = 0.0;
    Algorithm algorithm = Algorithm::clup_r0;
    int trial_index = 0;
    std::uint64_t seed = 0;
    std::vector<PhaseOutcome> phases;
    double p_err = 0.0;  // final decoded error fraction
    bool non_convergent = false;
};

struct BerSummary {
    double snr_db = 0.0;
    std::string algorithm;
    int trials = 0;
    long long bits = 0;
    long long bit_errors = 0;
    double p_err_mean = 0.0;    // bit_errors / bits exactly
    double p_err_median = 0.0;  // median of per-trial error fractions
    double c1_mean = 0.0;
    double c2_mean = 0.0;
    int non_convergent_count = 0;
    double wall_time_s = 0.0;
};

struct SweepReport {
    ExperimentConfig config;
    std::vector<BerSummary> summaries;       // grid order: snr-major, algorithm-minor
    std::vector<TrialRecord> trials_detail;  // same order, trial-minor
    std::uint64_t dataset_checksum = 0;
    std::string artifact_version;
};

// Per-trial seeds come from derive_seed(base, snr index, trial index) in
// rng.hpp; collision-free over any practical index space.
SweepReport run_ber_sweep(const ExperimentConfig& config);

// Writes the JSON report to `path` and the summary CSV next to it (same stem,
// .csv extension). CSV header:
// snr_db,algorithm,trials,bits,bit_errors,p_err_mean,p_err_median,c1_mean,c2_mean,non_convergent,wall_time_s
void write_report(const SweepReport& report, const std::string& path);

ExperimentConfig read_config(const std::string& path);

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

}  // namespace clup
