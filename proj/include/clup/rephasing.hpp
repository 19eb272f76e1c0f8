#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clup/contraction.hpp"
#include "clup/model.hpp"
#include "clup/result.hpp"

namespace clup {

// Multi-phase CLuP (CLuP^rk): chains contraction (or exact) phases, warm
// starting each phase from the previous phase's final iterate, plus the
// paper-table parameter bundle that supplies the per-phase configurations.

enum class StationaryRole { lower, trap, target };

// One row of a stationary-point table: the critical parameters of the random
// dual objective at that point. Values are shipped data, not recomputed.
struct StationaryRecord {
    double c2 = 0.0;
    double c1 = 0.0;
    double nu = 0.0;
    double gamma = 0.0;
    double gamma1 = 0.0;
    double p_err = 0.0;
    double r_norm = 0.0;
    StationaryRole role = StationaryRole::lower;
    std::string table_id;
    double snr_db = 0.0;
    double alpha = 0.0;
};

// One theory/simulated row of a phase-summary table.
struct PhaseSummaryRecord {
    double snr_db = 0.0;
    int phase = 0;
    bool simulated = false;  // false = theoretical column
    double gamma1 = 0.0;     // gamma1_hat * sqrt(n) as tabulated
    double c2 = 0.0;
    double c1 = 0.0;
    double p_err = 0.0;
    double r_norm = 0.0;
    std::string table_id;
    int n = 0;
};

struct BundledDataset {
    std::vector<StationaryRecord> stationary;
    std::vector<PhaseSummaryRecord> phase_summaries;
    // (snr_db, r_norm, p_err) rows of the radius tables, keyed by table_id.
    struct RadiusRecord {
        double snr_db = 0.0;
        double r_norm = 0.0;
        double p_err = 0.0;
        std::string table_id;
    };
    std::vector<RadiusRecord> radii;
    double alpha = 0.0;
    std::size_t row_count = 0;
    std::uint64_t checksum = 0;
    std::string path;
};

// Loads and integrity-checks the bundled dataset (FNV-1a 64 checksum over the
// canonical row serialization must match the embedded manifest). An empty
// path loads the file bundled with the build.
BundledDataset load_bundled_dataset(const std::string& path = "");

// Convenience view used by spec'd queries: every stationary-table row.
std::vector<StationaryRecord> bundled_stationary_records(
    const std::string& path = "");

enum class ScheduleVariant { standard_r0, rephased_r1, rephased_r3 };
enum class ScheduleSource { bundled, user };

struct Schedule {
    std::vector<PhaseConfig> phases;  // length k+1 for CLuP^rk
    double alpha = 0.0;
    double snr_db = 0.0;
    ScheduleSource source = ScheduleSource::user;
    std::vector<std::string> citations;  // per phase, for bundled schedules
};

// Builds a Schedule from the bundled theoretical phase rows. Supported:
// alpha = 0.6, SNR in {12, 13, 14, 15} dB; rephased_r3 only at 12 dB.
// Each phase uses the tabulated (r_norm, gamma1_hat*sqrt(n)) and c2_hat set
// to the phase's theoretical target c2.
Schedule bundled_schedule(double alpha, double snr_db, ScheduleVariant variant,
                          const std::string& dataset_path = "");

enum class PhaseEngine { exact, contraction };
enum class AbortPolicy { abort, continue_run };

struct RephasedResult {
    std::vector<ClupResult> per_phase;
    Vector final_x;
    OverlapStats final_stats;
    double p_err_observed = 0.0;  // after round_to_corner decoding
};

// Runs the schedule: phase 0 starts from x0, phase j >= 1 warm-starts from
// phase j-1's final iterate. With abort_policy = abort, a non-convergent phase
// stops the chain (per_phase is then shorter than the schedule).
RephasedResult run_rephased(const SystemInstance& instance,
                            const Schedule& schedule, const Vector& x0,
                            PhaseEngine engine = PhaseEngine::contraction,
                            AbortPolicy abort_policy = AbortPolicy::continue_run);

std::string to_string(StationaryRole role);
std::string to_string(ScheduleVariant variant);

}  // namespace clup
