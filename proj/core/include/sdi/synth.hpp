#pragma once

// Synthetic SDI measurements with ground truth, and a Monte-Carlo harness
// that pushes them through the estimator.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sdi/constants.hpp"
#include "sdi/em.hpp"
#include "sdi/estimator.hpp"
#include "sdi/fmcw.hpp"

namespace sdi {

/// Peak-level measurement noise. Defaults reproduce the radar stability
/// figures: 0.05 % amplitude jitter, 0.8 deg phase jitter, 1.22 % amplitude
/// decrease across the sweep.
struct NoiseModel {
    double amplitude_rel_sigma = 5e-4;
    double phase_sigma = deg_to_rad(0.8);  // rad
    double amplitude_drift_rel = 1.22e-2;  // end-to-end, linear
    std::uint64_t seed = 0;

    static NoiseModel noiseless(std::uint64_t seed = 0) { return {0.0, 0.0, 0.0, seed}; }

    void validate() const;

    /// Relative amplitude change at step m of a sweep of `count` steps:
    /// 0 at m = 0 falling linearly to -amplitude_drift_rel at m = count - 1.
    double drift(std::size_t m, std::size_t count) const noexcept;
};

/// Gamma(m) = model_gamma(truth, phase_offset, m) (1 + drift + amp noise) e^{j phase noise}.
SdiDataset generate_dataset(const ComplexPermittivity& truth, double phase_offset, std::size_t m_count,
                            double step_m, double carrier_hz, const NoiseModel& noise, int direction = 1);

struct IfOptions {
    std::size_t bounces = 1;         // echoes synthesised for the MUT
    double mut_delay_offset = 0.0;   // s, MUT delay minus metal delay at m = 0
    double phase_offset = 0.0;       // rad, systematic MUT-vs-metal phase
    double aperture = 0.015;         // m, for the far-field check
};

struct IfDatasets {
    ChirpConfig chirp;
    double step = 0.0;
    IfTrace mut;                        // MUT at the standoff
    std::vector<IfTrace> metal;         // metal at standoff + m dl, m = 0..M-1
    std::vector<std::string> warnings;  // e.g. near-field standoff
};

/// Raw IF traces for the MUT (fixed) and the metal plate stepped backwards.
IfDatasets generate_if_datasets(const ComplexPermittivity& truth, const SlabGeometry& geom,
                                const ChirpConfig& cfg, std::size_t m_count, double step_m,
                                const NoiseModel& noise, const IfOptions& options = {});

/// DFT, metal peak bin and calibration ratio for every metal position. The
/// dataset's carrier is the chirp's effective carrier.
SdiDataset extract_dataset(const IfDatasets& traces, int direction = 1);

struct SweepOptions {
    std::size_t m_count = 40;
    double step = 1e-4;       // m
    double carrier = 79e9;    // Hz
    bool random_phase_offset = true;  // uniform in [-pi, pi) per trial
    FitBounds bounds;
    FitOptions fit;
    unsigned threads = 0;     // 0: hardware concurrency
};

struct TrialRecord {
    std::size_t truth_index = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double true_phase_offset = 0.0;
    bool ok = false;          // false: the fit threw; see failure
    std::string failure;
    double a = 0.0, b = 0.0, c = 0.0;
    double error_a = 0.0, error_b = 0.0, error_c = 0.0;  // fitted - truth, c wrapped
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    double wall_time_s = 0.0;
};

struct TruthSummary {
    ComplexPermittivity truth{1.0, 0.0};
    std::size_t trials = 0;
    std::size_t succeeded = 0;
    std::size_t converged = 0;
    double mean_a = 0.0, std_a = 0.0;
    double mean_b = 0.0, std_b = 0.0;
    double mean_error_a = 0.0, std_error_a = 0.0;
    double mean_error_b = 0.0, std_error_b = 0.0;
    double mean_error_c = 0.0, std_error_c = 0.0;
    double mean_abs_error_a = 0.0, mean_abs_error_b = 0.0;
    double max_abs_error = 0.0;  // over a, b, c
    double mean_residual_norm = 0.0;
    double mean_wall_time_s = 0.0;
};

struct BenchReport {
    std::vector<ComplexPermittivity> truths;
    NoiseModel noise;
    SweepOptions options;
    std::size_t trials_per_truth = 0;
    std::vector<TrialRecord> records;   // truth-major, trial-minor
    std::vector<TruthSummary> summaries;
};

/// Seeds for trial t of truth i: mix_seed(mix_seed(noise.seed, i), t).
std::uint64_t trial_seed(std::uint64_t base, std::size_t truth_index, std::size_t trial) noexcept;

/// Monte-Carlo sweep. Fit failures are recorded per trial, not rethrown.
BenchReport run_sweep(const std::vector<ComplexPermittivity>& truths, const NoiseModel& noise,
                      std::size_t trials, const SweepOptions& options = {});

/// Per-truth statistics from trial records (successful trials only).
std::vector<TruthSummary> summarize(const std::vector<ComplexPermittivity>& truths,
                                    const std::vector<TrialRecord>& records);

} // namespace sdi
