#pragma once

// Permittivity estimation from a small-distance-increment sweep.
//
// Measurement model for step m:
//   Gamma(m) = (1 - sqrt(a - jb)) / (1 + sqrt(a - jb)) * e^{j(c - C1 m)}
// with C1 = 2 pi f0 2 dl / c the round-trip phase advance per step. The fit
// runs on the real-valued form g2/g1 + j g3/g1 with a in [1, a_max],
// b in [0, b_max] and c free.

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sdi/bounded_lsq.hpp"
#include "sdi/constants.hpp"
#include "sdi/em.hpp"

namespace sdi {

struct SdiDataset {
    std::vector<Complex> gammas;  // calibrated reflection per step, m = 0..M-1
    double step = 1e-4;           // m, dl
    double carrier = 79e9;        // Hz, f0 in the per-step phase factor
    int direction = 1;            // +1: phase follows e^{-j C1 m}; -1: e^{+j C1 m}

    std::size_t step_count() const noexcept { return gammas.size(); }

    /// Signed per-step phase advance: direction * 2 pi f0 (2 dl / c).
    double phase_step() const noexcept;

    /// Throws InvalidInputError (M < 3, bad step/carrier/direction) or
    /// AliasingError (|C1| >= pi).
    void validate() const;
};

struct FitBounds {
    double a_max = 100.0;
    double b_max = 50.0;

    void validate() const;
};

struct FitParams {
    double a = 1.0;  // eps'
    double b = 0.0;  // eps''
    double c = 0.0;  // rad, phase offset
};

struct FitOptions {
    int max_iterations = 500;  // per start
    double gradient_tol = 1e-10;
    double step_tol = 1e-12;
};

struct FitResult {
    ComplexPermittivity permittivity{1.0, 0.0};
    double phase_offset = 0.0;   // rad, wrapped to [-pi, pi)
    double residual_norm = 0.0;  // ||r||_2
    int iterations = 0;          // for the winning start
    bool converged = false;
    std::size_t start_index = 0;
    LsqStatus status = LsqStatus::IterationLimit;
    Eigen::Matrix3d covariance_proxy = Eigen::Matrix3d::Constant(std::numeric_limits<double>::quiet_NaN());
};

/// (g2 + j g3) / g1 for step m.
Complex model_gamma(double a, double b, double c, double m, double phase_step);

/// Interleaved [Re, Im] residuals measured - model, length 2M.
Eigen::VectorXd residuals(const FitParams& params, const SdiDataset& data);

/// d residuals / d(a, b, c), 2M x 3.
Eigen::MatrixXd jacobian(const FitParams& params, const SdiDataset& data);

/// Default multi-start grid: a in {1.5, 3, 6, 12} x b in {0.01, 0.5}, with c
/// seeded so the model's phase at m = 0 matches the first measurement.
std::vector<FitParams> auto_starts(const SdiDataset& data);

/// Bound-constrained fit from each start; returns the lowest-residual result.
/// Starts default to auto_starts(data).
///
/// Throws DegenerateDataError if every |Gamma| < 1e-12, NoConvergenceError if
/// no start converges within the iteration cap, plus SdiDataset::validate errors.
FitResult fit_permittivity(const SdiDataset& data, const FitBounds& bounds = {},
                           const std::optional<std::vector<FitParams>>& starts = std::nullopt,
                           const FitOptions& options = {});

/// Reflection seen at the transceiver in an ideal plane-wave geometry:
/// e^{j2k1(l + m dl)} times the slab's effective front-face reflection.
Complex ideal_gamma_at_radar(const ComplexPermittivity& slab, const SlabGeometry& geom,
                             double step_m, std::size_t m, double frequency_hz);

/// Fit eps over (a, b) with known absolute standoff and slab geometry, no
/// phase offset. `geom.standoff` is l for m = 0. Only meaningful when l and d
/// are known to a small fraction of a wavelength.
FitResult fit_ideal(const std::vector<Complex>& gammas_at_radar, const SlabGeometry& geom,
                    double step_m, double frequency_hz, const FitBounds& bounds = {},
                    const FitOptions& options = {});

struct PhaseSlope {
    double slope_deg_per_mm = 0.0;
    double intercept_deg = 0.0;
    double r_squared = 0.0;  // NaN when degenerate
    bool degenerate = false;  // phase identical at every step
};

/// Unwrapped phase of Gamma(m) regressed against displacement m dl.
PhaseSlope phase_slope_diagnostic(const SdiDataset& data);

/// Unwrap a phase sequence in radians (successive differences to (-pi, pi]).
std::vector<double> unwrap_phase(const std::vector<double>& phases);

} // namespace sdi
