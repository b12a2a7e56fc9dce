#pragma once

// FMCW intermediate-frequency model: closed-form complex IF synthesis, the
// range DFT, peak picking and metal-plate calibration.

#include <cstddef>
#include <span>
#include <vector>

#include "sdi/constants.hpp"
#include "sdi/em.hpp"

namespace sdi {

struct ChirpConfig {
    double start_frequency = 79e9;   // Hz, f0
    double bandwidth = 1e3;          // Hz, B
    double chirp_duration = 64e-6;   // s, Tc
    std::size_t sample_count = 64;   // N
    double sample_interval = 1e-6;   // s, dt
    double amplitude = 1.0;          // A0, linear units
    Complex path_loss{1e-3, 0.0};    // L_path

    /// Narrow-sweep configuration (the CW limit). The range envelope barely
    /// moves while the metal steps, so the calibration ratio reproduces the
    /// carrier-only phase model to well below 1e-6. This is the default.
    static ChirpConfig narrowband() { return {}; }

    /// A 77-81 GHz automotive-style chirp with ~4.7 cm range resolution.
    static ChirpConfig wideband();

    /// Throws InvalidInputError if any field violates its constraint.
    void validate() const;

    double slope() const noexcept { return bandwidth / chirp_duration; }

    /// Frequency swept while samples are taken: (B/Tc) N dt.
    double sampled_bandwidth() const noexcept
    {
        return slope() * static_cast<double>(sample_count) * sample_interval;
    }

    /// Centre of the sampled sweep, f0 + (B/Tc)(N-1)dt/2. A fixed range bin
    /// sees its peak phase advance at this frequency as the delay changes.
    double effective_carrier() const noexcept
    {
        return start_frequency + slope() * static_cast<double>(sample_count - 1) * sample_interval / 2.0;
    }

    /// Fractional range bin (B/Tc) tau N dt of a target at `delay_s`.
    double beat_bin(double delay_s) const noexcept { return sampled_bandwidth() * delay_s; }
};

struct EchoComponent {
    Complex reflection;
    double delay;  // s, round-trip
};

struct IfTrace {
    std::vector<Complex> samples;
};

struct RangeSpectrum {
    std::vector<Complex> bins;
};

/// S[n] = sum over echoes of (A0^2/2) Gamma L_path e^{j2pi((B/Tc) tau n dt + f0 tau)}.
IfTrace synth_if_trace(const ChirpConfig& cfg, std::span<const EchoComponent> echoes);

/// Front-face reflection followed by `bounces - 1` internal-bounce echoes,
/// evaluated at the chirp start frequency. Bounce i >= 2 is delayed by
/// (i-1) 2 d Re(sqrt eps)/c beyond the front face.
std::vector<EchoComponent> synth_slab_echoes(const ComplexPermittivity& slab,
                                             const SlabGeometry& geom, const ChirpConfig& cfg,
                                             std::size_t bounces);

/// Unnormalised forward DFT, X[k] = sum_n x[n] e^{-j2pi nk/N}.
RangeSpectrum dft(const IfTrace& trace);
std::vector<Complex> dft(std::span<const Complex> samples);

/// Index of the largest-magnitude bin, lowest index on ties.
/// Throws ZeroSpectrumError if every bin is zero.
std::size_t peak_bin(const RangeSpectrum& spectrum);

/// Calibrated reflection -(mut / metal). The metal's own -1 is removed so the
/// result is the reflection coefficient of the material under test.
/// Throws ZeroCalibrationError when metal_peak is zero or non-finite.
Complex calibrate_ratio(Complex mut_peak, Complex metal_peak);

/// As above, but also rejects a metal peak smaller than 1e-15 of
/// `metal_reference_norm` (the norm of the trace it came from).
Complex calibrate_ratio(Complex mut_peak, Complex metal_peak, double metal_reference_norm);

/// Calibrated reflection of one MUT/metal trace pair. The peak bin is taken
/// from the metal spectrum and the MUT spectrum is read at the same bin.
Complex extract_gamma(const IfTrace& mut, const IfTrace& metal);

/// One calibrated reflection per metal position.
std::vector<Complex> extract_sdi_gammas(const IfTrace& mut, std::span<const IfTrace> metal);

} // namespace sdi
