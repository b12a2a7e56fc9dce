#include "sdi/fmcw.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "sdi/errors.hpp"

namespace sdi {

ChirpConfig ChirpConfig::wideband()
{
    ChirpConfig cfg;
    cfg.start_frequency = 77e9;
    cfg.bandwidth = 4e9;
    cfg.chirp_duration = 40e-6;
    cfg.sample_count = 256;
    cfg.sample_interval = 125e-9;
    return cfg;
}

void ChirpConfig::validate() const
{
    if (!(start_frequency > 0.0) || !std::isfinite(start_frequency))
        throw InvalidInputError("chirp start frequency must be > 0");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw InvalidInputError("chirp bandwidth must be > 0");
    if (!(chirp_duration > 0.0)) throw InvalidInputError("chirp duration must be > 0");
    if (sample_count < 2) throw InvalidInputError("chirp needs at least 2 samples");
    if (!(sample_interval > 0.0)) throw InvalidInputError("sample interval must be > 0");
    // small slack so N*dt == Tc written in decimal still passes
    if (static_cast<double>(sample_count) * sample_interval > chirp_duration * (1.0 + 1e-12))
        throw InvalidInputError("samples do not fit inside one chirp (N*dt > Tc)");
    if (!std::isfinite(amplitude) || !std::isfinite(path_loss.real()) || !std::isfinite(path_loss.imag()))
        throw InvalidInputError("amplitude and path loss must be finite");
}

IfTrace synth_if_trace(const ChirpConfig& cfg, std::span<const EchoComponent> echoes)
{
    cfg.validate();
    if (echoes.empty()) throw InvalidInputError("IF synthesis needs at least one echo");

    const std::size_t n_samples = cfg.sample_count;
    const Complex scale = 0.5 * cfg.amplitude * cfg.amplitude * cfg.path_loss;
    IfTrace trace{std::vector<Complex>(n_samples)};
    for (const auto& echo : echoes) {
        if (!(echo.delay >= 0.0)) throw InvalidInputError("echo delay must be >= 0");
        const Complex amp = scale * echo.reflection;
        const double beat = cfg.slope() * echo.delay * cfg.sample_interval;  // cycles per sample
        const double carrier_cycles = cfg.start_frequency * echo.delay;
        const double carrier_frac = carrier_cycles - std::floor(carrier_cycles);
        for (std::size_t n = 0; n < n_samples; ++n) {
            const double cycles = beat * static_cast<double>(n) + carrier_frac;
            trace.samples[n] += amp * std::polar(1.0, kTwoPi * (cycles - std::floor(cycles)));
        }
    }
    return trace;
}

std::vector<EchoComponent> synth_slab_echoes(const ComplexPermittivity& slab,
                                             const SlabGeometry& geom, const ChirpConfig& cfg,
                                             std::size_t bounces)
{
    if (bounces < 1) throw InvalidInputError("bounce count must be >= 1");
    const auto air = ComplexPermittivity::air();
    const auto in = fresnel_normal(air, slab);
    const auto out = fresnel_normal(slab, air);
    const Complex back = back_face_reflection(slab, geom.backing);
    const Complex k_slab = WaveParams{cfg.start_frequency, slab}.wavenumber();
    const Complex round_trip = std::exp(Complex{0.0, -2.0} * k_slab * geom.thickness);

    const double front_delay = 2.0 * geom.standoff / kSpeedOfLight;
    const double bounce_delay = 2.0 * geom.thickness * complex_sqrt_lossy(slab).real() / kSpeedOfLight;

    std::vector<EchoComponent> echoes;
    echoes.reserve(bounces);
    echoes.push_back({in.reflection, front_delay});
    Complex term = out.transmission * back * in.transmission * round_trip;
    const Complex ratio = out.reflection * back * round_trip;
    for (std::size_t i = 2; i <= bounces; ++i) {
        echoes.push_back({term, front_delay + static_cast<double>(i - 1) * bounce_delay});
        term *= ratio;
    }
    return echoes;
}

namespace {

// Twiddle table e^{-j2pi k/N}, k = 0..N-1, with each entry computed directly.
std::vector<Complex> twiddles(std::size_t n)
{
    std::vector<Complex> w(n);
    for (std::size_t k = 0; k < n; ++k)
        w[k] = std::polar(1.0, -kTwoPi * static_cast<double>(k) / static_cast<double>(n));
    return w;
}

void fft_radix2(std::vector<Complex>& data)
{
    const std::size_t n = data.size();
    const unsigned bits = static_cast<unsigned>(std::countr_zero(n));
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rev = 0;
        for (unsigned b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b)) rev |= std::size_t{1} << (bits - 1 - b);
        if (rev > i) std::swap(data[i], data[rev]);
    }
    const auto w = twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const Complex t = w[j * stride] * data[start + j + half];
                data[start + j + half] = data[start + j] - t;
                data[start + j] += t;
            }
        }
    }
}

std::vector<Complex> dft_direct(std::span<const Complex> x)
{
    const std::size_t n = x.size();
    const auto w = twiddles(n);
    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc{};
        for (std::size_t i = 0; i < n; ++i) acc += x[i] * w[(i * k) % n];
        out[k] = acc;
    }
    return out;
}

} // namespace

std::vector<Complex> dft(std::span<const Complex> samples)
{
    if (samples.empty()) throw InvalidInputError("DFT of an empty trace");
    if (std::has_single_bit(samples.size())) {
        std::vector<Complex> data(samples.begin(), samples.end());
        fft_radix2(data);
        return data;
    }
    return dft_direct(samples);
}

RangeSpectrum dft(const IfTrace& trace)
{
    return RangeSpectrum{dft(std::span<const Complex>(trace.samples))};
}

std::size_t peak_bin(const RangeSpectrum& spectrum)
{
    std::size_t best = 0;
    double best_power = -1.0;
    for (std::size_t k = 0; k < spectrum.bins.size(); ++k) {
        const double power = std::norm(spectrum.bins[k]);
        if (power > best_power) {
            best_power = power;
            best = k;
        }
    }
    if (!(best_power > 0.0)) throw ZeroSpectrumError("range spectrum is identically zero");
    return best;
}

Complex calibrate_ratio(Complex mut_peak, Complex metal_peak)
{
    if (!(std::abs(metal_peak) > 0.0) || !std::isfinite(std::abs(metal_peak)))
        throw ZeroCalibrationError("metal calibration peak is zero");
    return -(mut_peak / metal_peak);
}

Complex calibrate_ratio(Complex mut_peak, Complex metal_peak, double metal_reference_norm)
{
    if (!(metal_reference_norm > 0.0) || std::abs(metal_peak) < 1e-15 * metal_reference_norm)
        throw ZeroCalibrationError("metal calibration peak is negligible relative to its trace");
    return calibrate_ratio(mut_peak, metal_peak);
}

namespace {

double l2_norm(std::span<const Complex> v)
{
    return std::sqrt(std::accumulate(v.begin(), v.end(), 0.0,
                                     [](double acc, Complex z) { return acc + std::norm(z); }));
}

} // namespace

Complex extract_gamma(const IfTrace& mut, const IfTrace& metal)
{
    if (mut.samples.size() != metal.samples.size())
        throw InvalidInputError("MUT and metal traces differ in length");
    const RangeSpectrum metal_spec = dft(metal);
    const double metal_norm = l2_norm(metal_spec.bins);
    if (!(metal_norm > 0.0)) throw ZeroCalibrationError("metal calibration trace is all zeros");
    const std::size_t k_max = peak_bin(metal_spec);
    const RangeSpectrum mut_spec = dft(mut);
    return calibrate_ratio(mut_spec.bins[k_max], metal_spec.bins[k_max], metal_norm);
}

std::vector<Complex> extract_sdi_gammas(const IfTrace& mut, std::span<const IfTrace> metal)
{
    std::vector<Complex> gammas;
    gammas.reserve(metal.size());
    for (const auto& trace : metal) gammas.push_back(extract_gamma(mut, trace));
    return gammas;
}

} // namespace sdi
