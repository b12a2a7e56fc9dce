#include "sdi/em.hpp"

#include <cmath>
#include <string>

#include "sdi/errors.hpp"

namespace sdi {

double wrap_phase(double radians) noexcept
{
    double wrapped = radians - kTwoPi * std::floor((radians + kPi) / kTwoPi);
    // floor rounding can leave the value at exactly +pi
    if (wrapped >= kPi) wrapped -= kTwoPi;
    if (wrapped < -kPi) wrapped += kTwoPi;
    return wrapped;
}

ComplexPermittivity::ComplexPermittivity(double real_part, double loss)
    : real_(real_part), loss_(loss)
{
    if (!std::isfinite(real_part) || !std::isfinite(loss))
        throw InvalidInputError("permittivity components must be finite");
    if (real_part < 1.0)
        throw InvalidInputError("permittivity real part must be >= 1, got " + std::to_string(real_part));
    if (loss < 0.0)
        throw InvalidInputError("permittivity loss term must be >= 0, got " + std::to_string(loss));
}

SlabGeometry::SlabGeometry(double thickness_m, double standoff_m, Backing backing_medium)
    : thickness(thickness_m), standoff(standoff_m), backing(backing_medium)
{
    if (!(thickness_m > 0.0) || !std::isfinite(thickness_m))
        throw InvalidInputError("slab thickness must be > 0");
    if (!(standoff_m > 0.0) || !std::isfinite(standoff_m))
        throw InvalidInputError("standoff distance must be > 0");
}

Complex WaveParams::wavenumber() const
{
    if (!(frequency > 0.0)) throw InvalidInputError("frequency must be > 0");
    return (kTwoPi * frequency / kSpeedOfLight) * complex_sqrt_lossy(medium);
}

Complex complex_sqrt_lossy(const ComplexPermittivity& eps) noexcept
{
    const double a = eps.real();
    const double b = eps.loss();
    const double modulus = std::hypot(a, b);
    // (sqrt2/2) sqrt(|eps| + a), and sqrt(|eps| - a) rewritten as b / sqrt(|eps| + a) to avoid cancellation.
    const double re = std::sqrt((modulus + a) / 2.0);
    return {re, -b / (2.0 * re)};
}

InterfaceCoefficients fresnel_normal(const ComplexPermittivity& from,
                                     const ComplexPermittivity& to) noexcept
{
    const Complex n_from = complex_sqrt_lossy(from);
    const Complex n_to = complex_sqrt_lossy(to);
    const Complex sum = n_from + n_to;
    return {(n_from - n_to) / sum, 2.0 * n_from / sum};
}

Complex back_face_reflection(const ComplexPermittivity& slab, const Backing& backing) noexcept
{
    if (std::holds_alternative<MetalBacking>(backing)) return {-1.0, 0.0};
    return fresnel_normal(slab, std::get<ComplexPermittivity>(backing)).reflection;
}

namespace {

struct BounceTerms {
    Complex front;      // Gamma_1r
    Complex first;      // T_r1 Gamma_r2 T_1r e^{-j2 k_r d}
    Complex ratio;      // Gamma_r1 Gamma_r2 e^{-j2 k_r d}
};

BounceTerms bounce_terms(const ComplexPermittivity& slab, const SlabGeometry& geom,
                         double frequency_hz)
{
    const auto air = ComplexPermittivity::air();
    const auto in = fresnel_normal(air, slab);
    const auto out = fresnel_normal(slab, air);
    const Complex back = back_face_reflection(slab, geom.backing);
    const Complex k_slab = WaveParams{frequency_hz, slab}.wavenumber();
    const Complex round_trip = std::exp(Complex{0.0, -2.0} * k_slab * geom.thickness);
    return {in.reflection, out.transmission * back * in.transmission * round_trip,
            out.reflection * back * round_trip};
}

} // namespace

Complex effective_reflection(const ComplexPermittivity& slab, const SlabGeometry& geom,
                             double frequency_hz)
{
    const BounceTerms t = bounce_terms(slab, geom, frequency_hz);
    const Complex denom = 1.0 - t.ratio;
    if (std::abs(denom) < 1e-12)
        throw DegenerateGeometryError("multi-bounce series is resonant (|1 - Gamma_r1 Gamma_r2 e^{-j2k_r d}| < 1e-12)");
    return t.front + t.first / denom;
}

Complex effective_reflection_truncated(const ComplexPermittivity& slab,
                                       const SlabGeometry& geom, double frequency_hz,
                                       std::size_t bounces)
{
    if (bounces < 2) throw InvalidInputError("truncated series needs at least 2 terms");
    const BounceTerms t = bounce_terms(slab, geom, frequency_hz);
    Complex total = t.front;
    Complex term = t.first;
    for (std::size_t i = 2; i <= bounces; ++i) {
        total += term;
        term *= t.ratio;
    }
    return total;
}

Complex translate_reflection(Complex gamma_at_face, double standoff_m, double frequency_hz)
{
    if (!(standoff_m >= 0.0)) throw InvalidInputError("standoff must be >= 0");
    if (!(frequency_hz > 0.0)) throw InvalidInputError("frequency must be > 0");
    const double k_air = kTwoPi * frequency_hz / kSpeedOfLight;
    return gamma_at_face * std::polar(1.0, 2.0 * k_air * standoff_m);
}

double fraunhofer_distance(double aperture_m, double wavelength_m)
{
    if (!(aperture_m > 0.0) || !(wavelength_m > 0.0))
        throw InvalidInputError("aperture and wavelength must be > 0");
    return 2.0 * aperture_m * aperture_m / wavelength_m;
}

double wavelength(double frequency_hz)
{
    if (!(frequency_hz > 0.0)) throw InvalidInputError("frequency must be > 0");
    return kSpeedOfLight / frequency_hz;
}

} // namespace sdi
