#pragma once

// Normal-incidence plane-wave reflection from a dielectric slab.
//
// Time convention e^{+jwt}: a wave travelling toward +x is e^{-jkx}, and a
// passive medium has a relative permittivity eps' - j eps'' with eps'' >= 0.
// All quantities are SI (Hz, m). Permeability is 1 everywhere.

#include <cstddef>
#include <variant>

#include "sdi/constants.hpp"

namespace sdi {

/// Relative permittivity eps' - j eps'' of a passive dielectric.
///
/// `loss` is stored as the non-negative magnitude eps''; `value()` returns
/// the signed complex number eps' - j eps''.
class ComplexPermittivity {
public:
    /// Throws InvalidInputError unless real_part >= 1 and loss >= 0.
    ComplexPermittivity(double real_part, double loss);

    static ComplexPermittivity air() { return {1.0, 0.0}; }

    double real() const noexcept { return real_; }
    double loss() const noexcept { return loss_; }
    Complex value() const noexcept { return {real_, -loss_}; }

    friend bool operator==(const ComplexPermittivity&, const ComplexPermittivity&) = default;

private:
    double real_;
    double loss_;
};

/// Perfect electric conductor behind the slab; forces Gamma_r2 = -1 exactly.
struct MetalBacking {
    friend bool operator==(const MetalBacking&, const MetalBacking&) = default;
};

using Backing = std::variant<MetalBacking, ComplexPermittivity>;

struct SlabGeometry {
    double thickness;  // m, slab thickness d
    double standoff;   // m, radar to front face l
    Backing backing;   // medium behind the slab

    /// Throws InvalidInputError unless thickness > 0 and standoff > 0.
    SlabGeometry(double thickness_m, double standoff_m, Backing backing_medium);
};

struct WaveParams {
    double frequency;                                  // Hz
    ComplexPermittivity medium = ComplexPermittivity::air();

    /// k = (2 pi f / c) sqrt(eps); Im(k) <= 0 for a passive medium.
    Complex wavenumber() const;
};

struct InterfaceCoefficients {
    Complex reflection;
    Complex transmission;
};

/// sqrt(a - jb) on the decaying branch:
/// (sqrt2/2)(sqrt(|eps| + a) - j sqrt(|eps| - a)). Imaginary part <= 0.
Complex complex_sqrt_lossy(const ComplexPermittivity& eps) noexcept;

/// Fresnel coefficients for a wave going from `from` into `to`.
InterfaceCoefficients fresnel_normal(const ComplexPermittivity& from,
                                     const ComplexPermittivity& to) noexcept;

/// Reflection at the slab's back face, seen from inside the slab.
Complex back_face_reflection(const ComplexPermittivity& slab, const Backing& backing) noexcept;

/// Total reflection at the front face including every internal bounce
/// (closed form of the geometric series). Throws DegenerateGeometryError
/// when the series denominator is within 1e-12 of zero.
Complex effective_reflection(const ComplexPermittivity& slab, const SlabGeometry& geom,
                             double frequency_hz);

/// Front-face reflection plus the first `bounces - 1` transmitted bounce
/// terms, summed explicitly. Requires bounces >= 2.
Complex effective_reflection_truncated(const ComplexPermittivity& slab,
                                       const SlabGeometry& geom, double frequency_hz,
                                       std::size_t bounces);

/// Move the reference plane from the front face back to a transceiver
/// `standoff_m` away through air: multiplies by e^{j 2 k1 l}.
Complex translate_reflection(Complex gamma_at_face, double standoff_m, double frequency_hz);

/// Far-field boundary 2 D^2 / lambda.
double fraunhofer_distance(double aperture_m, double wavelength_m);

double wavelength(double frequency_hz);

} // namespace sdi
