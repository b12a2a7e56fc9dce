#include "sdi/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sdi/errors.hpp"

namespace sdi {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_finite(const std::vector<Complex>& gammas)
{
    for (const auto& g : gammas)
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
            throw InvalidInputError("reflection data contain non-finite values");
}

bool all_negligible(const std::vector<Complex>& gammas)
{
    return std::all_of(gammas.begin(), gammas.end(), [](Complex g) { return std::abs(g) < 1e-12; });
}

Eigen::Matrix3d covariance_from(const Eigen::MatrixXd& J, double cost, std::size_t samples)
{
    Eigen::Matrix3d cov = Eigen::Matrix3d::Constant(kNaN);
    const Eigen::Matrix3d jtj = J.transpose() * J;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(jtj);
    // The model only sees Gamma(eps) e^{jc}, so J^T J is rank 2 up to rounding.
    lu.setThreshold(1e-10);
    const double dof = 2.0 * static_cast<double>(samples) - 3.0;
    if (lu.isInvertible() && dof > 0.0) cov = lu.inverse() * (2.0 * cost / dof);
    return cov;
}

} // namespace

double SdiDataset::phase_step() const noexcept
{
    return static_cast<double>(direction) * kTwoPi * carrier * 2.0 * step / kSpeedOfLight;
}

void SdiDataset::validate() const
{
    if (gammas.size() < 3) throw InvalidInputError("an SDI dataset needs at least 3 steps");
    if (!(step > 0.0) || !std::isfinite(step)) throw InvalidInputError("step must be > 0");
    if (!(carrier > 0.0) || !std::isfinite(carrier)) throw InvalidInputError("carrier must be > 0");
    if (direction != 1 && direction != -1) throw InvalidInputError("direction must be +1 or -1");
    if (std::abs(phase_step()) >= kPi)
        throw AliasingError("per-step phase advance " + std::to_string(rad_to_deg(std::abs(phase_step()))) +
                            " deg reaches 180 deg; reduce the step below a quarter wavelength");
    require_finite(gammas);
}

void FitBounds::validate() const
{
    if (!(a_max > 1.0)) throw InvalidInputError("a_max must be > 1");
    if (!(b_max > 0.0)) throw InvalidInputError("b_max must be > 0");
}

Complex model_gamma(double a, double b, double c, double m, double phase_step)
{
    if (!(a >= 1.0) || !(b >= 0.0)) throw InvalidInputError("model requires a >= 1 and b >= 0");
    const double modulus = std::hypot(a, b);
    const double root_plus = std::sqrt(modulus + a);   // sqrt(|eps| + a)
    const double root_minus = b / root_plus;           // sqrt(|eps| - a)
    const double theta = c - phase_step * m;
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    const double g1 = 1.0 + modulus + kSqrt2 * root_plus;
    const double g2 = (1.0 - modulus) * cos_t - kSqrt2 * root_minus * sin_t;
    const double g3 = (1.0 - modulus) * sin_t + kSqrt2 * root_minus * cos_t;
    return {g2 / g1, g3 / g1};
}

Eigen::VectorXd residuals(const FitParams& params, const SdiDataset& data)
{
    const std::size_t count = data.gammas.size();
    const double phase_step = data.phase_step();
    Eigen::VectorXd r(2 * count);
    for (std::size_t m = 0; m < count; ++m) {
        const Complex model = model_gamma(params.a, params.b, params.c, static_cast<double>(m), phase_step);
        r[2 * m] = data.gammas[m].real() - model.real();
        r[2 * m + 1] = data.gammas[m].imag() - model.imag();
    }
    return r;
}

Eigen::MatrixXd jacobian(const FitParams& params, const SdiDataset& data)
{
    // The model is holomorphic in eps = a - jb: dGamma/deps = -e^{j theta} / (s (1+s)^2)
    // with s = sqrt(eps), so d/da = dGamma/deps and d/db = -j dGamma/deps.
    const std::size_t count = data.gammas.size();
    const double phase_step = data.phase_step();
    const Complex s = complex_sqrt_lossy(ComplexPermittivity(params.a, params.b));
    const Complex reflection = (1.0 - s) / (1.0 + s);
    const Complex d_eps = -1.0 / (s * (1.0 + s) * (1.0 + s));

    Eigen::MatrixXd J(2 * count, 3);
    for (std::size_t m = 0; m < count; ++m) {
        const Complex rot = std::polar(1.0, params.c - phase_step * static_cast<double>(m));
        const Complex da = d_eps * rot;
        const Complex db = Complex{0.0, -1.0} * da;
        const Complex dc = Complex{0.0, 1.0} * reflection * rot;
        // residual = measured - model
        J(2 * m, 0) = -da.real();
        J(2 * m + 1, 0) = -da.imag();
        J(2 * m, 1) = -db.real();
        J(2 * m + 1, 1) = -db.imag();
        J(2 * m, 2) = -dc.real();
        J(2 * m + 1, 2) = -dc.imag();
    }
    return J;
}

std::vector<FitParams> auto_starts(const SdiDataset& data)
{
    static constexpr double kA[] = {1.5, 3.0, 6.0, 12.0};
    static constexpr double kB[] = {0.01, 0.5};
    const double data_phase = data.gammas.empty() ? 0.0 : std::arg(data.gammas.front());
    std::vector<FitParams> starts;
    for (double a : kA) {
        for (double b : kB) {
            const double model_phase = std::arg(model_gamma(a, b, 0.0, 0.0, 0.0));
            starts.push_back({a, b, wrap_phase(data_phase - model_phase)});
        }
    }
    return starts;
}

FitResult fit_permittivity(const SdiDataset& data, const FitBounds& bounds,
                           const std::optional<std::vector<FitParams>>& starts,
                           const FitOptions& options)
{
    data.validate();
    bounds.validate();
    if (all_negligible(data.gammas))
        throw DegenerateDataError("all reflection magnitudes are below 1e-12; the permittivity is unidentifiable");

    const std::vector<FitParams> start_list = starts ? *starts : auto_starts(data);
    if (start_list.empty()) throw InvalidInputError("empty start list");

    const double inf = std::numeric_limits<double>::infinity();
    const BoxBounds box{Eigen::Vector3d(1.0, 0.0, -inf), Eigen::Vector3d(bounds.a_max, bounds.b_max, inf)};
    // The third unknown is the phase relative to the start's seed, so rotating the data by theta
    // moves every seed by theta and leaves the solver path unchanged.
    double seed_phase = 0.0;
    const auto unpack = [&](const Eigen::VectorXd& x) { return FitParams{x[0], x[1], seed_phase + x[2]}; };
    const LsqProblem problem{
        [&](const Eigen::VectorXd& x) { return residuals(unpack(x), data); },
        [&](const Eigen::VectorXd& x) { return jacobian(unpack(x), data); },
    };
    const LsqOptions lsq{options.max_iterations, options.gradient_tol, options.step_tol};

    // Costs closer than this count as ties and keep the earlier start.
    double data_energy = 0.0;
    for (const auto& g : data.gammas) data_energy += std::norm(g);
    const double tie_tolerance = 1e-12 * (1.0 + data_energy);

    std::optional<LsqSolution> best;
    std::size_t best_index = 0;
    double best_phase = 0.0;
    for (std::size_t i = 0; i < start_list.size(); ++i) {
        const auto& st = start_list[i];
        seed_phase = st.c;
        auto sol = solve_bounded_lsq(problem, Eigen::Vector3d(st.a, st.b, 0.0), box, lsq);
        if (!sol.converged()) continue;
        if (!best || sol.cost < best->cost - tie_tolerance) {
            best = std::move(sol);
            best_index = i;
            best_phase = st.c + best->x[2];
        }
    }
    if (!best)
        throw NoConvergenceError("no start converged within " + std::to_string(options.max_iterations) +
                                 " iterations");

    FitResult result;
    result.permittivity = ComplexPermittivity(best->x[0], best->x[1]);
    result.phase_offset = wrap_phase(best_phase);
    result.residual_norm = best->residual.norm();
    result.iterations = best->iterations;
    result.converged = true;
    result.start_index = best_index;
    result.status = best->status;
    result.covariance_proxy = covariance_from(best->jacobian, best->cost, data.gammas.size());
    return result;
}

Complex ideal_gamma_at_radar(const ComplexPermittivity& slab, const SlabGeometry& geom,
                             double step_m, std::size_t m, double frequency_hz)
{
    const Complex at_face = effective_reflection(slab, geom, frequency_hz);
    return translate_reflection(at_face, geom.standoff + static_cast<double>(m) * step_m, frequency_hz);
}

FitResult fit_ideal(const std::vector<Complex>& gammas_at_radar, const SlabGeometry& geom,
                    double step_m, double frequency_hz, const FitBounds& bounds,
                    const FitOptions& options)
{
    bounds.validate();
    if (gammas_at_radar.size() < 2) throw InvalidInputError("ideal fit needs at least 2 samples");
    if (!(step_m >= 0.0) || !(frequency_hz > 0.0)) throw InvalidInputError("step must be >= 0 and frequency > 0");
    require_finite(gammas_at_radar);
    if (all_negligible(gammas_at_radar))
        throw DegenerateDataError("all reflection magnitudes are below 1e-12; the permittivity is unidentifiable");

    const std::size_t count = gammas_at_radar.size();
    const auto residual = [&](const Eigen::VectorXd& x) {
        const ComplexPermittivity eps(x[0], x[1]);
        const Complex at_face = effective_reflection(eps, geom, frequency_hz);
        Eigen::VectorXd r(2 * count);
        for (std::size_t m = 0; m < count; ++m) {
            const Complex model =
                translate_reflection(at_face, geom.standoff + static_cast<double>(m) * step_m, frequency_hz);
            r[2 * m] = gammas_at_radar[m].real() - model.real();
            r[2 * m + 1] = gammas_at_radar[m].imag() - model.imag();
        }
        return r;
    };
    const Eigen::Vector2d lower(1.0, 0.0);
    const Eigen::Vector2d upper(bounds.a_max, bounds.b_max);
    const auto fd_jacobian = [&](const Eigen::VectorXd& x) {
        Eigen::MatrixXd J(2 * count, 2);
        for (Eigen::Index j = 0; j < 2; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
            Eigen::VectorXd hi = x, lo = x;
            hi[j] = std::min(x[j] + h, upper[j]);
            lo[j] = std::max(x[j] - h, lower[j]);
            J.col(j) = (residual(hi) - residual(lo)) / (hi[j] - lo[j]);
        }
        return J;
    };

    static constexpr double kA[] = {1.5, 2.0, 3.0, 4.0, 6.0, 9.0, 13.0, 20.0};
    static constexpr double kB[] = {0.01, 0.1, 0.5};
    const BoxBounds box{lower, upper};
    const LsqOptions lsq{options.max_iterations, options.gradient_tol, options.step_tol};

    std::optional<LsqSolution> best;
    std::size_t best_index = 0;
    std::size_t index = 0;
    for (double a : kA) {
        for (double b : kB) {
            const Eigen::Vector2d x0(std::min(a, bounds.a_max), std::min(b, bounds.b_max));
            auto sol = solve_bounded_lsq({residual, fd_jacobian}, x0, box, lsq);
            if (sol.converged() && (!best || sol.cost < best->cost)) {
                best = std::move(sol);
                best_index = index;
            }
            ++index;
        }
    }
    if (!best) throw NoConvergenceError("ideal-geometry fit did not converge from any start");

    FitResult result;
    result.permittivity = ComplexPermittivity(best->x[0], best->x[1]);
    result.phase_offset = 0.0;
    result.residual_norm = best->residual.norm();
    result.iterations = best->iterations;
    result.converged = true;
    result.start_index = best_index;
    result.status = best->status;
    return result;
}

std::vector<double> unwrap_phase(const std::vector<double>& phases)
{
    std::vector<double> out(phases);
    for (std::size_t i = 1; i < out.size(); ++i) {
        double delta = phases[i] - phases[i - 1];
        delta = -wrap_phase(-delta);  // to (-pi, pi]
        out[i] = out[i - 1] + delta;
    }
    return out;
}

PhaseSlope phase_slope_diagnostic(const SdiDataset& data)
{
    data.validate();
    std::vector<double> phases;
    phases.reserve(data.gammas.size());
    for (const auto& g : data.gammas) phases.push_back(std::arg(g));
    const auto unwrapped = unwrap_phase(phases);

    const auto [lo, hi] = std::minmax_element(unwrapped.begin(), unwrapped.end());
    PhaseSlope out;
    if (*hi - *lo <= 1e-12) {
        out.degenerate = true;
        out.intercept_deg = rad_to_deg(unwrapped.front());
        out.r_squared = kNaN;
        return out;
    }

    const double n = static_cast<double>(unwrapped.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t m = 0; m < unwrapped.size(); ++m) {
        mean_x += static_cast<double>(m) * data.step * 1e3;
        mean_y += rad_to_deg(unwrapped[m]);
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t m = 0; m < unwrapped.size(); ++m) {
        const double dx = static_cast<double>(m) * data.step * 1e3 - mean_x;
        const double dy = rad_to_deg(unwrapped[m]) - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    out.slope_deg_per_mm = sxy / sxx;
    out.intercept_deg = mean_y - out.slope_deg_per_mm * mean_x;
    double ss_res = 0.0;
    for (std::size_t m = 0; m < unwrapped.size(); ++m) {
        const double x = static_cast<double>(m) * data.step * 1e3;
        const double e = rad_to_deg(unwrapped[m]) - (out.intercept_deg + out.slope_deg_per_mm * x);
        ss_res += e * e;
    }
    out.r_squared = 1.0 - ss_res / syy;
    return out;
}

} // namespace sdi
