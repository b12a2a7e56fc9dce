#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sdi/em.hpp"
#include "sdi/errors.hpp"
#include "sdi/estimator.hpp"

using namespace sdi;

namespace {

const double kC1 = oracle::sdi_phase_step(79e9, 1e-4);

SdiDataset synthetic(double a, double b, double c, std::size_t count = 40, double step = 1e-4,
                     double carrier = 79e9)
{
    SdiDataset data;
    data.step = step;
    data.carrier = carrier;
    const double c1 = oracle::sdi_phase_step(carrier, step);
    for (std::size_t m = 0; m < count; ++m) data.gammas.push_back(oracle::sdi_model(a, b, c, double(m), c1));
    return data;
}

double objective_oracle(const SdiDataset& data, double a, double b, double c)
{
    double sum = 0.0;
    for (std::size_t m = 0; m < data.gammas.size(); ++m)
        sum += std::norm(data.gammas[m] - oracle::sdi_model(a, b, c, double(m), data.phase_step()));
    return sum;
}

// Lossy permittivity with the same |Gamma| as (a, b) at a different loss, by bisection on a.
double same_magnitude_real_part(double a, double b, double other_b)
{
    const double target = std::abs(oracle::sdi_model(a, b, 0.0, 0.0, 0.0));
    double lo = 1.0, hi = 100.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::abs(oracle::sdi_model(mid, other_b, 0.0, 0.0, 0.0)) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST(ModelGamma, ExactCases)
{
    EXPECT_EQ(model_gamma(1.0, 0.0, 0.7, 5.0, kC1), Complex(0.0, 0.0));
    const Complex g = model_gamma(4.0, 0.0, 0.0, 0.0, kC1);
    EXPECT_NEAR(g.real(), -1.0 / 3.0, 1e-15);
    EXPECT_NEAR(g.imag(), 0.0, 1e-15);
    EXPECT_THROW(model_gamma(0.9, 0.0, 0.0, 0.0, kC1), InvalidInputError);
    EXPECT_THROW(model_gamma(2.0, -0.1, 0.0, 0.0, kC1), InvalidInputError);
}

TEST(ModelGamma, EqualsRotatedFresnel)
{
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> ua(1.0, 100.0), ub(0.0, 50.0), uc(-kPi, kPi), um(0.0, 60.0);
    for (int i = 0; i < 500; ++i) {
        const double a = ua(gen), b = ub(gen), c = uc(gen), m = std::floor(um(gen));
        const Complex front = fresnel_normal(ComplexPermittivity::air(), {a, b}).reflection;
        const Complex rotated = front * std::polar(1.0, c - kC1 * m);
        EXPECT_LE(std::abs(model_gamma(a, b, c, m, kC1) - rotated), 1e-12);
        EXPECT_LE(std::abs(model_gamma(a, b, c, m, kC1) - oracle::sdi_model(a, b, c, m, kC1)), 1e-12);
    }
}

TEST(ModelGamma, StepIsPureRotation)
{
    for (double m = 1.0; m < 40.0; m += 1.0)
        EXPECT_LE(std::abs(model_gamma(2.6, 0.1, 0.3, m, kC1) - model_gamma(2.6, 0.1, 0.3 - kC1, m - 1.0, kC1)),
                  1e-13);
}

TEST(ModelGamma, PeriodOfAboutNineteenSteps)
{
    const double period = 2.0 * kPi / kC1;
    EXPECT_NEAR(period, 360.0 / 18.97312573487089, 1e-9);
    EXPECT_EQ(std::lround(period), 19);
    for (double m = 0.0; m < 20.0; m += 1.0)
        EXPECT_LE(std::abs(model_gamma(2.0, 0.1, 0.0, m + period, kC1) - model_gamma(2.0, 0.1, 0.0, m, kC1)), 1e-12);
}

TEST(Residuals, ZeroAtGeneratingParameters)
{
    const auto data = synthetic(3.0, 0.15, 0.5);
    const auto r = residuals({3.0, 0.15, 0.5}, data);
    ASSERT_EQ(r.size(), 80);
    EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Residuals, ZeroDataAtUnitPermittivity)
{
    SdiDataset data;
    data.gammas.assign(10, Complex{});
    EXPECT_EQ(residuals({1.0, 0.0, 1.3}, data).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Residuals, ObjectiveMatchesDirectEvaluation)
{
    const auto data = synthetic(3.0, 0.15, 0.0);
    const auto r = residuals({2.0, 0.1, 0.0}, data);
    EXPECT_GT(r.norm(), 0.0);
    EXPECT_NEAR(r.squaredNorm(), objective_oracle(data, 2.0, 0.1, 0.0), 1e-14);
    for (std::size_t m = 0; m < data.gammas.size(); ++m) {
        const Complex model = oracle::sdi_model(2.0, 0.1, 0.0, double(m), kC1);
        EXPECT_NEAR(r[2 * m], data.gammas[m].real() - model.real(), 1e-14);
        EXPECT_NEAR(r[2 * m + 1], data.gammas[m].imag() - model.imag(), 1e-14);
    }
}

TEST(Jacobian, MatchesCentralDifferences)
{
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> ua(1.2, 30.0), ub(0.05, 5.0), uc(-kPi, kPi);
    const auto data = synthetic(2.6, 0.1, 0.4, 10);
    for (int i = 0; i < 50; ++i) {
        const FitParams p{ua(gen), ub(gen), uc(gen)};
        const auto J = jacobian(p, data);
        ASSERT_EQ(J.rows(), 20);
        ASSERT_EQ(J.cols(), 3);
        double x[3] = {p.a, p.b, p.c};
        for (int k = 0; k < 3; ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
            double up[3] = {x[0], x[1], x[2]}, dn[3] = {x[0], x[1], x[2]};
            up[k] += h;
            dn[k] -= h;
            const auto fd = ((residuals({up[0], up[1], up[2]}, data) - residuals({dn[0], dn[1], dn[2]}, data)) /
                             (2.0 * h))
                                .eval();
            EXPECT_LE((J.col(k) - fd).cwiseAbs().maxCoeff(), 1e-5) << i << ' ' << k;
        }
    }
}

TEST(Jacobian, PhaseColumnIsQuarterTurnOfModel)
{
    const auto data = synthetic(2.6, 0.1, 0.4, 10);
    const FitParams p{3.0, 0.2, -0.3};
    const auto J = jacobian(p, data);
    for (std::size_t m = 0; m < 10; ++m) {
        const Complex model = model_gamma(p.a, p.b, p.c, double(m), data.phase_step());
        // residual = data - model, d(model)/dc = j model
        EXPECT_NEAR(J(2 * m, 2), model.imag(), 1e-14);
        EXPECT_NEAR(J(2 * m + 1, 2), -model.real(), 1e-14);
    }
}

TEST(Jacobian, OneSidedAtLosslessBoundary)
{
    const auto data = synthetic(2.6, 0.1, 0.4, 10);
    const FitParams p{2.0, 0.0, 0.1};
    const double h = 1e-7;
    const auto J = jacobian(p, data);
    const auto fd = ((residuals({2.0, h, 0.1}, data) - residuals(p, data)) / h).eval();
    EXPECT_LE((J.col(1) - fd).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Jacobian, RankTwoEverywhere)
{
    // data only constrain Gamma(eps) e^{jc}: one direction in (a, b, c) leaves the model unchanged
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> ua(1.2, 30.0), ub(0.05, 5.0), uc(-kPi, kPi);
    const auto data = synthetic(2.6, 0.1, 0.4, 40);
    for (int i = 0; i < 20; ++i) {
        const auto J = jacobian({ua(gen), ub(gen), uc(gen)}, data);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        const auto& s = svd.singularValues();
        EXPECT_LT(s[2], 1e-12 * s[0]) << i;
        EXPECT_GT(s[1], 1e-6 * s[0]) << i;
    }
}

TEST(SdiDataset, Validation)
{
    auto data = synthetic(2.6, 0.1, 0.0, 3);
    EXPECT_NO_THROW(data.validate());
    data.gammas.pop_back();
    EXPECT_THROW(data.validate(), InvalidInputError);

    auto alias = synthetic(2.6, 0.1, 0.0, 10, 1e-3);
    EXPECT_THROW(alias.validate(), AliasingError);
    auto quarter = synthetic(2.6, 0.1, 0.0, 10, wavelength(79e9) / 4.0);
    EXPECT_THROW(quarter.validate(), AliasingError);

    auto bad = synthetic(2.6, 0.1, 0.0, 10);
    bad.direction = 0;
    EXPECT_THROW(bad.validate(), InvalidInputError);
    bad.direction = 1;
    bad.gammas[3] = {std::nan(""), 0.0};
    EXPECT_THROW(bad.validate(), InvalidInputError);
}

TEST(FitBounds, Validation)
{
    EXPECT_NO_THROW(FitBounds{}.validate());
    EXPECT_THROW((FitBounds{1.0, 50.0}.validate()), InvalidInputError);
    EXPECT_THROW((FitBounds{100.0, 0.0}.validate()), InvalidInputError);
}

TEST(AutoStarts, GridAndPhaseSeed)
{
    const auto data = synthetic(3.0, 0.15, 0.5);
    const auto starts = auto_starts(data);
    ASSERT_EQ(starts.size(), 8u);
    EXPECT_EQ(starts.front().a, 1.5);
    EXPECT_EQ(starts.front().b, 0.01);
    EXPECT_EQ(starts.back().a, 12.0);
    EXPECT_EQ(starts.back().b, 0.5);
    for (const auto& s : starts) {
        EXPECT_GE(s.c, -kPi);
        EXPECT_LT(s.c, kPi);
        const Complex seeded = model_gamma(s.a, s.b, s.c, 0.0, data.phase_step());
        EXPECT_NEAR(wrap_phase(std::arg(seeded) - std::arg(data.gammas[0])), 0.0, 1e-12);
    }
}

TEST(NonIdentifiability, DistinctParametersGiveIdenticalData)
{
    const double a2 = same_magnitude_real_part(2.6, 0.1, 0.8);
    const Complex g1 = oracle::sdi_model(2.6, 0.1, 0.0, 0.0, 0.0);
    const Complex g2 = oracle::sdi_model(a2, 0.8, 0.0, 0.0, 0.0);
    const double c2 = 0.5 + std::arg(g1) - std::arg(g2);
    const auto first = synthetic(2.6, 0.1, 0.5);
    const auto second = synthetic(a2, 0.8, c2);
    EXPECT_GT(std::abs(a2 - 2.6), 0.2);
    for (std::size_t m = 0; m < first.gammas.size(); ++m)
        EXPECT_LE(std::abs(first.gammas[m] - second.gammas[m]), 1e-13);
    EXPECT_LE(residuals({a2, 0.8, c2}, first).norm(), 1e-12);
}

TEST(FitPermittivity, NoiselessFitReproducesData)
{
    for (const auto& [a, b] : {std::pair{3.0, 0.15}, {2.0, 0.1}, {7.0, 0.3}, {2.6, 0.1}}) {
        const auto data = synthetic(a, b, 0.5);
        const auto fit = fit_permittivity(data);
        ASSERT_TRUE(fit.converged);
        EXPECT_LT(fit.residual_norm, 1e-9);
        // fitted parameters are observationally equivalent to the truth
        const Complex truth0 = oracle::sdi_model(a, b, 0.5, 0.0, 0.0);
        const Complex fitted0 =
            oracle::sdi_model(fit.permittivity.real(), fit.permittivity.loss(), fit.phase_offset, 0.0, 0.0);
        EXPECT_LE(std::abs(fitted0 - truth0), 1e-9) << a << ' ' << b;
        EXPECT_GE(fit.phase_offset, -kPi);
        EXPECT_LT(fit.phase_offset, kPi);
    }
}

TEST(FitPermittivity, StartAtTruthStaysAtTruth)
{
    const auto data = synthetic(3.0, 0.15, 0.5);
    const auto fit = fit_permittivity(data, {}, std::vector<FitParams>{{3.0, 0.15, 0.5}});
    EXPECT_NEAR(fit.permittivity.real(), 3.0, 1e-9);
    EXPECT_NEAR(fit.permittivity.loss(), 0.15, 1e-9);
    EXPECT_NEAR(fit.phase_offset, 0.5, 1e-9);
    EXPECT_EQ(fit.start_index, 0u);
}

TEST(FitPermittivity, RotationRotatesTheFittedCurve)
{
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> ua(1.5, 10.0), ub(0.0, 1.0), uc(-kPi, kPi), un(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        auto data = synthetic(ua(gen), ub(gen), uc(gen));
        for (auto& g : data.gammas) g *= Complex(1.0 + 0.01 * un(gen), 0.01 * un(gen));
        const double theta = uc(gen);
        auto rotated = data;
        for (auto& g : rotated.gammas) g *= std::polar(1.0, theta);
        const auto f0 = fit_permittivity(data);
        const auto f1 = fit_permittivity(rotated);
        EXPECT_NEAR(f1.residual_norm, f0.residual_norm, 1e-12) << i;
        for (std::size_t m = 0; m < data.gammas.size(); ++m) {
            const Complex m0 = oracle::sdi_model(f0.permittivity.real(), f0.permittivity.loss(), f0.phase_offset,
                                                 double(m), kC1);
            const Complex m1 = oracle::sdi_model(f1.permittivity.real(), f1.permittivity.loss(), f1.phase_offset,
                                                 double(m), kC1);
            EXPECT_LE(std::abs(m1 - m0 * std::polar(1.0, theta)), 1e-9) << i << " " << m;
        }
    }
}

TEST(FitPermittivity, Deterministic)
{
    auto data = synthetic(2.6, 0.1, 1.0);
    data.gammas[7] *= Complex(1.001, 0.002);
    const auto a = fit_permittivity(data);
    const auto b = fit_permittivity(data);
    EXPECT_EQ(a.permittivity, b.permittivity);
    EXPECT_EQ(a.phase_offset, b.phase_offset);
    EXPECT_EQ(a.residual_norm, b.residual_norm);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ(a.start_index, b.start_index);
}

TEST(FitPermittivity, LosslessDataIsFitExactly)
{
    const auto data = synthetic(4.0, 0.0, -0.8);
    const auto fit = fit_permittivity(data);
    ASSERT_TRUE(fit.converged);
    EXPECT_LT(fit.residual_norm, 1e-9);
    EXPECT_NEAR(std::abs(oracle::fresnel(Complex(1.0, 0.0), oracle::sqrt_polar(fit.permittivity.real(),
                                                                                 fit.permittivity.loss()))),
                std::abs(data.gammas[0]), 1e-9);
    for (std::size_t m = 1; m < data.gammas.size(); ++m)
        EXPECT_NEAR(std::abs(data.gammas[m]), std::abs(data.gammas[0]), 1e-15);
}

TEST(FitPermittivity, CurvatureProxyIsSingular)
{
    const auto fit = fit_permittivity(synthetic(3.0, 0.15, 0.5));
    EXPECT_TRUE(fit.covariance_proxy.array().isNaN().all());
}

TEST(FitPermittivity, Errors)
{
    SdiDataset air;
    air.gammas.assign(10, Complex{1e-13, 0.0});
    EXPECT_THROW(fit_permittivity(air), DegenerateDataError);

    const auto data = synthetic(3.0, 0.15, 0.5);
    FitOptions tight;
    tight.max_iterations = 1;
    EXPECT_THROW(fit_permittivity(data, {}, std::vector<FitParams>{{50.0, 20.0, 0.0}}, tight), NoConvergenceError);
    EXPECT_THROW(fit_permittivity(data, {}, std::vector<FitParams>{}), InvalidInputError);
}

TEST(FitPermittivity, StaysInsideBounds)
{
    const auto data = synthetic(30.0, 5.0, 0.2);
    const auto fit = fit_permittivity(data, FitBounds{10.0, 1.0});
    EXPECT_LE(fit.permittivity.real(), 10.0);
    EXPECT_LE(fit.permittivity.loss(), 1.0);
    EXPECT_GE(fit.permittivity.real(), 1.0);
}

TEST(PhaseSlope, AnalyticSlope)
{
    const auto data = synthetic(2.6, 0.1, 0.3);
    const auto slope = phase_slope_diagnostic(data);
    ASSERT_FALSE(slope.degenerate);
    EXPECT_NEAR(slope.slope_deg_per_mm, -189.7312573487089, 1e-8);
    EXPECT_NEAR(slope.r_squared, 1.0, 1e-9);

    auto reversed = data;
    reversed.direction = -1;
    for (std::size_t m = 0; m < data.gammas.size(); ++m)
        reversed.gammas[m] = oracle::sdi_model(2.6, 0.1, 0.3, -double(m), kC1);
    EXPECT_NEAR(phase_slope_diagnostic(reversed).slope_deg_per_mm, 189.7312573487089, 1e-8);
}

TEST(PhaseSlope, ConstantPhaseIsDegenerate)
{
    SdiDataset data;
    data.gammas.assign(10, Complex{-0.2, 0.1});
    const auto slope = phase_slope_diagnostic(data);
    EXPECT_TRUE(slope.degenerate);
    EXPECT_EQ(slope.slope_deg_per_mm, 0.0);
    EXPECT_TRUE(std::isnan(slope.r_squared));
}

TEST(UnwrapPhase, RemovesJumps)
{
    std::vector<double> wrapped;
    for (int i = 0; i < 30; ++i) wrapped.push_back(wrap_phase(-0.4 * i + 3.0));
    const auto un = unwrap_phase(wrapped);
    for (int i = 0; i < 30; ++i) EXPECT_NEAR(un[i], -0.4 * i + wrapped[0], 1e-12);
}

TEST(FitIdeal, ReproducesThickSlab)
{
    const ComplexPermittivity truth(3.0, 0.15);
    const SlabGeometry geom(0.02, 0.25, MetalBacking{});
    std::vector<Complex> gammas;
    for (std::size_t m = 0; m < 40; ++m) {
        const Complex face = oracle::slab_series(3.0, 0.15, 0.0, true, 0.02, 79e9, 400);
        gammas.push_back(face * std::polar(1.0, 2.0 * 2.0 * kPi * 79e9 / oracle::c0 * (0.25 + m * 1e-4)));
        EXPECT_LE(std::abs(gammas.back() - ideal_gamma_at_radar(truth, geom, 1e-4, m, 79e9)), 1e-12);
    }
    const auto fit = fit_ideal(gammas, geom, 1e-4, 79e9);
    ASSERT_TRUE(fit.converged);
    EXPECT_LT(fit.residual_norm, 1e-9);
    const Complex face =
        oracle::slab_series(fit.permittivity.real(), fit.permittivity.loss(), 0.0, true, 0.02, 79e9, 400);
    EXPECT_LE(std::abs(face - oracle::slab_series(3.0, 0.15, 0.0, true, 0.02, 79e9, 400)), 1e-9);
}

TEST(FitIdeal, StandoffErrorBiasesTheFit)
{
    const ComplexPermittivity truth(3.0, 0.15);
    const SlabGeometry actual(0.02, 0.25 + 50e-6, MetalBacking{});
    const SlabGeometry assumed(0.02, 0.25, MetalBacking{});
    std::vector<Complex> gammas;
    for (std::size_t m = 0; m < 40; ++m) {
        gammas.push_back(ideal_gamma_at_radar(truth, actual, 1e-4, m, 79e9));
        const double err = rad_to_deg(std::arg(gammas.back() / ideal_gamma_at_radar(truth, assumed, 1e-4, m, 79e9)));
        EXPECT_NEAR(err, 9.486562867435445, 1e-9);
    }
    const auto fit = fit_ideal(gammas, assumed, 1e-4, 79e9);
    const double bias = std::abs(fit.permittivity.value() - truth.value());
    EXPECT_GT(bias, 1e-3);
}

TEST(FitIdeal, AirIsDegenerate)
{
    const SlabGeometry geom(0.02, 0.25, ComplexPermittivity::air());
    std::vector<Complex> gammas(10, Complex{});
    EXPECT_THROW(fit_ideal(gammas, geom, 1e-4, 79e9), DegenerateDataError);
}
