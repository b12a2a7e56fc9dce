// Acceptance suite: one line per criterion, non-zero exit if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sdi/em.hpp"
#include "sdi/estimator.hpp"
#include "sdi/fmcw.hpp"
#include "sdi/random.hpp"
#include "sdi/synth.hpp"

using namespace sdi;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome fraunhofer_anchor()
{
    const double d = fraunhofer_distance(0.015, 0.0038);
    const double rel = std::abs(d - 0.118) / 0.118;
    const bool ok = std::abs(d - 0.1184) < 5e-5 && rel < 0.005;
    return {ok, fmt("d_F = %.6f m, %.3f%% from 11.8 cm", d, 100.0 * rel)};
}

Outcome phase_step_anchor()
{
    ChirpConfig cfg = ChirpConfig::narrowband();
    cfg.start_frequency = 79e9;
    const double standoff = 0.25, step = 1e-4;
    const std::size_t count = 40;

    std::vector<IfTrace> metal;
    for (std::size_t m = 0; m < count; ++m) {
        const EchoComponent plate{-1.0, 2.0 * (standoff + double(m) * step) / kSpeedOfLight};
        metal.push_back(synth_if_trace(cfg, std::span(&plate, 1)));
    }
    double worst_step = 0.0;
    for (std::size_t m = 1; m < count; ++m) {
        const auto a = dft(metal[m - 1]), b = dft(metal[m]);
        const std::size_t k = peak_bin(a);
        const double d = rad_to_deg(std::arg(b.bins[k] / a.bins[k]));
        worst_step = std::max(worst_step, std::abs(d - 18.97));
    }

    const EchoComponent mut_echo{-0.3, 2.0 * standoff / kSpeedOfLight};
    const auto mut = synth_if_trace(cfg, std::span(&mut_echo, 1));
    SdiDataset data;
    data.gammas = extract_sdi_gammas(mut, metal);
    data.step = step;
    data.carrier = cfg.effective_carrier();
    const auto slope = phase_slope_diagnostic(data);
    const double paper_gap = std::abs(-187.9 - slope.slope_deg_per_mm) / std::abs(slope.slope_deg_per_mm);

    const bool ok = worst_step <= 0.05 && std::abs(slope.slope_deg_per_mm + 189.7) < 0.05 &&
                    slope.r_squared >= 1.0 - 1e-9 && paper_gap < 0.01;
    return {ok, fmt("max |step - 18.97 deg| = %.4f, slope %.4f deg/mm, 1 - R^2 = %.2e, measured slope %.2f%% off",
                    worst_step, slope.slope_deg_per_mm, 1.0 - slope.r_squared, 100.0 * paper_gap)};
}

Outcome noiseless_round_trip()
{
    const std::vector<std::pair<double, double>> truths{{2.0, 0.1}, {3.0, 0.15}, {7.0, 0.3}, {2.6, 0.1}};
    Rng rng(20240601);
    double worst = 0.0;
    std::string per;
    for (const auto& [a, b] : truths) {
        const double c = rng.uniform(-kPi, kPi);
        const auto data = generate_dataset({a, b}, c, 40, 1e-4, 79e9, NoiseModel::noiseless());
        const auto fit = fit_permittivity(data);
        const double err = std::max({std::abs(fit.permittivity.real() - a), std::abs(fit.permittivity.loss() - b),
                                     std::abs(wrap_phase(fit.phase_offset - c))});
        worst = std::max(worst, err);
        per += fmt(" %g-j%g->%.4f-j%.4f", a, b, fit.permittivity.real(), fit.permittivity.loss());
    }
    return {worst <= 1e-6, fmt("max componentwise error %.3e;", worst) + per};
}

Outcome noisy_monte_carlo()
{
    NoiseModel noise;  // 0.05 %, 0.8 deg, 1.22 % drift
    noise.seed = 79;
    const auto report = run_sweep({{2.6, 0.1}}, noise, 100);
    const auto& s = report.summaries.front();
    const bool all_converged = s.converged == 100 && s.succeeded == 100;
    const bool ok = all_converged && std::abs(s.mean_a - 2.6) <= 0.05 && std::abs(s.mean_b - 0.1) <= 0.05;
    return {ok, fmt("mean eps' %.4f (std %.4f), mean eps'' %.4f (std %.4f), converged %zu/100", s.mean_a, s.std_a,
                    s.mean_b, s.std_b, s.converged)};
}

Outcome series_oracle()
{
    Rng rng(5);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const ComplexPermittivity eps(rng.uniform(1.1, 20.0), rng.uniform(0.01, 2.0));
        const double d = rng.uniform(1e-3, 50e-3);
        Backing backing = MetalBacking{};
        if (i % 3 == 1) backing = ComplexPermittivity::air();
        if (i % 3 == 2) backing = ComplexPermittivity(rng.uniform(1.0, 20.0), rng.uniform(0.0, 2.0));
        const SlabGeometry geom(d, 0.25, backing);
        const Complex closed = effective_reflection(eps, geom, 79e9);
        worst = std::max(worst, std::abs(closed - effective_reflection_truncated(eps, geom, 79e9, 64)));
    }
    return {worst <= 1e-10, fmt("max |closed - truncated(64)| = %.3e over 200 slabs", worst)};
}

Outcome pipeline_identity()
{
    Rng rng(6);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const ComplexPermittivity eps(rng.uniform(1.1, 20.0), rng.uniform(0.0, 2.0));
        IfOptions opts;
        opts.phase_offset = rng.uniform(-kPi, kPi);
        const SlabGeometry geom(0.02, 0.25, ComplexPermittivity::air());
        const auto traces = generate_if_datasets(eps, geom, ChirpConfig{}, 40, 1e-4, NoiseModel::noiseless(), opts);
        const auto extracted = extract_dataset(traces);
        const auto direct = generate_dataset(eps, opts.phase_offset, 40, 1e-4, 79e9, NoiseModel::noiseless());
        for (std::size_t m = 0; m < 40; ++m)
            worst = std::max(worst, std::abs(extracted.gammas[m] - direct.gammas[m]));
    }
    return {worst <= 1e-6, fmt("max |raw-IF - direct| = %.3e over 20 materials x 40 steps", worst)};
}

Outcome solver_validity()
{
    Rng rng(7);
    SdiDataset data = generate_dataset({2.6, 0.1}, 0.3, 10, 1e-4, 79e9, NoiseModel::noiseless());
    double worst_jac = 0.0;
    for (int i = 0; i < 50; ++i) {
        const FitParams p{rng.uniform(1.2, 30.0), rng.uniform(0.05, 5.0), rng.uniform(-kPi, kPi)};
        const auto J = jacobian(p, data);
        const double x[3] = {p.a, p.b, p.c};
        for (int k = 0; k < 3; ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
            double up[3] = {x[0], x[1], x[2]}, dn[3] = {x[0], x[1], x[2]};
            up[k] += h;
            dn[k] -= h;
            const Eigen::VectorXd fd =
                (residuals({up[0], up[1], up[2]}, data) - residuals({dn[0], dn[1], dn[2]}, data)) / (2.0 * h);
            worst_jac = std::max(worst_jac, (J.col(k) - fd).cwiseAbs().maxCoeff());
        }
    }

    double worst_ab = 0.0, worst_c = 0.0;
    for (int i = 0; i < 20; ++i) {
        NoiseModel noise;
        noise.seed = 100 + static_cast<std::uint64_t>(i);
        const ComplexPermittivity eps(rng.uniform(1.5, 10.0), rng.uniform(0.0, 1.0));
        const auto base = generate_dataset(eps, rng.uniform(-kPi, kPi), 40, 1e-4, 79e9, noise);
        const double theta = rng.uniform(-kPi, kPi);
        auto rotated = base;
        for (auto& g : rotated.gammas) g *= std::polar(1.0, theta);
        const auto f0 = fit_permittivity(base);
        const auto f1 = fit_permittivity(rotated);
        worst_ab = std::max({worst_ab, std::abs(f1.permittivity.real() - f0.permittivity.real()),
                             std::abs(f1.permittivity.loss() - f0.permittivity.loss())});
        worst_c = std::max(worst_c, std::abs(wrap_phase(f1.phase_offset - f0.phase_offset - theta)));
    }
    const bool ok = worst_jac <= 1e-5 && worst_ab <= 1e-8 && worst_c <= 1e-8;
    return {ok, fmt("Jacobian vs FD %.2e; rotation: max |d(a,b)| %.2e, max |dc - theta| %.2e", worst_jac, worst_ab,
                    worst_c)};
}

Outcome fresnel_identities()
{
    double worst = 0.0;
    std::size_t cases = 0;
    std::vector<ComplexPermittivity> grid;
    for (double a = 1.0; a <= 100.0; a *= 1.6)
        for (double b : {0.0, 1e-6, 0.01, 0.3, 2.0, 11.0, 50.0}) grid.emplace_back(a, b);
    for (const auto& e1 : grid) {
        const Complex s = complex_sqrt_lossy(e1);
        worst = std::max(worst, std::abs(s * s - e1.value()) / std::abs(e1.value()));
        for (const auto& e2 : grid) {
            const auto fwd = fresnel_normal(e1, e2);
            const auto back = fresnel_normal(e2, e1);
            worst = std::max({worst, std::abs(fwd.transmission - (1.0 + fwd.reflection)),
                              std::abs(back.reflection + fwd.reflection),
                              std::abs(fwd.transmission * back.transmission - (1.0 - fwd.reflection * fwd.reflection))});
            ++cases;
        }
    }
    return {worst <= 1e-12, fmt("max identity defect %.2e over %zu interface pairs", worst, cases)};
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "Fraunhofer anchor", 1.0, fraunhofer_anchor},
        {2, "Phase-step anchor", 1.0, phase_step_anchor},
        {3, "Noiseless round-trip", 5.0, noiseless_round_trip},
        {4, "Noisy Monte-Carlo", 60.0, noisy_monte_carlo},
        {5, "Series-oracle equivalence", 1.0, series_oracle},
        {6, "Pipeline identity", 10.0, pipeline_identity},
        {7, "Solver validity", 10.0, solver_validity},
        {8, "Fresnel identities", 1.0, fresnel_identities},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = out.pass && secs < c.time_limit_s;
        failures += !pass;
        std::printf("[%s] criterion %d %s: %s (%.2f s, limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    out.detail.c_str(), secs, c.time_limit_s);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
