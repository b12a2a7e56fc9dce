#include "sdi/synth.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "sdi/errors.hpp"
#include "sdi/random.hpp"

namespace sdi {

void NoiseModel::validate() const
{
    if (!(amplitude_rel_sigma >= 0.0) || !(phase_sigma >= 0.0) || !(amplitude_drift_rel >= 0.0))
        throw InvalidInputError("noise sigmas and drift must be >= 0");
}

double NoiseModel::drift(std::size_t m, std::size_t count) const noexcept
{
    if (count < 2) return 0.0;
    return -amplitude_drift_rel * static_cast<double>(m) / static_cast<double>(count - 1);
}

namespace {

// (1 + drift + amplitude noise) e^{j phase noise}; draws amplitude then phase.
Complex perturbation(Rng& rng, const NoiseModel& noise, double drift)
{
    const double amp = 1.0 + drift + noise.amplitude_rel_sigma * rng.normal();
    const double phase = noise.phase_sigma * rng.normal();
    return std::polar(amp, phase);
}

} // namespace

SdiDataset generate_dataset(const ComplexPermittivity& truth, double phase_offset, std::size_t m_count,
                            double step_m, double carrier_hz, const NoiseModel& noise, int direction)
{
    noise.validate();
    SdiDataset data;
    data.step = step_m;
    data.carrier = carrier_hz;
    data.direction = direction;
    data.gammas.reserve(m_count);
    const double phase_step = data.phase_step();
    Rng rng(noise.seed);
    for (std::size_t m = 0; m < m_count; ++m) {
        const Complex clean = model_gamma(truth.real(), truth.loss(), phase_offset, static_cast<double>(m), phase_step);
        data.gammas.push_back(clean * perturbation(rng, noise, noise.drift(m, m_count)));
    }
    data.validate();
    return data;
}

IfDatasets generate_if_datasets(const ComplexPermittivity& truth, const SlabGeometry& geom,
                                const ChirpConfig& cfg, std::size_t m_count, double step_m,
                                const NoiseModel& noise, const IfOptions& options)
{
    cfg.validate();
    noise.validate();
    if (m_count < 1) throw InvalidInputError("need at least one metal position");
    if (!(step_m > 0.0)) throw InvalidInputError("step must be > 0");
    if (!(options.aperture > 0.0)) throw InvalidInputError("aperture must be > 0");

    IfDatasets out;
    out.chirp = cfg;
    out.step = step_m;

    const double far_field = fraunhofer_distance(options.aperture, wavelength(cfg.effective_carrier()));
    if (geom.standoff < far_field)
        out.warnings.push_back("standoff " + std::to_string(geom.standoff) + " m is inside the Fraunhofer distance " +
                               std::to_string(far_field) + " m");

    Rng rng(noise.seed);

    auto echoes = synth_slab_echoes(truth, geom, cfg, options.bounces);
    const Complex mut_factor = std::polar(1.0, options.phase_offset) * perturbation(rng, noise, 0.0);
    for (auto& e : echoes) {
        e.delay += options.mut_delay_offset;
        if (e.delay < 0.0) throw InvalidInputError("MUT delay offset makes an echo delay negative");
        e.reflection *= mut_factor;
    }
    out.mut = synth_if_trace(cfg, echoes);

    out.metal.reserve(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        const double distance = geom.standoff + static_cast<double>(m) * step_m;
        const EchoComponent plate{-1.0 * perturbation(rng, noise, noise.drift(m, m_count)),
                                  2.0 * distance / kSpeedOfLight};
        out.metal.push_back(synth_if_trace(cfg, std::span(&plate, 1)));
    }
    return out;
}

SdiDataset extract_dataset(const IfDatasets& traces, int direction)
{
    SdiDataset data;
    data.gammas = extract_sdi_gammas(traces.mut, traces.metal);
    data.step = traces.step;
    data.carrier = traces.chirp.effective_carrier();
    data.direction = direction;
    return data;
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t truth_index, std::size_t trial) noexcept
{
    return mix_seed(mix_seed(base, truth_index), trial);
}

namespace {

TrialRecord run_trial(const ComplexPermittivity& truth, std::size_t truth_index, std::size_t trial,
                      const NoiseModel& noise, const SweepOptions& options)
{
    TrialRecord rec;
    rec.truth_index = truth_index;
    rec.trial = trial;
    rec.seed = trial_seed(noise.seed, truth_index, trial);
    if (options.random_phase_offset) {
        Rng offset_rng(mix_seed(rec.seed, 0xC0FFEE));
        rec.true_phase_offset = offset_rng.uniform(-kPi, kPi);
    }
    NoiseModel trial_noise = noise;
    trial_noise.seed = rec.seed;

    const auto t0 = std::chrono::steady_clock::now();
    try {
        const auto data = generate_dataset(truth, rec.true_phase_offset, options.m_count, options.step,
                                           options.carrier, trial_noise);
        const auto fit = fit_permittivity(data, options.bounds, std::nullopt, options.fit);
        rec.ok = true;
        rec.a = fit.permittivity.real();
        rec.b = fit.permittivity.loss();
        rec.c = fit.phase_offset;
        rec.error_a = rec.a - truth.real();
        rec.error_b = rec.b - truth.loss();
        rec.error_c = wrap_phase(rec.c - rec.true_phase_offset);
        rec.residual_norm = fit.residual_norm;
        rec.iterations = fit.iterations;
        rec.converged = fit.converged;
    } catch (const Error& e) {
        rec.ok = false;
        rec.failure = e.what();
    }
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

template <typename Get>
MeanStd mean_std(const std::vector<const TrialRecord*>& recs, Get get)
{
    MeanStd out;
    if (recs.empty()) return out;
    for (const auto* r : recs) out.mean += get(*r);
    out.mean /= static_cast<double>(recs.size());
    if (recs.size() > 1) {
        double ss = 0.0;
        for (const auto* r : recs) {
            const double d = get(*r) - out.mean;
            ss += d * d;
        }
        out.std = std::sqrt(ss / static_cast<double>(recs.size() - 1));
    }
    return out;
}

} // namespace

std::vector<TruthSummary> summarize(const std::vector<ComplexPermittivity>& truths,
                                    const std::vector<TrialRecord>& records)
{
    std::vector<TruthSummary> out;
    out.reserve(truths.size());
    for (std::size_t i = 0; i < truths.size(); ++i) {
        TruthSummary s;
        s.truth = truths[i];
        std::vector<const TrialRecord*> good;
        double wall = 0.0;
        for (const auto& r : records) {
            if (r.truth_index != i) continue;
            ++s.trials;
            wall += r.wall_time_s;
            if (!r.ok) continue;
            ++s.succeeded;
            if (r.converged) ++s.converged;
            good.push_back(&r);
        }
        if (s.trials > 0) s.mean_wall_time_s = wall / static_cast<double>(s.trials);

        auto a = mean_std(good, [](const TrialRecord& r) { return r.a; });
        auto b = mean_std(good, [](const TrialRecord& r) { return r.b; });
        auto ea = mean_std(good, [](const TrialRecord& r) { return r.error_a; });
        auto eb = mean_std(good, [](const TrialRecord& r) { return r.error_b; });
        auto ec = mean_std(good, [](const TrialRecord& r) { return r.error_c; });
        s.mean_a = a.mean;
        s.std_a = a.std;
        s.mean_b = b.mean;
        s.std_b = b.std;
        s.mean_error_a = ea.mean;
        s.std_error_a = ea.std;
        s.mean_error_b = eb.mean;
        s.std_error_b = eb.std;
        s.mean_error_c = ec.mean;
        s.std_error_c = ec.std;
        s.mean_abs_error_a = mean_std(good, [](const TrialRecord& r) { return std::abs(r.error_a); }).mean;
        s.mean_abs_error_b = mean_std(good, [](const TrialRecord& r) { return std::abs(r.error_b); }).mean;
        s.mean_residual_norm = mean_std(good, [](const TrialRecord& r) { return r.residual_norm; }).mean;
        for (const auto* r : good)
            s.max_abs_error = std::max({s.max_abs_error, std::abs(r->error_a), std::abs(r->error_b),
                                        std::abs(r->error_c)});
        out.push_back(s);
    }
    return out;
}

BenchReport run_sweep(const std::vector<ComplexPermittivity>& truths, const NoiseModel& noise,
                      std::size_t trials, const SweepOptions& options)
{
    if (trials < 1) throw InvalidInputError("sweep needs at least one trial");
    if (truths.empty()) throw InvalidInputError("sweep needs at least one truth permittivity");
    noise.validate();

    BenchReport report;
    report.truths = truths;
    report.noise = noise;
    report.options = options;
    report.trials_per_truth = trials;

    const std::size_t total = truths.size() * trials;
    report.records.resize(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < total; job = next++) {
            const std::size_t i = job / trials;
            report.records[job] = run_trial(truths[i], i, job % trials, noise, options);
        }
    };

    unsigned n_threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, total));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
    }

    report.summaries = summarize(truths, report.records);
    return report;
}

} // namespace sdi
