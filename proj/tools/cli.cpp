#include "cli.hpp"

#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "sdi/em.hpp"
#include "sdi/errors.hpp"
#include "sdi/estimator.hpp"
#include "sdi/fmcw.hpp"
#include "sdi/synth.hpp"
#include "sdi/text_format.hpp"

namespace sdi::cli {

namespace fs = std::filesystem;

FarFieldVerdict far_field_verdict(double standoff_m, double fraunhofer_m)
{
    if (standoff_m >= 2.0 * fraunhofer_m) return FarFieldVerdict::Pass;
    if (standoff_m >= fraunhofer_m) return FarFieldVerdict::Warn;
    return FarFieldVerdict::Fail;
}

std::string to_string(FarFieldVerdict verdict)
{
    switch (verdict) {
    case FarFieldVerdict::Pass: return "pass";
    case FarFieldVerdict::Warn: return "warn";
    case FarFieldVerdict::Fail: return "fail";
    }
    return "unknown";
}

namespace {

struct NoiseFlags {
    double amplitude_rel_sigma = 0.0;
    double phase_sigma_rad = 0.0;
    double amplitude_drift_rel = 0.0;
    std::uint64_t seed = 0;

    void add_to(CLI::App& app)
    {
        app.add_option("--noise-amplitude-rel-sigma", amplitude_rel_sigma, "Relative amplitude jitter (sigma)")
            ->check(CLI::NonNegativeNumber);
        app.add_option("--noise-phase-sigma-rad", phase_sigma_rad, "Phase jitter in radians (sigma)")
            ->check(CLI::NonNegativeNumber);
        app.add_option("--noise-amplitude-drift-rel", amplitude_drift_rel,
                       "Linear amplitude decrease across the sweep, end to end")
            ->check(CLI::NonNegativeNumber);
        app.add_option("--seed", seed, "Random seed");
    }

    NoiseModel model() const { return {amplitude_rel_sigma, phase_sigma_rad, amplitude_drift_rel, seed}; }
};

struct SweepFlags {
    std::size_t step_count = 40;
    double step_m = 1e-4;
    double carrier_hz = 79e9;

    void add_to(CLI::App& app)
    {
        app.add_option("--step-count", step_count, "Number of distance steps M")->check(CLI::PositiveNumber);
        app.add_option("--step-m", step_m, "Distance increment in metres")->check(CLI::PositiveNumber);
        app.add_option("--carrier-hz", carrier_hz, "Carrier frequency of the per-step phase, Hz")
            ->check(CLI::PositiveNumber);
    }
};

// ---------------------------------------------------------------- simulate

struct SimulateFlags {
    double eps_real = 2.60;
    double eps_loss = 0.1;
    double phase_offset_rad = 0.0;
    int stage_direction = 1;
    SweepFlags sweep;
    NoiseFlags noise;
    std::string mode = "gamma";
    std::string output;
    // raw-if only
    double thickness_m = 0.02;
    double standoff_m = 0.25;
    std::string backing = "air";
    std::size_t bounces = 1;
    double mut_offset_m = 0.0;
    double aperture_m = 0.015;
    std::string chirp_preset = "narrowband";
    ChirpConfig chirp;
};

void add_chirp_options(CLI::App& cmd, SimulateFlags& f)
{
    cmd.add_option("--chirp-preset", f.chirp_preset, "Chirp defaults: narrowband (CW limit) or wideband (77-81 GHz)")
        ->check(CLI::IsMember({"narrowband", "wideband"}));
    cmd.add_option("--chirp-start-frequency-hz", f.chirp.start_frequency, "Chirp start frequency (default: carrier)");
    cmd.add_option("--chirp-bandwidth-hz", f.chirp.bandwidth, "Chirp bandwidth B");
    cmd.add_option("--chirp-duration-s", f.chirp.chirp_duration, "Chirp duration Tc");
    cmd.add_option("--chirp-sample-count", f.chirp.sample_count, "Samples per chirp N");
    cmd.add_option("--chirp-sample-interval-s", f.chirp.sample_interval, "Sample interval dt");
    cmd.add_option("--chirp-amplitude", f.chirp.amplitude, "Transmit amplitude A0");
}

ChirpConfig resolve_chirp(const CLI::App& cmd, const SimulateFlags& f)
{
    ChirpConfig cfg = f.chirp_preset == "wideband" ? ChirpConfig::wideband() : ChirpConfig::narrowband();
    if (f.chirp_preset == "narrowband") cfg.start_frequency = f.sweep.carrier_hz;
    auto given = [&](const char* name) { return cmd.count(name) > 0; };
    if (given("--chirp-start-frequency-hz")) cfg.start_frequency = f.chirp.start_frequency;
    if (given("--chirp-bandwidth-hz")) cfg.bandwidth = f.chirp.bandwidth;
    if (given("--chirp-duration-s")) cfg.chirp_duration = f.chirp.chirp_duration;
    if (given("--chirp-sample-count")) cfg.sample_count = f.chirp.sample_count;
    if (given("--chirp-sample-interval-s")) cfg.sample_interval = f.chirp.sample_interval;
    if (given("--chirp-amplitude")) cfg.amplitude = f.chirp.amplitude;
    cfg.validate();
    return cfg;
}

Backing parse_backing(const std::string& text)
{
    if (text == "metal") return MetalBacking{};
    if (text == "air") return ComplexPermittivity::air();
    // "a,b" for a dielectric eps = a - jb
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw InvalidInputError("--backing must be metal, air or 'a,b'");
    return ComplexPermittivity(parse_double(text.substr(0, comma)), parse_double(text.substr(comma + 1)));
}

std::string describe(const ComplexPermittivity& eps)
{
    std::ostringstream os;
    os << format_double(eps.real()) << " - j" << format_double(eps.loss());
    return os.str();
}

int do_simulate(const CLI::App& cmd, const SimulateFlags& f, std::ostream& out, std::ostream& err)
{
    const ComplexPermittivity truth(f.eps_real, f.eps_loss);
    const NoiseModel noise = f.noise.model();
    if (f.stage_direction != 1 && f.stage_direction != -1)
        throw InvalidInputError("--stage-direction must be 1 or -1");

    std::ostringstream prov;
    prov << "simulate eps=" << describe(truth) << " phase_offset_rad=" << format_double(f.phase_offset_rad)
         << " seed=" << noise.seed;

    DatasetFile file;
    if (f.mode == "gamma") {
        const auto data = generate_dataset(truth, f.phase_offset_rad, f.sweep.step_count, f.sweep.step_m,
                                           f.sweep.carrier_hz, noise, f.stage_direction);
        file = make_gamma_file(data, prov.str());
    } else {
        if (f.stage_direction != 1) throw InvalidInputError("raw-if simulation always steps the metal backwards");
        const ChirpConfig cfg = resolve_chirp(cmd, f);
        const SlabGeometry geom(f.thickness_m, f.standoff_m, parse_backing(f.backing));
        IfOptions opts;
        opts.bounces = f.bounces;
        opts.phase_offset = f.phase_offset_rad;
        opts.mut_delay_offset = 2.0 * f.mut_offset_m / kSpeedOfLight;
        opts.aperture = f.aperture_m;
        const auto traces = generate_if_datasets(truth, geom, cfg, f.sweep.step_count, f.sweep.step_m, noise, opts);
        for (const auto& w : traces.warnings) err << "warning: " << w << '\n';
        file = make_raw_if_file(traces, cfg.effective_carrier(), prov.str());
    }
    file.extra.emplace_back("truth_eps_real", format_double(truth.real()));
    file.extra.emplace_back("truth_eps_loss", format_double(truth.loss()));
    file.extra.emplace_back("truth_phase_offset_rad", format_double(f.phase_offset_rad));
    write_dataset_file(f.output, file);
    out << "wrote " << to_string(file.mode) << " dataset with " << file.step_count << " steps to " << f.output << '\n';
    return 0;
}

// ---------------------------------------------------------------- extract

int do_extract(const std::string& input, const std::string& output, std::ostream& out)
{
    const DatasetFile raw = read_dataset_file(input);
    if (raw.mode != DatasetMode::RawIf) throw MalformedFileError("extract expects a raw-if dataset");
    const SdiDataset data = extract_dataset(to_if_datasets(raw), raw.stage_direction);
    DatasetFile file = make_gamma_file(data, "extract of " + fs::path(input).filename().string());
    for (const auto& kv : raw.extra) file.extra.push_back(kv);
    write_dataset_file(output, file);
    out << "extracted " << data.gammas.size() << " calibrated reflections to " << output << '\n';
    return 0;
}

// ---------------------------------------------------------------- estimate

struct EstimateFlags {
    std::string input;
    std::string report;
    FitBounds bounds;
    int max_iterations = 500;
    std::vector<std::string> starts;
};

FitParams parse_start(const std::string& text)
{
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        v.push_back(parse_double(text.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (v.size() != 3) throw InvalidInputError("--start expects a,b,c");
    return {v[0], v[1], v[2]};
}

int do_estimate(const EstimateFlags& f, std::ostream& out)
{
    const DatasetFile file = read_dataset_file(f.input);
    const SdiDataset data = to_sdi_dataset(file);
    std::optional<std::vector<FitParams>> starts;
    if (!f.starts.empty()) {
        starts.emplace();
        for (const auto& s : f.starts) starts->push_back(parse_start(s));
    }
    FitOptions opts;
    opts.max_iterations = f.max_iterations;
    const FitResult fit = fit_permittivity(data, f.bounds, starts, opts);
    const auto slope = phase_slope_diagnostic(data);

    out << std::setprecision(10);
    out << "permittivity: " << fit.permittivity.real() << " - j" << fit.permittivity.loss() << '\n';
    out << "eps_real: " << fit.permittivity.real() << '\n';
    out << "eps_loss: " << fit.permittivity.loss() << '\n';
    out << "phase_offset_rad: " << fit.phase_offset << '\n';
    out << "residual_norm: " << fit.residual_norm << '\n';
    out << "iterations: " << fit.iterations << '\n';
    out << "converged: " << (fit.converged ? "true" : "false") << " (" << to_string(fit.status) << ")\n";
    if (slope.degenerate)
        out << "phase_slope: degenerate (constant phase)\n";
    else
        out << "phase_slope_deg_per_mm: " << slope.slope_deg_per_mm << " (R^2 " << slope.r_squared << ")\n";

    if (!f.report.empty()) {
        write_table_file(f.report, to_table(make_fit_report(data, fit)));
        out << "report: " << f.report << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- check-farfield

struct FarFieldFlags {
    double aperture_m = 0.0;
    double wavelength_m = 0.0;
    double frequency_hz = 0.0;
    double standoff_m = 0.0;
};

int do_check_farfield(const FarFieldFlags& f, std::ostream& out)
{
    double lambda = f.wavelength_m;
    if (lambda <= 0.0) {
        if (f.frequency_hz <= 0.0) throw InvalidInputError("give --wavelength-m or --frequency-hz");
        lambda = wavelength(f.frequency_hz);
    }
    if (!(f.standoff_m > 0.0)) throw InvalidInputError("--standoff-m must be > 0");
    const double d_f = fraunhofer_distance(f.aperture_m, lambda);
    const auto verdict = far_field_verdict(f.standoff_m, d_f);
    out << std::setprecision(10);
    out << "fraunhofer_distance_m: " << d_f << '\n';
    out << "standoff_m: " << f.standoff_m << '\n';
    out << "standoff_over_fraunhofer: " << f.standoff_m / d_f << '\n';
    out << "verdict: " << to_string(verdict) << '\n';
    return 0;
}

// ---------------------------------------------------------------- report

struct ReportFlags {
    std::vector<std::string> truths;
    bool example_materials = false;
    std::size_t trials = 1;
    SweepFlags sweep;
    NoiseFlags noise;
    std::string output_dir;
    unsigned threads = 0;
    bool fixed_phase_offset = false;
};

ComplexPermittivity parse_truth(const std::string& text)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw InvalidInputError("--truth expects a,b (eps = a - jb)");
    return {parse_double(text.substr(0, comma)), parse_double(text.substr(comma + 1))};
}

int do_report(const ReportFlags& f, std::ostream& out)
{
    std::vector<ComplexPermittivity> truths;
    if (f.example_materials) truths = {{2.0, 0.1}, {3.0, 0.15}, {7.0, 0.3}};
    for (const auto& t : f.truths) truths.push_back(parse_truth(t));
    if (truths.empty()) throw InvalidInputError("no truth permittivities given (use --truth a,b)");
    if (f.trials < 1) throw InvalidInputError("--trials must be >= 1");

    SweepOptions opts;
    opts.m_count = f.sweep.step_count;
    opts.step = f.sweep.step_m;
    opts.carrier = f.sweep.carrier_hz;
    opts.threads = f.threads;
    opts.random_phase_offset = !f.fixed_phase_offset;
    const BenchReport report = run_sweep(truths, f.noise.model(), f.trials, opts);

    const fs::path dir(f.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InvalidInputError("cannot create output directory '" + dir.string() + "'");
    write_table_file(dir / "summary.sdi", bench_summary_table(report));
    write_table_file(dir / "trials.sdi", bench_trials_table(report));
    for (std::size_t i = 0; i < truths.size(); ++i)
        write_table_file(dir / ("curve_" + std::to_string(i) + ".sdi"),
                         curve_table(truths[i], opts.m_count, opts.step, opts.carrier));

    out << std::setprecision(6);
    out << std::left << std::setw(18) << "truth" << std::setw(8) << "ok" << std::setw(14) << "mean eps'"
        << std::setw(14) << "std eps'" << std::setw(14) << "mean eps''" << std::setw(14) << "std eps''"
        << std::setw(14) << "max |err|" << '\n';
    for (const auto& s : report.summaries) {
        std::ostringstream ok;
        ok << s.converged << '/' << s.trials;
        out << std::setw(18) << describe(s.truth) << std::setw(8) << ok.str() << std::setw(14) << s.mean_a
            << std::setw(14) << s.std_a << std::setw(14) << s.mean_b << std::setw(14) << s.std_b << std::setw(14)
            << s.max_abs_error << '\n';
    }
    out << "wrote " << (dir / "summary.sdi").string() << ", trials.sdi and " << truths.size() << " curve files\n";
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Complex permittivity from small-distance-increment radar sweeps", "sdi"};
    app.require_subcommand(1);

    SimulateFlags sim;
    auto* simulate = app.add_subcommand("simulate", "Write a synthetic dataset (gamma or raw-if mode)");
    simulate->add_option("--eps-real", sim.eps_real, "True eps' (>= 1)");
    simulate->add_option("--eps-loss", sim.eps_loss, "True eps'' (>= 0), eps = eps' - j eps''");
    simulate->add_option("--phase-offset-rad", sim.phase_offset_rad, "Systematic phase offset");
    simulate->add_option("--stage-direction", sim.stage_direction, "+1 (metal moved backwards) or -1");
    sim.sweep.add_to(*simulate);
    sim.noise.add_to(*simulate);
    simulate->add_option("--mode", sim.mode, "gamma or raw-if")->check(CLI::IsMember({"gamma", "raw-if"}));
    simulate->add_option("--output,-o", sim.output, "Output file")->required();
    simulate->add_option("--thickness-m", sim.thickness_m, "Slab thickness (raw-if)");
    simulate->add_option("--standoff-m", sim.standoff_m, "Radar to slab distance (raw-if)");
    simulate->add_option("--backing", sim.backing, "metal, air or 'a,b' (raw-if)");
    simulate->add_option("--bounces", sim.bounces, "Echoes synthesised for the slab (raw-if)")->check(CLI::PositiveNumber);
    simulate->add_option("--mut-offset-m", sim.mut_offset_m, "MUT position error relative to the metal (raw-if)");
    simulate->add_option("--aperture-m", sim.aperture_m, "Antenna aperture for the far-field warning (raw-if)");
    add_chirp_options(*simulate, sim);

    std::string extract_in, extract_out;
    auto* extract = app.add_subcommand("extract", "Raw IF traces to calibrated reflections");
    extract->add_option("--input,-i", extract_in, "raw-if dataset")->required();
    extract->add_option("--output,-o", extract_out, "gamma dataset to write")->required();

    EstimateFlags est;
    auto* estimate = app.add_subcommand("estimate", "Fit eps' - j eps'' and the phase offset to a gamma dataset");
    estimate->add_option("--input,-i", est.input, "gamma dataset")->required();
    estimate->add_option("--report,-r", est.report, "Fit report with measured and fitted curves");
    estimate->add_option("--a-max", est.bounds.a_max, "Upper bound on eps'");
    estimate->add_option("--b-max", est.bounds.b_max, "Upper bound on eps''");
    estimate->add_option("--max-iterations", est.max_iterations, "Iteration cap per start")->check(CLI::PositiveNumber);
    estimate->add_option("--start", est.starts, "Start point a,b,c (repeatable; default: built-in grid)");

    FarFieldFlags ff;
    auto* farfield = app.add_subcommand(
        "check-farfield",
        "Compare a standoff with the Fraunhofer distance 2D^2/lambda. Verdict bands are a convention of this "
        "tool: pass >= 2 d_F, warn in [d_F, 2 d_F), fail below d_F.");
    farfield->add_option("--aperture-m", ff.aperture_m, "Antenna aperture D")->required()->check(CLI::PositiveNumber);
    auto* wl = farfield->add_option("--wavelength-m", ff.wavelength_m, "Wavelength")->check(CLI::PositiveNumber);
    auto* fq = farfield->add_option("--frequency-hz", ff.frequency_hz, "Frequency (alternative to wavelength)")
                   ->check(CLI::PositiveNumber);
    wl->excludes(fq);
    farfield->add_option("--standoff-m", ff.standoff_m, "Radar to target distance")->required()->check(CLI::PositiveNumber);

    ReportFlags rep;
    auto* report = app.add_subcommand("report", "Monte-Carlo sweep over materials with tables and curve files");
    report->add_option("--truth", rep.truths, "True permittivity a,b (repeatable)");
    report->add_flag("--example-materials", rep.example_materials, "Add 2-j0.1, 3-j0.15 and 7-j0.3");
    report->add_option("--trials", rep.trials, "Trials per material");
    rep.sweep.add_to(*report);
    rep.noise.add_to(*report);
    report->add_flag("--fixed-phase-offset", rep.fixed_phase_offset, "Use phase offset 0 instead of random");
    report->add_option("--threads", rep.threads, "Worker threads (0: all cores)");
    report->add_option("--output-dir,-o", rep.output_dir, "Directory for summary, trials and curves")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : exit_code(ErrorKind::InvalidInput);
    }

    try {
        if (*simulate) return do_simulate(*simulate, sim, out, err);
        if (*extract) return do_extract(extract_in, extract_out, out);
        if (*estimate) return do_estimate(est, out);
        if (*farfield) return do_check_farfield(ff, out);
        if (*report) return do_report(rep, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(ErrorKind::NumericalFailure);
    }
    return exit_code(ErrorKind::InvalidInput);
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

} // namespace sdi::cli
