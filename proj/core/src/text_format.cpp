#include "sdi/text_format.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sdi/errors.hpp"

namespace sdi {

namespace {

constexpr std::string_view kFormatName = "sdi-text";
constexpr std::string_view kVersion = "1";

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string join(const std::vector<std::string>& parts)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ' ';
        out += parts[i];
    }
    return out;
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

bool parse_bool(std::string_view text)
{
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw MalformedFileError("expected true/false, got '" + std::string(text) + "'");
}

std::uint64_t parse_unsigned(std::string_view text)
{
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw MalformedFileError("expected an unsigned integer, got '" + std::string(text) + "'");
    return value;
}

// Failure messages become one token.
std::string encode_token(const std::string& text)
{
    if (text.empty()) return "-";
    std::string out = text;
    std::replace_if(out.begin(), out.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }, '_');
    return out;
}

std::string decode_token(const std::string& token) { return token == "-" ? std::string{} : token; }

void require_mode(const TextTable& table, std::string_view mode)
{
    if (table.mode != mode)
        throw MalformedFileError("expected mode '" + std::string(mode) + "', file has '" + table.mode + "'");
}

void require_columns(const TextTable& table, const std::vector<std::string>& expected)
{
    if (table.columns != expected)
        throw MalformedFileError("unexpected column layout for mode '" + table.mode + "'");
}

constexpr const char* kDatasetKeys[] = {
    "carrier_hz", "step_m", "step_count", "stage_direction", "provenance",
    "chirp_start_frequency_hz", "chirp_bandwidth_hz", "chirp_duration_s", "chirp_sample_count",
    "chirp_sample_interval_s", "chirp_amplitude", "chirp_path_loss_re", "chirp_path_loss_im",
};

bool is_dataset_key(std::string_view key)
{
    return std::find(std::begin(kDatasetKeys), std::end(kDatasetKeys), key) != std::end(kDatasetKeys);
}

std::vector<std::string> raw_if_columns(std::size_t samples)
{
    std::vector<std::string> cols{"trace", "m"};
    for (std::size_t n = 0; n < samples; ++n) {
        cols.push_back("re_" + std::to_string(n));
        cols.push_back("im_" + std::to_string(n));
    }
    return cols;
}

const std::vector<std::string> kGammaColumns{"m", "re_gamma", "im_gamma"};
const std::vector<std::string> kReportColumns{"m", "displacement_m", "re_measured", "im_measured",
                                              "re_fitted", "im_fitted", "abs_measured", "abs_fitted",
                                              "phase_measured_rad", "phase_fitted_rad"};
const std::vector<std::string> kTrialColumns{"truth_index", "trial", "seed", "true_phase_offset_rad", "ok",
                                             "converged", "a", "b", "c", "error_a", "error_b", "error_c",
                                             "residual_norm", "iterations", "wall_time_s", "failure"};

} // namespace

std::string format_double(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw InvalidInputError("cannot format floating-point value");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text)
{
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw MalformedFileError("expected a number, got '" + std::string(text) + "'");
    return value;
}

long long parse_integer(std::string_view text)
{
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw MalformedFileError("expected an integer, got '" + std::string(text) + "'");
    return value;
}

void TextTable::set(const std::string& key, const std::string& value)
{
    for (auto& [k, v] : header) {
        if (k == key) {
            v = value;
            return;
        }
    }
    header.emplace_back(key, value);
}

const std::string* TextTable::find(std::string_view key) const
{
    for (const auto& [k, v] : header)
        if (k == key) return &v;
    return nullptr;
}

const std::string& TextTable::require(std::string_view key) const
{
    if (const auto* v = find(key)) return *v;
    throw MalformedFileError("missing header key '" + std::string(key) + "'");
}

double TextTable::require_double(std::string_view key) const { return parse_double(require(key)); }
long long TextTable::require_integer(std::string_view key) const { return parse_integer(require(key)); }

void write_table(std::ostream& out, const TextTable& table)
{
    out << "format: " << kFormatName << '\n';
    out << "version: " << kVersion << '\n';
    out << "mode: " << table.mode << '\n';
    for (const auto& [k, v] : table.header) out << k << ": " << v << '\n';
    out << "columns: " << join(table.columns) << '\n';
    out << "data:\n";
    for (const auto& row : table.rows) out << join(row) << '\n';
}

TextTable read_table(std::istream& in)
{
    TextTable table;
    bool saw_format = false, saw_version = false, saw_data = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim(line);
        if (!saw_data) {
            if (view.empty() || view.front() == '#') continue;
            const auto colon = view.find(':');
            if (colon == std::string_view::npos)
                throw MalformedFileError("line " + std::to_string(line_no) + ": expected 'key: value'");
            const std::string key(trim(view.substr(0, colon)));
            const std::string value(trim(view.substr(colon + 1)));
            if (key == "format") {
                if (value != kFormatName) throw MalformedFileError("unknown format '" + value + "'");
                saw_format = true;
            } else if (key == "version") {
                if (value != kVersion) throw MalformedFileError("unsupported version '" + value + "'");
                saw_version = true;
            } else if (key == "mode") {
                table.mode = value;
            } else if (key == "columns") {
                table.columns = split_ws(value);
            } else if (key == "data") {
                saw_data = true;
            } else {
                table.header.emplace_back(key, value);
            }
        } else {
            if (view.empty()) continue;
            auto tokens = split_ws(view);
            if (!table.columns.empty() && tokens.size() != table.columns.size())
                throw MalformedFileError("line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(table.columns.size()) + " fields, got " +
                                         std::to_string(tokens.size()));
            table.rows.push_back(std::move(tokens));
        }
    }
    if (!saw_format || !saw_version) throw MalformedFileError("missing format/version header");
    if (table.mode.empty()) throw MalformedFileError("missing mode");
    if (!saw_data) throw MalformedFileError("missing 'data:' marker");
    return table;
}

void write_table_file(const std::filesystem::path& path, const TextTable& table)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInputError("cannot open '" + path.string() + "' for writing");
    write_table(out, table);
    out.flush();
    if (!out) throw InvalidInputError("failed writing '" + path.string() + "'");
}

TextTable read_table_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open '" + path.string() + "' for reading");
    return read_table(in);
}

std::string to_string(DatasetMode mode)
{
    return mode == DatasetMode::Gamma ? "gamma" : "raw-if";
}

TextTable to_table(const DatasetFile& file)
{
    TextTable t;
    t.mode = to_string(file.mode);
    t.set("carrier_hz", file.carrier_hz);
    t.set("step_m", file.step_m);
    t.set("step_count", std::to_string(file.step_count));
    t.set("stage_direction", std::to_string(file.stage_direction));
    if (!file.provenance.empty()) t.set("provenance", file.provenance);
    if (file.chirp) {
        const auto& c = *file.chirp;
        t.set("chirp_start_frequency_hz", c.start_frequency);
        t.set("chirp_bandwidth_hz", c.bandwidth);
        t.set("chirp_duration_s", c.chirp_duration);
        t.set("chirp_sample_count", std::to_string(c.sample_count));
        t.set("chirp_sample_interval_s", c.sample_interval);
        t.set("chirp_amplitude", c.amplitude);
        t.set("chirp_path_loss_re", c.path_loss.real());
        t.set("chirp_path_loss_im", c.path_loss.imag());
    }
    for (const auto& [k, v] : file.extra) t.set(k, v);

    if (file.mode == DatasetMode::Gamma) {
        t.columns = kGammaColumns;
        for (std::size_t m = 0; m < file.gammas.size(); ++m)
            t.rows.push_back({std::to_string(m), format_double(file.gammas[m].real()),
                              format_double(file.gammas[m].imag())});
    } else {
        const std::size_t n = file.mut_trace.samples.size();
        t.columns = raw_if_columns(n);
        auto row_of = [](std::string role, std::size_t m, const IfTrace& trace) {
            std::vector<std::string> row{std::move(role), std::to_string(m)};
            for (const auto& z : trace.samples) {
                row.push_back(format_double(z.real()));
                row.push_back(format_double(z.imag()));
            }
            return row;
        };
        t.rows.push_back(row_of("mut", 0, file.mut_trace));
        for (std::size_t m = 0; m < file.metal_traces.size(); ++m)
            t.rows.push_back(row_of("metal", m, file.metal_traces[m]));
    }
    return t;
}

DatasetFile dataset_from_table(const TextTable& t)
{
    DatasetFile f;
    if (t.mode == "gamma")
        f.mode = DatasetMode::Gamma;
    else if (t.mode == "raw-if")
        f.mode = DatasetMode::RawIf;
    else
        throw MalformedFileError("not a dataset file (mode '" + t.mode + "')");

    f.carrier_hz = t.require_double("carrier_hz");
    f.step_m = t.require_double("step_m");
    const long long count = t.require_integer("step_count");
    if (count < 0) throw MalformedFileError("step_count must be >= 0");
    f.step_count = static_cast<std::size_t>(count);
    if (const auto* dir = t.find("stage_direction")) {
        const long long d = parse_integer(*dir);
        if (d != 1 && d != -1) throw MalformedFileError("stage_direction must be 1 or -1");
        f.stage_direction = static_cast<int>(d);
    }
    if (const auto* p = t.find("provenance")) f.provenance = *p;
    if (t.find("chirp_start_frequency_hz")) {
        ChirpConfig c;
        c.start_frequency = t.require_double("chirp_start_frequency_hz");
        c.bandwidth = t.require_double("chirp_bandwidth_hz");
        c.chirp_duration = t.require_double("chirp_duration_s");
        const long long n = t.require_integer("chirp_sample_count");
        if (n < 2) throw MalformedFileError("chirp_sample_count must be >= 2");
        c.sample_count = static_cast<std::size_t>(n);
        c.sample_interval = t.require_double("chirp_sample_interval_s");
        c.amplitude = t.require_double("chirp_amplitude");
        c.path_loss = {t.require_double("chirp_path_loss_re"), t.require_double("chirp_path_loss_im")};
        f.chirp = c;
    }
    for (const auto& [k, v] : t.header)
        if (!is_dataset_key(k)) f.extra.emplace_back(k, v);

    if (f.mode == DatasetMode::Gamma) {
        require_columns(t, kGammaColumns);
        if (t.rows.size() != f.step_count)
            throw MalformedFileError("record count " + std::to_string(t.rows.size()) + " does not match step_count " +
                                     std::to_string(f.step_count));
        for (std::size_t m = 0; m < t.rows.size(); ++m) {
            const auto& row = t.rows[m];
            if (parse_integer(row[0]) != static_cast<long long>(m))
                throw MalformedFileError("records must be ordered m = 0..M-1");
            f.gammas.emplace_back(parse_double(row[1]), parse_double(row[2]));
        }
        return f;
    }

    if (!f.chirp) throw MalformedFileError("raw-if file lacks chirp parameters");
    const std::size_t n = f.chirp->sample_count;
    require_columns(t, raw_if_columns(n));
    if (t.rows.size() != f.step_count + 1)
        throw MalformedFileError("raw-if file needs 1 mut trace and " + std::to_string(f.step_count) +
                                 " metal traces, found " + std::to_string(t.rows.size()) + " rows");
    auto parse_trace = [n](const std::vector<std::string>& row) {
        IfTrace trace;
        trace.samples.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            trace.samples.emplace_back(parse_double(row[2 + 2 * i]), parse_double(row[3 + 2 * i]));
        return trace;
    };
    bool have_mut = false;
    for (const auto& row : t.rows) {
        if (row[0] == "mut") {
            if (have_mut) throw MalformedFileError("more than one mut trace");
            have_mut = true;
            f.mut_trace = parse_trace(row);
        } else if (row[0] == "metal") {
            if (parse_integer(row[1]) != static_cast<long long>(f.metal_traces.size()))
                throw MalformedFileError("metal traces must be ordered m = 0..M-1");
            f.metal_traces.push_back(parse_trace(row));
        } else {
            throw MalformedFileError("unknown trace role '" + row[0] + "'");
        }
    }
    if (!have_mut) throw MalformedFileError("raw-if file has no mut trace");
    return f;
}

void write_dataset(std::ostream& out, const DatasetFile& file) { write_table(out, to_table(file)); }
DatasetFile read_dataset(std::istream& in) { return dataset_from_table(read_table(in)); }

void write_dataset_file(const std::filesystem::path& path, const DatasetFile& file)
{
    write_table_file(path, to_table(file));
}

DatasetFile read_dataset_file(const std::filesystem::path& path)
{
    return dataset_from_table(read_table_file(path));
}

DatasetFile make_gamma_file(const SdiDataset& data, std::string provenance)
{
    DatasetFile f;
    f.mode = DatasetMode::Gamma;
    f.carrier_hz = data.carrier;
    f.step_m = data.step;
    f.step_count = data.gammas.size();
    f.stage_direction = data.direction;
    f.provenance = std::move(provenance);
    f.gammas = data.gammas;
    return f;
}

DatasetFile make_raw_if_file(const IfDatasets& traces, double carrier_hz, std::string provenance)
{
    DatasetFile f;
    f.mode = DatasetMode::RawIf;
    f.carrier_hz = carrier_hz;
    f.step_m = traces.step;
    f.step_count = traces.metal.size();
    f.provenance = std::move(provenance);
    f.chirp = traces.chirp;
    f.mut_trace = traces.mut;
    f.metal_traces = traces.metal;
    return f;
}

SdiDataset to_sdi_dataset(const DatasetFile& file)
{
    if (file.mode != DatasetMode::Gamma) throw MalformedFileError("expected a gamma-mode dataset");
    SdiDataset data;
    data.gammas = file.gammas;
    data.step = file.step_m;
    data.carrier = file.carrier_hz;
    data.direction = file.stage_direction;
    return data;
}

IfDatasets to_if_datasets(const DatasetFile& file)
{
    if (file.mode != DatasetMode::RawIf || !file.chirp) throw MalformedFileError("expected a raw-if dataset");
    IfDatasets traces;
    traces.chirp = *file.chirp;
    traces.step = file.step_m;
    traces.mut = file.mut_trace;
    traces.metal = file.metal_traces;
    return traces;
}

FitReport make_fit_report(const SdiDataset& data, const FitResult& fit)
{
    FitReport r;
    r.carrier_hz = data.carrier;
    r.step_m = data.step;
    r.stage_direction = data.direction;
    r.fit = fit;
    const double phase_step = data.phase_step();
    for (std::size_t m = 0; m < data.gammas.size(); ++m) {
        r.curve.push_back({m, static_cast<double>(m) * data.step, data.gammas[m],
                           model_gamma(fit.permittivity.real(), fit.permittivity.loss(), fit.phase_offset,
                                       static_cast<double>(m), phase_step)});
    }
    return r;
}

TextTable to_table(const FitReport& r)
{
    TextTable t;
    t.mode = "fit-report";
    t.set("carrier_hz", r.carrier_hz);
    t.set("step_m", r.step_m);
    t.set("stage_direction", std::to_string(r.stage_direction));
    t.set("step_count", std::to_string(r.curve.size()));
    t.set("eps_real", r.fit.permittivity.real());
    t.set("eps_loss", r.fit.permittivity.loss());
    t.set("phase_offset_rad", r.fit.phase_offset);
    t.set("residual_norm", r.fit.residual_norm);
    t.set("iterations", std::to_string(r.fit.iterations));
    t.set("converged", bool_text(r.fit.converged));
    t.set("status", to_string(r.fit.status));
    t.set("start_index", std::to_string(r.fit.start_index));
    std::vector<std::string> cov;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) cov.push_back(format_double(r.fit.covariance_proxy(i, j)));
    t.set("covariance_proxy", join(cov));
    t.columns = kReportColumns;
    for (const auto& row : r.curve) {
        t.rows.push_back({std::to_string(row.m), format_double(row.displacement_m),
                          format_double(row.measured.real()), format_double(row.measured.imag()),
                          format_double(row.fitted.real()), format_double(row.fitted.imag()),
                          format_double(std::abs(row.measured)), format_double(std::abs(row.fitted)),
                          format_double(std::arg(row.measured)), format_double(std::arg(row.fitted))});
    }
    return t;
}

FitReport fit_report_from_table(const TextTable& t)
{
    require_mode(t, "fit-report");
    require_columns(t, kReportColumns);
    FitReport r;
    r.carrier_hz = t.require_double("carrier_hz");
    r.step_m = t.require_double("step_m");
    r.stage_direction = static_cast<int>(t.require_integer("stage_direction"));
    r.fit.permittivity = ComplexPermittivity(t.require_double("eps_real"), t.require_double("eps_loss"));
    r.fit.phase_offset = t.require_double("phase_offset_rad");
    r.fit.residual_norm = t.require_double("residual_norm");
    r.fit.iterations = static_cast<int>(t.require_integer("iterations"));
    r.fit.converged = parse_bool(t.require("converged"));
    const auto& status = t.require("status");
    if (status == "gradient-tolerance")
        r.fit.status = LsqStatus::GradientTolerance;
    else if (status == "step-tolerance")
        r.fit.status = LsqStatus::StepTolerance;
    else
        r.fit.status = LsqStatus::IterationLimit;
    r.fit.start_index = static_cast<std::size_t>(t.require_integer("start_index"));
    const auto cov = split_ws(t.require("covariance_proxy"));
    if (cov.size() != 9) throw MalformedFileError("covariance_proxy needs 9 values");
    for (int i = 0; i < 9; ++i) r.fit.covariance_proxy(i / 3, i % 3) = parse_double(cov[static_cast<std::size_t>(i)]);
    for (const auto& row : t.rows) {
        r.curve.push_back({static_cast<std::size_t>(parse_integer(row[0])), parse_double(row[1]),
                           {parse_double(row[2]), parse_double(row[3])},
                           {parse_double(row[4]), parse_double(row[5])}});
    }
    return r;
}

TextTable curve_table(const ComplexPermittivity& eps, std::size_t m_count, double step_m, double carrier_hz,
                      double phase_offset)
{
    SdiDataset sweep;
    sweep.step = step_m;
    sweep.carrier = carrier_hz;
    const double phase_step = sweep.phase_step();

    TextTable t;
    t.mode = "curve";
    t.set("eps_real", eps.real());
    t.set("eps_loss", eps.loss());
    t.set("phase_offset_rad", phase_offset);
    t.set("carrier_hz", carrier_hz);
    t.set("step_m", step_m);
    t.set("step_count", std::to_string(m_count));
    t.columns = {"m", "displacement_m", "re_gamma", "im_gamma", "abs_gamma", "phase_rad"};
    for (std::size_t m = 0; m < m_count; ++m) {
        const Complex g = model_gamma(eps.real(), eps.loss(), phase_offset, static_cast<double>(m), phase_step);
        t.rows.push_back({std::to_string(m), format_double(static_cast<double>(m) * step_m), format_double(g.real()),
                          format_double(g.imag()), format_double(std::abs(g)), format_double(std::arg(g))});
    }
    return t;
}

namespace {

void set_sweep_header(TextTable& t, const BenchReport& report)
{
    t.set("truth_count", std::to_string(report.truths.size()));
    t.set("trials_per_truth", std::to_string(report.trials_per_truth));
    t.set("noise_amplitude_rel_sigma", report.noise.amplitude_rel_sigma);
    t.set("noise_phase_sigma_rad", report.noise.phase_sigma);
    t.set("noise_amplitude_drift_rel", report.noise.amplitude_drift_rel);
    t.set("seed", std::to_string(report.noise.seed));
    t.set("step_count", std::to_string(report.options.m_count));
    t.set("step_m", report.options.step);
    t.set("carrier_hz", report.options.carrier);
    t.set("random_phase_offset", bool_text(report.options.random_phase_offset));
}

} // namespace

TextTable bench_summary_table(const BenchReport& report)
{
    TextTable t;
    t.mode = "bench-summary";
    set_sweep_header(t, report);
    t.columns = {"truth_index", "eps_real", "eps_loss", "trials", "succeeded", "converged",
                 "mean_a", "std_a", "mean_b", "std_b", "mean_error_a", "std_error_a",
                 "mean_error_b", "std_error_b", "mean_error_c", "std_error_c",
                 "mean_abs_error_a", "mean_abs_error_b", "max_abs_error", "mean_residual_norm",
                 "mean_wall_time_s"};
    for (std::size_t i = 0; i < report.summaries.size(); ++i) {
        const auto& s = report.summaries[i];
        t.rows.push_back({std::to_string(i), format_double(s.truth.real()), format_double(s.truth.loss()),
                          std::to_string(s.trials), std::to_string(s.succeeded), std::to_string(s.converged),
                          format_double(s.mean_a), format_double(s.std_a), format_double(s.mean_b),
                          format_double(s.std_b), format_double(s.mean_error_a), format_double(s.std_error_a),
                          format_double(s.mean_error_b), format_double(s.std_error_b),
                          format_double(s.mean_error_c), format_double(s.std_error_c),
                          format_double(s.mean_abs_error_a), format_double(s.mean_abs_error_b),
                          format_double(s.max_abs_error), format_double(s.mean_residual_norm),
                          format_double(s.mean_wall_time_s)});
    }
    return t;
}

TextTable bench_trials_table(const BenchReport& report)
{
    TextTable t;
    t.mode = "bench-trials";
    set_sweep_header(t, report);
    t.columns = kTrialColumns;
    for (const auto& r : report.records) {
        t.rows.push_back({std::to_string(r.truth_index), std::to_string(r.trial), std::to_string(r.seed),
                          format_double(r.true_phase_offset), bool_text(r.ok), bool_text(r.converged),
                          format_double(r.a), format_double(r.b), format_double(r.c), format_double(r.error_a),
                          format_double(r.error_b), format_double(r.error_c), format_double(r.residual_norm),
                          std::to_string(r.iterations), format_double(r.wall_time_s), encode_token(r.failure)});
    }
    return t;
}

std::vector<TrialRecord> trials_from_table(const TextTable& t)
{
    require_mode(t, "bench-trials");
    require_columns(t, kTrialColumns);
    std::vector<TrialRecord> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        TrialRecord r;
        r.truth_index = static_cast<std::size_t>(parse_unsigned(row[0]));
        r.trial = static_cast<std::size_t>(parse_unsigned(row[1]));
        r.seed = parse_unsigned(row[2]);
        r.true_phase_offset = parse_double(row[3]);
        r.ok = parse_bool(row[4]);
        r.converged = parse_bool(row[5]);
        r.a = parse_double(row[6]);
        r.b = parse_double(row[7]);
        r.c = parse_double(row[8]);
        r.error_a = parse_double(row[9]);
        r.error_b = parse_double(row[10]);
        r.error_c = parse_double(row[11]);
        r.residual_norm = parse_double(row[12]);
        r.iterations = static_cast<int>(parse_integer(row[13]));
        r.wall_time_s = parse_double(row[14]);
        r.failure = decode_token(row[15]);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace sdi
