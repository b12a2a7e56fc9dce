#pragma once

// Self-describing text files shared by every artefact the tool reads or writes.
//
//   # optional comment lines
//   format: sdi-text
//   version: 1
//   mode: <gamma | raw-if | fit-report | bench-summary | bench-trials | curve>
//   <key>: <value>              one per line, units in the key name (_hz, _m, _s, _rad)
//   columns: <name> <name> ...
//   data:
//   <whitespace-separated row>  one per record, fixed column order
//
// Floating-point values are written in shortest round-trip decimal form, so a
// write/read cycle reproduces every double bit for bit.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdi/constants.hpp"
#include "sdi/estimator.hpp"
#include "sdi/fmcw.hpp"
#include "sdi/synth.hpp"

namespace sdi {

std::string format_double(double value);
double parse_double(std::string_view text);          // throws MalformedFileError
long long parse_integer(std::string_view text);      // throws MalformedFileError

/// Generic envelope: ordered header keys, column names and raw row tokens.
struct TextTable {
    std::string mode;
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value) { set(key, format_double(value)); }
    const std::string* find(std::string_view key) const;
    const std::string& require(std::string_view key) const;  // throws MalformedFileError
    double require_double(std::string_view key) const;
    long long require_integer(std::string_view key) const;
};

void write_table(std::ostream& out, const TextTable& table);
TextTable read_table(std::istream& in);

/// Write to a path; throws InvalidInputError if the file cannot be written.
void write_table_file(const std::filesystem::path& path, const TextTable& table);
/// Read from a path; throws InvalidInputError if missing, MalformedFileError if bad.
TextTable read_table_file(const std::filesystem::path& path);

enum class DatasetMode { Gamma, RawIf };

std::string to_string(DatasetMode mode);

struct DatasetFile {
    DatasetMode mode = DatasetMode::Gamma;
    double carrier_hz = 79e9;
    double step_m = 1e-4;
    std::size_t step_count = 0;
    int stage_direction = 1;
    std::string provenance;
    std::optional<ChirpConfig> chirp;   // required for raw-if
    std::vector<std::pair<std::string, std::string>> extra;  // other header keys, preserved

    std::vector<Complex> gammas;        // gamma mode, m = 0..M-1
    IfTrace mut_trace;                  // raw-if mode
    std::vector<IfTrace> metal_traces;  // raw-if mode, m = 0..M-1
};

TextTable to_table(const DatasetFile& file);
DatasetFile dataset_from_table(const TextTable& table);

void write_dataset(std::ostream& out, const DatasetFile& file);
DatasetFile read_dataset(std::istream& in);
void write_dataset_file(const std::filesystem::path& path, const DatasetFile& file);
DatasetFile read_dataset_file(const std::filesystem::path& path);

DatasetFile make_gamma_file(const SdiDataset& data, std::string provenance = {});
DatasetFile make_raw_if_file(const IfDatasets& traces, double carrier_hz, std::string provenance = {});

/// Gamma-mode file as an estimator dataset. Throws MalformedFileError otherwise.
SdiDataset to_sdi_dataset(const DatasetFile& file);
/// Raw-if file as trace sets. Throws MalformedFileError otherwise.
IfDatasets to_if_datasets(const DatasetFile& file);

struct CurveRow {
    std::size_t m = 0;
    double displacement_m = 0.0;
    Complex measured;
    Complex fitted;
};

struct FitReport {
    double carrier_hz = 79e9;
    double step_m = 1e-4;
    int stage_direction = 1;
    FitResult fit;
    std::vector<CurveRow> curve;
};

/// Pairs every measurement with model_gamma at the fitted parameters.
FitReport make_fit_report(const SdiDataset& data, const FitResult& fit);

TextTable to_table(const FitReport& report);
FitReport fit_report_from_table(const TextTable& table);

/// Model curve for a permittivity over a sweep (phase offset 0 unless given).
TextTable curve_table(const ComplexPermittivity& eps, std::size_t m_count, double step_m, double carrier_hz,
                      double phase_offset = 0.0);

TextTable bench_summary_table(const BenchReport& report);
TextTable bench_trials_table(const BenchReport& report);
std::vector<TrialRecord> trials_from_table(const TextTable& table);

} // namespace sdi
