// io.hpp - CSV data ingestion and result export in the documented schemas.
//
// RejectionTable CSV:  setting,n,k,rate,replicates,alpha,seed
// HistogramRun CSV:    setting,n,d,replicate,g
//   plus a sidecar JSON summary
//   {"mean": m, "variance": v, "reference": {"mean": 1, "variance": 4}}
// JSON exports carry the same fields: {"rows": [{...}, ...]}, histograms add
// "summary".
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "spikedim/eigenmoments.hpp"
#include "spikedim/harness.hpp"

namespace spikedim {

enum class ExportFormat { Csv, Json };

ExportFormat parse_format(std::string_view text);

/// Comma-delimited numeric rows (rows = observations). A first line with any
/// non-numeric token is treated as a header. Ragged rows and unparsable
/// tokens raise Parse errors naming the 1-based line number; non-finite
/// values raise NonFiniteInput.
DataMatrix read_csv_matrix(std::istream& in);
DataMatrix read_csv_matrix(const std::filesystem::path& path);

void write_csv_matrix(std::ostream& out, const DataMatrix& x);
void write_csv_matrix(const std::filesystem::path& path, const DataMatrix& x);

void write_rejection_table(std::ostream& out, const RejectionTable& table,
                           ExportFormat format);
void write_histogram(std::ostream& out, const HistogramRun& run,
                     ExportFormat format);
std::string histogram_summary_json(const HistogramRun& run);

/// File variants; IO failures raise Io errors that name the path. Histogram
/// exports also write "<stem>_summary.json" next to the data file.
void export_results(const RejectionTable& table,
                    const std::filesystem::path& path, ExportFormat format);
void export_results(const HistogramRun& run, const std::filesystem::path& path,
                    ExportFormat format);

/// Inverse of the exports (used for round-trip checks and downstream tools).
/// Multi-n tables are supported; counts are reconstructed from the rates.
RejectionTable read_rejection_table(std::istream& in, ExportFormat format);
HistogramRun read_histogram(std::istream& in, ExportFormat format);

}  // namespace spikedim
