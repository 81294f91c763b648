#include "spikedim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "spikedim/error.hpp"

namespace spikedim {
namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(
        start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

// Parses a whole token as a double; accepts only decimal-point notation
// (from_chars general format, so "1e-3" is fine and "1,5" is not).
bool parse_double(const std::string& token, double& value) {
  if (token.empty()) return false;
  const char* begin = token.data();
  const char* end = begin + token.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  }
  return out;
}

void check_written(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

json number_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

Error schema_error(const std::string& what) {
  return Error(ErrorKind::Parse, what);
}

std::vector<std::vector<std::string>> read_csv_records(
    std::istream& in, const std::vector<std::string>& header) {
  std::string line;
  if (!std::getline(in, line)) throw schema_error("empty results file");
  if (split_commas(line) != header) {
    throw schema_error("unexpected header '" + trim(line) + "'");
  }
  std::vector<std::vector<std::string>> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw schema_error("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(header.size()) + " fields");
    }
    records.push_back(std::move(fields));
  }
  return records;
}

double to_double(const std::string& s) {
  double v = 0.0;
  if (!parse_double(s, v)) throw schema_error("bad number '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw schema_error("bad integer '" + s + "'");
  }
  return v;
}

void summarize(HistogramRun& run) {
  const double count = static_cast<double>(run.g_values.size());
  if (run.g_values.empty()) {
    run.mean = std::numeric_limits<double>::quiet_NaN();
    run.variance = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double sum = 0.0;
  for (double g : run.g_values) sum += g;
  run.mean = sum / count;
  double ss = 0.0;
  for (double g : run.g_values) ss += (g - run.mean) * (g - run.mean);
  run.variance = run.g_values.size() > 1 ? ss / (count - 1.0) : 0.0;
}

const std::vector<std::string> kRejectionHeader = {
    "setting", "n", "k", "rate", "replicates", "alpha", "seed"};
const std::vector<std::string> kHistogramHeader = {"setting", "n", "d",
                                                   "replicate", "g"};

}  // namespace

ExportFormat parse_format(std::string_view text) {
  if (text == "csv") return ExportFormat::Csv;
  if (text == "json") return ExportFormat::Json;
  throw Error(ErrorKind::InvalidArgument,
              "unknown format '" + std::string(text) + "' (csv|json)");
}

DataMatrix read_csv_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto tokens = split_commas(line);
    std::vector<double> row(tokens.size());
    bool numeric = true;
    for (std::size_t j = 0; j < tokens.size() && numeric; ++j) {
      numeric = parse_double(tokens[j], row[j]);
    }
    if (!numeric) {
      if (rows.empty() && width == 0) {
        width = tokens.size();  // header
        continue;
      }
      throw Error(ErrorKind::Parse,
                  "line " + std::to_string(line_no) + ": non-numeric value");
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!std::isfinite(row[j])) {
        throw Error(ErrorKind::NonFiniteInput,
                    "line " + std::to_string(line_no) + ": non-finite value in column " +
                        std::to_string(j + 1));
      }
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": expected " + std::to_string(width) +
                                        " fields, found " +
                                        std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) {
    throw Error(ErrorKind::TooFewRows,
                "need at least 2 data rows, found " + std::to_string(rows.size()));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return DataMatrix(std::move(m));
}

DataMatrix read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  try {
    return read_csv_matrix(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_csv_matrix(std::ostream& out, const DataMatrix& x) {
  const auto& v = x.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(v(i, j));
    }
    out << '\n';
  }
}

void write_csv_matrix(const std::filesystem::path& path, const DataMatrix& x) {
  auto out = open_output(path);
  write_csv_matrix(out, x);
  check_written(out, path);
}

void write_rejection_table(std::ostream& out, const RejectionTable& table,
                           ExportFormat format) {
  if (format == ExportFormat::Csv) {
    out << "setting,n,k,rate,replicates,alpha,seed\n";
    for (const auto& c : table.cells) {
      out << table.setting << ',' << c.n << ',' << c.k << ','
          << format_double(c.rate) << ',' << table.replicates << ','
          << format_double(table.alpha) << ',' << table.seed << '\n';
    }
    return;
  }
  json rows = json::array();
  for (const auto& c : table.cells) {
    rows.push_back({{"setting", table.setting},
                    {"n", c.n},
                    {"k", c.k},
                    {"rate", c.rate},
                    {"replicates", table.replicates},
                    {"alpha", table.alpha},
                    {"seed", table.seed}});
  }
  out << json{{"rows", rows}}.dump(2) << '\n';
}

std::string histogram_summary_json(const HistogramRun& run) {
  const json j = {{"mean", number_or_null(run.mean)},
                  {"variance", number_or_null(run.variance)},
                  {"reference", {{"mean", 1}, {"variance", 4}}}};
  return j.dump(2);
}

void write_histogram(std::ostream& out, const HistogramRun& run,
                     ExportFormat format) {
  if (format == ExportFormat::Csv) {
    out << "setting,n,d,replicate,g\n";
    for (std::size_t r = 0; r < run.g_values.size(); ++r) {
      out << run.setting << ',' << run.n << ',' << run.d << ',' << r << ','
          << format_double(run.g_values[r]) << '\n';
    }
    return;
  }
  json rows = json::array();
  for (std::size_t r = 0; r < run.g_values.size(); ++r) {
    rows.push_back({{"setting", run.setting},
                    {"n", run.n},
                    {"d", run.d},
                    {"replicate", r},
                    {"g", run.g_values[r]}});
  }
  json doc = {{"rows", rows}, {"summary", json::parse(histogram_summary_json(run))}};
  out << doc.dump(2) << '\n';
}

void export_results(const RejectionTable& table,
                    const std::filesystem::path& path, ExportFormat format) {
  auto out = open_output(path);
  write_rejection_table(out, table, format);
  check_written(out, path);
}

void export_results(const HistogramRun& run, const std::filesystem::path& path,
                    ExportFormat format) {
  auto out = open_output(path);
  write_histogram(out, run, format);
  check_written(out, path);

  auto sidecar = path;
  sidecar.replace_filename(path.stem().string() + "_summary.json");
  auto side = open_output(sidecar);
  side << histogram_summary_json(run) << '\n';
  check_written(side, sidecar);
}

RejectionTable read_rejection_table(std::istream& in, ExportFormat format) {
  RejectionTable table;
  auto add_cell = [&](std::string setting, std::size_t n, std::size_t k,
                      double rate, std::size_t replicates, double alpha,
                      std::uint64_t seed) {
    if (table.cells.empty()) {
      table.setting = std::move(setting);
      table.replicates = replicates;
      table.alpha = alpha;
      table.seed = seed;
    } else if (setting != table.setting || replicates != table.replicates ||
               alpha != table.alpha || seed != table.seed) {
      throw schema_error("rows disagree on setting/replicates/alpha/seed");
    }
    RejectionCell c;
    c.n = n;
    c.k = k;
    c.rate = rate;
    c.rejections = static_cast<std::size_t>(
        std::llround(rate * static_cast<double>(replicates)));
    table.cells.push_back(c);
  };

  if (format == ExportFormat::Csv) {
    for (const auto& f : read_csv_records(in, kRejectionHeader)) {
      add_cell(f[0], to_u64(f[1]), to_u64(f[2]), to_double(f[3]), to_u64(f[4]),
               to_double(f[5]), to_u64(f[6]));
    }
    return table;
  }
  try {
    const json doc = json::parse(in);
    for (const auto& row : doc.at("rows")) {
      add_cell(row.at("setting").get<std::string>(), row.at("n").get<std::size_t>(),
               row.at("k").get<std::size_t>(), row.at("rate").get<double>(),
               row.at("replicates").get<std::size_t>(),
               row.at("alpha").get<double>(), row.at("seed").get<std::uint64_t>());
    }
  } catch (const json::exception& e) {
    throw schema_error(std::string("rejection table JSON: ") + e.what());
  }
  return table;
}

HistogramRun read_histogram(std::istream& in, ExportFormat format) {
  HistogramRun run;
  auto add_row = [&](std::string setting, std::size_t n, std::size_t d,
                     std::size_t replicate, double g) {
    if (run.g_values.empty()) {
      run.setting = std::move(setting);
      run.n = n;
      run.d = d;
    }
    if (replicate != run.g_values.size()) {
      throw schema_error("histogram replicates out of order");
    }
    run.g_values.push_back(g);
  };

  if (format == ExportFormat::Csv) {
    for (const auto& f : read_csv_records(in, kHistogramHeader)) {
      add_row(f[0], to_u64(f[1]), to_u64(f[2]), to_u64(f[3]), to_double(f[4]));
    }
    summarize(run);
    return run;
  }
  try {
    const json doc = json::parse(in);
    for (const auto& row : doc.at("rows")) {
      add_row(row.at("setting").get<std::string>(), row.at("n").get<std::size_t>(),
              row.at("d").get<std::size_t>(),
              row.at("replicate").get<std::size_t>(), row.at("g").get<double>());
    }
    summarize(run);
    const auto& summary = doc.at("summary");
    if (!summary.at("mean").is_null()) run.mean = summary.at("mean").get<double>();
    if (!summary.at("variance").is_null()) {
      run.variance = summary.at("variance").get<double>();
    }
  } catch (const json::exception& e) {
    throw schema_error(std::string("histogram JSON: ") + e.what());
  }
  return run;
}

}  // namespace spikedim
