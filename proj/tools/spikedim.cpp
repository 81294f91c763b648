// spikedim - command-line frontend.
//
//   spikedim estimate DATA.csv [--alpha A] [--regime high-dim|fixed-p]
//                     [--strategy forward|backward|bisect]
//                     [--threshold alpha|cN|VALUE] [--k-max K]
//   spikedim test DATA.csv --k K [--alpha A] [--regime ...]
//   spikedim simulate [--config FILE] [--preset NAME] [--n LIST] ...
//   spikedim feasibility [--alpha-exp A --beta-exp B] [--grid N] [--out FILE]
//   spikedim sample --preset NAME --n N [--seed S] [--out FILE]
//
// Exit codes: 0 success, 2 input error, 3 numerical degeneracy.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spikedim/error.hpp"
#include "spikedim/estimator.hpp"
#include "spikedim/harness.hpp"
#include "spikedim/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spikedim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::DegenerateTrailingBlock ? kExitDegenerate
                                                    : kExitInput;
}

Regime parse_regime(const std::string& s) {
  if (s == "high-dim") return Regime::HighDim;
  if (s == "fixed-p") return Regime::FixedP;
  throw Error(ErrorKind::InvalidArgument,
              "unknown regime '" + s + "' (high-dim|fixed-p)");
}

Strategy parse_strategy(const std::string& s) {
  if (s == "forward") return Strategy::Forward;
  if (s == "backward") return Strategy::Backward;
  if (s == "bisect") return Strategy::Bisection;
  throw Error(ErrorKind::InvalidArgument,
              "unknown strategy '" + s + "' (forward|backward|bisect)");
}

Family parse_family(const std::string& s) {
  if (s == "gaussian") return Family::Gaussian;
  if (s == "laplace") return Family::LaplaceMixture;
  throw Error(ErrorKind::InvalidArgument,
              "unknown family '" + s + "' (gaussian|laplace)");
}

void warn_fixed_p(Regime regime, const DataMatrix& x) {
  if (regime == Regime::FixedP &&
      static_cast<double>(x.cols()) > 0.1 * static_cast<double>(x.rows())) {
    std::cerr << "warning: fixed-p regime with p/n = "
              << static_cast<double>(x.cols()) / static_cast<double>(x.rows())
              << " > 0.1; the chi-square approximation tends to overestimate "
                 "the dimension here\n";
  }
}

json trace_entry_json(const TraceEntry& e, Regime regime) {
  json j = {{"k", e.k},         {"T", e.T},         {"g", e.g},
            {"z", e.z},         {"p_value", e.p_value},
            {"decision", e.reject ? "reject" : "accept"}};
  if (regime == Regime::FixedP) {
    j["chi_square"] = e.chi_square;
    j["df"] = e.df;
  }
  return j;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string csv;
  double alpha = 0.05;
  std::string regime = "high-dim";
  std::string strategy = "forward";
  std::string threshold = "alpha";
  std::optional<std::size_t> k_max;
};

int cmd_estimate(const EstimateArgs& args) {
  const DataMatrix x = read_csv_matrix(fs::path(args.csv));
  EstimatorConfig cfg;
  cfg.regime = parse_regime(args.regime);
  cfg.strategy = parse_strategy(args.strategy);
  cfg.k_max = args.k_max;
  const std::size_t n = x.rows();
  json decision;
  if (args.threshold == "alpha") {
    cfg.decision = AlphaLevel{args.alpha};
    decision = {{"type", "alpha"}, {"alpha", args.alpha}};
  } else {
    double c_n = threshold_default(n);
    if (args.threshold != "cN") {
      std::size_t used = 0;
      try {
        c_n = std::stod(args.threshold, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != args.threshold.size()) {
        throw Error(ErrorKind::InvalidArgument,
                    "--threshold expects alpha, cN or a positive number");
      }
    }
    cfg.decision = Threshold{c_n};
    decision = {{"type", "threshold"}, {"c_n", c_n}};
  }
  warn_fixed_p(cfg.regime, x);

  const SpectralSummary spec = sample_covariance_spectrum(x);
  const EstimateTrace trace = estimate_dimension(spec, n, cfg);

  json visited = json::array();
  for (const auto& e : trace.visited) {
    visited.push_back(trace_entry_json(e, cfg.regime));
  }
  json report = {{"command", "estimate"},
                 {"n", n},
                 {"p", x.cols()},
                 {"regime", to_string(cfg.regime)},
                 {"strategy", to_string(cfg.strategy)},
                 {"decision", decision},
                 {"k_max", trace.k_max},
                 {"d_hat", trace.d_hat},
                 {"exhausted", trace.exhausted},
                 {"tests_run", trace.tests_run},
                 {"trace", visited}};
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

// -------------------------------------------------------------------- test

struct TestArgs {
  std::string csv;
  long long k = -1;
  double alpha = 0.05;
  std::string regime = "high-dim";
};

int cmd_test(const TestArgs& args) {
  const DataMatrix x = read_csv_matrix(fs::path(args.csv));
  const Regime regime = parse_regime(args.regime);
  if (args.k < 0) {
    throw Error(ErrorKind::KOutOfRange, "k must be non-negative");
  }
  warn_fixed_p(regime, x);
  const auto k = static_cast<std::size_t>(args.k);
  const SpectralSummary spec = sample_covariance_spectrum(x);
  const TestOutcome out = run_test(statistic(spec, k, x.rows()), regime,
                                   args.alpha);
  json report = {{"command", "test"},
                 {"n", out.stat.n},
                 {"p", out.stat.p},
                 {"k", out.stat.k},
                 {"regime", to_string(out.regime)},
                 {"alpha", out.alpha},
                 {"T", out.stat.T},
                 {"g", out.stat.g},
                 {"z", out.stat.z},
                 {"p_value", out.p_value},
                 {"reject", out.reject}};
  if (regime == Regime::FixedP) {
    report["chi_square"] = out.chi_square;
    report["df"] = out.df;
  }
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

// Flat "key = value" config; '#' starts a comment. Keys mirror flag names.
const std::vector<std::string> kConfigKeys = {
    "preset", "n",      "family", "replicates", "alpha", "seed",
    "threads", "regime", "study",  "out",        "format"};

std::map<std::string, std::string> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config '" + path.string() + "'");
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line_no) +
                                        ": expected key = value");
    }
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end()) {
      throw Error(ErrorKind::InvalidSetting, "unknown config key '" + key + "'");
    }
    values[key] = value;
  }
  return values;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) {
    throw Error(ErrorKind::InvalidSetting,
                "invalid value '" + text + "' for key '" + key + "'");
  }
  return value;
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_value<long long>("n", item);
    if (v < 2) throw Error(ErrorKind::InvalidSetting, "key 'n' needs values >= 2");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw Error(ErrorKind::InvalidSetting, "key 'n' is empty");
  return out;
}

std::string rate_header(std::size_t k) { return "H0" + std::to_string(k); }

int cmd_simulate(const std::string& config_path,
                 std::map<std::string, std::string> flags) {
  std::map<std::string, std::string> cfg;
  if (!config_path.empty()) cfg = read_config(config_path);
  for (auto& [key, value] : flags) cfg[key] = value;  // flags win

  if (!cfg.count("preset")) {
    throw Error(ErrorKind::InvalidSetting, "missing required key 'preset'");
  }
  Family family = Family::Gaussian;
  if (cfg.count("family")) {
    try {
      family = parse_family(cfg["family"]);
    } catch (const Error&) {
      throw Error(ErrorKind::InvalidSetting,
                  "invalid value '" + cfg["family"] + "' for key 'family'");
    }
  }
  SimulationSetting setting;
  try {
    setting = preset_setting(cfg["preset"], family);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidSetting,
                "invalid value '" + cfg["preset"] + "' for key 'preset'");
  }
  if (cfg.count("n")) setting.n_values = parse_n_list(cfg["n"]);
  if (cfg.count("replicates")) {
    const auto r = parse_value<long long>("replicates", cfg["replicates"]);
    if (r < 1) throw Error(ErrorKind::InvalidSetting, "key 'replicates' must be >= 1");
    setting.replicates = static_cast<std::size_t>(r);
  }
  const double alpha =
      cfg.count("alpha") ? parse_value<double>("alpha", cfg["alpha"]) : 0.05;
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidSetting, "key 'alpha' must lie in (0, 1)");
  }
  const Seed seed{cfg.count("seed") ? parse_value<std::uint64_t>("seed", cfg["seed"])
                                    : 20240611ULL};
  StudyOptions options;
  if (cfg.count("threads")) {
    options.threads = parse_value<std::size_t>("threads", cfg["threads"]);
  }
  if (cfg.count("regime")) {
    try {
      options.regime = parse_regime(cfg["regime"]);
    } catch (const Error&) {
      throw Error(ErrorKind::InvalidSetting,
                  "invalid value '" + cfg["regime"] + "' for key 'regime'");
    }
  }
  const std::string study = cfg.count("study") ? cfg["study"] : "rejection";
  if (study != "rejection" && study != "histogram" && study != "both") {
    throw Error(ErrorKind::InvalidSetting,
                "invalid value '" + study + "' for key 'study'");
  }
  ExportFormat format = ExportFormat::Csv;
  if (cfg.count("format")) {
    try {
      format = parse_format(cfg["format"]);
    } catch (const Error&) {
      throw Error(ErrorKind::InvalidSetting,
                  "invalid value '" + cfg["format"] + "' for key 'format'");
    }
  }
  const std::string ext = format == ExportFormat::Csv ? ".csv" : ".json";
  const fs::path out_dir = cfg.count("out") ? fs::path(cfg["out"]) : fs::path(".");
  setting.validate();

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorKind::Io, "cannot create '" + out_dir.string() + "': " +
                                   ec.message());
  }

  std::cout << "setting " << setting.label << ", family "
            << to_string(setting.family) << ", replicates " << setting.replicates
            << ", alpha " << alpha << ", seed " << seed.value << ", regime "
            << to_string(options.regime) << '\n';

  if (study == "rejection" || study == "both") {
    const RejectionTable table = run_rejection_study(setting, alpha, seed, options);
    const fs::path path = out_dir / (setting.label + "_rejection" + ext);
    export_results(table, path, format);
    std::cout << std::setw(6) << "n" << std::setw(6) << "p";
    for (std::size_t k : setting.hypotheses) std::cout << std::setw(8) << rate_header(k);
    std::cout << '\n';
    for (std::size_t n : setting.n_values) {
      std::cout << std::setw(6) << n << std::setw(6) << setting.dimension(n);
      for (std::size_t k : setting.hypotheses) {
        std::cout << std::setw(8) << std::fixed << std::setprecision(3)
                  << table.at(n, k).rate;
      }
      std::cout << '\n';
    }
    std::cout.unsetf(std::ios::floatfield);
    std::cout << "wrote " << path.string() << '\n';
  }
  if (study == "histogram" || study == "both") {
    for (std::size_t n : setting.n_values) {
      const HistogramRun run =
          run_histogram_study(with_single_n(setting, n), seed, options);
      const fs::path path = out_dir / (setting.label + "_n" + std::to_string(n) +
                                       "_histogram" + ext);
      export_results(run, path, format);
      std::cout << "g_{n,d} at n=" << n << ": mean " << std::setprecision(4)
                << run.mean << ", variance " << run.variance
                << " (reference N(1, 4)); wrote " << path.string() << '\n';
    }
  }
  return kExitOk;
}

// ------------------------------------------------------------- feasibility

int cmd_feasibility(std::optional<double> alpha_exp,
                    std::optional<double> beta_exp,
                    std::optional<std::size_t> grid, const std::string& out) {
  if (alpha_exp.has_value() != beta_exp.has_value()) {
    throw Error(ErrorKind::InvalidArgument,
                "--alpha-exp and --beta-exp must be given together");
  }
  if (!alpha_exp && !grid) {
    throw Error(ErrorKind::InvalidArgument,
                "give --alpha-exp/--beta-exp, --grid, or both");
  }
  if (alpha_exp && grid && out.empty()) {
    throw Error(ErrorKind::InvalidArgument,
                "--grid with a point query needs --out for the grid CSV");
  }
  if (grid) {
    const std::size_t res = *grid;
    if (res < 1) throw Error(ErrorKind::InvalidArgument, "--grid must be >= 1");
    std::ofstream file;
    if (!out.empty()) {
      file.open(out);
      if (!file) throw Error(ErrorKind::Io, "cannot open '" + out + "' for writing");
    }
    std::ostream& os = out.empty() ? std::cout : file;
    os << "alpha,beta,feasible,regime\n";
    // Cell centres over [0, 2] x [0, 2.5].
    for (std::size_t i = 0; i < res; ++i) {
      const double a = (static_cast<double>(i) + 0.5) * 2.0 / static_cast<double>(res);
      for (std::size_t j = 0; j < res; ++j) {
        const double b = (static_cast<double>(j) + 0.5) * 2.5 / static_cast<double>(res);
        const auto v = feasibility(a, b);
        os << a << ',' << b << ',' << (v.feasible ? 1 : 0) << ','
           << to_string(v.regime) << '\n';
      }
    }
    if (!out.empty() && !file) throw Error(ErrorKind::Io, "write to '" + out + "' failed");
  }
  if (alpha_exp) {
    const auto v = feasibility(*alpha_exp, *beta_exp);
    json report = {{"command", "feasibility"},
                   {"alpha_exp", *alpha_exp},
                   {"beta_exp", *beta_exp},
                   {"feasible", v.feasible},
                   {"regime", to_string(v.regime)},
                   {"binding", v.binding},
                   {"beta_min", v.beta_min}};
    std::cout << report.dump(2) << '\n';
  }
  return kExitOk;
}

// ------------------------------------------------------------------ sample

int cmd_sample(const std::string& preset, const std::string& family,
               std::size_t n, std::uint64_t seed, const std::string& out) {
  SimulationSetting setting = preset_setting(preset, parse_family(family));
  const SpikedModel model = setting.model(n);
  const DataMatrix x = sample_spiked(model, Seed{seed});
  if (out.empty()) {
    write_csv_matrix(std::cout, x);
  } else {
    write_csv_matrix(fs::path(out), x);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent signal dimension estimation under spiked covariance models"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate the signal dimension of CSV data");
  estimate->add_option("csv", est.csv, "Data file, rows = observations")->required();
  estimate->add_option("--alpha", est.alpha, "Per-test significance level");
  estimate->add_option("--regime", est.regime, "high-dim | fixed-p");
  estimate->add_option("--strategy", est.strategy, "forward | backward | bisect");
  estimate->add_option("--threshold", est.threshold,
                       "alpha (level-alpha tests), cN (c_n = sqrt(n)) or a c_n value");
  estimate->add_option("--k-max", est.k_max, "Largest k to test");

  TestArgs tst;
  auto* test = app.add_subcommand("test", "Test H_0k: the signal dimension equals k");
  test->add_option("csv", tst.csv, "Data file, rows = observations")->required();
  test->add_option("--k", tst.k, "Hypothesized dimension")->required();
  test->add_option("--alpha", tst.alpha, "Significance level");
  test->add_option("--regime", tst.regime, "high-dim | fixed-p");

  std::string config_path;
  std::map<std::string, std::string> sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo study");
  simulate->add_option("--config", config_path, "Flat key = value config file");
  std::map<std::string, std::string> sim_values;
  for (const auto& key : kConfigKeys) {
    simulate->add_option("--" + key, sim_values[key]);
  }

  std::optional<double> alpha_exp;
  std::optional<double> beta_exp;
  std::optional<std::size_t> grid;
  std::string feas_out;
  auto* feas = app.add_subcommand("feasibility", "Query the consistency region");
  feas->add_option("--alpha-exp", alpha_exp, "Dimension exponent, p_n = c n^alpha");
  feas->add_option("--beta-exp", beta_exp, "Spike exponent, lambda_nd = n^beta");
  feas->add_option("--grid", grid, "Emit an N x N rasterization over [0,2] x [0,2.5]");
  feas->add_option("--out", feas_out, "Grid CSV path");

  std::string sample_preset;
  std::string sample_family = "gaussian";
  std::size_t sample_n = 0;
  std::uint64_t sample_seed = 20240611ULL;
  std::string sample_out;
  auto* sample = app.add_subcommand("sample", "Write one draw of a preset setting as CSV");
  sample->add_option("--preset", sample_preset, "setting1 .. setting4")->required();
  sample->add_option("--n", sample_n, "Sample size")->required();
  sample->add_option("--family", sample_family, "gaussian | laplace");
  sample->add_option("--seed", sample_seed, "Random seed");
  sample->add_option("--out", sample_out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*estimate) return cmd_estimate(est);
    if (*test) return cmd_test(tst);
    if (*simulate) {
      for (const auto& key : kConfigKeys) {
        if (simulate->count("--" + key) > 0) sim_flags[key] = sim_values[key];
      }
      return cmd_simulate(config_path, sim_flags);
    }
    if (*feas) return cmd_feasibility(alpha_exp, beta_exp, grid, feas_out);
    if (*sample) {
      return cmd_sample(sample_preset, sample_family, sample_n, sample_seed,
                        sample_out);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
