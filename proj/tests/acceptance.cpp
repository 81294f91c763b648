// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spikedim/eigenmoments.hpp"
#include "spikedim/error.hpp"
#include "spikedim/estimator.hpp"
#include "spikedim/harness.hpp"
#include "spikedim/io.hpp"
#include "spikedim/rng.hpp"
#include "spikedim/samplers.hpp"
#include "spikedim/stattests.hpp"
#include "test_support.hpp"

using namespace spikedim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kStudySeed = 20240611;
constexpr std::size_t kReplicates = 2000;

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED " + what);
    }
  }
  void note(const std::string& what) { notes.push_back(what); }
};

int failures = 0;

void report(const std::string& id, const std::string& title,
            const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.note(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  if (!v.pass) ++failures;
  std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << id << ": "
            << title << " (" << std::fixed << std::setprecision(1) << secs
            << " s)\n";
  std::cout.unsetf(std::ios::floatfield);
  for (const auto& n : v.notes) std::cout << "      " << n << '\n';
  std::cout.flush();
}

std::string fmt(double x, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

// ---------------------------------------------------------------- rates

struct RefRow {
  const char* preset;
  std::size_t n;
  double rates[3];  // k = d - 1, d, d + 1
};

const RefRow kGaussianRef[] = {
    {"setting1", 216, {1.000, 0.053, 0.115}}, {"setting1", 512, {1.000, 0.051, 0.138}},
    {"setting2", 216, {1.000, 0.054, 0.122}}, {"setting2", 512, {1.000, 0.051, 0.131}},
    {"setting3", 36, {1.000, 0.051, 0.102}},  {"setting3", 64, {1.000, 0.053, 0.124}},
    {"setting4", 36, {0.059, 0.091, 0.211}},  {"setting4", 64, {0.058, 0.093, 0.261}},
};

const RefRow kLaplaceRef[] = {
    {"setting1", 216, {1.000, 0.055, 0.121}}, {"setting1", 512, {1.000, 0.054, 0.137}},
    {"setting2", 216, {1.000, 0.055, 0.124}}, {"setting2", 512, {1.000, 0.054, 0.138}},
    {"setting3", 36, {1.000, 0.052, 0.109}},  {"setting3", 64, {1.000, 0.049, 0.128}},
    {"setting4", 36, {0.057, 0.091, 0.213}},  {"setting4", 64, {0.061, 0.090, 0.253}},
};

Verdict rate_reproduction(const RefRow (&rows)[8], Family family) {
  Verdict v;
  for (const char* preset : {"setting1", "setting2", "setting3", "setting4"}) {
    SimulationSetting setting = preset_setting(preset, family);
    setting.replicates = kReplicates;
    const RejectionTable table =
        run_rejection_study(setting, 0.05, Seed{kStudySeed});
    for (const auto& row : rows) {
      if (std::string(row.preset) != preset) continue;
      std::string line = setting.label + " n=" + std::to_string(row.n) + ":";
      for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t k = setting.hypotheses[i];
        const double got = table.at(row.n, k).rate;
        const double ref = row.rates[i];
        const bool ok = ref >= 0.99 ? got >= 0.99 : std::abs(got - ref) <= 0.02;
        v.check(ok, setting.label + " n=" + std::to_string(row.n) + " k=" +
                        std::to_string(k) + " got " + fmt(got) + " ref " + fmt(ref));
        line += " k=" + std::to_string(k) + " " + fmt(got) + " (" + fmt(ref) + ")";
      }
      v.note(line);
    }
  }
  return v;
}

// ----------------------------------------------------------- histograms

Verdict histogram_behaviour() {
  Verdict v;
  const std::pair<const char*, std::size_t> runs[] = {
      {"setting1", 512}, {"setting2", 512}, {"setting3", 64}, {"setting4", 64}};
  for (const auto& [preset, n] : runs) {
    SimulationSetting setting = with_single_n(preset_setting(preset), n);
    setting.replicates = kReplicates;
    const HistogramRun run = run_histogram_study(setting, Seed{kStudySeed});
    const std::string tag = std::string(preset) + " n=" + std::to_string(n);
    v.note(tag + ": mean " + fmt(run.mean) + ", variance " + fmt(run.variance));
    if (std::string(preset) == "setting4") {
      v.check(run.mean >= -0.85 && run.mean <= 0.15, tag + " mean outside [-0.85, 0.15]");
    } else {
      v.check(run.mean >= 0.5 && run.mean <= 1.5, tag + " mean outside [0.5, 1.5]");
      v.check(run.variance >= 3.2 && run.variance <= 4.8,
              tag + " variance outside [3.2, 4.8]");
    }
  }
  return v;
}

// --------------------------------------------------------- cross-trace

struct Moments {
  double mean = 0, var = 0, se_mean = 0, se_var = 0;
};

Moments sample_moments(const std::vector<double>& x) {
  const double N = static_cast<double>(x.size());
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= N;
  double m2 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - m.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m.var = m2 / (N - 1);
  m4 /= N;
  m.se_mean = std::sqrt(m.var / N);
  m.se_var = std::sqrt(std::max(m4 - (m2 / N) * (m2 / N), 0.0) / N);
  return m;
}

Verdict cross_trace_moments() {
  Verdict v;
  struct Point {
    std::size_t n, p, d;
  };
  const Point grid[] = {{50, 10, 2}, {100, 11, 1}, {200, 400, 3}};
  for (const auto& pt : grid) {
    for (auto method : {WishartMethod::Conditional, WishartMethod::Direct}) {
      std::size_t reps = 100000;
      if (method == WishartMethod::Direct && pt.p > 100) reps = 5000;
      std::vector<double> y(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        RandomStream stream(Seed{kStudySeed}, r);
        y[r] = wishart_cross_coordinate(pt.n, pt.p, pt.d, stream, method);
      }
      const Moments m = sample_moments(y);
      const double n = static_cast<double>(pt.n);
      const double q = static_cast<double>(pt.p - pt.d);
      const double mean_ref = q / n;
      const double var_ref = 2.0 * q * (2.0 + q + n) / (n * n * n);
      const double zm = (m.mean - mean_ref) / m.se_mean;
      const double zv = (m.var - var_ref) / m.se_var;
      const std::string tag =
          "(" + std::to_string(pt.n) + "," + std::to_string(pt.p) + "," +
          std::to_string(pt.d) + ") " +
          (method == WishartMethod::Direct ? "direct" : "conditional") + " x" +
          std::to_string(reps);
      v.note(tag + ": mean " + fmt(m.mean, 5) + " vs " + fmt(mean_ref, 5) +
             " (" + fmt(zm, 2) + " SE), variance " + fmt(m.var, 6) + " vs " +
             fmt(var_ref, 6) + " (" + fmt(zv, 2) + " SE)");
      v.check(std::abs(zm) <= 3.0, tag + " mean beyond 3 SE");
      v.check(std::abs(zv) <= 5.0, tag + " variance beyond 5 SE");
    }
  }
  return v;
}

// ---------------------------------------------------------- calibration

Verdict chi_square_calibration() {
  Verdict v;
  SpikedModel model;
  model.n = 5000;
  model.p = 5;
  std::size_t rejections = 0;
  for (std::size_t r = 0; r < kReplicates; ++r) {
    RandomStream stream(Seed{kStudySeed}, replicate_stream(model.n, r));
    const DataMatrix x = sample_spiked(model, stream);
    const auto spec = sample_covariance_spectrum(x);
    if (run_test(statistic(spec, 0, model.n), Regime::FixedP, 0.05).reject) {
      ++rejections;
    }
  }
  const double rate = static_cast<double>(rejections) / kReplicates;
  v.note("rejection rate " + fmt(rate) + " over " + std::to_string(kReplicates));
  v.check(rate >= 0.035 && rate <= 0.065, "rate outside [0.035, 0.065]");
  return v;
}

// ----------------------------------------------------------- feasibility

Verdict feasibility_region() {
  Verdict v;
  struct Case {
    const char* preset;
    double alpha, beta;
    bool expected;
  };
  // Exponents of p_n and of the smallest spike.
  const Case cases[] = {{"setting1", 0.75, 0.5, true},
                        {"setting2", 0.75, 0.25, false},
                        {"setting3", 1.5, 1.5, true},
                        {"setting4", 1.5, 0.25, false}};
  for (const auto& c : cases) {
    const auto verdict = feasibility(c.alpha, c.beta);
    std::string binding;
    for (const auto& b : verdict.binding) binding += (binding.empty() ? "" : "; ") + b;
    v.note(std::string(c.preset) + ": " + (verdict.feasible ? "feasible" : "infeasible") +
           ", " + std::string(to_string(verdict.regime)) +
           (binding.empty() ? "" : ", binding " + binding));
    v.check(verdict.feasible == c.expected, std::string(c.preset) + " classification");
  }
  const double h = 1e-4;
  auto slope = [&](double a) {
    return (feasibility_boundary(a + h) - feasibility_boundary(a - h)) / (2 * h);
  };
  for (double a : {0.2, 0.5, 0.8}) {
    v.check(std::abs(slope(a) - 0.5) < 1e-6, "slope at alpha=" + fmt(a, 2) + " is " + fmt(slope(a), 6));
  }
  for (double a : {1.6, 1.8, 2.5}) {
    v.check(std::abs(slope(a) - 2.0) < 1e-6, "slope at alpha=" + fmt(a, 2) + " is " + fmt(slope(a), 6));
  }
  v.note("slopes " + fmt(slope(0.5), 4) + " and " + fmt(slope(1.8), 4) + ", ratio " +
         fmt(slope(1.8) / slope(0.5), 4));
  return v;
}

// ------------------------------------------------------------ properties

Verdict property_suites() {
  using namespace spikedim::testing;
  Verdict v;
  std::mt19937_64 gen(7);
  std::size_t checked = 0;

  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 8 + trial * 3;
    const Eigen::Index p = 3 + (trial * 7) % 40;
    const Eigen::MatrixXd x = gaussian_matrix(n, p, 100 + trial);
    const auto base = sample_covariance_spectrum(DataMatrix(x));
    const double scale = base.eigenvalues.empty() ? 1.0 : base.eigenvalues[0];

    Eigen::RowVectorXd shift = Eigen::RowVectorXd::Random(p) * 50.0;
    const auto shifted = sample_covariance_spectrum(DataMatrix(x.rowwise() + shift));
    const Eigen::MatrixXd q = random_orthogonal(p, 200 + trial);
    const auto rotated = sample_covariance_spectrum(DataMatrix(x * q));
    const double c = 3.7;
    const auto scaled = sample_covariance_spectrum(DataMatrix(x * c));
    const auto direct = sample_covariance_spectrum_direct(DataMatrix(x));

    for (std::size_t j = 0; j < static_cast<std::size_t>(p); ++j) {
      const double e = base.full(j);
      v.check(std::abs(shifted.full(j) - e) <= 1e-8 * scale, "translation invariance");
      v.check(std::abs(rotated.full(j) - e) <= 1e-8 * scale, "rotation invariance");
      v.check(std::abs(scaled.full(j) - c * c * e) <= 1e-8 * c * c * scale,
              "scale equivariance");
      v.check(std::abs(direct.full(j) - e) <= 1e-8 * scale, "Gram-path equivalence");
      ++checked;
    }
    for (std::size_t k = 0; k < static_cast<std::size_t>(p); ++k) {
      const auto tm = trailing_moments(base, k);
      v.check(tm.m2 >= tm.m1 * tm.m1 * (1 - 1e-12), "power-mean inequality");
    }
  }
  v.note(std::to_string(checked) + " eigenvalue comparisons");

  std::size_t sequences = 0;
  for (std::size_t len = 1; len <= 20; ++len) {
    for (std::size_t m = 0; m <= len; ++m) {
      auto eval = [m](std::size_t k) {
        TraceEntry t;
        t.k = k;
        t.reject = k < m;
        return t;
      };
      const auto fwd = search_dimension(len - 1, Strategy::Forward, eval);
      const auto bis = search_dimension(len - 1, Strategy::Bisection, eval);
      v.check(fwd.d_hat == m && bis.d_hat == m && fwd.exhausted == bis.exhausted,
              "forward/bisection disagree at length " + std::to_string(len) +
                  ", m=" + std::to_string(m));
      ++sequences;
    }
  }
  v.note(std::to_string(sequences) + " monotone decision sequences");

  SimulationSetting setting = preset_setting("setting3");
  setting.replicates = 60;
  const auto reference = run_rejection_study(setting, 0.05, Seed{kStudySeed}, {Regime::HighDim, 1});
  const auto hist_ref = run_histogram_study(with_single_n(setting, 36), Seed{kStudySeed}, {Regime::HighDim, 1});
  for (std::size_t threads : {2, 3, 8}) {
    const auto t = run_rejection_study(setting, 0.05, Seed{kStudySeed}, {Regime::HighDim, threads});
    bool same = t.cells.size() == reference.cells.size();
    for (std::size_t i = 0; same && i < t.cells.size(); ++i) {
      same = t.cells[i].rejections == reference.cells[i].rejections;
    }
    const auto h = run_histogram_study(with_single_n(setting, 36), Seed{kStudySeed}, {Regime::HighDim, threads});
    same = same && h.g_values == hist_ref.g_values;
    v.check(same, "results differ with " + std::to_string(threads) + " threads");
  }
  v.note("thread counts 1, 2, 3, 8 bit-identical");
  return v;
}

// ------------------------------------------------------------ end to end

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt";
  const std::string cmd = std::string("\"") + SPIKEDIM_CLI_PATH + "\" " + args +
                          " >\"" + out.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

Verdict end_to_end() {
  Verdict v;
  const fs::path dir = fs::temp_directory_path() / "spikedim_acceptance";
  fs::create_directories(dir);
  const fs::path csv = dir / "setting1_n216.csv";

  auto r = cli("sample --preset setting1 --n 216 --seed 1 --out \"" + csv.string() + "\"", dir);
  v.check(r.code == 0, "sample exited with " + std::to_string(r.code));

  r = cli("estimate \"" + csv.string() + "\"", dir);
  v.check(r.code == 0, "estimate exited with " + std::to_string(r.code));
  if (r.code == 0) {
    const auto doc = json::parse(r.out);
    v.note("high-dim: d_hat " + doc.at("d_hat").dump() + ", exhausted " +
           doc.at("exhausted").dump());
    v.check(doc.at("d_hat") == 3, "high-dim estimate is not 3");
  }

  r = cli("estimate \"" + csv.string() + "\" --regime fixed-p", dir);
  v.check(r.code == 0, "fixed-p estimate exited with " + std::to_string(r.code));
  if (r.code == 0) {
    const auto doc = json::parse(r.out);
    v.note("fixed-p: d_hat " + doc.at("d_hat").dump() + " of k_max " +
           doc.at("k_max").dump() + ", exhausted " + doc.at("exhausted").dump());
    v.check(doc.at("exhausted") == true, "fixed-p search on the same draw is not saturated");
  }

  // Same signal strength with p well above n.
  SpikedModel wide;
  wide.n = 64;
  wide.p = 256;
  wide.spikes = {3.0 * 64, 8.0, 8.0};
  const fs::path wide_csv = dir / "wide.csv";
  write_csv_matrix(wide_csv, sample_spiked(wide, Seed{1}));
  r = cli("estimate \"" + wide_csv.string() + "\" --regime fixed-p", dir);
  if (r.code == 0) {
    const auto doc = json::parse(r.out);
    v.note("contrast, n=64 p=256 fixed-p: d_hat " + doc.at("d_hat").dump() + " of k_max " +
           doc.at("k_max").dump() + ", exhausted " + doc.at("exhausted").dump());
  } else {
    v.note("contrast run exited with " + std::to_string(r.code));
  }
  return v;
}

}  // namespace

int main() {
  report("1", "rejection rates, gaussian family, 2000 replicates",
         [] { return rate_reproduction(kGaussianRef, Family::Gaussian); });
  report("2", "rejection rates, laplace mixture family, 2000 replicates",
         [] { return rate_reproduction(kLaplaceRef, Family::LaplaceMixture); });
  report("3", "g-statistic histograms at the true dimension", histogram_behaviour);
  report("4", "cross-trace moments of a partitioned wishart matrix", cross_trace_moments);
  report("5", "chi-square test calibration at p=5, n=5000", chi_square_calibration);
  report("6", "feasibility classification and boundary slopes", feasibility_region);
  report("7", "property suites", property_suites);
  report("8", "end-to-end estimate through the command line", end_to_end);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << '\n';
  return failures == 0 ? 0 : 1;
}
