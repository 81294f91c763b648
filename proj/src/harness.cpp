#include "spikedim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "spikedim/error.hpp"

namespace spikedim {
namespace {

struct ReplicateFailure {
  std::size_t replicate;
  ErrorKind kind;
  std::string message;
};

// Runs work(r) for r in [0, count) on up to `threads` workers. The first
// failure by replicate index is rethrown with the index attached.
template <typename Work>
void for_each_replicate(std::size_t count, std::size_t threads, Work work) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(count, 1));

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::optional<ReplicateFailure> failure;
  auto record = [&](std::size_t r, ErrorKind kind, std::string msg) {
    std::lock_guard lock(failure_mutex);
    if (!failure || r < failure->replicate) {
      failure = ReplicateFailure{r, kind, std::move(msg)};
    }
  };
  auto worker = [&] {
    for (std::size_t r = next++; r < count; r = next++) {
      try {
        work(r);
      } catch (const Error& e) {
        record(r, e.kind(), e.what());
      } catch (const std::exception& e) {
        record(r, ErrorKind::InvalidArgument, e.what());
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) {
    throw Error(failure->kind, "replicate " + std::to_string(failure->replicate) +
                                   ": " + failure->message);
  }
}

}  // namespace

double PowerRule::at(std::size_t n) const {
  return coefficient * std::pow(static_cast<double>(n), exponent);
}

std::size_t SimulationSetting::dimension(std::size_t n) const {
  return static_cast<std::size_t>(std::llround(dim_rule.at(n)));
}

std::vector<double> SimulationSetting::spikes(std::size_t n) const {
  std::vector<double> out;
  out.reserve(spike_rules.size());
  for (const auto& rule : spike_rules) out.push_back(rule.at(n));
  return out;
}

SpikedModel SimulationSetting::model(std::size_t n) const {
  SpikedModel m;
  m.n = n;
  m.p = dimension(n);
  m.spikes = spikes(n);
  m.noise_var = 1.0;
  m.family = family;
  return m;
}

void SimulationSetting::validate() const {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::InvalidSetting, "setting '" + label + "': " + what);
  };
  if (replicates < 1) fail("replicates must be >= 1");
  if (n_values.empty()) fail("no sample sizes given");
  if (hypotheses.empty()) fail("no hypotheses to test");
  for (std::size_t n : n_values) {
    const std::size_t p = dimension(n);
    if (n < 2) fail("sample size must be >= 2");
    if (p < 1) fail("dimension rule gives p < 1 at n = " + std::to_string(n));
    try {
      model(n).validate();
    } catch (const Error& e) {
      fail(std::string(e.what()) + " at n = " + std::to_string(n));
    }
    for (std::size_t k : hypotheses) {
      if (k >= p || k + 2 > n) {
        fail("hypothesis k = " + std::to_string(k) +
             " out of range at n = " + std::to_string(n));
      }
    }
  }
}

SimulationSetting preset_setting(std::string_view name, Family family) {
  std::string base(name);
  constexpr std::string_view suffix = "-laplace";
  if (base.size() > suffix.size() &&
      base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0) {
    base.resize(base.size() - suffix.size());
    family = Family::LaplaceMixture;
  }

  SimulationSetting s;
  s.label = base;
  s.family = family;
  if (base == "setting1") {
    s.n_values = {216, 512};
    s.dim_rule = {1.0, 0.75};
    s.spike_rules = {{3.0, 1.0}, {1.0, 0.5}, {1.0, 0.5}};
  } else if (base == "setting2") {
    s.n_values = {216, 512};
    s.dim_rule = {1.0, 0.75};
    s.spike_rules = {{3.0, 0.5}, {1.0, 0.25}, {1.0, 0.25}};
  } else if (base == "setting3") {
    s.n_values = {36, 64};
    s.dim_rule = {1.0, 1.5};
    s.spike_rules = {{2.0, 2.0}, {1.0, 1.5}};
  } else if (base == "setting4") {
    s.n_values = {36, 64};
    s.dim_rule = {1.0, 1.5};
    s.spike_rules = {{2.0, 2.0}, {1.0, 0.25}};
  } else {
    throw Error(ErrorKind::InvalidSetting,
                "unknown preset '" + std::string(name) + "'");
  }
  if (family == Family::LaplaceMixture) s.label += "-laplace";
  const std::size_t d = s.d();
  s.hypotheses = {d - 1, d, d + 1};
  return s;
}

std::vector<std::string> preset_names() {
  return {"setting1", "setting2", "setting3", "setting4"};
}

const RejectionCell& RejectionTable::at(std::size_t n, std::size_t k) const {
  for (const auto& c : cells) {
    if (c.n == n && c.k == k) return c;
  }
  throw Error(ErrorKind::InvalidArgument,
              "no cell for n = " + std::to_string(n) + ", k = " +
                  std::to_string(k));
}

std::uint64_t replicate_stream(std::size_t n, std::size_t replicate) {
  return (static_cast<std::uint64_t>(n) << 32) |
         static_cast<std::uint64_t>(replicate & 0xffffffffu);
}

SimulationSetting with_single_n(SimulationSetting setting, std::size_t n) {
  setting.n_values = {n};
  return setting;
}

RejectionTable run_rejection_study(const SimulationSetting& setting,
                                   double alpha, Seed seed,
                                   const StudyOptions& options) {
  setting.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  }
  RejectionTable table;
  table.setting = setting.label;
  table.replicates = setting.replicates;
  table.alpha = alpha;
  table.seed = seed.value;

  const std::size_t nk = setting.hypotheses.size();
  for (std::size_t n : setting.n_values) {
    const SpikedModel model = setting.model(n);
    std::vector<unsigned char> rejected(setting.replicates * nk, 0);
    for_each_replicate(setting.replicates, options.threads, [&](std::size_t r) {
      RandomStream stream(seed, replicate_stream(n, r));
      const SpectralSummary spec =
          sample_covariance_spectrum(sample_spiked(model, stream));
      for (std::size_t i = 0; i < nk; ++i) {
        const auto stat = statistic(spec, setting.hypotheses[i], n);
        rejected[r * nk + i] = run_test(stat, options.regime, alpha).reject;
      }
    });
    for (std::size_t i = 0; i < nk; ++i) {
      RejectionCell cell;
      cell.n = n;
      cell.k = setting.hypotheses[i];
      for (std::size_t r = 0; r < setting.replicates; ++r) {
        cell.rejections += rejected[r * nk + i];
      }
      cell.rate = static_cast<double>(cell.rejections) /
                  static_cast<double>(setting.replicates);
      table.cells.push_back(cell);
    }
  }
  return table;
}

HistogramRun run_histogram_study(const SimulationSetting& setting, Seed seed,
                                 const StudyOptions& options) {
  setting.validate();
  if (setting.n_values.size() != 1) {
    throw Error(ErrorKind::InvalidSetting,
                "histogram study needs exactly one sample size");
  }
  HistogramRun run;
  run.setting = setting.label;
  run.n = setting.n_values.front();
  run.d = setting.d();
  run.seed = seed.value;
  run.g_values.assign(setting.replicates, 0.0);

  const SpikedModel model = setting.model(run.n);
  for_each_replicate(setting.replicates, options.threads, [&](std::size_t r) {
    RandomStream stream(seed, replicate_stream(run.n, r));
    const SpectralSummary spec =
        sample_covariance_spectrum(sample_spiked(model, stream));
    run.g_values[r] = statistic(spec, run.d, run.n).g;
  });

  const double count = static_cast<double>(run.g_values.size());
  double sum = 0.0;
  for (double g : run.g_values) sum += g;
  run.mean = sum / count;
  double ss = 0.0;
  for (double g : run.g_values) ss += (g - run.mean) * (g - run.mean);
  run.variance = run.g_values.size() > 1 ? ss / (count - 1.0) : 0.0;
  return run;
}

}  // namespace spikedim
