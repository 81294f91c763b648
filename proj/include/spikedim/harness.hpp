// harness.hpp - Monte Carlo studies over simulation settings and the
// exponent feasibility region of the consistency conditions.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spikedim/rng.hpp"
#include "spikedim/samplers.hpp"
#include "spikedim/stattests.hpp"

namespace spikedim {

/// coefficient * n^exponent
struct PowerRule {
  double coefficient = 1.0;
  double exponent = 0.0;

  double at(std::size_t n) const;
};

struct SimulationSetting {
  std::string label;
  std::vector<std::size_t> n_values;
  PowerRule dim_rule;                 // p_n = round(c n^alpha)
  std::vector<PowerRule> spike_rules; // lambda_nj, one per signal
  Family family = Family::Gaussian;
  std::size_t replicates = 2000;
  std::vector<std::size_t> hypotheses;  // k values to test

  std::size_t d() const { return spike_rules.size(); }
  std::size_t dimension(std::size_t n) const;
  std::vector<double> spikes(std::size_t n) const;
  /// Model at sample size n, noise variance 1.
  SpikedModel model(std::size_t n) const;
  /// Throws InvalidSetting on violated invariants.
  void validate() const;
};

/// Built-in presets "setting1" .. "setting4", optionally suffixed
/// "-laplace". Each tests k = d - 1, d, d + 1 over its two sample sizes.
SimulationSetting preset_setting(std::string_view name,
                                 Family family = Family::Gaussian);
std::vector<std::string> preset_names();

struct RejectionCell {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t rejections = 0;
  double rate = 0.0;
};

struct RejectionTable {
  std::string setting;
  std::vector<RejectionCell> cells;  // n-major, hypotheses in setting order
  std::size_t replicates = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;

  const RejectionCell& at(std::size_t n, std::size_t k) const;
};

struct HistogramRun {
  std::string setting;
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> g_values;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::uint64_t seed = 0;
};

struct StudyOptions {
  Regime regime = Regime::HighDim;
  /// Worker threads; 0 picks the hardware concurrency. Results never depend
  /// on this value.
  std::size_t threads = 1;
};

/// Stream id of replicate r at sample size n; every study derives its draws
/// from RandomStream(seed, replicate_stream(n, r)).
std::uint64_t replicate_stream(std::size_t n, std::size_t replicate);

RejectionTable run_rejection_study(const SimulationSetting& setting,
                                   double alpha, Seed seed,
                                   const StudyOptions& options = {});

/// g_{n,d} over all replicates. The setting must list exactly one n.
HistogramRun run_histogram_study(const SimulationSetting& setting, Seed seed,
                                 const StudyOptions& options = {});

/// Copy of setting restricted to one sample size.
SimulationSetting with_single_n(SimulationSetting setting, std::size_t n);

// ---------------------------------------------------------------------------
// Feasibility region for p_n = c n^alpha, lambda_nd = n^beta (c != 1).

enum class Concentration { Zero, Proportional, Infinite };

std::string_view to_string(Concentration c);

struct FeasibilityVerdict {
  bool feasible = false;
  Concentration regime = Concentration::Zero;
  std::vector<std::string> binding;
  double beta_min = 0.0;
};

/// Condition names reported in FeasibilityVerdict::binding.
inline constexpr std::string_view kCondSpikeVsDim = "p/lambda^2 -> 0";
inline constexpr std::string_view kCondRootSpike = "p/(n*sqrt(lambda)) -> 0";
inline constexpr std::string_view kCondRootN = "p/(sqrt(n)*lambda) -> 0";

/// Infimum of feasible beta at a given alpha: alpha/2 for alpha <= 1 and
/// max(2(alpha - 1), alpha - 1/2) beyond. The boundary itself is infeasible.
double feasibility_boundary(double alpha_exp);

/// Throws InvalidExponent if alpha < 0 or beta <= 0.
FeasibilityVerdict feasibility(double alpha_exp, double beta_exp);

}  // namespace spikedim
