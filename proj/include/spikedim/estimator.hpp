// estimator.hpp - latent dimension estimation by chained subsphericity tests.
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "spikedim/eigenmoments.hpp"
#include "spikedim/stattests.hpp"

namespace spikedim {

enum class Strategy { Forward, Backward, Bisection };

std::string_view to_string(Strategy strategy);

/// Reject H_0k when the regime's p-value is below alpha.
struct AlphaLevel {
  double alpha = 0.05;
};

/// Reject H_0k when g_k > c_n (threshold-sequence estimator).
struct Threshold {
  double c_n = 0.0;
};

using Decision = std::variant<AlphaLevel, Threshold>;

struct EstimatorConfig {
  Strategy strategy = Strategy::Forward;
  Decision decision = AlphaLevel{};
  /// Reference distribution for AlphaLevel decisions; ignored by Threshold.
  Regime regime = Regime::HighDim;
  std::optional<std::size_t> k_max;
};

struct TraceEntry {
  std::size_t k = 0;
  double T = 0.0;
  double g = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double chi_square = 0.0;
  double df = 0.0;
};

struct EstimateTrace {
  std::size_t d_hat = 0;
  std::vector<TraceEntry> visited;  // in evaluation order
  std::size_t tests_run = 0;
  std::size_t k_max = 0;
  /// Every k in [0, k_max] was rejected; d_hat is then k_max + 1.
  bool exhausted = false;
};

/// c_n = sqrt(n): diverges while c_n / n -> 0.
double threshold_default(std::size_t n);

/// Largest k the estimator may test: min(n - 2, p - 1) for the
/// high-dimensional test, min(n - 2, p - 2) for the chi-square test (which
/// needs at least two trailing eigenvalues).
std::size_t default_k_max(std::size_t n, std::size_t p, Regime regime);

/// Runs a search strategy over k in [0, k_max] against an arbitrary per-k
/// evaluator. Each k is evaluated at most once.
///
/// Forward returns the smallest accepted k. Backward scans down from k_max
/// and returns one past the first rejected k (0 if nothing is rejected).
/// Bisection binary-searches for the first accepted k, which coincides with
/// Forward whenever the decisions have the form reject^m accept^(rest).
EstimateTrace search_dimension(
    std::size_t k_max, Strategy strategy,
    const std::function<TraceEntry(std::size_t)>& evaluate);

EstimateTrace estimate_dimension(const SpectralSummary& spec, std::size_t n,
                                 const EstimatorConfig& cfg);

}  // namespace spikedim
