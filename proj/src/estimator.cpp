#include "spikedim/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "spikedim/error.hpp"

namespace spikedim {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Forward: return "forward";
    case Strategy::Backward: return "backward";
    case Strategy::Bisection: return "bisect";
  }
  return "forward";
}

double threshold_default(std::size_t n) {
  return std::sqrt(static_cast<double>(n));
}

std::size_t default_k_max(std::size_t n, std::size_t p, Regime regime) {
  if (n < 2 || p < 1) {
    throw Error(ErrorKind::InvalidArgument, "need n >= 2 and p >= 1");
  }
  const std::size_t by_n = n - 2;
  if (regime == Regime::FixedP) {
    if (p < 2) {
      throw Error(ErrorKind::InsufficientDf,
                  "chi-square chain needs p >= 2");
    }
    return std::min(by_n, p - 2);
  }
  return std::min(by_n, p - 1);
}

EstimateTrace search_dimension(
    std::size_t k_max, Strategy strategy,
    const std::function<TraceEntry(std::size_t)>& evaluate) {
  EstimateTrace trace;
  trace.k_max = k_max;
  std::map<std::size_t, bool> seen;
  auto rejects = [&](std::size_t k) {
    if (auto it = seen.find(k); it != seen.end()) return it->second;
    TraceEntry e = evaluate(k);
    e.k = k;
    trace.visited.push_back(e);
    ++trace.tests_run;
    seen.emplace(k, e.reject);
    return e.reject;
  };

  const std::size_t none = k_max + 1;
  std::size_t d_hat = none;
  switch (strategy) {
    case Strategy::Forward:
      for (std::size_t k = 0; k <= k_max; ++k) {
        if (!rejects(k)) {
          d_hat = k;
          break;
        }
      }
      break;
    case Strategy::Backward:
      d_hat = 0;
      for (std::size_t k = k_max + 1; k-- > 0;) {
        if (rejects(k)) {
          d_hat = k + 1;
          break;
        }
      }
      break;
    case Strategy::Bisection: {
      // Invariant: every visited k < lo rejected, every visited k >= hi
      // accepted (hi == none means no accepted k seen yet).
      std::size_t lo = 0;
      std::size_t hi = none;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (rejects(mid)) {
          lo = mid + 1;
        } else {
          hi = mid;
        }
      }
      d_hat = lo;
      break;
    }
  }
  trace.d_hat = d_hat;
  trace.exhausted = d_hat == none;
  return trace;
}

EstimateTrace estimate_dimension(const SpectralSummary& spec, std::size_t n,
                                 const EstimatorConfig& cfg) {
  const std::size_t limit = default_k_max(n, spec.p, cfg.regime);
  std::size_t k_max = limit;
  if (cfg.k_max) {
    if (*cfg.k_max > spec.p - 1) {
      throw Error(ErrorKind::KOutOfRange,
                  "k_max = " + std::to_string(*cfg.k_max) +
                      " exceeds p - 1 = " + std::to_string(spec.p - 1));
    }
    k_max = std::min(*cfg.k_max, limit);
  }

  const bool by_threshold = std::holds_alternative<Threshold>(cfg.decision);
  double alpha = 0.05;
  double c_n = 0.0;
  if (by_threshold) {
    c_n = std::get<Threshold>(cfg.decision).c_n;
    if (!(c_n > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "threshold c_n must be positive");
    }
  } else {
    alpha = std::get<AlphaLevel>(cfg.decision).alpha;
  }

  auto evaluate = [&](std::size_t k) {
    const SubsphericityStat stat = statistic(spec, k, n);
    const TestOutcome outcome = run_test(stat, cfg.regime, alpha);
    TraceEntry e;
    e.k = k;
    e.T = stat.T;
    e.g = stat.g;
    e.z = stat.z;
    e.p_value = outcome.p_value;
    e.chi_square = outcome.chi_square;
    e.df = outcome.df;
    e.reject = by_threshold ? stat.g > c_n : outcome.reject;
    return e;
  };
  return search_dimension(k_max, cfg.strategy, evaluate);
}

}  // namespace spikedim
