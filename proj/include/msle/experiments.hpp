#ifndef MSLE_EXPERIMENTS_HPP
#define MSLE_EXPERIMENTS_HPP

#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "msle/dynamics.hpp"
#include "msle/partition.hpp"

namespace msle {

enum class PartitionKind { Factorized, Double, Triple };

struct ExperimentConfig {
  int level = 2;
  std::vector<double> positions;
  PartitionKind kind = PartitionKind::Triple;
  int channel = 0;  // Double only
  TripleBlock block = TripleBlock::Sum;
  double dt = 1e-3;
  double horizon = 50.0;
  int samples = 1000;
  double delta_collide_factor = 1e-4;  // relative to the initial spread
  std::vector<double> rates;           // empty: a_α = 1/m
  std::uint64_t seed = 1;
  int workers = 1;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  PartitionFunction partition() const;
  double delta_collide() const;
  RunConfig run_config() const;
  DriverState initial_state() const;
  std::string digest() const;
};

struct Interval {
  double lower;
  double upper;
};

/// 95% Wilson score interval.
Interval wilson_interval(long successes, long n, double z = 1.959963984540054);

struct McEstimate {
  double estimate = 0.0;
  long successes = 0;
  long samples = 0;  // denominator of the estimate
  double standard_error = 0.0;
  Interval interval{0.0, 1.0};
  std::uint64_t seed = 0;
  std::string digest;
  long unresolved = 0;
  long attempted = 0;

  double unresolved_fraction() const {
    return attempted > 0 ? static_cast<double>(unresolved) / attempted : 0.0;
  }
  /// (estimate − reference) / standard error; infinite when se = 0 and they differ.
  double z_score(double reference) const;
};

McEstimate make_estimate(long successes, long samples);

/// Runs fn(i) for i = 0..n−1 on `workers` threads; results are stored by
/// index so the output does not depend on scheduling.
template <typename Fn>
auto run_indexed(long n, int workers, Fn fn) -> std::vector<decltype(fn(0L))> {
  std::vector<decltype(fn(0L))> out(n);
  std::atomic<long> next{0};
  auto work = [&] {
    for (long i = next++; i < n; i = next++) out[i] = fn(i);
  };
  const int w = std::max(1, workers);
  if (w == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  return out;
}

/// Fraction of m = 2 runs whose drivers collide before the horizon.
McEstimate mc_double_arch(const ExperimentConfig& config);

/// P[C1]: fraction of resolved m = 3 runs whose first arch is (1,2). Runs
/// with no arch by the horizon are counted in `unresolved` and excluded
/// from the estimate.
McEstimate mc_triple_crossing(const ExperimentConfig& config);

/// Observed arch topologies. Throws std::logic_error on a non-planar outcome.
std::map<ArchTopology, long> topology_census(const ExperimentConfig& config);

struct BesselOracleConfig {
  double d_eff;
  double y0 = 1.0;
  double kappa = 4.0;  // time scale: ds = κ dt
  double dt = 1e-3;
  double horizon = 50.0;
  int samples = 1000;
  double delta_collide = 1e-4;
  std::uint64_t seed = 1;
  int workers = 1;
};

/// Direct simulation of dy = √κ dB + κ (d−1)/(2y) dt with the same step
/// control as the driver integrator; fraction reaching delta_collide.
McEstimate mc_bessel_hitting(const BesselOracleConfig& config);

/// Continuum probability that a d-dimensional Bessel process from y0 hits 0
/// by time s: Q(1 − d/2, y0²/(2s)) for d < 2, else 0.
double bessel_hit_probability(double d_eff, double y0, double s);

/// Probability that the m = 3 driver SDE with drift from Z_Sum closes (1,2)
/// first, from the scale function of the cross-ratio diffusion. Independent
/// of Monte Carlo; equals Z_C1/(Z_C1 + Z_C2) only if the drift makes that
/// ratio a martingale.
double diffusion_crossing_probability(const ModelParams& model, double x,
                                      const std::vector<double>& rates = {});

}  // namespace msle

#endif
