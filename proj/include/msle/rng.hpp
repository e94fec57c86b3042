#ifndef MSLE_RNG_HPP
#define MSLE_RNG_HPP

#include <cstdint>
#include <random>

namespace msle {

/// Gaussian stream owned by one Monte Carlo sample. The state is a pure
/// function of (master seed, sample index), so results do not depend on
/// which worker runs the sample or in which order.
class SampleStream {
 public:
  SampleStream(std::uint64_t master_seed, std::uint64_t sample_index);

  /// Stream that always returns zero, for noiseless runs.
  static SampleStream silent();

  bool is_silent() const { return silent_; }

  /// Standard normal variate.
  double normal();

 private:
  SampleStream() = default;

  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  bool silent_ = false;
};

}  // namespace msle

#endif
