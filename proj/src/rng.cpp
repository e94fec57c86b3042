#include "msle/rng.hpp"

namespace msle {

SampleStream::SampleStream(std::uint64_t master_seed, std::uint64_t sample_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(sample_index),
                    static_cast<std::uint32_t>(sample_index >> 32)};
  engine_.seed(seq);
}

SampleStream SampleStream::silent() {
  SampleStream s;
  s.silent_ = true;
  return s;
}

double SampleStream::normal() {
  if (silent_) return 0.0;
  return gauss_(engine_);
}

}  // namespace msle
