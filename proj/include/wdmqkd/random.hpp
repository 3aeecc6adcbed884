#pragma once

#include <cstdint>
#include <random>

namespace wdmqkd {

/// Stream domains keep detection and protocol draws independent under the
/// same master seed.
enum class StreamDomain : std::uint64_t { detection = 1, protocol = 2, test = 3 };

/// Random stream with a platform-independent output sequence: std::mt19937_64
/// is fully specified, and uniforms are built from its raw bits rather than
/// through the implementation-defined std distributions.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based split: the stream for (seed, domain, channel, index) does not
/// depend on which other streams were drawn, or in what order.
Stream derive_stream(std::uint64_t seed, StreamDomain domain, std::uint64_t channel,
                     std::uint64_t index);

/// Exact Poisson variate: multiplicative inversion below mean 10, Hormann's
/// PTRS transformed rejection above.
std::uint64_t sample_poisson(double mean, Stream& stream);

}  // namespace wdmqkd
