#ifndef BPRE_RNG_HPP
#define BPRE_RNG_HPP

// Portable deterministic random streams.
//
// Generator: xoshiro256** 1.0 (Blackman & Vigna, 2018), 64-bit output.
//
// Stream derivation, bit-exact:
//
//   mix64(z):  z += 0x9E3779B97F4A7C15
//              z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//              z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
//              return z ^ (z >> 31)
//
//   stream_seed(master, id) = mix64(master ^ mix64(id))
//
//   The four state words are successive splitmix64 outputs started from
//   stream_seed, i.e. s[j] = mix64(stream_seed + j * 0x9E3779B97F4A7C15)
//   for j = 0..3. All arithmetic is modulo 2^64.
//
// Uniform reals take the top 53 bits of one output: uniform() is
// (x >> 11) * 2^-53 in [0,1), uniform_pos() is ((x >> 11) + 1) * 2^-53
// in (0,1]. Nothing here touches <random>, whose distributions are
// implementation-defined.

#include <cmath>
#include <cstdint>
#include <limits>

namespace bpre {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                           std::uint64_t stream_id) noexcept {
  return mix64(master_seed ^ mix64(stream_id));
}

class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : master_seed_(master_seed), stream_id_(stream_id) {
    const std::uint64_t seed = derive_stream_seed(master_seed, stream_id);
    for (std::uint64_t j = 0; j < 4; ++j) {
      s_[j] = mix64(seed + j * kGoldenGamma);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0,1).
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0,1]; safe to take the log of.
  double uniform_pos() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  bool bernoulli_half() noexcept { return ((*this)() >> 63) != 0; }

  /// Standard normal via the Marsaglia polar method. The spare variate is
  /// cached, so the draw sequence depends only on the call sequence.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4]{};
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bpre

#endif  // BPRE_RNG_HPP
