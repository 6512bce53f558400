#pragma once

#include <cmath>
#include <cstdint>

namespace critmc {

// Deterministic splittable random stream: xoshiro256++ core, substreams
// derived by hashing (key, id) with splitmix64. Replica r of a run with
// master seed s always sees the stream (s, r), independent of how many
// replicas run or in which order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0) {
    key_ = mix(mix(seed) ^ mix(stream_id + 0x9E3779B97F4A7C15ull));
    std::uint64_t s = key_;
    for (auto& w : state_) w = splitmix(s);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  // Child stream derived from this stream's key; does not disturb the
  // parent's draw sequence.
  RandomStream substream(std::uint64_t id) const {
    return RandomStream(key_, id + 1);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal, ziggurat with 256 layers. One u64 covers layer
  // index, sign and a 53-bit magnitude; rejections fall through to the
  // wedge or the exact exponential tail sampler.
  double normal();

  // Marsaglia polar method; slower, kept as an independent oracle for
  // distributional tests of the ziggurat path.
  double normal_polar() {
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  static std::uint64_t splitmix(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ull;
    return mix(s);
  }
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t state_[4];
};

// Relative closure error of the last ziggurat layer; test hook.
double ziggurat_layer_closure_error();

// Kahan compensated accumulator for long-running sums whose increments are
// small relative to the running value.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
  void reset() { sum = 0.0; carry = 0.0; }
};

}  // namespace critmc
