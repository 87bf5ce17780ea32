#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace graphscan {

// Counter-based normal streams.
//
// Stream (seed, id) has key k = mix(seed ^ mix(id + 0x9E3779B97F4A7C15)).
// Its j-th 64-bit word (j = 0, 1, ...) is mix(k + (j + 1) * 0x9E3779B97F4A7C15),
// where mix is the SplitMix64 finalizer. A word becomes a uniform in (0, 1)
// from its top 53 bits as (bits + 0.5) / 2^53. Normals come in pairs from
// consecutive uniforms (u1, u2) by Box-Muller:
//   r = sqrt(-2 log u1),  z1 = r cos(2 pi u2),  z2 = r sin(2 pi u2).
// Every draw is therefore a pure function of (seed, id, position).

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class NormalStream {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  NormalStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_(splitmix64_mix(seed ^ splitmix64_mix(stream_id + kGamma))) {}

  std::uint64_t next_word() { return splitmix64_mix(key_ + (++counter_) * kGamma); }

  double next_uniform() {
    return (static_cast<double>(next_word() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = next_normal();
    return out;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace graphscan
