#pragma once

#include <cstdint>
#include <random>

namespace mff {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent sub-seed for (stream, salt) under one master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t salt) {
  std::uint64_t x = master;
  (void)splitmix64(x);
  x ^= 0x632be59bd9b4e019ULL * (stream + 1);
  (void)splitmix64(x);
  x ^= 0xd1342543de82ef95ULL * (salt + 1);
  return splitmix64(x);
}

// Deterministic stream of i.i.d. standard normals owned by one trajectory.
// The consumption order is fixed by the caller (per step: even bonds
// ascending, then odd bonds ascending), so the stream depends only on
// (master_seed, trajectory_id), never on scheduling.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t trajectory_id)
      : master_seed_(master_seed),
        trajectory_id_(trajectory_id),
        eng_(derive_seed(master_seed, trajectory_id, kNoiseSalt)) {}

  // Standard normal via Box-Muller (avoids the implementation-defined
  // std::normal_distribution).
  double normal() {
    ++count_;
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * kPi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  std::uint64_t draws() const { return count_; }
  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t trajectory_id() const { return trajectory_id_; }

 private:
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1p-53; }

  static constexpr double kPi = 3.14159265358979323846;
  static constexpr std::uint64_t kNoiseSalt = 0x6e6f697365ULL;

  std::uint64_t master_seed_;
  std::uint64_t trajectory_id_;
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
  std::uint64_t count_ = 0;
};

// Portable bounded uniform integer in [0, n), rejection sampled.
inline std::uint64_t bounded_uint(std::mt19937_64& eng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % n;
}

}  // namespace mff
