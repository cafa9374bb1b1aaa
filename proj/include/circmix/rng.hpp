#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace circmix {

//! splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z)
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//! Counter-based split of a root seed: stream `index` of family `stream`.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index)
{
  return mix64(mix64(root ^ mix64(stream + 0x632be59bd9b4e019ULL)) + index);
}

//! Seeded generator with platform-independent uniform/normal transforms.
//! Not thread-safe; give each worker its own instance.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  //! Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  //! Uniform on (0, 1).
  double uniform_open()
  {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  //! Standard normal by the Marsaglia polar method.
  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  std::uint64_t next_u64() { return engine_(); }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace circmix
