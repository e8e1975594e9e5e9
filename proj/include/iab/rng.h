/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef IAB_RNG_H
#define IAB_RNG_H

#include <cstddef>
#include <cstdint>
#include <random>

namespace iab {

/**
 * Portable seeded generator. The standard distributions are
 * implementation-defined, so draws are built directly on the raw 64-bit
 * engine output to keep results identical across toolchains.
 */
class Rng
{
public:
  explicit Rng (std::uint64_t seed) : m_engine (seed) {}

  std::uint64_t next () { return m_engine (); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01 () { return static_cast<double> (next () >> 11) * 0x1.0p-53; }

  double uniform (double lo, double hi) { return lo + (hi - lo) * uniform01 (); }

  /// Uniform on {0, ..., n-1}; rejection sampling avoids modulo bias.
  std::size_t uniform_index (std::size_t n)
  {
    if (n <= 1)
      {
        return 0;
      }
    const std::uint64_t bound = static_cast<std::uint64_t> (n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do
      {
        x = next ();
      }
    while (x >= limit);
    return static_cast<std::size_t> (x % bound);
  }

  bool bernoulli (double p) { return uniform01 () < p; }

private:
  std::mt19937_64 m_engine;
};

/// splitmix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t
mix_seed (std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t
derive_seed (std::uint64_t seed, std::uint64_t stream)
{
  return mix_seed (mix_seed (seed) ^ mix_seed (stream + 0x632be59bd9b4e019ULL));
}

} // namespace iab

#endif
