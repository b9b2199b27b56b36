#ifndef SPECKLE_RANDOM_HPP
#define SPECKLE_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <sstream>
#include <string>
#include <utility>

/// Reproducible random numbers.
///
/// Streams use std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The value transforms below are written out explicitly instead
/// of using <random> distributions, whose algorithms are implementation
/// defined:
///   uniform  = (x >> 11) * 2^-53            in [0, 1)
///   normal   = Box-Muller on two uniforms   (cosine branch only)
///   below(n) = rejection sampling on the top bits, unbiased
/// Counter-keyed draws (noise per measurement index) use SplitMix64.
namespace speckle
{

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derive an independent seed from a base seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag)
{
  return splitmix64(base ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

inline double to_unit(std::uint64_t bits)
{
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class Rng
{
public:
  explicit Rng(std::uint64_t seed = 0) : mEngine(seed) {}

  std::uint64_t next() { return mEngine(); }

  double uniform() { return to_unit(mEngine()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal()
  {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n)
  {
    if (n <= 1)
      return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do
      x = mEngine();
    while (x >= limit);
    return x % n;
  }

  /// Fisher-Yates, back to front.
  template <typename T>
  void shuffle(std::span<T> items)
  {
    for (std::size_t i = items.size(); i > 1; --i)
    {
      const std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  std::string state() const
  {
    std::ostringstream os;
    os << mEngine;
    return os.str();
  }

  void set_state(const std::string& s)
  {
    std::istringstream is(s);
    is >> mEngine;
    if (!is)
      throw std::runtime_error("invalid rng state");
  }

  friend bool operator==(const Rng& a, const Rng& b)
  {
    return a.mEngine == b.mEngine;
  }

private:
  std::mt19937_64 mEngine;
};

} // namespace speckle

#endif // SPECKLE_RANDOM_HPP
