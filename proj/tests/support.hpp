#ifndef SPECKLE_TESTS_SUPPORT_HPP
#define SPECKLE_TESTS_SUPPORT_HPP

#include <speckle/core.hpp>
#include <speckle/random.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace speckle::test
{

inline Pattern random_pattern(Rng& rng, Index rows, Index cols, double lo = 0.0,
                              double hi = 1.0)
{
  Pattern p(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r)
      p(r, c) = rng.uniform(lo, hi);
  return p;
}

inline PatternStack random_stack(Rng& rng, std::size_t n, Index rows, Index cols)
{
  std::vector<Pattern> ps;
  for (std::size_t i = 0; i < n; ++i)
    ps.push_back(random_pattern(rng, rows, cols));
  return PatternStack(std::move(ps));
}

inline double max_abs_diff(const Pattern& a, const Pattern& b)
{
  return (a - b).cwiseAbs().maxCoeff();
}

/// Pattern i, pixel k = (1 + H(i, k)) / 2 for the Sylvester Hadamard matrix
/// of order side^2 (side a power of two), pixels in row-major order. Only
/// pixel (0, 0) never fluctuates.
inline PatternStack hadamard_stack(Index side)
{
  const Index n = side * side;
  std::vector<Pattern> ps;
  for (Index i = 0; i < n; ++i)
  {
    Pattern p(side, side);
    for (Index k = 0; k < n; ++k)
    {
      const int sign = __builtin_popcountll(static_cast<unsigned long long>(i & k)) % 2 ? -1 : 1;
      p(k / side, k % side) = (1 + sign) / 2;
    }
    ps.push_back(p);
  }
  return PatternStack(std::move(ps));
}

/// A fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
  const auto dir = std::filesystem::temp_directory_path() / "speckle_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace speckle::test

#endif // SPECKLE_TESTS_SUPPORT_HPP
