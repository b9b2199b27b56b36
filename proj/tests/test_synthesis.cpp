#include <speckle/synthesis.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace speckle;

namespace
{

/// Power spectrum by a separable direct DFT.
Pattern direct_power(const Pattern& p)
{
  using C = std::complex<double>;
  const Index n = p.rows(), m = p.cols();
  Eigen::MatrixXcd rowsDone(n, m);
  for (Index x = 0; x < n; ++x)
    for (Index v = 0; v < m; ++v)
    {
      C s = 0.0;
      for (Index y = 0; y < m; ++y)
        s += p(x, y) * std::polar(1.0, -2.0 * std::numbers::pi * double(v * y) / double(m));
      rowsDone(x, v) = s;
    }
  Pattern power(n, m);
  for (Index u = 0; u < n; ++u)
    for (Index v = 0; v < m; ++v)
    {
      C s = 0.0;
      for (Index x = 0; x < n; ++x)
        s += rowsDone(x, v) * std::polar(1.0, -2.0 * std::numbers::pi * double(u * x) / double(n));
      power(u, v) = std::norm(s);
    }
  return power;
}

/// Least-squares slope of log power against log radius over integer radius
/// bins in [lo, hi].
double radial_slope(const Pattern& power, int lo, int hi)
{
  const Index n = power.rows();
  std::vector<double> sum(n, 0.0), count(n, 0.0);
  for (Index u = 0; u < n; ++u)
    for (Index v = 0; v < n; ++v)
    {
      const double fu = u <= n / 2 ? u : u - n;
      const double fv = v <= n / 2 ? v : v - n;
      const auto r = static_cast<Index>(std::lround(std::hypot(fu, fv)));
      if (r < n)
      {
        sum[r] += power(u, v);
        count[r] += 1;
      }
    }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
  for (int r = lo; r <= hi; ++r)
  {
    const double x = std::log(double(r)), y = std::log(sum[r] / count[r]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    k += 1;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

double ks_exponential(std::vector<double> samples)
{
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
  {
    const double cdf = 1.0 - std::exp(-samples[i]);
    d = std::max({d, double(i + 1) / n - cdf, cdf - double(i) / n});
  }
  return d;
}

SynthesisSpec spec(SynthesisKind kind, Index w, Index h, std::uint64_t seed)
{
  SynthesisSpec s;
  s.kind = kind;
  s.width = w;
  s.height = h;
  s.seed = seed;
  return s;
}

} // namespace

TEST_CASE("pink pattern is deterministic and normalized")
{
  const auto s = spec(SynthesisKind::Pink, 40, 30, 7);
  const Pattern a = synth_pink(s);
  CHECK(a.rows() == 30);
  CHECK(a.cols() == 40);
  CHECK(a == synth_pink(s));
  CHECK(a.minCoeff() == 0.0);
  CHECK(a.maxCoeff() == 1.0);
  CHECK(a.allFinite());
}

TEST_CASE("pink spectrum falls off as 1/f")
{
  const Pattern p = synth_pink(spec(SynthesisKind::Pink, 128, 128, 3));
  const double slope = radial_slope(direct_power(p), 3, 25);
  CHECK(slope >= -1.3);
  CHECK(slope <= -0.7);
}

TEST_CASE("pink radial power decreases with frequency")
{
  const Pattern p = synth_pink(spec(SynthesisKind::Pink, 64, 64, 12));
  const Pattern power = direct_power(p);
  CHECK(radial_slope(power, 1, 4) < 0.0);
  CHECK(radial_slope(power, 4, 16) < 0.0);
  CHECK(radial_slope(power, 16, 31) < 0.0);
}

TEST_CASE("Rayleigh speckle has unit mean and exponential intensity")
{
  const auto s = spec(SynthesisKind::Rayleigh, 256, 256, 5);
  const Pattern p = synth_rayleigh(s);
  CHECK(p.mean() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.minCoeff() >= 0.0);
  CHECK(p == synth_rayleigh(s));

  // Raster-order samples 4 grains apart.
  std::vector<double> samples;
  const auto stride = static_cast<Index>(4 * s.grainSize);
  for (Index i = 0; i < p.size(); i += stride)
    samples.push_back(p(i / p.cols(), i % p.cols()));
  CHECK(ks_exponential(samples) < 0.05);
}

TEST_CASE("different seeds give different patterns")
{
  for (auto kind : {SynthesisKind::Pink, SynthesisKind::Rayleigh})
  {
    const Pattern a = synthesize(spec(kind, 32, 32, 1));
    const Pattern b = synthesize(spec(kind, 32, 32, 2));
    CHECK((a.array() != b.array()).count() >= Index(0.99 * 1024));
  }
}

TEST_CASE("synthesis rejects invalid specs")
{
  CHECK_THROWS_AS(synth_pink(spec(SynthesisKind::Pink, 0, 4, 1)), InvalidArgument);
  CHECK_THROWS_AS(synth_rayleigh(spec(SynthesisKind::Rayleigh, 4, 0, 1)),
                  InvalidArgument);
  auto s = spec(SynthesisKind::Pink, 8, 8, 1);
  s.spectralExponent = 0.0;
  CHECK_THROWS_AS(synth_pink(s), InvalidArgument);
  s = spec(SynthesisKind::Rayleigh, 8, 8, 1);
  s.grainSize = 0.5;
  CHECK_THROWS_AS(synth_rayleigh(s), InvalidArgument);
  CHECK(parse_synthesis_kind("rayleigh") == SynthesisKind::Rayleigh);
  CHECK(to_string(SynthesisKind::Pink) == "pink");
  CHECK_THROWS_AS(parse_synthesis_kind("white"), InvalidArgument);
}
