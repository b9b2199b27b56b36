#include "oracles.hpp"
#include "support.hpp"

#include <speckle/analysis.hpp>
#include <speckle/cgi.hpp>
#include <speckle/synthesis.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace speckle;
using test::gamma2_oracle;
using test::random_pattern;

namespace
{

CorrelationMap gaussian_map(double sigma, Index half)
{
  CorrelationMap m;
  m.maxShiftRows = half;
  m.maxShiftCols = half;
  m.values.resize(2 * half + 1, 2 * half + 1);
  for (Index r = -half; r <= half; ++r)
    for (Index c = -half; c <= half; ++c)
      m.values(r + half, c + half) = std::exp(-double(r * r + c * c) / (2 * sigma * sigma));
  return m;
}

/// White noise smoothed by a normalized Gaussian kernel of width sigmaK. The
/// intensity correlation is Gaussian with width sigmaK * sqrt(2).
PatternStack gaussian_correlated_stack(std::size_t n, Index side, double sigmaK,
                                       std::uint64_t seed)
{
  const Index radius = static_cast<Index>(std::ceil(4 * sigmaK));
  Kernel k(2 * radius + 1, 2 * radius + 1);
  for (Index r = 0; r < k.rows(); ++r)
    for (Index c = 0; c < k.cols(); ++c)
      k(r, c) = std::exp(-double((r - radius) * (r - radius) + (c - radius) * (c - radius)) /
                         (2 * sigmaK * sigmaK));
  k /= k.sum();
  Rng rng(seed);
  std::vector<Pattern> ps;
  for (std::size_t i = 0; i < n; ++i)
  {
    Pattern white(side + 2 * radius, side + 2 * radius);
    for (Index j = 0; j < white.size(); ++j)
      white(j) = rng.normal();
    ps.push_back(correlate2d(white, k));
  }
  return PatternStack(std::move(ps));
}

} // namespace

TEST_CASE("gamma2 needs two patterns and vanishes for identical ones")
{
  Rng rng(1);
  const Pattern p = random_pattern(rng, 4, 5);
  CHECK_THROWS_AS(gamma2(PatternStack({p})), InvalidArgument);
  const CorrelationMap m = gamma2(PatternStack({p, p, p}));
  CHECK(m.values.rows() == 7);
  CHECK(m.values.cols() == 9);
  CHECK(m.values.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("gamma2 matches the quadruple-loop oracle")
{
  Pattern a(3, 3), b(3, 3);
  a << 1, 0, 2, 3, 1, 0, 0, 2, 1;
  b << 0, 2, 1, 1, 3, 2, 2, 0, 0;
  const PatternStack s({a, b});
  CHECK(test::max_abs_diff(gamma2(s).values, gamma2_oracle(s)) < 1e-12);

  Rng rng(2);
  for (int seed = 0; seed < 50; ++seed)
  {
    const PatternStack r = test::random_stack(rng, 2 + rng.below(5),
                                              2 + Index(rng.below(5)), 2 + Index(rng.below(5)));
    CHECK(test::max_abs_diff(gamma2(r).values, gamma2_oracle(r)) < 1e-10);
  }
}

TEST_CASE("gamma2 is point symmetric and peaks at the fluctuation variance")
{
  Rng rng(3);
  const PatternStack s = test::random_stack(rng, 6, 7, 5);
  const CorrelationMap m = gamma2(s);
  for (Index r = -6; r <= 6; ++r)
    for (Index c = -4; c <= 4; ++c)
      CHECK(std::abs(m.at(r, c) - m.at(-r, -c)) < 1e-10);

  double var = 0;
  for (const auto& f : fluctuations(s))
    var += f.squaredNorm() / double(f.size());
  CHECK(m.peak() == doctest::Approx(var / 6).epsilon(1e-12));

  const CorrelationMap n = peak_normalized(m);
  CHECK(n.peak() == doctest::Approx(1.0));
  CHECK(n.normalization == CorrelationNormalization::PeakNormalized);
}

TEST_CASE("verify_correlation_transfer agrees on small instances")
{
  Rng rng(4);
  for (int seed = 0; seed < 100; ++seed)
  {
    const Pattern p = random_pattern(rng, 6, 6);
    std::vector<Kernel> ks;
    for (int i = 0; i < 4; ++i)
      ks.push_back(random_pattern(rng, 2, 2, -1, 1));
    CHECK(verify_correlation_transfer(p, ks) < 1e-10);
  }
  const Pattern p = random_pattern(rng, 6, 6);
  const Kernel k = random_pattern(rng, 2, 2);
  CHECK(verify_correlation_transfer(p, std::vector<Kernel>{k}) == 0.0);
  CHECK(verify_correlation_transfer(p, std::vector<Kernel>{k, k, k}) < 1e-15);
  CHECK_THROWS_AS(verify_correlation_transfer(p, std::vector<Kernel>{}), InvalidArgument);
}

TEST_CASE("fourier spectrum of simple inputs")
{
  const SpectrumMap flat = fourier_spectrum(PatternStack({Pattern::Constant(8, 8, 2.0)}));
  CHECK(flat.magnitude(4, 4) == doctest::Approx(128.0));
  CHECK(flat.magnitude.sum() == doctest::Approx(128.0));
  CHECK(flat.rowFrequency(4) == 0.0);

  Pattern cosine(8, 8);
  for (Index r = 0; r < 8; ++r)
    for (Index c = 0; c < 8; ++c)
      cosine(r, c) = std::cos(2 * std::numbers::pi * 2 * double(c) / 8);
  const SpectrumMap m = fourier_spectrum(PatternStack({cosine}));
  CHECK(m.magnitude(4, 2) == doctest::Approx(32.0));
  CHECK(m.magnitude(4, 6) == doctest::Approx(32.0));
  CHECK(m.magnitude.sum() == doctest::Approx(64.0));
  CHECK(m.colFrequency(6) == doctest::Approx(0.25));
}

TEST_CASE("fourier spectrum obeys Parseval")
{
  Rng rng(5);
  const Pattern p = random_pattern(rng, 9, 12);
  const SpectrumMap m = fourier_spectrum(PatternStack({p}));
  CHECK(m.magnitude.squaredNorm() ==
        doctest::Approx(108.0 * p.squaredNorm()).epsilon(1e-9));
}

TEST_CASE("pink stack spectrum decreases radially")
{
  std::vector<Pattern> ps;
  for (std::uint64_t s = 0; s < 8; ++s)
  {
    SynthesisSpec spec;
    spec.width = 64;
    spec.height = 64;
    spec.seed = s;
    ps.push_back(synth_pink(spec));
  }
  const SpectrumMap m = fourier_spectrum(PatternStack(ps));
  const RadialProfile prof = radial_profile(m.magnitude, 32, 32, 1.0);
  double prev = prof.value[1];
  for (std::size_t r : {2, 4, 8, 16, 30})
  {
    CHECK(prof.value[r] < prev);
    prev = prof.value[r];
  }
}

TEST_CASE("radial profile bins by distance")
{
  Image<double> m(5, 5);
  for (Index r = 0; r < 5; ++r)
    for (Index c = 0; c < 5; ++c)
      m(r, c) = std::hypot(double(r - 2), double(c - 2));
  const RadialProfile p = radial_profile(m, 2, 2);
  REQUIRE(p.radius.size() == p.value.size());
  CHECK(p.radius[0] == 0.0);
  CHECK(p.count[0] == 1);
  for (std::size_t i = 0; i < p.radius.size(); ++i)
    if (p.count[i] > 0)
      CHECK(p.value[i] == doctest::Approx(p.radius[i]));
  CHECK_THROWS_AS(radial_profile(m, 2, 2, 0.0), InvalidArgument);
}

TEST_CASE("correlation width fixtures")
{
  CorrelationMap delta;
  delta.maxShiftRows = 5;
  delta.maxShiftCols = 5;
  delta.values = Image<double>::Zero(11, 11);
  delta.values(5, 5) = 1.0;
  CHECK(correlation_width(delta) <= 1.0);

  const double w2 = correlation_width(gaussian_map(2.0, 15));
  CHECK(std::abs(w2 - 2 * std::sqrt(2 * std::log(2.0)) * 2.0) <= 0.2);
  CHECK(correlation_width(gaussian_map(3.0, 15)) > w2);

  CorrelationMap broad = gaussian_map(2.0, 15);
  for (Index j = 0; j < broad.values.size(); ++j)
    broad.values(j) = std::sqrt(broad.values(j));
  CHECK(correlation_width(broad) > w2);

  delta.values(5, 5) = 0.0;
  CHECK_THROWS_AS(correlation_width(delta), InvalidArgument);
}

TEST_CASE("correlation width recovers a constructed grain")
{
  const double sigmaK = 2.0;
  const PatternStack s = gaussian_correlated_stack(300, 32, sigmaK, 6);
  const double expected = 2 * std::sqrt(2 * std::log(2.0)) * sigmaK * std::sqrt(2.0);
  CHECK(std::abs(correlation_width(gamma2(s)) - expected) < 0.1 * expected);
}

TEST_CASE("pearson")
{
  Rng rng(7);
  const Pattern a = random_pattern(rng, 5, 5);
  CHECK(pearson(a, a) == doctest::Approx(1.0));
  CHECK(pearson(a, (3.0 - 2.0 * a.array()).matrix()) == doctest::Approx(-1.0));
  bool degenerate = false;
  CHECK(pearson(a, Pattern::Ones(5, 5), &degenerate) == 0.0);
  CHECK(degenerate);
  CHECK_THROWS_AS(pearson(a, Pattern::Ones(4, 5)), ShapeError);
}

TEST_CASE("quality report on exact and flat reconstructions")
{
  Pattern t = Pattern::Zero(4, 4);
  t.col(1).setOnes();
  const ObjectImage obj(t);

  Reconstruction exact;
  exact.g = t;
  const QualityReport q = quality_report(exact, obj);
  CHECK(q.pearson == doctest::Approx(1.0));
  REQUIRE(q.mse);
  CHECK(*q.mse == 0.0);
  CHECK_FALSE(q.cnr);
  CHECK_FALSE(q.snrMeasuredDb);

  Reconstruction flat;
  flat.g = Pattern::Constant(4, 4, 0.3);
  const QualityReport f = quality_report(flat, obj);
  CHECK(f.pearson == 0.0);
  CHECK(f.pearsonDegenerate);
  CHECK_FALSE(f.cnr);

  CHECK_THROWS_AS(quality_report(flat, ObjectImage(Pattern::Ones(4, 4))), InvalidArgument);
  CHECK_THROWS_AS(quality_report(flat, ObjectImage(Pattern::Ones(3, 4))), ShapeError);
}

TEST_CASE("quality report matches a hand computation")
{
  Pattern g(4, 4), t = Pattern::Zero(4, 4);
  g << 5, 4, 1, 0, 6, 5, 2, 1, 1, 0, 2, 1, 0, 1, 1, 2;
  t.topLeftCorner(2, 2).setOnes();
  Reconstruction r;
  r.g = g;
  const QualityReport q = quality_report(r, ObjectImage(t));

  // Object pixels 5,4,6,5: mean 5. Background: 1,0,2,1,1,0,2,1,0,1,1,2 (sum 12), mean 1.
  const double go = 5.0, gb = 1.0;
  double within = (0 + 1 + 1 + 0);
  double bvar = 0;
  for (double v : {1, 0, 2, 1, 1, 0, 2, 1, 0, 1, 1, 2})
  {
    within += (v - gb) * (v - gb);
    bvar += (v - gb) * (v - gb) / 12;
  }
  REQUIRE(q.mse);
  CHECK(std::abs(*q.mse - within / 16 / (go * go)) < 1e-10);
  REQUIRE(q.cnr);
  CHECK(std::abs(*q.cnr - (go - gb) / std::sqrt(bvar)) < 1e-10);
  REQUIRE(q.snrMeasuredDb);
  CHECK(std::abs(*q.snrMeasuredDb - 10 * std::log10(go / gb)) < 1e-10);

  double gm = g.mean(), tm = t.mean(), sgt = 0, sgg = 0, stt = 0;
  for (Index j = 0; j < 16; ++j)
  {
    sgt += (g(j) - gm) * (t(j) - tm);
    sgg += (g(j) - gm) * (g(j) - gm);
    stt += (t(j) - tm) * (t(j) - tm);
  }
  CHECK(std::abs(q.pearson - sgt / std::sqrt(sgg * stt)) < 1e-10);
}
