#ifndef SPECKLE_TESTS_ORACLES_HPP
#define SPECKLE_TESTS_ORACLES_HPP

#include <speckle/cgi.hpp>
#include <speckle/core.hpp>

#include <cmath>

/// Direct loop implementations used as references.
namespace speckle::test
{

inline Pattern correlate_oracle(const Pattern& p, const Kernel& k)
{
  Pattern out(p.rows() - k.rows() + 1, p.cols() - k.cols() + 1);
  for (Index x = 0; x < out.rows(); ++x)
    for (Index y = 0; y < out.cols(); ++y)
    {
      double s = 0.0;
      for (Index m = 0; m < k.rows(); ++m)
        for (Index n = 0; n < k.cols(); ++n)
          s += k(m, n) * p(x + m, y + n);
      out(x, y) = s;
    }
  return out;
}

inline BucketSeries bucket_oracle(const PatternStack& s, const Pattern& t)
{
  BucketSeries b(static_cast<Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i)
  {
    double sum = 0.0;
    for (Index x = 0; x < t.rows(); ++x)
      for (Index y = 0; y < t.cols(); ++y)
        sum += s[i](x, y) * t(x, y);
    b(static_cast<Index>(i)) = sum;
  }
  return b;
}

inline Pattern covariance_oracle(const PatternStack& s, const BucketSeries& b)
{
  const double n = static_cast<double>(s.size());
  Pattern g(s.rows(), s.cols());
  for (Index x = 0; x < s.rows(); ++x)
    for (Index y = 0; y < s.cols(); ++y)
    {
      double bp = 0, bs = 0, ps = 0;
      for (std::size_t i = 0; i < s.size(); ++i)
      {
        bp += b(Index(i)) * s[i](x, y);
        bs += b(Index(i));
        ps += s[i](x, y);
      }
      g(x, y) = bp / n - (bs / n) * (ps / n);
    }
  return g;
}

/// Quadruple loop over displacements and pixels.
inline Image<double> gamma2_oracle(const PatternStack& s)
{
  const Index h = s.rows(), w = s.cols();
  const double n = double(s.size());
  Image<double> out(2 * h - 1, 2 * w - 1);
  for (Index dx = -(h - 1); dx <= h - 1; ++dx)
    for (Index dy = -(w - 1); dy <= w - 1; ++dy)
    {
      double sum = 0.0;
      Index area = 0;
      for (Index x = 0; x < h; ++x)
        for (Index y = 0; y < w; ++y)
        {
          if (x + dx < 0 || x + dx >= h || y + dy < 0 || y + dy >= w)
            continue;
          ++area;
          double mx = 0, my = 0;
          for (const auto& p : s)
          {
            mx += p(x, y) / n;
            my += p(x + dx, y + dy) / n;
          }
          for (const auto& p : s)
            sum += (p(x, y) - mx) * (p(x + dx, y + dy) - my);
        }
      out(dx + h - 1, dy + w - 1) = sum / n / double(area);
    }
  return out;
}

struct LossOracle
{
  /// Within-class squared deviation over the object-mean square.
  double objectMean = 0.0;
  /// Within-class over total squared deviation.
  double deviation = 0.0;
};

/// Both loss normalizations from G built by the bucket and covariance oracles.
inline LossOracle loss_oracle(const PatternStack& s, const Pattern& t)
{
  const Pattern g = covariance_oracle(s, bucket_oracle(s, t));
  const Index n = g.size();
  double so = 0, sb = 0, no = 0, nb = 0, gm = 0;
  for (Index j = 0; j < n; ++j)
  {
    if (t(j) > 0)
      so += g(j), no += 1;
    else
      sb += g(j), nb += 1;
    gm += g(j) / double(n);
  }
  const double go = so / no, gb = sb / nb;
  double within = 0, total = 0;
  for (Index j = 0; j < n; ++j)
  {
    const double x = t(j) > 0 ? go : gb;
    within += (g(j) - x) * (g(j) - x);
    total += (g(j) - gm) * (g(j) - gm);
  }
  return {within / double(n) / (go * go), within / total};
}

} // namespace speckle::test

#endif // SPECKLE_TESTS_ORACLES_HPP
