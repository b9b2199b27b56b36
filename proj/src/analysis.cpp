#include <speckle/analysis.hpp>

#include <speckle/fft.hpp>

#include <algorithm>
#include <cmath>

namespace speckle
{

CorrelationMap gamma2(const PatternStack& stack)
{
  if (stack.size() < 2)
    throw InvalidArgument("gamma2 needs at least two patterns");

  const Index rows = stack.rows();
  const Index cols = stack.cols();
  const PatternStack deltas = fluctuations(stack);

  // Zero padding to twice the size keeps the circular correlation free of
  // wrap-around for every displacement up to (rows-1, cols-1).
  Image<double> sum = Image<double>::Zero(2 * rows, 2 * cols);
  for (const auto& d : deltas)
  {
    ComplexImage padded = ComplexImage::Zero(2 * rows, 2 * cols);
    padded.topLeftCorner(rows, cols) = d.cast<std::complex<double>>();
    const ComplexImage spectrum = fft2(padded);
    sum += ifft2(spectrum.cwiseAbs2().cast<std::complex<double>>()).real();
  }

  CorrelationMap map;
  map.maxShiftRows = rows - 1;
  map.maxShiftCols = cols - 1;
  map.values.resize(2 * rows - 1, 2 * cols - 1);
  const double n = static_cast<double>(stack.size());
  for (Index dc = -(cols - 1); dc < cols; ++dc)
    for (Index dr = -(rows - 1); dr < rows; ++dr)
    {
      const double overlap =
          static_cast<double>((rows - std::abs(dr)) * (cols - std::abs(dc)));
      const Index r = dr < 0 ? dr + 2 * rows : dr;
      const Index c = dc < 0 ? dc + 2 * cols : dc;
      map.values(dr + rows - 1, dc + cols - 1) = sum(r, c) / (n * overlap);
    }

  // Point symmetry holds analytically; enforce it against FFT rounding.
  const Image<double> flipped = map.values.reverse();
  map.values = 0.5 * (map.values + flipped);
  return map;
}

CorrelationMap peak_normalized(const CorrelationMap& map)
{
  if (!(map.peak() > 0))
    throw InvalidArgument("correlation peak is not positive; the stack has "
                          "no intensity fluctuation");
  CorrelationMap out = map;
  out.values /= map.peak();
  out.normalization = CorrelationNormalization::PeakNormalized;
  return out;
}

double verify_correlation_transfer(const Pattern& pattern, std::span<const Kernel> kernels)
{
  if (kernels.empty())
    throw InvalidArgument("verify_correlation_transfer needs at least one kernel");
  const Index kr = kernels.front().rows();
  const Index kc = kernels.front().cols();
  for (const auto& k : kernels)
    if (k.rows() != kr || k.cols() != kc)
      throw ShapeError("verify_correlation_transfer kernels must share a size");

  // Left side: correlate, take ensemble fluctuations, average products.
  std::vector<Pattern> outputs;
  for (const auto& k : kernels)
    outputs.push_back(correlate2d(pattern, k));
  const PatternStack deltas = fluctuations(PatternStack(std::move(outputs)));
  const Index positions = deltas.rows() * deltas.cols();
  const double n = static_cast<double>(kernels.size());

  Eigen::MatrixXd outFluct(static_cast<Index>(kernels.size()), positions);
  for (std::size_t i = 0; i < kernels.size(); ++i)
    outFluct.row(static_cast<Index>(i)) = deltas[i].reshaped().transpose();
  const Eigen::MatrixXd lhs = outFluct.transpose() * outFluct / n;

  // Right side: kernel fluctuation correlation contracted with patches of P.
  Kernel meanKernel = Kernel::Zero(kr, kc);
  for (const auto& k : kernels)
    meanKernel += k;
  meanKernel /= n;
  Eigen::MatrixXd kernelFluct(kr * kc, static_cast<Index>(kernels.size()));
  for (std::size_t i = 0; i < kernels.size(); ++i)
    kernelFluct.col(static_cast<Index>(i)) =
        (kernels[i] - meanKernel).reshaped();
  const Eigen::MatrixXd kernelCorr =
      kernelFluct * kernelFluct.transpose() / n;

  Eigen::MatrixXd patches(kr * kc, positions);
  for (Index y = 0; y < deltas.cols(); ++y)
    for (Index x = 0; x < deltas.rows(); ++x)
    {
      const Pattern block = pattern.block(x, y, kr, kc);
      patches.col(x + y * deltas.rows()) = block.reshaped();
    }
  const Eigen::MatrixXd rhs = patches.transpose() * kernelCorr * patches;

  return (lhs - rhs).cwiseAbs().maxCoeff();
}

SpectrumMap fourier_spectrum(const PatternStack& stack)
{
  const Index rows = stack.rows();
  const Index cols = stack.cols();
  Image<double> sum = Image<double>::Zero(rows, cols);
  for (const auto& p : stack)
    sum += fft2(p.cast<std::complex<double>>()).cwiseAbs();

  SpectrumMap out;
  out.magnitude = fftshift(sum / static_cast<double>(stack.size()));
  out.rowFrequency.resize(rows);
  out.colFrequency.resize(cols);
  for (Index r = 0; r < rows; ++r)
    out.rowFrequency(r) = static_cast<double>(r - rows / 2) / rows;
  for (Index c = 0; c < cols; ++c)
    out.colFrequency(c) = static_cast<double>(c - cols / 2) / cols;
  return out;
}

RadialProfile radial_profile(const Image<double>& map, Index centerRow,
                             Index centerCol, double binWidth)
{
  if (!(binWidth > 0))
    throw InvalidArgument("radial bin width must be positive");

  std::vector<double> radiusSum, valueSum;
  std::vector<std::size_t> count;
  for (Index c = 0; c < map.cols(); ++c)
    for (Index r = 0; r < map.rows(); ++r)
    {
      const double radius = std::hypot(static_cast<double>(r - centerRow),
                                       static_cast<double>(c - centerCol));
      const auto bin = static_cast<std::size_t>(std::lround(radius / binWidth));
      if (bin >= count.size())
      {
        radiusSum.resize(bin + 1, 0.0);
        valueSum.resize(bin + 1, 0.0);
        count.resize(bin + 1, 0);
      }
      radiusSum[bin] += radius;
      valueSum[bin] += map(r, c);
      ++count[bin];
    }

  RadialProfile out;
  for (std::size_t b = 0; b < count.size(); ++b)
  {
    if (count[b] == 0)
      continue;
    const auto k = static_cast<double>(count[b]);
    out.radius.push_back(radiusSum[b] / k);
    out.value.push_back(valueSum[b] / k);
    out.count.push_back(count[b]);
  }
  return out;
}

double correlation_width(const CorrelationMap& map)
{
  const double peak = map.peak();
  if (!(peak > 0))
    throw InvalidArgument("correlation peak is not positive; width undefined");

  const RadialProfile profile =
      radial_profile(map.values, map.maxShiftRows, map.maxShiftCols);
  const double half = 0.5 * profile.value.front();
  for (std::size_t b = 1; b < profile.value.size(); ++b)
  {
    if (profile.value[b] <= half)
    {
      const double r0 = profile.radius[b - 1];
      const double r1 = profile.radius[b];
      const double v0 = profile.value[b - 1];
      const double v1 = profile.value[b];
      return 2.0 * (r0 + (v0 - half) / (v0 - v1) * (r1 - r0));
    }
  }
  return 2.0 * profile.radius.back();
}

double pearson(const Image<double>& a, const Image<double>& b, bool* degenerate)
{
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("pearson: shapes differ");
  const Eigen::ArrayXXd da = a.array() - a.mean();
  const Eigen::ArrayXXd db = b.array() - b.mean();
  const double va = da.square().sum();
  const double vb = db.square().sum();
  if (!(va > 0) || !(vb > 0))
  {
    if (degenerate)
      *degenerate = true;
    return 0.0;
  }
  if (degenerate)
    *degenerate = false;
  return std::clamp((da * db).sum() / std::sqrt(va * vb), -1.0, 1.0);
}

QualityReport quality_report(const Reconstruction& recon,
                             const ObjectImage& obj)
{
  const Pattern& g = recon.g;
  if (g.rows() != obj.rows() || g.cols() != obj.cols())
    throw ShapeError("reconstruction and object dimensions differ");
  if (!obj.has_both_classes())
    throw InvalidArgument("quality metrics need both transmitting and blocked "
                          "pixels");

  const Mask mask = obj.mask();
  const auto objectPixels = static_cast<double>(mask.count());
  const auto backgroundPixels = static_cast<double>(mask.size()) - objectPixels;
  const double go = mask.select(g.array(), 0.0).sum() / objectPixels;
  const double gb = (!mask).select(g.array(), 0.0).sum() / backgroundPixels;

  QualityReport q;
  if (std::abs(go) >= 1e-12)
  {
    const Eigen::ArrayXXd reference = mask.select(
        go, Eigen::ArrayXXd::Constant(mask.rows(), mask.cols(), gb));
    q.mse = ((g.array() - reference) / go).square().mean();
  }

  const double varB =
      (!mask).select((g.array() - gb).square(), 0.0).sum() / backgroundPixels;
  // Flat up to rounding, relative to the overall scale of G.
  if (varB > 1e-24 * g.squaredNorm() / static_cast<double>(g.size()))
    q.cnr = (go - gb) / std::sqrt(varB);

  q.pearson = pearson(g, obj.transmission(), &q.pearsonDegenerate);

  if (go > 0 && gb > 0)
    q.snrMeasuredDb = 10.0 * std::log10(go / gb);
  return q;
}

} // namespace speckle
