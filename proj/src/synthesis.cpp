#include <speckle/synthesis.hpp>

#include <speckle/fft.hpp>
#include <speckle/random.hpp>

#include <cmath>
#include <numbers>

namespace speckle
{

namespace
{

void check_dimensions(const SynthesisSpec& spec)
{
  if (spec.width <= 0)
    throw InvalidArgument("width must be positive");
  if (spec.height <= 0)
    throw InvalidArgument("height must be positive");
}

/// Radial spatial frequency of bin (r, c) in cycles per pixel.
double radial_frequency(Index r, Index c, Index rows, Index cols)
{
  const double fr = static_cast<double>(signed_frequency(r, rows)) / rows;
  const double fc = static_cast<double>(signed_frequency(c, cols)) / cols;
  return std::hypot(fr, fc);
}

} // namespace

std::string to_string(SynthesisKind kind)
{
  return kind == SynthesisKind::Pink ? "pink" : "rayleigh";
}

SynthesisKind parse_synthesis_kind(const std::string& name)
{
  if (name == "pink")
    return SynthesisKind::Pink;
  if (name == "rayleigh")
    return SynthesisKind::Rayleigh;
  throw InvalidArgument("unknown pattern kind '" + name + "'");
}

Pattern synth_pink(const SynthesisSpec& spec)
{
  check_dimensions(spec);
  if (!(spec.spectralExponent > 0))
    throw InvalidArgument("spectral exponent must be positive");

  const Index rows = spec.height;
  const Index cols = spec.width;
  const double fMin = 1.0 / static_cast<double>(std::max(rows, cols));
  const double dcAmplitude = std::pow(fMin, -spec.spectralExponent / 2);

  Rng rng(spec.seed);
  ComplexImage spectrum(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r)
    {
      const double f = radial_frequency(r, c, rows, cols);
      const double amplitude =
          f > 0 ? std::pow(f, -spec.spectralExponent / 2) : dcAmplitude;
      const double phase = 2 * std::numbers::pi * rng.uniform();
      spectrum(r, c) = std::polar(amplitude, phase);
    }

  const Pattern field = ifft2(spectrum).real();
  const double lo = field.minCoeff();
  const double hi = field.maxCoeff();
  if (!(hi > lo))
    return Pattern::Zero(rows, cols);
  Pattern out = (field.array() - lo) / (hi - lo);
  // Pin the extremes so the range is exactly [0, 1] after rounding.
  Index r, c;
  field.minCoeff(&r, &c);
  out(r, c) = 0.0;
  field.maxCoeff(&r, &c);
  out(r, c) = 1.0;
  return out;
}

Pattern synth_rayleigh(const SynthesisSpec& spec)
{
  check_dimensions(spec);
  if (!(spec.grainSize >= 1))
    throw InvalidArgument("grain size must be at least 1 pixel");

  const Index rows = spec.height;
  const Index cols = spec.width;

  Rng rng(spec.seed);
  ComplexImage field(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r)
    {
      const double re = rng.normal();
      const double im = rng.normal();
      field(r, c) = {re, im};
    }

  ComplexImage spectrum = fft2(field);
  const double scale = std::numbers::pi * spec.grainSize;
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r)
    {
      const double f = radial_frequency(r, c, rows, cols);
      spectrum(r, c) *= std::exp(-0.5 * (scale * f) * (scale * f));
    }

  const Pattern intensity = ifft2(spectrum).cwiseAbs2();
  const double mean = intensity.mean();
  if (!(mean > 0))
    return Pattern::Zero(rows, cols);
  return intensity / mean;
}

Pattern synthesize(const SynthesisSpec& spec)
{
  return spec.kind == SynthesisKind::Pink ? synth_pink(spec)
                                          : synth_rayleigh(spec);
}

} // namespace speckle
