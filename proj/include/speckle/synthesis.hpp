#ifndef SPECKLE_SYNTHESIS_HPP
#define SPECKLE_SYNTHESIS_HPP

#include <speckle/core.hpp>

#include <cstdint>
#include <string>

namespace speckle
{

enum class SynthesisKind
{
  Pink,
  Rayleigh,
};

std::string to_string(SynthesisKind kind);
SynthesisKind parse_synthesis_kind(const std::string& name);

struct SynthesisSpec
{
  Index width = 0;
  Index height = 0;
  std::uint64_t seed = 0;
  SynthesisKind kind = SynthesisKind::Pink;
  /// Power-law exponent of the pink spectrum, power ~ f^-alpha.
  double spectralExponent = 1.0;
  /// Speckle grain scale in pixels for the Rayleigh generator.
  double grainSize = 4.0;
};

/// Random-phase field with amplitude f^(-alpha/2), real part, min-max
/// normalized to [0, 1]. The DC amplitude equals the lowest nonzero one.
Pattern synth_pink(const SynthesisSpec& spec);

/// Circular-Gaussian field low-pass filtered by exp(-(pi g f)^2 / 2), so the
/// field correlation falls as exp(-r^2 / g^2); intensity is |field|^2
/// scaled to unit mean.
Pattern synth_rayleigh(const SynthesisSpec& spec);

/// Dispatch on spec.kind.
Pattern synthesize(const SynthesisSpec& spec);

} // namespace speckle

#endif // SPECKLE_SYNTHESIS_HPP
