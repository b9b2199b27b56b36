#ifndef SPECKLE_IMAGE_IO_HPP
#define SPECKLE_IMAGE_IO_HPP

#include <speckle/core.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

/// Binary portable graymaps (P5), 8-bit or big-endian 16-bit, row-major.
namespace speckle
{

enum class Depth
{
  Eight = 8,
  Sixteen = 16,
};

inline int max_value(Depth d) { return d == Depth::Eight ? 255 : 65535; }

/// Values must be finite and within [0, 1]; stored as round(v * maxval).
std::string encode_pgm(const Pattern& p, Depth depth);

/// Decodes to values / maxval. Throws FormatError on a malformed header, an
/// unsupported maxval, a payload of the wrong length, or a depth different
/// from `expected` when given.
Pattern decode_pgm(std::string_view bytes, Depth* depth = nullptr,
                   std::optional<Depth> expected = std::nullopt);

void write_pattern_image(const Pattern& p, const std::filesystem::path& path,
                         Depth depth = Depth::Sixteen);

Pattern read_pattern_image(const std::filesystem::path& path,
                           Depth* depth = nullptr,
                           std::optional<Depth> expected = std::nullopt);

/// Affine map of a signed image onto [0, 1]: stored = (v - offset) * scale.
struct AffineMap
{
  double offset = 0.0;
  double scale = 1.0;
};

AffineMap full_range_map(const Pattern& p);

} // namespace speckle

#endif // SPECKLE_IMAGE_IO_HPP
