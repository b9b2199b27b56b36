#ifndef SPECKLE_DATASET_HPP
#define SPECKLE_DATASET_HPP

#include <speckle/cgi.hpp>
#include <speckle/core.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace speckle
{

/// Training or test objects of one shared size.
struct ObjectDataset
{
  std::vector<ObjectImage> objects;
  /// Empty, or one label per object.
  std::vector<int> labels;
  std::string provenance;

  std::size_t size() const { return objects.size(); }
  Index rows() const { return objects.empty() ? 0 : objects.front().rows(); }
  Index cols() const { return objects.empty() ? 0 : objects.front().cols(); }

  /// Throws unless non-empty with uniform dimensions.
  void validate() const;
};

// --- IDX containers ---------------------------------------------------------

struct IdxHeader
{
  std::array<std::uint8_t, 4> magic{};
  std::vector<std::uint32_t> dims;
};

/// Decoded IDX image file (magic 0x00000803): count x rows x cols bytes.
struct IdxImages
{
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;

  /// Image i as doubles in [0, 255].
  Image<double> image(std::size_t i) const;
};

IdxHeader parse_idx_header(std::span<const std::uint8_t> bytes);
IdxImages parse_idx_images(std::span<const std::uint8_t> bytes);
/// Label file, magic 0x00000801.
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

// --- objects ----------------------------------------------------------------

/// Nearest-neighbor resize to target x target (block replication for integer
/// factors), scale by 1/fullScale, then binarize: transmission 1 where the
/// scaled value >= threshold.
ObjectImage to_object(const Image<double>& raw, Index target,
                      double threshold = 0.5, double fullScale = 255.0,
                      std::string name = {});

/// Loads up to `limit` digits starting at `offset` (limit 0 = all).
ObjectDataset load_idx_dataset(const std::filesystem::path& images,
                               Index grid, double threshold = 0.5,
                               std::size_t offset = 0, std::size_t limit = 0,
                               const std::filesystem::path& labels = {});

/// Names of the procedural fixtures in builtin_objects order.
std::vector<std::string> builtin_names();

/// Three horizontal bars, a pi glyph, block letters "CGI" and a two-disc
/// figure, rendered at grid x grid. grid must be at least 16.
ObjectDataset builtin_objects(Index grid);

/// One builtin by name.
ObjectImage builtin_object(const std::string& name, Index grid);

/// Seven-segment digit glyphs with seeded jitter in position, size, stroke
/// width and slant. A stand-in for handwritten digits when no IDX file is
/// available.
ObjectDataset glyph_objects(Index grid, std::size_t count, std::uint64_t seed);

} // namespace speckle

#endif // SPECKLE_DATASET_HPP
