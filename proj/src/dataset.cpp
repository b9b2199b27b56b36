#include <speckle/dataset.hpp>

#include <speckle/errors.hpp>
#include <speckle/random.hpp>

#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>

namespace speckle
{

void ObjectDataset::validate() const
{
  if (objects.empty())
    throw InvalidArgument("dataset is empty");
  for (std::size_t i = 0; i < objects.size(); ++i)
    if (objects[i].rows() != rows() || objects[i].cols() != cols())
      throw ShapeError("dataset object " + std::to_string(i) +
                       " differs in size from object 0");
  if (!labels.empty() && labels.size() != objects.size())
    throw ShapeError("dataset label count does not match object count");
}

// --- IDX --------------------------------------------------------------------

namespace
{

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t at)
{
  return (std::uint32_t{bytes[at]} << 24) | (std::uint32_t{bytes[at + 1]} << 16) |
         (std::uint32_t{bytes[at + 2]} << 8) | std::uint32_t{bytes[at + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::size_t checked_payload(const IdxHeader& h, std::size_t available)
{
  std::size_t expected = 1;
  for (std::size_t i = 0; i < h.dims.size(); ++i)
  {
    if (h.dims[i] != 0 && expected > SIZE_MAX / h.dims[i])
      throw FormatError("idx: dimension " + std::to_string(i) + " overflows");
    expected *= h.dims[i];
  }
  if (available < expected)
    throw FormatError("idx: payload truncated, expected " +
                      std::to_string(expected) + " bytes, found " +
                      std::to_string(available));
  if (available > expected)
    throw FormatError("idx: payload has " + std::to_string(available - expected) +
                      " trailing bytes");
  return expected;
}

} // namespace

IdxHeader parse_idx_header(std::span<const std::uint8_t> bytes)
{
  if (bytes.size() < 4)
    throw FormatError("idx: magic truncated");
  IdxHeader h;
  std::copy_n(bytes.begin(), 4, h.magic.begin());
  if (h.magic[0] != 0 || h.magic[1] != 0)
    throw FormatError("idx: magic must start with two zero bytes");
  if (h.magic[2] != 0x08)
    throw FormatError("idx: magic type byte must be 0x08 (unsigned byte)");
  const std::size_t rank = h.magic[3];
  if (bytes.size() < 4 + 4 * rank)
    throw FormatError("idx: dimension sizes truncated");
  for (std::size_t i = 0; i < rank; ++i)
    h.dims.push_back(read_be32(bytes, 4 + 4 * i));
  return h;
}

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes)
{
  const IdxHeader h = parse_idx_header(bytes);
  if (h.magic[3] != 3)
    throw FormatError("idx: wrong magic for an image file, expected "
                      "0x00000803 (rank 3), found rank " +
                      std::to_string(h.magic[3]));
  const std::size_t offset = 4 + 4 * h.dims.size();
  checked_payload(h, bytes.size() - offset);

  IdxImages out;
  out.count = h.dims[0];
  out.rows = h.dims[1];
  out.cols = h.dims[2];
  out.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                    bytes.end());
  return out;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes)
{
  const IdxHeader h = parse_idx_header(bytes);
  if (h.magic[3] != 1)
    throw FormatError("idx: wrong magic for a label file, expected 0x00000801");
  const std::size_t offset = 8;
  checked_payload(h, bytes.size() - offset);
  return {bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end()};
}

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images)
{
  if (images.pixels.size() != images.count * images.rows * images.cols)
    throw ShapeError("idx: pixel buffer does not match dimensions");
  std::vector<std::uint8_t> out{0, 0, 0x08, 3};
  write_be32(out, static_cast<std::uint32_t>(images.count));
  write_be32(out, static_cast<std::uint32_t>(images.rows));
  write_be32(out, static_cast<std::uint32_t>(images.cols));
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

Image<double> IdxImages::image(std::size_t i) const
{
  if (i >= count)
    throw InvalidArgument("idx: image index out of range");
  Image<double> img(static_cast<Index>(rows), static_cast<Index>(cols));
  const std::size_t base = i * rows * cols;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      img(static_cast<Index>(r), static_cast<Index>(c)) =
          pixels[base + r * cols + c];
  return img;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// --- objects ----------------------------------------------------------------

ObjectImage to_object(const Image<double>& raw, Index target, double threshold,
                      double fullScale, std::string name)
{
  if (target < 1)
    throw InvalidArgument("target size must be at least 1");
  if (raw.rows() < 1 || raw.cols() < 1)
    throw InvalidArgument("source image is empty");
  if (!(fullScale > 0))
    throw InvalidArgument("full scale must be positive");

  Pattern t(target, target);
  for (Index c = 0; c < target; ++c)
  {
    const Index sc = (2 * c + 1) * raw.cols() / (2 * target);
    for (Index r = 0; r < target; ++r)
    {
      const Index sr = (2 * r + 1) * raw.rows() / (2 * target);
      const double v = std::clamp(raw(sr, sc) / fullScale, 0.0, 1.0);
      t(r, c) = v >= threshold ? 1.0 : 0.0;
    }
  }
  return ObjectImage(std::move(t), std::move(name));
}

ObjectDataset load_idx_dataset(const std::filesystem::path& images, Index grid,
                               double threshold, std::size_t offset,
                               std::size_t limit,
                               const std::filesystem::path& labels)
{
  const IdxImages idx = parse_idx_images(read_file_bytes(images));
  std::vector<std::uint8_t> labelBytes;
  if (!labels.empty())
  {
    labelBytes = parse_idx_labels(read_file_bytes(labels));
    if (labelBytes.size() != idx.count)
      throw FormatError("idx: label count does not match image count");
  }

  ObjectDataset ds;
  const std::size_t stop =
      limit == 0 ? idx.count : std::min(idx.count, offset + limit);
  for (std::size_t i = offset; i < stop; ++i)
  {
    ds.objects.push_back(to_object(idx.image(i), grid, threshold, 255.0,
                                   "idx#" + std::to_string(i)));
    if (!labelBytes.empty())
      ds.labels.push_back(labelBytes[i]);
  }
  ds.provenance = "idx:" + images.string() + " offset=" +
                  std::to_string(offset) + " count=" +
                  std::to_string(ds.objects.size()) + " grid=" +
                  std::to_string(grid) + " threshold=" +
                  std::to_string(threshold);
  return ds;
}

namespace
{

/// Renders a predicate over pixel-center coordinates (u, v) in [0, 1]^2,
/// u along columns and v along rows.
template <typename Inside>
Pattern render(Index grid, Inside&& inside)
{
  Pattern t(grid, grid);
  for (Index c = 0; c < grid; ++c)
    for (Index r = 0; r < grid; ++r)
    {
      const double u = (static_cast<double>(c) + 0.5) / grid;
      const double v = (static_cast<double>(r) + 0.5) / grid;
      t(r, c) = inside(u, v) ? 1.0 : 0.0;
    }
  return t;
}

bool in_box(double u, double v, double u0, double u1, double v0, double v1)
{
  return u >= u0 && u < u1 && v >= v0 && v < v1;
}

// 5x7 bitmaps, one string per row.
constexpr std::array<const char*, 7> kGlyphC = {
    ".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."};
constexpr std::array<const char*, 7> kGlyphG = {
    ".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".###."};
constexpr std::array<const char*, 7> kGlyphI = {
    "#####", "..#..", "..#..", "..#..", "..#..", "..#..", "#####"};

bool letters(double u, double v)
{
  // Three 5-column glyphs separated by one blank column.
  constexpr double u0 = 0.05, u1 = 0.95, v0 = 0.3, v1 = 0.7;
  if (!in_box(u, v, u0, u1, v0, v1))
    return false;
  const auto col = static_cast<int>((u - u0) / (u1 - u0) * 17);
  const auto row = static_cast<int>((v - v0) / (v1 - v0) * 7);
  const int glyph = col / 6;
  const int gc = col % 6;
  if (gc == 5 || glyph > 2)
    return false;
  const auto& bitmap = glyph == 0 ? kGlyphC : glyph == 1 ? kGlyphG : kGlyphI;
  return bitmap[static_cast<std::size_t>(row)][gc] == '#';
}

bool taichi(double u, double v)
{
  const double cu = 0.5, cv = 0.5, radius = 0.4;
  auto dist = [](double a, double b, double ca, double cb) {
    return std::hypot(a - ca, b - cb);
  };
  if (dist(u, v, cu, cv) > radius)
    return false;
  const double small = radius / 2;
  const double dot = radius / 6;
  const bool upper = dist(u, v, cu, cv - small) <= small;
  const bool lower = dist(u, v, cu, cv + small) <= small;
  if (dist(u, v, cu, cv - small) <= dot)
    return false;
  if (dist(u, v, cu, cv + small) <= dot)
    return true;
  if (upper)
    return true;
  if (lower)
    return false;
  return u < cu;
}

} // namespace

std::vector<std::string> builtin_names()
{
  return {"three_lines", "pi", "letters", "taichi"};
}

ObjectImage builtin_object(const std::string& name, Index grid)
{
  if (grid < 16)
    throw InvalidArgument("builtin objects need a grid of at least 16");

  if (name == "three_lines")
    return ObjectImage(render(grid, [](double u, double v) {
                         return in_box(u, v, 0.15, 0.85, 0.2, 0.3) ||
                                in_box(u, v, 0.15, 0.85, 0.45, 0.55) ||
                                in_box(u, v, 0.15, 0.85, 0.7, 0.8);
                       }),
                       name);
  if (name == "pi")
    return ObjectImage(render(grid, [](double u, double v) {
                         return in_box(u, v, 0.15, 0.85, 0.2, 0.32) ||
                                in_box(u, v, 0.3, 0.42, 0.32, 0.82) ||
                                in_box(u, v, 0.58, 0.7, 0.32, 0.82);
                       }),
                       name);
  if (name == "letters")
    return ObjectImage(render(grid, letters), name);
  if (name == "taichi")
    return ObjectImage(render(grid, taichi), name);
  throw InvalidArgument("unknown builtin object '" + name + "'");
}

ObjectDataset builtin_objects(Index grid)
{
  ObjectDataset ds;
  for (const auto& name : builtin_names())
    ds.objects.push_back(builtin_object(name, grid));
  ds.provenance = "builtin grid=" + std::to_string(grid);
  return ds;
}

namespace
{

//  aaa
// f   b
//  ggg
// e   c
//  ddd
constexpr std::array<const char*, 10> kSegments = {
    "abcdef", "bc", "abdeg", "abcdg", "bcfg",
    "acdfg", "acdefg", "abc", "abcdefg", "abcdfg"};

double segment_distance(double x, double y, double x0, double y0, double x1,
                        double y1)
{
  const double dx = x1 - x0, dy = y1 - y0;
  const double len2 = dx * dx + dy * dy;
  const double t =
      len2 > 0 ? std::clamp(((x - x0) * dx + (y - y0) * dy) / len2, 0.0, 1.0)
               : 0.0;
  return std::hypot(x - (x0 + t * dx), y - (y0 + t * dy));
}

} // namespace

ObjectDataset glyph_objects(Index grid, std::size_t count, std::uint64_t seed)
{
  if (grid < 16)
    throw InvalidArgument("glyph objects need a grid of at least 16");
  if (count < 1)
    throw InvalidArgument("glyph count must be at least 1");

  Rng rng(seed);
  ObjectDataset ds;
  for (std::size_t i = 0; i < count; ++i)
  {
    const int digit = static_cast<int>(rng.below(10));
    const double height = rng.uniform(0.55, 0.8);
    const double width = height * rng.uniform(0.45, 0.7);
    const double cu = 0.5 + rng.uniform(-1, 1) * (0.45 - width / 2) * 0.6;
    const double cv = 0.5 + rng.uniform(-1, 1) * (0.45 - height / 2) * 0.6;
    const double stroke = rng.uniform(0.06, 0.11);
    const double slant = rng.uniform(-0.2, 0.2);

    // Corner points of the segment skeleton in glyph units, jittered.
    std::array<double, 12> pts = {0, 0, 1, 0, 0, 0.5, 1, 0.5, 0, 1, 1, 1};
    for (auto& p : pts)
      p += rng.uniform(-0.06, 0.06);
    auto px = [&](int k) { return pts[static_cast<std::size_t>(2 * k)]; };
    auto py = [&](int k) { return pts[static_cast<std::size_t>(2 * k + 1)]; };
    // Point ids: 0 top-left, 1 top-right, 2 mid-left, 3 mid-right,
    // 4 bottom-left, 5 bottom-right.
    auto segment_ends = [](char s) -> std::pair<int, int> {
      switch (s)
      {
      case 'a': return {0, 1};
      case 'b': return {1, 3};
      case 'c': return {3, 5};
      case 'd': return {4, 5};
      case 'e': return {2, 4};
      case 'f': return {0, 2};
      default: return {2, 3};
      }
    };
    const std::string segs = kSegments[static_cast<std::size_t>(digit)];

    Pattern t = render(grid, [&](double u, double v) {
      // Map to glyph units: x across, y down, with slant about the center.
      const double y = (v - cv) / height + 0.5;
      const double x = (u - cu + slant * (v - cv)) / width + 0.5;
      for (char s : segs)
      {
        const auto [p, q] = segment_ends(s);
        const double d =
            segment_distance(x * width, y * height, px(p) * width,
                             py(p) * height, px(q) * width, py(q) * height);
        if (d <= stroke / 2)
          return true;
      }
      return false;
    });
    ds.objects.emplace_back(std::move(t), "glyph#" + std::to_string(i));
    ds.labels.push_back(digit);
  }
  ds.provenance = "glyphs grid=" + std::to_string(grid) + " count=" +
                  std::to_string(count) + " seed=" + std::to_string(seed);
  return ds;
}

} // namespace speckle
