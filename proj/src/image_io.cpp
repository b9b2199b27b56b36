#include <speckle/image_io.hpp>

#include <speckle/text_io.hpp>

#include <cctype>
#include <cmath>

namespace speckle
{

std::string encode_pgm(const Pattern& p, Depth depth)
{
  if (p.rows() < 1 || p.cols() < 1)
    throw InvalidArgument("cannot encode an empty image");
  if (!p.allFinite() || (p.array() < 0).any() || (p.array() > 1).any())
    throw InvalidArgument("graymap values must be finite and within [0, 1]");

  const int maxval = max_value(depth);
  std::string out = "P5\n" + std::to_string(p.cols()) + " " +
                    std::to_string(p.rows()) + "\n" + std::to_string(maxval) +
                    "\n";
  out.reserve(out.size() + static_cast<std::size_t>(p.size()) *
                               (depth == Depth::Eight ? 1 : 2));
  for (Index r = 0; r < p.rows(); ++r)
    for (Index c = 0; c < p.cols(); ++c)
    {
      const auto q = static_cast<unsigned>(std::lround(p(r, c) * maxval));
      if (depth == Depth::Sixteen)
        out.push_back(static_cast<char>(q >> 8));
      out.push_back(static_cast<char>(q & 0xff));
    }
  return out;
}

namespace
{

class HeaderReader
{
public:
  explicit HeaderReader(std::string_view bytes) : mBytes(bytes) {}

  long next_number(const char* field)
  {
    skip_space_and_comments();
    const std::size_t start = mPos;
    while (mPos < mBytes.size() &&
           std::isdigit(static_cast<unsigned char>(mBytes[mPos])))
      ++mPos;
    if (mPos == start || mPos - start > 9)
      throw FormatError(std::string("graymap header: invalid ") + field);
    return std::stol(std::string(mBytes.substr(start, mPos - start)));
  }

  /// The single whitespace byte that ends the header.
  std::size_t payload_start()
  {
    if (mPos >= mBytes.size() ||
        !std::isspace(static_cast<unsigned char>(mBytes[mPos])))
      throw FormatError("graymap header: missing separator before payload");
    return mPos + 1;
  }

private:
  void skip_space_and_comments()
  {
    while (mPos < mBytes.size())
    {
      const char ch = mBytes[mPos];
      if (ch == '#')
        while (mPos < mBytes.size() && mBytes[mPos] != '\n')
          ++mPos;
      else if (std::isspace(static_cast<unsigned char>(ch)))
        ++mPos;
      else
        break;
    }
  }

  std::string_view mBytes;
  std::size_t mPos = 2;
};

} // namespace

Pattern decode_pgm(std::string_view bytes, Depth* depth,
                   std::optional<Depth> expected)
{
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw FormatError("graymap header: missing P5 magic");
  HeaderReader header(bytes);
  const long width = header.next_number("width");
  const long height = header.next_number("height");
  const long maxval = header.next_number("maxval");
  if (width < 1 || height < 1)
    throw FormatError("graymap header: dimensions must be positive");
  if (maxval != 255 && maxval != 65535)
    throw FormatError("graymap depth: maxval " + std::to_string(maxval) +
                      " unsupported, expected 255 or 65535");
  const Depth found = maxval == 255 ? Depth::Eight : Depth::Sixteen;
  if (expected && *expected != found)
    throw FormatError("graymap depth mismatch: expected " +
                      std::to_string(static_cast<int>(*expected)) +
                      "-bit, found " + std::to_string(static_cast<int>(found)) +
                      "-bit");

  const std::size_t start = header.payload_start();
  const std::size_t bytesPerPixel = found == Depth::Eight ? 1 : 2;
  const std::size_t expectedBytes =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
      bytesPerPixel;
  if (bytes.size() - start != expectedBytes)
    throw FormatError("graymap payload: expected " +
                      std::to_string(expectedBytes) + " bytes, found " +
                      std::to_string(bytes.size() - start));

  Pattern p(height, width);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data() + start);
  for (Index r = 0; r < height; ++r)
    for (Index c = 0; c < width; ++c)
    {
      const std::size_t i = static_cast<std::size_t>(r * width + c) * bytesPerPixel;
      const unsigned q = bytesPerPixel == 1 ? data[i] : (data[i] << 8) | data[i + 1];
      p(r, c) = static_cast<double>(q) / static_cast<double>(maxval);
    }
  if (depth)
    *depth = found;
  return p;
}

void write_pattern_image(const Pattern& p, const std::filesystem::path& path,
                         Depth depth)
{
  write_file_atomic(path, encode_pgm(p, depth));
}

Pattern read_pattern_image(const std::filesystem::path& path, Depth* depth,
                           std::optional<Depth> expected)
{
  return decode_pgm(read_text_file(path), depth, expected);
}

AffineMap full_range_map(const Pattern& p)
{
  const double lo = p.minCoeff();
  const double hi = p.maxCoeff();
  return {lo, hi > lo ? 1.0 / (hi - lo) : 0.0};
}

} // namespace speckle
