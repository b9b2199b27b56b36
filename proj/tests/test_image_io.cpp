#include "support.hpp"

#include <speckle/image_io.hpp>

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace speckle;

TEST_CASE("8-bit payload stores rounded values")
{
  Pattern p(2, 2);
  p << 0.0, 17.0 / 255, 0.5, 1.0;
  const std::string bytes = encode_pgm(p, Depth::Eight);
  REQUIRE(bytes.size() >= 4);
  const std::string payload = bytes.substr(bytes.size() - 4);
  CHECK(static_cast<unsigned char>(payload[0]) == 0);
  CHECK(static_cast<unsigned char>(payload[1]) == 17);
  CHECK(static_cast<unsigned char>(payload[2]) == 128);
  CHECK(static_cast<unsigned char>(payload[3]) == 255);
  CHECK(bytes.rfind("P5", 0) == 0);

  Depth d = Depth::Sixteen;
  const Pattern back = decode_pgm(bytes, &d);
  CHECK(d == Depth::Eight);
  CHECK(back(0, 1) == 17.0 / 255);
}

TEST_CASE("16-bit round trip is within one quantization step")
{
  Rng rng(21);
  const auto dir = test::scratch_dir("pgm");
  for (int trial = 0; trial < 20; ++trial)
  {
    const Pattern p = test::random_pattern(rng, 1 + Index(rng.below(40)), 1 + Index(rng.below(40)));
    write_pattern_image(p, dir / "p.pgm");
    const Pattern back = read_pattern_image(dir / "p.pgm", nullptr, Depth::Sixteen);
    REQUIRE(back.rows() == p.rows());
    REQUIRE(back.cols() == p.cols());
    CHECK(test::max_abs_diff(back, p) <= 1.0 / 65535);
    write_pattern_image(back, dir / "q.pgm");
    CHECK(read_pattern_image(dir / "q.pgm") == back);
  }
}

TEST_CASE("16-bit samples are big-endian and row-major")
{
  Pattern p(1, 2);
  p << 258.0 / 65535, 1.0;
  const std::string bytes = encode_pgm(p, Depth::Sixteen);
  const std::string payload = bytes.substr(bytes.size() - 4);
  CHECK(static_cast<unsigned char>(payload[0]) == 1);
  CHECK(static_cast<unsigned char>(payload[1]) == 2);
  CHECK(static_cast<unsigned char>(payload[2]) == 255);
  CHECK(static_cast<unsigned char>(payload[3]) == 255);
}

TEST_CASE("graymap errors")
{
  CHECK_THROWS_AS(decode_pgm(""), FormatError);
  CHECK_THROWS_AS(decode_pgm("P2\n1 1\n255\n0"), FormatError);
  CHECK_THROWS_AS(decode_pgm("P5\n2 2\n255\n\x01\x02"), FormatError);
  CHECK_THROWS_AS(decode_pgm("P5\n1 1\n1000\n\x01\x02"), FormatError);
  CHECK_THROWS_AS(decode_pgm(encode_pgm(Pattern::Zero(2, 2), Depth::Eight), nullptr,
                             Depth::Sixteen),
                  FormatError);
  CHECK_THROWS_AS(encode_pgm(Pattern::Constant(1, 1, 1.5), Depth::Eight), InvalidArgument);
  CHECK_THROWS_AS(read_pattern_image(test::scratch_dir("pgm_missing") / "none.pgm"),
                  std::exception);

  const auto dir = test::scratch_dir("pgm_empty");
  std::ofstream(dir / "empty.pgm").close();
  CHECK_THROWS_AS(read_pattern_image(dir / "empty.pgm"), FormatError);
}

TEST_CASE("graymap header comments are skipped")
{
  const std::string bytes = std::string("P5\n# made by hand\n2 1 # size\n255\n") + '\x00' + '\xff';
  const Pattern p = decode_pgm(bytes);
  CHECK(p.rows() == 1);
  CHECK(p(0, 0) == 0.0);
  CHECK(p(0, 1) == 1.0);
}

TEST_CASE("full range map")
{
  Pattern g(2, 2);
  g << -2, 0, 1, 6;
  const AffineMap m = full_range_map(g);
  CHECK((g.minCoeff() - m.offset) * m.scale == doctest::Approx(0.0));
  CHECK((g.maxCoeff() - m.offset) * m.scale == doctest::Approx(1.0));
  const AffineMap flat = full_range_map(Pattern::Constant(2, 2, 3.0));
  CHECK(std::isfinite(flat.scale));
}
