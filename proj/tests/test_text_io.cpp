#include "support.hpp"

#include <speckle/text_io.hpp>

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace speckle;

TEST_CASE("csv quoting")
{
  std::ostringstream os;
  CsvWriter csv(os);
  csv.row({"a", "b,c", "say \"hi\"", "two\nlines", ""});
  CHECK(os.str() == "a,\"b,c\",\"say \"\"hi\"\"\",\"two\nlines\",\r\n");
}

TEST_CASE("format_double round-trips")
{
  Rng rng(31);
  for (int i = 0; i < 1000; ++i)
  {
    const double v = std::ldexp(rng.uniform(-1, 1), int(rng.below(200)) - 100);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("sha256 known vectors")
{
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex(std::string(1000000, 'a')) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("atomic write replaces content")
{
  const auto dir = test::scratch_dir("text_io");
  write_file_atomic(dir / "f.txt", "first");
  write_file_atomic(dir / "f.txt", "second");
  CHECK(read_text_file(dir / "f.txt") == "second");
  CHECK(sha256_file(dir / "f.txt") == sha256_hex("second"));
  CHECK_THROWS(read_text_file(dir / "missing.txt"));
}
