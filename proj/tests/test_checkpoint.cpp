#include "support.hpp"

#include <speckle/checkpoint.hpp>

#include <doctest.h>

using namespace speckle;

namespace
{

Checkpoint sample_checkpoint()
{
  Checkpoint c;
  c.config.beta = 0.03;
  c.config.learningRate = 0.1;
  c.config.epochs = 7;
  c.config.seed = 0xfedcba9876543210ULL;
  c.config.kernelSize = 3;
  c.config.loss = LossNormalization::ObjectMean;
  for (std::uint64_t r = 0; r < 2; ++r)
  {
    TrainState s;
    s.branch = init_branch(4, 3, r + 1);
    s.velocity = init_branch(4, 3, r + 10);
    s.epochLosses = {0.1 + 1e-17, 1.0 / 3.0, 2.5e-300};
    s.rng = Rng(r + 99);
    s.rng.next();
    s.steps = 12345 + r;
    c.rounds.push_back(std::move(s));
  }
  return c;
}

} // namespace

TEST_CASE("checkpoint round trip is bit exact")
{
  const Checkpoint c = sample_checkpoint();
  const std::string text = serialize_checkpoint(c);
  const Checkpoint back = parse_checkpoint(text);
  CHECK(back.config.beta == c.config.beta);
  CHECK(back.config.learningRate == c.config.learningRate);
  CHECK(back.config.epochs == c.config.epochs);
  CHECK(back.config.seed == c.config.seed);
  CHECK(back.config.kernelSize == c.config.kernelSize);
  CHECK(back.config.loss == LossNormalization::ObjectMean);
  REQUIRE(back.rounds.size() == 2);
  for (std::size_t r = 0; r < 2; ++r)
  {
    CHECK(back.rounds[r].branch == c.rounds[r].branch);
    CHECK(back.rounds[r].velocity == c.rounds[r].velocity);
    CHECK(back.rounds[r].epochLosses == c.rounds[r].epochLosses);
    CHECK(back.rounds[r].rng == c.rounds[r].rng);
    CHECK(back.rounds[r].steps == c.rounds[r].steps);
  }
  CHECK(serialize_checkpoint(back) == text);

  const auto dir = test::scratch_dir("checkpoint");
  save_checkpoint(c, dir / "c.json");
  CHECK(serialize_checkpoint(load_checkpoint(dir / "c.json")) == text);
}

TEST_CASE("checkpoint rejects foreign documents")
{
  std::string text = serialize_checkpoint(sample_checkpoint());
  CHECK_THROWS_AS(parse_checkpoint("not json"), FormatError);
  CHECK_THROWS_AS(parse_checkpoint("{}"), FormatError);

  std::string tagged = text;
  tagged.replace(tagged.find(kCheckpointFormat), std::string(kCheckpointFormat).size(),
                 "other-format");
  CHECK_THROWS_AS(parse_checkpoint(tagged), FormatError);

  const std::string field = "\"version\": 1";
  const auto at = text.find(field);
  REQUIRE(at != std::string::npos);
  std::string versioned = text;
  versioned.replace(at, field.size(), "\"version\": 9");
  CHECK_THROWS_AS(parse_checkpoint(versioned), FormatError);
}
