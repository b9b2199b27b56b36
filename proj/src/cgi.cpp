#include <speckle/cgi.hpp>

#include <speckle/random.hpp>

#include <cmath>

namespace speckle
{

ObjectImage::ObjectImage(Pattern transmission, std::string name) :
  mTransmission(std::move(transmission)), mName(std::move(name))
{
  if (mTransmission.rows() <= 0 || mTransmission.cols() <= 0)
    throw InvalidArgument("object dimensions must be positive");
  if (!mTransmission.allFinite() || (mTransmission.array() < 0).any() ||
      (mTransmission.array() > 1).any())
    throw InvalidArgument("object transmission must lie in [0, 1]");
}

namespace
{

void check_match(const PatternStack& stack, const ObjectImage& obj)
{
  if (stack.rows() != obj.rows() || stack.cols() != obj.cols())
    throw ShapeError("pattern " + std::to_string(stack.rows()) + "x" +
                     std::to_string(stack.cols()) + " does not match object " +
                     std::to_string(obj.rows()) + "x" +
                     std::to_string(obj.cols()));
}

} // namespace

BucketSeries bucket_measure(const PatternStack& stack, const ObjectImage& obj)
{
  check_match(stack, obj);
  BucketSeries b(static_cast<Index>(stack.size()));
  for (std::size_t i = 0; i < stack.size(); ++i)
    b(static_cast<Index>(i)) =
        stack[i].cwiseProduct(obj.transmission()).sum();
  return b;
}

Reconstruction reconstruct(const PatternStack& stack,
                           const BucketSeries& buckets)
{
  if (static_cast<std::size_t>(buckets.size()) != stack.size())
    throw ShapeError("bucket count does not match pattern count");
  if (stack.size() < 2)
    throw InvalidArgument("reconstruction needs at least two patterns");

  const double n = static_cast<double>(stack.size());
  Pattern weighted = Pattern::Zero(stack.rows(), stack.cols());
  for (std::size_t i = 0; i < stack.size(); ++i)
    weighted += buckets(static_cast<Index>(i)) * stack[i];

  Reconstruction out;
  out.g = weighted / n - (buckets.sum() / n) * mean_pattern(stack);
  out.patternCount = stack.size();
  return out;
}

NoiseLevels noise_levels(const PatternStack& stack, const ObjectImage& obj,
                         double snrDb)
{
  check_match(stack, obj);
  if (!std::isfinite(snrDb))
    throw InvalidArgument("snr_db must be finite");
  const Mask mask = obj.mask();
  const Index transmitting = mask.count();
  if (transmitting == 0)
    throw InvalidArgument("object has no transmitting pixels");

  double sum = 0.0;
  for (const auto& p : stack)
    sum += mask.select(p.array(), 0.0).sum();

  NoiseLevels levels;
  levels.signal = sum / (static_cast<double>(transmitting) * stack.size());
  levels.background = levels.signal / std::pow(10.0, snrDb / 10.0);
  levels.ambientMean =
      levels.background * static_cast<double>(stack.rows() * stack.cols());
  return levels;
}

double ambient_draw(std::uint64_t seed, std::uint64_t index)
{
  return to_unit(splitmix64(derive_seed(seed, index)));
}

BucketSeries add_noise(const BucketSeries& buckets, const PatternStack& stack,
                       const ObjectImage& obj, const NoiseSpec& spec)
{
  if (static_cast<std::size_t>(buckets.size()) != stack.size())
    throw ShapeError("bucket count does not match pattern count");
  const NoiseLevels levels = noise_levels(stack, obj, spec.snrDb);

  BucketSeries out = buckets;
  for (Index i = 0; i < out.size(); ++i)
    out(i) += 2.0 * levels.ambientMean *
              ambient_draw(spec.seed, static_cast<std::uint64_t>(i));
  return out;
}

Reconstruction simulate(const PatternStack& stack, const ObjectImage& obj,
                        const std::optional<NoiseSpec>& noise)
{
  BucketSeries b = bucket_measure(stack, obj);
  if (noise)
    b = add_noise(b, stack, obj, *noise);
  Reconstruction r = reconstruct(stack, b);
  r.noise = noise;
  return r;
}

} // namespace speckle
