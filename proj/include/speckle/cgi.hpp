#ifndef SPECKLE_CGI_HPP
#define SPECKLE_CGI_HPP

#include <speckle/core.hpp>

#include <cstdint>
#include <optional>
#include <string>

/// Computational ghost imaging forward model: bucket detection, covariance
/// reconstruction and ambient detection noise.
namespace speckle
{

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Transmission map of the imaged object, values in [0, 1].
class ObjectImage
{
public:
  ObjectImage() = default;
  explicit ObjectImage(Pattern transmission, std::string name = {});

  Index rows() const { return mTransmission.rows(); }
  Index cols() const { return mTransmission.cols(); }
  const Pattern& transmission() const { return mTransmission; }
  const std::string& name() const { return mName; }

  /// Transmitting iff transmission > 0.
  Mask mask() const { return mTransmission.array() > 0; }
  Index transmitting_count() const { return mask().count(); }

  /// At least one transmitting and one blocked pixel.
  bool has_both_classes() const
  {
    const Index n = transmitting_count();
    return n > 0 && n < mTransmission.size();
  }

private:
  Pattern mTransmission;
  std::string mName;
};

/// One bucket value per illumination pattern.
using BucketSeries = Eigen::VectorXd;

enum class NoiseModel
{
  AmbientUniform,
};

struct NoiseSpec
{
  double snrDb = 0.0;
  std::uint64_t seed = 0;
  NoiseModel model = NoiseModel::AmbientUniform;
};

/// Signal level and the ambient background level implied by an SNR.
struct NoiseLevels
{
  /// Mean pattern intensity over transmitting pixels and all patterns.
  double signal = 0.0;
  /// signal / 10^(snr/10).
  double background = 0.0;
  /// Mean ambient term added to each bucket, background * pixel count.
  double ambientMean = 0.0;
};

struct Reconstruction
{
  Pattern g;
  std::size_t patternCount = 0;
  std::optional<NoiseSpec> noise;
  std::optional<double> beta;
};

/// B_i = sum_{x,y} P_i(x, y) T(x, y).
BucketSeries bucket_measure(const PatternStack& stack, const ObjectImage& obj);

/// G(x, y) = <B P(x, y)> - <B><P(x, y)>, averages over the pattern index.
Reconstruction reconstruct(const PatternStack& stack,
                           const BucketSeries& buckets);

NoiseLevels noise_levels(const PatternStack& stack, const ObjectImage& obj,
                         double snrDb);

/// Uniform draw in [0, 1) keyed by (seed, measurement index).
double ambient_draw(std::uint64_t seed, std::uint64_t index);

/// Adds an independent uniform term on [0, 2 * ambientMean] to each bucket.
BucketSeries add_noise(const BucketSeries& buckets, const PatternStack& stack,
                       const ObjectImage& obj, const NoiseSpec& spec);

/// bucket_measure, optional noise, then reconstruct.
Reconstruction simulate(const PatternStack& stack, const ObjectImage& obj,
                        const std::optional<NoiseSpec>& noise = std::nullopt);

} // namespace speckle

#endif // SPECKLE_CGI_HPP
