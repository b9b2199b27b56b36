#ifndef SPECKLE_ANALYSIS_HPP
#define SPECKLE_ANALYSIS_HPP

#include <speckle/cgi.hpp>
#include <speckle/core.hpp>

#include <optional>
#include <span>
#include <vector>

namespace speckle
{

enum class CorrelationNormalization
{
  Raw,
  PeakNormalized,
};

/// Second-order fluctuation correlation indexed by displacement. values is
/// (2 rows - 1) x (2 cols - 1); displacement (0, 0) sits at (rows-1, cols-1).
struct CorrelationMap
{
  Image<double> values;
  Index maxShiftRows = 0;
  Index maxShiftCols = 0;
  CorrelationNormalization normalization = CorrelationNormalization::Raw;

  double at(Index dRow, Index dCol) const
  {
    return values(dRow + maxShiftRows, dCol + maxShiftCols);
  }
  double peak() const { return at(0, 0); }
};

/// Ensemble and spatial average of dP_i(x, y) dP_i(x + dx, y + dy) over the
/// non-periodic overlap, divided by the overlap area.
CorrelationMap gamma2(const PatternStack& stack);

/// Scale so the zero-displacement entry is 1.
CorrelationMap peak_normalized(const CorrelationMap& map);

/// Builds P'_i = correlate2d(P, C_i) and compares the direct ensemble
/// correlation of the output fluctuations with the prediction from the
/// kernel fluctuation correlation. Returns the largest absolute difference
/// over all pixel pairs. Intended for small instances.
double verify_correlation_transfer(const Pattern& pattern, std::span<const Kernel> kernels);

/// Ensemble-mean DFT magnitude with DC at (rows/2, cols/2).
struct SpectrumMap
{
  Image<double> magnitude;
  /// Frequencies in cycles per pixel along rows and columns.
  Eigen::VectorXd rowFrequency;
  Eigen::VectorXd colFrequency;
};

SpectrumMap fourier_spectrum(const PatternStack& stack);

/// Azimuthal average. Bins are binWidth wide in radius around the center;
/// each bin reports the mean radius of its members.
struct RadialProfile
{
  std::vector<double> radius;
  std::vector<double> value;
  std::vector<std::size_t> count;
};

RadialProfile radial_profile(const Image<double>& map, Index centerRow,
                             Index centerCol, double binWidth = 0.5);

/// Full width at half maximum of the radially averaged map, in pixels.
double correlation_width(const CorrelationMap& map);

struct QualityReport
{
  /// Absent when the object-region mean of G vanishes.
  std::optional<double> mse;
  /// (<G_o> - <G_b>) / sigma_b, absent when the background is flat.
  std::optional<double> cnr;
  double pearson = 0.0;
  bool pearsonDegenerate = false;
  /// 10 log10(<G_o> / <G_b>) when both means are positive.
  std::optional<double> snrMeasuredDb;
};

/// Pearson correlation; zero with the flag set when either side is flat.
double pearson(const Image<double>& a, const Image<double>& b,
               bool* degenerate = nullptr);

QualityReport quality_report(const Reconstruction& recon,
                             const ObjectImage& obj);

} // namespace speckle

#endif // SPECKLE_ANALYSIS_HPP
