#ifndef SPECKLE_CORE_HPP
#define SPECKLE_CORE_HPP

#include <speckle/errors.hpp>

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

/// Dense 2-D primitives shared by every stage: reflection padding,
/// valid-region cross-correlation and ensemble statistics over stacks.
///
/// Images are column-major Eigen matrices indexed (x, y) = (row, col).
namespace speckle
{

using Index = Eigen::Index;

template <typename Scalar>
using Image = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// One 2-D intensity map.
using Pattern = Image<double>;

/// A square grid of signed weights applied by correlate2d.
using Kernel = Image<double>;

/// An ordered, non-empty ensemble of equally sized images.
template <typename Scalar>
class BasicPatternStack
{
public:
  using value_type = Image<Scalar>;

  BasicPatternStack() = default;

  explicit BasicPatternStack(std::vector<value_type> patterns) :
    mPatterns(std::move(patterns))
  {
    if (mPatterns.empty())
      throw InvalidArgument("pattern stack must hold at least one pattern");
    const Index r = mPatterns.front().rows();
    const Index c = mPatterns.front().cols();
    if (r <= 0 || c <= 0)
      throw InvalidArgument("pattern dimensions must be positive");
    for (const auto& p : mPatterns)
      if (p.rows() != r || p.cols() != c)
        throw ShapeError("pattern stack members must share dimensions");
  }

  std::size_t size() const { return mPatterns.size(); }
  bool empty() const { return mPatterns.empty(); }
  Index rows() const { return mPatterns.empty() ? 0 : mPatterns.front().rows(); }
  Index cols() const { return mPatterns.empty() ? 0 : mPatterns.front().cols(); }

  const value_type& operator[](std::size_t i) const { return mPatterns[i]; }
  value_type& operator[](std::size_t i) { return mPatterns[i]; }

  auto begin() const { return mPatterns.begin(); }
  auto end() const { return mPatterns.end(); }
  auto begin() { return mPatterns.begin(); }
  auto end() { return mPatterns.end(); }

  const std::vector<value_type>& patterns() const { return mPatterns; }

  friend bool operator==(const BasicPatternStack& a, const BasicPatternStack& b)
  {
    if (a.size() != b.size())
      return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols() ||
          a[i] != b[i])
        return false;
    return true;
  }

private:
  std::vector<value_type> mPatterns;
};

using PatternStack = BasicPatternStack<double>;

/// Pad extents for the four image borders.
struct Padding
{
  Index beforeRows = 0;
  Index afterRows = 0;
  Index beforeCols = 0;
  Index afterCols = 0;

  /// Split that keeps a kernel of the given side length size-preserving:
  /// ceil((k-1)/2) before and floor((k-1)/2) after on each axis.
  static Padding same(Index kernelSize)
  {
    const Index before = kernelSize / 2;
    const Index after = (kernelSize - 1) / 2;
    return {before, after, before, after};
  }
};

/// Mirror an out-of-range index about the boundary pixel (edge not repeated).
inline Index reflect_index(Index i, Index n)
{
  if (i < 0)
    return -i;
  if (i >= n)
    return 2 * (n - 1) - i;
  return i;
}

template <typename Derived>
Image<typename Derived::Scalar>
reflect_pad(const Eigen::MatrixBase<Derived>& p, const Padding& pad)
{
  const Index rows = p.rows();
  const Index cols = p.cols();
  if (pad.beforeRows < 0 || pad.afterRows < 0 || pad.beforeCols < 0 ||
      pad.afterCols < 0)
    throw InvalidArgument("reflect_pad: negative pad extent");
  if (pad.beforeRows >= rows || pad.afterRows >= rows ||
      pad.beforeCols >= cols || pad.afterCols >= cols)
    throw InvalidArgument("reflect_pad: pad extent must be smaller than the "
                          "corresponding input dimension");

  Image<typename Derived::Scalar> out(rows + pad.beforeRows + pad.afterRows,
                                      cols + pad.beforeCols + pad.afterCols);
  for (Index c = 0; c < out.cols(); ++c)
  {
    const Index sc = reflect_index(c - pad.beforeCols, cols);
    for (Index r = 0; r < out.rows(); ++r)
      out(r, c) = p(reflect_index(r - pad.beforeRows, rows), sc);
  }
  return out;
}

/// Adjoint of reflect_pad: every padded pixel adds its value back onto the
/// source pixel it was mirrored from.
template <typename Derived>
Image<typename Derived::Scalar>
reflect_pad_backward(const Eigen::MatrixBase<Derived>& gradPadded, Index rows,
                     Index cols, const Padding& pad)
{
  if (gradPadded.rows() != rows + pad.beforeRows + pad.afterRows ||
      gradPadded.cols() != cols + pad.beforeCols + pad.afterCols)
    throw ShapeError("reflect_pad_backward: gradient does not match padding");

  Image<typename Derived::Scalar> out =
      Image<typename Derived::Scalar>::Zero(rows, cols);
  for (Index c = 0; c < gradPadded.cols(); ++c)
  {
    const Index sc = reflect_index(c - pad.beforeCols, cols);
    for (Index r = 0; r < gradPadded.rows(); ++r)
      out(reflect_index(r - pad.beforeRows, rows), sc) += gradPadded(r, c);
  }
  return out;
}

/// Remove pad margins.
template <typename Derived>
Image<typename Derived::Scalar> crop(const Eigen::MatrixBase<Derived>& p,
                                     const Padding& pad)
{
  const Index rows = p.rows() - pad.beforeRows - pad.afterRows;
  const Index cols = p.cols() - pad.beforeCols - pad.afterCols;
  if (rows <= 0 || cols <= 0)
    throw InvalidArgument("crop: margins exceed image size");
  return p.block(pad.beforeRows, pad.beforeCols, rows, cols);
}

/// Valid-region cross-correlation, out(x, y) = sum_{m,n} k(m, n) p(x+m, y+n).
/// No kernel flip. Output is (rows - k.rows + 1) x (cols - k.cols + 1).
template <typename DerivedP, typename DerivedK>
Image<typename DerivedP::Scalar>
correlate2d(const Eigen::MatrixBase<DerivedP>& p,
            const Eigen::MatrixBase<DerivedK>& k)
{
  if (k.rows() < 1 || k.cols() < 1)
    throw InvalidArgument("correlate2d: empty kernel");
  if (k.rows() > p.rows() || k.cols() > p.cols())
    throw InvalidArgument("correlate2d: kernel larger than pattern");

  const Index outRows = p.rows() - k.rows() + 1;
  const Index outCols = p.cols() - k.cols() + 1;
  Image<typename DerivedP::Scalar> out =
      Image<typename DerivedP::Scalar>::Zero(outRows, outCols);
  for (Index n = 0; n < k.cols(); ++n)
    for (Index m = 0; m < k.rows(); ++m)
      out.noalias() += k(m, n) * p.block(m, n, outRows, outCols);
  return out;
}

/// Elementwise ensemble mean.
template <typename Scalar>
Image<Scalar> mean_pattern(const BasicPatternStack<Scalar>& s)
{
  if (s.empty())
    throw InvalidArgument("mean_pattern: empty stack");
  Image<Scalar> sum = Image<Scalar>::Zero(s.rows(), s.cols());
  for (const auto& p : s)
    sum += p;
  return sum / static_cast<Scalar>(s.size());
}

/// Each member minus the ensemble mean.
template <typename Scalar>
BasicPatternStack<Scalar> fluctuations(const BasicPatternStack<Scalar>& s)
{
  const Image<Scalar> mean = mean_pattern(s);
  std::vector<Image<Scalar>> out;
  out.reserve(s.size());
  for (const auto& p : s)
    out.push_back(p - mean);
  return BasicPatternStack<Scalar>(std::move(out));
}

/// True when every value is finite and non-negative.
template <typename Derived>
bool is_physical(const Eigen::MatrixBase<Derived>& p)
{
  return p.allFinite() && (p.array() >= 0).all();
}

} // namespace speckle

#endif // SPECKLE_CORE_HPP
