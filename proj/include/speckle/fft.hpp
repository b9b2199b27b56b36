#ifndef SPECKLE_FFT_HPP
#define SPECKLE_FFT_HPP

#include <speckle/core.hpp>

#include <complex>

namespace speckle
{

using ComplexImage = Image<std::complex<double>>;

/// 2-D discrete Fourier transform. The forward transform is unnormalized;
/// the inverse carries the 1/(rows*cols) factor, so
/// sum |F|^2 = rows * cols * sum |p|^2.
ComplexImage fft2(const ComplexImage& in);
ComplexImage ifft2(const ComplexImage& in);

/// Move the zero-frequency bin to (rows/2, cols/2).
template <typename Derived>
Image<typename Derived::Scalar> fftshift(const Eigen::MatrixBase<Derived>& in)
{
  const Index rows = in.rows();
  const Index cols = in.cols();
  Image<typename Derived::Scalar> out(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r)
      out((r + rows / 2) % rows, (c + cols / 2) % cols) = in(r, c);
  return out;
}

/// Signed frequency index of DFT bin k on an axis of length n.
inline Index signed_frequency(Index k, Index n)
{
  return k <= (n - 1) / 2 ? k : k - n;
}

} // namespace speckle

#endif // SPECKLE_FFT_HPP
