#include <speckle/fft.hpp>

#include <unsupported/Eigen/FFT>

#include <vector>

namespace speckle
{

namespace
{

ComplexImage transform(const ComplexImage& in, bool inverse)
{
  Eigen::FFT<double> fft;
  ComplexImage out(in.rows(), in.cols());
  std::vector<std::complex<double>> src, dst;

  src.resize(static_cast<std::size_t>(in.rows()));
  for (Index c = 0; c < in.cols(); ++c)
  {
    for (Index r = 0; r < in.rows(); ++r)
      src[static_cast<std::size_t>(r)] = in(r, c);
    if (inverse)
      fft.inv(dst, src);
    else
      fft.fwd(dst, src);
    for (Index r = 0; r < in.rows(); ++r)
      out(r, c) = dst[static_cast<std::size_t>(r)];
  }

  src.resize(static_cast<std::size_t>(in.cols()));
  for (Index r = 0; r < in.rows(); ++r)
  {
    for (Index c = 0; c < in.cols(); ++c)
      src[static_cast<std::size_t>(c)] = out(r, c);
    if (inverse)
      fft.inv(dst, src);
    else
      fft.fwd(dst, src);
    for (Index c = 0; c < in.cols(); ++c)
      out(r, c) = dst[static_cast<std::size_t>(c)];
  }
  return out;
}

} // namespace

ComplexImage fft2(const ComplexImage& in) { return transform(in, false); }

ComplexImage ifft2(const ComplexImage& in) { return transform(in, true); }

} // namespace speckle
