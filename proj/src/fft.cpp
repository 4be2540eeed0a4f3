#include "rayleigh/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace rayleigh::fft {

namespace {

enum class Kind { R2C, C2R, R2C2, C2R2 };

std::mutex plan_mutex;

fftw_plan make_plan(Kind kind, int n0, int n1) {
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  switch (kind) {
    case Kind::R2C: {
      std::vector<double> re(n0);
      std::vector<fftw_complex> cx(n0 / 2 + 1);
      return fftw_plan_dft_r2c_1d(n0, re.data(), cx.data(), flags);
    }
    case Kind::C2R: {
      std::vector<fftw_complex> cx(n0 / 2 + 1);
      std::vector<double> re(n0);
      return fftw_plan_dft_c2r_1d(n0, cx.data(), re.data(), flags);
    }
    case Kind::R2C2: {
      std::vector<double> re(static_cast<std::size_t>(n0) * n1);
      std::vector<fftw_complex> cx(static_cast<std::size_t>(n0) * (n1 / 2 + 1));
      return fftw_plan_dft_r2c_2d(n0, n1, re.data(), cx.data(), flags);
    }
    default: {
      std::vector<fftw_complex> cx(static_cast<std::size_t>(n0) * (n1 / 2 + 1));
      std::vector<double> re(static_cast<std::size_t>(n0) * n1);
      return fftw_plan_dft_c2r_2d(n0, n1, cx.data(), re.data(), flags);
    }
  }
}

fftw_plan cached_plan(Kind kind, int n0, int n1) {
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  const auto key = std::make_tuple(static_cast<int>(kind), n0, n1);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_plan(kind, n0, n1)).first;
  return it->second;
}

}  // namespace

void forward(std::span<const double> in, std::span<std::complex<double>> out) {
  const int n = static_cast<int>(in.size());
  fftw_execute_dft_r2c(cached_plan(Kind::R2C, n, 0), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void inverse(std::span<std::complex<double>> in, std::span<double> out) {
  const int n = static_cast<int>(out.size());
  fftw_execute_dft_c2r(cached_plan(Kind::C2R, n, 0), reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
  const double s = 1.0 / n;
  for (double& x : out) x *= s;
}

void forward2(const double* in, std::complex<double>* out, int n0, int n1) {
  fftw_execute_dft_r2c(cached_plan(Kind::R2C2, n0, n1), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void inverse2(std::complex<double>* in, double* out, int n0, int n1) {
  fftw_execute_dft_c2r(cached_plan(Kind::C2R2, n0, n1), reinterpret_cast<fftw_complex*>(in), out);
  const double s = 1.0 / (static_cast<double>(n0) * n1);
  const std::size_t total = static_cast<std::size_t>(n0) * n1;
  for (std::size_t i = 0; i < total; ++i) out[i] *= s;
}

}  // namespace rayleigh::fft
