#include "mwrecon/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace mwrecon {
namespace {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* ptr;
};

// FFTW planning is not thread-safe, execution on new arrays is. Plans are
// made once per (ny, nx, direction) with FFTW_ESTIMATE so every run picks
// the same algorithm and results stay bitwise reproducible.
class PlanCache {
 public:
  fftw_plan get(std::size_t ny, std::size_t nx, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(ny, nx, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    FftwBuffer scratch(ny * nx);
    fftw_plan p = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), scratch.ptr, scratch.ptr,
                                   sign, FFTW_ESTIMATE);
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// ifftshift on the way in, fftshift on the way out, orthonormal scale.
template <class Out, class In>
Out centered_transform(const In& in, int sign) {
  const std::size_t ny = in.ny(), nx = in.nx();
  Out out(in.n_coils(), ny, nx);
  if (in.empty()) return out;

  fftw_plan plan = plan_cache().get(ny, nx, sign);
  FftwBuffer buf(ny * nx);
  const std::size_t cy = ny / 2, cx = nx / 2;
  const double scale = 1.0 / std::sqrt(static_cast<double>(ny * nx));

  for (std::size_t c = 0; c < in.n_coils(); ++c) {
    for (std::size_t y = 0; y < ny; ++y) {
      const std::size_t sy = (y + ny - cy) % ny;
      for (std::size_t x = 0; x < nx; ++x) {
        const std::size_t sx = (x + nx - cx) % nx;
        const cdouble v = in(c, y, x);
        buf.ptr[sy * nx + sx][0] = v.real();
        buf.ptr[sy * nx + sx][1] = v.imag();
      }
    }
    fftw_execute_dft(plan, buf.ptr, buf.ptr);
    for (std::size_t y = 0; y < ny; ++y) {
      const std::size_t sy = (y + cy) % ny;
      for (std::size_t x = 0; x < nx; ++x) {
        const std::size_t sx = (x + cx) % nx;
        out(c, sy, sx) = cdouble(buf.ptr[y * nx + x][0] * scale, buf.ptr[y * nx + x][1] * scale);
      }
    }
  }
  return out;
}

}  // namespace

MultiCoilKSpace fft2c(const CoilImage& image) {
  return centered_transform<MultiCoilKSpace>(image, FFTW_FORWARD);
}

CoilImage ifft2c(const MultiCoilKSpace& kspace) {
  return centered_transform<CoilImage>(kspace, FFTW_BACKWARD);
}

}  // namespace mwrecon
