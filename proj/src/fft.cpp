#include "kp5/fft.hpp"

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace kp5::fft {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

enum class Kind { R2C, C2R, Forward1D, Backward1D };

// Longer 1D transforms get a one-shot plan instead of a cached buffer.
constexpr int kCachedLimit = 1 << 20;

struct Plan {
  fftw_plan plan = nullptr;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_complex* cplx_out = nullptr;

  Plan() = default;
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    fftw_free(real);
    fftw_free(cplx);
    fftw_free(cplx_out);
  }
};

using Key = std::tuple<Kind, int, int>;

Plan& get_plan(Kind kind, int nx, int ny) {
  thread_local std::map<Key, std::unique_ptr<Plan>> cache;
  auto& slot = cache[{kind, nx, ny}];
  if (slot) return *slot;
  slot = std::make_unique<Plan>();
  Plan& p = *slot;
  std::lock_guard lock(planner_mutex());
  const int nh = nx / 2 + 1;
  switch (kind) {
    case Kind::R2C:
      p.real = fftw_alloc_real(static_cast<size_t>(nx) * ny);
      p.cplx = fftw_alloc_complex(static_cast<size_t>(nh) * ny);
      p.plan = fftw_plan_dft_r2c_2d(ny, nx, p.real, p.cplx, FFTW_ESTIMATE);
      break;
    case Kind::C2R:
      p.real = fftw_alloc_real(static_cast<size_t>(nx) * ny);
      p.cplx = fftw_alloc_complex(static_cast<size_t>(nh) * ny);
      p.plan = fftw_plan_dft_c2r_2d(ny, nx, p.cplx, p.real, FFTW_ESTIMATE);
      break;
    case Kind::Forward1D:
    case Kind::Backward1D:
      p.cplx = fftw_alloc_complex(static_cast<size_t>(nx));
      p.cplx_out = fftw_alloc_complex(static_cast<size_t>(nx));
      p.plan = fftw_plan_dft_1d(nx, p.cplx, p.cplx_out, kind == Kind::Forward1D ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE);
      break;
  }
  return p;
}

}  // namespace

Eigen::ArrayXXcd r2c(const Eigen::ArrayXXd& u) {
  const int nx = static_cast<int>(u.rows());
  const int ny = static_cast<int>(u.cols());
  Plan& p = get_plan(Kind::R2C, nx, ny);
  std::memcpy(p.real, u.data(), sizeof(double) * u.size());
  fftw_execute(p.plan);
  Eigen::ArrayXXcd out(nx / 2 + 1, ny);
  std::memcpy(static_cast<void*>(out.data()), p.cplx, sizeof(fftw_complex) * out.size());
  return out;
}

Eigen::ArrayXXd c2r(const Eigen::ArrayXXcd& c, int nx) {
  const int ny = static_cast<int>(c.cols());
  Plan& p = get_plan(Kind::C2R, nx, ny);
  std::memcpy(p.cplx, c.data(), sizeof(fftw_complex) * c.size());
  fftw_execute(p.plan);
  Eigen::ArrayXXd out(nx, ny);
  std::memcpy(out.data(), p.real, sizeof(double) * out.size());
  return out;
}

Eigen::VectorXcd dft(const Eigen::VectorXcd& v, int sign) {
  const int n = static_cast<int>(v.size());
  if (n > kCachedLimit) {
    Eigen::VectorXcd out = v;
    auto* data = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
      std::lock_guard lock(planner_mutex());
      plan = fftw_plan_dft_1d(n, data, data, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
    return out;
  }
  Plan& p = get_plan(sign < 0 ? Kind::Forward1D : Kind::Backward1D, n, 1);
  std::memcpy(p.cplx, v.data(), sizeof(fftw_complex) * n);
  fftw_execute(p.plan);
  Eigen::VectorXcd out(n);
  std::memcpy(static_cast<void*>(out.data()), p.cplx_out, sizeof(fftw_complex) * n);
  return out;
}

}  // namespace kp5::fft
