#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lowreg::detail {

struct FftPlan::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FftPlan::FftPlan(int dim, int points) {
  if (dim < 1 || dim > 3 || points < 1) throw std::invalid_argument("FftPlan: bad shape");
  static std::map<std::pair<int, int>, std::shared_ptr<const Plans>> cache;
  std::lock_guard lock(planner_mutex());
  auto& slot = cache[{dim, points}];
  if (!slot) {
    std::size_t total = 1;
    int n[3] = {points, points, points};
    for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(points);
    std::vector<std::complex<double>> a(total), b(total);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    auto plans = std::make_shared<Plans>();
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->forward = fftw_plan_dft(dim, n, pa, pb, FFTW_FORWARD, flags);
    plans->backward = fftw_plan_dft(dim, n, pa, pb, FFTW_BACKWARD, flags);
    if (!plans->forward || !plans->backward) throw std::runtime_error("FftPlan: planner failed");
    slot = std::move(plans);
  }
  plans_ = slot;
}

void FftPlan::backward(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(plans_->backward,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void FftPlan::forward(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(plans_->forward,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace lowreg::detail
