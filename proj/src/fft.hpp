#pragma once

#include <complex>
#include <memory>

namespace lowreg::detail {

// Unnormalised complex-to-complex transform on an M^d grid.
// Plans are created once per (d, M) under a global lock and shared; executing a plan
// on caller-owned arrays is thread safe.
class FftPlan {
 public:
  FftPlan(int dim, int points);

  // out_j = sum_n in_n e^{+2 pi i j n / M}
  void backward(const std::complex<double>* in, std::complex<double>* out) const;
  // out_n = sum_j in_j e^{-2 pi i j n / M}
  void forward(const std::complex<double>* in, std::complex<double>* out) const;

 private:
  struct Plans;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace lowreg::detail
