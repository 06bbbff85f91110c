#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "lowreg/spectral.hpp"

namespace lowreg {

/// Diagonal smoothing operator Phi acting on the cylindrical Wiener process,
/// Phi e^{ikx} = Phi_k e^{ikx}.
class SmoothingOperator {
 public:
  SmoothingOperator() = default;
  SmoothingOperator(TorusGrid grid, std::vector<Complex> coefficients);

  /// Phi_k = amplitude (1 + |k|^2)^{-sigma/2}.
  static SmoothingOperator power_law(const TorusGrid& grid, double sigma, double amplitude = 1.0);
  static SmoothingOperator zero(const TorusGrid& grid);

  const TorusGrid& grid() const noexcept { return grid_; }
  Complex operator[](std::size_t mode) const { return coeffs_[mode]; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }
  bool empty() const noexcept { return coeffs_.empty(); }

  /// Tr(Phi Phi^*) = sum |Phi_k|^2.
  double trace() const noexcept;
  /// Tr(Phi^2) = sum Phi_k^2.
  Complex trace_square() const noexcept;
  /// Tr((Laplacian Phi)^2) with real symmetric Phi: sum |k|^4 |Phi_k|^2.
  double trace_laplacian_squared() const noexcept;
  /// sum |k|^8 |Phi_k|^2.
  double trace_bilaplacian_squared() const noexcept;

 private:
  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

/// sum m(k) |Phi_k|^2, real part.
double weighted_trace(const SmoothingOperator& phi, const Multiplier& weight);

/// Checks that sum_{|k|<=K} |k|^{2 weight_power} (1+|k|^2)^{-sigma} is Cauchy: the
/// increment between K and 2K is below tol times the partial sum, for every doubling
/// from K0 up to K0 * 2^doublings.
bool trace_is_cauchy(double sigma, int dim, int weight_power, int k0, int doublings, double tol);

/// Independent Brownian increments on a uniform fine grid.
///
/// Field paths carry one complex Brownian motion per retained Fourier mode, with
/// independent real and imaginary parts of variance dt each. Scalar paths carry real
/// channels (imaginary parts zero). Draw order is step-major, then channel, then
/// real before imaginary, from a mt19937_64 seeded with `seed`.
class BrownianPath {
 public:
  static BrownianPath sample_field(const TorusGrid& grid, double horizon, std::size_t steps,
                                   std::uint64_t seed);
  static BrownianPath sample_real(std::size_t channels, double horizon, std::size_t steps,
                                  std::uint64_t seed);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t channels() const noexcept { return channels_; }
  double dt() const noexcept { return horizon_ / static_cast<double>(steps_); }
  bool is_field() const noexcept { return field_; }
  const TorusGrid& grid() const noexcept { return grid_; }

  Complex increment(std::size_t step, std::size_t channel) const {
    return increments_[step * channels_ + channel];
  }
  std::span<const Complex> increments(std::size_t step) const {
    return std::span<const Complex>(increments_).subspan(step * channels_, channels_);
  }

 private:
  BrownianPath() = default;
  TorusGrid grid_;
  double horizon_ = 0.0;
  std::size_t steps_ = 0;
  std::size_t channels_ = 0;
  bool field_ = false;
  std::vector<Complex> increments_;
};

/// Fine steps [first, first + count) of a path forming one coarse step.
struct StepWindow {
  std::size_t first = 0;
  std::size_t count = 0;
  double fine_dt = 0.0;
  double length() const noexcept { return fine_dt * static_cast<double>(count); }
};

/// Window of coarse step `index` when the horizon is split into `coarse_steps` steps.
/// Throws std::invalid_argument when the fine grid is not a refinement of the coarse one.
StepWindow coarse_window(const BrownianPath& path, std::size_t coarse_steps, std::size_t index);

/// Sum of the fine increments of every channel over the window.
std::vector<Complex> window_increments(const BrownianPath& path, const StepWindow& w);

/// Per-mode time integrals of one coarse step [t0, t0 + t]:
///   weighted_k = Phi_k int (s - t0) dW_k(s)        (left Riemann sums)
///   averaged_k = Phi_k int (W_k(s) - W_k(t0)) ds   (trapezoid rule)
struct StepTimeIntegrals {
  SpectralField weighted;
  SpectralField averaged;
};

/// Noise objects consumed by one scheme step of length t.
struct StepNoise {
  double t = 0.0;
  std::vector<Complex> increments;                // Delta W per channel
  SpectralField phi_chi;                          // Phi_k Delta W_k / sqrt(t); field noise only
  std::optional<StepTimeIntegrals> integrals;     // present when requested
};

/// (Phi chi)_k for coarse step `window`.
SpectralField step_chi(const BrownianPath& path, const StepWindow& window, const SmoothingOperator& phi);

/// Requires at least 4 fine steps per window.
StepTimeIntegrals step_time_integrals(const BrownianPath& path, const StepWindow& window,
                                      const SmoothingOperator& phi);

/// weighted integral with a deterministic Fourier weight: m(k) Phi_k int (s - t0) dW_k.
SpectralField time_weighted_integral(const StepTimeIntegrals& integrals, const Multiplier& weight);

StepNoise field_step_noise(const BrownianPath& path, const StepWindow& window,
                           const SmoothingOperator& phi, bool with_integrals);
StepNoise scalar_step_noise(const BrownianPath& path, const StepWindow& window);

/// Exact joint Gaussian draw of (Delta W_k, int s dW_k) per mode and real component,
/// covariance [[t, t^2/2], [t^2/2, t^3/3]]; the averaged integral is t Delta W - int s dW.
StepNoise sample_field_step_noise(const SmoothingOperator& phi, double t, bool with_integrals,
                                  std::mt19937_64& rng);
StepNoise sample_scalar_step_noise(std::size_t channels, double t, std::mt19937_64& rng);

/// Physical-space form of the second-order Ito term, (t/2)((Phi chi)^2 - Tr(Phi Phi^*)),
/// returned as spectral coefficients of the product.
SpectralField double_ito(const SpectralField& phi_chi, double t, const SmoothingOperator& phi);

/// Physical-space form of the third-order Ito term,
/// t^{3/2} ((Phi chi)^3 / 6 - Tr(Phi Phi^*) (Phi chi) / 2).
SpectralField triple_ito(const SpectralField& phi_chi, double t, const SmoothingOperator& phi);

/// Fine-path Riemann-Ito sum sum_j (W_a(s_j) - W_a(t0)) dW_b(s_j) over the window,
/// for channels a and b (with optional conjugation of either process).
Complex fine_double_ito(const BrownianPath& path, const StepWindow& window, std::size_t a,
                        std::size_t b, bool conj_a = false, bool conj_b = false);

/// Manakov noise on one coarse step: normalised increments chi_n of the three real
/// channels and the cross combinations of every ordered pair n < m.
struct ManakovStepNoise {
  std::array<double, 3> chi{};
  /// (1/2)(chi_n^2 - 1) + chi_n chi_m for (n, m) = (0,1), (0,2), (1,2).
  std::array<double, 3> pair_terms{};
  double combination() const noexcept { return pair_terms[0] + pair_terms[1] + pair_terms[2]; }
};

ManakovStepNoise manakov_step_noise(const StepNoise& noise);

/// Residual of the symmetrised cross-term identity
///   I_{nm} + I_{mn} - Delta W_n Delta W_m
/// built from fine-path Ito double integrals. It equals
/// -sum_j dW_n(s_j) dW_m(s_j) and vanishes as the fine step shrinks.
double symmetrized_cross_residual(const BrownianPath& path, const StepWindow& window,
                                  std::size_t n, std::size_t m);

/// Seed for sample `index` of stream `stream` derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream = 0);

}  // namespace lowreg
