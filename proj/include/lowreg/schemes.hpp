#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "lowreg/noise.hpp"
#include "lowreg/spectral.hpp"

namespace lowreg {

enum class Scheme {
  nls_low,             // first-order low-regularity integrator, multiplicative noise
  nls_additive,        // same integrator, additive noise
  nls_high,            // second-order integrator as displayed
  nls_high_expansion,  // second-order integrator with the tree-consistent t^{3/2} terms
  manakov,             // stochastic Manakov integrator
  exponential_euler,   // baseline: nls_low with phi1 replaced by 1
};

std::string_view scheme_name(Scheme s) noexcept;
Scheme parse_scheme(std::string_view name);
bool scheme_needs_integrals(Scheme s) noexcept;
int scheme_components(Scheme s) noexcept;
bool scheme_is_manakov(Scheme s) noexcept;

enum class ManakovCoupling { vector, componentwise };

struct ModelParams {
  double lambda = -1.0;
  bool nonlinear = true;
  // false drops every stochastic term of a step, including the Ito corrections.
  bool stochastic = true;
  SmoothingOperator phi;
  double gamma = 0.0;
  ManakovCoupling coupling = ManakovCoupling::vector;

  // Coefficient c3 of the cubic vertex; the step's cubic term is -i t c3 u^2 conj(u).
  double cubic_coefficient() const noexcept { return nonlinear ? -lambda : 0.0; }
  Complex manakov_constant() const noexcept { return {1.5 * gamma, 1.0}; }
};

// One-step map of a scheme for a fixed grid and step size. Holds precomputed multiplier
// tables and transform buffers, so an instance must not be shared between threads.
class Stepper {
 public:
  Stepper(Scheme scheme, const TorusGrid& grid, double t, const ModelParams& params);

  SpectralField step(const SpectralField& u, const StepNoise& noise);

  Scheme scheme() const noexcept { return scheme_; }
  double step_size() const noexcept { return t_; }

 private:
  SpectralField step_low(const SpectralField& u, const StepNoise& noise);
  SpectralField step_high(const SpectralField& u, const StepNoise& noise);
  SpectralField step_manakov(const SpectralField& u, const StepNoise& noise);

  void synthesize(std::span<const Complex> coeffs, std::vector<Complex>& values,
                  const std::vector<Complex>* table = nullptr);
  SpectralField finish(const std::vector<Complex>& values);

  Scheme scheme_;
  TorusGrid grid_;
  double t_;
  ModelParams params_;
  PaddedTransform transform_;
  std::vector<Complex> propagator_, phi1_, k_symbol_, k2_symbol_, kpsi1_, d1_, d2_;
  std::vector<Complex> scratch_;
};

SpectralField step_nls_low(const SpectralField& u, double t, const StepNoise& noise, const ModelParams& params);
SpectralField step_nls_additive(const SpectralField& u, double t, const StepNoise& noise,
                                const ModelParams& params);
SpectralField step_nls_high(const SpectralField& u, double t, const StepNoise& noise, const ModelParams& params);
SpectralField step_nls_high_expansion(const SpectralField& u, double t, const StepNoise& noise,
                                      const ModelParams& params);
SpectralField step_manakov(const SpectralField& u, double t, const StepNoise& noise, const ModelParams& params);
SpectralField step_exponential_euler(const SpectralField& u, double t, const StepNoise& noise,
                                     const ModelParams& params);

struct Trajectory {
  std::vector<std::size_t> steps;  // step index of each recorded state
  std::vector<SpectralField> states;
  const SpectralField& final_state() const { return states.back(); }
};

using NoiseProvider = std::function<StepNoise(std::size_t step)>;

// Noise of coarse step l aggregated from a fine path (N must divide path.steps()).
NoiseProvider path_noise(const BrownianPath& path, std::size_t steps, Scheme scheme,
                         const SmoothingOperator& phi);

// Records the initial state and every `record_stride`-th state (stride 0: final only).
// Throws std::runtime_error naming the step when the state stops being finite.
Trajectory evolve(Scheme scheme, const SpectralField& v, double horizon, std::size_t steps,
                  const NoiseProvider& noise, const ModelParams& params, std::size_t record_stride = 1);
Trajectory evolve(Scheme scheme, const SpectralField& v, double horizon, std::size_t steps,
                  const BrownianPath& path, const ModelParams& params, std::size_t record_stride = 1);

}  // namespace lowreg
