#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lowreg/config.hpp"
#include "lowreg/noise.hpp"
#include "lowreg/schemes.hpp"
#include "lowreg/spectral.hpp"

namespace lowreg {

struct InitialDataSpec {
  std::string mode = "random-phase";  // random-phase | deterministic | plane-wave
  double regularity = 1.0;            // n
  double margin = 0.1;                // epsilon
  double amplitude = 1.0;
  std::uint64_t seed = 7;
  int plane_wave_mode = 1;
};

// v_k = A (1 + |k|^2)^{-(n + d/2 + eps)/2} eta_k with |eta_k| = 1 (random phases or 1),
// or the single plane wave A e^{i k0 x}.
SpectralField make_initial_data(const TorusGrid& grid, int components, const InitialDataSpec& spec);

SpectralField plane_wave(const TorusGrid& grid, Complex amplitude, const Frequency& k0);
// Exact solution c e^{i k0 x} e^{i(-|k0|^2 + lambda |c|^2) t} of the deterministic equation.
SpectralField plane_wave_exact(const TorusGrid& grid, Complex amplitude, const Frequency& k0,
                               double lambda, double t);

struct ExperimentConfig {
  Scheme scheme = Scheme::nls_low;
  Scheme reference = Scheme::nls_high_expansion;
  int dim = 1;
  int modes = 32;
  double lambda = -1.0;
  bool nonlinear = true;
  bool stochastic = true;
  double sigma_phi = 4.0;
  double phi_amplitude = 1.0;
  double gamma = 0.0;
  ManakovCoupling coupling = ManakovCoupling::vector;
  double horizon = 1.0;
  std::vector<std::size_t> steps{16, 32, 64, 128, 256, 512};
  std::size_t n_fine = 4096;
  std::size_t path_substeps = 4;
  std::size_t samples = 64;
  std::uint64_t seed = 20240917;
  unsigned threads = 0;
  double error_s = 1.0;
  double error_p = 2.0;
  InitialDataSpec data;

  // Reads a RunConfig, resolving every `auto` entry, and validates it.
  static ExperimentConfig from(const RunConfig& config);
  // The same configuration written back with every `auto` resolved.
  RunConfig normalized(const RunConfig& base) const;
  void validate() const;

  TorusGrid grid() const { return TorusGrid(dim, modes); }
  ModelParams model() const;
  int components() const { return scheme_components(scheme); }
};

// Runs f(i) for i in [0, count) on up to `threads` workers (0: hardware concurrency).
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& f);

// Brownian path of sample `index` for a configuration (field or three real channels).
BrownianPath sample_path(const ExperimentConfig& cfg, std::size_t fine_steps, std::size_t index);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;  // log10 units
  std::size_t points = 0;
  bool reliable = false;
};

// Least squares fit of log10 y against log10 x over the points with use[i] set.
SlopeFit fit_slope(std::span<const double> x, std::span<const double> y, const std::vector<bool>& use,
                   double residual_limit = 0.2);

struct ConvergenceRow {
  std::size_t steps = 0;
  double t = 0.0;
  double strong_error = 0.0;  // (E sup_l ||e_l||^2)^{1/2}
  double strong_se = 0.0;     // standard error of strong_error
  double pathwise_median = 0.0;
  double pathwise_max = 0.0;
  bool fitted = false;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  SlopeFit strong_fit;
  SlopeFit pathwise_median_fit;
  SlopeFit pathwise_max_fit;
  double reference_floor = 0.0;  // strong difference between the reference at n_fine and n_fine/2
  bool monotone = true;
};

ConvergenceReport run_convergence(const ExperimentConfig& cfg);
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report, const ExperimentConfig& cfg,
                           const std::string& echo);

struct StabilityRow {
  double delta = 0.0;
  double ratio_median = 0.0;
  double ratio_max = 0.0;
  double difference_median = 0.0;
};

// Propagates v and v + delta w with the same noise, ||w|| = 1 in the error norm, and
// reports ||S^N(v) - S^N(v + delta w)|| / delta across samples.
std::vector<StabilityRow> stability_probe(const ExperimentConfig& cfg, std::span<const double> deltas,
                                          std::size_t steps);

struct T4ProbeConfig {
  std::array<Frequency, 4> k{Frequency{1, 0, 0}, Frequency{2, 0, 0}, Frequency{3, 0, 0}, Frequency{1, 0, 0}};
  std::vector<int> exponents{4, 5, 6, 7, 8, 9};  // t = 2^{-e}
  std::vector<int> k3_ladder{2, 4, 8};
  std::size_t quadrature = 512;
  std::size_t samples = 400;
  int order_halves = 4;
  std::uint64_t seed = 20240917;
  unsigned threads = 0;
};

struct T4ProbePoint {
  double t = 0.0;
  int k3 = 0;
  double rms_error = 0.0;
  double se = 0.0;
};

struct T4ProbeReport {
  std::vector<T4ProbePoint> t_series;
  SlopeFit t_fit;
  std::vector<T4ProbePoint> k3_series;  // at the smallest t
  SlopeFit k3_fit;
};

T4ProbeReport probe_t4(const T4ProbeConfig& cfg);

struct NoiseCheckRow {
  std::string name;
  double measured = 0.0;
  double theory = 0.0;
  double std_error = 0.0;
  bool pass = false;
};

struct NoiseCheckConfig {
  std::size_t samples = 10000;
  double step = 0.0625;
  std::size_t substeps = 256;
  std::vector<std::size_t> ladder{32, 64, 128, 256};
  std::uint64_t seed = 20240917;
};

struct NoiseCheckReport {
  std::vector<NoiseCheckRow> rows;
  std::vector<std::pair<std::size_t, double>> cross_residual;  // (substeps, rms residual)
  SlopeFit cross_fit;                                           // residual against fine dt
  std::vector<std::pair<std::size_t, double>> real_projection;  // same-mode double integral discrepancy
  SlopeFit real_projection_fit;
  double complex_convention_gap = 0.0;  // mean |formula - fine sum| for one complex mode
};

NoiseCheckReport noise_check(const NoiseCheckConfig& cfg);

// Formats a double with the shortest round-trip representation.
std::string format_number(double x);

}  // namespace lowreg
