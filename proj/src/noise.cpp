#include "lowreg/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace lowreg {

SmoothingOperator::SmoothingOperator(TorusGrid grid, std::vector<Complex> coefficients)
    : grid_(std::move(grid)), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != grid_.mode_count())
    throw std::invalid_argument("SmoothingOperator: coefficient count does not match the grid");
}

SmoothingOperator SmoothingOperator::power_law(const TorusGrid& grid, double sigma, double amplitude) {
  std::vector<Complex> c(grid.mode_count());
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = amplitude * std::pow(1.0 + grid.wavenumber_squared(i), -0.5 * sigma);
  return SmoothingOperator(grid, std::move(c));
}

SmoothingOperator SmoothingOperator::zero(const TorusGrid& grid) {
  return SmoothingOperator(grid, std::vector<Complex>(grid.mode_count()));
}

double SmoothingOperator::trace() const noexcept {
  double s = 0.0;
  for (auto c : coeffs_) s += std::norm(c);
  return s;
}

Complex SmoothingOperator::trace_square() const noexcept {
  Complex s{};
  for (auto c : coeffs_) s += c * c;
  return s;
}

double SmoothingOperator::trace_laplacian_squared() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const double k2 = grid_.wavenumber_squared(i);
    s += k2 * k2 * std::norm(coeffs_[i]);
  }
  return s;
}

double SmoothingOperator::trace_bilaplacian_squared() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const double k4 = std::pow(grid_.wavenumber_squared(i), 2);
    s += k4 * k4 * std::norm(coeffs_[i]);
  }
  return s;
}

double weighted_trace(const SmoothingOperator& phi, const Multiplier& weight) {
  const auto table = weight.table(phi.grid());
  double s = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) s += (table[i] * std::norm(phi[i])).real();
  return s;
}

bool trace_is_cauchy(double sigma, int dim, int weight_power, int k0, int doublings, double tol) {
  auto partial = [&](int K) {
    const TorusGrid g(dim, K);
    double s = 0.0;
    for (std::size_t i = 0; i < g.mode_count(); ++i) {
      const double k2 = g.wavenumber_squared(i);
      s += std::pow(k2, weight_power) * std::pow(1.0 + k2, -sigma);
    }
    return s;
  };
  double previous = partial(k0);
  for (int j = 1, K = 2 * k0; j <= doublings; ++j, K *= 2) {
    const double current = partial(K);
    if (std::abs(current - previous) > tol * std::abs(current)) return false;
    previous = current;
  }
  return true;
}

// ---------------------------------------------------------------- paths

namespace {

std::vector<Complex> draw_increments(std::size_t steps, std::size_t channels, double dt, bool complex,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  std::vector<Complex> out(steps * channels);
  for (auto& z : out) {
    const double re = normal(rng);
    const double im = complex ? normal(rng) : 0.0;
    z = Complex(re, im);
  }
  return out;
}

}  // namespace

BrownianPath BrownianPath::sample_field(const TorusGrid& grid, double horizon, std::size_t steps,
                                        std::uint64_t seed) {
  if (!(horizon > 0.0) || steps == 0) throw std::invalid_argument("BrownianPath: empty horizon");
  BrownianPath p;
  p.grid_ = grid;
  p.horizon_ = horizon;
  p.steps_ = steps;
  p.channels_ = grid.mode_count();
  p.field_ = true;
  p.increments_ = draw_increments(steps, p.channels_, p.dt(), true, seed);
  return p;
}

BrownianPath BrownianPath::sample_real(std::size_t channels, double horizon, std::size_t steps,
                                       std::uint64_t seed) {
  if (!(horizon > 0.0) || steps == 0) throw std::invalid_argument("BrownianPath: empty horizon");
  BrownianPath p;
  p.horizon_ = horizon;
  p.steps_ = steps;
  p.channels_ = channels;
  p.field_ = false;
  p.increments_ = draw_increments(steps, channels, p.dt(), false, seed);
  return p;
}

StepWindow coarse_window(const BrownianPath& path, std::size_t coarse_steps, std::size_t index) {
  if (coarse_steps == 0 || path.steps() % coarse_steps != 0)
    throw std::invalid_argument("coarse_window: fine step count " + std::to_string(path.steps()) +
                                " is not divisible by " + std::to_string(coarse_steps));
  if (index >= coarse_steps) throw std::out_of_range("coarse_window: step index past horizon");
  const std::size_t per = path.steps() / coarse_steps;
  return StepWindow{index * per, per, path.dt()};
}

std::vector<Complex> window_increments(const BrownianPath& path, const StepWindow& w) {
  std::vector<Complex> sum(path.channels());
  for (std::size_t j = w.first; j < w.first + w.count; ++j) {
    auto inc = path.increments(j);
    for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += inc[c];
  }
  return sum;
}

namespace {

void require_field(const BrownianPath& path, const SmoothingOperator& phi) {
  if (!path.is_field()) throw std::invalid_argument("field noise requested from a scalar path");
  if (!path.grid().same_band(phi.grid()))
    throw std::invalid_argument("noise grid does not match the smoothing operator");
}

SpectralField phi_chi_from(const std::vector<Complex>& increments, double t, const SmoothingOperator& phi) {
  SpectralField out(phi.grid());
  const double scale = 1.0 / std::sqrt(t);
  for (std::size_t i = 0; i < increments.size(); ++i) out.at(i) = phi[i] * increments[i] * scale;
  return out;
}

}  // namespace

SpectralField step_chi(const BrownianPath& path, const StepWindow& window, const SmoothingOperator& phi) {
  require_field(path, phi);
  return phi_chi_from(window_increments(path, window), window.length(), phi);
}

StepTimeIntegrals step_time_integrals(const BrownianPath& path, const StepWindow& window,
                                      const SmoothingOperator& phi) {
  require_field(path, phi);
  if (window.count < 4)
    throw std::invalid_argument("step_time_integrals: need at least 4 fine steps per coarse step");
  const std::size_t n = path.channels();
  std::vector<Complex> w(n), weighted(n), averaged(n);
  const double h = window.fine_dt;
  for (std::size_t j = 0; j < window.count; ++j) {
    const double tau = h * static_cast<double>(j);
    auto inc = path.increments(window.first + j);
    for (std::size_t c = 0; c < n; ++c) {
      weighted[c] += tau * inc[c];
      const Complex next = w[c] + inc[c];
      averaged[c] += 0.5 * h * (w[c] + next);
      w[c] = next;
    }
  }
  StepTimeIntegrals out{SpectralField(phi.grid()), SpectralField(phi.grid())};
  for (std::size_t c = 0; c < n; ++c) {
    out.weighted.at(c) = phi[c] * weighted[c];
    out.averaged.at(c) = phi[c] * averaged[c];
  }
  return out;
}

SpectralField time_weighted_integral(const StepTimeIntegrals& integrals, const Multiplier& weight) {
  return apply_multiplier(integrals.weighted, weight);
}

StepNoise field_step_noise(const BrownianPath& path, const StepWindow& window,
                           const SmoothingOperator& phi, bool with_integrals) {
  require_field(path, phi);
  StepNoise out;
  out.t = window.length();
  out.increments = window_increments(path, window);
  out.phi_chi = phi_chi_from(out.increments, out.t, phi);
  if (with_integrals) out.integrals = step_time_integrals(path, window, phi);
  return out;
}

StepNoise scalar_step_noise(const BrownianPath& path, const StepWindow& window) {
  StepNoise out;
  out.t = window.length();
  out.increments = window_increments(path, window);
  return out;
}

StepNoise sample_field_step_noise(const SmoothingOperator& phi, double t, bool with_integrals,
                                  std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = phi.grid().mode_count();
  StepNoise out;
  out.t = t;
  out.increments.resize(n);
  std::vector<Complex> moment(n);
  const double rt = std::sqrt(t);
  const double t32 = t * rt;
  for (std::size_t c = 0; c < n; ++c) {
    double part[2][2];
    for (auto& p : part) {
      const double z1 = normal(rng);
      const double z2 = normal(rng);
      p[0] = rt * z1;
      p[1] = t32 * (0.5 * z1 + z2 / (2.0 * std::sqrt(3.0)));
    }
    out.increments[c] = Complex(part[0][0], part[1][0]);
    moment[c] = Complex(part[0][1], part[1][1]);
  }
  out.phi_chi = phi_chi_from(out.increments, t, phi);
  if (with_integrals) {
    StepTimeIntegrals ti{SpectralField(phi.grid()), SpectralField(phi.grid())};
    for (std::size_t c = 0; c < n; ++c) {
      ti.weighted.at(c) = phi[c] * moment[c];
      ti.averaged.at(c) = phi[c] * (t * out.increments[c] - moment[c]);
    }
    out.integrals = std::move(ti);
  }
  return out;
}

StepNoise sample_scalar_step_noise(std::size_t channels, double t, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(t));
  StepNoise out;
  out.t = t;
  out.increments.resize(channels);
  for (auto& z : out.increments) z = Complex(normal(rng), 0.0);
  return out;
}

// ---------------------------------------------------------------- iterated integrals

namespace {

SpectralField polynomial_in_chi(const SpectralField& phi_chi, int degree,
                                const std::function<Complex(Complex)>& poly) {
  const auto& g = phi_chi.grid();
  PaddedTransform tr(g, std::max(padded_points(g.modes(), degree), g.points()));
  std::vector<Complex> values(tr.point_count());
  tr.synthesize(phi_chi.component(0), values);
  for (auto& v : values) v = poly(v);
  SpectralField out(g);
  tr.analyze(values, out.component(0));
  return out;
}

}  // namespace

SpectralField double_ito(const SpectralField& phi_chi, double t, const SmoothingOperator& phi) {
  const double tr = phi.trace();
  return polynomial_in_chi(phi_chi, 2, [=](Complex x) { return 0.5 * t * (x * x - tr); });
}

SpectralField triple_ito(const SpectralField& phi_chi, double t, const SmoothingOperator& phi) {
  const double tr = phi.trace();
  const double t32 = t * std::sqrt(t);
  return polynomial_in_chi(phi_chi, 3,
                           [=](Complex x) { return t32 * (x * x * x / 6.0 - 0.5 * tr * x); });
}

Complex fine_double_ito(const BrownianPath& path, const StepWindow& window, std::size_t a,
                        std::size_t b, bool conj_a, bool conj_b) {
  Complex wa{}, sum{};
  for (std::size_t j = window.first; j < window.first + window.count; ++j) {
    const Complex da = conj_a ? std::conj(path.increment(j, a)) : path.increment(j, a);
    const Complex db = conj_b ? std::conj(path.increment(j, b)) : path.increment(j, b);
    sum += wa * db;
    wa += da;
  }
  return sum;
}

ManakovStepNoise manakov_step_noise(const StepNoise& noise) {
  if (noise.increments.size() != 3) throw std::invalid_argument("Manakov noise needs three channels");
  ManakovStepNoise out;
  const double scale = 1.0 / std::sqrt(noise.t);
  for (int n = 0; n < 3; ++n) out.chi[n] = noise.increments[n].real() * scale;
  const std::array<std::array<int, 2>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  for (int p = 0; p < 3; ++p) {
    const double cn = out.chi[pairs[p][0]];
    const double cm = out.chi[pairs[p][1]];
    out.pair_terms[p] = 0.5 * (cn * cn - 1.0) + cn * cm;
  }
  return out;
}

double symmetrized_cross_residual(const BrownianPath& path, const StepWindow& window, std::size_t n,
                                  std::size_t m) {
  const double inm = fine_double_ito(path, window, n, m).real();
  const double imn = fine_double_ito(path, window, m, n).real();
  const auto inc = window_increments(path, window);
  return inm + imn - inc[n].real() * inc[m].real();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace lowreg
