#include "lowreg/schemes.hpp"

#include <cmath>
#include <stdexcept>

namespace lowreg {

namespace {

constexpr Complex kI{0.0, 1.0};

using Matrix2 = std::array<std::array<Complex, 2>, 2>;

Matrix2 pauli(int n) {
  switch (n) {
    case 0: return {{{Complex{0, 0}, Complex{1, 0}}, {Complex{1, 0}, Complex{0, 0}}}};
    case 1: return {{{Complex{0, 0}, Complex{0, -1}}, {Complex{0, 1}, Complex{0, 0}}}};
    default: return {{{Complex{1, 0}, Complex{0, 0}}, {Complex{0, 0}, Complex{-1, 0}}}};
  }
}

Matrix2 matmul(const Matrix2& a, const Matrix2& b) {
  Matrix2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) c[i][j] += a[i][l] * b[l][j];
  return c;
}

int product_degree(Scheme s) {
  return (s == Scheme::nls_high || s == Scheme::nls_high_expansion) ? 4 : 3;
}

bool needs_filters(Scheme s) {
  return s == Scheme::nls_high || s == Scheme::nls_high_expansion || s == Scheme::manakov;
}

}  // namespace

std::string_view scheme_name(Scheme s) noexcept {
  switch (s) {
    case Scheme::nls_low: return "nls-low";
    case Scheme::nls_additive: return "nls-additive";
    case Scheme::nls_high: return "nls-high";
    case Scheme::nls_high_expansion: return "nls-high-expansion";
    case Scheme::manakov: return "manakov";
    case Scheme::exponential_euler: return "exp-euler";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (auto s : {Scheme::nls_low, Scheme::nls_additive, Scheme::nls_high, Scheme::nls_high_expansion,
                 Scheme::manakov, Scheme::exponential_euler})
    if (scheme_name(s) == name) return s;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

bool scheme_needs_integrals(Scheme s) noexcept {
  return s == Scheme::nls_high || s == Scheme::nls_high_expansion;
}

int scheme_components(Scheme s) noexcept { return s == Scheme::manakov ? 2 : 1; }

bool scheme_is_manakov(Scheme s) noexcept { return s == Scheme::manakov; }

// ---------------------------------------------------------------- Stepper

Stepper::Stepper(Scheme scheme, const TorusGrid& grid, double t, const ModelParams& params)
    : scheme_(scheme),
      grid_(grid),
      t_(t),
      params_(params),
      transform_(grid, std::max(padded_points(grid.modes(), product_degree(scheme)), grid.points())) {
  if (!(t > 0.0)) throw std::invalid_argument("Stepper: step size must be positive");
  if (needs_filters(scheme) && grid.dim() != 1)
    throw std::invalid_argument(std::string(scheme_name(scheme)) + " is implemented for d = 1 only");
  if (!scheme_is_manakov(scheme)) {
    if (params_.phi.empty() || !params_.stochastic) params_.phi = SmoothingOperator::zero(grid);
    if (!params_.phi.grid().same_band(grid))
      throw std::invalid_argument("Stepper: smoothing operator grid differs from the state grid");
  }
  propagator_ = free_propagator(t).table(grid);
  if (scheme == Scheme::nls_low || scheme == Scheme::nls_additive) phi1_ = phi1_multiplier(t).table(grid);
  if (scheme_needs_integrals(scheme)) {
    k_symbol_.resize(grid.mode_count());
    k2_symbol_.resize(grid.mode_count());
    kpsi1_ = filter_psi(1, t).table(grid);
    for (std::size_t i = 0; i < grid.mode_count(); ++i) {
      const double k = grid.frequency(i)[0];
      k_symbol_[i] = k;
      k2_symbol_[i] = k * k;
      kpsi1_[i] *= k;
    }
  }
  if (scheme == Scheme::manakov) {
    d1_ = filtered_derivative(1, t).table(grid);
    d2_ = filtered_derivative(2, t).table(grid);
  }
  scratch_.resize(grid.mode_count());
}

void Stepper::synthesize(std::span<const Complex> coeffs, std::vector<Complex>& values,
                         const std::vector<Complex>* table) {
  values.resize(transform_.point_count());
  if (table) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) scratch_[i] = coeffs[i] * (*table)[i];
    transform_.synthesize(scratch_, values);
  } else {
    transform_.synthesize(coeffs, values);
  }
}

SpectralField Stepper::step(const SpectralField& u, const StepNoise& noise) {
  if (!u.grid().same_band(grid_)) throw std::invalid_argument("Stepper: state grid mismatch");
  if (u.components() != scheme_components(scheme_))
    throw std::invalid_argument("Stepper: wrong number of components for " + std::string(scheme_name(scheme_)));
  if (std::abs(noise.t - t_) > 1e-12 * t_) throw std::invalid_argument("Stepper: noise step size mismatch");
  if (!params_.stochastic && !scheme_is_manakov(scheme_)) {
    StepNoise quiet{t_, std::vector<Complex>(noise.increments.size()), SpectralField(params_.phi.grid()), {}};
    if (noise.integrals || scheme_needs_integrals(scheme_))
      quiet.integrals = StepTimeIntegrals{SpectralField(params_.phi.grid()), SpectralField(params_.phi.grid())};
    return scheme_needs_integrals(scheme_) ? step_high(u, quiet) : step_low(u, quiet);
  }
  switch (scheme_) {
    case Scheme::nls_low:
    case Scheme::nls_additive:
    case Scheme::exponential_euler: return step_low(u, noise);
    case Scheme::nls_high:
    case Scheme::nls_high_expansion: return step_high(u, noise);
    case Scheme::manakov: return step_manakov(u, noise);
  }
  throw std::logic_error("Stepper: unknown scheme");
}

SpectralField Stepper::step_low(const SpectralField& u, const StepNoise& noise) {
  const double t = t_;
  const double rt = std::sqrt(t);
  const Complex cubic = -kI * t * params_.cubic_coefficient();
  const double tr = params_.phi.trace();
  std::vector<Complex> U, Wbar, X;
  synthesize(u.component(0), U);
  if (scheme_ == Scheme::exponential_euler) {
    Wbar.resize(U.size());
    for (std::size_t j = 0; j < U.size(); ++j) Wbar[j] = std::conj(U[j]);
  } else {
    const auto ubar = conjugate_field(u);
    synthesize(ubar.component(0), Wbar, &phi1_);
  }
  const bool has_noise = noise.phi_chi.grid().same_band(grid_) && noise.phi_chi.mode_count() == grid_.mode_count();
  if (has_noise) synthesize(noise.phi_chi.component(0), X);
  else X.assign(U.size(), Complex{});
  for (std::size_t j = 0; j < U.size(); ++j) {
    const Complex v = U[j];
    const Complex x = X[j];
    Complex r = v + cubic * v * v * Wbar[j];
    if (scheme_ == Scheme::nls_additive) {
      r += -kI * rt * x;
    } else {
      r += -kI * rt * v * x - 0.5 * t * v * (x * x - tr);
    }
    U[j] = r;
  }
  return finish(U);
}

SpectralField Stepper::step_high(const SpectralField& u, const StepNoise& noise) {
  if (!noise.integrals) throw std::invalid_argument("second-order step needs the noise time integrals");
  const double t = t_;
  const double rt = std::sqrt(t);
  const double t32 = t * rt;
  const double c3 = params_.cubic_coefficient();
  const double tr = params_.phi.trace();
  const auto& in = *noise.integrals;
  std::vector<Complex> U, X, Jk, Jk2, U1, A, Abar, B;
  synthesize(u.component(0), U);
  synthesize(noise.phi_chi.component(0), X);
  synthesize(in.weighted.component(0), Jk, &k_symbol_);
  synthesize(in.weighted.component(0), Jk2, &k2_symbol_);
  synthesize(u.component(0), U1, &kpsi1_);
  synthesize(in.averaged.component(0), A);
  const bool display = scheme_ == Scheme::nls_high;
  if (!display) synthesize(in.weighted.component(0), B);
  for (std::size_t j = 0; j < U.size(); ++j) {
    const Complex v = U[j];
    const Complex vb = std::conj(v);
    const Complex x = X[j];
    const Complex a = A[j];
    const Complex ab = std::conj(a);
    Complex r = v - kI * t * c3 * v * v * vb - kI * rt * v * x;
    r += v * Jk2[j] + 2.0 * U1[j] * Jk[j];
    r -= 0.5 * t * v * (x * x - tr);
    r += kI * t32 * v * (x * x * x / 6.0 - 0.5 * tr * x);
    if (display) {
      r += -(1.0 + 2.0 * kI) * t32 * c3 * v * v * vb * x;
      r += kI * c3 * v * vb * vb * ab;
    } else {
      r += c3 * v * v * vb * (-2.0 * a + ab - B[j]);
    }
    U[j] = r;
  }
  return finish(U);
}

SpectralField Stepper::step_manakov(const SpectralField& u, const StepNoise& noise) {
  const auto mn = manakov_step_noise(noise);
  const double t = t_;
  const Complex cubic = -kI * t * params_.cubic_coefficient();
  const std::size_t np = transform_.point_count();
  std::vector<Complex> U0, U1;
  synthesize(u.component(0), U0);
  synthesize(u.component(1), U1);
  std::vector<Complex> values(2 * np);
  for (std::size_t j = 0; j < np; ++j) {
    const Complex a = U0[j], b = U1[j];
    double n0, n1;
    if (params_.coupling == ManakovCoupling::vector) {
      n0 = n1 = std::norm(a) + std::norm(b);
    } else {
      n0 = std::norm(a);
      n1 = std::norm(b);
    }
    values[j] = a + cubic * n0 * a;
    values[np + j] = b + cubic * n1 * b;
  }
  SpectralField r(grid_, 2);
  transform_.analyze(std::span<const Complex>(values).subspan(0, np), r.component(0));
  transform_.analyze(std::span<const Complex>(values).subspan(np, np), r.component(1));

  if (!params_.stochastic) return apply_table(r, propagator_);
  const Complex c = params_.manakov_constant();
  Matrix2 first{}, second{};
  for (int n = 0; n < 3; ++n) {
    const auto s = pauli(n);
    for (int i = 0; i < 2; ++i)
      for (int l = 0; l < 2; ++l) first[i][l] += -kI * std::sqrt(t) * c * mn.chi[n] * s[i][l];
  }
  const std::array<std::array<int, 2>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  for (int p = 0; p < 3; ++p) {
    const auto prod = matmul(pauli(pairs[p][1]), pauli(pairs[p][0]));
    for (int i = 0; i < 2; ++i)
      for (int l = 0; l < 2; ++l) second[i][l] += 0.5 * t * c * c * mn.pair_terms[p] * prod[i][l];
  }
  SpectralField out(grid_, 2);
  for (std::size_t m = 0; m < grid_.mode_count(); ++m) {
    const Complex du[2] = {d1_[m] * u.at(m, 0), d1_[m] * u.at(m, 1)};
    const Complex ddu[2] = {d2_[m] * u.at(m, 0), d2_[m] * u.at(m, 1)};
    for (int i = 0; i < 2; ++i) {
      Complex v = r.at(m, i);
      for (int l = 0; l < 2; ++l) v += first[i][l] * du[l] + second[i][l] * ddu[l];
      out.at(m, i) = propagator_[m] * v;
    }
  }
  return out;
}

SpectralField Stepper::finish(const std::vector<Complex>& values) {
  SpectralField out(grid_);
  transform_.analyze(values, out.component(0));
  auto c = out.component(0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= propagator_[i];
  return out;
}

// ---------------------------------------------------------------- free functions

namespace {

SpectralField one_step(Scheme s, const SpectralField& u, double t, const StepNoise& noise,
                       const ModelParams& params) {
  Stepper stepper(s, u.grid(), t, params);
  return stepper.step(u, noise);
}

}  // namespace

SpectralField step_nls_low(const SpectralField& u, double t, const StepNoise& noise, const ModelParams& params) {
  return one_step(Scheme::nls_low, u, t, noise, params);
}
SpectralField step_nls_additive(const SpectralField& u, double t, const StepNoise& noise,
                                const ModelParams& params) {
  return one_step(Scheme::nls_additive, u, t, noise, params);
}
SpectralField step_nls_high(const SpectralField& u, double t, const StepNoise& noise, const ModelParams& params) {
  return one_step(Scheme::nls_high, u, t, noise, params);
}
SpectralField step_nls_high_expansion(const SpectralField& u, double t, const StepNoise& noise,
                                      const ModelParams& params) {
  return one_step(Scheme::nls_high_expansion, u, t, noise, params);
}
SpectralField step_manakov(const SpectralField& u, double t, const StepNoise& noise, const ModelParams& params) {
  return one_step(Scheme::manakov, u, t, noise, params);
}
SpectralField step_exponential_euler(const SpectralField& u, double t, const StepNoise& noise,
                                     const ModelParams& params) {
  return one_step(Scheme::exponential_euler, u, t, noise, params);
}

NoiseProvider path_noise(const BrownianPath& path, std::size_t steps, Scheme scheme,
                         const SmoothingOperator& phi) {
  coarse_window(path, steps, 0);
  if (scheme_is_manakov(scheme)) {
    if (path.channels() != 3) throw std::invalid_argument("Manakov noise needs a three-channel path");
    return [&path, steps](std::size_t l) { return scalar_step_noise(path, coarse_window(path, steps, l)); };
  }
  const bool integrals = scheme_needs_integrals(scheme);
  return [&path, &phi, steps, integrals](std::size_t l) {
    return field_step_noise(path, coarse_window(path, steps, l), phi, integrals);
  };
}

Trajectory evolve(Scheme scheme, const SpectralField& v, double horizon, std::size_t steps,
                  const NoiseProvider& noise, const ModelParams& params, std::size_t record_stride) {
  if (steps == 0) throw std::invalid_argument("evolve: need at least one step");
  const double t = horizon / static_cast<double>(steps);
  Stepper stepper(scheme, v.grid(), t, params);
  Trajectory out;
  out.steps.push_back(0);
  out.states.push_back(v);
  SpectralField u = v;
  for (std::size_t l = 0; l < steps; ++l) {
    const StepNoise n = noise(l);
    if (std::abs(n.t - t) > 1e-9 * t) throw std::invalid_argument("evolve: noise-path horizon mismatch");
    u = stepper.step(u, n);
    if (!u.all_finite())
      throw std::runtime_error("evolve: state became non-finite at step " + std::to_string(l + 1));
    const std::size_t done = l + 1;
    if ((record_stride != 0 && done % record_stride == 0) || done == steps) {
      if (out.steps.back() != done) {
        out.steps.push_back(done);
        out.states.push_back(u);
      }
    }
  }
  return out;
}

Trajectory evolve(Scheme scheme, const SpectralField& v, double horizon, std::size_t steps,
                  const BrownianPath& path, const ModelParams& params, std::size_t record_stride) {
  if (std::abs(path.horizon() - horizon) > 1e-12 * horizon)
    throw std::invalid_argument("evolve: noise-path horizon mismatch");
  const SmoothingOperator phi = params.phi.empty() && !scheme_is_manakov(scheme)
                                    ? SmoothingOperator::zero(v.grid())
                                    : params.phi;
  return evolve(scheme, v, horizon, steps, path_noise(path, steps, scheme, phi), params, record_stride);
}

}  // namespace lowreg
