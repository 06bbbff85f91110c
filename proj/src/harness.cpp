#include "lowreg/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "lowreg/trees.hpp"

namespace lowreg {

// ---------------------------------------------------------------- data

SpectralField make_initial_data(const TorusGrid& grid, int components, const InitialDataSpec& spec) {
  SpectralField v(grid, components);
  if (spec.mode == "plane-wave") {
    for (int c = 0; c < components; ++c) v.at(Frequency{spec.plane_wave_mode, 0, 0}, c) = spec.amplitude;
    return v;
  }
  const bool random = spec.mode == "random-phase";
  if (!random && spec.mode != "deterministic")
    throw std::invalid_argument("unknown initial data mode '" + spec.mode + "'");
  const double decay = 0.5 * (spec.regularity + 0.5 * grid.dim() + spec.margin);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int c = 0; c < components; ++c) {
    for (std::size_t i = 0; i < grid.mode_count(); ++i) {
      const double r = spec.amplitude * std::pow(1.0 + grid.wavenumber_squared(i), -decay);
      v.at(i, c) = random ? std::polar(r, angle(rng)) : Complex(r, 0.0);
    }
  }
  return v;
}

SpectralField plane_wave(const TorusGrid& grid, Complex amplitude, const Frequency& k0) {
  SpectralField v(grid);
  v.at(k0) = amplitude;
  return v;
}

SpectralField plane_wave_exact(const TorusGrid& grid, Complex amplitude, const Frequency& k0,
                               double lambda, double t) {
  const double omega = -squared_norm(k0) + lambda * std::norm(amplitude);
  return plane_wave(grid, amplitude * std::polar(1.0, omega * t), k0);
}

// ---------------------------------------------------------------- configuration

namespace {

Scheme default_reference(Scheme s) {
  switch (s) {
    case Scheme::nls_additive: return Scheme::nls_additive;
    case Scheme::manakov: return Scheme::manakov;
    default: return Scheme::nls_high_expansion;
  }
}

double default_sigma(Scheme s) {
  switch (s) {
    case Scheme::nls_high:
    case Scheme::nls_high_expansion: return 6.0;
    case Scheme::manakov: return 0.0;
    default: return 4.0;
  }
}

double default_regularity(Scheme s) {
  switch (s) {
    case Scheme::nls_high:
    case Scheme::nls_high_expansion: return 2.0;
    case Scheme::manakov: return 3.0;
    default: return 1.0;
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from(const RunConfig& c) {
  ExperimentConfig e;
  e.scheme = parse_scheme(c.get("scheme"));
  e.reference = c.get("reference") == "auto" ? default_reference(e.scheme) : parse_scheme(c.get("reference"));
  e.dim = static_cast<int>(c.get_int("dim"));
  e.modes = static_cast<int>(c.get_int("modes"));
  e.lambda = c.get_double("lambda");
  e.nonlinear = c.get_bool("nonlinear");
  e.stochastic = c.get_bool("stochastic");
  e.sigma_phi = c.get("sigma_phi") == "auto" ? default_sigma(e.scheme) : c.get_double("sigma_phi");
  e.phi_amplitude = c.get_double("phi_amplitude");
  e.gamma = c.get_double("gamma");
  const auto& coupling = c.get("manakov_coupling");
  if (coupling == "vector") e.coupling = ManakovCoupling::vector;
  else if (coupling == "componentwise") e.coupling = ManakovCoupling::componentwise;
  else throw std::invalid_argument("manakov_coupling must be vector or componentwise");
  e.horizon = c.get_double("horizon");
  e.steps.clear();
  for (auto n : c.get_int_list("steps")) {
    if (n <= 0) throw std::invalid_argument("steps must be positive");
    e.steps.push_back(static_cast<std::size_t>(n));
  }
  const auto fine = c.get_int("n_fine");
  const auto sub = c.get_int("path_substeps");
  const auto samples = c.get_int("samples");
  if (fine <= 0 || sub <= 0 || samples <= 0)
    throw std::invalid_argument("n_fine, path_substeps and samples must be positive");
  e.n_fine = static_cast<std::size_t>(fine);
  e.path_substeps = static_cast<std::size_t>(sub);
  e.samples = static_cast<std::size_t>(samples);
  e.seed = c.get_uint("seed");
  e.threads = static_cast<unsigned>(c.get_int("threads"));
  e.data.mode = c.get("data");
  e.data.regularity =
      c.get("data_regularity") == "auto" ? default_regularity(e.scheme) : c.get_double("data_regularity");
  e.data.margin = c.get_double("data_margin");
  e.data.amplitude = c.get_double("data_amplitude");
  e.data.seed = c.get_uint("data_seed");
  e.data.plane_wave_mode = static_cast<int>(c.get_int("plane_wave_mode"));
  e.error_s = c.get("error_s") == "auto" ? e.data.regularity : c.get_double("error_s");
  e.error_p = c.get_double("error_p");
  e.validate();
  return e;
}

RunConfig ExperimentConfig::normalized(const RunConfig& base) const {
  RunConfig c = base;
  c.set("reference", scheme_name(reference));
  c.set("sigma_phi", format_number(sigma_phi));
  c.set("data_regularity", format_number(data.regularity));
  c.set("error_s", format_number(error_s));
  return c;
}

void ExperimentConfig::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
  if (modes < 0) throw std::invalid_argument("modes must be non-negative");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (steps.empty()) throw std::invalid_argument("steps must list at least one N");
  if (path_substeps < 4) throw std::invalid_argument("path_substeps must be at least 4");
  for (auto n : steps)
    if (n_fine % n != 0)
      throw std::invalid_argument("n_fine = " + std::to_string(n_fine) + " is not divisible by N = " +
                                  std::to_string(n));
  if (n_fine % 2 != 0) throw std::invalid_argument("n_fine must be even");
  if (scheme_is_manakov(scheme) != scheme_is_manakov(reference))
    throw std::invalid_argument("reference scheme must solve the same equation as the tested scheme");
  if ((scheme == Scheme::nls_additive) != (reference == Scheme::nls_additive))
    throw std::invalid_argument("additive noise needs an additive reference");
  if (error_p < 1.0) throw std::invalid_argument("error_p must be at least 1");
}

ModelParams ExperimentConfig::model() const {
  ModelParams m;
  m.lambda = lambda;
  m.nonlinear = nonlinear;
  m.stochastic = stochastic;
  m.gamma = gamma;
  m.coupling = coupling;
  if (!scheme_is_manakov(scheme)) m.phi = SmoothingOperator::power_law(grid(), sigma_phi, phi_amplitude);
  return m;
}

// ---------------------------------------------------------------- utilities

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& f) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

BrownianPath sample_path(const ExperimentConfig& cfg, std::size_t fine_steps, std::size_t index) {
  const auto seed = derive_seed(cfg.seed, index, 1);
  if (scheme_is_manakov(cfg.scheme)) return BrownianPath::sample_real(3, cfg.horizon, fine_steps, seed);
  return BrownianPath::sample_field(cfg.grid(), cfg.horizon, fine_steps, seed);
}

SlopeFit fit_slope(std::span<const double> x, std::span<const double> y, const std::vector<bool>& use,
                   double residual_limit) {
  SlopeFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!use[i] || !(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    lx.push_back(std::log10(x[i]));
    ly.push_back(std::log10(y[i]));
  }
  fit.points = lx.size();
  if (lx.size() < 2) {
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    fit.intercept = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < lx.size(); ++i)
    fit.max_residual = std::max(fit.max_residual, std::abs(ly[i] - (fit.intercept + fit.slope * lx[i])));
  fit.reliable = fit.max_residual <= residual_limit;
  return fit;
}

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

namespace {

const SpectralField& state_at(const Trajectory& tr, std::size_t step) {
  const auto it = std::lower_bound(tr.steps.begin(), tr.steps.end(), step);
  if (it == tr.steps.end() || *it != step) throw std::logic_error("trajectory lacks a recorded step");
  return tr.states[static_cast<std::size_t>(it - tr.steps.begin())];
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct MeanSe {
  double rms;
  double se;
};

// sqrt of the mean of squares with a delta-method standard error.
MeanSe rms_with_se(const std::vector<double>& squares) {
  const double n = static_cast<double>(squares.size());
  const double mean = std::accumulate(squares.begin(), squares.end(), 0.0) / n;
  double var = 0.0;
  for (double s : squares) var += (s - mean) * (s - mean);
  var = squares.size() > 1 ? var / (n - 1.0) : 0.0;
  const double rms = std::sqrt(mean);
  const double se = rms > 0.0 ? std::sqrt(var / n) / (2.0 * rms) : 0.0;
  return {rms, se};
}

}  // namespace

// ---------------------------------------------------------------- convergence

ConvergenceReport run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto grid = cfg.grid();
  const auto model = cfg.model();
  const auto v = make_initial_data(grid, cfg.components(), cfg.data);
  const std::size_t nj = cfg.steps.size();
  std::size_t stride = 0;
  for (auto n : cfg.steps) stride = std::gcd(stride, cfg.n_fine / n);
  const std::size_t half_stride = stride % 2 == 0 ? stride / 2 : 1;

  std::vector<std::vector<double>> sup_errors(cfg.samples, std::vector<double>(nj));
  std::vector<double> floor_sq(cfg.samples);
  parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
    const auto path = sample_path(cfg, cfg.n_fine * cfg.path_substeps, i);
    Trajectory ref, half;
    try {
      ref = evolve(cfg.reference, v, cfg.horizon, cfg.n_fine, path, model, stride);
      half = evolve(cfg.reference, v, cfg.horizon, cfg.n_fine / 2, path, model, half_stride);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("reference " + std::string(scheme_name(cfg.reference)) + " on sample " +
                               std::to_string(i) + ": " + e.what());
    }
    double floor = 0.0;
    for (std::size_t r = 0; r < ref.steps.size(); ++r) {
      if (ref.steps[r] % 2 != 0) continue;
      const auto diff = ref.states[r] - state_at(half, ref.steps[r] / 2);
      floor = std::max(floor, sobolev_norm(diff, cfg.error_s, cfg.error_p));
    }
    floor_sq[i] = floor * floor;
    for (std::size_t j = 0; j < nj; ++j) {
      const std::size_t n = cfg.steps[j];
      const std::size_t ratio = cfg.n_fine / n;
      Trajectory tr;
      try {
        tr = evolve(cfg.scheme, v, cfg.horizon, n, path, model, 1);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string(scheme_name(cfg.scheme)) + " with N = " + std::to_string(n) +
                                 " on sample " + std::to_string(i) + ": " + e.what());
      }
      double sup = 0.0;
      for (std::size_t l = 0; l < tr.steps.size(); ++l) {
        const auto diff = tr.states[l] - state_at(ref, tr.steps[l] * ratio);
        sup = std::max(sup, sobolev_norm(diff, cfg.error_s, cfg.error_p));
      }
      sup_errors[i][j] = sup;
    }
  });

  ConvergenceReport report;
  report.reference_floor = rms_with_se(floor_sq).rms;
  std::vector<double> ts, strong, med, mx;
  std::vector<bool> use;
  for (std::size_t j = 0; j < nj; ++j) {
    std::vector<double> sq, sup;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      sup.push_back(sup_errors[i][j]);
      sq.push_back(sup_errors[i][j] * sup_errors[i][j]);
    }
    ConvergenceRow row;
    row.steps = cfg.steps[j];
    row.t = cfg.horizon / static_cast<double>(row.steps);
    const auto ms = rms_with_se(sq);
    row.strong_error = ms.rms;
    row.strong_se = ms.se;
    row.pathwise_median = median(sup);
    row.pathwise_max = *std::max_element(sup.begin(), sup.end());
    row.fitted = row.strong_error > 10.0 * row.strong_se && row.strong_error > 0.0;
    report.rows.push_back(row);
    ts.push_back(row.t);
    strong.push_back(row.strong_error);
    med.push_back(row.pathwise_median);
    mx.push_back(row.pathwise_max);
    use.push_back(row.fitted);
  }
  for (std::size_t j = 1; j < nj; ++j) {
    const bool finer = report.rows[j].t < report.rows[j - 1].t;
    if (finer && report.rows[j].strong_error > report.rows[j - 1].strong_error) report.monotone = false;
  }
  report.strong_fit = fit_slope(ts, strong, use);
  report.pathwise_median_fit = fit_slope(ts, med, use);
  report.pathwise_max_fit = fit_slope(ts, mx, use);
  return report;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report, const ExperimentConfig& cfg,
                           const std::string& echo) {
  os << echo;
  os << "scheme,d,K,n,sigma_phi,N,t,strong_err,strong_se,pathwise_median,pathwise_max,M,seed\n";
  for (const auto& r : report.rows) {
    os << scheme_name(cfg.scheme) << ',' << cfg.dim << ',' << cfg.modes << ',' << format_number(cfg.data.regularity)
       << ',' << format_number(cfg.sigma_phi) << ',' << r.steps << ',' << format_number(r.t) << ','
       << format_number(r.strong_error) << ',' << format_number(r.strong_se) << ','
       << format_number(r.pathwise_median) << ',' << format_number(r.pathwise_max) << ',' << cfg.samples << ','
       << cfg.seed << '\n';
  }
  auto fit_line = [&](const char* name, const SlopeFit& f) {
    os << "# fit " << name << " slope=" << format_number(f.slope) << " intercept=" << format_number(f.intercept)
       << " points=" << f.points << " max_residual=" << format_number(f.max_residual)
       << " reliable=" << (f.reliable ? "true" : "false") << '\n';
  };
  fit_line("strong_err", report.strong_fit);
  fit_line("pathwise_median", report.pathwise_median_fit);
  fit_line("pathwise_max", report.pathwise_max_fit);
  os << "# fitted_N =";
  for (const auto& r : report.rows)
    if (r.fitted) os << ' ' << r.steps;
  os << '\n';
  os << "# reference_floor = " << format_number(report.reference_floor) << '\n';
  os << "# monotone = " << (report.monotone ? "true" : "false") << '\n';
}

// ---------------------------------------------------------------- stability

std::vector<StabilityRow> stability_probe(const ExperimentConfig& cfg, std::span<const double> deltas,
                                          std::size_t steps) {
  const auto grid = cfg.grid();
  const auto model = cfg.model();
  const auto v = make_initial_data(grid, cfg.components(), cfg.data);
  InitialDataSpec dir = cfg.data;
  dir.mode = "random-phase";
  dir.seed = cfg.data.seed + 1;
  auto w = make_initial_data(grid, cfg.components(), dir);
  w *= 1.0 / sobolev_norm(w, cfg.error_s, cfg.error_p);

  std::vector<std::vector<double>> diffs(cfg.samples, std::vector<double>(deltas.size()));
  parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
    const auto path = sample_path(cfg, steps * cfg.path_substeps, i);
    const auto base = evolve(cfg.scheme, v, cfg.horizon, steps, path, model, 0).final_state();
    for (std::size_t d = 0; d < deltas.size(); ++d) {
      SpectralField vd = v;
      vd.add_scaled(deltas[d], w);
      const auto pert = evolve(cfg.scheme, vd, cfg.horizon, steps, path, model, 0).final_state();
      diffs[i][d] = sobolev_norm(base - pert, cfg.error_s, cfg.error_p);
    }
  });
  std::vector<StabilityRow> out;
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    std::vector<double> ratio, diff;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      diff.push_back(diffs[i][d]);
      ratio.push_back(diffs[i][d] / deltas[d]);
    }
    out.push_back({deltas[d], median(ratio), *std::max_element(ratio.begin(), ratio.end()), median(diff)});
  }
  return out;
}

// ---------------------------------------------------------------- tree probe

T4ProbeReport probe_t4(const T4ProbeConfig& cfg) {
  int kmax = 0;
  for (const auto& k : cfg.k) kmax = std::max({kmax, std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
  const TorusGrid grid(1, kmax);
  const auto phi = SmoothingOperator::power_law(grid, 0.0);
  const auto t4 = trees::named_tree(4);

  auto measure = [&](double t, const std::array<Frequency, 4>& k, std::uint64_t stream) {
    std::vector<double> sq(cfg.samples);
    parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
      const auto path = BrownianPath::sample_field(grid, t, cfg.quadrature, derive_seed(cfg.seed, i, stream));
      trees::TreeIntegralContext ctx;
      ctx.leaves.assign(k.begin(), k.end());
      ctx.t = t;
      ctx.path = &path;
      ctx.phi = &phi;
      ctx.resolution = cfg.quadrature;
      const Complex exact = trees::pi_exact(t4, ctx);
      const Complex approx = trees::pi_discrete(4, ctx, 2, cfg.order_halves);
      sq[i] = std::norm(exact - approx);
    });
    return rms_with_se(sq);
  };

  T4ProbeReport report;
  std::vector<double> x, y;
  for (int e : cfg.exponents) {
    const double t = std::ldexp(1.0, -e);
    const auto ms = measure(t, cfg.k, 100 + static_cast<std::uint64_t>(e));
    report.t_series.push_back({t, cfg.k[2][0], ms.rms, ms.se});
    x.push_back(t);
    y.push_back(ms.rms);
  }
  report.t_fit = fit_slope(x, y, std::vector<bool>(x.size(), true), 1.0);
  const int emax = *std::max_element(cfg.exponents.begin(), cfg.exponents.end());
  const double tmin = std::ldexp(1.0, -emax);
  x.clear();
  y.clear();
  for (int k3 : cfg.k3_ladder) {
    auto k = cfg.k;
    k[2] = Frequency{k3, 0, 0};
    const auto ms = measure(tmin, k, 1000 + static_cast<std::uint64_t>(k3));
    report.k3_series.push_back({tmin, k3, ms.rms, ms.se});
    x.push_back(k3);
    y.push_back(ms.rms);
  }
  report.k3_fit = fit_slope(x, y, std::vector<bool>(x.size(), true), 1.0);
  return report;
}

// ---------------------------------------------------------------- noise identities

namespace {

struct Moments {
  double mean_x = 0, mean_y = 0, cov = 0, se = 0;
};

// Sample covariance of (x, y) and the standard error of that estimate.
Moments covariance(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  Moments m;
  m.mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  m.mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
  std::vector<double> prod(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prod[i] = (x[i] - m.mean_x) * (y[i] - m.mean_y);
  m.cov = std::accumulate(prod.begin(), prod.end(), 0.0) / (n - 1.0);
  double var = 0.0;
  for (double p : prod) var += (p - m.cov) * (p - m.cov);
  m.se = std::sqrt(var / (n - 1.0) / n);
  return m;
}

}  // namespace

NoiseCheckReport noise_check(const NoiseCheckConfig& cfg) {
  NoiseCheckReport report;
  const double t = cfg.step;
  const TorusGrid single(1, 0);
  const auto phi = SmoothingOperator::power_law(single, 0.0);
  const std::size_t m = cfg.samples;
  std::vector<double> re(m), im(m), ws(m), wa(m), ito(m);
  double gap = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto path = BrownianPath::sample_field(single, t, cfg.substeps, derive_seed(cfg.seed, i, 200));
    const StepWindow w{0, cfg.substeps, path.dt()};
    const auto noise = field_step_noise(path, w, phi, true);
    re[i] = noise.increments[0].real();
    im[i] = noise.increments[0].imag();
    ws[i] = noise.integrals->weighted.at(0).real();
    wa[i] = noise.integrals->averaged.at(0).real();
    ito[i] = 0.5 * (re[i] * re[i] - t);
    const Complex formula = double_ito(noise.phi_chi, t, phi).at(0);
    gap += std::abs(formula - fine_double_ito(path, w, 0, 0));
  }
  report.complex_convention_gap = gap / static_cast<double>(m);
  auto add = [&](std::string name, double measured, double theory, double se) {
    report.rows.push_back({std::move(name), measured, theory, se, std::abs(measured - theory) <= 3.0 * se});
  };
  const auto vr = covariance(re, re);
  add("var_re_increment", vr.cov, t, vr.se);
  const auto vi = covariance(im, im);
  add("var_im_increment", vi.cov, t, vi.se);
  const auto ri = covariance(re, im);
  add("cov_re_im_increment", ri.cov, 0.0, ri.se);
  const auto vw = covariance(ws, ws);
  add("var_time_weighted", vw.cov, t * t * t / 3.0, vw.se);
  const auto cw = covariance(re, ws);
  add("cov_increment_time_weighted", cw.cov, t * t / 2.0, cw.se);
  const auto va = covariance(wa, wa);
  add("var_time_averaged", va.cov, t * t * t / 3.0, va.se);
  const auto ca = covariance(re, wa);
  add("cov_increment_time_averaged", ca.cov, t * t / 2.0, ca.se);
  const auto mi = covariance(ito, ito);
  add("mean_double_ito_real", mi.mean_x, 0.0, std::sqrt(mi.cov / static_cast<double>(m)));

  const std::size_t ladder_samples = std::min<std::size_t>(m, 2000);
  std::vector<double> dts, cross, proj;
  for (auto sub : cfg.ladder) {
    double sum_cross = 0.0, sum_proj = 0.0;
    for (std::size_t i = 0; i < ladder_samples; ++i) {
      const auto path = BrownianPath::sample_real(3, t, sub, derive_seed(cfg.seed, i, 300 + sub));
      const StepWindow w{0, sub, path.dt()};
      for (auto [a, b] : {std::pair<std::size_t, std::size_t>{0, 1}, {0, 2}, {1, 2}}) {
        const double r = symmetrized_cross_residual(path, w, a, b);
        sum_cross += r * r;
      }
      const double dw = window_increments(path, w)[0].real();
      const double d = fine_double_ito(path, w, 0, 0).real() - 0.5 * (dw * dw - t);
      sum_proj += d * d;
    }
    const double dt = t / static_cast<double>(sub);
    const double rc = std::sqrt(sum_cross / (3.0 * ladder_samples));
    const double rp = std::sqrt(sum_proj / ladder_samples);
    report.cross_residual.emplace_back(sub, rc);
    report.real_projection.emplace_back(sub, rp);
    dts.push_back(dt);
    cross.push_back(rc);
    proj.push_back(rp);
  }
  const std::vector<bool> all(dts.size(), true);
  report.cross_fit = fit_slope(dts, cross, all);
  report.real_projection_fit = fit_slope(dts, proj, all);
  return report;
}

}  // namespace lowreg
