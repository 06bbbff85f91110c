#include "lowreg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"

namespace lowreg {

namespace {

constexpr Complex kI{0.0, 1.0};

Complex ipow(Complex z, int n) {
  Complex r{1.0, 0.0};
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

void require_same_shape(const SpectralField& a, const SpectralField& b, const char* what) {
  if (!a.grid().same_band(b.grid()) || a.components() != b.components())
    throw std::invalid_argument(std::string(what) + ": grid or component mismatch");
}

std::size_t int_pow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- TorusGrid

TorusGrid::TorusGrid(int dim, int modes, int points) : dim_(dim), modes_(modes), points_(points) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("TorusGrid: dimension must be 1, 2 or 3");
  if (modes < 0) throw std::invalid_argument("TorusGrid: K must be non-negative");
  if (points_ == 0) points_ = 2 * modes + 1;
  if (points_ < 2 * modes + 1)
    throw std::invalid_argument("TorusGrid: physical resolution below 2K+1 aliases the band");
  const int side = 2 * modes + 1;
  auto table = std::make_shared<std::vector<Frequency>>();
  table->reserve(int_pow(side, dim));
  const int n1 = dim > 1 ? side : 1;
  const int n2 = dim > 2 ? side : 1;
  for (int a = 0; a < side; ++a)
    for (int b = 0; b < n1; ++b)
      for (int c = 0; c < n2; ++c)
        table->push_back({a - modes, dim > 1 ? b - modes : 0, dim > 2 ? c - modes : 0});
  table_ = std::move(table);
}

std::size_t TorusGrid::point_count() const noexcept { return int_pow(points_, dim_); }

bool TorusGrid::contains(const Frequency& k) const noexcept {
  for (int i = 0; i < 3; ++i) {
    if (i >= dim_) {
      if (k[i] != 0) return false;
    } else if (std::abs(k[i]) > modes_) {
      return false;
    }
  }
  return true;
}

std::size_t TorusGrid::index_of(const Frequency& k) const {
  if (!contains(k)) throw std::out_of_range("TorusGrid::index_of: frequency outside band");
  const std::size_t side = 2 * modes_ + 1;
  std::size_t index = 0;
  for (int i = 0; i < dim_; ++i) index = index * side + static_cast<std::size_t>(k[i] + modes_);
  return index;
}

std::size_t TorusGrid::mirror_index(std::size_t index) const { return mode_count() - 1 - index; }

TorusGrid TorusGrid::with_points(int points) const {
  TorusGrid g = *this;
  if (points < 2 * modes_ + 1)
    throw std::invalid_argument("TorusGrid: physical resolution below 2K+1 aliases the band");
  g.points_ = points;
  return g;
}

int padded_points(int modes, int degree) {
  const int need = (std::max(degree, 1) + 1) * modes + 1;
  for (int n = need;; ++n) {
    int m = n;
    for (int p : {2, 3, 5})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
  }
}

// ---------------------------------------------------------------- SpectralField

SpectralField::SpectralField(TorusGrid grid, int components)
    : grid_(std::move(grid)), components_(components) {
  if (components < 1) throw std::invalid_argument("SpectralField: need at least one component");
  coeffs_.assign(grid_.mode_count() * static_cast<std::size_t>(components), Complex{});
}

std::span<Complex> SpectralField::component(int c) {
  return std::span<Complex>(coeffs_).subspan(c * mode_count(), mode_count());
}

std::span<const Complex> SpectralField::component(int c) const {
  return std::span<const Complex>(coeffs_).subspan(c * mode_count(), mode_count());
}

bool SpectralField::all_finite() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_shape(*this, other, "SpectralField::operator+=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_shape(*this, other, "SpectralField::operator-=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(Complex scale) noexcept {
  for (auto& z : coeffs_) z *= scale;
  return *this;
}

SpectralField& SpectralField::add_scaled(Complex scale, const SpectralField& other) {
  require_same_shape(*this, other, "SpectralField::add_scaled");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += scale * other.coeffs_[i];
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(SpectralField a, Complex scale) { return a *= scale; }
SpectralField operator*(Complex scale, SpectralField a) { return a *= scale; }

// ---------------------------------------------------------------- PhysicalField

PhysicalField::PhysicalField(TorusGrid grid, int components)
    : grid_(std::move(grid)), components_(components) {
  if (components < 1) throw std::invalid_argument("PhysicalField: need at least one component");
  values_.assign(grid_.point_count() * static_cast<std::size_t>(components), Complex{});
}

std::span<Complex> PhysicalField::component(int c) {
  return std::span<Complex>(values_).subspan(c * point_count(), point_count());
}

std::span<const Complex> PhysicalField::component(int c) const {
  return std::span<const Complex>(values_).subspan(c * point_count(), point_count());
}

// ---------------------------------------------------------------- Multipliers

Multiplier::Multiplier(std::string tag, Symbol symbol, int max_dim)
    : tag_(std::move(tag)), symbol_(std::move(symbol)), max_dim_(max_dim) {}

std::vector<Complex> Multiplier::table(const TorusGrid& grid) const {
  if (grid.dim() > max_dim_)
    throw std::invalid_argument("multiplier '" + tag_ + "' is only defined for d <= " +
                                std::to_string(max_dim_));
  std::vector<Complex> out(grid.mode_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = symbol_(grid.frequency(i));
    if (!std::isfinite(out[i].real()) || !std::isfinite(out[i].imag()))
      throw std::domain_error("multiplier '" + tag_ + "' is not finite on the grid");
  }
  return out;
}

Multiplier operator*(const Multiplier& a, const Multiplier& b) {
  return Multiplier(a.tag_ + "*" + b.tag_,
                    [sa = a.symbol_, sb = b.symbol_](const Frequency& k) { return sa(k) * sb(k); },
                    std::min(a.max_dim_, b.max_dim_));
}

double sinc(double x) noexcept {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

namespace {

// (e^{i theta} - 1)/(i theta) = e^{i theta/2} sinc(theta/2)
Complex phase_average(double theta) {
  return sinc(0.5 * theta) * Complex(std::cos(0.5 * theta), std::sin(0.5 * theta));
}

}  // namespace

Multiplier identity_multiplier() {
  return Multiplier("identity", [](const Frequency&) { return Complex{1.0, 0.0}; });
}

Multiplier free_propagator(double t) {
  return Multiplier("free_propagator", [t](const Frequency& k) {
    return std::polar(1.0, -t * squared_norm(k));
  });
}

Multiplier phi1_multiplier(double t) {
  return Multiplier("phi1", [t](const Frequency& k) { return phase_average(2.0 * t * squared_norm(k)); });
}

Multiplier filter_psi(int p, double t) {
  if (p < 0) throw std::invalid_argument("filter_psi: p must be non-negative");
  return Multiplier(
      "psi" + std::to_string(p),
      [p, t](const Frequency& k) { return ipow(phase_average(t * k[0]), p); }, 1);
}

Multiplier filtered_derivative(int p, double t) {
  if (p < 0) throw std::invalid_argument("filtered_derivative: p must be non-negative");
  return Multiplier(
      "filtered_derivative" + std::to_string(p),
      [p, t](const Frequency& k) {
        return ipow(kI * double(k[0]) * phase_average(t * k[0]), p);
      },
      1);
}

Multiplier partial_derivative(int axis, int order) {
  if (axis < 0 || axis > 2 || order < 0) throw std::invalid_argument("partial_derivative: bad axis");
  return Multiplier("d" + std::to_string(axis) + "^" + std::to_string(order),
                    [axis, order](const Frequency& k) { return ipow(kI * double(k[axis]), order); },
                    3);
}

Multiplier laplacian() {
  return Multiplier("laplacian", [](const Frequency& k) { return Complex{-squared_norm(k), 0.0}; });
}

SpectralField apply_table(const SpectralField& f, std::span<const Complex> table) {
  if (table.size() != f.mode_count()) throw std::invalid_argument("apply_table: size mismatch");
  SpectralField out = f;
  for (int c = 0; c < f.components(); ++c) {
    auto dst = out.component(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= table[i];
  }
  return out;
}

SpectralField apply_multiplier(const SpectralField& f, const Multiplier& m) {
  return apply_table(f, m.table(f.grid()));
}

// ---------------------------------------------------------------- PaddedTransform

struct PaddedTransform::Impl {
  TorusGrid band;
  int points;
  detail::FftPlan plan;
  std::vector<std::size_t> slot;  // padded flat index of each band mode
  std::vector<Complex> scratch;
  double scale;

  Impl(const TorusGrid& b, int m) : band(b.with_points(m)), points(m), plan(b.dim(), m) {
    const std::size_t total = band.point_count();
    scratch.resize(total);
    scale = 1.0 / static_cast<double>(total);
    slot.resize(band.mode_count());
    for (std::size_t i = 0; i < slot.size(); ++i) {
      const auto& k = band.frequency(i);
      std::size_t flat = 0;
      for (int a = 0; a < band.dim(); ++a) flat = flat * m + static_cast<std::size_t>((k[a] % m + m) % m);
      slot[i] = flat;
    }
  }
};

PaddedTransform::PaddedTransform(const TorusGrid& band, int points)
    : impl_(std::make_unique<Impl>(band, points)) {}
PaddedTransform::PaddedTransform(PaddedTransform&&) noexcept = default;
PaddedTransform& PaddedTransform::operator=(PaddedTransform&&) noexcept = default;
PaddedTransform::~PaddedTransform() = default;

int PaddedTransform::points() const noexcept { return impl_->points; }
std::size_t PaddedTransform::point_count() const noexcept { return impl_->scratch.size(); }
const TorusGrid& PaddedTransform::band() const noexcept { return impl_->band; }

void PaddedTransform::synthesize(std::span<const Complex> coeffs, std::span<Complex> values) {
  auto& s = impl_->scratch;
  std::fill(s.begin(), s.end(), Complex{});
  for (std::size_t i = 0; i < impl_->slot.size(); ++i) s[impl_->slot[i]] = coeffs[i];
  impl_->plan.backward(s.data(), values.data());
}

void PaddedTransform::analyze(std::span<const Complex> values, std::span<Complex> coeffs) {
  auto& s = impl_->scratch;
  impl_->plan.forward(values.data(), s.data());
  for (std::size_t i = 0; i < impl_->slot.size(); ++i) coeffs[i] = s[impl_->slot[i]] * impl_->scale;
}

// ---------------------------------------------------------------- transforms

PhysicalField to_physical(const SpectralField& f, int points) {
  const int m = points == 0 ? f.grid().points() : points;
  PaddedTransform tr(f.grid(), m);
  PhysicalField out(f.grid().with_points(m), f.components());
  for (int c = 0; c < f.components(); ++c) tr.synthesize(f.component(c), out.component(c));
  return out;
}

SpectralField to_spectral(const PhysicalField& g) {
  PaddedTransform tr(g.grid(), g.grid().points());
  SpectralField out(TorusGrid(g.grid().dim(), g.grid().modes()), g.components());
  for (int c = 0; c < g.components(); ++c) tr.analyze(g.component(c), out.component(c));
  return out;
}

SpectralField pointwise_mul(const SpectralField& a, const SpectralField& b, bool dealias) {
  if (!a.grid().same_band(b.grid()) || a.components() != b.components())
    throw std::invalid_argument("pointwise_mul: grid or component mismatch");
  const int m = dealias ? std::max(padded_points(a.grid().modes(), 2), a.grid().points())
                        : a.grid().points();
  PaddedTransform tr(a.grid(), m);
  std::vector<Complex> va(tr.point_count()), vb(tr.point_count());
  SpectralField out(a.grid(), a.components());
  for (int c = 0; c < a.components(); ++c) {
    tr.synthesize(a.component(c), va);
    tr.synthesize(b.component(c), vb);
    for (std::size_t j = 0; j < va.size(); ++j) va[j] *= vb[j];
    tr.analyze(va, out.component(c));
  }
  return out;
}

SpectralField conjugate_field(const SpectralField& f) {
  SpectralField out(f.grid(), f.components());
  const auto& g = f.grid();
  for (int c = 0; c < f.components(); ++c) {
    auto src = f.component(c);
    auto dst = out.component(c);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::conj(src[g.mirror_index(i)]);
  }
  return out;
}

double sobolev_norm(const SpectralField& f, double s, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("sobolev_norm: p must be at least 1");
  const auto& g = f.grid();
  if (p == 2.0) {
    double sum = 0.0;
    for (int c = 0; c < f.components(); ++c) {
      auto v = f.component(c);
      for (std::size_t i = 0; i < v.size(); ++i)
        sum += std::pow(1.0 + g.wavenumber_squared(i), s) * std::norm(v[i]);
    }
    return std::sqrt(sum);
  }
  const int order = static_cast<int>(std::lround(s));
  if (order < 0 || std::abs(s - order) > 1e-12)
    throw std::invalid_argument("sobolev_norm: p != 2 requires a non-negative integer s");
  const int d = g.dim();
  std::vector<std::array<int, 3>> alphas;
  for (int a0 = 0; a0 <= order; ++a0)
    for (int a1 = 0; a1 <= (d > 1 ? order - a0 : 0); ++a1)
      for (int a2 = 0; a2 <= (d > 2 ? order - a0 - a1 : 0); ++a2) alphas.push_back({a0, a1, a2});
  const double cell = std::pow(2.0 * std::numbers::pi / g.points(), d);
  PaddedTransform tr(g, g.points());
  std::vector<Complex> coeffs(g.mode_count()), values(tr.point_count());
  double total = 0.0;
  for (const auto& alpha : alphas) {
    for (int c = 0; c < f.components(); ++c) {
      auto src = f.component(c);
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        Complex m{1.0, 0.0};
        const auto& k = g.frequency(i);
        for (int a = 0; a < 3; ++a) m *= ipow(kI * double(k[a]), alpha[a]);
        coeffs[i] = m * src[i];
      }
      tr.synthesize(coeffs, values);
      for (const auto& v : values) total += std::pow(std::abs(v), p);
    }
  }
  return std::pow(cell * total, 1.0 / p);
}

}  // namespace lowreg
