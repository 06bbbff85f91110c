// Fourier pseudospectral representation of periodic fields on the d-torus [0, 2pi)^d.
//
// A TorusGrid fixes the retained frequency band |k_i| <= K and a default physical
// resolution M. Spectral coefficients are stored in a flat array whose ordering is
// given by TorusGrid::frequency(index). Physical values are stored row-major on the
// uniform M^d grid with x_j = 2 pi j / M.
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lowreg {

using Complex = std::complex<double>;
using Frequency = std::array<int, 3>;

inline double squared_norm(const Frequency& k) noexcept {
  return double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
}

inline double dot(const Frequency& a, const Frequency& b) noexcept {
  return double(a[0]) * b[0] + double(a[1]) * b[1] + double(a[2]) * b[2];
}

class TorusGrid {
 public:
  // d in {1,2,3}; K >= 0; points = 0 selects the alias-free minimum 2K+1.
  TorusGrid(int dim = 1, int modes = 0, int points = 0);

  int dim() const noexcept { return dim_; }
  int modes() const noexcept { return modes_; }
  int points() const noexcept { return points_; }
  std::size_t mode_count() const noexcept { return table_->size(); }
  std::size_t point_count() const noexcept;

  const Frequency& frequency(std::size_t index) const { return (*table_)[index]; }
  double wavenumber_squared(std::size_t index) const { return squared_norm(frequency(index)); }
  bool contains(const Frequency& k) const noexcept;
  std::size_t index_of(const Frequency& k) const;
  std::size_t mirror_index(std::size_t index) const;

  TorusGrid with_points(int points) const;
  bool same_band(const TorusGrid& other) const noexcept {
    return dim_ == other.dim_ && modes_ == other.modes_;
  }
  friend bool operator==(const TorusGrid& a, const TorusGrid& b) noexcept {
    return a.same_band(b) && a.points_ == b.points_;
  }

 private:
  int dim_;
  int modes_;
  int points_;
  std::shared_ptr<const std::vector<Frequency>> table_;
};

// Smallest 5-smooth integer >= (degree + 1) K + 1. Products of `degree` band-limited
// factors evaluated on such a grid and truncated back to the band carry no aliasing.
int padded_points(int modes, int degree);

class SpectralField {
 public:
  explicit SpectralField(TorusGrid grid = TorusGrid(), int components = 1);

  const TorusGrid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::size_t mode_count() const noexcept { return grid_.mode_count(); }

  std::span<Complex> component(int c);
  std::span<const Complex> component(int c) const;
  std::span<Complex> coefficients() noexcept { return coeffs_; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }

  Complex& at(std::size_t mode, int c = 0) { return coeffs_[c * mode_count() + mode]; }
  Complex at(std::size_t mode, int c = 0) const { return coeffs_[c * mode_count() + mode]; }
  Complex& at(const Frequency& k, int c = 0) { return at(grid_.index_of(k), c); }
  Complex at(const Frequency& k, int c = 0) const { return at(grid_.index_of(k), c); }

  bool all_finite() const noexcept;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(Complex scale) noexcept;
  SpectralField& add_scaled(Complex scale, const SpectralField& other);

 private:
  TorusGrid grid_;
  int components_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(SpectralField a, Complex scale);
SpectralField operator*(Complex scale, SpectralField a);

class PhysicalField {
 public:
  PhysicalField(TorusGrid grid, int components = 1);

  // The grid's points() is the physical resolution; its band is the band the
  // field was synthesised from and is the band to_spectral truncates to.
  const TorusGrid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::size_t point_count() const noexcept { return grid_.point_count(); }
  std::span<Complex> component(int c);
  std::span<const Complex> component(int c) const;
  std::span<Complex> values() noexcept { return values_; }
  std::span<const Complex> values() const noexcept { return values_; }

 private:
  TorusGrid grid_;
  int components_;
  std::vector<Complex> values_;
};

// Fourier multiplier m(k) acting diagonally on coefficients.
class Multiplier {
 public:
  using Symbol = std::function<Complex(const Frequency&)>;

  Multiplier(std::string tag, Symbol symbol, int max_dim = 3);

  Complex operator()(const Frequency& k) const { return symbol_(k); }
  const std::string& tag() const noexcept { return tag_; }
  int max_dim() const noexcept { return max_dim_; }

  // Evaluates the symbol on every retained mode. Throws std::invalid_argument when the
  // grid dimension is unsupported and std::domain_error on a non-finite value.
  std::vector<Complex> table(const TorusGrid& grid) const;

  friend Multiplier operator*(const Multiplier& a, const Multiplier& b);

 private:
  std::string tag_;
  Symbol symbol_;
  int max_dim_;
};

// sin(x)/x, evaluated stably near zero.
double sinc(double x) noexcept;

Multiplier identity_multiplier();
// e^{-it|k|^2}: the free Schroedinger group e^{it Laplacian}.
Multiplier free_propagator(double t);
// (e^{2i|k|^2 t} - 1)/(2i|k|^2 t), equal to 1 at k = 0.
Multiplier phi1_multiplier(double t);
// ((e^{itk} - 1)/(itk))^p in one dimension, equal to 1 at k = 0.
Multiplier filter_psi(int p, double t);
// (ik)^p times filter_psi(p, t), i.e. ((e^{itk} - 1)/t)^p.
Multiplier filtered_derivative(int p, double t);
// (i k_axis)^order.
Multiplier partial_derivative(int axis, int order = 1);
// -|k|^2.
Multiplier laplacian();

SpectralField apply_multiplier(const SpectralField& f, const Multiplier& m);
SpectralField apply_table(const SpectralField& f, std::span<const Complex> table);

// points = 0 uses grid().points(). Values are f(x_j) = sum_k f_k e^{i k x_j}.
PhysicalField to_physical(const SpectralField& f, int points = 0);
SpectralField to_spectral(const PhysicalField& g);

// Product of two band-limited fields truncated to the band. With dealias the product
// is formed on a grid of padded_points(K, 2) points, which reproduces the exact
// truncated convolution.
SpectralField pointwise_mul(const SpectralField& a, const SpectralField& b, bool dealias = true);

// Coefficients of the complex conjugate field: (conj f)_k = conj(f_{-k}).
SpectralField conjugate_field(const SpectralField& f);

// p = 2: Fourier-weighted (sum (1 + |k|^2)^s |f_k|^2)^{1/2} summed over components.
// p != 2: integer s, W^{s,p} norm from physical-space quadrature of all partial
// derivatives of order <= s. Throws std::invalid_argument for p < 1.
double sobolev_norm(const SpectralField& f, double s, double p = 2.0);

// Reusable synthesis/analysis between a band and a padded physical grid.
class PaddedTransform {
 public:
  PaddedTransform(const TorusGrid& band, int points);
  PaddedTransform(PaddedTransform&&) noexcept;
  PaddedTransform& operator=(PaddedTransform&&) noexcept;
  ~PaddedTransform();

  int points() const noexcept;
  std::size_t point_count() const noexcept;
  const TorusGrid& band() const noexcept;

  void synthesize(std::span<const Complex> coeffs, std::span<Complex> values);
  void analyze(std::span<const Complex> values, std::span<Complex> coeffs);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lowreg
