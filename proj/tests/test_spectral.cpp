#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "lowreg/spectral.hpp"

using namespace lowreg;
using Catch::Approx;
using Catch::Matchers::WithinAbs;

namespace {

const Complex I{0.0, 1.0};

SpectralField random_field(const TorusGrid& grid, std::uint64_t seed, int components = 1) {
  SpectralField f(grid, components);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& z : f.coefficients()) z = {n(rng), n(rng)};
  return f;
}

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("grid enumerates the frequency band", "[spectral]") {
  const TorusGrid g1(1, 2);
  REQUIRE(g1.mode_count() == 5);
  REQUIRE(g1.points() == 5);

  const TorusGrid g2(2, 1);
  REQUIRE(g2.mode_count() == 9);
  REQUIRE(g2.point_count() == 9);

  const TorusGrid g3(3, 2, 8);
  REQUIRE(g3.mode_count() == 125);
  REQUIRE(g3.point_count() == 512);

  for (std::size_t i = 0; i < g3.mode_count(); ++i) {
    const auto& k = g3.frequency(i);
    REQUIRE(g3.index_of(k) == i);
    const auto& m = g3.frequency(g3.mirror_index(i));
    REQUIRE(m == Frequency{-k[0], -k[1], -k[2]});
  }
  REQUIRE_THROWS_AS(g1.index_of(Frequency{3, 0, 0}), std::out_of_range);
  REQUIRE_FALSE(g1.contains(Frequency{0, 1, 0}));
  REQUIRE_THROWS(TorusGrid(4, 1));
}

TEST_CASE("padded resolution is the smallest 5-smooth size above the alias bound", "[spectral]") {
  REQUIRE(padded_points(32, 2) == 100);  // bound 97
  REQUIRE(padded_points(32, 3) == 135);  // bound 129
  REQUIRE(padded_points(16, 1) == 36);   // bound 33
  REQUIRE(padded_points(0, 3) == 1);
}

TEST_CASE("physical and spectral transforms are inverse", "[spectral]") {
  for (int d = 1; d <= 3; ++d) {
    const TorusGrid grid(d, 3, 10);
    const auto f = random_field(grid, 11 + d);
    const auto back = to_spectral(to_physical(f));
    REQUIRE(max_abs_diff(f.coefficients(), back.coefficients()) < 1e-12);
  }
}

TEST_CASE("a single mode synthesises to the sampled exponential", "[spectral]") {
  const TorusGrid grid(1, 4, 16);
  SpectralField f(grid);
  f.at(Frequency{3, 0, 0}) = 2.0;
  const auto g = to_physical(f);
  for (int j = 0; j < 16; ++j) {
    const double x = 2.0 * std::numbers::pi * j / 16.0;
    REQUIRE(std::abs(g.values()[j] - 2.0 * std::exp(I * 3.0 * x)) < 1e-13);
  }
}

TEST_CASE("dealiased products reproduce the truncated convolution", "[spectral]") {
  const TorusGrid grid(1, 4);
  SpectralField a(grid), b(grid);
  a.at(Frequency{1, 0, 0}) = 1.0;
  b.at(Frequency{2, 0, 0}) = 1.0;
  auto p = pointwise_mul(a, b);
  REQUIRE(std::abs(p.at(Frequency{3, 0, 0}) - 1.0) < 1e-13);
  REQUIRE(sobolev_norm(p, 0.0) == Approx(1.0));

  SpectralField edge(grid);
  edge.at(Frequency{4, 0, 0}) = 1.0;
  const auto clean = pointwise_mul(edge, edge, true);
  REQUIRE(sobolev_norm(clean, 0.0) < 1e-13);
  // On the minimal 2K+1 grid, mode 2K = 8 aliases onto 8 - 9 = -1.
  const auto aliased = pointwise_mul(edge, edge, false);
  REQUIRE(std::abs(aliased.at(Frequency{-1, 0, 0}) - 1.0) < 1e-13);

  const auto x = random_field(grid, 3), y = random_field(grid, 4);
  const auto xy = pointwise_mul(x, y);
  for (std::size_t i = 0; i < grid.mode_count(); ++i) {
    Complex direct{};
    const int k = grid.frequency(i)[0];
    for (int k1 = -4; k1 <= 4; ++k1)
      if (std::abs(k - k1) <= 4) direct += x.at(Frequency{k1, 0, 0}) * y.at(Frequency{k - k1, 0, 0});
    REQUIRE(std::abs(xy.at(i) - direct) < 1e-12);
  }
}

TEST_CASE("conjugate field reflects frequencies", "[spectral]") {
  const TorusGrid grid(2, 2);
  const auto f = random_field(grid, 5);
  const auto c = conjugate_field(f);
  const auto gf = to_physical(f), gc = to_physical(c);
  for (std::size_t j = 0; j < gf.point_count(); ++j) REQUIRE(std::abs(gc.values()[j] - std::conj(gf.values()[j])) < 1e-12);
}

TEST_CASE("Sobolev norms match closed forms", "[spectral]") {
  const TorusGrid grid(1, 5, 32);
  SpectralField f(grid);
  f.at(Frequency{3, 0, 0}) = 1.0;
  REQUIRE(sobolev_norm(f, 0.0) == Approx(1.0));
  REQUIRE(sobolev_norm(f, 1.0) == Approx(std::sqrt(10.0)));
  REQUIRE(sobolev_norm(f, 2.0) == Approx(10.0));

  SpectralField e(grid);
  e.at(Frequency{1, 0, 0}) = 1.0;
  // |e^{ix}| = |d/dx e^{ix}| = 1 on [0, 2 pi).
  REQUIRE(sobolev_norm(e, 1.0, 4.0) == Approx(std::pow(4.0 * std::numbers::pi, 0.25)));
  REQUIRE(sobolev_norm(e, 0.0, 1.0) == Approx(2.0 * std::numbers::pi));
  REQUIRE_THROWS_AS(sobolev_norm(e, 1.0, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(sobolev_norm(e, 0.5, 3.0), std::invalid_argument);
}

TEST_CASE("free propagator is an isometry in every Sobolev norm", "[spectral]") {
  const TorusGrid grid(2, 4);
  const auto f = random_field(grid, 9);
  const auto g = apply_multiplier(f, free_propagator(0.37));
  for (double s : {0.0, 1.0, 2.5}) REQUIRE(sobolev_norm(g, s) == Approx(sobolev_norm(f, s)).epsilon(1e-13));
  const auto back = apply_multiplier(g, free_propagator(-0.37));
  REQUIRE(max_abs_diff(back.coefficients(), f.coefficients()) < 1e-13);
}

TEST_CASE("phase average multiplier equals its defining quotient", "[spectral]") {
  const double t = 0.013;
  const auto phi1 = phi1_multiplier(t);
  REQUIRE(phi1(Frequency{0, 0, 0}) == Complex(1.0, 0.0));
  for (int k : {1, 3, 7, 40}) {
    const double z = 2.0 * k * k * t;
    const Complex expected = (std::exp(I * z) - 1.0) / (I * z);
    REQUIRE(std::abs(phi1(Frequency{k, 0, 0}) - expected) < 1e-14);
    REQUIRE(std::abs(phi1(Frequency{k, 0, 0})) <= 1.0 + 1e-15);
  }
  REQUIRE(sinc(0.0) == 1.0);
  REQUIRE(sinc(1e-6) == Approx(1.0 - 1e-12 / 6.0).epsilon(1e-15));
  REQUIRE(sinc(std::numbers::pi) == Approx(0.0).margin(1e-16));
}

TEST_CASE("filters are bounded and approach derivatives", "[spectral]") {
  const double t = 1e-4;
  for (int p : {1, 2}) {
    const auto psi = filter_psi(p, t);
    const auto d = filtered_derivative(p, t);
    REQUIRE(psi(Frequency{0, 0, 0}) == Complex(1.0, 0.0));
    for (int k : {1, 5, 16, 1000}) {
      const Frequency f{k, 0, 0};
      REQUIRE(std::abs(psi(f)) <= 1.0 + 1e-14);
      const Complex base = (std::exp(I * t * double(k)) - 1.0) / t;
      REQUIRE(std::abs(d(f) - std::pow(base, p)) < 1e-9 * std::pow(std::abs(base), p) + 1e-12);
    }
    // (ik)^p up to O(t k^{p+1}).
    const Complex ik = I * 5.0;
    REQUIRE(std::abs(d(Frequency{5, 0, 0}) - std::pow(ik, p)) < 2.0 * t * std::pow(5.0, p + 1));
  }
  REQUIRE_THROWS_AS(filter_psi(1, 0.1).table(TorusGrid(2, 1)), std::invalid_argument);
  const Multiplier bad("bad", [](const Frequency&) { return Complex(std::numeric_limits<double>::infinity()); });
  REQUIRE_THROWS_AS(bad.table(TorusGrid(1, 1)), std::domain_error);
}

TEST_CASE("derivative multipliers act on trigonometric polynomials", "[spectral]") {
  const TorusGrid grid(2, 3);
  SpectralField f(grid);
  f.at(Frequency{2, -1, 0}) = 1.0;
  const auto dx = apply_multiplier(f, partial_derivative(0));
  const auto dyy = apply_multiplier(f, partial_derivative(1, 2));
  const auto lap = apply_multiplier(f, laplacian());
  REQUIRE(std::abs(dx.at(Frequency{2, -1, 0}) - 2.0 * I) < 1e-15);
  REQUIRE(std::abs(dyy.at(Frequency{2, -1, 0}) + 1.0) < 1e-15);
  REQUIRE(std::abs(lap.at(Frequency{2, -1, 0}) + 5.0) < 1e-15);
  const auto composed = apply_multiplier(f, partial_derivative(0, 2) * partial_derivative(1, 2));
  REQUIRE_THAT(composed.at(Frequency{2, -1, 0}).real(), WithinAbs(4.0, 1e-14));
}

TEST_CASE("padded transform matches the generic transform", "[spectral]") {
  const TorusGrid grid(1, 6);
  const int m = padded_points(6, 3);
  PaddedTransform tr(grid, m);
  const auto f = random_field(grid, 21);
  std::vector<Complex> values(tr.point_count()), coeffs(grid.mode_count());
  tr.synthesize(f.coefficients(), values);
  const auto reference = to_physical(f, m);
  REQUIRE(max_abs_diff(values, reference.values()) < 1e-12);
  tr.analyze(values, coeffs);
  REQUIRE(max_abs_diff(coeffs, f.coefficients()) < 1e-12);
}

TEST_CASE("field arithmetic checks shapes", "[spectral]") {
  const TorusGrid grid(1, 2);
  SpectralField a(grid), b(grid, 2), c(TorusGrid(1, 3));
  REQUIRE_THROWS(a += b);
  REQUIRE_THROWS(a -= c);
  a.at(Frequency{1, 0, 0}) = 2.0;
  const auto d = 0.5 * a + a;
  REQUIRE(d.at(Frequency{1, 0, 0}) == Complex(3.0, 0.0));
  REQUIRE(d.all_finite());
  auto e = d;
  e.at(0) = Complex(std::nan(""), 0.0);
  REQUIRE_FALSE(e.all_finite());
}
