#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "lowreg/noise.hpp"
#include "lowreg/trees.hpp"

using namespace lowreg;
using namespace lowreg::trees;
using Catch::Approx;

namespace {

const Complex I{0.0, 1.0};
const Decoration t1{EdgeType::propagator, 0};
const Decoration t1c{EdgeType::propagator, 1};
const Decoration t2{EdgeType::integral, 0};
const Decoration xi{EdgeType::noise, 0};

Frequency f(int k) { return Frequency{k, 0, 0}; }

}  // namespace

TEST_CASE("decorations print in the edge notation", "[trees]") {
  REQUIRE(to_string(t1) == "(t1,0)");
  REQUIRE(to_string(t1c) == "(t1,1)");
  REQUIRE(to_string(t2) == "(t2,0)");
  REQUIRE(to_string(xi) == "(l,0)");
}

TEST_CASE("tree sets have the expected sizes per order", "[trees]") {
  const auto rule = Rule::cubic_nls();
  REQUIRE(generate(rule, 1).size() == 2);
  REQUIRE(generate(rule, 2).size() == 4);
  REQUIRE(generate(rule, 3).size() == 8);
  for (const auto& t : generate(rule, 3)) REQUIRE(named_index(t).has_value());
}

TEST_CASE("named trees carry the listed orders and symmetry factors", "[trees]") {
  const std::map<int, std::pair<int, long>> expected{
      {1, {2, 2}}, {2, {1, 1}}, {3, {2, 1}}, {4, {3, 1}}, {5, {3, 2}}, {6, {3, 2}}, {7, {3, 1}}};
  for (const auto& [i, e] : expected) {
    const auto t = named_tree(i);
    REQUIRE(order_halves(t) == e.first);
    REQUIRE(symmetry_factor(t) == e.second);
    const auto element = canonical(graft(t1, {t}));
    REQUIRE(named_index(element) == i);
  }
  REQUIRE(named_index(leaf(t1)) == 0);
  REQUIRE(format_halves(0) == "0");
  REQUIRE(format_halves(1) == "1/2");
  REQUIRE(format_halves(2) == "1");
  REQUIRE(format_halves(3) == "3/2");
}

TEST_CASE("canonical form ignores child order", "[trees]") {
  const auto a = canonical(graft(t2, {leaf(t1), leaf(t1c), leaf(t1)}));
  const auto b = canonical(graft(t2, {leaf(t1c), leaf(t1), leaf(t1)}));
  REQUIRE(canonical_key(a) == canonical_key(b));
  REQUIRE(leaf_count(a) == 3);
  const auto c = canonical(graft(t2, {leaf(t1), leaf(t1), leaf(t1)}));
  REQUIRE(canonical_key(a) != canonical_key(c));
  REQUIRE(symmetry_factor(c) == 6);
}

TEST_CASE("elementary differentials match the expansion", "[trees]") {
  const auto rule = Rule::cubic_nls();
  std::map<int, std::string> got;
  for (const auto& t : generate(rule, 3)) got[*named_index(t)] = upsilon(t).to_string();
  REQUIRE(got[0] == "v_{k1}");
  REQUIRE(got[1] == "2 vbar_{k1} v_{k2} v_{k3}");
  REQUIRE(got[2] == "v_{k1}");
  REQUIRE(got[3] == "v_{k1}");
  REQUIRE(got[4] == "2 v_{k1} vbar_{k3} v_{k4}");
  REQUIRE(got[5] == "2 vbar_{k1} v_{k3} v_{k4}");
  REQUIRE(got[6] == "2 vbar_{k1} v_{k2} v_{k3}");
  REQUIRE(got[7] == "v_{k1}");

  const TorusGrid grid(1, 3);
  SpectralField v(grid);
  v.at(f(1)) = Complex(1.0, 2.0);
  v.at(f(2)) = Complex(0.5, 0.0);
  v.at(f(-3)) = Complex(0.0, -1.0);
  const auto p = upsilon(canonical(graft(t1, {named_tree(1)})));
  const Complex value = upsilon_value(p, v, {f(1), f(2), f(-3)});
  REQUIRE(std::abs(value - 2.0 * std::conj(v.at(f(1))) * v.at(f(2)) * v.at(f(-3))) < 1e-15);
}

TEST_CASE("root frequency of the cubic tree is -k1 + k2 + k3", "[trees]") {
  const auto form = frequency_form(named_tree(1));
  REQUIRE(form.size() >= 4);
  REQUIRE(form[1] == -1);
  REQUIRE(form[2] == 1);
  REQUIRE(form[3] == 1);
  REQUIRE(concrete_frequency(form, {f(2), f(5), f(-1)}) == f(2));
}

TEST_CASE("bracket notation of the bare propagator", "[trees]") {
  REQUIRE(bracket(canonical(leaf(t1))) == "I_{(t1,0)}(lambda_k)");
  const auto b = bracket(canonical(graft(t1, {named_tree(2)})));
  REQUIRE(b == "I_{(t1,0)}(lambda_k I_{(t2,0)}(lambda_k I_{(t1,0)}(lambda_k1) Xi_{(l,0)}(lambda_k2)))");
}

TEST_CASE("resonance split adds up to the full phase", "[trees]") {
  const Frequency k1 = f(3), k2 = f(-2), k3 = f(4);
  const auto r = resonance_split(k1, k2, k3);
  const Frequency k = f(-3 - 2 + 4);
  const double direct = squared_norm(k) + squared_norm(k1) - squared_norm(k2) - squared_norm(k3);
  REQUIRE(r.full == Approx(direct));
  REQUIRE(r.dominant == 18.0);
  REQUIRE(r.full == Approx(r.dominant + r.lower));
}

TEST_CASE("exact cubic integral matches its closed form", "[trees]") {
  const auto tree = named_tree(1);
  TreeIntegralContext ctx;
  ctx.t = 0.3;
  ctx.resolution = 4096;

  ctx.leaves = {f(0), f(0), f(0)};
  REQUIRE(std::abs(pi_exact(tree, ctx) + I * 0.3) < 1e-12);

  ctx.leaves = {f(1), f(2), f(-3)};
  const auto r = resonance_split(f(1), f(2), f(-3));
  const double p = r.full;
  const Complex closed = -(std::exp(I * p * 0.3) - 1.0) / p;
  REQUIRE(std::abs(pi_exact(tree, ctx) - closed) < 1e-5);
}

TEST_CASE("low order cubic discretisation is exact when the phase is dominant", "[trees]") {
  TreeIntegralContext ctx;
  ctx.t = 0.2;
  ctx.resolution = 8192;
  ctx.leaves = {f(3), f(0), f(0)};
  const Complex exact = pi_exact(named_tree(1), ctx);
  REQUIRE(std::abs(pi_discrete(1, ctx, 1, 2) - exact) < 1e-6);
  REQUIRE(std::abs(pi_discrete(1, ctx, 2, 3) + I * 0.2) < 1e-15);
}

TEST_CASE("oscillation-free noise trees agree with their discretisations", "[trees]") {
  const TorusGrid grid(1, 2);
  const auto phi = SmoothingOperator::power_law(grid, 1.0);
  const double t = 0.05;
  const auto path = BrownianPath::sample_field(grid, t, 512, 99);
  TreeIntegralContext ctx;
  ctx.t = t;
  ctx.path = &path;
  ctx.phi = &phi;
  ctx.resolution = 512;
  ctx.leaves = {f(0), f(0), f(0), f(0)};
  for (int i : {2, 3}) REQUIRE(std::abs(pi_discrete(i, ctx, 1, 2) - pi_exact(named_tree(i), ctx)) < 1e-12);
  for (int i : {2, 3, 6, 7})
    REQUIRE(std::abs(pi_discrete(i, ctx, 2, 3) - pi_exact(named_tree(i), ctx)) < 1e-12);
  // With k2 = k3 = k4 = 0 the phase of T4 vanishes.
  ctx.leaves = {f(1), f(0), f(0), f(0)};
  REQUIRE(std::abs(pi_discrete(4, ctx, 2, 4) - pi_exact(named_tree(4), ctx)) < 1e-8);
}

TEST_CASE("discretisation rejects unsupported combinations", "[trees]") {
  const TorusGrid grid(1, 1);
  const auto phi = SmoothingOperator::power_law(grid, 0.0);
  const auto path = BrownianPath::sample_field(grid, 0.1, 16, 1);
  TreeIntegralContext ctx;
  ctx.t = 0.1;
  ctx.path = &path;
  ctx.phi = &phi;
  ctx.leaves = {f(0), f(0), f(0), f(0)};
  REQUIRE_THROWS_AS(pi_discrete(5, ctx, 1, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(pi_discrete(8, ctx, 2, 3), std::invalid_argument);
  ctx.t = 0.2;
  REQUIRE_THROWS_AS(pi_exact(named_tree(2), ctx), std::invalid_argument);
  TreeIntegralContext bare;
  bare.t = 0.1;
  bare.resolution = 8;
  bare.leaves = {f(0), f(0)};
  REQUIRE_THROWS_AS(pi_exact(named_tree(2), bare), std::invalid_argument);
}
