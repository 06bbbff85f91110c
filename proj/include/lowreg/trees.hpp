#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lowreg/noise.hpp"
#include "lowreg/spectral.hpp"

namespace lowreg::trees {

enum class EdgeType { propagator, integral, noise };

struct Decoration {
  EdgeType type = EdgeType::propagator;
  int conjugate = 0;
  auto operator<=>(const Decoration&) const = default;
};

std::string to_string(const Decoration& d);

// Planted decorated tree: `edge` joins the root to `node`; `children` hang above node.
struct Tree {
  Decoration edge;
  int monomial = 0;
  std::vector<Tree> children;
  int label = 0;  // 1-based leaf label once numbered, 0 for inner nodes

  bool is_leaf() const noexcept { return children.empty(); }
};

Tree leaf(Decoration edge);
Tree graft(Decoration edge, std::vector<Tree> children, int monomial = 0);

// Sorts children into the canonical order (inner subtrees, conjugate propagator leaves,
// propagator leaves, noise leaves; ties broken by canonical key) and numbers leaves
// depth first.
Tree canonical(Tree tree);
std::string canonical_key(const Tree& tree);
int leaf_count(const Tree& tree);

// Order in units of 1/2: every integral edge adds 2, or 1 when its node carries a noise
// leaf; every monomial decoration adds 2 per power.
int order_halves(const Tree& tree);
std::string format_halves(int halves);

long symmetry_factor(const Tree& tree);

// Frequency of the tree's node as integer coefficients over leaf labels 1..L
// (index 0 unused).
std::vector<int> frequency_form(const Tree& tree);
Frequency concrete_frequency(const std::vector<int>& form, const std::vector<Frequency>& leaves);

// Bracket notation, e.g. I_{(t2,0)}(lambda_k I_{(t1,0)}(lambda_k1) Xi_{(l,0)}(lambda_k2)).
std::string bracket(const Tree& tree);

struct Rule {
  std::map<Decoration, std::vector<std::vector<Decoration>>> admissible;
  static Rule cubic_nls(int n = 2, int m = 1);
};

// Elements of the tree set up to order r (in halves; 1, 2 or 3), propagator-planted,
// canonical, sorted by (order, canonical key).
std::vector<Tree> generate(const Rule& rule, int r_max_halves);

// The integral-planted trees T1..T7 of the low-regularity expansion.
Tree named_tree(int index);
// 0 for the bare propagator leaf, i when the element is I_{(t1,0)}(lambda_k T_i).
std::optional<int> named_index(const Tree& element);

struct UpsilonFactor {
  int label;
  bool conjugate;
};

struct UpsilonPattern {
  long coefficient = 1;
  std::vector<UpsilonFactor> factors;
  std::string to_string() const;
};

// Elementary differential of a propagator-planted tree for p(v) = v^2 conj(v), f(v) = v.
UpsilonPattern upsilon(const Tree& element);
Complex upsilon_value(const UpsilonPattern& pattern, const SpectralField& v,
                      const std::vector<Frequency>& leaves);

struct TreeIntegralContext {
  std::vector<Frequency> leaves;           // leaves[label - 1]
  double t = 0.0;
  const BrownianPath* path = nullptr;      // over [0, t]; required for stochastic trees
  const SmoothingOperator* phi = nullptr;  // required for stochastic trees
  std::size_t resolution = 0;              // quadrature steps; must equal path->steps()
};

// Exact iterated integral of a planted tree, evaluated by trapezoid (time) and left
// Riemann (Ito) quadrature on the context's fine grid.
Complex pi_exact(const Tree& tree, const TreeIntegralContext& ctx);

// Discretisation of T_index at (n, r). Supported: T1..T3 at (1, 1); T1..T7 at (2, 3/2);
// T4 at any (n, r) with r >= 2. Throws std::invalid_argument otherwise.
Complex pi_discrete(int index, const TreeIntegralContext& ctx, int n, int r_halves);

struct ResonanceSplit {
  double full;
  double dominant;
  double lower;
};

// P = 2|k1|^2 - 2 k1.(k2 + k3) + 2 k2.k3 split into 2|k1|^2 and the remainder.
ResonanceSplit resonance_split(const Frequency& k1, const Frequency& k2, const Frequency& k3);

}  // namespace lowreg::trees
