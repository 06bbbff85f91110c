#include "lowreg/trees.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lowreg::trees {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr Decoration kP0{EdgeType::propagator, 0};
constexpr Decoration kP1{EdgeType::propagator, 1};
constexpr Decoration kI0{EdgeType::integral, 0};
constexpr Decoration kI1{EdgeType::integral, 1};
constexpr Decoration kL0{EdgeType::noise, 0};
constexpr Decoration kL1{EdgeType::noise, 1};

int child_category(const Tree& c) {
  if (!c.is_leaf()) return 0;
  if (c.edge.type == EdgeType::propagator) return c.edge.conjugate ? 1 : 2;
  return 3;
}

void sort_children(Tree& t) {
  for (auto& c : t.children) sort_children(c);
  std::stable_sort(t.children.begin(), t.children.end(), [](const Tree& a, const Tree& b) {
    const int ca = child_category(a), cb = child_category(b);
    if (ca != cb) return ca < cb;
    return canonical_key(a) < canonical_key(b);
  });
}

void number_leaves(Tree& t, int& next) {
  if (t.is_leaf()) {
    t.label = next++;
    return;
  }
  t.label = 0;
  for (auto& c : t.children) number_leaves(c, next);
}

int max_label(const Tree& t) {
  int m = t.label;
  for (const auto& c : t.children) m = std::max(m, max_label(c));
  return m;
}

void fill_form(const Tree& t, std::vector<int>& form) {
  if (t.is_leaf()) {
    form[t.label] += 1;
    return;
  }
  const int outer = t.edge.conjugate ? -1 : 1;
  for (const auto& c : t.children) {
    std::vector<int> sub(form.size(), 0);
    fill_form(c, sub);
    const int sign = outer * (c.edge.conjugate ? -1 : 1);
    for (std::size_t i = 0; i < form.size(); ++i) form[i] += sign * sub[i];
  }
}

std::string format_form(const std::vector<int>& form, const std::vector<int>& root) {
  if (form == root) return "k";
  std::string out;
  for (std::size_t i = 1; i < form.size(); ++i) {
    if (form[i] == 0) continue;
    if (form[i] < 0) out += "-";
    else if (!out.empty()) out += "+";
    if (std::abs(form[i]) != 1) out += std::to_string(std::abs(form[i]));
    out += "k" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

std::vector<int> form_sized(const Tree& t, std::size_t size) {
  std::vector<int> form(size, 0);
  fill_form(t, form);
  return form;
}

void write_bracket(const Tree& t, const std::vector<int>& root, std::size_t size, std::ostream& os) {
  const char* symbol = t.edge.type == EdgeType::noise ? "Xi" : "I";
  os << symbol << "_{" << to_string(t.edge) << "}(lambda";
  if (t.monomial > 0) os << "^" << t.monomial;
  os << "_" << format_form(form_sized(t, size), root);
  for (const auto& c : t.children) {
    os << ' ';
    write_bracket(c, root, size, os);
  }
  os << ')';
}

}  // namespace

std::string to_string(const Decoration& d) {
  const char* name = d.type == EdgeType::propagator ? "t1" : d.type == EdgeType::integral ? "t2" : "l";
  return std::string("(") + name + "," + std::to_string(d.conjugate) + ")";
}

Tree leaf(Decoration edge) { return Tree{edge, 0, {}, 0}; }

Tree graft(Decoration edge, std::vector<Tree> children, int monomial) {
  return Tree{edge, monomial, std::move(children), 0};
}

Tree canonical(Tree tree) {
  sort_children(tree);
  int next = 1;
  number_leaves(tree, next);
  return tree;
}

std::string canonical_key(const Tree& tree) {
  std::vector<std::string> keys;
  for (const auto& c : tree.children) keys.push_back(canonical_key(c));
  std::sort(keys.begin(), keys.end());
  std::string out = to_string(tree.edge);
  if (tree.monomial > 0) out += "^" + std::to_string(tree.monomial);
  if (!keys.empty()) {
    out += "[";
    for (const auto& k : keys) out += k + ";";
    out += "]";
  }
  return out;
}

int leaf_count(const Tree& tree) {
  if (tree.is_leaf()) return 1;
  int n = 0;
  for (const auto& c : tree.children) n += leaf_count(c);
  return n;
}

int order_halves(const Tree& tree) {
  int halves = 2 * tree.monomial;
  if (tree.edge.type == EdgeType::integral) {
    const bool noisy = std::any_of(tree.children.begin(), tree.children.end(),
                                   [](const Tree& c) { return c.edge.type == EdgeType::noise; });
    halves += noisy ? 1 : 2;
  }
  for (const auto& c : tree.children) halves += order_halves(c);
  return halves;
}

std::string format_halves(int halves) {
  if (halves % 2 == 0) return std::to_string(halves / 2);
  return std::to_string(halves) + "/2";
}

long symmetry_factor(const Tree& tree) {
  std::map<std::string, std::pair<long, int>> groups;
  for (const auto& c : tree.children) {
    auto& g = groups[canonical_key(c)];
    g.first = symmetry_factor(c);
    g.second += 1;
  }
  long s = 1;
  for (const auto& [key, g] : groups) {
    for (int i = 0; i < g.second; ++i) s *= g.first;
    for (int i = 2; i <= g.second; ++i) s *= i;
  }
  return s;
}

std::vector<int> frequency_form(const Tree& tree) {
  return form_sized(tree, static_cast<std::size_t>(max_label(tree)) + 1);
}

Frequency concrete_frequency(const std::vector<int>& form, const std::vector<Frequency>& leaves) {
  Frequency k{0, 0, 0};
  for (std::size_t i = 1; i < form.size(); ++i) {
    if (form[i] == 0) continue;
    if (i > leaves.size()) throw std::invalid_argument("frequency assignment misses a leaf");
    for (int a = 0; a < 3; ++a) k[a] += form[i] * leaves[i - 1][a];
  }
  return k;
}

std::string bracket(const Tree& tree) {
  const std::size_t size = static_cast<std::size_t>(max_label(tree)) + 1;
  const auto root = form_sized(tree, size);
  std::ostringstream os;
  write_bracket(tree, root, size, os);
  return os.str();
}

// ---------------------------------------------------------------- generation

Rule Rule::cubic_nls(int n, int m) {
  Rule r;
  for (int p = 0; p < 2; ++p) {
    const Decoration t1{EdgeType::propagator, p};
    const Decoration t2{EdgeType::integral, p};
    const Decoration t1c{EdgeType::propagator, 1 - p};
    const Decoration l{EdgeType::noise, p};
    r.admissible[t1] = {{}, {t2}};
    std::vector<Decoration> cubic(static_cast<std::size_t>(n), t1);
    cubic.insert(cubic.end(), static_cast<std::size_t>(m), t1c);
    r.admissible[t2] = {cubic, {t1, l}};
    r.admissible[l] = {{}};
  }
  return r;
}

namespace {

std::vector<Tree> planted(const Rule& rule, Decoration edge, int budget);

// All multisets of size `count` drawn from `pool` (indices non-decreasing), each with
// total order <= budget; `emit` receives (chosen trees, total order).
void multisets(const std::vector<Tree>& pool, const std::vector<int>& orders, std::size_t count,
               std::size_t start, int budget, std::vector<Tree>& chosen, int spent,
               const std::function<void(const std::vector<Tree>&, int)>& emit) {
  if (count == 0) {
    emit(chosen, spent);
    return;
  }
  for (std::size_t i = start; i < pool.size(); ++i) {
    if (spent + orders[i] > budget) continue;
    chosen.push_back(pool[i]);
    multisets(pool, orders, count - 1, i, budget, chosen, spent + orders[i], emit);
    chosen.pop_back();
  }
}

void expand_groups(const Rule& rule, const std::vector<std::pair<Decoration, std::size_t>>& groups,
                   std::size_t g, int budget, std::vector<Tree>& children,
                   const std::function<void(const std::vector<Tree>&)>& emit) {
  if (g == groups.size()) {
    emit(children);
    return;
  }
  const auto [deco, count] = groups[g];
  const auto pool = planted(rule, deco, budget);
  std::vector<int> orders;
  for (const auto& t : pool) orders.push_back(order_halves(t));
  std::vector<Tree> chosen;
  multisets(pool, orders, count, 0, budget, chosen, 0, [&](const std::vector<Tree>& pick, int spent) {
    const std::size_t mark = children.size();
    children.insert(children.end(), pick.begin(), pick.end());
    expand_groups(rule, groups, g + 1, budget - spent, children, emit);
    children.resize(mark);
  });
}

std::vector<Tree> planted(const Rule& rule, Decoration edge, int budget) {
  std::vector<Tree> out;
  if (budget < 0) return out;
  const auto it = rule.admissible.find(edge);
  if (it == rule.admissible.end()) throw std::invalid_argument("rule has no entry for " + to_string(edge));
  for (const auto& tuple : it->second) {
    int self = 0;
    if (edge.type == EdgeType::integral) {
      const bool noisy = std::any_of(tuple.begin(), tuple.end(),
                                     [](const Decoration& d) { return d.type == EdgeType::noise; });
      self = noisy ? 1 : 2;
    }
    if (self > budget) continue;
    std::map<Decoration, std::size_t> counts;
    for (const auto& d : tuple) counts[d] += 1;
    std::vector<std::pair<Decoration, std::size_t>> groups(counts.begin(), counts.end());
    std::vector<Tree> children;
    expand_groups(rule, groups, 0, budget - self, children,
                  [&](const std::vector<Tree>& kids) { out.push_back(canonical(graft(edge, kids))); });
  }
  return out;
}

}  // namespace

std::vector<Tree> generate(const Rule& rule, int r_max_halves) {
  if (r_max_halves < 1 || r_max_halves > 3)
    throw std::invalid_argument("generate: supported orders are 1/2, 1 and 3/2");
  auto all = planted(rule, kP0, r_max_halves);
  std::vector<Tree> out;
  std::set<std::string> seen;
  for (auto& t : all)
    if (seen.insert(canonical_key(t)).second) out.push_back(std::move(t));
  std::sort(out.begin(), out.end(), [](const Tree& a, const Tree& b) {
    const int oa = order_halves(a), ob = order_halves(b);
    if (oa != ob) return oa < ob;
    return canonical_key(a) < canonical_key(b);
  });
  return out;
}

Tree named_tree(int index) {
  const Tree t1 = graft(kI0, {leaf(kP1), leaf(kP0), leaf(kP0)});
  const Tree t2 = graft(kI0, {leaf(kP0), leaf(kL0)});
  const Tree t2bar = graft(kI1, {leaf(kP1), leaf(kL1)});
  const Tree t3 = graft(kI0, {graft(kP0, {t2}), leaf(kL0)});
  switch (index) {
    case 1: return canonical(t1);
    case 2: return canonical(t2);
    case 3: return canonical(t3);
    case 4: return canonical(graft(kI0, {graft(kP0, {t2}), leaf(kP1), leaf(kP0)}));
    case 5: return canonical(graft(kI0, {graft(kP1, {t2bar}), leaf(kP0), leaf(kP0)}));
    case 6: return canonical(graft(kI0, {graft(kP0, {t1}), leaf(kL0)}));
    case 7: return canonical(graft(kI0, {graft(kP0, {t3}), leaf(kL0)}));
    default: throw std::invalid_argument("named_tree: index must be 1..7");
  }
}

std::optional<int> named_index(const Tree& element) {
  if (element.edge != kP0) return std::nullopt;
  if (element.is_leaf()) return 0;
  if (element.children.size() != 1) return std::nullopt;
  const auto key = canonical_key(element.children.front());
  for (int i = 1; i <= 7; ++i)
    if (canonical_key(named_tree(i)) == key) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------- elementary differentials

std::string UpsilonPattern::to_string() const {
  std::ostringstream os;
  if (coefficient != 1 || factors.empty()) os << coefficient;
  for (const auto& f : factors) {
    if (os.tellp() > 0) os << ' ';
    os << (f.conjugate ? "vbar_{k" : "v_{k") << f.label << '}';
  }
  return os.str();
}

namespace {

long falling(int a, int n) {
  if (n > a) return 0;
  long r = 1;
  for (int i = 0; i < n; ++i) r *= a - i;
  return r;
}

}  // namespace

UpsilonPattern upsilon(const Tree& element) {
  if (element.edge.type != EdgeType::propagator)
    throw std::invalid_argument("upsilon: expects a propagator-planted tree");
  const int a = element.edge.conjugate;
  if (element.is_leaf()) return UpsilonPattern{1, {UpsilonFactor{element.label, a == 1}}};
  const Tree& inner = element.children.front();
  int n = 0, m = 0;
  bool noisy = false;
  UpsilonPattern out;
  for (const auto& c : inner.children) {
    if (c.edge.type == EdgeType::noise) {
      noisy = true;
      continue;
    }
    (c.edge.conjugate ? m : n) += 1;
    const auto sub = upsilon(c);
    out.coefficient *= sub.coefficient;
    out.factors.insert(out.factors.end(), sub.factors.begin(), sub.factors.end());
  }
  // p_0 = v^2 vbar, p_1 = vbar^2 v, f_0 = v, f_1 = vbar as powers (of v, of vbar).
  int pv = 0, pvbar = 0;
  if (noisy) {
    pv = a == 0 ? 1 : 0;
    pvbar = a == 0 ? 0 : 1;
  } else {
    pv = a == 0 ? 2 : 1;
    pvbar = a == 0 ? 1 : 2;
  }
  out.coefficient *= falling(pv, n) * falling(pvbar, m);
  if (out.coefficient != 0 && (pv != n || pvbar != m))
    throw std::logic_error("upsilon: tree does not saturate its vertex polynomial");
  std::sort(out.factors.begin(), out.factors.end(),
            [](const UpsilonFactor& x, const UpsilonFactor& y) { return x.label < y.label; });
  return out;
}

Complex upsilon_value(const UpsilonPattern& pattern, const SpectralField& v,
                      const std::vector<Frequency>& leaves) {
  Complex out = static_cast<double>(pattern.coefficient);
  for (const auto& f : pattern.factors) {
    const Complex c = v.at(leaves.at(static_cast<std::size_t>(f.label - 1)));
    out *= f.conjugate ? std::conj(c) : c;
  }
  return out;
}

// ---------------------------------------------------------------- iterated integrals

namespace {

struct Quadrature {
  std::size_t n;
  double h;
};

Quadrature quadrature_for(const TreeIntegralContext& ctx, bool stochastic) {
  if (!(ctx.t > 0.0)) throw std::invalid_argument("tree integral: t must be positive");
  std::size_t n = ctx.resolution;
  if (ctx.path) {
    if (std::abs(ctx.path->horizon() - ctx.t) > 1e-12 * ctx.t)
      throw std::invalid_argument("tree integral: path horizon differs from t");
    if (n != 0 && n != ctx.path->steps())
      throw std::invalid_argument("tree integral: quadrature resolution incompatible with the path");
    n = ctx.path->steps();
  } else if (stochastic) {
    throw std::invalid_argument("tree integral: stochastic tree needs a Brownian path");
  }
  if (stochastic && !ctx.phi) throw std::invalid_argument("tree integral: stochastic tree needs Phi");
  if (n == 0) throw std::invalid_argument("tree integral: zero quadrature resolution");
  return {n, ctx.t / static_cast<double>(n)};
}

bool has_noise(const Tree& t) {
  if (t.edge.type == EdgeType::noise) return true;
  return std::any_of(t.children.begin(), t.children.end(), has_noise);
}

struct NoiseChannel {
  std::size_t index;
  Complex phi;
  bool conjugate;
  Complex dw(const BrownianPath& path, std::size_t j) const {
    const Complex z = path.increment(j, index);
    return conjugate ? std::conj(z) : z;
  }
};

NoiseChannel channel_for(const Tree& noise_leaf, const TreeIntegralContext& ctx) {
  const Frequency& k = ctx.leaves.at(static_cast<std::size_t>(noise_leaf.label - 1));
  const std::size_t idx = ctx.path->grid().index_of(k);
  const bool conj = noise_leaf.edge.conjugate == 1;
  const Complex phi = (*ctx.phi)[idx];
  return {idx, conj ? std::conj(phi) : phi, conj};
}

class Evaluator {
 public:
  Evaluator(const TreeIntegralContext& ctx, Quadrature q, std::size_t form_size)
      : ctx_(ctx), q_(q), size_(form_size) {}

  std::vector<Complex> values(const Tree& t) const {
    const std::size_t n = q_.n;
    const double k2 = squared_norm(concrete_frequency(form_sized(t, size_), ctx_.leaves));
    std::vector<Complex> product(n + 1, Complex{1.0, 0.0});
    const Tree* noise = nullptr;
    for (const auto& c : t.children) {
      if (c.edge.type == EdgeType::noise) {
        noise = &c;
        continue;
      }
      const auto sub = values(c);
      for (std::size_t j = 0; j <= n; ++j) product[j] *= sub[j];
    }
    const int p = t.edge.conjugate;
    auto weight = [&](double s) { return t.monomial > 0 ? std::pow(s, t.monomial) : 1.0; };
    std::vector<Complex> out(n + 1);
    if (t.edge.type == EdgeType::propagator) {
      const double phase = p == 0 ? -k2 : k2;
      for (std::size_t j = 0; j <= n; ++j) {
        const double s = q_.h * static_cast<double>(j);
        out[j] = std::polar(1.0, s * phase) * weight(s) * product[j];
      }
      return out;
    }
    if (t.edge.type != EdgeType::integral) throw std::logic_error("tree integral: bare noise edge");
    const double phase = p == 0 ? k2 : -k2;
    const Complex c = p == 0 ? -kI : kI;
    auto integrand = [&](std::size_t j) {
      const double s = q_.h * static_cast<double>(j);
      return std::polar(1.0, s * phase) * weight(s) * product[j];
    };
    out[0] = 0.0;
    if (noise) {
      const auto ch = channel_for(*noise, ctx_);
      for (std::size_t j = 0; j < n; ++j)
        out[j + 1] = out[j] + c * integrand(j) * ch.phi * ch.dw(*ctx_.path, j);
    } else {
      Complex prev = integrand(0);
      for (std::size_t j = 0; j < n; ++j) {
        const Complex next = integrand(j + 1);
        out[j + 1] = out[j] + c * 0.5 * q_.h * (prev + next);
        prev = next;
      }
    }
    return out;
  }

 private:
  const TreeIntegralContext& ctx_;
  Quadrature q_;
  std::size_t size_;
};

}  // namespace

Complex pi_exact(const Tree& tree, const TreeIntegralContext& ctx) {
  const auto q = quadrature_for(ctx, has_noise(tree));
  const std::size_t size = static_cast<std::size_t>(max_label(tree)) + 1;
  if (ctx.leaves.size() + 1 < size) throw std::invalid_argument("pi_exact: missing leaf frequencies");
  Evaluator ev(ctx, q, size);
  return ev.values(tree).back();
}

namespace {

// Running values of Phi_k (W_k(s_j) - W_k(0)) for j = 0..n.
std::vector<Complex> running_noise(const TreeIntegralContext& ctx, const Frequency& k, bool conj) {
  const std::size_t idx = ctx.path->grid().index_of(k);
  const Complex phi = conj ? std::conj((*ctx.phi)[idx]) : (*ctx.phi)[idx];
  std::vector<Complex> w(ctx.path->steps() + 1);
  for (std::size_t j = 0; j < ctx.path->steps(); ++j) {
    const Complex dw = conj ? std::conj(ctx.path->increment(j, idx)) : ctx.path->increment(j, idx);
    w[j + 1] = w[j] + phi * dw;
  }
  return w;
}

Complex noise_increment(const TreeIntegralContext& ctx, const Frequency& k, std::size_t j) {
  const std::size_t idx = ctx.path->grid().index_of(k);
  return (*ctx.phi)[idx] * ctx.path->increment(j, idx);
}

Complex trapezoid(const std::vector<Complex>& f, double h) {
  Complex s{};
  for (std::size_t j = 0; j + 1 < f.size(); ++j) s += 0.5 * h * (f[j] + f[j + 1]);
  return s;
}

// sum_j g(s_j) Phi_k dW_k(s_j)
template <typename G>
Complex ito_sum(const TreeIntegralContext& ctx, const Frequency& k, G g) {
  Complex s{};
  for (std::size_t j = 0; j < ctx.path->steps(); ++j) s += g(j) * noise_increment(ctx, k, j);
  return s;
}

}  // namespace

Complex pi_discrete(int index, const TreeIntegralContext& ctx, int n, int r_halves) {
  const bool deterministic = index == 1;
  const auto q = quadrature_for(ctx, !deterministic);
  const auto& k = ctx.leaves;
  auto need = [&](std::size_t count) {
    if (k.size() < count) throw std::invalid_argument("pi_discrete: missing leaf frequencies");
  };
  const double t = ctx.t;
  const bool low = n == 1 && r_halves == 2;
  const bool high = n == 2 && r_halves == 3;
  auto s_at = [&](std::size_t j) { return q.h * static_cast<double>(j); };

  switch (index) {
    case 1:
      need(3);
      if (low) {
        const double a = squared_norm(k[0]);
        if (a == 0.0) return -kI * t;
        return -(std::polar(1.0, 2.0 * a * t) - 1.0) / (2.0 * a);
      }
      if (high) return -kI * t;
      break;
    case 2:
      need(2);
      if (low || high) {
        const auto w = running_noise(ctx, k[1], false);
        Complex out = -kI * w.back();
        if (high) {
          const double p = squared_norm(k[1]) + 2.0 * dot(k[0], k[1]);
          out += p * ito_sum(ctx, k[1], [&](std::size_t j) { return Complex(s_at(j)); });
        }
        return out;
      }
      break;
    case 3:
      need(3);
      if (low || high) {
        const auto w = running_noise(ctx, k[1], false);
        return -ito_sum(ctx, k[2], [&](std::size_t j) { return w[j]; });
      }
      break;
    case 4: {
      need(4);
      if (high || (r_halves >= 4 && r_halves % 2 == 0 && n >= 1)) {
        const int terms = high ? 1 : r_halves / 2 - 1;
        Frequency k12{}, total{};
        for (int a = 0; a < 3; ++a) {
          k12[a] = k[0][a] + k[1][a];
          total[a] = k12[a] - k[2][a] + k[3][a];
        }
        const double p1 = squared_norm(total) + squared_norm(k[2]) - squared_norm(k[3]) - squared_norm(k12);
        const double p2 = squared_norm(k12) - squared_norm(k[0]);
        const auto w = running_noise(ctx, k[1], false);
        std::vector<Complex> f(w.size());
        for (std::size_t j = 0; j < w.size(); ++j) {
          const double s = s_at(j);
          Complex poly{}, term{1.0, 0.0};
          for (int l = 0; l < terms; ++l) {
            poly += term;
            term *= kI * (p1 + p2) * s / static_cast<double>(l + 1);
          }
          f[j] = poly * w[j];
        }
        return -trapezoid(f, q.h);
      }
      break;
    }
    case 5:
      need(4);
      if (high) return trapezoid(running_noise(ctx, k[1], true), q.h);
      break;
    case 6:
      need(4);
      if (high) return -ito_sum(ctx, k[3], [&](std::size_t j) { return Complex(s_at(j)); });
      break;
    case 7:
      need(4);
      if (high) {
        const auto w = running_noise(ctx, k[1], false);
        std::vector<Complex> inner(ctx.path->steps() + 1);
        for (std::size_t j = 0; j < ctx.path->steps(); ++j)
          inner[j + 1] = inner[j] + w[j] * noise_increment(ctx, k[2], j);
        return kI * ito_sum(ctx, k[3], [&](std::size_t j) { return inner[j]; });
      }
      break;
    default:
      throw std::invalid_argument("pi_discrete: tree index must be 1..7");
  }
  throw std::invalid_argument("pi_discrete: unsupported (tree, n, r) combination");
}

ResonanceSplit resonance_split(const Frequency& k1, const Frequency& k2, const Frequency& k3) {
  Frequency k23{};
  for (int a = 0; a < 3; ++a) k23[a] = k2[a] + k3[a];
  const double dominant = 2.0 * squared_norm(k1);
  const double full = dominant - 2.0 * dot(k1, k23) + 2.0 * dot(k2, k3);
  return {full, dominant, full - dominant};
}

}  // namespace lowreg::trees
