#include "reldiff/diagrams.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "reldiff/error.hpp"

namespace reldiff {

void validate_order(const Order& order) {
  if (order.size() < 2) throw ValidationError("a diagram order needs at least two levels");
  int total = 0;
  for (int l : order) {
    if (l < 1) throw ValidationError("diagram levels must hold at least one vertex");
    total += l;
  }
  if (total % 2 != 0) throw ValidationError("diagram order " + to_string(order) + " has an odd number of vertices");
  if (total > kMaxDiagramVertices) {
    throw ValidationError("diagram order " + to_string(order) + " exceeds the enumeration cap of " +
                          std::to_string(kMaxDiagramVertices) + " vertices");
  }
}

namespace {

// Depth-first perfect matchings with no intra-level edge. Keeps the edge list, the
// per-level count of edges going up (#B(i)) and the level-pair edge counts current.
struct Matcher {
  std::vector<int> level, index;
  int p = 0;
  Diagram d;
  std::vector<int> lower;
  std::vector<int> pair;  // p x p, [lo * p + hi]

  explicit Matcher(const Order& order) : p(static_cast<int>(order.size())) {
    for (int j = 0; j < p; ++j) {
      for (int i = 0; i < order[j]; ++i) {
        level.push_back(j);
        index.push_back(i);
      }
    }
    d.order = order;
    lower.assign(p, 0);
    pair.assign(p * p, 0);
  }

  bool regular() const {
    if (p % 2 != 0) return false;
    for (int j = 0; j < p; ++j) {
      int degree = 0;
      for (int k = 0; k < p; ++k) {
        if (k != j && pair[std::min(j, k) * p + std::max(j, k)] > 0) ++degree;
      }
      if (degree != 1) return false;
    }
    return true;
  }

  template <class Leaf>
  void run(std::uint32_t used, Leaf& leaf) {
    const int V = static_cast<int>(level.size());
    int v = 0;
    while (v < V && (used >> v & 1u)) ++v;
    if (v == V) {
      leaf(*this);
      return;
    }
    for (int w = v + 1; w < V; ++w) {
      if ((used >> w & 1u) || level[w] == level[v]) continue;
      d.edges.push_back({level[v], index[v], level[w], index[w]});
      ++lower[level[v]];
      ++pair[level[v] * p + level[w]];
      run(used | (1u << v) | (1u << w), leaf);
      --pair[level[v] * p + level[w]];
      --lower[level[v]];
      d.edges.pop_back();
    }
  }
};

template <class Leaf>
void enumerate(const Order& order, Leaf leaf) {
  validate_order(order);
  Matcher mt(order);
  mt.run(0, leaf);
}

}  // namespace

void for_each_complete(const Order& order, const std::function<void(const Diagram&)>& visit) {
  enumerate(order, [&](const Matcher& mt) { visit(mt.d); });
}

std::vector<Diagram> enumerate_complete(const Order& order) {
  std::vector<Diagram> out;
  for_each_complete(order, [&](const Diagram& d) { out.push_back(d); });
  return out;
}

std::uint64_t count_complete(const Order& order) {
  std::uint64_t n = 0;
  enumerate(order, [&](const Matcher&) { ++n; });
  return n;
}

std::optional<RegularDecomposition> is_regular(const Diagram& d) {
  const int p = static_cast<int>(d.order.size());
  if (p % 2 != 0) return std::nullopt;
  std::vector<std::vector<int>> count(p, std::vector<int>(p, 0));
  for (const auto& e : d.edges) ++count[e.level1][e.level2];
  RegularDecomposition dec;
  for (int j = 0; j < p; ++j) {
    int partner = -1, degree = 0;
    for (int k = 0; k < p; ++k) {
      const int c = j < k ? count[j][k] : count[k][j];
      if (c > 0) {
        partner = k;
        ++degree;
      }
    }
    // Every level has edges; regular means each touches exactly one other level.
    if (degree != 1) return std::nullopt;
    if (j < partner) {
      dec.pairs.push_back({j, partner});
      dec.edge_counts.push_back(count[j][partner]);
    }
  }
  return dec;
}

std::uint64_t count_regular(const Order& order) {
  std::uint64_t n = 0;
  enumerate(order, [&](const Matcher& mt) { n += mt.regular() ? 1 : 0; });
  return n;
}

std::vector<int> lower_edge_counts(const Diagram& d) {
  std::vector<int> b(d.order.size(), 0);
  for (const auto& e : d.edges) ++b[e.level1];
  return b;
}

InequalityCheck nonregular_inequality_check(const Order& order) {
  Order sorted = order;
  std::sort(sorted.begin(), sorted.end());
  // Integer form: sum_i #B(i) (lcm / l_i) >= (p/2) lcm, with 2 lcm to keep p/2 whole.
  std::int64_t lcm = 1;
  for (int l : sorted) lcm = std::lcm(lcm, static_cast<std::int64_t>(l));
  std::vector<std::int64_t> scale;
  for (int l : sorted) scale.push_back(2 * lcm / l);
  const std::int64_t target = static_cast<std::int64_t>(sorted.size()) * lcm;
  InequalityCheck out;
  std::optional<std::int64_t> min_margin;
  enumerate(sorted, [&](const Matcher& mt) {
    ++out.complete;
    if (mt.regular()) return;
    ++out.nonregular;
    std::int64_t s = 0;
    for (std::size_t i = 0; i < scale.size(); ++i) s += mt.lower[i] * scale[i];
    const std::int64_t margin = s - target;
    if (!min_margin || margin < *min_margin) min_margin = margin;
    if (margin < 0 && out.ok) {
      out.ok = false;
      out.witness = mt.d;
    }
  });
  if (min_margin) out.min_margin = Rational(*min_margin, 2 * lcm);
  return out;
}

BigInt double_factorial(int k) {
  BigInt r = 1;
  for (int i = k; i > 1; i -= 2) r *= i;
  return r;
}

namespace {

BigInt factorial(int k) {
  BigInt r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

void check_weights(const std::vector<Rational>& weights, int m, int nu) {
  if (nu < 1 || nu > 4) throw ValidationError("regular_sum supports 1 <= nu <= 4");
  if (m < 1) throw ValidationError("regular_sum needs m >= 1");
  if (weights.empty() || weights.size() > 8) throw ValidationError("regular_sum takes 1 to 8 weights");
  for (const auto& w : weights) {
    if (w < 0) throw ValidationError("regular_sum weights must be nonnegative");
  }
  double tuples = std::pow(static_cast<double>(weights.size()), 2.0 * nu);
  if (tuples > static_cast<double>(1 << 20)) {
    throw ValidationError("regular_sum enumeration cap exceeded: (N0 - m + 1)^{2 nu} > 2^20");
  }
}

Rational closed_form(const std::vector<Rational>& weights, int nu) {
  Rational s = 0;
  for (const auto& w : weights) s += w;
  Rational p = 1;
  for (int i = 0; i < nu; ++i) p *= s;
  return Rational(double_factorial(2 * nu - 1)) * p;
}

// Calls f(L) for every L in {m..N0}^{len}.
template <class F>
void for_each_tuple(int m, int n0, int len, F f) {
  Order L(len, m);
  while (true) {
    f(L);
    int i = len - 1;
    while (i >= 0 && L[i] == n0) L[i--] = m;
    if (i < 0) return;
    ++L[i];
  }
}

// Sum over perfect matchings of the levels in `free` with equal-size partners.
void level_pairings(const Order& L, std::uint32_t free, const std::vector<Rational>& weights, int m, Rational acc,
                    BigInt count, Rational& total, BigInt& diagrams) {
  if (free == 0) {
    total += acc;
    diagrams += count;
    return;
  }
  const int j = std::countr_zero(free);
  for (int k = j + 1; k < static_cast<int>(L.size()); ++k) {
    if (!(free >> k & 1u) || L[k] != L[j]) continue;
    const int l = L[j];
    // l! bijections, each weighted w_l / l!.
    level_pairings(L, free & ~(1u << j) & ~(1u << k), weights, m, acc * weights[l - m], count * factorial(l), total,
                   diagrams);
  }
}

}  // namespace

RegularSum regular_sum(const std::vector<Rational>& weights, int m, int nu) {
  check_weights(weights, m, nu);
  const int n0 = m + static_cast<int>(weights.size()) - 1;
  RegularSum out;
  out.enumeration = 0;
  for_each_tuple(m, n0, 2 * nu, [&](const Order& L) {
    level_pairings(L, (1u << (2 * nu)) - 1u, weights, m, Rational(1), BigInt(1), out.enumeration, out.diagrams);
  });
  out.closed_form = closed_form(weights, nu);
  out.residual = out.enumeration - out.closed_form;
  return out;
}

RegularSum regular_sum_bruteforce(const std::vector<Rational>& weights, int m, int nu) {
  check_weights(weights, m, nu);
  const int n0 = m + static_cast<int>(weights.size()) - 1;
  if (2 * nu * n0 > kMaxDiagramVertices) {
    throw ValidationError("regular_sum_bruteforce: 2 nu N0 exceeds the vertex cap of " +
                          std::to_string(kMaxDiagramVertices));
  }
  RegularSum out;
  out.enumeration = 0;
  for_each_tuple(m, n0, 2 * nu, [&](const Order& L) {
    int total = 0;
    for (int l : L) total += l;
    if (total % 2 != 0) return;  // no complete diagram
    for_each_complete(L, [&](const Diagram& d) {
      const auto dec = is_regular(d);
      if (!dec) return;
      Rational term = 1;
      for (int c : dec->edge_counts) {
        // A sub-diagram joins two levels of equal size c.
        term *= weights[c - m] / Rational(factorial(c));
      }
      out.enumeration += term;
      out.diagrams += 1;
    });
  });
  out.closed_form = closed_form(weights, nu);
  out.residual = out.enumeration - out.closed_form;
  return out;
}

BigInt regular_multiplicity(const std::vector<int>& r, const std::vector<int>& q) {
  if (r.size() != q.size() || r.empty()) throw ValidationError("regular_multiplicity needs matching non-empty r and q");
  BigInt num = 1, den = 1;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < 1 || q[i] < 1) throw ValidationError("regular_multiplicity needs r_i, q_i >= 1");
    num *= factorial(2 * q[i]);
    den *= BigInt(1) << q[i];
    den *= factorial(q[i]);
    BigInt rf = factorial(r[i]);
    for (int k = 0; k < q[i]; ++k) num *= rf;
  }
  return num / den;
}

std::string to_string(const Order& order) {
  std::string s = "(";
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(order[i]);
  }
  return s + ")";
}

}  // namespace reldiff
